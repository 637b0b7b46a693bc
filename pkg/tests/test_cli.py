import json

import pytest
from click.testing import CliRunner

from main import cli

from .conftest import PLUS_TURNS


@pytest.fixture
def runner(monkeypatch):
    monkeypatch.setenv("NO_COLOR", "1")
    return CliRunner()


def _claims_file(path, claims):
    path.write_text(json.dumps(claims))
    return str(path)


def test_game_winner(runner):
    result = runner.invoke(cli, ["game", "winner", "--spaces", "7"])
    assert result.exit_code == 0
    assert result.output.strip() == "A (grundy=1)"
    result = runner.invoke(cli, ["game", "winner", "--spaces", "4"])
    assert result.output.strip() == "B (grundy=0)"


def test_game_winner_rejects_negative_lengths(runner):
    assert runner.invoke(cli, ["game", "winner", "--spaces", "-1"]).exit_code == 2


def test_game_grundy(runner, tmp_path):
    out = tmp_path / "grundy.json"
    result = runner.invoke(cli, ["game", "grundy", "--max", "7", "--json", str(out)])
    assert result.exit_code == 0
    assert result.output.splitlines()[0] == "0 1 1 2 0 3 1 1"
    assert json.loads(out.read_text()) == [0, 1, 1, 2, 0, 3, 1, 1]


def test_game_grundy_period(runner):
    result = runner.invoke(cli, ["game", "grundy", "--max", "2000", "--detect-period"])
    assert result.exit_code == 0
    assert "period=34" in result.output.splitlines()[-1]
    short = runner.invoke(cli, ["game", "grundy", "--max", "1", "--detect-period"])
    assert short.output.splitlines()[-1] == "period: none found"


def test_game_verify_mirror(runner):
    result = runner.invoke(cli, ["game", "verify-mirror", "--max-odd", "7"])
    assert result.exit_code == 0
    assert result.output.splitlines() == ["n=1: pass", "n=3: pass", "n=5: pass", "n=7: pass", "all pass"]


def test_game_board(runner, tmp_path):
    svg = tmp_path / "board.svg"
    result = runner.invoke(cli, ["game", "board", "--spaces", "7", "--occupied", "4", "--svg", str(svg)])
    assert result.exit_code == 0
    assert "legal moves: 1 2 6 7" in result.output
    assert "grundy: 0" in result.output
    assert "optimal move: none" in result.output
    assert svg.read_text().startswith("<svg")


def test_game_play_mirror_against_lowest_cell(runner, tmp_path):
    svg = tmp_path / "final.svg"
    result = runner.invoke(cli, ["game", "play", "--spaces", "7", "--first", "mirror", "--second", "lowest",
                                 "--svg", str(svg)])
    assert result.exit_code == 0
    assert result.output.splitlines() == ["moves: 4 1 7", "last placement: A"]
    assert svg.read_text().count('class="counter"') == 3


def test_game_play_rejects_mirror_on_even_rows(runner):
    assert runner.invoke(cli, ["game", "play", "--spaces", "6"]).exit_code == 2


@pytest.mark.parametrize("occupied", ["1,2", "9", "x"])
def test_game_board_rejects_bad_counters(runner, occupied):
    result = runner.invoke(cli, ["game", "board", "--spaces", "7", "--occupied", occupied])
    assert result.exit_code == 2


def test_poly_enumerate(runner, tmp_path):
    result = runner.invoke(cli, ["poly", "enumerate", "--sides", "4", "--svg", str(tmp_path / "figs"),
                                 "--json", str(tmp_path / "polys.json")])
    assert result.exit_code == 0
    assert result.output.splitlines() == ["count: 1", "LLLL"]
    assert (tmp_path / "figs" / "poly-LLLL.svg").exists()
    assert json.loads((tmp_path / "polys.json").read_text())[0]["turns"] == "LLLL"


@pytest.mark.parametrize("sides", ["5", "2"])
def test_poly_enumerate_rejects_bad_side_counts(runner, sides):
    assert runner.invoke(cli, ["poly", "enumerate", "--sides", sides]).exit_code == 2


def test_poly_props(runner):
    result = runner.invoke(cli, ["poly", "props", "--turns", PLUS_TURNS])
    assert result.exit_code == 0
    assert "corners: convex=8 reflex=4" in result.output
    assert "symmetry: full-8 (order 8)" in result.output
    assert "area: 5" in result.output


@pytest.mark.parametrize("turns", ["LRLR", "LRLLLRLL", "LLXL"])
def test_poly_props_rejects_invalid_words(runner, turns):
    assert runner.invoke(cli, ["poly", "props", "--turns", turns]).exit_code == 2


def test_tile_square(runner, tmp_path):
    svg, cert = tmp_path / "tiles.svg", tmp_path / "cert.json"
    result = runner.invoke(cli, ["tile", "--turns", "LLLL", "--svg", str(svg), "--cert", str(cert)])
    assert result.exit_code == 0
    assert result.output.strip() == "translation u=(1, 1) v=(0, 1)"
    assert svg.read_text().count('class="tile"') == 9
    assert json.loads(cert.read_text())["kind"] == "translation"


def test_tile_periodic(runner):
    result = runner.invoke(cli, ["tile", "--turns", PLUS_TURNS, "--method", "torus", "--max-torus", "5"])
    assert result.exit_code == 0
    assert result.output.strip() == "periodic 5x1 shear=2 placements=1 reflections=no"


def test_tile_unknown_within_bounds(runner, tmp_path):
    cert = tmp_path / "cert.json"
    result = runner.invoke(cli, ["tile", "--turns", PLUS_TURNS, "--method", "torus", "--max-torus", "2",
                                 "--cert", str(cert)])
    assert result.exit_code == 1
    assert "unknown" in result.output
    assert json.loads(cert.read_text()) == {"kind": "unknown"}


def test_tile_rejects_invalid_words(runner):
    assert runner.invoke(cli, ["tile", "--turns", "LL"]).exit_code == 2
    assert runner.invoke(cli, ["tile", "--turns", "LLLL", "--max-torus", "0"]).exit_code == 2


def test_claims_run_with_file(runner, tmp_path):
    path = _claims_file(tmp_path / "claims.json",
                        [{"id": "X-1", "checker": "winner_is", "parameters": {"n": 9, "winner": "A"}}])
    out, md = tmp_path / "report.json", tmp_path / "report.md"
    result = runner.invoke(cli, ["claims", "run", "--claims", path, "--skip-builtin",
                                 "--out", str(out), "--md", str(md)])
    assert result.exit_code == 0
    assert "PASS" in result.output
    assert "pass=1 fail=0 unknown=0" in result.output
    report = json.loads(out.read_text())
    assert report["results"][0]["claim_id"] == "X-1"
    assert "timestamp" not in report
    assert md.read_text().startswith("# Claims report")


def test_claims_run_exits_one_on_mismatch(runner, tmp_path):
    path = _claims_file(tmp_path / "claims.json",
                        [{"id": "X-1", "checker": "winner_is", "parameters": {"n": 4, "winner": "A"}}])
    result = runner.invoke(cli, ["claims", "run", "--claims", path, "--skip-builtin"])
    assert result.exit_code == 1
    assert "FAIL" in result.output


@pytest.mark.parametrize("content", ["[{", '[{"id": "X-1", "checker": "nope"}]'])
def test_claims_run_rejects_bad_files(runner, tmp_path, content):
    path = tmp_path / "claims.json"
    path.write_text(content)
    result = runner.invoke(cli, ["claims", "run", "--claims", str(path), "--skip-builtin"])
    assert result.exit_code == 2


def test_claims_run_rejects_undecodable_files(runner, tmp_path):
    path = tmp_path / "claims.json"
    path.write_bytes(b"\xff[")
    result = runner.invoke(cli, ["claims", "run", "--claims", str(path), "--skip-builtin"])
    assert result.exit_code == 2
    assert "cannot read claim file" in result.output


def test_claims_run_rejects_duplicate_ids(runner, tmp_path):
    claim = {"id": "X-1", "checker": "winner_is", "parameters": {"n": 1, "winner": "A"}}
    path = _claims_file(tmp_path / "claims.json", [claim, claim])
    assert runner.invoke(cli, ["claims", "run", "--claims", path, "--skip-builtin"]).exit_code == 2


def test_log_file_option(runner, tmp_path):
    log_file = tmp_path / "logs" / "run.log"
    result = runner.invoke(cli, ["--verbose", "--log-file", str(log_file), "game", "winner", "--spaces", "3"])
    assert result.exit_code == 0
    assert log_file.exists()


@pytest.mark.slow
def test_builtin_claims_pass_from_the_command_line(runner):
    result = runner.invoke(cli, ["--threads", "2", "claims", "run"])
    assert result.exit_code == 0, result.output
    assert "fail=0 unknown=0" in result.output


def test_unit_option_scales_figures(runner, tmp_path):
    svg = tmp_path / "board.svg"
    result = runner.invoke(cli, ["--unit", "10", "game", "board", "--spaces", "2", "--svg", str(svg)])
    assert result.exit_code == 0
    assert 'width="40"' in svg.read_text()
