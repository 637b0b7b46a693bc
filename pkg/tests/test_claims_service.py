import asyncio
import json
from pathlib import Path

import pytest

from services import claims_service
from services.artifact_service import ArtifactService
from services.claims_orchestrator import ClaimsOrchestrator, run_claims
from services.claims_service import Claim, ClaimsContext
from services.errors import ClaimParseError, DuplicateClaimError, ParameterTypeError, UnknownCheckerError

GOLDEN = Path(__file__).parent / "golden"

EXAMPLE_FILE = """[
  {"id": "X-1", "source": "example", "statement": "A wins with 9 spaces.",
   "checker": "winner_is", "parameters": {"n": 9, "winner": "A"}},
  {"id": "X-2", "checker": "strategy_wins", "parameters": {"max_n": 5}}
]"""


def _claim(claim_id, checker, parameters, expected_verdict=True):
    return claims_service.normalized(Claim(id=claim_id, checker=checker, parameters=parameters,
                                           expected_verdict=expected_verdict))


@pytest.fixture
def context():
    return ClaimsContext()


def test_builtin_registry():
    claims = claims_service.builtin_claims()
    ids = [claim.id for claim in claims]
    assert len(claims) >= 13
    assert len(set(ids)) == len(ids)
    assert all(claim.checker in claims_service.CHECKERS for claim in claims)


def test_load_claims_fills_defaults():
    first, second = claims_service.load_claims(EXAMPLE_FILE)
    assert first.parameters == {"n": 9, "winner": "A", "start": 1}
    assert second.source == ""
    assert second.expected_verdict is True
    assert second.parameters == {"strategy": "mirror", "max_n": 5, "player": "first"}


def test_load_claims_accepts_an_empty_array():
    assert claims_service.load_claims("[]") == []


def test_load_claims_reports_json_position():
    with pytest.raises(ClaimParseError) as excinfo:
        claims_service.load_claims('[\n  {"id": "X-1",\n  "checker" "winner_is"}\n]')
    assert excinfo.value.line == 3


@pytest.mark.parametrize("content", ['{"id": "X-1"}', '[{"id": "X-1"}]', '[{"checker": "winner_is"}]'])
def test_load_claims_rejects_bad_shapes(content):
    with pytest.raises(ClaimParseError):
        claims_service.load_claims(content)


def test_load_claims_rejects_unknown_checker():
    with pytest.raises(UnknownCheckerError):
        claims_service.load_claims('[{"id": "X-1", "checker": "is_true", "parameters": {}}]')


@pytest.mark.parametrize("parameters", [
    {"n": "seven", "winner": "A"},
    {"n": 7, "winner": "C"},
    {"n": 7},
    {"n": 7, "winner": "A", "winners": "AA"},
    {"n": 7, "winner": "A", "colour": "red"},
])
def test_load_claims_rejects_bad_parameters(parameters):
    content = json.dumps([{"id": "X-1", "checker": "winner_is", "parameters": parameters}])
    with pytest.raises(ParameterTypeError):
        claims_service.load_claims(content)


def test_dump_then_load_keeps_claims():
    claims = claims_service.builtin_claims()
    assert claims_service.load_claims(claims_service.dump_claims(claims)) == claims


def test_empty_run():
    report = run_claims([])
    assert report.results == []
    assert report.summary == {"pass": 0, "fail": 0, "unknown": 0}
    assert report.mismatches == []


def test_duplicate_ids_are_rejected():
    claim = _claim("X-1", "winner_is", {"n": 1, "winner": "A"})
    with pytest.raises(DuplicateClaimError):
        run_claims([claim, claim])


def test_wrong_winner_claim_fails(context):
    report = run_claims([_claim("X-1", "winner_is", {"n": 4, "winner": "A"})], context=context)
    result = report.results[0]
    assert result.verdict is False
    assert result.status == "fail"
    assert result.evidence["winner"] == "B"
    assert report.mismatches == [result]


def test_winner_table_counterexample(context):
    verdict, evidence = claims_service.evaluate(
        _claim("X-1", "winner_is", {"winners": "AAAAAAA", "start": 1}), context)
    assert verdict is False
    assert evidence["counterexample"] == {"n": 4, "claimed": "A", "winner": "B"}
    assert evidence["computed"] == "AAABAAA"


def test_even_n_claim_is_refuted_at_two(context):
    claim = next(c for c in claims_service.builtin_claims() if c.id == "GAME-3")
    verdict, evidence = claims_service.evaluate(claim, context)
    assert verdict is False
    assert evidence["n"] == 2
    assert evidence["first_move"] == 1
    assert evidence["board"] == {"length": 2, "occupied": [1]}
    assert evidence["legal_replies"] == []


def test_nim_heap_of_size_n_is_refuted(context):
    verdict, evidence = claims_service.evaluate(
        _claim("X-1", "claim_is_false_with_counterexample", {"assertion": "row_is_nim_heap_of_size_n"}), context)
    assert verdict is False
    assert evidence == {"n": 2, "nim_heap": 1}


def test_polyomino_parity_counterexample(context):
    verdict, evidence = claims_service.evaluate(
        _claim("X-1", "claim_is_false_with_counterexample", {"assertion": "polyomino_even_right_angles"}), context)
    assert verdict is False
    assert (evidence["count_90"], evidence["count_270"]) == (5, 1)


def test_two_member_claim_reports_the_true_count(context):
    claim = next(c for c in claims_service.builtin_claims() if c.id == "POLY-8")
    verdict, evidence = claims_service.evaluate(claim, context)
    assert verdict is False
    assert evidence["count"] == 7
    assert len(evidence["canonical_words"]) == 7


def test_checker_exceptions_become_unknown(monkeypatch):
    def explode(params, context):
        raise RuntimeError("engine exploded")

    params_model, _ = claims_service.CHECKERS["winner_is"]
    monkeypatch.setitem(claims_service.CHECKERS, "winner_is", (params_model, explode))
    report = run_claims([_claim("X-1", "winner_is", {"n": 1, "winner": "A"})])
    result = report.results[0]
    assert result.verdict is None
    assert result.status == "unknown"
    assert "engine exploded" in result.diagnostics
    assert report.summary["unknown"] == 1


def test_results_are_sorted_by_id_with_threads():
    claims = [_claim(f"X-{n}", "winner_is", {"n": n, "winner": "A"}) for n in (9, 3, 7, 5)]
    report = run_claims(claims, threads=4)
    assert [result.claim_id for result in report.results] == ["X-3", "X-5", "X-7", "X-9"]
    assert report.summary == {"pass": 4, "fail": 0, "unknown": 0}


def test_report_json_leaves_out_timings_by_default():
    report = run_claims([_claim("X-1", "winner_is", {"n": 7, "winner": "A"})])
    plain = json.loads(claims_service.report_to_json(report))
    assert "timestamp" not in plain
    assert "runtime" not in plain["results"][0]
    timed = json.loads(claims_service.report_to_json(report, timings=True))
    assert timed["timestamp"] == report.timestamp
    assert "runtime" in timed["results"][0]


def test_markdown_report():
    report = run_claims([
        _claim("X-1", "winner_is", {"n": 7, "winner": "A"}),
        _claim("X-2", "winner_is", {"n": 4, "winner": "A"}),
    ])
    markdown = claims_service.render_markdown(report)
    assert markdown.startswith("# Claims report\n")
    assert "| X-1 |" in markdown
    assert "| FAIL |" in markdown
    assert "Generated:" not in markdown


def test_game_claim_reports_match_the_checked_in_golden_files():
    claims = [claim for claim in claims_service.builtin_claims() if claim.id in {"GAME-1", "GAME-4", "GAME-6"}]
    report = run_claims(claims, threads=2)
    expected_json = (GOLDEN / "game_claims_report.json").read_text(encoding="utf-8")
    expected_md = (GOLDEN / "game_claims_report.md").read_text(encoding="utf-8")
    assert claims_service.report_to_json(report) == expected_json
    assert claims_service.render_markdown(report) == expected_md


def test_orchestrator_logs_run_events(tmp_path):
    orchestrator = ClaimsOrchestrator(data_logger=ArtifactService(str(tmp_path)))
    asyncio.run(orchestrator.run([_claim("X-1", "winner_is", {"n": 1, "winner": "A"})]))
    events = [json.loads(line) for line in (tmp_path / "run_events.log").read_text().splitlines()]
    assert events[-1]["event_type"] == "claims_run"
    assert events[-1]["data"] == {"pass": 1, "fail": 0, "unknown": 0}


@pytest.mark.slow
def test_builtin_claims_all_pass_and_reports_are_deterministic():
    claims = claims_service.builtin_claims()
    first = run_claims(claims, threads=2)
    assert first.mismatches == [], [(r.claim_id, r.status, r.diagnostics) for r in first.mismatches]
    second = run_claims(claims)
    assert claims_service.report_to_json(first) == claims_service.report_to_json(second)
    assert claims_service.render_markdown(first) == claims_service.render_markdown(second)
