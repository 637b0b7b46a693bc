import json
import logging
import threading
from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError, model_validator

from . import __version__, game_service, polygon_service, tiling_service
from .errors import ClaimParseError, ParameterTypeError, UnknownCheckerError

# Configure module logger
logger = logging.getLogger(__name__)


class Claim(BaseModel):
    """A published or model-made assertion in machine-checkable form"""
    id: str
    source: str = ""
    statement: str = ""
    checker: str
    parameters: dict[str, Any] = Field(default_factory=dict)
    expected_verdict: bool = True


class ClaimResult(BaseModel):
    claim_id: str
    source: str
    statement: str
    expected_verdict: bool
    verdict: Optional[bool]
    status: Literal["pass", "fail", "unknown"]
    evidence: dict[str, Any] = Field(default_factory=dict)
    diagnostics: Optional[str] = None
    runtime: float = 0.0


class ClaimReport(BaseModel):
    results: list[ClaimResult]
    summary: dict[str, int]
    engine_version: str = __version__
    timestamp: str = ""

    @property
    def mismatches(self):
        return [result for result in self.results if result.status != "pass"]


# Checker parameters

class _Params(BaseModel):
    model_config = ConfigDict(extra="forbid")


class WinnerIsParams(_Params):
    n: Optional[int] = Field(default=None, ge=0)
    winner: Optional[game_service.Winner] = None
    winners: Optional[str] = Field(default=None, pattern=r"^[AB]+$")
    start: int = Field(default=1, ge=0)

    @model_validator(mode="after")
    def _one_form(self):
        single = self.n is not None and self.winner is not None
        if single == (self.winners is not None):
            raise ValueError("give either n and winner, or a winners table")
        return self


class StrategyWinsParams(_Params):
    strategy: Literal["mirror", "lowest_cell"] = "mirror"
    max_n: int = Field(ge=1)
    player: game_service.StrategyPlayer = game_service.StrategyPlayer.FIRST


class CounterexampleParams(_Params):
    assertion: Literal[
        "second_player_wins_even_n",
        "row_is_nim_heap_of_size_n",
        "nim_heap_equivalence",
        "polyomino_even_right_angles",
    ]
    max_n: int = Field(default=12, ge=0)


class PolygonCountParams(_Params):
    n_sides: int = Field(ge=4)
    count: int = Field(ge=0)
    equivalence: Literal["congruence", "rotation"] = "congruence"


PolygonProperty = Literal[
    "even_convex_corners",
    "convex",
    "symmetric",
    "trivial_symmetry",
    "alternating",
    "equiangular",
    "unit_square_decomposition",
]


class PolygonPropertyParams(_Params):
    n_sides: int = Field(ge=4)
    property: PolygonProperty


class AllPolygonsTileParams(_Params):
    n_sides: int = Field(ge=4)
    max_dim: int = Field(default=tiling_service.DEFAULT_MAX_DIM, ge=1)


class ClaimsContext:
    """Engine state shared by the checkers of one run; caches are lock-guarded"""

    def __init__(self):
        self.table = game_service.GrundyTable()
        self._lock = threading.Lock()
        self._polygons = {}
        self._certificates = {}

    def polygons(self, n_sides):
        with self._lock:
            if n_sides not in self._polygons:
                self._polygons[n_sides] = polygon_service.enumerate_polygons(n_sides)
            return self._polygons[n_sides]

    def certificate(self, polygon, max_dim):
        key = (polygon.turns, max_dim)
        with self._lock:
            if key in self._certificates:
                return self._certificates[key]
        cert = tiling_service.tile_any(polygon, max_dim)
        with self._lock:
            self._certificates[key] = cert
        return cert


# Checkers: each returns (verdict or None for unknown, evidence)

def _check_winner_is(params, context):
    if params.winners is None:
        computed = game_service.winner(params.n, context.table)
        return computed == params.winner, {
            "n": params.n,
            "winner": computed.value,
            "grundy": game_service.grundy_free_row(params.n, context.table),
        }
    span = range(params.start, params.start + len(params.winners))
    computed = "".join(game_service.winner(n, context.table).value for n in span)
    evidence = {
        "start": params.start,
        "computed": computed,
        "grundy": [game_service.grundy_free_row(n, context.table) for n in span],
    }
    for offset, (claimed, actual) in enumerate(zip(params.winners, computed)):
        if claimed != actual:
            evidence["counterexample"] = {"n": params.start + offset, "claimed": claimed, "winner": actual}
            return False, evidence
    return True, evidence


def _check_strategy_wins(params, context):
    if params.strategy == "mirror":
        sizes = range(1, params.max_n + 1, 2)
        build = game_service.mirror_strategy
    else:
        sizes = range(0, params.max_n + 1)
        build = lambda n: game_service.lowest_cell_strategy()
    checked = []
    for n in sizes:
        if not game_service.verify_strategy(build(n), n, params.player):
            return False, {"checked": checked, "counterexample": {"n": n, "player": params.player.value}}
        checked.append(n)
    return True, {"checked": checked}


def _board_evidence(board):
    return {
        "board": board.model_dump(mode="json"),
        "legal_replies": game_service.legal_moves(board),
    }


def _check_counterexample(params, context):
    """Evaluate a named universal assertion; a failure carries the least counterexample"""
    table = context.table
    if params.assertion == "second_player_wins_even_n":
        for n in range(0, params.max_n + 1, 2):
            if game_service.winner(n, table) is game_service.Winner.A:
                empty = game_service.BoardPosition.empty(n)
                move = game_service.optimal_move(empty, table)
                after = game_service.apply_move(empty, move)
                return False, {"n": n, "first_move": move, **_board_evidence(after)}
        return True, {"checked_up_to": params.max_n}
    if params.assertion == "row_is_nim_heap_of_size_n":
        for n in range(params.max_n + 1):
            value = game_service.nim_heap_equivalent(n, table)
            if value != n:
                return False, {"n": n, "nim_heap": value}
        return True, {"checked_up_to": params.max_n}
    if params.assertion == "nim_heap_equivalence":
        for n in range(params.max_n + 1):
            value = game_service.nim_heap_equivalent(n, table)
            for heap in range(value + 2):
                zero_sum = game_service.compound_with_nim_is_second_player_win(n, heap)
                if zero_sum != (heap == value):
                    return False, {"n": n, "heap": heap, "grundy": value, "second_player_wins": zero_sum}
        return True, {"checked_up_to": params.max_n,
                      "heaps": [game_service.nim_heap_equivalent(n, table) for n in range(params.max_n + 1)]}
    # polyomino_even_right_angles
    for name, steps in (("square", "ENWS"), ("P-pentomino", polygon_service.P_PENTOMINO_STEPS)):
        convex, reflex = polygon_service.general_right_angle_count(steps)
        if convex % 2:
            return False, {"polyomino": name, "steps": steps, "count_90": convex, "count_270": reflex}
    return True, {}


def _check_polygon_count(params, context):
    polygons = context.polygons(params.n_sides)
    rotation_count = polygon_service.count_rotation_classes(params.n_sides)
    actual = len(polygons) if params.equivalence == "congruence" else rotation_count
    evidence = {
        "count": len(polygons),
        "rotation_count": rotation_count,
        "canonical_words": [polygon.turns for polygon in polygons],
    }
    return actual == params.count, evidence


def _polygon_property(polygon, name):
    if name == "even_convex_corners":
        convex, reflex = polygon_service.right_angle_count(polygon)
        return convex % 2 == 0, {"convex_corners": convex, "reflex_corners": reflex}
    if name == "convex":
        return polygon_service.is_convex(polygon), {"reflex_corners": polygon_service.right_angle_count(polygon)[1]}
    if name in ("symmetric", "trivial_symmetry"):
        group = polygon_service.symmetry_group(polygon)
        symmetric = group.order > 1
        return symmetric if name == "symmetric" else not symmetric, {"symmetry": group.label}
    if name == "alternating":
        return polygon_service.is_alternating(polygon), {}
    if name == "equiangular":
        return polygon_service.is_equiangular(polygon), {}
    cells = polygon_service.rasterize(polygon)
    polygon_area = polygon_service.area(polygon)
    return len(cells) == polygon_area, {
        "area": polygon_area,
        "unit_squares": len(cells),
        "triangles": polygon_service.triangle_count(polygon),
    }


def _check_all_polygons(params, context):
    details = []
    for polygon in context.polygons(params.n_sides):
        holds, detail = _polygon_property(polygon, params.property)
        if not holds:
            return False, {"counterexample": polygon_service.polygon_to_json(polygon), **detail}
        details.append({"turns": polygon.turns, **detail})
    return True, {"polygons": details}


def _check_exists_polygon(params, context):
    polygons = context.polygons(params.n_sides)
    for polygon in polygons:
        holds, detail = _polygon_property(polygon, params.property)
        if holds:
            return True, {"witness": polygon_service.polygon_to_json(polygon), **detail}
    return False, {"checked": [polygon.turns for polygon in polygons]}


def _check_all_tile(params, context):
    certificates = {}
    unknown = []
    for polygon in context.polygons(params.n_sides):
        cert = context.certificate(polygon, params.max_dim)
        if cert is None:
            unknown.append(polygon.turns)
            continue
        if not tiling_service.verify_certificate(polygon, cert):
            return False, {"rejected_certificate": polygon.turns}
        certificates[polygon.turns] = {
            "kind": cert.kind,
            "reflections": tiling_service.certificate_uses_reflections(cert),
        }
    evidence = {"certificates": certificates}
    if unknown:
        evidence["unknown"] = unknown
        return None, evidence
    return True, evidence


CHECKERS = {
    "winner_is": (WinnerIsParams, _check_winner_is),
    "strategy_wins": (StrategyWinsParams, _check_strategy_wins),
    "claim_is_false_with_counterexample": (CounterexampleParams, _check_counterexample),
    "polygon_count_is": (PolygonCountParams, _check_polygon_count),
    "all_polygons_satisfy": (PolygonPropertyParams, _check_all_polygons),
    "exists_polygon_satisfying": (PolygonPropertyParams, _check_exists_polygon),
    "all_polygons_tile": (AllPolygonsTileParams, _check_all_tile),
}


def parse_parameters(claim):
    if claim.checker not in CHECKERS:
        raise UnknownCheckerError(f"claim {claim.id!r} uses unknown checker {claim.checker!r}")
    params_model, _ = CHECKERS[claim.checker]
    try:
        return params_model.model_validate(claim.parameters)
    except ValidationError as e:
        raise ParameterTypeError(f"claim {claim.id!r}: bad parameters for {claim.checker}: {e}") from e


def normalized(claim):
    """Claim with parameters type-checked and defaults filled in"""
    params = parse_parameters(claim)
    return claim.model_copy(update={"parameters": params.model_dump(mode="json", exclude_none=True)})


def evaluate(claim, context):
    params = parse_parameters(claim)
    _, check = CHECKERS[claim.checker]
    return check(params, context)


def _claim(claim_id, source, statement, checker, parameters, expected_verdict=True):
    return normalized(Claim(
        id=claim_id,
        source=source,
        statement=statement,
        checker=checker,
        parameters=parameters,
        expected_verdict=expected_verdict,
    ))


def builtin_claims():
    return [
        _claim("GAME-1", "Claude 3, decidable game", "Player A wins the 7-space game.",
               "winner_is", {"n": 7, "winner": "A"}),
        _claim("GAME-2", "Claude 3, decidable game", "Center-then-mirror wins for every odd n (checked n <= 25).",
               "strategy_wins", {"strategy": "mirror", "max_n": 25}),
        _claim("GAME-3", "Claude 3, decidable game", "Player B has a winning strategy for every even n.",
               "claim_is_false_with_counterexample", {"assertion": "second_player_wins_even_n", "max_n": 24},
               expected_verdict=False),
        _claim("GAME-4", "Authors on Bing Copilot's case analysis", "Winners for n = 1..7 are A, A, A, B, A, A, A.",
               "winner_is", {"winners": "AAABAAA", "start": 1}),
        _claim("GAME-5", "Authors, conclusion", "The row game is equivalent to a Nim heap of size g[n] (n <= 12).",
               "claim_is_false_with_counterexample", {"assertion": "nim_heap_equivalence", "max_n": 12}),
        _claim("GAME-6", "Claude 3 and ChatGPT-3.5-Turbo", "The game is Nim with a heap of n.",
               "claim_is_false_with_counterexample", {"assertion": "row_is_nim_heap_of_size_n", "max_n": 12},
               expected_verdict=False),
        _claim("POLY-1", "Authors, polygon family figure", "Exactly 7 polygons have 24 unit sides and 90/270 degree corners.",
               "polygon_count_is", {"n_sides": 24, "count": 7}),
        _claim("POLY-2", "Claude 3, polygons", "Every member has an even number of 90 degree corners.",
               "all_polygons_satisfy", {"n_sides": 24, "property": "even_convex_corners"}),
        _claim("POLY-3", "Claude 3 and Bing Copilot, polygons", "Every member tiles the plane.",
               "all_polygons_tile", {"n_sides": 24, "max_dim": 12}),
        _claim("POLY-4", "Claude 3, polygons", "Every member is symmetric.",
               "all_polygons_satisfy", {"n_sides": 24, "property": "symmetric"}, expected_verdict=False),
        _claim("POLY-5", "Claude 3, polygons", "A 90 degree corner is always followed by a 270 degree corner.",
               "all_polygons_satisfy", {"n_sides": 24, "property": "alternating"}, expected_verdict=False),
        _claim("POLY-6", "Claude 3, polygons", "Every member is convex.",
               "all_polygons_satisfy", {"n_sides": 24, "property": "convex"}, expected_verdict=False),
        _claim("POLY-7", "Claude 3, polygons", "Every member decomposes into unit squares (and so into triangles).",
               "all_polygons_satisfy", {"n_sides": 24, "property": "unit_square_decomposition"}),
        _claim("POLY-8", "Claude 3, polygons", "The family has exactly 2 members.",
               "polygon_count_is", {"n_sides": 24, "count": 2}, expected_verdict=False),
        _claim("POLY-9", "Authors, asymmetric member figure", "Some member has no symmetry.",
               "exists_polygon_satisfying", {"n_sides": 24, "property": "trivial_symmetry"}),
        _claim("POLY-10", "Authors, polyomino figure", "Every polyomino has an even number of right angles.",
               "claim_is_false_with_counterexample", {"assertion": "polyomino_even_right_angles"},
               expected_verdict=False),
        _claim("POLY-11", "ChatGPT-3.5-Turbo and Bing Copilot, polygons", "Members are regular polygons.",
               "all_polygons_satisfy", {"n_sides": 24, "property": "equiangular"}, expected_verdict=False),
        _claim("POLY-12", "Authors on ChatGPT-3.5-Turbo, polygons", "Some members are symmetric.",
               "exists_polygon_satisfying", {"n_sides": 24, "property": "symmetric"}),
    ]


_claims_list = TypeAdapter(list[Claim])


def load_claims(file_content):
    try:
        raw = json.loads(file_content)
    except json.JSONDecodeError as e:
        raise ClaimParseError(f"invalid JSON: {e.msg}", e.lineno, e.colno) from e
    if not isinstance(raw, list):
        raise ClaimParseError("claim file must hold a JSON array")
    try:
        claims = _claims_list.validate_python(raw)
    except ValidationError as e:
        raise ClaimParseError(f"claim does not match the schema: {e}") from e
    loaded = [normalized(claim) for claim in claims]
    logger.info(f"Loaded {len(loaded)} claims")
    return loaded


def dump_claims(claims):
    return json.dumps([claim.model_dump(mode="json") for claim in claims], indent=2) + "\n"


def report_to_json(report, timings=False):
    exclude = None if timings else {"timestamp": True, "results": {"__all__": {"runtime"}}}
    return json.dumps(report.model_dump(mode="json", exclude=exclude), indent=2, sort_keys=True) + "\n"


def _evidence_summary(result):
    if result.diagnostics:
        return result.diagnostics
    evidence = result.evidence
    for key in ("counterexample", "witness"):
        if key in evidence:
            value = evidence[key]
            if isinstance(value, dict) and "turns" in value:
                return f"{key}: {value['turns']}"
            return f"{key}: {json.dumps(value, sort_keys=True)}"
    if "count" in evidence:
        return f"count: {evidence['count']} (rotation classes: {evidence['rotation_count']})"
    if "n" in evidence:
        return f"n={evidence['n']}"
    if "checked" in evidence:
        return f"checked {len(evidence['checked'])} cases"
    if "certificates" in evidence:
        kinds = sorted({value["kind"] for value in evidence["certificates"].values()})
        return f"{len(evidence['certificates'])} certificates ({', '.join(kinds)})"
    if "checked_up_to" in evidence:
        return f"checked up to n={evidence['checked_up_to']}"
    return ""


def _verdict_text(verdict):
    return "unknown" if verdict is None else str(verdict).lower()


def render_markdown(report, timings=False):
    lines = [
        "# Claims report",
        "",
        f"Engine version: {report.engine_version}",
    ]
    if timings:
        lines.append(f"Generated: {report.timestamp}")
    lines += [
        "",
        f"Pass: {report.summary['pass']} | Fail: {report.summary['fail']} | Unknown: {report.summary['unknown']}",
        "",
        "| Claim | Source | Statement | Expected | Verdict | Status | Evidence |",
        "|---|---|---|---|---|---|---|",
    ]
    for result in report.results:
        cells = [
            result.claim_id,
            result.source,
            result.statement,
            _verdict_text(result.expected_verdict),
            _verdict_text(result.verdict),
            result.status.upper(),
            _evidence_summary(result),
        ]
        lines.append("| " + " | ".join(cell.replace("|", "\\|") for cell in cells) + " |")
    return "\n".join(lines) + "\n"
