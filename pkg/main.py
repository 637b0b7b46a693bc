import asyncio
import logging
import os
import sys

import click
from dotenv import load_dotenv
from pydantic import ValidationError

from services import claims_service, game_service, polygon_service, render_service, tiling_service
from services.artifact_service import ArtifactService
from services.claims_orchestrator import ClaimsOrchestrator
from services.errors import ClaimParseError, ClaimsCheckerError

load_dotenv()

logger = logging.getLogger(__name__)


def configure_logging(verbose=False, log_file=None):
    handlers = [logging.StreamHandler(sys.stderr)]
    if log_file:
        os.makedirs(os.path.dirname(os.path.abspath(log_file)), exist_ok=True)
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )


def _styled(text, colour):
    if os.getenv('NO_COLOR'):
        return text
    return click.style(text, fg=colour)


def _usage_error(error):
    logger.warning(f"Rejected input: {error}")
    return click.UsageError(str(error))


def _validated(turns):
    try:
        return polygon_service.validate(turns)
    except (ClaimsCheckerError, ValidationError) as e:
        raise _usage_error(e)


@click.group()
@click.option('--verbose', is_flag=True, help='Log at DEBUG level on stderr.')
@click.option('--log-file', type=click.Path(dir_okay=False), help='Also write the log to this file.')
@click.option('--threads', type=click.IntRange(min=1), default=1, show_default=True,
              help='Worker threads for independent checks.')
@click.option('--unit', type=click.IntRange(min=1), default=32, show_default=True,
              help='Pixels per lattice unit in SVG figures.')
@click.pass_context
def cli(ctx, verbose, log_file, threads, unit):
    """Mechanical checks of the counter-placement game and the 90/270 degree polygon family."""
    configure_logging(verbose, log_file)
    ctx.ensure_object(dict)
    ctx.obj['threads'] = threads
    ctx.obj['canvas'] = render_service.Canvas(unit=unit)
    ctx.obj['artifacts'] = ArtifactService(os.path.dirname(os.path.abspath(log_file)) if log_file else None)


@cli.group()
def game():
    """Counter-placement game on a line of n spaces."""


@game.command('winner')
@click.option('--spaces', type=click.IntRange(min=0), required=True)
def game_winner(spaces):
    result = game_service.winner(spaces)
    click.echo(f"{result.value} (grundy={game_service.grundy_free_row(spaces)})")


@game.command('grundy')
@click.option('--max', 'max_n', type=click.IntRange(min=0), required=True)
@click.option('--detect-period', is_flag=True)
@click.option('--json', 'json_path', type=click.Path(dir_okay=False))
@click.pass_context
def game_grundy(ctx, max_n, detect_period, json_path):
    values = game_service.grundy_sequence(max_n)
    click.echo(" ".join(str(value) for value in values))
    if detect_period:
        cert = game_service.detect_period(values)
        if cert is None:
            click.echo("period: none found")
        else:
            start, end = cert.verified_window
            click.echo(f"period: preperiod={cert.preperiod} period={cert.period} window=[{start}, {end}]")
    if json_path:
        asyncio.run(ctx.obj['artifacts'].save_json(json_path, values))


@game.command('verify-mirror')
@click.option('--max-odd', type=click.IntRange(min=1), required=True)
@click.pass_context
def game_verify_mirror(ctx, max_odd):
    failures = []
    for n in range(1, max_odd + 1, 2):
        ok = game_service.verify_strategy(game_service.mirror_strategy(n), n, game_service.StrategyPlayer.FIRST)
        click.echo(f"n={n}: {_styled('pass', 'green') if ok else _styled('FAIL', 'red')}")
        if not ok:
            failures.append(n)
    if failures:
        click.echo(f"mirror strategy failed for n in {failures}")
        ctx.exit(1)
    click.echo("all pass")


@game.command('board')
@click.option('--spaces', type=click.IntRange(min=0), required=True)
@click.option('--occupied', default='', help='Comma-separated cells holding counters.')
@click.option('--svg', 'svg_path', type=click.Path(dir_okay=False))
@click.pass_context
def game_board(ctx, spaces, occupied, svg_path):
    try:
        cells = frozenset(int(cell) for cell in occupied.split(',') if cell.strip())
        board = game_service.BoardPosition(length=spaces, occupied=cells)
    except (ValueError, ValidationError) as e:
        raise _usage_error(e)
    move = game_service.optimal_move(board)
    click.echo(f"legal moves: {' '.join(map(str, game_service.legal_moves(board))) or '-'}")
    click.echo(f"segments: {' '.join(map(str, game_service.segments_of(board).effective_lengths)) or '-'}")
    click.echo(f"grundy: {game_service.grundy_board(board)}")
    click.echo(f"optimal move: {move if move is not None else 'none'}")
    if svg_path:
        figure = render_service.board_figure(board, ctx.obj['canvas'])
        asyncio.run(ctx.obj['artifacts'].save_text(svg_path, figure))


_STRATEGIES = {
    'mirror': game_service.mirror_strategy,
    'optimal': lambda n: game_service.optimal_strategy(),
    'lowest': lambda n: game_service.lowest_cell_strategy(),
}


@game.command('play')
@click.option('--spaces', type=click.IntRange(min=0), required=True)
@click.option('--first', type=click.Choice(sorted(_STRATEGIES)), default='mirror', show_default=True)
@click.option('--second', type=click.Choice(sorted(_STRATEGIES)), default='optimal', show_default=True)
@click.option('--svg', 'svg_path', type=click.Path(dir_okay=False))
@click.pass_context
def game_play(ctx, spaces, first, second, svg_path):
    try:
        players = [_STRATEGIES[name](spaces) for name in (first, second)]
    except ClaimsCheckerError as e:
        raise _usage_error(e)
    moves = game_service.play_out(players[0], players[1], spaces)
    click.echo(f"moves: {' '.join(map(str, moves)) or '-'}")
    click.echo(f"last placement: {'A' if len(moves) % 2 else 'B'}")
    if svg_path:
        board = game_service.BoardPosition(length=spaces, occupied=frozenset(moves))
        figure = render_service.board_figure(board, ctx.obj['canvas'])
        asyncio.run(ctx.obj['artifacts'].save_text(svg_path, figure))


@cli.group()
def poly():
    """Equilateral polygons with 90 and 270 degree corners."""


@poly.command('enumerate')
@click.option('--sides', type=int, required=True)
@click.option('--json', 'json_path', type=click.Path(dir_okay=False))
@click.option('--svg', 'svg_dir', type=click.Path(file_okay=False))
@click.pass_context
def poly_enumerate(ctx, sides, json_path, svg_dir):
    try:
        polygons = polygon_service.enumerate_polygons(sides)
    except ClaimsCheckerError as e:
        raise _usage_error(e)
    click.echo(f"count: {len(polygons)}")
    for polygon in polygons:
        click.echo(polygon.turns)
    artifacts = ctx.obj['artifacts']
    if json_path:
        asyncio.run(artifacts.save_json(json_path, [polygon_service.polygon_to_json(p) for p in polygons]))
    if svg_dir:
        figures = {f"poly-{p.turns}.svg": render_service.polygon_figure(p, ctx.obj['canvas']) for p in polygons}
        asyncio.run(artifacts.save_figures(svg_dir, figures))


@poly.command('props')
@click.option('--turns', required=True)
def poly_props(turns):
    polygon = _validated(turns)
    convex, reflex = polygon_service.right_angle_count(polygon)
    group = polygon_service.symmetry_group(polygon)
    yes_no = {True: 'yes', False: 'no'}
    click.echo(f"turns: {polygon.turns}")
    click.echo(f"canonical: {polygon_service.canonical(polygon.turns).word}")
    click.echo("valid: yes")
    click.echo(f"corners: convex={convex} reflex={reflex}")
    click.echo(f"convex: {yes_no[polygon_service.is_convex(polygon)]}")
    click.echo(f"alternating: {yes_no[polygon_service.is_alternating(polygon)]}")
    click.echo(f"symmetry: {group.label} (order {group.order})")
    click.echo(f"area: {polygon_service.area(polygon)}")


@cli.command('tile')
@click.option('--turns', required=True)
@click.option('--method', type=click.Choice(['auto', 'bn', 'torus']), default='auto', show_default=True)
@click.option('--max-torus', type=click.IntRange(min=1), default=tiling_service.DEFAULT_MAX_DIM, show_default=True)
@click.option('--repeats', type=click.IntRange(min=1), default=3, show_default=True)
@click.option('--svg', 'svg_path', type=click.Path(dir_okay=False))
@click.option('--cert', 'cert_path', type=click.Path(dir_okay=False))
@click.pass_context
def tile(ctx, turns, method, max_torus, repeats, svg_path, cert_path):
    polygon = _validated(turns)
    cert = tiling_service.find_certificate(polygon, method, max_torus)
    artifacts = ctx.obj['artifacts']
    if cert_path:
        asyncio.run(artifacts.save_json(cert_path, tiling_service.certificate_to_json(cert)))
    if cert is None:
        click.echo("unknown")
        ctx.exit(1)
    if cert.kind == "translation":
        click.echo(f"translation u={cert.factorization.u} v={cert.factorization.v}")
    else:
        tiling = cert.tiling
        reflections = 'yes' if tiling_service.certificate_uses_reflections(cert) else 'no'
        click.echo(f"periodic {tiling.width}x{tiling.height} shear={tiling.shear} "
                   f"placements={len(tiling.placements)} reflections={reflections}")
    if svg_path:
        figure = render_service.tiling_figure(cert, polygon, repeats, ctx.obj['canvas'])
        asyncio.run(artifacts.save_text(svg_path, figure))


@cli.group()
def claims():
    """Published and model-made assertions as machine-checked claims."""


@claims.command('run')
@click.option('--claims', 'claims_path', type=click.Path(exists=True, dir_okay=False))
@click.option('--out', 'out_path', type=click.Path(dir_okay=False))
@click.option('--md', 'md_path', type=click.Path(dir_okay=False))
@click.option('--timings', is_flag=True, help='Include timestamp and runtimes in the reports.')
@click.option('--skip-builtin', is_flag=True, help='Run only the claims from --claims.')
@click.pass_context
def claims_run(ctx, claims_path, out_path, md_path, timings, skip_builtin):
    registry = [] if skip_builtin else claims_service.builtin_claims()
    if claims_path:
        try:
            with open(claims_path, encoding='utf-8') as f:
                content = f.read()
        except (OSError, UnicodeDecodeError) as e:
            raise _usage_error(ClaimParseError(f"cannot read claim file {claims_path}: {e}"))
        try:
            registry += claims_service.load_claims(content)
        except ClaimsCheckerError as e:
            raise _usage_error(e)
    artifacts = ctx.obj['artifacts']
    orchestrator = ClaimsOrchestrator(ctx.obj['threads'], data_logger=artifacts)
    try:
        report = asyncio.run(orchestrator.run(registry))
    except ClaimsCheckerError as e:
        raise _usage_error(e)
    colours = {'pass': 'green', 'fail': 'red', 'unknown': 'yellow'}
    for result in report.results:
        click.echo(f"{result.claim_id:<8} {_styled(result.status.upper(), colours[result.status])}")
    summary = report.summary
    click.echo(f"pass={summary['pass']} fail={summary['fail']} unknown={summary['unknown']}")
    if out_path:
        asyncio.run(artifacts.save_text(out_path, claims_service.report_to_json(report, timings)))
    if md_path:
        asyncio.run(artifacts.save_text(md_path, claims_service.render_markdown(report, timings)))
    if report.mismatches:
        ctx.exit(1)


if __name__ == "__main__":
    cli()
