import logging

from pydantic import BaseModel, ConfigDict, Field, field_validator

from . import polygon_service, tiling_service
from .errors import InvalidCertificateError

# Configure module logger
logger = logging.getLogger(__name__)

DEFAULT_PALETTE = (
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2",
    "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
)
STROKE = "#222222"


class Canvas(BaseModel):
    model_config = ConfigDict(frozen=True)

    unit: int = Field(default=32, gt=0)
    margin: int = Field(default=1, ge=0)
    palette: tuple[str, ...] = DEFAULT_PALETTE

    @field_validator("palette")
    @classmethod
    def _non_empty(cls, palette):
        if not palette:
            raise ValueError("palette must hold at least one colour")
        return palette


def _document(width, height, body):
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n'
        + "".join(f"  {element}\n" for element in body)
        + "</svg>\n"
    )


class _Frame:
    """Maps lattice points to pixels; y grows upwards on the lattice, downwards in SVG"""

    def __init__(self, points, canvas):
        self.canvas = canvas
        self.min_x = min(x for x, _ in points)
        self.max_y = max(y for _, y in points)
        max_x = max(x for x, _ in points)
        min_y = min(y for _, y in points)
        self.width = (max_x - self.min_x + 2 * canvas.margin) * canvas.unit
        self.height = (self.max_y - min_y + 2 * canvas.margin) * canvas.unit

    def pixel(self, x, y):
        unit, margin = self.canvas.unit, self.canvas.margin
        return (x - self.min_x + margin) * unit, (self.max_y - y + margin) * unit

    def path(self, vertices):
        points = [self.pixel(x, y) for x, y in vertices]
        head, *rest = points
        return f"M {head[0]} {head[1]} " + " ".join(f"L {x} {y}" for x, y in rest) + " Z"


def polygon_figure(polygon, canvas=None):
    canvas = canvas or Canvas()
    frame = _Frame(polygon.vertices, canvas)
    body = [f'<path class="polygon" d="{frame.path(polygon.vertices)}" '
            f'fill="{canvas.palette[0]}" stroke="{STROKE}" stroke-width="2"/>']
    return _document(frame.width, frame.height, body)


def _oriented_vertices(polygon, orientation):
    # same normalisation as polygon_service.orient_cells
    moved = [polygon_service.apply_isometry(orientation, x, y) for x, y in polygon.vertices]
    min_x = min(x for x, _ in moved)
    min_y = min(y for _, y in moved)
    return [(x - min_x, y - min_y) for x, y in moved]


def _shift(points, dx, dy):
    return [(x + dx, y + dy) for x, y in points]


def _reduced_basis(tiling):
    """Short basis of the torus lattice, so a patch of copies stays compact"""
    b1, b2 = (tiling.width, 0), (tiling.shear, tiling.height)

    def norm(vector):
        return vector[0] * vector[0] + vector[1] * vector[1]

    if norm(b2) < norm(b1):
        b1, b2 = b2, b1
    while True:
        mu = round((b1[0] * b2[0] + b1[1] * b2[1]) / norm(b1))
        b2 = (b2[0] - mu * b1[0], b2[1] - mu * b1[1])
        if norm(b2) >= norm(b1):
            return b1, b2
        b1, b2 = b2, b1


def _patch_copies(cert, polygon, repeats):
    """(outline, cells) of every tile drawn in a repeats x repeats patch"""
    copies = []
    if cert.kind == "translation":
        cells = sorted(polygon_service.rasterize(polygon))
        (ux, uy), (vx, vy) = cert.factorization.u, cert.factorization.v
        for i in range(repeats):
            for j in range(repeats):
                dx, dy = i * ux + j * vx, i * uy + j * vy
                copies.append((_shift(polygon.vertices, dx, dy), _shift(cells, dx, dy)))
        return copies
    tiling = cert.tiling
    cells = polygon_service.rasterize(polygon)
    (px, py), (qx, qy) = _reduced_basis(tiling)
    for ti in range(repeats):
        for tj in range(repeats):
            for placement in tiling.placements:
                shape = sorted(polygon_service.orient_cells(cells, placement.orientation))
                outline = _oriented_vertices(polygon, placement.orientation)
                dx = placement.anchor[0] + ti * px + tj * qx
                dy = placement.anchor[1] + ti * py + tj * qy
                copies.append((_shift(outline, dx, dy), _shift(shape, dx, dy)))
    return copies


def _colour_copies(copies, palette_size):
    """Greedy colouring so that edge-adjacent copies differ where the palette allows"""
    owner = {}
    for index, (_, cells) in enumerate(copies):
        for cell in cells:
            owner[cell] = index
    colours = []
    for index, (_, cells) in enumerate(copies):
        taken = set()
        for x, y in cells:
            for neighbour in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
                other = owner.get(neighbour)
                if other is not None and other < index:
                    taken.add(colours[other])
        free = [colour for colour in range(palette_size) if colour not in taken]
        colours.append(free[0] if free else index % palette_size)
    return colours


def tiling_figure(cert, polygon, repeats=3, canvas=None):
    canvas = canvas or Canvas()
    if not tiling_service.verify_certificate(polygon, cert):
        raise InvalidCertificateError(f"certificate for {polygon.turns} does not verify")
    copies = _patch_copies(cert, polygon, repeats)
    colours = _colour_copies(copies, len(canvas.palette))
    frame = _Frame([point for outline, _ in copies for point in outline], canvas)
    body = [
        f'<path class="tile" d="{frame.path(outline)}" fill="{canvas.palette[colour]}" '
        f'stroke="{STROKE}" stroke-width="1"/>'
        for (outline, _), colour in zip(copies, colours)
    ]
    logger.debug(f"Tiling figure for {polygon.turns}: {len(copies)} tiles")
    return _document(frame.width, frame.height, body)


def board_figure(board, canvas=None):
    canvas = canvas or Canvas()
    unit, margin = canvas.unit, canvas.margin
    width = (board.length + 2 * margin) * unit
    height = (1 + 2 * margin) * unit
    body = []
    for cell in range(1, board.length + 1):
        x = (cell - 1 + margin) * unit
        body.append(f'<rect class="cell" x="{x}" y="{margin * unit}" width="{unit}" height="{unit}" '
                    f'fill="#ffffff" stroke="{STROKE}"/>')
    for cell in sorted(board.occupied):
        cx = (cell - 1 + margin) * unit + unit // 2
        cy = margin * unit + unit // 2
        body.append(f'<circle class="counter" cx="{cx}" cy="{cy}" r="{unit * 3 // 8}" '
                    f'fill="{canvas.palette[0]}"/>')
    return _document(width, height, body)
