import logging
from enum import Enum
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from . import polygon_service
from .errors import InvalidParameterError

# Configure module logger
logger = logging.getLogger(__name__)

DEFAULT_MAX_DIM = 12
_HAT = {"E": "W", "W": "E", "N": "S", "S": "N"}


class OrientationMode(str, Enum):
    TRANSLATIONS_ONLY = "translations_only"
    ALL_8 = "all_8"


class BNFactorization(BaseModel):
    """Boundary factorization A.B.C.hat(A).hat(B).hat(C) of a rotated step word.

    `factors` holds the (start, end) index ranges of A, B and C inside the
    rotated word; `words` the letters of A, B and C.
    """
    model_config = ConfigDict(frozen=True)

    rotation_offset: int = Field(ge=0)
    factors: tuple[tuple[int, int], tuple[int, int], tuple[int, int]]
    words: tuple[str, str, str]
    u: tuple[int, int]
    v: tuple[int, int]


class Placement(BaseModel):
    model_config = ConfigDict(frozen=True)

    orientation: int = Field(ge=0, le=7)
    anchor: tuple[int, int]


class TorusTiling(BaseModel):
    """Cover of the torus Z^2 / <(width, 0), (shear, height)>.

    Anchors and covered cells live in the fundamental domain
    [0, width) x [0, height); shear 0 is the plain width x height torus.
    """
    model_config = ConfigDict(frozen=True)

    width: int = Field(ge=1)
    height: int = Field(ge=1)
    shear: int = Field(default=0, ge=0)
    placements: tuple[Placement, ...]
    tile: str

    @model_validator(mode="after")
    def _check_shear(self):
        if self.shear >= self.width:
            raise ValueError(f"shear {self.shear} must be below width {self.width}")
        return self

    @property
    def index(self):
        return self.width * self.height


class TranslationCertificate(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["translation"] = "translation"
    factorization: BNFactorization


class PeriodicCertificate(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["periodic"] = "periodic"
    tiling: TorusTiling


TilingCertificate = Annotated[Union[TranslationCertificate, PeriodicCertificate], Field(discriminator="kind")]


def hat(word):
    """Reverse the word and swap E<->W, N<->S"""
    return "".join(_HAT[step] for step in reversed(word))


def displacement(word):
    x = y = 0
    for step in word:
        dx, dy = polygon_service.DELTAS[step]
        x += dx
        y += dy
    return x, y


def _factorization(rotated, offset, a, b, c):
    words = (rotated[:a], rotated[a:a + b], rotated[a + b:a + b + c])
    ax, ay = displacement(words[0])
    bx, by = displacement(words[1])
    cx, cy = displacement(words[2])
    return BNFactorization(
        rotation_offset=offset,
        factors=((0, a), (a, a + b), (a + b, a + b + c)),
        words=words,
        u=(ax + bx, ay + by),
        v=(bx + cx, by + cy),
    )


def bn_factorize(boundary):
    """First boundary factorization in (rotation, |A|, |B|) scan order, or None.

    None rules out a tiling by translates only; tilings that rotate or reflect
    the tile are still possible.
    """
    n = len(boundary)
    if n == 0 or n % 2:
        return None
    half = n // 2
    for offset in range(n):
        rotated = boundary[offset:] + boundary[:offset]
        first, second = rotated[:half], rotated[half:]
        for a in range(1, half):
            for b in range(1, half - a + 1):
                c = half - a - b
                if (second[:a] == hat(first[:a])
                        and second[a:a + b] == hat(first[a:a + b])
                        and second[a + b:] == hat(first[a + b:])):
                    factorization = _factorization(rotated, offset, a, b, c)
                    logger.debug(f"Boundary {boundary} factors at offset {offset}: {factorization.words}")
                    return factorization
    return None


def verify_bn(boundary, cert):
    n = len(boundary)
    if n == 0 or n % 2 or not 0 <= cert.rotation_offset < n:
        return False
    ranges = cert.factors
    lengths = [end - start for start, end in ranges]
    if any(length < 0 for length in lengths) or sum(lengths) * 2 != n:
        return False
    if ranges[0][0] != 0 or ranges[0][1] != ranges[1][0] or ranges[1][1] != ranges[2][0]:
        return False
    if sum(1 for length in lengths if length == 0) > 1:
        return False
    if [len(word) for word in cert.words] != lengths:
        return False
    rotated = boundary[cert.rotation_offset:] + boundary[:cert.rotation_offset]
    a, b, c = cert.words
    if rotated != a + b + c + hat(a) + hat(b) + hat(c):
        return False
    ax, ay = displacement(a)
    bx, by = displacement(b)
    cx, cy = displacement(c)
    return cert.u == (ax + bx, ay + by) and cert.v == (bx + cx, by + cy)


def _oriented_tiles(polygon, mode):
    """Distinct oriented cell sets, keyed by the lowest orientation producing each"""
    cells = polygon_service.rasterize(polygon)
    orientations = range(8) if OrientationMode(mode) is OrientationMode.ALL_8 else range(1)
    shapes = {}
    for orientation in orientations:
        shape = polygon_service.orient_cells(cells, orientation)
        if shape not in shapes.values():
            shapes[orientation] = shape
    return [(orientation, sorted(shape)) for orientation, shape in shapes.items()]


def torus_cell(x, y, width, height, shear=0):
    """Representative of (x, y) in the fundamental domain of the torus"""
    q = y // height
    return (x - q * shear) % width, y - q * height


def placement_cells(shape, anchor, width, height, shear=0):
    """Torus cells covered by a shape moved to `anchor`; None if it overlaps itself"""
    ax, ay = anchor
    cells = {torus_cell(x + ax, y + ay, width, height, shear) for x, y in shape}
    if len(cells) != len(shape):
        return None
    return cells


def _candidate_tori(tile_area, max_dim):
    """(width, shear, height) of every lattice whose index is a multiple of the
    tile area and at most max_dim^2, each lattice once in Hermite normal form.

    Ordered by index, then height, then shear.
    """
    tori = []
    for index in range(tile_area, max_dim * max_dim + 1, tile_area):
        for height in range(1, index + 1):
            if index % height:
                continue
            width = index // height
            tori.extend((width, shear, height) for shear in range(width))
    return tori


def _extended_gcd(a, b):
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, x, y = _extended_gcd(b, a % b)
    return g, y, x - (a // b) * y


def lattice_torus(u, v):
    """(width, shear, height) of the lattice spanned by u and v"""
    (ux, uy), (vx, vy) = u, v
    det = abs(ux * vy - uy * vx)
    if det == 0:
        raise InvalidParameterError(f"vectors {u} and {v} are linearly dependent")
    height, a, b = _extended_gcd(uy, vy)
    width = det // height
    return width, (a * ux + b * vx) % width, height


def translation_torus(polygon, factorization):
    """Single-copy torus cover read off a boundary factorization"""
    width, shear, height = lattice_torus(factorization.u, factorization.v)
    return TorusTiling(width=width, height=height, shear=shear,
                       placements=(Placement(orientation=0, anchor=(0, 0)),), tile=polygon.turns)


def _exact_cover(width, height, shear, shapes):
    uncovered = {(x, y) for x in range(width) for y in range(height)}
    placements = []

    def search():
        if not uncovered:
            return True
        tx, ty = min(uncovered)
        for orientation, shape in shapes:
            for sx, sy in shape:
                anchor = torus_cell(tx - sx, ty - sy, width, height, shear)
                cells = placement_cells(shape, anchor, width, height, shear)
                if cells is None or not cells <= uncovered:
                    continue
                uncovered.difference_update(cells)
                placements.append(Placement(orientation=orientation, anchor=anchor))
                if search():
                    return True
                placements.pop()
                uncovered.update(cells)
        return False

    if search():
        return tuple(placements)
    return None


def torus_search(polygon, max_dim=DEFAULT_MAX_DIM, orientations=OrientationMode.ALL_8):
    """Exact cover of a small, possibly sheared torus by copies of the polygon.

    Every lattice of index at most max_dim^2 (the cell count of a max_dim x
    max_dim torus) is tried by increasing index, then height, then shear; the
    first cover found is returned. A cover proves a periodic tiling of the plane.
    """
    if max_dim < 1:
        raise InvalidParameterError(f"max_dim must be at least 1, got {max_dim}")
    tile_area = polygon_service.area(polygon)
    shapes = _oriented_tiles(polygon, orientations)
    for width, shear, height in _candidate_tori(tile_area, max_dim):
        placements = _exact_cover(width, height, shear, shapes)
        if placements is not None:
            logger.info(f"Polygon {polygon.turns} covers a {width}x{height} torus with shear {shear} "
                        f"using {len(placements)} placements")
            return TorusTiling(width=width, height=height, shear=shear, placements=placements,
                               tile=polygon.turns)
    logger.info(f"No torus of index up to {max_dim * max_dim} is covered by {polygon.turns}")
    return None


def verify_torus(polygon, cert):
    if cert.tile != polygon.turns:
        return False
    cells = polygon_service.rasterize(polygon)
    if len(cert.placements) * len(cells) != cert.index:
        return False
    covered = set()
    for placement in cert.placements:
        shape = polygon_service.orient_cells(cells, placement.orientation)
        placed = placement_cells(shape, placement.anchor, cert.width, cert.height, cert.shear)
        if placed is None or placed & covered:
            return False
        covered |= placed
    return len(covered) == cert.index


def verify_certificate(polygon, cert):
    if cert.kind == "translation":
        return verify_bn(polygon.steps, cert.factorization)
    return verify_torus(polygon, cert.tiling)


def certificate_uses_reflections(cert):
    if cert.kind == "translation":
        return False
    return any(placement.orientation >= 4 for placement in cert.tiling.placements)


def tile_any(polygon, max_dim=DEFAULT_MAX_DIM):
    """Translation certificate if one exists, else a torus cover, else None (unknown)"""
    factorization = bn_factorize(polygon.steps)
    if factorization is not None:
        return TranslationCertificate(factorization=factorization)
    tiling = torus_search(polygon, max_dim, OrientationMode.ALL_8)
    if tiling is not None:
        return PeriodicCertificate(tiling=tiling)
    logger.warning(f"Tiling status of {polygon.turns} is unknown within max_dim={max_dim}")
    return None


def find_certificate(polygon, method="auto", max_dim=DEFAULT_MAX_DIM):
    if method == "bn":
        factorization = bn_factorize(polygon.steps)
        return TranslationCertificate(factorization=factorization) if factorization else None
    if method == "torus":
        tiling = torus_search(polygon, max_dim, OrientationMode.ALL_8)
        return PeriodicCertificate(tiling=tiling) if tiling else None
    return tile_any(polygon, max_dim)


def certificate_to_json(cert: Optional[BaseModel]):
    return cert.model_dump(mode="json") if cert is not None else {"kind": "unknown"}
