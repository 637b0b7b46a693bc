import itertools
import logging
from typing import Annotated, Literal

from pydantic import BaseModel, ConfigDict, StringConstraints, TypeAdapter, model_validator

from .errors import DegenerateError, InvalidParameterError, NotClosedError, SelfIntersectionError

# Configure module logger
logger = logging.getLogger(__name__)

# Counterclockwise order; L turns +90 degrees, R turns -90 degrees.
DIRECTIONS = "ENWS"
DELTAS = {"E": (1, 0), "N": (0, 1), "W": (-1, 0), "S": (0, -1)}
OPPOSITE = {"E": "W", "W": "E", "N": "S", "S": "N"}

# Boundary of the P pentomino: five 90 degree corners and one 270 degree corner.
P_PENTOMINO_STEPS = "EENNWNWSSS"

TurnWord = Annotated[str, StringConstraints(pattern=r"^[LR]*$")]
StepWord = Annotated[str, StringConstraints(pattern=r"^[ENWS]*$")]

_turn_word = TypeAdapter(TurnWord)
_step_word = TypeAdapter(StepWord)

SymmetryLabel = Literal["trivial", "mirror-1", "rotation-2", "rotation-2+mirrors", "rotation-4", "full-8"]


class Polygon(BaseModel):
    """Simple equilateral rectilinear polygon stored counterclockwise.

    `turns[k]` is the corner at the end of edge `steps[k]`, i.e. at vertex k+1.
    """
    model_config = ConfigDict(frozen=True)

    turns: str
    steps: str
    vertices: tuple[tuple[int, int], ...]

    @model_validator(mode="after")
    def _check_boundary(self):
        n = len(self.vertices)
        if len(self.steps) != n or len(self.turns) != n:
            raise ValueError("turns, steps and vertices must have the same length")
        if len(set(self.vertices)) != n:
            raise ValueError("vertices must be pairwise distinct")
        for k, step in enumerate(self.steps):
            x, y = self.vertices[k]
            dx, dy = DELTAS[step]
            if self.vertices[(k + 1) % n] != (x + dx, y + dy):
                raise ValueError(f"edge {k} does not match step {step}")
        if _shoelace2(self.vertices) <= 0:
            raise ValueError("polygon must be stored counterclockwise")
        return self


class CanonicalForm(BaseModel):
    model_config = ConfigDict(frozen=True)

    word: str

    def __str__(self):
        return self.word


class SymmetryGroup(BaseModel):
    model_config = ConfigDict(frozen=True)

    label: SymmetryLabel
    isometries: tuple[int, ...]

    @property
    def order(self):
        return len(self.isometries)


def rotate_direction(direction, letter):
    index = DIRECTIONS.index(direction)
    return DIRECTIONS[(index + (1 if letter == "L" else -1)) % 4]


def steps_from_turns(turns, start_direction="E"):
    """Unit steps of a turn word; closure is not checked here"""
    if not turns:
        return ""
    steps = [start_direction]
    for letter in turns[:-1]:
        steps.append(rotate_direction(steps[-1], letter))
    return "".join(steps)


def turns_from_steps(steps):
    turns = []
    for k, step in enumerate(steps):
        following = steps[(k + 1) % len(steps)]
        if rotate_direction(step, "L") == following:
            turns.append("L")
        elif rotate_direction(step, "R") == following:
            turns.append("R")
        else:
            raise NotClosedError(f"steps {k} and {(k + 1) % len(steps)} are not perpendicular")
    return "".join(turns)


def step_vertices(steps):
    """Lattice points visited from the origin, including the endpoint"""
    x, y = 0, 0
    points = [(0, 0)]
    for step in steps:
        dx, dy = DELTAS[step]
        x, y = x + dx, y + dy
        points.append((x, y))
    return points


def reverse_complement(turns):
    """Turn word of the same boundary traversed the other way"""
    return "".join("R" if letter == "L" else "L" for letter in reversed(turns))


def mirror_word(turns):
    """Counterclockwise turn word of the mirror image"""
    return turns[::-1]


def _reverse_steps(steps):
    return "".join(OPPOSITE[step] for step in reversed(steps))


def _shoelace2(vertices):
    total = 0
    n = len(vertices)
    for k in range(n):
        x0, y0 = vertices[k]
        x1, y1 = vertices[(k + 1) % n]
        total += x0 * y1 - x1 * y0
    return total


def _check_simple(points):
    # Unit axis-aligned edges can only meet at lattice points, so distinct
    # vertices are enough for simplicity.
    seen = {}
    for index, point in enumerate(points):
        if point in seen:
            raise SelfIntersectionError(index, point)
        seen[point] = index


def _closed_points(steps):
    if len(steps) < 4:
        raise NotClosedError(f"a closed rectilinear walk needs at least 4 steps, got {len(steps)}")
    points = step_vertices(steps)
    if points[-1] != (0, 0):
        raise NotClosedError(f"walk ends at {points[-1]} instead of the origin")
    points.pop()
    _check_simple(points)
    area2 = _shoelace2(points)
    if area2 == 0:
        raise DegenerateError("walk encloses zero area")
    return points, area2


def validate(turns):
    turns = _turn_word.validate_python(turns)
    steps = steps_from_turns(turns, "E")
    if steps and rotate_direction(steps[-1], turns[-1]) != steps[0]:
        raise NotClosedError("last edge does not turn back into the first edge")
    points, area2 = _closed_points(steps)
    if area2 < 0:
        steps = _reverse_steps(steps)
        turns = turns_from_steps(steps)
        points = step_vertices(steps)[:-1]
    return Polygon(turns=turns, steps=steps, vertices=tuple(points))


def _rotations(word):
    return [word[k:] + word[:k] for k in range(len(word))] or [word]


def canonical(turns):
    """Least word over rotations of the boundary and of its mirror image"""
    if turns.count("L") < turns.count("R"):
        turns = reverse_complement(turns)
    return CanonicalForm(word=min(_rotations(turns) + _rotations(mirror_word(turns))))


def rotational_canonical(turns):
    """Least word over rotations only (mirror images stay distinct)"""
    if turns.count("L") < turns.count("R"):
        turns = reverse_complement(turns)
    return CanonicalForm(word=min(_rotations(turns)))


def _check_side_count(n_sides):
    if n_sides < 4 or n_sides % 2:
        raise InvalidParameterError(f"side count must be even and at least 4, got {n_sides}")


def closed_turn_words(n_sides):
    """Counterclockwise closed simple turn words whose first step is E.

    Depth-first over turn letters, pruning on vertex revisits, on the
    Manhattan distance home exceeding the steps left, and on the L/R budget.
    """
    _check_side_count(n_sides)
    max_left = (n_sides + 4) // 2
    max_right = (n_sides - 4) // 2
    origin = (0, 0)
    visited = {origin, (1, 0)}
    turns = []
    words = []

    def extend(x, y, direction, lefts, rights):
        taken = len(turns) + 1
        if taken == n_sides:
            if (x, y) != origin:
                return
            if rotate_direction(direction, "L") == "E" and lefts < max_left:
                words.append("".join(turns) + "L")
            elif rotate_direction(direction, "R") == "E" and rights < max_right:
                words.append("".join(turns) + "R")
            return
        remaining = n_sides - taken - 1
        for letter in "LR":
            if letter == "L" and lefts >= max_left:
                continue
            if letter == "R" and rights >= max_right:
                continue
            heading = rotate_direction(direction, letter)
            dx, dy = DELTAS[heading]
            nx, ny = x + dx, y + dy
            if abs(nx) + abs(ny) > remaining:
                continue
            closing = remaining == 0 and (nx, ny) == origin
            if (nx, ny) in visited and not closing:
                continue
            turns.append(letter)
            if not closing:
                visited.add((nx, ny))
            extend(nx, ny, heading, lefts + (letter == "L"), rights + (letter == "R"))
            if not closing:
                visited.discard((nx, ny))
            turns.pop()

    extend(1, 0, "E", 0, 0)
    return words


def enumerate_polygons(n_sides):
    """One polygon per congruence class, sorted by canonical word"""
    words = {canonical(word).word for word in closed_turn_words(n_sides)}
    polygons = [validate(word) for word in sorted(words)]
    logger.info(f"Enumerated {len(polygons)} polygons with {n_sides} sides")
    return polygons


def count_rotation_classes(n_sides):
    """Number of classes when mirror images are counted separately"""
    return len({rotational_canonical(word).word for word in closed_turn_words(n_sides)})


def enumerate_unpruned(n_sides):
    """Reference enumeration: validate every one of the 2^n turn words"""
    _check_side_count(n_sides)
    words = set()
    for letters in itertools.product("LR", repeat=n_sides):
        word = "".join(letters)
        try:
            polygon = validate(word)
        except (NotClosedError, SelfIntersectionError, DegenerateError):
            continue
        words.add(canonical(polygon.turns).word)
    return sorted(words)


def right_angle_count(polygon):
    convex = polygon.turns.count("L")
    return convex, len(polygon.turns) - convex


def general_right_angle_count(steps):
    """(90 degree, 270 degree) corner counts of a step word that may run straight"""
    steps = _step_word.validate_python(steps)
    _, area2 = _closed_points(steps)
    if area2 < 0:
        steps = _reverse_steps(steps)
    convex = reflex = 0
    for k, step in enumerate(steps):
        following = steps[(k + 1) % len(steps)]
        if following == step:
            continue
        if rotate_direction(step, "L") == following:
            convex += 1
        else:
            reflex += 1
    return convex, reflex


def is_convex(polygon):
    return right_angle_count(polygon)[1] == 0


def is_alternating(turns):
    if isinstance(turns, Polygon):
        turns = turns.turns
    return all(turns[k] != turns[(k + 1) % len(turns)] for k in range(len(turns)))


def is_equiangular(polygon):
    return len(set(polygon.turns)) == 1


def apply_isometry(orientation, x, y):
    """Orientations 0..3 rotate by 90*k degrees; 4..7 mirror in the x-axis first"""
    if orientation >= 4:
        y = -y
    for _ in range(orientation % 4):
        x, y = -y, x
    return x, y


def orient_cells(cells, orientation):
    """Image of unit cells (named by lower-left corner), shifted to start at (0, 0)"""
    moved = []
    for x, y in cells:
        cx, cy = apply_isometry(orientation, 2 * x + 1, 2 * y + 1)
        moved.append(((cx - 1) // 2, (cy - 1) // 2))
    min_x = min(x for x, _ in moved)
    min_y = min(y for _, y in moved)
    return frozenset((x - min_x, y - min_y) for x, y in moved)


def symmetry_group(polygon):
    cells = rasterize(polygon)
    base = orient_cells(cells, 0)
    fixing = tuple(index for index in range(8) if orient_cells(cells, index) == base)
    order = len(fixing)
    if order == 8:
        label = "full-8"
    elif order == 4:
        label = "rotation-4" if set(range(4)) <= set(fixing) else "rotation-2+mirrors"
    elif order == 2:
        label = "rotation-2" if 2 in fixing else "mirror-1"
    else:
        label = "trivial"
    return SymmetryGroup(label=label, isometries=fixing)


def area(polygon):
    return _shoelace2(polygon.vertices) // 2


def rasterize(polygon):
    """Unit cells inside the boundary by scanline parity over vertical edges"""
    rows = {}
    n = len(polygon.vertices)
    for k in range(n):
        x0, y0 = polygon.vertices[k]
        x1, y1 = polygon.vertices[(k + 1) % n]
        if x0 == x1:
            rows.setdefault(min(y0, y1), []).append(x0)
    cells = set()
    for row, xs in rows.items():
        xs.sort()
        for left, right in zip(xs[0::2], xs[1::2]):
            cells.update((x, row) for x in range(left, right))
    return frozenset(cells)


def triangle_count(polygon):
    # each unit square splits into two isosceles right triangles
    return 2 * len(rasterize(polygon))


def polygon_to_json(polygon):
    convex, reflex = right_angle_count(polygon)
    return {
        "turns": polygon.turns,
        "vertices": [[x, y] for x, y in polygon.vertices],
        "area": area(polygon),
        "convex_corners": convex,
        "reflex_corners": reflex,
        "symmetry": symmetry_group(polygon).label,
    }
