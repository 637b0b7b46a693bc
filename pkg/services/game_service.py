import logging
import threading
from enum import Enum
from typing import Optional, Protocol

from pydantic import BaseModel, ConfigDict, Field, field_serializer, model_validator

from .errors import IllegalMoveError, InvalidParameterError

# Configure module logger
logger = logging.getLogger(__name__)


class Winner(str, Enum):
    A = "A"
    B = "B"


class GrundyMethod(str, Enum):
    BRUTE_FORCE = "brute_force"
    SEGMENT_XOR = "segment_xor"


class StrategyPlayer(str, Enum):
    FIRST = "first"
    SECOND = "second"


class BoardPosition(BaseModel):
    """A line of `length` spaces with counters on the `occupied` cells (1-based)"""
    model_config = ConfigDict(frozen=True)

    length: int = Field(ge=0)
    occupied: frozenset[int] = frozenset()

    @model_validator(mode="after")
    def _check_counters(self):
        for cell in self.occupied:
            if not 1 <= cell <= self.length:
                raise ValueError(f"counter at {cell} is outside [1, {self.length}]")
            if cell + 1 in self.occupied:
                raise ValueError(f"counters at {cell} and {cell + 1} are adjacent")
        return self

    @field_serializer("occupied")
    def _sorted_occupied(self, occupied):
        return sorted(occupied)

    @classmethod
    def empty(cls, length):
        return cls(length=length)

    @classmethod
    def from_mask(cls, length, mask):
        return cls(length=length, occupied=frozenset(_cells_of_mask(mask)))

    @property
    def mask(self):
        # cell i <-> bit i-1
        mask = 0
        for cell in self.occupied:
            mask |= 1 << (cell - 1)
        return mask


class SegmentPosition(BaseModel):
    model_config = ConfigDict(frozen=True)

    effective_lengths: tuple[int, ...]

    @model_validator(mode="after")
    def _check_lengths(self):
        if any(length < 0 for length in self.effective_lengths):
            raise ValueError("effective lengths must be non-negative")
        return self


class PeriodCertificate(BaseModel):
    model_config = ConfigDict(frozen=True)

    preperiod: int = Field(ge=0)
    period: int = Field(ge=1)
    verified_window: tuple[int, int]


def _cells_of_mask(mask):
    cell = 1
    while mask:
        if mask & 1:
            yield cell
        mask >>= 1
        cell += 1


def _legal_cells(length, mask):
    cells = []
    for cell in range(1, length + 1):
        bit = 1 << (cell - 1)
        if mask & (bit | (bit << 1) | (bit >> 1)) == 0:
            cells.append(cell)
    return cells


def _mex(values):
    value = 0
    while value in values:
        value += 1
    return value


class GrundyTable:
    """Memoized Grundy values g[k] of a free row of k cells.

    g[k] = mex over i=1..k of g[max(i-2, 0)] XOR g[max(k-i-1, 0)]. The table
    grows on demand under a lock; readers of already-built entries never block.
    """

    def __init__(self):
        self._values = [0]
        self._lock = threading.Lock()

    @property
    def values(self):
        return tuple(self._values)

    def __len__(self):
        return len(self._values)

    def __getitem__(self, n):
        if n >= len(self._values):
            self.extend_to(n)
        return self._values[n]

    def extend_to(self, n):
        with self._lock:
            values = self._values
            start = len(values)
            for k in range(start, n + 1):
                reachable = set()
                # moves i and k+1-i give the same option
                for i in range(1, (k + 1) // 2 + 1):
                    reachable.add(values[max(i - 2, 0)] ^ values[max(k - i - 1, 0)])
                values.append(_mex(reachable))
            if n >= start:
                logger.debug(f"Grundy table extended from {start} to {n}")


class BruteForceSolver:
    """Game-tree Grundy values keyed on (length, occupied bitmask)"""

    def __init__(self):
        self._memo = {}

    def __len__(self):
        return len(self._memo)

    def grundy(self, length, mask):
        key = (length, mask)
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        reachable = {
            self.grundy(length, mask | (1 << (cell - 1)))
            for cell in _legal_cells(length, mask)
        }
        value = _mex(reachable)
        self._memo[key] = value
        return value


_default_table = GrundyTable()


def legal_moves(board):
    return _legal_cells(board.length, board.mask)


def apply_move(board, cell):
    if not 1 <= cell <= board.length:
        raise IllegalMoveError(cell, f"outside [1, {board.length}]")
    if cell in board.occupied:
        raise IllegalMoveError(cell, "cell already holds a counter")
    if cell - 1 in board.occupied or cell + 1 in board.occupied:
        raise IllegalMoveError(cell, "cell is next to a counter")
    return BoardPosition(length=board.length, occupied=board.occupied | {cell})


def segments_of(board):
    """Split the empty cells into independent free rows.

    Each maximal empty run loses one cell for every end that touches a
    counter; the ends of the board are free.
    """
    lengths = []
    occupied = board.occupied
    cell = 1
    while cell <= board.length:
        if cell in occupied:
            cell += 1
            continue
        start = cell
        while cell <= board.length and cell not in occupied:
            cell += 1
        end = cell - 1
        flanks = (start > 1) + (end < board.length)
        lengths.append(max(end - start + 1 - flanks, 0))
    return SegmentPosition(effective_lengths=tuple(sorted(lengths)))


def grundy_free_row(n, table=None):
    if n < 0:
        raise InvalidParameterError(f"row length must be non-negative, got {n}")
    table = table if table is not None else _default_table
    return table[n]


def grundy_board(board, method=GrundyMethod.SEGMENT_XOR, table=None, solver=None):
    method = GrundyMethod(method)
    if method is GrundyMethod.BRUTE_FORCE:
        solver = solver if solver is not None else BruteForceSolver()
        return solver.grundy(board.length, board.mask)
    value = 0
    for length in segments_of(board).effective_lengths:
        value ^= grundy_free_row(length, table)
    return value


def winner(n, table=None):
    return Winner.A if grundy_free_row(n, table) != 0 else Winner.B


def optimal_move(board, table=None):
    """Lowest cell that moves to a zero position, or None when every move loses"""
    if grundy_board(board, table=table) == 0:
        return None
    for cell in legal_moves(board):
        if grundy_board(apply_move(board, cell), table=table) == 0:
            return cell
    return None


def nim_heap_equivalent(n, table=None):
    """Size of the Nim heap the row-n game is equivalent to"""
    return grundy_free_row(n, table)


def compound_with_nim_is_second_player_win(n, heap):
    """Brute-force solve of (free row of n) + (Nim heap of `heap`)"""
    if n < 0 or heap < 0:
        raise InvalidParameterError(f"row length and heap must be non-negative, got {n}, {heap}")
    memo = {}

    def mover_loses(mask, size):
        key = (mask, size)
        if key in memo:
            return memo[key]
        result = True
        for cell in _legal_cells(n, mask):
            if mover_loses(mask | (1 << (cell - 1)), size):
                result = False
                break
        if result:
            for smaller in range(size):
                if mover_loses(mask, smaller):
                    result = False
                    break
        memo[key] = result
        return result

    return mover_loses(0, heap)


class Strategy(Protocol):
    """Picks the strategy player's cell given the board and the opponent's last move"""

    def choose(self, board: BoardPosition, last_opponent_move: Optional[int]) -> int:
        ...


class MirrorStrategy:
    """Center first, then answer cell i with cell n+1-i"""

    def __init__(self, n):
        if n < 1 or n % 2 == 0:
            raise InvalidParameterError(f"mirror strategy needs an odd row length >= 1, got {n}")
        self.n = n
        self.center = (n + 1) // 2

    def choose(self, board, last_opponent_move):
        if last_opponent_move is None:
            return self.center
        return self.n + 1 - last_opponent_move


class LowestCellStrategy:
    def choose(self, board, last_opponent_move):
        moves = legal_moves(board)
        if not moves:
            raise IllegalMoveError(None, "no legal move left")
        return moves[0]


class OptimalStrategy:
    """Moves to a zero position when one exists, otherwise takes the lowest cell"""

    def __init__(self, table=None):
        self.table = table

    def choose(self, board, last_opponent_move):
        cell = optimal_move(board, self.table)
        if cell is not None:
            return cell
        return LowestCellStrategy().choose(board, last_opponent_move)


def mirror_strategy(n):
    return MirrorStrategy(n)


def lowest_cell_strategy():
    return LowestCellStrategy()


def optimal_strategy(table=None):
    return OptimalStrategy(table)


def verify_strategy(strategy, n, strategy_player=StrategyPlayer.FIRST):
    """True iff `strategy` makes the last placement against every opponent line.

    Opponent moves are branched exhaustively; results are memoized on the
    occupied bitmask together with the opponent's last move, since a strategy
    may depend on it.
    """
    if n < 0:
        raise InvalidParameterError(f"row length must be non-negative, got {n}")
    strategy_player = StrategyPlayer(strategy_player)
    memo = {}

    def strategy_to_move(mask, last_opponent_move):
        key = (mask, last_opponent_move)
        if key in memo:
            return memo[key]
        if not _legal_cells(n, mask):
            result = False
        else:
            board = BoardPosition.from_mask(n, mask)
            cell = strategy.choose(board, last_opponent_move)
            after = apply_move(board, cell)
            result = opponent_to_move(after.mask)
        memo[key] = result
        return result

    def opponent_to_move(mask):
        replies = _legal_cells(n, mask)
        if not replies:
            return True
        return all(strategy_to_move(mask | (1 << (cell - 1)), cell) for cell in replies)

    if strategy_player is StrategyPlayer.FIRST:
        result = strategy_to_move(0, None)
    else:
        result = opponent_to_move(0)
    logger.info(f"Strategy {type(strategy).__name__} as {strategy_player.value} player on n={n}: "
                f"{'wins' if result else 'loses'} ({len(memo)} positions)")
    return result


def play_out(first, second, n):
    """Play two strategies against each other; returns the cells in move order"""
    board = BoardPosition.empty(n)
    players = (first, second)
    moves = []
    last = None
    while legal_moves(board):
        cell = players[len(moves) % 2].choose(board, last)
        board = apply_move(board, cell)
        moves.append(cell)
        last = cell
    return moves


def grundy_sequence(max_n, table=None):
    if max_n < 0:
        raise InvalidParameterError(f"max_n must be non-negative, got {max_n}")
    table = table if table is not None else _default_table
    table.extend_to(max_n)
    return list(table.values[:max_n + 1])


def detect_period(sequence):
    """Smallest (preperiod, period) whose periodicity is confirmed on the prefix.

    A pair qualifies when g[k + p] = g[k] for every k >= q in the prefix and the
    prefix reaches past the sufficiency window [q, 2q + p + 2].
    """
    length = len(sequence)
    for preperiod in range(length):
        if 2 * preperiod + 2 + 2 > length - 1:
            break
        for period in range(1, length):
            window_end = 2 * preperiod + period + 2
            if window_end + period > length - 1:
                break
            if all(sequence[k + period] == sequence[k] for k in range(preperiod, length - period)):
                logger.info(f"Grundy sequence of length {length} periodic: "
                            f"preperiod={preperiod} period={period}")
                return PeriodCertificate(
                    preperiod=preperiod,
                    period=period,
                    verified_window=(preperiod, window_end),
                )
    logger.info(f"No period certified within a prefix of length {length}")
    return None
