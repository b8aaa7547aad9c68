"""Game classes with finite contract menus.

Each couple's interaction is one of six game classes, all exposing the
same interface: a finite ordered menu of contracts, exact payoff
re-evaluation from strategy descriptors, unilateral improving
deviations, and a Nash test.  Continuous classes (payoff levels,
transfers, repeated play) are discretized on exact rational grids so
every downstream comparison stays exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import List, Mapping, Sequence, Tuple

from .exactlp import matrix_game_value
from .geometry import Point, convex_hull, hull_contains
from .rational import NEG_INF, POS_INF, RationalLike, fmt, is_neg_inf, rat


class GameError(ValueError):
    """Malformed game payload or a contract used with the wrong game."""


class Side(Enum):
    MAN = "man"
    WOMAN = "woman"

    def other(self) -> "Side":
        return Side.WOMAN if self is Side.MAN else Side.MAN


@dataclass(frozen=True)
class Contract:
    """A strategy pair together with its exact payoffs.

    ``strategy_a`` / ``strategy_b`` are descriptors whose meaning is
    class specific: pure action indices for matrix games, a payoff
    level or transfer for level games, a payoff point for repeated
    games.  ``hint`` is informational only and excluded from equality.
    """

    id: int
    strategy_a: object
    strategy_b: object
    u: Fraction
    v: Fraction
    hint: str = field(default="", compare=False)


def _matrix(rows: Sequence[Sequence[RationalLike]], name: str) -> List[List[Fraction]]:
    try:
        out = [[rat(x) for x in row] for row in rows]
    except (TypeError, ValueError) as exc:
        raise GameError(f"{name}: {exc}") from exc
    if not out or not out[0] or any(len(r) != len(out[0]) for r in out):
        raise GameError(f"{name} must be a nonempty rectangular matrix")
    return out


def _transpose(m: Sequence[Sequence[Fraction]]) -> List[List[Fraction]]:
    return [list(col) for col in zip(*m)]


def _grid(lo: Fraction, hi: Fraction, step: Fraction) -> List[Fraction]:
    """Ascending grid lo, lo+step, ... with hi appended exactly."""
    if step <= 0:
        raise GameError("grid step must be positive")
    if lo > hi:
        raise GameError("grid has empty range")
    levels = []
    k = 0
    while lo + k * step < hi:
        levels.append(lo + k * step)
        k += 1
    levels.append(hi)
    return levels


class PiecewiseLinear:
    """Strictly increasing piecewise-linear map with rational breakpoints.

    Evaluation and inversion are exact.  Outside the breakpoint range
    the first/last segment is extended with its own slope, keeping the
    map a bijection on the rationals.
    """

    def __init__(self, breakpoints: Sequence[Tuple[RationalLike, RationalLike]]):
        pts = [(rat(x), rat(y)) for x, y in breakpoints]
        if len(pts) < 2:
            raise GameError("piecewise-linear map needs at least two breakpoints")
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        if any(b <= a for a, b in zip(xs, xs[1:])) or any(
            b <= a for a, b in zip(ys, ys[1:])
        ):
            raise GameError("piecewise-linear map must be strictly increasing")
        self.points: Tuple[Tuple[Fraction, Fraction], ...] = tuple(pts)

    def _segment(self, x: Fraction, coord: int) -> Tuple[Tuple[Fraction, Fraction], Tuple[Fraction, Fraction]]:
        pts = self.points
        if x <= pts[0][coord]:
            return pts[0], pts[1]
        for a, b in zip(pts, pts[1:]):
            if x <= b[coord]:
                return a, b
        return pts[-2], pts[-1]

    def __call__(self, x: RationalLike) -> Fraction:
        x = rat(x)
        a, b = self._segment(x, 0)
        slope = (b[1] - a[1]) / (b[0] - a[0])
        return a[1] + (x - a[0]) * slope

    def inverse(self, y: RationalLike) -> Fraction:
        y = rat(y)
        a, b = self._segment(y, 1)
        slope = (b[0] - a[0]) / (b[1] - a[1])
        return a[0] + (y - a[1]) * slope


class Game:
    """Shared interface over all couple game classes."""

    kind = "abstract"

    _menu: Tuple[Contract, ...]

    def menu(self) -> Tuple[Contract, ...]:
        """The finite contract menu, ordered by id (deterministic)."""
        return self._menu

    def contract(self, contract_id: int) -> Contract:
        menu = self.menu()
        if not 0 <= contract_id < len(menu):
            raise GameError(f"no contract with id {contract_id} in this menu")
        return menu[contract_id]

    def validate_contract(self, contract: Contract) -> None:
        """Raise unless the contract belongs to this game."""
        menu = self.menu()
        if not (0 <= contract.id < len(menu) and menu[contract.id] == contract):
            raise GameError(f"foreign contract {contract!r} for {self.kind} game")

    def payoff(self, contract: Contract) -> Tuple[Fraction, Fraction]:
        """Re-derive (u, v) from the strategy descriptors.

        The re-derivation must agree with the stored payoffs; a mismatch
        means the contract was tampered with or belongs elsewhere.
        """
        self.validate_contract(contract)
        u, v = self._evaluate(contract.strategy_a, contract.strategy_b)
        if (u, v) != (contract.u, contract.v):
            raise GameError("contract payoffs disagree with re-evaluation")
        return (u, v)

    def _evaluate(self, a: object, b: object) -> Tuple[Fraction, Fraction]:
        raise NotImplementedError

    def improving_deviations(self, contract: Contract, side: Side) -> Tuple[Contract, ...]:
        """Menu contracts one side can reach unilaterally and strictly prefer."""
        raise NotImplementedError

    def is_nash_contract(self, contract: Contract) -> bool:
        return not self.improving_deviations(contract, Side.MAN) and not self.improving_deviations(
            contract, Side.WOMAN
        )


class BimatrixGame(Game):
    """Finite bimatrix game; the menu is all pure strategy cells."""

    kind = "bimatrix"

    def __init__(self, u_matrix: Sequence[Sequence[RationalLike]], v_matrix: Sequence[Sequence[RationalLike]]):
        self.U = _matrix(u_matrix, "U")
        self.V = _matrix(v_matrix, "V")
        if len(self.V) != len(self.U) or len(self.V[0]) != len(self.U[0]):
            raise GameError("U and V must share dimensions")
        self.rows = len(self.U)
        self.cols = len(self.U[0])
        menu = []
        for r in range(self.rows):
            for c in range(self.cols):
                menu.append(
                    Contract(
                        id=r * self.cols + c,
                        strategy_a=r,
                        strategy_b=c,
                        u=self.U[r][c],
                        v=self.V[r][c],
                        hint=f"cell({r},{c})",
                    )
                )
        self._menu = tuple(menu)

    def _evaluate(self, a, b):
        if not (isinstance(a, int) and isinstance(b, int) and 0 <= a < self.rows and 0 <= b < self.cols):
            raise GameError(f"invalid cell ({a},{b})")
        return (self.U[a][b], self.V[a][b])

    def improving_deviations(self, contract, side):
        self.validate_contract(contract)
        r, c = contract.strategy_a, contract.strategy_b
        menu = self.menu()
        if side is Side.MAN:
            return tuple(
                menu[r2 * self.cols + c] for r2 in range(self.rows) if self.U[r2][c] > contract.u
            )
        return tuple(menu[r * self.cols + c2] for c2 in range(self.cols) if self.V[r][c2] > contract.v)


def validate_potential(
    u_matrix: Sequence[Sequence[RationalLike]],
    v_matrix: Sequence[Sequence[RationalLike]],
    phi_matrix: Sequence[Sequence[RationalLike]],
) -> bool:
    """Ordinal potential check: unilateral payoff changes match potential signs.

    Row deviations (the row player moving within a column) must change U
    and the potential with the same sign, column deviations likewise for
    V.  Dimension mismatches are rejected.
    """

    def _sign(x: Fraction) -> int:
        return (x > 0) - (x < 0)

    U = _matrix(u_matrix, "U")
    V = _matrix(v_matrix, "V")
    phi = _matrix(phi_matrix, "phi")
    if not (len(U) == len(V) == len(phi)) or not (len(U[0]) == len(V[0]) == len(phi[0])):
        raise GameError("U, V, phi must share dimensions")
    rows, cols = len(U), len(U[0])
    for c in range(cols):
        for r1 in range(rows):
            for r2 in range(rows):
                if _sign(U[r2][c] - U[r1][c]) != _sign(phi[r2][c] - phi[r1][c]):
                    return False
    for r in range(rows):
        for c1 in range(cols):
            for c2 in range(cols):
                if _sign(V[r][c2] - V[r][c1]) != _sign(phi[r][c2] - phi[r][c1]):
                    return False
    return True


class PotentialGame(BimatrixGame):
    """Bimatrix game carrying a validated ordinal potential."""

    kind = "potential"

    def __init__(self, u_matrix, v_matrix, phi_matrix):
        super().__init__(u_matrix, v_matrix)
        self.phi = _matrix(phi_matrix, "phi")
        if len(self.phi) != self.rows or len(self.phi[0]) != self.cols:
            raise GameError("phi must share dimensions with U and V")
        if not validate_potential(self.U, self.V, self.phi):
            raise GameError("phi is not an ordinal potential for (U, V)")

    def potential_of(self, contract: Contract) -> Fraction:
        self.validate_contract(contract)
        return self.phi[contract.strategy_a][contract.strategy_b]


class _LevelGame(Game):
    """Shared machinery for games whose menu is a grid of payoff levels.

    Levels live on a native scale (the zero-sum payoff scale or the
    transfer scale).  The man's payoff strictly increases with the
    level, the woman's strictly decreases, and ``value_level`` is the
    level both sides would settle on absent outside pressure.  A menu
    deviation is improving for the man when it moves the level from
    below toward the value (never past it), mirrored for the woman.
    """

    levels: Tuple[Fraction, ...]
    value_level: Fraction
    resolution: Fraction

    def level_of(self, contract: Contract) -> Fraction:
        self.validate_contract(contract)
        return contract.strategy_a

    def level_bounds(self, u_floor, v_floor) -> Tuple[object, object]:
        """Native-scale interval [lo, hi] of levels meeting the payoff floors.

        Floors may be the minus-infinity sentinel; the returned bounds
        may then be infinite sentinels as well.
        """
        raise NotImplementedError

    def improving_deviations(self, contract, side):
        cur = self.level_of(contract)
        w = self.value_level
        menu = self.menu()
        out = []
        for k, lev in enumerate(self.levels):
            if side is Side.MAN and cur < lev <= w:
                out.append(menu[k])
            elif side is Side.WOMAN and w <= lev < cur:
                out.append(menu[k])
        return tuple(out)


def _anchor_hint(level: Fraction, entries: Sequence[Fraction]) -> str:
    below = max(x for x in entries if x <= level)
    above = min(x for x in entries if x >= level)
    return f"between pure levels {fmt(below)} and {fmt(above)}"


class ZeroSumGame(_LevelGame):
    """Zero-sum game discretized into payoff levels u = g, v = -g."""

    kind = "zero_sum"

    def __init__(self, g_matrix: Sequence[Sequence[RationalLike]], resolution: RationalLike):
        self.g = _matrix(g_matrix, "g")
        self.resolution = rat(resolution)
        if self.resolution <= 0:
            raise GameError("menu resolution must be positive")
        self.value_level = matrix_game_value(self.g)
        entries = [x for row in self.g for x in row]
        self.levels = tuple(_grid(min(entries), max(entries), self.resolution))
        self._menu = tuple(
            Contract(
                id=k,
                strategy_a=lev,
                strategy_b=lev,
                u=lev,
                v=-lev,
                hint=_anchor_hint(lev, entries),
            )
            for k, lev in enumerate(self.levels)
        )

    def _evaluate(self, a, b):
        if a != b:
            raise GameError("zero-sum contract descriptors must agree")
        lev = rat(a)
        return (lev, -lev)

    def level_bounds(self, u_floor, v_floor):
        lo = u_floor if not is_neg_inf(u_floor) else NEG_INF
        hi = -v_floor if not is_neg_inf(v_floor) else POS_INF
        return (lo, hi)


class StrictlyCompetitiveGame(_LevelGame):
    """Monotone transforms of a zero-sum game: u = f(g), v = h(-g).

    The menu is gridded on the u scale (so consecutive u values differ
    by at most the resolution) and mapped back to native g levels
    through the exact piecewise-linear inverse.
    """

    kind = "strictly_competitive"

    def __init__(
        self,
        g_matrix: Sequence[Sequence[RationalLike]],
        resolution: RationalLike,
        f_map: PiecewiseLinear,
        h_map: PiecewiseLinear,
    ):
        self.g = _matrix(g_matrix, "g")
        self.resolution = rat(resolution)
        if self.resolution <= 0:
            raise GameError("menu resolution must be positive")
        self.f = f_map if isinstance(f_map, PiecewiseLinear) else PiecewiseLinear(f_map)
        self.h = h_map if isinstance(h_map, PiecewiseLinear) else PiecewiseLinear(h_map)
        self.value_level = matrix_game_value(self.g)
        entries = [x for row in self.g for x in row]
        u_grid = _grid(self.f(min(entries)), self.f(max(entries)), self.resolution)
        self.levels = tuple(self.f.inverse(u) for u in u_grid)
        self._menu = tuple(
            Contract(
                id=k,
                strategy_a=lev,
                strategy_b=lev,
                u=u_grid[k],
                v=self.h(-lev),
                hint=_anchor_hint(lev, entries),
            )
            for k, lev in enumerate(self.levels)
        )

    def _evaluate(self, a, b):
        if a != b:
            raise GameError("strictly competitive contract descriptors must agree")
        lev = rat(a)
        return (self.f(lev), self.h(-lev))

    def level_bounds(self, u_floor, v_floor):
        lo = self.f.inverse(u_floor) if not is_neg_inf(u_floor) else NEG_INF
        hi = -self.h.inverse(v_floor) if not is_neg_inf(v_floor) else POS_INF
        return (lo, hi)


class TransferGame(_LevelGame):
    """Surplus division through a bounded transfer grid.

    The man receives the transfer t (u = f_u(t)), the woman pays it
    (v = f_v(-t)); both maps are strictly increasing.  The underlying
    game has value 0 on the transfer scale: absent outside pressure
    neither side owes the other anything.
    """

    kind = "transfer"

    def __init__(
        self,
        t_min: RationalLike,
        t_max: RationalLike,
        step: RationalLike,
        f_u: PiecewiseLinear,
        f_v: PiecewiseLinear,
    ):
        self.t_min = rat(t_min)
        self.t_max = rat(t_max)
        self.resolution = rat(step)
        if self.resolution <= 0:
            raise GameError("transfer grid step must be positive")
        if self.t_min > self.t_max:
            raise GameError("transfer grid has empty range")
        self.f_u = f_u if isinstance(f_u, PiecewiseLinear) else PiecewiseLinear(f_u)
        self.f_v = f_v if isinstance(f_v, PiecewiseLinear) else PiecewiseLinear(f_v)
        self.value_level = Fraction(0)
        self.levels = tuple(_grid(self.t_min, self.t_max, self.resolution))
        self._menu = tuple(
            Contract(
                id=k,
                strategy_a=t,
                strategy_b=t,
                u=self.f_u(t),
                v=self.f_v(-t),
                hint=f"transfer {fmt(t)}",
            )
            for k, t in enumerate(self.levels)
        )

    def _evaluate(self, a, b):
        if a != b:
            raise GameError("transfer contract descriptors must agree")
        t = rat(a)
        return (self.f_u(t), self.f_v(-t))

    def level_bounds(self, u_floor, v_floor):
        lo = self.f_u.inverse(u_floor) if not is_neg_inf(u_floor) else NEG_INF
        hi = -self.f_v.inverse(v_floor) if not is_neg_inf(v_floor) else POS_INF
        return (lo, hi)


class RepeatedGame(Game):
    """Infinitely repeated stage game summarized by its payoff hull.

    Contracts are payoff points on a rational grid over the hull of the
    stage cells.  ``alpha`` and ``beta`` are the exact mixed punishment
    levels; a point weakly above both is sustainable without outside
    pressure, so no deviation from it is improving.
    """

    kind = "repeated"

    def __init__(
        self,
        u_matrix: Sequence[Sequence[RationalLike]],
        v_matrix: Sequence[Sequence[RationalLike]],
        resolution: RationalLike,
    ):
        self.U = _matrix(u_matrix, "U")
        self.V = _matrix(v_matrix, "V")
        if len(self.V) != len(self.U) or len(self.V[0]) != len(self.U[0]):
            raise GameError("U and V must share dimensions")
        self.resolution = rat(resolution)
        if self.resolution <= 0:
            raise GameError("menu resolution must be positive")
        cells = [
            (self.U[r][c], self.V[r][c])
            for r in range(len(self.U))
            for c in range(len(self.U[0]))
        ]
        self.hull: Tuple[Point, ...] = tuple(convex_hull(cells))
        self.alpha = matrix_game_value(self.U)
        self.beta = matrix_game_value(_transpose(self.V))
        menu = []
        xs = [p[0] for p in self.hull]
        for u in _grid(min(xs), max(xs), self.resolution):
            v_lo, v_hi = self._slice(u)
            for v in _grid(v_lo, v_hi, self.resolution):
                menu.append(
                    Contract(
                        id=len(menu),
                        strategy_a=(u, v),
                        strategy_b=(u, v),
                        u=u,
                        v=v,
                        hint="hull grid point",
                    )
                )
        self._menu = tuple(menu)

    def _slice(self, u: Fraction) -> Tuple[Fraction, Fraction]:
        """Exact v-range of the hull along the vertical line at u."""
        hull = self.hull
        vals = [p[1] for p in hull if p[0] == u]
        if len(hull) == 1:
            if not vals:
                raise GameError("u outside hull range")
            return (vals[0], vals[0])
        edges = [(hull[0], hull[1])] if len(hull) == 2 else [
            (hull[k], hull[(k + 1) % len(hull)]) for k in range(len(hull))
        ]
        for a, b in edges:
            if a[0] == b[0]:
                continue
            lo, hi = (a, b) if a[0] < b[0] else (b, a)
            if lo[0] <= u <= hi[0]:
                vals.append(lo[1] + (u - lo[0]) * (hi[1] - lo[1]) / (hi[0] - lo[0]))
        if not vals:
            raise GameError("u outside hull range")
        return (min(vals), max(vals))

    def _evaluate(self, a, b):
        if a != b:
            raise GameError("repeated-game contract descriptors must agree")
        u, v = a
        return (rat(u), rat(v))

    def validate_contract(self, contract: Contract) -> None:
        menu = self.menu()
        if 0 <= contract.id < len(menu) and menu[contract.id] == contract:
            return
        # Synthesized contracts (off-grid feasible points) are accepted
        # when the point really lies in the hull.
        point = (contract.u, contract.v)
        if (
            contract.strategy_a == point
            and contract.strategy_b == point
            and hull_contains(list(self.hull), point)
        ):
            return
        raise GameError(f"foreign contract {contract!r} for repeated game")

    def synthesize_contract(self, point: Point) -> Contract:
        """Wrap an exact hull point as a contract (menu contract if it is one)."""
        for c in self.menu():
            if (c.u, c.v) == point:
                return c
        if not hull_contains(list(self.hull), point):
            raise GameError(f"point {point} outside the feasible payoff hull")
        return Contract(
            id=len(self.menu()),
            strategy_a=point,
            strategy_b=point,
            u=point[0],
            v=point[1],
            hint="synthesized hull point",
        )

    def improving_deviations(self, contract, side):
        self.validate_contract(contract)
        if side is Side.MAN:
            if contract.u >= self.alpha:
                return ()
            return tuple(c for c in self.menu() if c.u > contract.u)
        if contract.v >= self.beta:
            return ()
        return tuple(c for c in self.menu() if c.v > contract.v)

    def is_nash_contract(self, contract):
        self.validate_contract(contract)
        return contract.u >= self.alpha and contract.v >= self.beta


def zero_sum_value(g_matrix: Sequence[Sequence[RationalLike]]) -> Fraction:
    """Exact value of the mixed extension of a zero-sum matrix game."""
    return matrix_game_value(_matrix(g_matrix, "g"))


def punishment_levels(stage: BimatrixGame) -> Tuple[Fraction, Fraction]:
    """Exact mixed minmax levels (alpha, beta) of a stage game.

    alpha is what the column player can hold the row player down to,
    beta the mirror image; both are matrix-game values.
    """
    return (matrix_game_value(stage.U), matrix_game_value(_transpose(stage.V)))


def feasible_payoff_hull(stage: BimatrixGame) -> Tuple[Point, ...]:
    """Exact convex hull of the stage game's payoff vectors (ccw, strict)."""
    cells = [
        (stage.U[r][c], stage.V[r][c])
        for r in range(stage.rows)
        for c in range(stage.cols)
    ]
    return tuple(convex_hull(cells))


@dataclass(frozen=True)
class Instance:
    """A two-sided market: agents, reservation payoffs, one game per pair."""

    men: Tuple[str, ...]
    women: Tuple[str, ...]
    irp_men: Tuple[Fraction, ...]
    irp_women: Tuple[Fraction, ...]
    games: Mapping[Tuple[int, int], Game]

    def __post_init__(self):
        if len(set(self.men)) != len(self.men) or len(set(self.women)) != len(self.women):
            raise GameError("agent names must be distinct per side")
        if set(self.men) & set(self.women):
            raise GameError("agent names must not repeat across sides")
        if len(self.irp_men) != len(self.men) or len(self.irp_women) != len(self.women):
            raise GameError("one reservation payoff per agent required")
        expected = {(i, j) for i in range(len(self.men)) for j in range(len(self.women))}
        if set(self.games.keys()) != expected:
            raise GameError("games must be defined for every (man, woman) pair")
        for key, game in self.games.items():
            if not isinstance(game, Game):
                raise GameError(f"games[{key}] is not a couple game")

    def game(self, i: int, j: int) -> Game:
        return self.games[(i, j)]

    @property
    def n_men(self) -> int:
        return len(self.men)

    @property
    def n_women(self) -> int:
        return len(self.women)


def build_instance(
    men: Sequence[str],
    women: Sequence[str],
    irp_men: Sequence[RationalLike],
    irp_women: Sequence[RationalLike],
    games: Mapping[Tuple[int, int], Game],
) -> Instance:
    """Convenience constructor parsing reservation payoffs."""
    return Instance(
        men=tuple(men),
        women=tuple(women),
        irp_men=tuple(rat(x) for x in irp_men),
        irp_women=tuple(rat(x) for x in irp_women),
        games=dict(games),
    )
