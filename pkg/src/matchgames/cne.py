"""Outside options and constrained Nash equilibria inside a couple.

A matched couple's outside options are the best payoffs each member
could fetch elsewhere counting only contracts the alternative partner
would strictly accept (margin included), floored at the reservation
payoff.  A contract is a constrained equilibrium when it clears both
outside options and every improving unilateral deviation would drop
the partner strictly below theirs, so the deviation would break the
couple.  Solvers per game class find such contracts directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .games import (
    BimatrixGame,
    Contract,
    Game,
    GameError,
    Instance,
    PotentialGame,
    RepeatedGame,
    Side,
    _LevelGame,
)
from .geometry import Point, clip_ge, vertex_argmax
from .rational import is_neg_inf, rat
from .stability import MatchingProfile, man_payoff, validate_profile, woman_payoff


@dataclass(frozen=True)
class OutsideOptions:
    """Payoff floors (u0, v0); either may be the minus-infinity sentinel."""

    u0: object
    v0: object


def outside_options(
    inst: Instance, profile: MatchingProfile, i: int, j: int, eps
) -> OutsideOptions:
    """Best alternative payoffs for a matched couple at margin eps.

    A contract with another partner counts only if it pays that partner
    strictly more than their current payoff plus eps; staying single
    always counts, so the floors never drop below the reservation
    payoffs.
    """
    eps = rat(eps)
    validate_profile(inst, profile)
    if profile.matches[i] != j:
        raise ValueError(f"couple ({i},{j}) is not matched in this profile")
    women_pay = [woman_payoff(inst, profile, w) for w in range(inst.n_women)]
    men_pay = [man_payoff(inst, profile, m) for m in range(inst.n_men)]
    u0 = inst.irp_men[i]
    for b in range(inst.n_women):
        if b == j:
            continue
        for c in inst.game(i, b).menu():
            if c.v > women_pay[b] + eps and c.u > u0:
                u0 = c.u
    v0 = inst.irp_women[j]
    for a in range(inst.n_men):
        if a == i:
            continue
        for c in inst.game(a, j).menu():
            if c.u > men_pay[a] + eps and c.v > v0:
                v0 = c.v
    return OutsideOptions(u0=u0, v0=v0)


def is_feasible(game: Game, contract: Contract, oo: OutsideOptions) -> bool:
    """Contract clears both outside options (weak inequalities)."""
    game.validate_contract(contract)
    return contract.u >= oo.u0 and contract.v >= oo.v0


def is_cne(game: Game, contract: Contract, oo: OutsideOptions) -> bool:
    """Feasible, and every improving deviation strictly strands the partner.

    The partner's payoff is evaluated at the deviated contract: if it
    stays at or above their outside option, the deviation would be
    carried out and the candidate is not an equilibrium.
    """
    if not is_feasible(game, contract, oo):
        return False
    for d in game.improving_deviations(contract, Side.MAN):
        if d.v >= oo.v0:
            return False
    for d in game.improving_deviations(contract, Side.WOMAN):
        if d.u >= oo.u0:
            return False
    return True


class CnePolicy(Enum):
    ANY = "any"
    PREFER_NASH = "prefer-nash"
    MAX_POTENTIAL = "max-potential"
    ZERO_SUM_MEDIAN = "zero-sum-median"
    REPEATED_ORACLE = "repeated-oracle"


@dataclass(frozen=True)
class CneResult:
    """solve_cne outcome; reason is set exactly when contract is None.

    reason "infeasible": no menu contract clears the outside options.
    reason "not_feasible_game": feasible contracts exist but none is a
    constrained equilibrium (possible for plain bimatrix games).
    """

    contract: Optional[Contract]
    reason: Optional[str] = None


def _median3(a, b, c):
    return sorted([a, b, c])[1]


def _scan(game: Game, oo: OutsideOptions, prefer_nash: bool) -> CneResult:
    feasible = [c for c in game.menu() if is_feasible(game, c, oo)]
    if not feasible:
        return CneResult(None, "infeasible")
    if prefer_nash:
        for c in feasible:
            if game.is_nash_contract(c):
                return CneResult(c)
    for c in feasible:
        if is_cne(game, c, oo):
            return CneResult(c)
    return CneResult(None, "not_feasible_game")


def _solve_level(game: _LevelGame, oo: OutsideOptions) -> CneResult:
    lo, hi = game.level_bounds(oo.u0, oo.v0)
    feasible = [
        (k, lev) for k, lev in enumerate(game.levels) if lo <= lev <= hi
    ]
    if not feasible:
        return CneResult(None, "infeasible")
    target = _median3(lo, hi, game.value_level)
    w = game.value_level

    def rank(item):
        _, lev = item
        return (abs(lev - target), abs(lev - w), lev)

    k, _ = min(feasible, key=rank)
    contract = game.menu()[k]
    if not is_cne(game, contract, oo):
        raise GameError("median level failed the equilibrium check; solver bug")
    return CneResult(contract)


def repeated_cne_payoff(game: RepeatedGame, oo: OutsideOptions) -> Optional[Point]:
    """Exact equilibrium payoff point of the repeated game, if one exists.

    Clips the payoff hull by the outside options; inside that region,
    points also above both punishment levels are self-enforcing and the
    one maximizing (v, then u) is returned.  When the punished side's
    level is unreachable the region's best point for the other side
    stands: the deviator would be held at their punishment level, which
    the outside option already beats.  Absent exactly when the clipped
    region is empty.
    """
    region = list(game.hull)
    if not is_neg_inf(oo.u0):
        region = clip_ge(region, 0, oo.u0)
    if not is_neg_inf(oo.v0) and region:
        region = clip_ge(region, 1, oo.v0)
    if not region:
        return None
    enforceable = clip_ge(clip_ge(region, 0, game.alpha), 1, game.beta)
    if enforceable:
        return vertex_argmax(enforceable, key=lambda p: (p[1], p[0]))
    u_ok = (not is_neg_inf(oo.u0)) and oo.u0 >= game.alpha
    if u_ok:
        return vertex_argmax(region, key=lambda p: (p[1], p[0]))
    return vertex_argmax(region, key=lambda p: (p[0], p[1]))


def _solve_repeated(game: RepeatedGame, oo: OutsideOptions) -> CneResult:
    point = repeated_cne_payoff(game, oo)
    if point is None:
        return CneResult(None, "infeasible")
    contract = game.synthesize_contract(point)
    if not is_cne(game, contract, oo):
        raise GameError("repeated-game payoff point failed the equilibrium check")
    return CneResult(contract)


def _solve_max_potential(game: PotentialGame, oo: OutsideOptions) -> CneResult:
    feasible = [c for c in game.menu() if is_feasible(game, c, oo)]
    if not feasible:
        return CneResult(None, "infeasible")
    best = max(feasible, key=lambda c: (game.potential_of(c), -c.id))
    if not is_cne(game, best, oo):
        raise GameError("potential argmax failed the equilibrium check; solver bug")
    return CneResult(best)


def solve_cne(game: Game, oo: OutsideOptions, policy: CnePolicy = CnePolicy.ANY) -> CneResult:
    """Find a constrained equilibrium contract under the given policy.

    ANY and PREFER_NASH work on every class (menu scans); the class
    solvers are validated against their class: MAX_POTENTIAL needs a
    potential game, ZERO_SUM_MEDIAN a payoff-level class, and
    REPEATED_ORACLE a repeated game.
    """
    if policy in (CnePolicy.ANY, CnePolicy.PREFER_NASH):
        return _scan(game, oo, prefer_nash=policy is CnePolicy.PREFER_NASH)
    if policy is CnePolicy.MAX_POTENTIAL:
        if not isinstance(game, PotentialGame):
            raise GameError("max-potential policy requires a potential game")
        return _solve_max_potential(game, oo)
    if policy is CnePolicy.ZERO_SUM_MEDIAN:
        if not isinstance(game, _LevelGame):
            raise GameError("median policy requires a payoff-level game class")
        return _solve_level(game, oo)
    if policy is CnePolicy.REPEATED_ORACLE:
        if not isinstance(game, RepeatedGame):
            raise GameError("repeated-oracle policy requires a repeated game")
        return _solve_repeated(game, oo)
    raise GameError(f"unknown policy {policy!r}")
