"""Refining an externally stable profile to internal stability.

Repeated passes over the matched couples: a couple whose contract is
already a constrained equilibrium (against slightly softened outside
options, see below) is left alone; otherwise the contract is replaced
by one the class solver finds.  A couple that adopts a feasible Nash
contract is frozen for good.  The pass loop converges because each
class's solver makes progress in its own monotone quantity.

Outside options are softened by the ambient margin and clamped at the
reservation payoffs: raw outside options can sit up to the margin above
the incumbent payoffs on a margin-stable profile, which would make the
incumbent contract infeasible, while the softened floors keep every
replacement externally stable at the same margin and make convergence
equivalent to internal stability.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import List, Mapping, Optional, Set, Tuple

from .cne import (
    CnePolicy,
    CneResult,
    OutsideOptions,
    _scan,
    _solve_level,
    _solve_max_potential,
    _solve_repeated,
    is_cne,
    is_feasible,
    outside_options,
    solve_cne,
)
from .games import Game, Instance, PotentialGame, RepeatedGame, _LevelGame
from .rational import fmt, rat
from .stability import MatchingError, MatchingProfile, find_blocking_pair, validate_profile


class RefineStatus(Enum):
    CONVERGED = "Converged"
    PASS_LIMIT = "PassLimit"
    INFEASIBLE = "Infeasible"


@dataclass
class RefineResult:
    profile: MatchingProfile
    status: RefineStatus
    passes: int
    trace: List[str]
    failed_couple: Optional[Tuple[int, int]] = None


def _effective_oo(inst: Instance, raw: OutsideOptions, i: int, j: int, eps: Fraction) -> OutsideOptions:
    return OutsideOptions(
        u0=max(raw.u0 - eps, inst.irp_men[i]),
        v0=max(raw.v0 - eps, inst.irp_women[j]),
    )


def _class_solve(game: Game, oo: OutsideOptions, policy: Optional[CnePolicy]) -> CneResult:
    if policy is not None:
        return solve_cne(game, oo, policy)
    # Default: a feasible Nash contract first (matrix classes), then the
    # class solver. For level games the median already lands on a Nash
    # level whenever a feasible one exists, and the repeated-game solver
    # prefers self-enforcing points by construction.
    if isinstance(game, RepeatedGame):
        return _solve_repeated(game, oo)
    if isinstance(game, _LevelGame):
        return _solve_level(game, oo)
    for c in game.menu():
        if is_feasible(game, c, oo) and game.is_nash_contract(c):
            return CneResult(c)
    if isinstance(game, PotentialGame):
        return _solve_max_potential(game, oo)
    return _scan(game, oo, prefer_nash=False)


def refine(
    inst: Instance,
    profile: MatchingProfile,
    eps,
    policies: Optional[Mapping[str, CnePolicy]] = None,
    max_passes: Optional[int] = None,
) -> RefineResult:
    """Drive every matched couple to a constrained equilibrium contract.

    ``policies`` maps a game kind (e.g. "potential") to an explicit
    CnePolicy; unmapped kinds use the default described in
    ``_class_solve``.  The profile must be externally stable at margin
    eps on entry; external stability is re-asserted after every
    replacement, and the returned status tells whether a full pass made
    no change (Converged), the pass budget ran out (PassLimit), or some
    couple has no constrained equilibrium in its menu (Infeasible,
    possible for plain bimatrix games).
    """
    eps = rat(eps)
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    validate_profile(inst, profile)
    if find_blocking_pair(inst, profile, eps) is not None:
        raise MatchingError("refine requires an externally stable input profile")
    policies = dict(policies or {})
    couples = profile.matched_pairs()
    if max_passes is None:
        max_menu = max((len(inst.game(i, j).menu()) for i, j in couples), default=1)
        max_passes = 10 * max_menu * max(len(couples), 1)
    trace: List[str] = []
    frozen: Set[Tuple[int, int]] = set()
    current = profile
    passes = 0
    while passes < max_passes:
        passes += 1
        changes = 0
        for i, j in couples:
            if (i, j) in frozen:
                trace.append(f"event=skip pass={passes} man={inst.men[i]} woman={inst.women[j]} frozen=true")
                continue
            game = inst.game(i, j)
            raw = outside_options(inst, current, i, j, eps)
            oo = _effective_oo(inst, raw, i, j, eps)
            contract = current.chosen[(i, j)]
            if is_cne(game, contract, oo):
                trace.append(
                    f"event=visit pass={passes} man={inst.men[i]} woman={inst.women[j]} "
                    f"u0={fmt(oo.u0)} v0={fmt(oo.v0)} contract={contract.id} cne=true"
                )
                continue
            result = _class_solve(game, oo, policies.get(game.kind))
            if result.contract is None:
                trace.append(
                    f"event=stuck pass={passes} man={inst.men[i]} woman={inst.women[j]} "
                    f"reason={result.reason}"
                )
                return RefineResult(current, RefineStatus.INFEASIBLE, passes, trace, (i, j))
            new_contract = result.contract
            current = current.with_contract(i, j, new_contract)
            changes += 1
            nash = game.is_nash_contract(new_contract)
            if nash and is_feasible(game, new_contract, oo):
                frozen.add((i, j))
            trace.append(
                f"event=replace pass={passes} man={inst.men[i]} woman={inst.women[j]} "
                f"old={contract.id} new={new_contract.id} u={fmt(new_contract.u)} "
                f"v={fmt(new_contract.v)} nash={'true' if nash else 'false'}"
                + (" frozen=true" if (i, j) in frozen else "")
            )
            if find_blocking_pair(inst, current, eps) is not None:
                raise MatchingError(
                    "replacement broke external stability; refinement invariant violated"
                )
        trace.append(f"event=pass pass={passes} changes={changes}")
        if changes == 0:
            trace.append(f"event=status status=Converged passes={passes}")
            return RefineResult(current, RefineStatus.CONVERGED, passes, trace)
    trace.append(f"event=status status=PassLimit passes={passes}")
    return RefineResult(current, RefineStatus.PASS_LIMIT, passes, trace)
