"""Join and meet of externally stable profiles.

Under a genericity condition (no agent is exactly indifferent between
their partners in two profiles), giving every man the better of his two
assignments is again a matching, and it is externally stable.  The
mirror-image meet is only guaranteed for competitive game classes,
where it coincides with the women-side join; for other classes the raw
construction is still exposed and the stability checker gets the final
word.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Tuple

from .games import Contract, Instance, Side
from .rational import rat
from .stability import (
    MatchingError,
    MatchingProfile,
    find_blocking_pair,
    man_payoff,
    validate_profile,
    woman_payoff,
)

_COMPETITIVE_KINDS = {"zero_sum", "strictly_competitive", "transfer"}


def genericity_holds(
    inst: Instance, p1: MatchingProfile, p2: MatchingProfile, eps=0
) -> bool:
    """No agent has near-equal payoffs (within eps) with different partners.

    With eps=0 this is the exact condition: equal payoff across the two
    profiles forces the same partner.  It is what makes the agent-wise
    argmax well-defined in the join.
    """
    eps = rat(eps)
    validate_profile(inst, p1)
    validate_profile(inst, p2)
    for i in range(inst.n_men):
        if p1.matches[i] != p2.matches[i]:
            if abs(man_payoff(inst, p1, i) - man_payoff(inst, p2, i)) <= eps:
                return False
    for j in range(inst.n_women):
        if p1.partner_of_woman(j) != p2.partner_of_woman(j):
            if abs(woman_payoff(inst, p1, j) - woman_payoff(inst, p2, j)) <= eps:
                return False
    return True


def _assignment_of_man(profile: MatchingProfile, i: int) -> Tuple[Optional[int], Optional[Contract]]:
    j = profile.matches[i]
    return (j, profile.chosen[(i, j)] if j is not None else None)


def _assignment_of_woman(profile: MatchingProfile, j: int) -> Tuple[Optional[int], Optional[Contract]]:
    i = profile.partner_of_woman(j)
    return (i, profile.chosen[(i, j)] if i is not None else None)


def extremal_profile(
    inst: Instance,
    p1: MatchingProfile,
    p2: MatchingProfile,
    side: Side,
    best: bool,
) -> MatchingProfile:
    """Agent-wise best (or worst) of two profiles for one side.

    Each agent of the chosen side takes the partner and contract from
    whichever profile pays them more (less, when best=False); exact
    payoff ties keep p1's assignment, which under genericity is the
    same partner in both.  Raises when the selections collide on a
    partner, which the join theorem rules out for stable inputs.
    """
    if side is Side.MAN:
        matches: List[Optional[int]] = [None] * inst.n_men
        chosen: Dict[Tuple[int, int], Contract] = {}
        for i in range(inst.n_men):
            pay1, pay2 = man_payoff(inst, p1, i), man_payoff(inst, p2, i)
            pick_first = pay1 >= pay2 if best else pay1 <= pay2
            j, contract = _assignment_of_man(p1 if pick_first else p2, i)
            if j is not None:
                matches[i] = j
                chosen[(i, j)] = contract
        return MatchingProfile(tuple(matches), chosen)
    matches = [None] * inst.n_men
    chosen = {}
    for j in range(inst.n_women):
        pay1, pay2 = woman_payoff(inst, p1, j), woman_payoff(inst, p2, j)
        pick_first = pay1 >= pay2 if best else pay1 <= pay2
        i, contract = _assignment_of_woman(p1 if pick_first else p2, j)
        if i is not None:
            if matches[i] is not None:
                raise MatchingError("two women selected the same man")
            matches[i] = j
            chosen[(i, j)] = contract
    return MatchingProfile(tuple(matches), chosen)


def join(
    inst: Instance,
    p1: MatchingProfile,
    p2: MatchingProfile,
    side: Side = Side.MAN,
    eps=0,
) -> MatchingProfile:
    """Side-optimal combination of two externally stable profiles.

    Both inputs must be externally stable at margin eps and jointly
    generic; the result is validated to be a matching and externally
    stable (a failure is a logic error, not a caller error).
    """
    eps = rat(eps)
    if find_blocking_pair(inst, p1, eps) is not None or find_blocking_pair(inst, p2, eps) is not None:
        raise MatchingError("join requires externally stable inputs")
    if not genericity_holds(inst, p1, p2, eps):
        raise MatchingError("join requires the genericity condition to hold")
    joined = extremal_profile(inst, p1, p2, side, best=True)
    if find_blocking_pair(inst, joined, eps) is not None:
        raise MatchingError("join produced an unstable profile; lattice invariant broken")
    return joined


def meet_competitive(
    inst: Instance, p1: MatchingProfile, p2: MatchingProfile, eps=0
) -> MatchingProfile:
    """Men-side meet on competitive instances, computed as the women-join.

    Requires every couple game to be zero-sum, strictly competitive, or
    a transfer game: those are the classes where one side's worst is
    the other side's best, giving a true lattice.  Verified externally
    stable before returning.
    """
    eps = rat(eps)
    for key in sorted(inst.games.keys()):
        if inst.games[key].kind not in _COMPETITIVE_KINDS:
            raise MatchingError(
                f"meet requires competitive game classes; games[{key}] is {inst.games[key].kind}"
            )
    return join(inst, p1, p2, Side.WOMAN, eps)
