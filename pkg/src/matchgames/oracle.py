"""Brute-force enumeration oracles.

Everything here is exponential by design: these routines exist to
cross-check the fast solvers on small instances, not to scale.  The
enumerator streams profiles so callers can stop early, but it refuses
outright when the candidate space exceeds a configurable cap.
"""

from __future__ import annotations

import itertools
from typing import Iterator, List, Optional, Tuple

from .games import Contract, Game, Instance
from .cne import OutsideOptions, is_cne
from .stability import (
    MatchingProfile,
    is_externally_stable,
    is_internally_stable,
    is_nash_stable,
    is_stable_variant,
)

__all__ = [
    "OracleCapError",
    "enumerate_matchings",
    "count_profiles",
    "enumerate_profiles",
    "enumerate_stable",
    "pareto_frontier",
    "brute_force_cne",
]


class OracleCapError(ValueError):
    """Raised when the candidate space is too large to enumerate."""


def enumerate_matchings(n_men: int, n_women: int) -> Iterator[Tuple[Optional[int], ...]]:
    """Yield every partial matching as a tuple indexed by man.

    Entry i is the woman matched to man i, or None.  Includes the
    all-singles matching.  Deterministic order: man 0's options are
    explored single-first, then women in ascending index.
    """
    if n_men < 0 or n_women < 0:
        raise ValueError("agent counts must be nonnegative")

    def rec(i: int, taken: List[bool], acc: List[Optional[int]]) -> Iterator[Tuple[Optional[int], ...]]:
        if i == n_men:
            yield tuple(acc)
            return
        acc.append(None)
        yield from rec(i + 1, taken, acc)
        acc.pop()
        for j in range(n_women):
            if taken[j]:
                continue
            taken[j] = True
            acc.append(j)
            yield from rec(i + 1, taken, acc)
            acc.pop()
            taken[j] = False

    yield from rec(0, [False] * n_women, [])


def count_profiles(inst: Instance) -> int:
    """Exact number of matching profiles: sum over matchings of the
    product of menu sizes along the matched couples."""
    sizes = [
        [len(inst.game(i, j).menu()) for j in range(inst.n_women)]
        for i in range(inst.n_men)
    ]

    def rec(i: int, taken: int) -> int:
        if i == len(sizes):
            return 1
        total = rec(i + 1, taken)  # man i stays single
        for j in range(inst.n_women):
            if taken >> j & 1:
                continue
            total += sizes[i][j] * rec(i + 1, taken | 1 << j)
        return total

    return rec(0, 0)


def enumerate_profiles(inst: Instance, cap: int = 10**7) -> Iterator[MatchingProfile]:
    """Stream every matching profile of the instance.

    Refuses with OracleCapError (carrying the exact count) when the
    candidate space exceeds cap.  Order is deterministic: matchings in
    enumerate_matchings order, contracts per couple in menu (id) order,
    rightmost couple varying fastest.
    """
    total = count_profiles(inst)
    if total > cap:
        raise OracleCapError(
            f"candidate space has {total} profiles, exceeding cap {cap}"
        )
    for matches in enumerate_matchings(inst.n_men, inst.n_women):
        couples = [(i, j) for i, j in enumerate(matches) if j is not None]
        menus = [inst.game(i, j).menu() for i, j in couples]
        for combo in itertools.product(*menus):
            yield MatchingProfile(
                matches=matches, chosen=dict(zip(couples, combo))
            )


_NOTIONS = ("external", "internal", "nash", "weak", "unilateral")


def enumerate_stable(
    inst: Instance,
    eps,
    notion: str = "external",
    cap: int = 10**7,
) -> Iterator[MatchingProfile]:
    """Stream all profiles satisfying the requested stability notion.

    notion: "external" (margin eps), "internal" (externally stable at
    eps and no profitable internal deviation), "nash", "weak", or
    "unilateral".  Internal filtering implies the external one, so the
    pre-check of is_internally_stable never trips here.
    """
    if notion not in _NOTIONS:
        raise ValueError(f"unknown stability notion {notion!r}")
    for profile in enumerate_profiles(inst, cap=cap):
        if notion == "external":
            if is_externally_stable(inst, profile, eps).holds:
                yield profile
        elif notion == "internal":
            if is_externally_stable(inst, profile, eps).holds and is_internally_stable(
                inst, profile, eps
            ).holds:
                yield profile
        elif notion == "nash":
            if is_nash_stable(inst, profile).holds:
                yield profile
        else:
            if is_stable_variant(inst, profile, notion).holds:
                yield profile


def pareto_frontier(game: Game) -> List[Contract]:
    """Menu contracts not strictly dominated in both payoffs.

    A contract is dropped only if some other menu contract pays both
    sides strictly more.  Returned in menu (id) order.
    """
    menu = game.menu()
    out = []
    for c in menu:
        if any(d.u > c.u and d.v > c.v for d in menu):
            continue
        out.append(c)
    return out


def brute_force_cne(game: Game, oo: OutsideOptions) -> List[Contract]:
    """All menu contracts that are constrained equilibria for the given
    outside options, in menu order.  With both options at the -inf
    sentinel this is exactly the set of Nash contracts of the menu."""
    return [c for c in game.menu() if is_cne(game, c, oo)]
