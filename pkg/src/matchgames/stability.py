"""Stability notions for matching profiles, with verifiable witnesses.

A profile assigns each man a woman (or leaves him single) and gives
every matched couple one contract from its menu.  The checkers in this
module decide, exactly: margin-based external stability, the weak and
one-sided blocking variants, Nash play within couples, and internal
stability (no profitable deviation that keeps the market stable).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Mapping, Optional, Tuple

from .games import Contract, Game, GameError, Instance, Side
from .rational import rat

SINGLE = None


class MatchingError(ValueError):
    """Structurally invalid profile or an internal invariant breach."""


@dataclass(frozen=True)
class MatchingProfile:
    """A matching plus one chosen contract per matched couple.

    ``matches[i]`` is the woman index matched to man i, or None.
    ``chosen`` has exactly the matched (i, j) pairs as keys.
    """

    matches: Tuple[Optional[int], ...]
    chosen: Mapping[Tuple[int, int], Contract]

    def __post_init__(self):
        taken = [j for j in self.matches if j is not None]
        if len(set(taken)) != len(taken):
            raise MatchingError("two men matched to the same woman")
        pairs = {(i, j) for i, j in enumerate(self.matches) if j is not None}
        if set(self.chosen.keys()) != pairs:
            raise MatchingError("chosen contracts must cover exactly the matched pairs")
        inverse: Dict[int, int] = {j: i for i, j in enumerate(self.matches) if j is not None}
        object.__setattr__(self, "_inverse", inverse)

    def partner_of_woman(self, j: int) -> Optional[int]:
        return self._inverse.get(j)

    def matched_pairs(self) -> Tuple[Tuple[int, int], ...]:
        return tuple((i, j) for i, j in enumerate(self.matches) if j is not None)

    def with_contract(self, i: int, j: int, contract: Contract) -> "MatchingProfile":
        if self.matches[i] != j:
            raise MatchingError(f"couple ({i},{j}) is not matched")
        new_chosen = dict(self.chosen)
        new_chosen[(i, j)] = contract
        return MatchingProfile(self.matches, new_chosen)


def validate_profile(inst: Instance, profile: MatchingProfile) -> None:
    """Check the profile against the instance (sizes, contract membership)."""
    if len(profile.matches) != inst.n_men:
        raise MatchingError("profile size differs from the number of men")
    for i, j in enumerate(profile.matches):
        if j is not None and not 0 <= j < inst.n_women:
            raise MatchingError(f"man {i} matched to unknown woman {j}")
    for (i, j), contract in profile.chosen.items():
        try:
            inst.game(i, j).validate_contract(contract)
        except GameError as exc:
            raise MatchingError(f"couple ({i},{j}): {exc}") from exc


def man_payoff(inst: Instance, profile: MatchingProfile, i: int) -> Fraction:
    j = profile.matches[i]
    if j is None:
        return inst.irp_men[i]
    return profile.chosen[(i, j)].u


def woman_payoff(inst: Instance, profile: MatchingProfile, j: int) -> Fraction:
    i = profile.partner_of_woman(j)
    if i is None:
        return inst.irp_women[j]
    return profile.chosen[(i, j)].v


@dataclass(frozen=True)
class BlockingPair:
    """A blocking witness; a None agent stands for the empty player.

    contract is None exactly for reservation-payoff violations (the
    agent would rather be single).
    """

    man: Optional[int]
    woman: Optional[int]
    contract: Optional[Contract]


@dataclass(frozen=True)
class DeviationWitness:
    """A unilateral in-couple deviation used by Nash/internal reports."""

    man: int
    woman: int
    side: Side
    from_contract: Contract
    to_contract: Contract


@dataclass(frozen=True)
class StabilityReport:
    notion: str
    holds: bool
    witness: Optional[object] = None
    eps: Optional[Fraction] = None


def find_blocking_pair(
    inst: Instance, profile: MatchingProfile, eps
) -> Optional[BlockingPair]:
    """First reservation-payoff violation or margin-blocking pair, if any.

    Scan order is deterministic: each man's pairing with the empty
    player (his reservation check) first, then his candidate couples in
    woman order with contracts in id order, then the women's
    reservation checks.  Absent result means the profile is externally
    stable at margin eps.
    """
    eps = rat(eps)
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    validate_profile(inst, profile)
    men_pay = [man_payoff(inst, profile, i) for i in range(inst.n_men)]
    women_pay = [woman_payoff(inst, profile, j) for j in range(inst.n_women)]
    for i in range(inst.n_men):
        if men_pay[i] < inst.irp_men[i]:
            return BlockingPair(man=i, woman=None, contract=None)
        for j in range(inst.n_women):
            if profile.matches[i] == j:
                continue
            for contract in inst.game(i, j).menu():
                if contract.u > men_pay[i] + eps and contract.v > women_pay[j] + eps:
                    return BlockingPair(man=i, woman=j, contract=contract)
    for j in range(inst.n_women):
        if women_pay[j] < inst.irp_women[j]:
            return BlockingPair(man=None, woman=j, contract=None)
    return None


def is_externally_stable(inst: Instance, profile: MatchingProfile, eps) -> StabilityReport:
    eps = rat(eps)
    witness = find_blocking_pair(inst, profile, eps)
    notion = "External0" if eps == 0 else "ExternalEps"
    return StabilityReport(notion=notion, holds=witness is None, witness=witness, eps=eps)


def is_individually_rational(inst: Instance, profile: MatchingProfile) -> StabilityReport:
    """Reservation-payoff check alone (condition shared by every notion)."""
    validate_profile(inst, profile)
    for i in range(inst.n_men):
        if man_payoff(inst, profile, i) < inst.irp_men[i]:
            return StabilityReport("IR", False, BlockingPair(i, None, None))
    for j in range(inst.n_women):
        if woman_payoff(inst, profile, j) < inst.irp_women[j]:
            return StabilityReport("IR", False, BlockingPair(None, j, None))
    return StabilityReport("IR", True)


def is_stable_variant(inst: Instance, profile: MatchingProfile, mode: str) -> StabilityReport:
    """Weak / unilateral stability: blocking restricted to current strategies.

    mode "weak": an unmatched pair blocks only with the contract both
    of their current strategy descriptors already select.  mode
    "unilateral": one side may switch strategies, the other keeps its
    current descriptor.  Both use strict improvement with no margin and
    include the reservation check.  Single agents have no current
    strategy, so they never take part in these blocking pairs.
    """
    if mode not in ("weak", "unilateral"):
        raise ValueError(f"unknown variant {mode!r}")
    notion = "Weak" if mode == "weak" else "Unilateral"
    ir = is_individually_rational(inst, profile)
    if not ir.holds:
        return StabilityReport(notion, False, ir.witness)
    men_pay = [man_payoff(inst, profile, i) for i in range(inst.n_men)]
    women_pay = [woman_payoff(inst, profile, j) for j in range(inst.n_women)]
    for i in range(inst.n_men):
        j_cur = profile.matches[i]
        if j_cur is None:
            continue
        a_desc = profile.chosen[(i, j_cur)].strategy_a
        for j in range(inst.n_women):
            if j == j_cur:
                continue
            i_cur = profile.partner_of_woman(j)
            if i_cur is None:
                continue
            b_desc = profile.chosen[(i_cur, j)].strategy_b
            for contract in inst.game(i, j).menu():
                if mode == "weak":
                    usable = contract.strategy_a == a_desc and contract.strategy_b == b_desc
                else:
                    usable = contract.strategy_a == a_desc or contract.strategy_b == b_desc
                if usable and contract.u > men_pay[i] and contract.v > women_pay[j]:
                    return StabilityReport(
                        notion, False, BlockingPair(man=i, woman=j, contract=contract)
                    )
    return StabilityReport(notion, True)


def is_nash_stable(inst: Instance, profile: MatchingProfile) -> StabilityReport:
    """Every matched couple plays a contract no side can improve on alone."""
    validate_profile(inst, profile)
    for i, j in profile.matched_pairs():
        game = inst.game(i, j)
        contract = profile.chosen[(i, j)]
        for side in (Side.MAN, Side.WOMAN):
            deviations = game.improving_deviations(contract, side)
            if deviations:
                witness = DeviationWitness(i, j, side, contract, deviations[0])
                return StabilityReport("Nash", False, witness)
    return StabilityReport("Nash", True)


def is_internally_stable(inst: Instance, profile: MatchingProfile, eps) -> StabilityReport:
    """No couple member can gain by a deviation that keeps the market stable.

    Defined on externally stable profiles only (checked, error
    otherwise).  For each improving unilateral menu deviation the
    deviated profile is re-checked for external stability at the same
    margin; the notion holds when every such deviation destabilizes.
    """
    eps = rat(eps)
    ambient = is_externally_stable(inst, profile, eps)
    if not ambient.holds:
        raise MatchingError(
            "internal stability is defined on externally stable profiles only"
        )
    for i, j in profile.matched_pairs():
        game = inst.game(i, j)
        contract = profile.chosen[(i, j)]
        for side in (Side.MAN, Side.WOMAN):
            for deviation in game.improving_deviations(contract, side):
                deviated = profile.with_contract(i, j, deviation)
                if find_blocking_pair(inst, deviated, eps) is None:
                    witness = DeviationWitness(i, j, side, contract, deviation)
                    return StabilityReport("Internal", False, witness, eps)
    return StabilityReport("Internal", True, eps=eps)
