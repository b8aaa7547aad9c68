"""Deferred-acceptance over contract menus with a payoff margin.

One side proposes.  A proposer solves for his best achievable payoff
subject to making the target strictly better off by more than the
margin; a proposal to a taken responder triggers either an immediate
replacement (the incumbent no longer wants her at her raised price) or
a bidding war decided by maximal willingness to pay.  Every accepted
proposal raises the responder's payoff by at least the margin, which
bounds the number of iterations.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Deque, Dict, List, Optional, Tuple

from .games import Contract, Instance, Side
from .rational import NEG_INF, fmt, rat
from .stability import MatchingError, MatchingProfile, find_blocking_pair


class _View:
    """Orients an instance so the proposing side always reads as 'men'."""

    def __init__(self, inst: Instance, proposing: Side):
        self.inst = inst
        self.proposing = proposing

    @property
    def n_proposers(self) -> int:
        return self.inst.n_men if self.proposing is Side.MAN else self.inst.n_women

    @property
    def n_responders(self) -> int:
        return self.inst.n_women if self.proposing is Side.MAN else self.inst.n_men

    def proposer_name(self, p: int) -> str:
        return self.inst.men[p] if self.proposing is Side.MAN else self.inst.women[p]

    def responder_name(self, r: int) -> str:
        return self.inst.women[r] if self.proposing is Side.MAN else self.inst.men[r]

    def proposer_irp(self, p: int) -> Fraction:
        return self.inst.irp_men[p] if self.proposing is Side.MAN else self.inst.irp_women[p]

    def responder_irp(self, r: int) -> Fraction:
        return self.inst.irp_women[r] if self.proposing is Side.MAN else self.inst.irp_men[r]

    def menu(self, p: int, r: int) -> Tuple[Contract, ...]:
        i, j = (p, r) if self.proposing is Side.MAN else (r, p)
        return self.inst.game(i, j).menu()

    def own(self, c: Contract) -> Fraction:
        return c.u if self.proposing is Side.MAN else c.v

    def partner(self, c: Contract) -> Fraction:
        return c.v if self.proposing is Side.MAN else c.u


@dataclass(frozen=True)
class ProposalSolution:
    """Outcome of one proposer optimization.

    target None means staying single is strictly best; objective is the
    proposer's own payoff at the optimum (his reservation payoff when
    target is None).
    """

    target: Optional[int]
    contract: Optional[Contract]
    objective: Fraction


def _best_with(
    view: _View, p: int, r: int, payoffs: List[Fraction], eps: Fraction
) -> Optional[Tuple[Fraction, Contract]]:
    """Best own payoff against responder r subject to raising r by > eps - 0.

    The attractiveness constraint is weak at payoffs[r] + eps; ties on
    own payoff keep the lowest contract id.
    """
    floor = payoffs[r] + eps
    best: Optional[Tuple[Fraction, Contract]] = None
    for c in view.menu(p, r):
        if view.partner(c) >= floor:
            own = view.own(c)
            if best is None or own > best[0]:
                best = (own, c)
    return best


def best_proposal(
    view_or_inst, p: int, payoffs: List[Fraction], eps, exclude: Optional[int] = None
) -> ProposalSolution:
    """Solve the proposer's problem: max own payoff over responders and exit.

    Staying single yields the reservation payoff and is chosen only
    when strictly better than every responder option; responder ties
    break toward the lowest index, contract ties toward the lowest id.
    ``exclude`` removes one responder from consideration (used when
    computing a bidder's fallback).
    """
    view = view_or_inst if isinstance(view_or_inst, _View) else _View(view_or_inst, Side.MAN)
    eps = rat(eps)
    best = ProposalSolution(target=None, contract=None, objective=view.proposer_irp(p))
    for r in range(view.n_responders):
        if r == exclude:
            continue
        cand = _best_with(view, p, r, payoffs, eps)
        if cand is None:
            continue
        own, contract = cand
        if own > best.objective or (own == best.objective and best.target is None):
            best = ProposalSolution(target=r, contract=contract, objective=own)
    return best


def max_offer(view_or_inst, p: int, r: int, beta) -> Fraction:
    """Highest responder payoff p can concede while keeping own payoff >= beta.

    Returns the minus-infinity sentinel when no contract meets the
    fallback threshold (the bidder forfeits).
    """
    view = view_or_inst if isinstance(view_or_inst, _View) else _View(view_or_inst, Side.MAN)
    best = NEG_INF
    for c in view.menu(p, r):
        if view.own(c) >= beta and view.partner(c) > best:
            best = view.partner(c)
    return best


def settle_contract(view_or_inst, p: int, r: int, lam_loser) -> Contract:
    """Winner's contract: max own payoff with responder payoff >= loser's bid."""
    view = view_or_inst if isinstance(view_or_inst, _View) else _View(view_or_inst, Side.MAN)
    best: Optional[Tuple[Fraction, Contract]] = None
    for c in view.menu(p, r):
        if view.partner(c) >= lam_loser:
            own = view.own(c)
            if best is None or own > best[0]:
                best = (own, c)
    if best is None:
        raise MatchingError("no contract clears the losing bid; bidding invariant broken")
    return best[1]


@dataclass
class MarketState:
    """Trace and bookkeeping of one propose-dispose run."""

    proposing: Side
    iterations: int
    iteration_bound: int
    responder_payoffs: List[Fraction]
    trace: List[str]


def _responder_ceiling(view: _View, r: int) -> Fraction:
    top = view.responder_irp(r)
    for p in range(view.n_proposers):
        for c in view.menu(p, r):
            if view.partner(c) > top:
                top = view.partner(c)
    return top


def run_propose_dispose(
    inst: Instance, eps, proposing_side: Side = Side.MAN
) -> Tuple[MatchingProfile, MarketState]:
    """Compute a margin-eps externally stable profile by propose-dispose.

    eps must be positive; the margin is what guarantees termination
    (every accepted proposal raises a responder by at least eps).
    """
    eps = rat(eps)
    if eps <= 0:
        raise ValueError("the margin eps must be positive")
    view = _View(inst, proposing_side)
    payoffs = [view.responder_irp(r) for r in range(view.n_responders)]
    gaps = [_responder_ceiling(view, r) - payoffs[r] for r in range(view.n_responders)]
    bound = math.ceil(sum(gaps, Fraction(0)) / eps) + view.n_proposers
    queue: Deque[int] = deque(range(view.n_proposers))
    partner: Dict[int, int] = {}
    partner_rev: Dict[int, int] = {}
    contracts: Dict[int, Contract] = {}
    state = MarketState(
        proposing=proposing_side,
        iterations=0,
        iteration_bound=bound,
        responder_payoffs=payoffs,
        trace=[],
    )

    def log(event: str, **kv) -> None:
        parts = [f"event={event}", f"iter={state.iterations}"]
        parts += [f"{k}={v}" for k, v in kv.items()]
        state.trace.append(" ".join(parts))

    def responder_accepts(p: int, r: int, contract: Contract, event: str) -> None:
        old = payoffs[r]
        new = view.partner(contract)
        if new < old + eps:
            raise MatchingError("accepted proposal fails to raise the responder")
        partner[p] = r
        partner_rev[r] = p
        contracts[p] = contract
        payoffs[r] = new
        log(
            event,
            proposer=view.proposer_name(p),
            responder=view.responder_name(r),
            contract=contract.id,
            own=fmt(view.own(contract)),
            offer_old=fmt(old),
            offer_new=fmt(new),
        )

    singles = set()
    while queue:
        state.iterations += 1
        if state.iterations > bound:
            raise MatchingError(
                f"iteration bound {bound} exceeded; termination invariant broken"
            )
        p = queue.popleft()
        sol = best_proposal(view, p, payoffs, eps)
        if sol.target is None:
            singles.add(p)
            log("exit", proposer=view.proposer_name(p), own=fmt(sol.objective))
            continue
        r = sol.target
        log(
            "propose",
            proposer=view.proposer_name(p),
            responder=view.responder_name(r),
            contract=sol.contract.id,
            own=fmt(sol.objective),
            offer=fmt(view.partner(sol.contract)),
        )
        if r not in partner_rev:
            responder_accepts(p, r, sol.contract, "accept")
            continue
        q = partner_rev[r]
        # Does the incumbent still pick r once she must be raised by eps?
        re_solved = best_proposal(view, q, payoffs, eps)
        held = _best_with(view, q, r, payoffs, eps)
        if held is None or held[0] < re_solved.objective:
            del partner[q], contracts[q]
            responder_accepts(p, r, sol.contract, "auto_replace")
            queue.appendleft(q)
            log("requeue", proposer=view.proposer_name(q))
            continue
        beta_p = best_proposal(view, p, payoffs, eps, exclude=r).objective
        beta_q = best_proposal(view, q, payoffs, eps, exclude=r).objective
        lam_p = max_offer(view, p, r, beta_p)
        lam_q = max_offer(view, q, r, beta_q)
        log(
            "compete",
            proposer=view.proposer_name(p),
            incumbent=view.proposer_name(q),
            responder=view.responder_name(r),
            fallback_p=fmt(beta_p),
            fallback_inc=fmt(beta_q),
            bid_p=fmt(lam_p),
            bid_inc=fmt(lam_q),
        )
        if lam_p > lam_q:
            contract = settle_contract(view, p, r, lam_q)
            del partner[q], contracts[q]
            responder_accepts(p, r, contract, "replace")
            queue.appendleft(q)
            log("requeue", proposer=view.proposer_name(q))
        else:
            # Draws keep the incumbent, who re-settles at the losing bid.
            contract = settle_contract(view, q, r, lam_p)
            del partner[q], contracts[q]
            responder_accepts(q, r, contract, "resettle")
            queue.appendleft(p)
            log("reject", proposer=view.proposer_name(p))

    if proposing_side is Side.MAN:
        matches: List[Optional[int]] = [partner.get(p) for p in range(inst.n_men)]
        chosen = {(p, r): contracts[p] for p, r in partner.items()}
    else:
        matches = [None] * inst.n_men
        chosen = {}
        for p, r in partner.items():
            matches[r] = p
            chosen[(r, p)] = contracts[p]
    profile = MatchingProfile(tuple(matches), chosen)
    return profile, state


def run_with_vanishing_margin(
    inst: Instance,
    start_eps=1,
    max_halvings: int = 12,
    proposing_side: Side = Side.MAN,
):
    """Re-run propose-dispose with margins 1, 1/2, 1/4, ... until stable.

    Stops when two successive margins produce the same matching with
    the same contract ids, then reports that profile together with its
    exact zero-margin verdict.  A zero-margin run is not directly
    available (the margin drives termination), so the fixed point of
    halving is the constructive stand-in; the verdict tells the caller
    whether it actually reached exact stability.
    """
    start_eps = rat(start_eps)
    if start_eps <= 0:
        raise ValueError("start_eps must be positive")
    previous = None
    eps = start_eps
    for k in range(max_halvings + 1):
        eps = start_eps / (2**k)
        profile, _ = run_propose_dispose(inst, eps, proposing_side)
        if previous is not None:
            same_matching = previous.matches == profile.matches
            same_ids = same_matching and all(
                previous.chosen[key].id == profile.chosen[key].id for key in profile.chosen
            )
            if same_ids:
                break
        previous = profile
    report = find_blocking_pair(inst, profile, 0)
    return profile, eps, report
