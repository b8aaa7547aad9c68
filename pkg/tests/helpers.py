"""Shared test utilities: independent oracles and random generators.

The zero-sum value oracle here deliberately avoids the library's
simplex; it enumerates square kernels and certifies the candidate
value against the full matrix, so a returned value is provably correct
regardless of how it was found.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import List, Sequence, Tuple

import sympy

from matchgames import (
    BimatrixGame,
    Instance,
    PotentialGame,
    RepeatedGame,
    ZeroSumGame,
    build_instance,
)


def support_value(matrix: Sequence[Sequence[Fraction]]) -> Fraction:
    """Exact zero-sum value by square-kernel enumeration.

    For each square submatrix B, the candidate mixed strategies are the
    adjugate row/column sums over their total and the candidate value
    det(B)/total.  A candidate passing the optimality check against
    every pure row and column certifies the value exactly.
    """
    m, n = len(matrix), len(matrix[0])
    A = [[Fraction(x) for x in row] for row in matrix]
    for k in range(1, min(m, n) + 1):
        for rows in itertools.combinations(range(m), k):
            for cols in itertools.combinations(range(n), k):
                B = sympy.Matrix([[A[r][c] for c in cols] for r in rows])
                adj = B.adjugate()
                total = sum(adj[r, c] for r in range(k) for c in range(k))
                if total == 0:
                    continue
                v = Fraction(sympy.Rational(B.det() / total))
                x = [Fraction(sympy.Rational(sum(adj[r, c] for r in range(k)) / total)) for c in range(k)]
                y = [Fraction(sympy.Rational(sum(adj[r, c] for c in range(k)) / total)) for r in range(k)]
                # adjugate column sums weight the rows, row sums the columns
                if any(w < 0 for w in x) or any(w < 0 for w in y):
                    continue
                row_mix = {rows[t]: x[t] for t in range(k)}
                col_mix = {cols[t]: y[t] for t in range(k)}
                if any(
                    sum(row_mix[r] * A[r][c] for r in row_mix) < v for c in range(n)
                ):
                    continue
                if any(
                    sum(col_mix[c] * A[r][c] for c in col_mix) > v for r in range(m)
                ):
                    continue
                return v
    raise AssertionError("no kernel certified a value; oracle bug")


def frac(lo: int, hi: int, rng: random.Random, halves: bool = True) -> Fraction:
    """Random rational in [lo, hi] with denominator 1 or 2."""
    if halves and rng.random() < 0.5:
        return Fraction(rng.randint(2 * lo, 2 * hi), 2)
    return Fraction(rng.randint(lo, hi))


def random_bimatrix_instance(
    rng: random.Random,
    max_agents: int = 4,
    max_cells: int = 9,
    lo: int = -10,
    hi: int = 10,
) -> Instance:
    """Random all-bimatrix instance with menus of at most max_cells cells."""
    n_men = rng.randint(1, max_agents)
    n_women = rng.randint(1, max_agents)
    shapes = [(r, c) for r in range(1, 10) for c in range(1, 10) if r * c <= max_cells]
    games = {}
    for i in range(n_men):
        for j in range(n_women):
            rows, cols = rng.choice(shapes)
            U = [[frac(lo, hi, rng) for _ in range(cols)] for _ in range(rows)]
            V = [[frac(lo, hi, rng) for _ in range(cols)] for _ in range(rows)]
            games[(i, j)] = BimatrixGame(U, V)
    irp_men = [Fraction(rng.randint(-6, 2)) for _ in range(n_men)]
    irp_women = [Fraction(rng.randint(-6, 2)) for _ in range(n_women)]
    men = [f"m{i}" for i in range(n_men)]
    women = [f"w{j}" for j in range(n_women)]
    return build_instance(men, women, irp_men, irp_women, games)


def random_potential_game(rng: random.Random, max_dim: int = 3) -> PotentialGame:
    """Random exact-potential game: U = phi + column offset, V = phi + row offset."""
    rows = rng.randint(1, max_dim)
    cols = rng.randint(1, max_dim)
    phi = [[frac(-5, 5, rng) for _ in range(cols)] for _ in range(rows)]
    col_off = [frac(-3, 3, rng) for _ in range(cols)]
    row_off = [frac(-3, 3, rng) for _ in range(rows)]
    U = [[phi[r][c] + col_off[c] for c in range(cols)] for r in range(rows)]
    V = [[phi[r][c] + row_off[r] for c in range(cols)] for r in range(rows)]
    return PotentialGame(U, V, phi)


def random_zero_sum_game(rng: random.Random, resolution, max_dim: int = 3) -> ZeroSumGame:
    rows = rng.randint(1, max_dim)
    cols = rng.randint(1, max_dim)
    g = [[frac(-5, 5, rng) for _ in range(cols)] for _ in range(rows)]
    return ZeroSumGame(g, resolution)


def random_repeated_game(rng: random.Random, resolution) -> RepeatedGame:
    U = [[frac(-4, 4, rng, halves=False) for _ in range(2)] for _ in range(2)]
    V = [[frac(-4, 4, rng, halves=False) for _ in range(2)] for _ in range(2)]
    return RepeatedGame(U, V, resolution)


def random_class_instance(rng: random.Random, kind: str, eps: Fraction) -> Instance:
    """Random instance whose games all belong to one class."""
    n_men = rng.randint(1, 3)
    n_women = rng.randint(1, 3)
    res = eps / 2
    games = {}
    for i in range(n_men):
        for j in range(n_women):
            if kind == "zero_sum":
                games[(i, j)] = random_zero_sum_game(rng, res)
            elif kind == "potential":
                games[(i, j)] = random_potential_game(rng)
            elif kind == "repeated":
                games[(i, j)] = random_repeated_game(rng, res)
            else:
                raise ValueError(kind)
    irp_men = [Fraction(rng.randint(-8, -3)) for _ in range(n_men)]
    irp_women = [Fraction(rng.randint(-8, -3)) for _ in range(n_women)]
    men = [f"m{i}" for i in range(n_men)]
    women = [f"w{j}" for j in range(n_women)]
    return build_instance(men, women, irp_men, irp_women, games)


def random_ordinal_prefs(
    rng: random.Random, n: int
) -> Tuple[dict, dict]:
    men = [f"m{i}" for i in range(n)]
    women = [f"w{j}" for j in range(n)]
    prefs_men = {}
    for m in men:
        order = women[:]
        rng.shuffle(order)
        prefs_men[m] = order
    prefs_women = {}
    for w in women:
        order = men[:]
        rng.shuffle(order)
        prefs_women[w] = order
    return prefs_men, prefs_women


def textbook_stable(prefs_men: dict, prefs_women: dict) -> List[dict]:
    """All stable matchings of an ordinal market by direct enumeration.

    Textbook notion: complete lists, being matched beats being single,
    a pair blocks when both strictly prefer each other to their current
    situation.  Returns a list of {man: woman} maps (singles omitted).
    """
    men = list(prefs_men)
    women = list(prefs_women)

    def rank(prefs, who, other):
        return prefs[who].index(other)

    out = []
    n = len(men)
    for perm in itertools.permutations(range(n)):
        match = {men[i]: women[perm[i]] for i in range(n)}
        inv = {w: m for m, w in match.items()}
        good = True
        for m in men:
            for w in women:
                if match[m] == w:
                    continue
                if rank(prefs_men, m, w) < rank(prefs_men, m, match[m]) and rank(
                    prefs_women, w, m
                ) < rank(prefs_women, w, inv[w]):
                    good = False
                    break
            if not good:
                break
        if good:
            out.append(match)
    return out


def gale_shapley(prefs_men: dict, prefs_women: dict) -> dict:
    """Classic men-proposing deferred acceptance; returns {man: woman}."""
    free = list(prefs_men)
    nxt = {m: 0 for m in prefs_men}
    engaged: dict = {}
    while free:
        m = free.pop(0)
        w = prefs_men[m][nxt[m]]
        nxt[m] += 1
        if w not in engaged:
            engaged[w] = m
        else:
            cur = engaged[w]
            if prefs_women[w].index(m) < prefs_women[w].index(cur):
                engaged[w] = m
                free.append(cur)
            else:
                free.append(m)
    return {m: w for w, m in engaged.items()}
