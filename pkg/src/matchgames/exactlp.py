"""Exact value of a finite zero-sum matrix game.

Solved as a linear program over Fractions with a dense-tableau simplex
(Bland's rule, so no cycling).  scipy's LP solvers are float-only and
would break the exactness contract, hence the in-house routine.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .rational import rat


def _simplex_max(c, A, b):
    """Maximize c.x subject to A x <= b, x >= 0, with b >= 0 componentwise.

    Returns (optimal value, x).  All arithmetic exact.  Bland's rule for
    both the entering and leaving choices.
    """
    m = len(A)
    n = len(c)
    # tableau rows 0..m-1 constraints, row m objective; cols: n vars, m slacks, rhs
    width = n + m + 1
    T = []
    for i in range(m):
        row = [Fraction(0)] * width
        for j in range(n):
            row[j] = A[i][j]
        row[n + i] = Fraction(1)
        row[-1] = b[i]
        T.append(row)
    obj = [Fraction(0)] * width
    for j in range(n):
        obj[j] = -c[j]
    T.append(obj)
    basis = [n + i for i in range(m)]

    while True:
        enter = next((j for j in range(n + m) if T[m][j] < 0), None)
        if enter is None:
            break
        leave = None
        best = None
        for i in range(m):
            if T[i][enter] > 0:
                ratio = T[i][-1] / T[i][enter]
                if best is None or ratio < best or (
                    ratio == best and basis[i] < basis[leave]
                ):
                    best = ratio
                    leave = i
        if leave is None:
            raise ArithmeticError("unbounded LP; matrix game LPs are bounded")
        piv = T[leave][enter]
        T[leave] = [v / piv for v in T[leave]]
        for r in range(m + 1):
            if r != leave and T[r][enter] != 0:
                f = T[r][enter]
                T[r] = [a - f * b_ for a, b_ in zip(T[r], T[leave])]
        basis[leave] = enter

    x = [Fraction(0)] * n
    for i, bv in enumerate(basis):
        if bv < n:
            x[bv] = T[i][-1]
    return T[m][-1], x


def matrix_game_value(matrix: Sequence[Sequence]) -> Fraction:
    """Exact value of the zero-sum game with the row player maximizing.

    Standard reciprocal transformation: shift all entries positive, then
    the column player's LP  max sum(q) s.t. A q <= 1, q >= 0  has optimum
    1/value of the shifted game.
    """
    A = [[rat(v) for v in row] for row in matrix]
    if not A or not A[0]:
        raise ValueError("matrix must be nonempty")
    n_cols = len(A[0])
    if any(len(row) != n_cols for row in A):
        raise ValueError("ragged matrix")

    shift = Fraction(1) - min(min(row) for row in A)
    shifted = [[v + shift for v in row] for row in A]

    c = [Fraction(1)] * n_cols
    b = [Fraction(1)] * len(shifted)
    total, _q = _simplex_max(c, shifted, b)
    if total <= 0:
        raise ArithmeticError("degenerate matrix game LP")
    return Fraction(1) / total - shift
