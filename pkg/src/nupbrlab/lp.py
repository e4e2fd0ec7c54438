"""Exact two-phase simplex over the rationals with Bland's anti-cycling rule.

Solves ``max c.x  s.t.  A x = b, x >= 0``. Small dense tableaux only; the
decider builds one LP per (time, atom) with a handful of columns.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from gmpy2 import mpq

__all__ = ["LPResult", "solve", "INFEASIBLE", "UNBOUNDED", "OPTIMAL"]

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

ZERO = mpq(0)


@dataclass(frozen=True)
class LPResult:
    status: str
    x: tuple = ()
    value: mpq | None = None


def _pivot(tab: list[list], basis: list[int], r: int, j: int) -> None:
    row = tab[r]
    piv = row[j]
    if piv != 1:
        row[:] = [v / piv for v in row]
    for i, other in enumerate(tab):
        if i != r:
            f = other[j]
            if f:
                other[:] = [a - f * b for a, b in zip(other, row)]
    basis[r] = j


def _optimize(tab: list[list], basis: list[int], cost: Sequence, allowed: int) -> bool:
    """Run primal simplex on columns ``< allowed``. False if unbounded."""
    while True:
        cb = [cost[b] for b in basis]
        entering = -1
        for j in range(allowed):
            if j in basis:
                continue
            red = cost[j]
            for i, c in enumerate(cb):
                if c:
                    red -= c * tab[i][j]
            if red > 0:
                entering = j
                break
        if entering < 0:
            return True
        best = None
        for i, row in enumerate(tab):
            a = row[entering]
            if a > 0:
                ratio = row[-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return False
        _pivot(tab, basis, best[1], entering)


def solve(c: Sequence, A: Sequence[Sequence], b: Sequence) -> LPResult:
    """Maximize ``c.x`` subject to ``A x = b`` and ``x >= 0``, exactly."""
    m, n = len(A), len(c)
    tab: list[list] = []
    for i in range(m):
        row = [mpq(v) for v in A[i]]
        rhs = mpq(b[i])
        if rhs < 0:
            row = [-v for v in row]
            rhs = -rhs
        art = [ZERO] * m
        art[i] = mpq(1)
        tab.append(row + art + [rhs])
    basis = list(range(n, n + m))

    phase1 = [ZERO] * n + [mpq(-1)] * m
    _optimize(tab, basis, phase1, n + m)
    if sum((tab[i][-1] for i in range(m) if basis[i] >= n), ZERO) != 0:
        return LPResult(INFEASIBLE)

    # drive zero-level artificials out of the basis; drop redundant rows
    i = 0
    while i < len(tab):
        if basis[i] >= n:
            j = next((j for j in range(n) if tab[i][j] != 0), None)
            if j is None:
                del tab[i]
                del basis[i]
                continue
            _pivot(tab, basis, i, j)
        i += 1
    tab = [row[:n] + [row[-1]] for row in tab]

    cost = [mpq(v) for v in c]
    if not _optimize(tab, basis, cost, n):
        return LPResult(UNBOUNDED)
    x = [ZERO] * n
    for i, bj in enumerate(basis):
        x[bj] = tab[i][-1]
    value = sum((cj * xj for cj, xj in zip(cost, x)), ZERO)
    return LPResult(OPTIMAL, tuple(x), value)
