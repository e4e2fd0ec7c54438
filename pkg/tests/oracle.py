"""Brute-force reference computations for the tests.

Everything here is written from the definitions with ``fractions.Fraction``
and plain loops, sharing no code with the package, so agreement is evidence
rather than tautology.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

INF = float("inf")


def frac(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator)) if hasattr(x, "numerator") else Fraction(x)


def block_of(partition, w):
    for b in partition:
        if w in b:
            return b
    raise KeyError(w)


def cond_exp(p, values, partition):
    out = [None] * len(p)
    for b in partition:
        mass = sum(p[w] for w in b)
        if mass:
            v = sum(p[w] * values[w] for w in b) / mass
            for w in b:
                out[w] = v
    return out


def azema(p, parts, tau):
    """``Z``, ``Ztilde`` and ``m`` from the definitions, one outcome at a time."""
    n, T = len(p), len(parts) - 1
    Z = [[None] * n for _ in range(T + 1)]
    Zt = [[None] * n for _ in range(T + 1)]
    D = [[None] * n for _ in range(T + 1)]
    for t in range(T + 1):
        for w in range(n):
            b = block_of(parts[t], w)
            mass = sum(p[v] for v in b)
            Z[t][w] = sum(p[v] for v in b if tau[v] > t) / mass
            Zt[t][w] = sum(p[v] for v in b if tau[v] >= t) / mass
            D[t][w] = sum(
                sum(p[v] for v in block_of(parts[s], w) if tau[v] == s) / sum(p[v] for v in block_of(parts[s], w))
                for s in range(t + 1)
            )
    m = [[Z[t][w] + D[t][w] for w in range(n)] for t in range(T + 1)]
    return Z, Zt, m


def g_partition(parts, tau, t):
    """Atoms of the enlarged sigma-field at ``t`` as a set of frozensets."""
    groups = {}
    for bi, b in enumerate(parts[t]):
        for w in b:
            key = (bi, tau[w] if tau[w] <= t else "later")
            groups.setdefault(key, set()).add(w)
    return {frozenset(g) for g in groups.values()}


def honest(parts, tau):
    for t, part in enumerate(parts):
        for b in part:
            if len({tau[w] for w in b if tau[w] <= t}) > 1:
                return False
    return True


def is_martingale(p, parts, X):
    T = len(X) - 1
    for t in range(1, T + 1):
        for b in parts[t - 1]:
            mass = sum(p[w] for w in b)
            if not mass:
                continue
            mean = sum(p[w] * X[t][w] for w in b) / mass
            if any(p[w] and X[t - 1][w] != mean for w in b):
                return False
    return True


def nupbr_1d(p, parts, X):
    """One asset: every charged atom either has all jumps zero or jumps of both signs."""
    T = len(X) - 1
    for t in range(1, T + 1):
        for b in parts[t - 1]:
            jumps = {X[t][w] - X[t - 1][w] for w in b if p[w]}
            if not jumps or jumps == {0}:
                continue
            if not (min(jumps) < 0 < max(jumps)):
                return False
    return True


def lp_bruteforce(c, A, b):
    """Maximize ``c.x`` over ``A x = b, x >= 0`` by enumerating basic solutions.

    Returns ``("infeasible", None)``, ``("unbounded", None)`` or ``("optimal", value)``.
    Unboundedness is detected by a feasible basic solution plus a nonnegative
    direction in the kernel with positive cost, found by enumerating extreme rays.
    """
    m, n = len(A), len(c)
    A = [[Fraction(v) for v in row] for row in A]
    b = [Fraction(v) for v in b]
    c = [Fraction(v) for v in c]
    best = None
    for cols in _subsets(n, m):
        x = _solve_cols(A, b, cols, n)
        if x is not None and all(v >= 0 for v in x):
            val = sum(ci * xi for ci, xi in zip(c, x))
            best = val if best is None or val > best else best
    if best is None:
        return ("infeasible", None)
    # extreme rays of {d >= 0, A d = 0, sum d = 1}
    Ar = A + [[Fraction(1)] * n]
    br = [Fraction(0)] * m + [Fraction(1)]
    for cols in _subsets(n, m + 1):
        d = _solve_cols(Ar, br, cols, n)
        if d is not None and all(v >= 0 for v in d) and sum(ci * di for ci, di in zip(c, d)) > 0:
            return ("unbounded", None)
    return ("optimal", best)


def _subsets(n, k):
    """Column sets of every size up to ``k``; rank-deficient systems need the smaller ones."""
    for size in range(min(k, n) + 1):
        yield from itertools.combinations(range(n), size)


def _solve_cols(A, b, cols, n):
    """Solve ``A x = b`` with ``x`` supported on ``cols`` (Gaussian elimination); None if no unique fit."""
    m = len(A)
    k = len(cols)
    M = [[A[i][j] for j in cols] + [b[i]] for i in range(m)]
    row = 0
    piv = []
    for j in range(k):
        r = next((i for i in range(row, m) if M[i][j] != 0), None)
        if r is None:
            return None
        M[row], M[r] = M[r], M[row]
        pv = M[row][j]
        M[row] = [v / pv for v in M[row]]
        for i in range(m):
            if i != row and M[i][j] != 0:
                f = M[i][j]
                M[i] = [a - f * c for a, c in zip(M[i], M[row])]
        piv.append(j)
        row += 1
    if any(M[i][-1] != 0 for i in range(row, m)):
        return None
    x = [Fraction(0)] * n
    for i, j in enumerate(piv):
        x[cols[j]] = M[i][-1]
    return x


def _no_arbitrage_step(jumps):
    """``jumps``: 2-vectors of one atom's charged children.

    A one-step arbitrage is a direction ``h`` with ``h.x >= 0`` for every jump
    and ``> 0`` for one. In the plane such a cone is generated by the jumps
    themselves and their perpendiculars, so trying those suffices.
    """
    cands = []
    for x, y in jumps:
        cands += [(x, y), (-x, -y), (-y, x), (y, -x)]
    for h in cands:
        dots = [h[0] * x + h[1] * y for x, y in jumps]
        if min(dots) >= 0 and max(dots) > 0:
            return False
    return True


def nupbr_2d(p, parts, X1, X2):
    T = len(X1) - 1
    for t in range(1, T + 1):
        for b in parts[t - 1]:
            jumps = [(X1[t][w] - X1[t - 1][w], X2[t][w] - X2[t - 1][w]) for w in b if p[w]]
            if not _no_arbitrage_step(jumps):
                return False
    return True
