"""Exact NUPBR decision on a finite filtered space.

On a finite space with finite horizon, NUPBR, NA and NFLVR coincide: the
model is arbitrage-free iff every one-step conditional law admits a strictly
positive density under which the increment has mean zero. Each
``(t, atom)`` is a small LP. Strict feasibility is decided by maximizing
the smallest density (max-min slack). When the optimum is zero, Stiemke's
alternative guarantees a position ``h`` with ``h . dX >= 0`` on the atom and
``> 0`` with positive probability. A second LP finds it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from gmpy2 import mpq

from . import lp
from .prob import Check, Filtration, ProbSpace
from .process import Process, VectorLike, components, is_martingale, predictable_integral

__all__ = [
    "Strategy",
    "NupbrVerdict",
    "nupbr_check",
    "deflator_from_densities",
    "predictable_fv_check",
    "verify_verdict",
]

ZERO = mpq(0)
ONE = mpq(1)


@dataclass(frozen=True)
class Strategy:
    """Predictable position ``H`` (one component per asset), nonzero on one ``(t, atom)``."""

    t: int
    atom: tuple[int, ...]
    h: tuple
    H: tuple[Process, ...]

    def gains(self, X: VectorLike) -> Process:
        return predictable_integral(self.H, X)

    def is_admissible(self, X: VectorLike, space: ProbSpace) -> bool:
        g = self.gains(X)
        return all(g[t][w] >= -1 for t in range(g.horizon + 1) for w in space.support)


@dataclass(frozen=True)
class NupbrVerdict:
    """Either one-step densities (when ``holds``) or an arbitrage ``witness``.

    ``densities[t][w]`` is the conditional density of step ``t`` at ``w``;
    row 0 is all ones. Null outcomes of an absolutely continuous measure get 1.
    """

    holds: bool
    densities: Process | None = None
    witness: Strategy | None = None

    def __bool__(self) -> bool:
        return self.holds


def _space_of(space) -> ProbSpace:
    return getattr(space, "space", space)


def _step_lp(weights: Sequence, jumps: Sequence[tuple]):
    """Max-min-slack LP for one atom; returns the densities or ``None``."""
    k, d = len(weights), len(jumps[0])
    A = [[ONE] + list(weights)]
    b = [ONE]
    for j in range(d):
        col = [wc * x[j] for wc, x in zip(weights, jumps)]
        A.append([sum(col, ZERO)] + col)
        b.append(ZERO)
    res = lp.solve([ONE] + [ZERO] * k, A, b)
    if res.status == lp.INFEASIBLE:
        # 0 lies outside the conditional convex hull of the jumps
        return None
    if res.status != lp.OPTIMAL:
        raise RuntimeError(f"max-min-slack LP ended {res.status}; the slack is bounded by 1")
    s = res.x[0]
    if s <= 0:
        return None
    return [s + r for r in res.x[1:]]


def _separating_vector(weights: Sequence, jumps: Sequence[tuple]) -> tuple:
    """Find ``h`` with ``h . x_C >= 0`` for all children and ``sum_C w_C h . x_C = 1``."""
    k, d = len(weights), len(jumps[0])
    # columns: h+ (d), h- (d), u (k)
    A, b = [], []
    for c, x in enumerate(jumps):
        u = [ZERO] * k
        u[c] = mpq(-1)
        A.append(list(x) + [-v for v in x] + u)
        b.append(ZERO)
    A.append([ZERO] * (2 * d) + list(weights))
    b.append(ONE)
    res = lp.solve([ZERO] * (2 * d + k), A, b)
    if res.status != lp.OPTIMAL:
        raise RuntimeError("no separating vector although no strictly positive density exists")
    return tuple(res.x[j] - res.x[d + j] for j in range(d))


def nupbr_check(X: VectorLike, filt: Filtration, space) -> NupbrVerdict:
    """Decide NUPBR of ``X`` for ``filt`` under ``space``.

    ``space`` may be absolutely continuous (or a ``DensityMeasure``); then the
    check runs on its support only. Stops at the first arbitrage found.
    """
    space = _space_of(space)
    comps = components(X)
    for c in comps:
        chk = c.is_adapted(filt)
        if not chk:
            raise ValueError(f"process is not adapted at t={chk.detail[0]}")
    n, T = space.n_outcomes, comps[0].horizon
    p = space.probs
    dens = [[ONE] * n for _ in range(T + 1)]
    for t in range(1, T + 1):
        incs = [c.increment(t) for c in comps]
        children = filt[t - 1].children(filt[t])
        for atom, kids in zip(filt[t - 1].blocks, children):
            mass = space.mass(atom)
            if not mass:
                continue
            kids = [C for C in kids if space.mass(C)]
            jumps = [tuple(inc[C[0]] for inc in incs) for C in kids]
            if not any(any(x) for x in jumps):
                continue
            weights = [space.mass(C) / mass for C in kids]
            q = _step_lp(weights, jumps)
            if q is None:
                h = _separating_vector(weights, jumps)
                H = []
                for j in range(len(comps)):
                    rows = [[ZERO] * n for _ in range(T + 1)]
                    for w in atom:
                        rows[t][w] = h[j]
                    H.append(Process(rows))
                return NupbrVerdict(False, witness=Strategy(t, atom, h, tuple(H)))
            for C, qc in zip(kids, q):
                for w in C:
                    if p[w]:
                        dens[t][w] = qc
    return NupbrVerdict(True, densities=Process(dens))


def deflator_from_densities(verdict: NupbrVerdict, X: VectorLike, filt: Filtration) -> tuple[Process, Process]:
    """Assemble ``Y = prod q`` and a predictable ``0 < theta <= 1`` scaling the jumps."""
    if not verdict.holds:
        raise ValueError("no deflator: the verdict carries an arbitrage witness")
    q = verdict.densities
    n, T = q.n_outcomes, q.horizon
    Y = [[ONE] * n]
    for t in range(1, T + 1):
        Y.append([a * b for a, b in zip(Y[-1], q[t])])
    comps = components(X)
    theta = [[ONE] * n]
    for t in range(1, T + 1):
        row = [ONE] * n
        incs = [c.increment(t) for c in comps]
        for atom in filt[t - 1].blocks:
            big = max(abs(inc[w]) for inc in incs for w in atom)
            for w in atom:
                row[w] = ONE / (1 + big)
        theta.append(row)
    return Process(Y), Process(theta)


def verify_verdict(verdict: NupbrVerdict, X: VectorLike, filt: Filtration, space) -> Check:
    """Re-check a certificate from scratch.

    Passing verdicts: ``Y > 0``, ``Y`` and ``Y (theta . X)`` are martingales.
    Failing verdicts: the witness starts from zero wealth, ends ``>= 0`` on the
    support and ``> 0`` with positive probability.
    """
    space = _space_of(space)
    comps = components(X)
    if verdict.holds:
        Y, theta = deflator_from_densities(verdict, X, filt)
        if any(Y[t][w] <= 0 for t in range(Y.horizon + 1) for w in space.support):
            return Check(False, ("deflator not positive",))
        if not is_martingale(Y, filt, space):
            return Check(False, ("deflator not a martingale",))
        for c in comps:
            gains = predictable_integral(theta, c)
            chk = is_martingale(Y * gains, filt, space)
            if not chk:
                return Check(False, ("deflated gains not a martingale",) + chk.detail)
        return Check(True)
    strat = verdict.witness
    for h in strat.H:
        if not h.is_predictable(filt):
            return Check(False, ("witness not predictable",))
    g = strat.gains(comps)
    final = g[g.horizon]
    if any(g[0][w] != 0 for w in range(g.n_outcomes)):
        return Check(False, ("nonzero initial wealth",))
    if any(final[w] < 0 for w in space.support):
        return Check(False, ("witness loses money",))
    if space.expectation(final) <= 0:
        return Check(False, ("witness has no positive gain",))
    return Check(True)


def predictable_fv_check(X: Process, filt: Filtration, space) -> Check:
    """NUPBR of a predictable process must coincide with it being constant."""
    chk = X.is_predictable(filt)
    if not chk:
        raise ValueError(f"process is not predictable at t={chk.detail[0]}")
    verdict = nupbr_check(X, filt, space)
    constant = X.is_constant()
    return Check(verdict.holds == constant, (verdict.holds, constant))
