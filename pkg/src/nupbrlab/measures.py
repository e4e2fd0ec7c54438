"""Single-jump measure changes at a predictable time and the three-way checks built on them.

A predictable time ``T`` is stored outcome-wise; ``{T = t}`` must be known at
``t - 1``. Every density below is a ratio of quantities read at ``T(w)`` and
``T(w) - 1``, normalized per atom of ``F_{T-1}``; outcomes with ``T = inf``
get density 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from gmpy2 import mpq

from .prob import Filtration, ProbSpace, reweight, to_rational
from .process import Process, is_martingale, stop
from .randomtime import INF, Enlargement

__all__ = [
    "PredictableTime",
    "DensityMeasure",
    "qt",
    "qtilde",
    "qprime",
    "qtilde_prime",
    "qg_before",
    "qf_after",
    "qg_after",
    "single_jump",
    "PropReport",
    "verify_prop_before",
    "verify_prop_after",
]

ZERO = mpq(0)
ONE = mpq(1)


@dataclass(frozen=True)
class PredictableTime:
    """Outcome-wise time in ``{1, ..., horizon} U {inf}`` announced one step ahead."""

    values: tuple

    def __post_init__(self):
        vals = []
        for v in self.values:
            if v == INF or v is None:
                vals.append(INF)
            elif isinstance(v, int) and not isinstance(v, bool) and v >= 1:
                vals.append(v)
            else:
                raise ValueError(f"invalid predictable time value {v!r}")
        object.__setattr__(self, "values", tuple(vals))

    @classmethod
    def constant(cls, n: int, t) -> "PredictableTime":
        return cls((t,) * n)

    def __getitem__(self, w: int):
        return self.values[w]

    def validate(self, filt: Filtration) -> None:
        if len(self.values) != filt.n_outcomes:
            raise ValueError("predictable time and filtration disagree on the outcome count")
        for w, t in enumerate(self.values):
            if t != INF and t > filt.horizon:
                raise ValueError(f"T({w}) = {t} exceeds the horizon {filt.horizon}")
        for t in range(1, filt.horizon + 1):
            if not filt[t - 1].is_measurable([s == t for s in self.values]):
                raise ValueError(f"{{T = {t}}} is not known at time {t - 1}")


@dataclass(frozen=True)
class DensityMeasure:
    """``density`` (dQ/dP) over ``base``, with the formula that produced it in ``tag``."""

    tag: str
    base: ProbSpace
    density: tuple

    def __post_init__(self):
        d = tuple(to_rational(x) for x in self.density)
        object.__setattr__(self, "density", d)
        if any(x < 0 for x in d):
            raise ValueError(f"{self.tag}: negative density")
        total = self.base.expectation(d)
        if total != 1:
            raise ValueError(f"{self.tag}: density integrates to {total}")

    @property
    def support(self) -> frozenset[int]:
        return frozenset(w for w, x in enumerate(self.density) if x > 0 and self.base.probs[w] > 0)

    @cached_property
    def space(self) -> ProbSpace:
        return reweight(self.base, self.density)


def _cond(enl: Enlargement, t: int, values: Sequence) -> list:
    return enl.space.cond_exp(values, enl.F[t - 1])


def _per_time(enl: Enlargement, T: PredictableTime, step) -> tuple:
    """Fill ``density[w]`` from ``step(t)`` (a full row) for every ``w`` with ``T(w) = t``."""
    T.validate(enl.F)
    out = [ONE] * enl.n_outcomes
    for t in range(1, enl.horizon + 1):
        ws = [w for w in range(enl.n_outcomes) if T[w] == t]
        if ws:
            row = step(t)
            for w in ws:
                out[w] = row[w]
    return tuple(out)


def _prob_event(enl: Enlargement, t: int, pred) -> list:
    Zt = enl.azema.Ztilde[t]
    return _cond(enl, t, [ONE if pred(z) else ZERO for z in Zt])


def qtilde(enl: Enlargement, T: PredictableTime) -> DensityMeasure:
    """``Ztilde_T / Z_{T-1}`` on ``{Z_{T-1} > 0}``, 1 elsewhere."""
    Z, Zt = enl.azema.Z, enl.azema.Ztilde

    def step(t):
        return [Zt[t][w] / Z[t - 1][w] if Z[t - 1][w] > 0 else ONE for w in range(enl.n_outcomes)]

    return DensityMeasure("QtildeT", enl.space, _per_time(enl, T, step))


def qt(enl: Enlargement, T: PredictableTime) -> DensityMeasure:
    """``1{Ztilde_T > 0} / P(Ztilde_T > 0 | F_{T-1})`` where that probability is positive, else 1."""
    Zt = enl.azema.Ztilde

    def step(t):
        p = _prob_event(enl, t, lambda z: z > 0)
        return [(ONE / p[w] if Zt[t][w] > 0 else ZERO) if p[w] > 0 else ONE for w in range(enl.n_outcomes)]

    return DensityMeasure("QT", enl.space, _per_time(enl, T, step))


def qtilde_prime(enl: Enlargement, T: PredictableTime) -> DensityMeasure:
    """``(1 - Ztilde_T) / (1 - Z_{T-1})`` on ``{Z_{T-1} < 1}``, 1 elsewhere."""
    Z, Zt = enl.azema.Z, enl.azema.Ztilde

    def step(t):
        return [
            (1 - Zt[t][w]) / (1 - Z[t - 1][w]) if Z[t - 1][w] < 1 else ONE for w in range(enl.n_outcomes)
        ]

    return DensityMeasure("QtildeprimeT", enl.space, _per_time(enl, T, step))


def _less_one_density(enl: Enlargement, T: PredictableTime, tag: str) -> DensityMeasure:
    Zt = enl.azema.Ztilde

    def step(t):
        p = _prob_event(enl, t, lambda z: z < 1)
        return [(ONE / p[w] if Zt[t][w] < 1 else ZERO) if p[w] > 0 else ONE for w in range(enl.n_outcomes)]

    return DensityMeasure(tag, enl.space, _per_time(enl, T, step))


def qprime(enl: Enlargement, T: PredictableTime) -> DensityMeasure:
    """``1{Ztilde_T < 1} / P(Ztilde_T < 1 | F_{T-1})`` where that probability is positive, else 1."""
    return _less_one_density(enl, T, "QprimeT")


def qf_after(enl: Enlargement, T: PredictableTime) -> DensityMeasure:
    """Same density as :func:`qprime`; the F-side measure of the after-tau single-jump check."""
    _require_after(enl)
    return _less_one_density(enl, T, "QFafter")


def qg_before(enl: Enlargement, T: PredictableTime) -> DensityMeasure:
    """``U / E[U | G_{T-1}]`` with ``U = 1{T > tau} + 1{T <= tau} Z_{T-1} / Ztilde_T``."""
    Z, Zt = enl.azema.Z, enl.azema.Ztilde
    tau = enl.tau

    def step(t):
        U = [Z[t - 1][w] / Zt[t][w] if t <= tau[w] else ONE for w in range(enl.n_outcomes)]
        EU = enl.space.cond_exp(U, enl.G[t - 1])
        return [u / e for u, e in zip(U, EU)]

    return DensityMeasure("QGbefore", enl.space, _per_time(enl, T, step))


def qg_after(enl: Enlargement, T: PredictableTime) -> DensityMeasure:
    """``(1 - Z_{T-1}) / ((1 - Ztilde_T) P(Ztilde_T < 1 | F_{T-1}))`` on ``{T > tau}``, 1 on ``{T <= tau}``."""
    _require_after(enl)
    Z, Zt = enl.azema.Z, enl.azema.Ztilde
    tau = enl.tau

    def step(t):
        p = _prob_event(enl, t, lambda z: z < 1)
        return [
            (1 - Z[t - 1][w]) / ((1 - Zt[t][w]) * p[w]) if t > tau[w] else ONE for w in range(enl.n_outcomes)
        ]

    return DensityMeasure("QGafter", enl.space, _per_time(enl, T, step))


def _require_after(enl: Enlargement) -> None:
    honest = enl.honest
    if not honest:
        raise ValueError(f"tau is not honest (t, atom) = {honest.detail}")
    Z = enl.azema.Z
    bad = [w for w, s in enumerate(enl.tau.values) if s != INF and Z[s][w] >= 1]
    if bad:
        raise ValueError(f"Z_tau < 1 fails on outcomes {bad}")


def single_jump(T: PredictableTime, xi: Sequence, horizon: int) -> Process:
    """``xi 1_{[T, inf)}``: zero before ``T(w)``, ``xi(w)`` from ``T(w)`` on."""
    xi = [to_rational(x) for x in xi]
    rows = []
    for t in range(horizon + 1):
        rows.append(tuple(xi[w] if t >= s else ZERO for w, s in enumerate(T.values)))
    return Process(rows)


@dataclass(frozen=True)
class PropReport:
    """Truth values of the three equivalent assertions; truthy iff they agree."""

    a: bool
    b: bool
    c: bool

    @property
    def agree(self) -> bool:
        return self.a == self.b == self.c

    def __bool__(self) -> bool:
        return self.agree

    def as_tuple(self) -> tuple[bool, bool, bool]:
        return (self.a, self.b, self.c)


def _zero_given_prev(enl: Enlargement, T: PredictableTime, values: Sequence, mask) -> bool:
    """``E[values 1{mask} | F_{T-1}] = 0`` on every outcome with finite ``T`` passing ``mask``'s guard."""
    for t in range(1, enl.horizon + 1):
        ws = [w for w in range(enl.n_outcomes) if T[w] == t]
        if not ws:
            continue
        row, guard = mask(t)
        proj = _cond(enl, t, [v if r else ZERO for v, r in zip(values, row)])
        if any(proj[w] != 0 for w in ws if guard[w]):
            return False
    return True


def _check_xi(enl: Enlargement, T: PredictableTime, xi: Sequence) -> list:
    T.validate(enl.F)
    xi = [to_rational(x) for x in xi]
    if len(xi) != enl.n_outcomes:
        raise ValueError("xi has the wrong length")
    for t in range(1, enl.horizon + 1):
        vals = [xi[w] if T[w] == t else ZERO for w in range(enl.n_outcomes)]
        if not enl.F[t].is_measurable(vals):
            raise ValueError(f"xi is not known at T on {{T = {t}}}")
    return xi


def verify_prop_before(enl: Enlargement, T: PredictableTime, xi: Sequence) -> PropReport:
    """(a) ``xi 1_{[T, inf)}`` is an F-martingale under ``Q_T``;
    (b) ``E[xi 1{Ztilde_T = 0} | F_{T-1}] = 0``;
    (c) its stopped version is a G-martingale under ``Q^G_T``.
    """
    xi = _check_xi(enl, T, xi)
    M = single_jump(T, xi, enl.horizon)
    chk = is_martingale(M, enl.F, enl.space)
    if not chk:
        raise ValueError(f"xi 1_[T,inf) is not an F-martingale: {chk.detail}")
    Zt = enl.azema.Ztilde
    a = bool(is_martingale(M, enl.F, qt(enl, T).space))
    b = _zero_given_prev(enl, T, xi, lambda t: ([z == 0 for z in Zt[t]], [True] * enl.n_outcomes))
    c = bool(is_martingale(stop(M, enl.tau), enl.G, qg_before(enl, T).space))
    return PropReport(a, b, c)


def verify_prop_after(enl: Enlargement, T: PredictableTime, xi: Sequence) -> PropReport:
    """(a) ``M = xi 1{Z_{T-1} < 1} 1_{[T, inf)}`` is an F-martingale under ``Q^F_T``;
    (b) ``E[xi 1{Ztilde_T < 1} | F_{T-1}] = 0`` on ``{Z_{T-1} < 1}``;
    (c) ``M - M^tau`` is a G-martingale under ``Q^G_T``.
    """
    xi = _check_xi(enl, T, xi)
    _require_after(enl)
    Z, Zt = enl.azema.Z, enl.azema.Ztilde
    cut = list(xi)
    for w, s in enumerate(T.values):
        if s != INF and Z[s - 1][w] >= 1:
            cut[w] = ZERO
    M = single_jump(T, cut, enl.horizon)
    a = bool(is_martingale(M, enl.F, qf_after(enl, T).space))
    b = _zero_given_prev(
        enl, T, xi, lambda t: ([z < 1 for z in Zt[t]], [z < 1 for z in Z[t - 1]])
    )
    c = bool(is_martingale(M - stop(M, enl.tau), enl.G, qg_after(enl, T).space))
    return PropReport(a, b, c)
