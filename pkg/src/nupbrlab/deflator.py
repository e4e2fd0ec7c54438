"""Explicit G-deflators built from F-data: one for the stopped model, one after tau.

Both are stochastic exponentials of compensated (optional) integrals against
the G-martingale part of ``m``. They are assembled with the generic operations
of :mod:`nupbrlab.process`. Their one-step ratios are then checked against
closed forms in :func:`jump_ratio_identities`.
"""

from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq

from .prob import Check, conditional_probability
from .process import (
    Process,
    after,
    angle_bracket,
    is_martingale,
    optional_integral,
    stochastic_exponential,
    stop,
)
from .randomtime import Enlargement, z_tau_less_one

__all__ = [
    "DeflatorError",
    "BeforeTauDeflator",
    "AfterTauDeflator",
    "DeflationCheck",
    "build_before",
    "build_after",
    "condition_before",
    "condition_after",
    "verify_deflation_before",
    "verify_deflation_after",
    "JumpRatioReport",
    "jump_ratio_identities",
]

ZERO = mpq(0)
ONE = mpq(1)


class DeflatorError(RuntimeError):
    """Construction broke a property the theory guarantees (positivity, martingality)."""


@dataclass(frozen=True)
class BeforeTauDeflator:
    """``KG`` (optional integrand), ``VG``, ``m_hat`` and the deflator ``Ltilde_b``.

    ``KG`` is defined on ``{0 < t <= tau}`` and set to 0 elsewhere; ``m_hat``
    starts at 0.
    """

    KG: Process
    VG: Process
    m_hat: Process
    Ltilde_b: Process


@dataclass(frozen=True)
class AfterTauDeflator:
    Ka: Process
    WG: Process
    m_hat_a: Process
    Ltilde_a: Process


def _prob_given_prev(enl: Enlargement, t: int, pred) -> list:
    """``P(pred(Ztilde_t) | F_{t-1})`` outcome-wise."""
    Zt = enl.azema.Ztilde[t]
    event = [w for w in range(enl.n_outcomes) if pred(Zt[w])]
    return conditional_probability(event, enl.F[t - 1], enl.space)


def _finish(enl: Enlargement, N: Process, label: str) -> Process:
    exp = stochastic_exponential(N)
    if not exp.positive:
        t, w = exp.nonpositive[0]
        raise DeflatorError(f"{label}: 1 + dN <= 0 at t={t}, outcome {w}")
    L = exp.process
    chk = is_martingale(L, enl.G, enl.space)
    if not chk:
        raise DeflatorError(f"{label} is not a G-martingale: {chk.detail}")
    return L


def build_before(enl: Enlargement) -> BeforeTauDeflator:
    """Deflator for the model stopped at ``tau``.

    ``KG_t = Z_{t-1}^2 / Ztilde_t / (Z_{t-1}^2 + d<m>_t)`` on ``{t <= tau}``,
    ``dVG_t = P(Ztilde_t = 0 | F_{t-1})`` there, ``m_hat = m^tau - sum Z_{t-1}^{-1} d<m>``,
    and ``Ltilde_b = E(-(KG / (1 - dVG)) o m_hat)`` with the optional integral taken in G.
    """
    az, n, T = enl.azema, enl.n_outcomes, enl.horizon
    Z, Zt, m = az.Z, az.Ztilde, az.m
    ang = angle_bracket(m, m, enl.F, enl.space)
    K = [[ZERO] * n]
    V = [[ZERO] * n]
    mh = [[ZERO] * n]
    integrand = [[ZERO] * n]
    for t in range(1, T + 1):
        before = enl.before(t)
        dang = ang.increment(t)
        dm = m.increment(t)
        p0 = _prob_given_prev(enl, t, lambda z: z == 0)
        krow, vrow, mrow, irow = [], [], [], []
        for w in range(n):
            if before[w]:
                z2 = Z[t - 1][w] ** 2
                k = z2 / Zt[t][w] / (z2 + dang[w])
                dv = p0[w]
                if dv >= 1:
                    raise DeflatorError(f"dVG = {dv} >= 1 at t={t}, outcome {w}")
                krow.append(k)
                vrow.append(V[-1][w] + dv)
                mrow.append(mh[-1][w] + dm[w] - dang[w] / Z[t - 1][w])
                irow.append(-k / (1 - dv))
            else:
                krow.append(ZERO)
                vrow.append(V[-1][w])
                mrow.append(mh[-1][w])
                irow.append(ZERO)
        K.append(krow)
        V.append(vrow)
        mh.append(mrow)
        integrand.append(irow)
    m_hat = Process(mh)
    N = optional_integral(Process(integrand), m_hat, enl.G, enl.space)
    L = _finish(enl, N, "Ltilde_b")
    return BeforeTauDeflator(Process(K), Process(V), m_hat, L)


def build_after(enl: Enlargement) -> AfterTauDeflator:
    """Deflator for the part after an honest ``tau`` with ``Z_tau < 1``.

    ``Ka_t = (1-Z_{t-1})^2 / (1-Ztilde_t) / ((1-Z_{t-1})^2 + d<m>_t)`` on ``{t > tau}``,
    ``dWG_t = P(Ztilde_t = 1 | F_{t-1})`` there,
    ``m_hat_a = m - m^tau + sum (1-Z_{t-1})^{-1} d<m>``,
    ``Ltilde_a = E(Ka (1 - dWG)^{-1} o m_hat_a)``.
    """
    honest = enl.honest
    if not honest:
        t, atom = honest.detail
        raise ValueError(f"tau is not honest: not constant on atom {atom} & {{tau <= {t}}}")
    if not z_tau_less_one(enl.tau, enl.azema):
        raise ValueError("Z_tau < 1 fails")
    az, n, T = enl.azema, enl.n_outcomes, enl.horizon
    Z, Zt, m = az.Z, az.Ztilde, az.m
    ang = angle_bracket(m, m, enl.F, enl.space)
    K = [[ZERO] * n]
    W = [[ZERO] * n]
    integrand = [[ZERO] * n]
    comp = [[ZERO] * n]
    for t in range(1, T + 1):
        aft = enl.after(t)
        dang = ang.increment(t)
        p1 = _prob_given_prev(enl, t, lambda z: z == 1)
        krow, wrow, irow, crow = [], [], [], []
        for w in range(n):
            if aft[w]:
                y2 = (1 - Z[t - 1][w]) ** 2
                k = y2 / (1 - Zt[t][w]) / (y2 + dang[w])
                dw = p1[w]
                if dw >= 1:
                    raise DeflatorError(f"dWG = {dw} >= 1 at t={t}, outcome {w}")
                krow.append(k)
                wrow.append(W[-1][w] + dw)
                irow.append(k / (1 - dw))
                crow.append(comp[-1][w] + dang[w] / (1 - Z[t - 1][w]))
            else:
                krow.append(ZERO)
                wrow.append(W[-1][w])
                irow.append(ZERO)
                crow.append(comp[-1][w])
        K.append(krow)
        W.append(wrow)
        integrand.append(irow)
        comp.append(crow)
    m_hat_a = after(m, enl.tau) + Process(comp)
    N = optional_integral(Process(integrand), m_hat_a, enl.G, enl.space)
    L = _finish(enl, N, "Ltilde_a")
    return AfterTauDeflator(Process(K), Process(W), m_hat_a, L)


def _condition(enl: Enlargement, M: Process, zt_value, z_pred) -> Check:
    Z, Zt = enl.azema.Z, enl.azema.Ztilde
    for t in range(1, enl.horizon + 1):
        dM = M.increment(t)
        ind = [dM[w] if (Zt[t][w] == zt_value and z_pred(Z[t - 1][w])) else ZERO for w in range(enl.n_outcomes)]
        proj = enl.space.cond_exp(ind, enl.F[t - 1])
        for w, v in enumerate(proj):
            if v:
                return Check(False, (t, enl.F[t - 1].block_of(w), v))
    return Check(True)


def condition_before(enl: Enlargement, M: Process) -> Check:
    """``^{p,F}(dM 1{Ztilde = 0 < Z_-}) = 0`` at every grid time."""
    return _condition(enl, M, 0, lambda z: z > 0)


def condition_after(enl: Enlargement, M: Process) -> Check:
    """``^{p,F}(dM 1{Ztilde = 1 > Z_-}) = 0`` at every grid time."""
    return _condition(enl, M, 1, lambda z: z < 1)


@dataclass(frozen=True)
class DeflationCheck:
    """``deflated``: the product is a G-martingale. Truthy iff ``deflated``.

    ``consistent`` is the theorem's claim: condition implies deflated.
    """

    condition: bool
    deflated: bool

    @property
    def consistent(self) -> bool:
        return self.deflated or not self.condition

    def __bool__(self) -> bool:
        return self.deflated


def _require_martingale(enl: Enlargement, M: Process) -> None:
    chk = is_martingale(M, enl.F, enl.space)
    if not chk:
        raise ValueError(f"M is not an F-martingale: {chk.detail}")


def verify_deflation_before(M: Process, defl: BeforeTauDeflator, enl: Enlargement) -> DeflationCheck:
    _require_martingale(enl, M)
    cond = bool(condition_before(enl, M))
    prod = defl.Ltilde_b * stop(M, enl.tau)
    return DeflationCheck(cond, bool(is_martingale(prod, enl.G, enl.space)))


def verify_deflation_after(M: Process, defl: AfterTauDeflator, enl: Enlargement) -> DeflationCheck:
    _require_martingale(enl, M)
    cond = bool(condition_after(enl, M))
    prod = defl.Ltilde_a * after(M, enl.tau)
    return DeflationCheck(cond, bool(is_martingale(prod, enl.G, enl.space)))


@dataclass(frozen=True)
class JumpRatioReport:
    """Mismatches of the two jump-ratio identities, as ``(t, outcome)`` lists.

    ``open_interval_gaps`` lists points ``t = tau`` where a deflator frozen
    from ``tau`` on (integrand supported on ``{t < tau}`` only) would break
    the identity, i.e. where ``Z_{t-1} / Ztilde_t != 1 - dVG_t``. The identity
    is checked on the closed set ``{t <= tau}``.
    """

    before_mismatches: tuple
    after_mismatches: tuple
    open_interval_gaps: tuple

    def __bool__(self) -> bool:
        return not self.before_mismatches and not self.after_mismatches


def jump_ratio_identities(
    defl_b: BeforeTauDeflator, defl_a: AfterTauDeflator | None, enl: Enlargement
) -> JumpRatioReport:
    """Check ``Z_{t-1}/Ztilde_t = (1 - dVG_t) Lb_t / Lb_{t-1}`` on ``{t <= tau}`` and
    ``D^G(t) = La_t / La_{t-1}`` everywhere, where ``D^G(t)`` is the single-jump
    after-tau density ``(1-Z_{t-1}) / ((1-Ztilde_t) P(Ztilde_t < 1 | F_{t-1}))`` on
    ``{t > tau}`` and 1 on ``{t <= tau}``.
    """
    az, n = enl.azema, enl.n_outcomes
    Z, Zt = az.Z, az.Ztilde
    bad_b, bad_a, gaps = [], [], []
    Lb, V = defl_b.Ltilde_b, defl_b.VG
    for t in range(1, enl.horizon + 1):
        before = enl.before(t)
        dV = V.increment(t)
        p_lt1 = _prob_given_prev(enl, t, lambda z: z < 1)
        for w in range(n):
            if before[w]:
                lhs = Z[t - 1][w] / Zt[t][w]
                rhs = (1 - dV[w]) * Lb[t][w] / Lb[t - 1][w]
                if lhs != rhs:
                    bad_b.append((t, w))
                if enl.tau[w] == t and lhs != 1 - dV[w]:
                    gaps.append((t, w))
            if defl_a is not None:
                La = defl_a.Ltilde_a
                if before[w]:
                    dg = ONE
                else:
                    dg = (1 - Z[t - 1][w]) / ((1 - Zt[t][w]) * p_lt1[w])
                if dg != La[t][w] / La[t - 1][w]:
                    bad_a.append((t, w))
    return JumpRatioReport(tuple(bad_b), tuple(bad_a), tuple(gaps))
