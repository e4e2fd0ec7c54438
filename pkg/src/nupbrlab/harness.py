"""Seeded model generation and machine checks of the equivalence theorems.

Every suite draws models from a seed, evaluates each assertion of a theorem
independently (one LP decision or one exact identity per assertion) and
records whether they agree. Universal statements ("for every process
satisfying NUPBR(F)") are handled asymmetrically: when the structural
condition fails, the witness from the proof must produce a certified
arbitrage; when it holds, a configurable number of random processes is
sampled and every one must pass. Reports say so in their ``note``.
"""

from __future__ import annotations

import hashlib
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Sequence

from gmpy2 import mpq

from .decider import deflator_from_densities, nupbr_check, predictable_fv_check, verify_verdict
from .deflator import (
    build_after,
    build_before,
    condition_after,
    condition_before,
    jump_ratio_identities,
    verify_deflation_after,
    verify_deflation_before,
)
from .measures import (
    PredictableTime,
    qg_after,
    qg_before,
    qprime,
    qt,
    qtilde,
    qtilde_prime,
    single_jump,
    verify_prop_after,
    verify_prop_before,
)
from .model import Model
from .prob import FiniteProbSpace, Filtration, Partition, format_rational, reweight
from .process import Process, is_martingale, stop
from .randomtime import INF, RandomTime, z_tau_less_one

__all__ = [
    "MAX_OUTCOMES",
    "MAX_HORIZON",
    "MAX_ASSETS",
    "GenerationError",
    "CertificateError",
    "ModelGenParams",
    "gen_model",
    "TheoremReport",
    "SUITES",
    "GROUPS",
    "run_suite",
    "run_suites",
    "random_predictable_time",
    "random_xi",
    "random_nupbr_process",
    "random_conditioned_martingale",
    "random_staircase",
    "random_permutation",
    "decide",
    "thm_main3_case",
    "prop_before_case",
    "thm_main4_case",
    "prop_corollary_case",
    "thm_preservation_case",
    "thm_cruciallemma2_case",
    "prop_after_case",
    "thm_cruciallemma3_case",
    "thm_multijumps_case",
    "thm_after_preservation_case",
]

MAX_OUTCOMES = 12
MAX_HORIZON = 4
MAX_ASSETS = 2

ZERO = mpq(0)
ONE = mpq(1)


class GenerationError(RuntimeError):
    """No model satisfying the requested constraints within the rejection budget."""


class CertificateError(AssertionError):
    """A verdict's certificate did not survive independent re-verification."""


@dataclass(frozen=True)
class ModelGenParams:
    """Bounds and switches for :func:`gen_model`.

    ``n_outcomes``, ``horizon`` and ``n_assets`` are upper bounds; the actual
    sizes are drawn from the seed. ``branching`` caps the number of children
    of an atom per step.
    """

    n_outcomes: int = 8
    horizon: int = 3
    n_assets: int = 2
    branching: int = 3
    honest_only: bool = False
    force_before_set: bool = False
    force_after_set: bool = False
    seed: int = 0
    max_tries: int = 500

    def __post_init__(self):
        if not 2 <= self.n_outcomes <= MAX_OUTCOMES:
            raise ValueError(f"n_outcomes must lie in 2..{MAX_OUTCOMES}")
        if not 1 <= self.horizon <= MAX_HORIZON:
            raise ValueError(f"horizon must lie in 1..{MAX_HORIZON}")
        if not 1 <= self.n_assets <= MAX_ASSETS:
            raise ValueError(f"n_assets must lie in 1..{MAX_ASSETS}")
        if self.branching < 2:
            raise ValueError("branching must be at least 2")
        if self.max_tries < 1:
            raise ValueError("max_tries must be positive")


# ---------------------------------------------------------------- generation


def _split(rng: random.Random, block: Sequence[int], branching: int) -> list[tuple[int, ...]]:
    k = len(block)
    m = rng.randint(1, min(k, branching))
    items = list(block)
    rng.shuffle(items)
    cuts = sorted(rng.sample(range(1, k), m - 1)) if m > 1 else []
    bounds = [0] + cuts + [k]
    return [tuple(sorted(items[a:b])) for a, b in zip(bounds, bounds[1:])]


def _filtration(rng: random.Random, n: int, T: int, branching: int) -> Filtration:
    parts = [Partition.trivial(n)]
    for _ in range(T):
        blocks = []
        for b in parts[-1].blocks:
            blocks.extend(_split(rng, b, branching))
        parts.append(Partition(tuple(blocks)))
    return Filtration(tuple(parts))


def _centered(xs: list, weights: list) -> list:
    total = sum(weights, ZERO)
    mean = sum((w * x for w, x in zip(weights, xs)), ZERO) / total
    return [x - mean for x in xs]


def _adapted_path(rng: random.Random, F: Filtration, jump) -> Process:
    """Build a process from ``jump(t, atom, kids) -> list of child increments``."""
    n, T = F.n_outcomes, F.horizon
    start = mpq(rng.randint(-2, 2))
    rows = [[start] * n]
    for t in range(1, T + 1):
        row = list(rows[-1])
        for atom, kids in zip(F[t - 1].blocks, F[t - 1].children(F[t])):
            for C, x in zip(kids, jump(t, atom, kids)):
                for w in C:
                    row[w] += x
        rows.append(row)
    return Process(rows)


def _asset(rng: random.Random, F: Filtration, space: FiniteProbSpace) -> Process:
    martingale = rng.random() < 0.5

    def jump(t, atom, kids):
        xs = [mpq(rng.randint(-3, 3)) for _ in kids]
        if martingale:
            xs = _centered(xs, [space.mass(C) for C in kids])
        return xs

    return _adapted_path(rng, F, jump)


def _random_tau(rng: random.Random, F: Filtration) -> RandomTime:
    T = F.horizon
    return RandomTime(tuple(INF if rng.random() < 0.15 else rng.randint(0, T) for _ in range(F.n_outcomes)))


def _last_visit_tau(rng: random.Random, F: Filtration) -> RandomTime:
    """Last time an adapted random set is visited (0 if never): always honest."""
    n, T = F.n_outcomes, F.horizon
    p = rng.choice((0.3, 0.5, 0.7))
    last = [0] * n
    for t in range(T + 1):
        for b in F[t].blocks:
            if rng.random() < p:
                for w in b:
                    last[w] = t
    return RandomTime(tuple(last))


def _draw(rng: random.Random, params: ModelGenParams) -> Model:
    n = rng.randint(2, params.n_outcomes)
    T = rng.randint(1, params.horizon)
    d = rng.randint(1, params.n_assets)
    F = _filtration(rng, n, T, params.branching)
    weights = [rng.randint(1, 4) for _ in range(n)]
    total = sum(weights)
    space = FiniteProbSpace(mpq(x, total) for x in weights)
    tau = _last_visit_tau(rng, F) if params.honest_only else _random_tau(rng, F)
    assets = tuple(_asset(rng, F, space) for _ in range(d))
    return Model(space, F, assets, tau)


def gen_model(params: ModelGenParams) -> Model:
    """Deterministic in ``params``; rejection sampling for the honest and force flags."""
    rng = random.Random(params.seed)
    for _ in range(params.max_tries):
        model = _draw(rng, params)
        enl = model.enlargement
        if params.honest_only and not (enl.honest and z_tau_less_one(model.tau, enl.azema)):
            continue
        if params.force_before_set and not enl.exceptional.before:
            continue
        if params.force_after_set and not enl.exceptional.after:
            continue
        return model
    raise GenerationError(f"no model met the constraints after {params.max_tries} draws: {params}")


# ------------------------------------------------------- random test objects


def random_predictable_time(rng: random.Random, F: Filtration) -> PredictableTime:
    """Deterministic half the time; otherwise chosen atom by atom one step ahead."""
    n, T = F.n_outcomes, F.horizon
    if rng.random() < 0.5:
        return PredictableTime.constant(n, rng.randint(1, T))
    values: list = [None] * n
    for t in range(1, T + 1):
        for atom in F[t - 1].blocks:
            if values[atom[0]] is None and (rng.random() < 0.5 or (t == T and rng.random() < 0.7)):
                for w in atom:
                    values[w] = t
    return PredictableTime(tuple(INF if v is None else v for v in values))


def random_xi(rng: random.Random, model: Model, T: PredictableTime, mode: str, side: str = "before") -> tuple:
    """A variable known at ``T``, zero where ``T = inf``.

    ``mode``: ``free`` (arbitrary integers), ``zero``, ``mean_zero``
    (``E[xi | F_{T-1}] = 0``), ``split`` (centered separately on the
    children where ``Ztilde_T`` is / is not at the exceptional value 0 or 1
    of ``side``; mean zero and the exceptional condition both hold) or
    ``good`` (centered on the non-exceptional children, free elsewhere).
    """
    F, space = model.F, model.space
    Zt = model.enlargement.azema.Ztilde
    xi = [ZERO] * model.n_outcomes
    if mode == "zero":
        return tuple(xi)
    bad_value = 0 if side == "before" else 1
    for t in range(1, F.horizon + 1):
        for atom, kids in zip(F[t - 1].blocks, F[t - 1].children(F[t])):
            if T[atom[0]] != t:
                continue
            xs = [mpq(rng.randint(-3, 3)) for _ in kids]
            if mode == "mean_zero":
                xs = _centered(xs, [space.mass(C) for C in kids])
            elif mode in ("split", "good"):
                groups = ([i for i, C in enumerate(kids) if Zt[t][C[0]] != bad_value],
                          [i for i, C in enumerate(kids) if Zt[t][C[0]] == bad_value])
                for gi, g in enumerate(groups):
                    if not g or (mode == "good" and gi == 1):
                        continue
                    sub = _centered([xs[i] for i in g], [space.mass(kids[i]) for i in g])
                    for i, v in zip(g, sub):
                        xs[i] = v
            elif mode != "free":
                raise ValueError(f"unknown xi mode {mode!r}")
            for C, x in zip(kids, xs):
                for w in C:
                    xi[w] = x
    return tuple(xi)


def random_nupbr_process(rng: random.Random, F: Filtration, space, d: int = 1) -> tuple[Process, ...]:
    """``d`` processes that are martingales under one random equivalent measure."""
    q: dict = {}

    def weights(t, atom, kids):
        key = (t, atom)
        if key not in q:
            q[key] = [space.mass(C) * rng.randint(1, 4) for C in kids]
        return q[key]

    out = []
    for _ in range(d):
        def jump(t, atom, kids):
            if rng.random() < 0.2:
                return [ZERO] * len(kids)
            return _centered([mpq(rng.randint(-3, 3)) for _ in kids], weights(t, atom, kids))

        out.append(_adapted_path(rng, F, jump))
    return tuple(out)


def random_conditioned_martingale(rng: random.Random, model: Model, side: str) -> Process:
    """An F-martingale ``M`` with ``E[dM 1{Ztilde at the exceptional value} | F_{t-1}] = 0``.

    The children of each atom are split by whether ``Ztilde_t`` equals 0
    (``side='before'``) or 1 (``side='after'``) and ``dM`` is centered within
    each group, which gives both the martingale property and the condition.
    """
    enl = model.enlargement
    Zt, space = enl.azema.Ztilde, model.space
    bad = 0 if side == "before" else 1

    def jump(t, atom, kids):
        xs = [mpq(rng.randint(-3, 3)) for _ in kids]
        for g in ([i for i, C in enumerate(kids) if Zt[t][C[0]] == bad],
                  [i for i, C in enumerate(kids) if Zt[t][C[0]] != bad]):
            if g:
                sub = _centered([xs[i] for i in g], [space.mass(kids[i]) for i in g])
                for i, v in zip(g, sub):
                    xs[i] = v
        return xs

    return _adapted_path(rng, model.F, jump)


def random_staircase(rng: random.Random, F: Filtration) -> Process:
    """A predictable process: each step is fixed on the atoms of the previous time."""
    n, T = F.n_outcomes, F.horizon
    flat = rng.random() < 0.3
    rows = [[mpq(rng.randint(-2, 2))] * n]
    for t in range(1, T + 1):
        row = list(rows[-1])
        for atom in F[t - 1].blocks:
            step = 0 if flat or rng.random() < 0.4 else rng.choice((-2, -1, 1, 2))
            for w in atom:
                row[w] += step
        rows.append(row)
    return Process(rows)


def random_permutation(rng: random.Random, n: int) -> list[int]:
    perm = list(range(n))
    rng.shuffle(perm)
    return perm


# ------------------------------------------------------------------- checks


def decide(X, filt: Filtration, space) -> bool:
    """NUPBR verdict whose certificate has been re-verified from scratch."""
    verdict = nupbr_check(X, filt, space)
    chk = verify_verdict(verdict, X, filt, space)
    if not chk:
        raise CertificateError(f"certificate rejected: {chk.detail}")
    return verdict.holds


def _indicator_xi(model: Model, T: PredictableTime, xi: Sequence, keep) -> tuple:
    """``xi`` times ``keep(t, w)`` evaluated at ``t = T(w)``."""
    return tuple(
        x if s != INF and keep(s, w) else ZERO for w, (x, s) in enumerate(zip(xi, T.values))
    )


def _stopped(X: Sequence[Process], tau) -> tuple:
    return tuple(stop(c, tau) for c in X)


def _after(X: Sequence[Process], tau) -> tuple:
    return tuple(c - stop(c, tau) for c in X)


def thm_main3_case(model: Model, T: PredictableTime, xi: Sequence) -> tuple[bool, bool, bool, bool]:
    """(a) ``S^tau`` NUPBR(G); (b) ``xi 1{Ztilde_T > 0} 1_[T,inf)`` NUPBR(F);
    (c) ``S`` NUPBR(F, Qtilde_T); (d) ``S`` NUPBR(F, Q_T); ``S = xi 1{Z_{T-1} > 0} 1_[T,inf)``."""
    enl = model.enlargement
    Z, Zt, H = enl.azema.Z, enl.azema.Ztilde, model.horizon
    S = single_jump(T, _indicator_xi(model, T, xi, lambda t, w: Z[t - 1][w] > 0), H)
    St = single_jump(T, _indicator_xi(model, T, xi, lambda t, w: Zt[t][w] > 0), H)
    a = decide(stop(S, model.tau), enl.G, model.space)
    b = decide(St, model.F, model.space)
    c = decide(S, model.F, qtilde(enl, T))
    d = decide(S, model.F, qt(enl, T))
    return (a, b, c, d)


def prop_before_case(model: Model, T: PredictableTime, xi: Sequence) -> tuple[bool, bool, bool]:
    return verify_prop_before(model.enlargement, T, xi).as_tuple()


def prop_after_case(model: Model, T: PredictableTime, xi: Sequence) -> tuple[bool, bool, bool]:
    return verify_prop_after(model.enlargement, T, xi).as_tuple()


def _delta_grid(values) -> list:
    """Distinct positive values plus one below the smallest (every distinct truncation)."""
    pos = sorted({v for v in values if v > 0})
    if not pos:
        return [ONE]
    return [pos[0] / 2] + pos


def _truncated_jumps(model: Model, keep) -> tuple[Process, ...]:
    """``sum dS 1{keep(t, w)}`` for every asset."""
    out = []
    for S in model.assets:
        acc = [ZERO] * model.n_outcomes
        rows = [tuple(acc)]
        for t in range(1, model.horizon + 1):
            inc = S.increment(t)
            acc = [a + (x if keep(t, w) else ZERO) for w, (a, x) in enumerate(zip(acc, inc))]
            rows.append(tuple(acc))
        out.append(Process(rows))
    return tuple(out)


def _multi_jump(model: Model, side: str) -> tuple[bool, bool, bool]:
    enl = model.enlargement
    Z, Zt, F, space = enl.azema.Z, enl.azema.Ztilde, model.F, model.space
    if side == "before":
        a = decide(_stopped(model.assets, model.tau), enl.G, space)
        level = lambda t, w: Z[t - 1][w]  # noqa: E731
        good = lambda t, w: Zt[t][w] > 0  # noqa: E731
    else:
        a = decide(_after(model.assets, model.tau), enl.G, space)
        level = lambda t, w: 1 - Z[t - 1][w]  # noqa: E731
        good = lambda t, w: Zt[t][w] < 1  # noqa: E731
    levels = [level(t, w) for t in range(1, model.horizon + 1) for w in range(model.n_outcomes)]
    b = c = True
    for delta in _delta_grid(levels):
        X = _truncated_jumps(model, lambda t, w: good(t, w) and level(t, w) >= delta)
        verdict = nupbr_check(X, F, space)
        if not verify_verdict(verdict, X, F, space):
            raise CertificateError("truncated-jump certificate rejected")
        if not verdict.holds:
            # a Y with the stated property would deflate X; the witness rules it out
            b = c = False
            continue
        Y, _ = deflator_from_densities(verdict, X, F)
        for S in model.assets:
            for t in range(1, model.horizon + 1):
                inc = S.increment(t)
                vals = [Y[t][w] * inc[w] if good(t, w) else ZERO for w in range(model.n_outcomes)]
                proj = space.cond_exp(vals, F[t - 1])
                if any(proj[w] != 0 for w in range(model.n_outcomes) if level(t, w) >= delta):
                    b = False
    return (a, b, c)


def thm_main4_case(model: Model) -> tuple[bool, bool, bool]:
    """(a) ``S^tau`` NUPBR(G); (b) a deflator kills the predictable projection of the
    surviving jumps on ``{Z_{t-1} >= delta}``; (c) the surviving jumps are NUPBR(F), for all delta."""
    return _multi_jump(model, "before")


def thm_multijumps_case(model: Model) -> tuple[bool, bool, bool]:
    """After-tau mirror of :func:`thm_main4_case` with ``{Ztilde < 1}`` and ``1 - Z_{t-1}``."""
    return _multi_jump(model, "after")


def _witness_xi(model: Model, T: PredictableTime, value) -> tuple:
    """``1{Ztilde_T = value} - P(Ztilde_T = value | F_{T-1})`` on ``{T < inf}``."""
    enl = model.enlargement
    Zt = enl.azema.Ztilde
    xi = [ZERO] * model.n_outcomes
    for t in range(1, model.horizon + 1):
        ws = [w for w in range(model.n_outcomes) if T[w] == t]
        if not ws:
            continue
        ind = [ONE if z == value else ZERO for z in Zt[t]]
        p = model.space.cond_exp(ind, model.F[t - 1])
        for w in ws:
            xi[w] = ind[w] - p[w]
    return tuple(xi)


def _single_jump_quantifier(model: Model, T: PredictableTime, rng: random.Random, samples: int, side: str):
    enl = model.enlargement
    Z, Zt = enl.azema.Z, enl.azema.Ztilde
    H = model.horizon
    if side == "before":
        cond = all(not (Zt[s][w] == 0 and Z[s - 1][w] > 0) for w, s in enumerate(T.values) if s != INF)
        cut = lambda M: stop(M, model.tau)  # noqa: E731
        value = 0
    else:
        cond = all(not (Zt[s][w] == 1 and Z[s - 1][w] < 1) for w, s in enumerate(T.values) if s != INF)
        cut = lambda M: M - stop(M, model.tau)  # noqa: E731
        value = 1
    W = cut(single_jump(T, _witness_xi(model, T, value), H))
    fv = predictable_fv_check(W, enl.G, model.space)
    if not fv:
        raise CertificateError(f"predictable-process lemma violated by the witness: {fv.detail}")
    ok = decide(W, enl.G, model.space)
    if ok:
        for _ in range(samples):
            xi = random_xi(rng, model, T, "mean_zero")
            if not decide(cut(single_jump(T, xi, H)), enl.G, model.space):
                ok = False
                break
    return (cond, ok)


def prop_corollary_case(model: Model, T: PredictableTime, rng: random.Random, samples: int = 3) -> tuple[bool, bool]:
    """(a) ``{Ztilde_T = 0} within {Z_{T-1} = 0}``; (b) every bounded mean-zero jump at ``T``
    stays NUPBR(G) after stopping (witness + sampling)."""
    return _single_jump_quantifier(model, T, rng, samples, "before")


def thm_cruciallemma3_case(model: Model, T: PredictableTime, rng: random.Random, samples: int = 3) -> tuple[bool, bool]:
    """(a) ``{Ztilde_T = 1} within {Z_{T-1} = 1}``; (b) every bounded mean-zero jump at ``T``
    keeps ``M - M^tau`` NUPBR(G) (witness + sampling)."""
    return _single_jump_quantifier(model, T, rng, samples, "after")


def _preservation(model: Model, rng: random.Random, samples: int, side: str) -> tuple[bool, bool]:
    enl = model.enlargement
    exc = enl.exceptional.before if side == "before" else enl.exceptional.after
    cond = not exc
    ok = True
    if exc:
        t = exc[0][0]
        T = PredictableTime.constant(model.n_outcomes, t)
        _, ok = _single_jump_quantifier(model, T, rng, 0, side)
    if ok:
        for _ in range(samples):
            X = random_nupbr_process(rng, model.F, model.space, rng.randint(1, 2))
            if not decide(X, model.F, model.space):
                raise CertificateError("sampled process is not NUPBR(F)")
            Xc = _stopped(X, model.tau) if side == "before" else _after(X, model.tau)
            if not decide(Xc, enl.G, model.space):
                ok = False
                break
    return (cond, ok)


def thm_preservation_case(model: Model, rng: random.Random, samples: int = 3) -> tuple[bool, bool]:
    """(a) the before-set is empty; (b) stopping at ``tau`` preserves NUPBR for every
    NUPBR(F) process (witness + sampling)."""
    return _preservation(model, rng, samples, "before")


def thm_after_preservation_case(model: Model, rng: random.Random, samples: int = 3) -> tuple[bool, bool]:
    """(a) the after-set is empty; (b) ``X - X^tau`` is NUPBR(G) for every NUPBR(F) ``X``."""
    return _preservation(model, rng, samples, "after")


def thm_cruciallemma2_case(model: Model, T: PredictableTime, xi: Sequence) -> tuple[bool, bool, bool, bool]:
    """(a) ``S - S^tau`` NUPBR(G); (b) ``S`` NUPBR(F, Qtilde'_T); (c) ``S`` NUPBR(F, Q'_T);
    (d) ``xi 1{Ztilde_T < 1} 1_[T,inf)`` NUPBR(F); ``S = xi 1{Z_{T-1} < 1} 1_[T,inf)``."""
    enl = model.enlargement
    Z, Zt, H = enl.azema.Z, enl.azema.Ztilde, model.horizon
    S = single_jump(T, _indicator_xi(model, T, xi, lambda t, w: Z[t - 1][w] < 1), H)
    St = single_jump(T, _indicator_xi(model, T, xi, lambda t, w: Zt[t][w] < 1), H)
    a = decide(S - stop(S, model.tau), enl.G, model.space)
    b = decide(S, model.F, qtilde_prime(enl, T))
    c = decide(S, model.F, qprime(enl, T))
    d = decide(St, model.F, model.space)
    return (a, b, c, d)


# ------------------------------------------------- structural (all-true) checks


def azema_case(model: Model) -> tuple[bool, bool, bool]:
    """``m`` is an F-martingale; ``E[Ztilde_t | F_{t-1}] = Z_{t-1}``; ``{t<=tau} c {Ztilde_t>0} c {Z_{t-1}>0}``."""
    enl = model.enlargement
    az, F, space = enl.azema, model.F, model.space
    m_ok = bool(is_martingale(az.m, F, space))
    proj_ok = all(
        space.cond_exp(az.Ztilde[t], F[t - 1]) == list(az.Z[t - 1]) for t in range(1, model.horizon + 1)
    )
    chain = all(
        (not (t <= model.tau[w]) or az.Ztilde[t][w] > 0) and (not (az.Ztilde[t][w] > 0) or az.Z[t - 1][w] > 0)
        for t in range(1, model.horizon + 1)
        for w in range(model.n_outcomes)
    )
    return (m_ok, proj_ok, chain)


def deflator_before_case(model: Model, rng: random.Random, samples: int = 1) -> tuple[bool, bool, bool]:
    """``Ltilde_b > 0``; a G-martingale; deflates every sampled martingale meeting the condition."""
    enl = model.enlargement
    defl = build_before(enl)
    L = defl.Ltilde_b
    pos = all(v > 0 for row in L.values for v in row)
    mart = bool(is_martingale(L, enl.G, model.space))
    deflates = True
    for _ in range(samples):
        M = random_conditioned_martingale(rng, model, "before")
        if not condition_before(enl, M):
            raise AssertionError("generator produced a martingale violating the condition")
        if not verify_deflation_before(M, defl, enl):
            deflates = False
    return (pos, mart, deflates)


def deflator_after_case(model: Model, rng: random.Random, samples: int = 1) -> tuple[bool, bool, bool]:
    enl = model.enlargement
    defl = build_after(enl)
    L = defl.Ltilde_a
    pos = all(v > 0 for row in L.values for v in row)
    mart = bool(is_martingale(L, enl.G, model.space))
    deflates = True
    for _ in range(samples):
        M = random_conditioned_martingale(rng, model, "after")
        if not condition_after(enl, M):
            raise AssertionError("generator produced a martingale violating the condition")
        if not verify_deflation_after(M, defl, enl):
            deflates = False
    return (pos, mart, deflates)


def jump_ratio_case(model: Model) -> tuple[bool, bool, bool, bool]:
    """Both jump-ratio identities, and the single-jump G-densities at every grid time equal
    the one-step ratios of the deflators."""
    enl = model.enlargement
    honest_ok = bool(enl.honest) and enl.tau.is_finite and z_tau_less_one(enl.tau, enl.azema)
    defl_b = build_before(enl)
    defl_a = build_after(enl) if honest_ok else None
    rep = jump_ratio_identities(defl_b, defl_a, enl)
    n, H = model.n_outcomes, model.horizon
    cross_b = cross_a = True
    for t in range(1, H + 1):
        T = PredictableTime.constant(n, t)
        db = qg_before(enl, T).density
        Lb = defl_b.Ltilde_b
        if any(db[w] != Lb[t][w] / Lb[t - 1][w] for w in range(n) if t <= model.tau[w]):
            cross_b = False
        if defl_a is not None:
            da = qg_after(enl, T).density
            La = defl_a.Ltilde_a
            if any(da[w] != La[t][w] / La[t - 1][w] for w in range(n)):
                cross_a = False
    return (not rep.before_mismatches, not rep.after_mismatches, cross_b, cross_a)


def lp_selftest_case(model: Model, rng: random.Random) -> tuple[bool, bool, bool, bool]:
    """Predictable-process lemma on a staircase; verdict invariance under relabelling
    and under an equivalent reweighting (certificates re-verified by :func:`decide`)."""
    F, space = model.F, model.space
    X = random_staircase(rng, F)
    fv = bool(predictable_fv_check(X, F, space))
    fv_cert = decide(X, F, space) == X.is_constant()
    base = decide(model.assets, F, space)
    perm = random_permutation(rng, model.n_outcomes)
    moved = model.relabel(perm)
    perm_ok = decide(moved.assets, moved.F, moved.space) == base
    dens = [mpq(rng.randint(1, 5)) for _ in range(model.n_outcomes)]
    norm = space.expectation(dens)
    Q = reweight(space, [x / norm for x in dens])
    rew_ok = decide(model.assets, F, Q) == base
    return (fv, fv_cert, perm_ok, rew_ok)


# ------------------------------------------------------------------ suites


@dataclass(frozen=True)
class SuiteSpec:
    id: str
    statement: str
    labels: tuple[str, ...]
    family: str  # "before", "after" or "plain": which model stream to use
    rule: str  # "equal": assertions agree; "all": every assertion holds
    note: str
    run: Callable


def _with_single_jump(fn, modes: Sequence[str], side: str = "before"):
    def run(model, rng, samples):
        T = random_predictable_time(rng, model.F)
        xi = random_xi(rng, model, T, rng.choice(modes), side)
        return fn(model, T, xi), {"T": _fmt_time(T.values), "xi": [format_rational(x) for x in xi]}

    return run


def _with_time(fn):
    def run(model, rng, samples):
        T = random_predictable_time(rng, model.F)
        return fn(model, T, rng, samples), {"T": _fmt_time(T.values)}

    return run


def _fmt_time(values) -> list:
    return ["inf" if v == INF else v for v in values]


_QUANT = "holding direction sampled ({samples} processes per model); failing direction by the witness from the proof"

SUITES: dict[str, SuiteSpec] = {
    s.id: s
    for s in (
        SuiteSpec("azema", "m martingale, projection of Ztilde, inclusion chain", ("m_martingale", "Ztilde_projection", "inclusions"), "before", "all", "", lambda m, r, k: (azema_case(m), {})),
        SuiteSpec("deflator_before", "Ltilde_b positive G-martingale deflating martingales under the before condition", ("positive", "G_martingale", "deflates"), "before", "all", "martingales drawn to satisfy the condition", lambda m, r, k: (deflator_before_case(m, r, max(k, 1)), {})),
        SuiteSpec("deflator_after", "Ltilde_a positive G-martingale deflating martingales under the after condition", ("positive", "G_martingale", "deflates"), "after", "all", "martingales drawn to satisfy the condition", lambda m, r, k: (deflator_after_case(m, r, max(k, 1)), {})),
        SuiteSpec("jump_ratio", "one-step deflator ratios equal the single-jump G-densities", ("before_identity", "after_identity", "QG_before_density", "QG_after_density"), "before", "all", "after-tau identities are vacuous unless tau is honest with Z_tau < 1", lambda m, r, k: (jump_ratio_case(m), {})),
        SuiteSpec("jump_ratio_after", "one-step deflator ratios equal the single-jump G-densities, honest tau", ("before_identity", "after_identity", "QG_before_density", "QG_after_density"), "after", "all", "", lambda m, r, k: (jump_ratio_case(m), {})),
        SuiteSpec("main3", "single jump before tau: four-way equivalence", ("a_stopped_G", "b_truncated_F", "c_Qtilde", "d_Q"), "before", "equal", "", _with_single_jump(thm_main3_case, ("free", "good", "zero", "mean_zero"))),
        SuiteSpec("prop_before", "single-jump martingale before tau: three-way equivalence", ("a_Q_martingale", "b_zero_projection", "c_QG_martingale"), "before", "equal", "", _with_single_jump(prop_before_case, ("mean_zero", "split", "zero"))),
        SuiteSpec("main4", "multi-jump before tau: (a) iff (c), (b) from the deflator", ("a_stopped_G", "b_deflator_identity", "c_truncated_F"), "before", "equal", "delta ranges over realized positive Z_{t-1} values and one smaller value", lambda m, r, k: (thm_main4_case(m), {})),
        SuiteSpec("corollary", "single jump: exceptional before-set at T empty iff every mean-zero jump survives stopping", ("a_condition", "b_preserved"), "before", "equal", _QUANT, _with_time(prop_corollary_case)),
        SuiteSpec("preservation", "before-set empty iff stopping preserves NUPBR", ("a_condition", "b_preserved"), "before", "equal", _QUANT, lambda m, r, k: (thm_preservation_case(m, r, k), {})),
        SuiteSpec("after_cruciallemma2", "single jump after tau: four-way equivalence", ("a_after_G", "b_Qtilde_prime", "c_Q_prime", "d_truncated_F"), "after", "equal", "", _with_single_jump(thm_cruciallemma2_case, ("free", "good", "zero", "mean_zero"), "after")),
        SuiteSpec("prop_after", "single jump after tau: three-way equivalence", ("a_QF_martingale", "b_zero_projection", "c_QG_martingale"), "after", "equal", "", _with_single_jump(prop_after_case, ("free", "good", "split", "zero", "mean_zero"), "after")),
        SuiteSpec("after_cruciallemma3", "single jump: after-set at T empty iff every mean-zero jump survives after tau", ("a_condition", "b_preserved"), "after", "equal", _QUANT, _with_time(thm_cruciallemma3_case)),
        SuiteSpec("after_multijumps", "multi-jump after tau: (a) iff (c), (b) from the deflator", ("a_after_G", "b_deflator_identity", "c_truncated_F"), "after", "equal", "delta ranges over realized positive 1 - Z_{t-1} values and one smaller value", lambda m, r, k: (thm_multijumps_case(m), {})),
        SuiteSpec("after_preservation", "after-set empty iff X - X^tau keeps NUPBR", ("a_condition", "b_preserved"), "after", "equal", _QUANT, lambda m, r, k: (thm_after_preservation_case(m, r, k), {})),
        SuiteSpec("lp_selftest", "LP decider: predictable lemma, relabelling and reweighting invariance", ("fv_lemma", "fv_certificate", "permutation", "reweighting"), "plain", "all", "every verdict's certificate is re-verified", lambda m, r, k: (lp_selftest_case(m, r), {})),
    )
}

GROUPS: dict[str, tuple[str, ...]] = {
    "before": ("main3", "prop_before", "main4", "corollary", "preservation"),
    "after": ("after_cruciallemma2", "prop_after", "after_cruciallemma3", "after_multijumps", "after_preservation"),
    "equivalence": (
        "main3", "prop_before", "main4", "corollary", "preservation",
        "after_cruciallemma2", "prop_after", "after_cruciallemma3", "after_multijumps", "after_preservation",
    ),
    "all": tuple(SUITES),
}


@dataclass
class TheoremReport:
    theorem: str
    statement: str
    labels: tuple
    rule: str
    seed: int
    params: dict
    samples: int
    note: str = ""
    cases: list = field(default_factory=list)

    @property
    def models_tested(self) -> int:
        return len(self.cases)

    @property
    def disagreements(self) -> list:
        return [c for c in self.cases if not c["agree"]]

    @property
    def agreements(self) -> int:
        return self.models_tested - len(self.disagreements)

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "statement": self.statement,
            "labels": list(self.labels),
            "rule": self.rule,
            "seed": self.seed,
            "params": self.params,
            "samples": self.samples,
            "note": self.note,
            "models_tested": self.models_tested,
            "agreements": self.agreements,
            "disagreements": len(self.disagreements),
            "cases": self.cases,
        }


def _model_seed(seed: int, index: int, family: str) -> int:
    h = hashlib.sha256(f"{seed}/{index}/{family}".encode()).digest()
    return int.from_bytes(h[:8], "big")


def model_params(base: ModelGenParams, family: str, seed: int, index: int) -> ModelGenParams:
    """Model stream of a suite family; odd indices force a nonempty exceptional set."""
    forced = index % 2 == 1
    p = replace(base, seed=_model_seed(seed, index, family), force_before_set=False, force_after_set=False)
    if family == "before":
        return replace(p, honest_only=False, force_before_set=forced)
    if family == "after":
        return replace(p, honest_only=True, force_after_set=forced)
    return replace(p, honest_only=False)


def _run_case(args) -> dict:
    suite_id, seed, index, base, samples = args
    suite = SUITES[suite_id]
    params = model_params(base, suite.family, seed, index)
    model = gen_model(params)
    rng = random.Random(f"{seed}/{index}/{suite_id}")
    truths, context = suite.run(model, rng, samples)
    truths = tuple(bool(x) for x in truths)
    agree = all(truths) if suite.rule == "all" else len(set(truths)) == 1
    case = {
        "index": index,
        "model_seed": params.seed,
        "digest": model.digest(),
        "truths": dict(zip(suite.labels, truths)),
        "agree": agree,
    }
    if not agree:
        case["model"] = model.to_dict()
        case["context"] = context
    return case


def run_suite(
    suite_id: str,
    n_models: int,
    seed: int = 0,
    params: ModelGenParams | None = None,
    samples: int = 3,
    jobs: int = 1,
) -> TheoremReport:
    """Run one suite over ``n_models`` seeded models; cases are ordered by model index."""
    suite = SUITES[suite_id]
    base = params or ModelGenParams()
    report = TheoremReport(
        suite.id, suite.statement, suite.labels, suite.rule, seed, asdict(base), samples,
        suite.note.replace("{samples}", str(samples)),
    )
    tasks = [(suite_id, seed, i, base, samples) for i in range(n_models)]
    if jobs > 1 and n_models > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            cases = list(pool.map(_run_case, tasks, chunksize=max(1, n_models // (4 * jobs))))
    else:
        cases = [_run_case(t) for t in tasks]
    report.cases = sorted(cases, key=lambda c: c["index"])
    return report


def run_suites(name: str, n_models: int, seed: int = 0, params: ModelGenParams | None = None,
               samples: int = 3, jobs: int = 1) -> list[TheoremReport]:
    """``name`` is a suite id or a group (``before``, ``after``, ``equivalence``, ``all``)."""
    ids = GROUPS.get(name, (name,))
    for s in ids:
        if s not in SUITES:
            raise KeyError(f"unknown suite {s!r}")
    return [run_suite(s, n_models, seed, params, samples, jobs) for s in ids]
