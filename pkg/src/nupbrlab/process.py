"""Discrete-time process calculus on a finite filtered space.

Conventions used throughout the package:

* time runs over ``0..T``; jumps happen at ``t = 1..T`` only;
* the left limit of ``X`` at ``t`` is ``X[t-1]`` (and ``X[0]`` at ``t = 0``);
* a process is predictable when ``X[t]`` is measurable for the partition at
  ``t - 1`` (``X[0]`` for the partition at 0);
* on a finite space with finite horizon every local martingale is a true
  martingale, so martingale identities are tested directly.

Processes do not carry their filtration. Operations that condition take the
filtration and the probability space explicitly. Vector-valued processes are
plain sequences of scalar :class:`Process` components.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, Union

from gmpy2 import mpq

from .prob import Check, Filtration, Partition, ProbSpace, to_rational

__all__ = [
    "Process",
    "components",
    "predictable_projection",
    "dual_optional_projection",
    "dual_predictable_projection",
    "is_martingale",
    "angle_bracket",
    "square_bracket",
    "stochastic_exponential",
    "Exponential",
    "predictable_integral",
    "optional_integral",
    "stop",
    "after",
    "JumpMeasureView",
    "jump_measure",
    "mp_mu_conditional",
    "sigma_density_jump_condition",
]

ZERO = mpq(0)
ONE = mpq(1)


class Process:
    """A time x outcome table of exact rationals."""

    __slots__ = ("values",)

    def __init__(self, values):
        rows = tuple(tuple(to_rational(v) for v in row) for row in values)
        if not rows or len({len(r) for r in rows}) != 1:
            raise ValueError("process table must be rectangular and nonempty")
        self.values = rows

    @classmethod
    def _raw(cls, rows) -> "Process":
        # rows already hold mpq tuples
        obj = cls.__new__(cls)
        obj.values = rows
        return obj

    @classmethod
    def constant(cls, horizon: int, n: int, c=0) -> "Process":
        c = to_rational(c)
        return cls._raw(tuple((c,) * n for _ in range(horizon + 1)))

    @classmethod
    def from_function(cls, horizon: int, n: int, f: Callable[[int, int], object]) -> "Process":
        return cls(tuple(tuple(f(t, w) for w in range(n)) for t in range(horizon + 1)))

    @property
    def horizon(self) -> int:
        return len(self.values) - 1

    @property
    def n_outcomes(self) -> int:
        return len(self.values[0])

    def __getitem__(self, t: int) -> tuple:
        return self.values[t]

    def increment(self, t: int) -> tuple:
        """``X[t] - X[t-1]``; zero at ``t = 0``."""
        if t == 0:
            return (ZERO,) * self.n_outcomes
        a, b = self.values[t], self.values[t - 1]
        return tuple(x - y for x, y in zip(a, b))

    def _zip(self, other, op) -> "Process":
        if isinstance(other, Process):
            if other.horizon != self.horizon or other.n_outcomes != self.n_outcomes:
                raise ValueError("shape mismatch")
            return Process._raw(
                tuple(tuple(op(x, y) for x, y in zip(r, s)) for r, s in zip(self.values, other.values))
            )
        c = to_rational(other)
        return Process._raw(tuple(tuple(op(x, c) for x in r) for r in self.values))

    def __add__(self, other):
        return self._zip(other, lambda x, y: x + y)

    __radd__ = __add__

    def __sub__(self, other):
        return self._zip(other, lambda x, y: x - y)

    def __mul__(self, other):
        return self._zip(other, lambda x, y: x * y)

    __rmul__ = __mul__

    def __neg__(self):
        return Process._raw(tuple(tuple(-x for x in r) for r in self.values))

    def __eq__(self, other):
        return isinstance(other, Process) and self.values == other.values

    def __hash__(self):
        return hash(self.values)

    def __repr__(self):
        return f"Process({[[str(x) for x in r] for r in self.values]})"

    def is_constant(self) -> bool:
        return all(r == self.values[0] for r in self.values)

    def is_adapted(self, filt: Filtration) -> Check:
        for t, row in enumerate(self.values):
            if not filt[t].is_measurable(row):
                return Check(False, (t,))
        return Check(True)

    def is_predictable(self, filt: Filtration) -> Check:
        for t, row in enumerate(self.values):
            if not filt[max(t - 1, 0)].is_measurable(row):
                return Check(False, (t,))
        return Check(True)

    def relabel(self, perm: Sequence[int]) -> "Process":
        out = []
        for row in self.values:
            new = [ZERO] * len(row)
            for w, x in enumerate(row):
                new[perm[w]] = x
            out.append(tuple(new))
        return Process._raw(tuple(out))


VectorLike = Union[Process, Sequence[Process]]


def components(X: VectorLike) -> tuple[Process, ...]:
    return (X,) if isinstance(X, Process) else tuple(X)


def _conditioning(filt: Filtration, t: int) -> Partition:
    return filt[max(t - 1, 0)]


def predictable_projection(X: Process, filt: Filtration, space: ProbSpace) -> Process:
    rows = []
    for t in range(X.horizon + 1):
        rows.append(tuple(space.cond_exp(X[t], _conditioning(filt, t))))
    return Process._raw(tuple(rows))


def _check_nondecreasing(K: Process) -> None:
    for t in range(1, K.horizon + 1):
        for w, d in enumerate(K.increment(t)):
            if d < 0:
                raise ValueError(f"process decreases at t={t}, outcome {w}")


def dual_optional_projection(K: Process, filt: Filtration, space: ProbSpace) -> Process:
    """``sum_{s<=t} E[dK_s | F_s]`` with ``dK_0 := K_0``."""
    _check_nondecreasing(K)
    acc = space.cond_exp(K[0], filt[0])
    rows = [tuple(acc)]
    for t in range(1, K.horizon + 1):
        inc = space.cond_exp(K.increment(t), filt[t])
        acc = [a + b for a, b in zip(acc, inc)]
        rows.append(tuple(acc))
    return Process._raw(tuple(rows))


def dual_predictable_projection(K: Process, filt: Filtration, space: ProbSpace) -> Process:
    """``sum_{s<=t} E[dK_s | F_{s-1}]`` with ``dK_0 := K_0`` conditioned on ``F_0``."""
    _check_nondecreasing(K)
    return _compensator(K, filt, space)


def _compensator(K: Process, filt: Filtration, space: ProbSpace) -> Process:
    acc = space.cond_exp(K[0], filt[0])
    rows = [tuple(acc)]
    for t in range(1, K.horizon + 1):
        inc = space.cond_exp(K.increment(t), filt[t - 1])
        acc = [a + b for a, b in zip(acc, inc)]
        rows.append(tuple(acc))
    return Process._raw(tuple(rows))


def is_martingale(X: VectorLike, filt: Filtration, space: ProbSpace) -> Check:
    """Exact test of ``E[X_t | H_{t-1}] = X_{t-1}``.

    Atoms of zero mass (possible under an absolutely continuous measure) are
    skipped, and the comparison is made on charged outcomes only. On failure
    ``detail`` is ``(t, atom, lhs, rhs, component)``.
    """
    probs = space.probs
    for k, comp in enumerate(components(X)):
        for t in range(1, comp.horizon + 1):
            part = filt[t - 1]
            cond = space.cond_exp(comp[t], part)
            prev = comp[t - 1]
            for w, v in enumerate(cond):
                if v is None or not probs[w]:
                    continue
                if v != prev[w]:
                    return Check(False, (t, part.block_of(w), v, prev[w], k))
    return Check(True)


def square_bracket(M: Process, N: Process) -> Process:
    acc = [ZERO] * M.n_outcomes
    rows = [tuple(acc)]
    for t in range(1, M.horizon + 1):
        acc = [a + x * y for a, x, y in zip(acc, M.increment(t), N.increment(t))]
        rows.append(tuple(acc))
    return Process._raw(tuple(rows))


def angle_bracket(M: Process, N: Process, filt: Filtration, space: ProbSpace) -> Process:
    """Predictable covariation: the compensator of ``[M, N]``."""
    acc = [ZERO] * M.n_outcomes
    rows = [tuple(acc)]
    for t in range(1, M.horizon + 1):
        prod = [x * y for x, y in zip(M.increment(t), N.increment(t))]
        inc = space.cond_exp(prod, filt[t - 1])
        acc = [a + (b if b is not None else ZERO) for a, b in zip(acc, inc)]
        rows.append(tuple(acc))
    return Process._raw(tuple(rows))


@dataclass(frozen=True)
class Exponential:
    """Stochastic exponential plus the ``(t, outcome)`` points where ``1 + dN <= 0``."""

    process: Process
    nonpositive: tuple[tuple[int, int], ...]

    @property
    def positive(self) -> bool:
        return not self.nonpositive


def stochastic_exponential(N: Process) -> Exponential:
    acc = [ONE] * N.n_outcomes
    rows = [tuple(acc)]
    bad = []
    for t in range(1, N.horizon + 1):
        factors = [ONE + d for d in N.increment(t)]
        for w, f in enumerate(factors):
            if f <= 0:
                bad.append((t, w))
        acc = [a * f for a, f in zip(acc, factors)]
        rows.append(tuple(acc))
    return Exponential(Process._raw(tuple(rows)), tuple(bad))


def predictable_integral(H: VectorLike, X: VectorLike, filt: Filtration | None = None) -> Process:
    """``(H . X)_t = sum_{1<=s<=t} H_s . dX_s`` (inner product over components)."""
    Hs, Xs = components(H), components(X)
    if len(Hs) != len(Xs):
        raise ValueError(f"dimension mismatch: integrand {len(Hs)} vs integrator {len(Xs)}")
    if filt is not None:
        for h in Hs:
            chk = h.is_predictable(filt)
            if not chk:
                raise ValueError(f"integrand is not predictable at t={chk.detail[0]}")
    n = Xs[0].n_outcomes
    acc = [ZERO] * n
    rows = [tuple(acc)]
    for t in range(1, Xs[0].horizon + 1):
        for h, x in zip(Hs, Xs):
            acc = [a + hv * dx for a, hv, dx in zip(acc, h[t], x.increment(t))]
        rows.append(tuple(acc))
    return Process._raw(tuple(rows))


def optional_integral(K: Process, N: Process, filt: Filtration, space: ProbSpace) -> Process:
    """Compensated integral ``d(K o N)_t = K_t dN_t - E[K_t dN_t | H_{t-1}]``."""
    acc = [ZERO] * N.n_outcomes
    rows = [tuple(acc)]
    for t in range(1, N.horizon + 1):
        raw = [k * d for k, d in zip(K[t], N.increment(t))]
        comp = space.cond_exp(raw, filt[t - 1])
        acc = [a + r - (c if c is not None else ZERO) for a, r, c in zip(acc, raw, comp)]
        rows.append(tuple(acc))
    return Process._raw(tuple(rows))


def _tau_value(tau) -> Sequence:
    return tau.values if hasattr(tau, "values") else tau


def stop(X: Process, tau) -> Process:
    """``X^tau_t = X_{min(t, tau)}``."""
    tv = _tau_value(tau)
    T = X.horizon
    rows = []
    for t in range(T + 1):
        rows.append(tuple(X[t if t <= s else int(s)][w] for w, s in enumerate(tv)))
    return Process._raw(tuple(rows))


def after(X: Process, tau) -> Process:
    """``X - X^tau``: the part of ``X`` that moves strictly after ``tau``."""
    return X - stop(X, tau)


@dataclass(frozen=True)
class JumpMeasureView:
    """Conditional law of nonzero jumps per ``(t, atom of the partition at t-1)``.

    ``laws[(t, atom)]`` maps a jump vector to ``P(dS_t = x | atom)``.
    """

    laws: dict

    def nu(self, t: int, atom: tuple[int, ...]) -> dict:
        return self.laws.get((t, atom), {})

    def is_empty(self) -> bool:
        return not any(self.laws.values())


def _jump_vectors(S: VectorLike, t: int) -> list[tuple]:
    incs = [c.increment(t) for c in components(S)]
    return [tuple(col) for col in zip(*incs)]


def jump_measure(S: VectorLike, filt: Filtration, space: ProbSpace) -> JumpMeasureView:
    laws = {}
    p = space.probs
    T = components(S)[0].horizon
    for t in range(1, T + 1):
        jumps = _jump_vectors(S, t)
        for atom in filt[t - 1].blocks:
            mass = space.mass(atom)
            if not mass:
                continue
            law: dict = {}
            for w in atom:
                x = jumps[w]
                if p[w] and any(x):
                    law[x] = law.get(x, ZERO) + p[w] / mass
            laws[(t, atom)] = law
    return JumpMeasureView(laws)


def mp_mu_conditional(W: Callable, S: VectorLike, filt: Filtration, space: ProbSpace) -> Callable:
    """Conditional expectation of ``W(t, w, x)`` given the predictable sigma-field on jumps.

    The returned function maps ``(t, atom, x)`` to
    ``E[W(t,.,x) 1{dS_t = x}| atom] / P(dS_t = x | atom)``, or ``None`` where the
    denominator vanishes (including ``x = 0``, which is not a jump).
    """
    p = space.probs

    def value(t: int, atom: tuple[int, ...], x) -> mpq | None:
        x = tuple(to_rational(v) for v in (x if isinstance(x, (tuple, list)) else (x,)))
        if not any(x):
            return None
        jumps = _jump_vectors(S, t)
        num = den = ZERO
        for w in atom:
            if p[w] and jumps[w] == x:
                den += p[w]
                num += p[w] * to_rational(W(t, w, x))
        return num / den if den else None

    return value


def sigma_density_jump_condition(Y: Process, S: VectorLike, filt: Filtration, space: ProbSpace) -> Check:
    """Jump form of the sigma-martingale density criterion.

    With ``f = M(dY/Y_- | P~)`` the Jacod jump parameter of ``Y``, checks
    ``sum_x x (1 + f_t(x)) nu({t}, dx) = 0`` for every ``(t, atom)``.
    """
    for t in range(1, Y.horizon + 1):
        for w in range(Y.n_outcomes):
            if Y[t][w] <= 0:
                raise ValueError(f"density candidate is not positive at t={t}, outcome {w}")
    nu = jump_measure(S, filt, space)
    dN = lambda t, w, x: (Y[t][w] - Y[t - 1][w]) / Y[t - 1][w]  # noqa: E731
    f = mp_mu_conditional(dN, S, filt, space)
    d = len(components(S))
    for (t, atom), law in nu.laws.items():
        total = [ZERO] * d
        for x, mass in law.items():
            fx = f(t, atom, x)
            for j in range(d):
                total[j] += x[j] * (1 + fx) * mass
        if any(total):
            return Check(False, (t, atom, tuple(total)))
    return Check(True)
