"""Random times, Azema supermartingales and the progressive enlargement."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from gmpy2 import mpq

from .prob import Check, Filtration, Partition, ProbSpace
from .process import Process, dual_optional_projection

__all__ = [
    "INF",
    "RandomTime",
    "AzemaData",
    "Enlargement",
    "ExceptionalSets",
    "azema",
    "enlarge",
    "is_honest",
    "z_tau_less_one",
    "exceptional_sets",
]

INF = math.inf
ZERO = mpq(0)
ONE = mpq(1)


@dataclass(frozen=True)
class RandomTime:
    """Outcome-indexed time in ``{0, 1, ...} U {inf}``."""

    values: tuple

    def __post_init__(self):
        vals = []
        for v in self.values:
            if v == INF or v is None:
                vals.append(INF)
            elif isinstance(v, int) and not isinstance(v, bool) and v >= 0:
                vals.append(v)
            else:
                raise ValueError(f"invalid time value {v!r}")
        object.__setattr__(self, "values", tuple(vals))

    @classmethod
    def constant(cls, n: int, value) -> "RandomTime":
        return cls((value,) * n)

    @property
    def n_outcomes(self) -> int:
        return len(self.values)

    @property
    def is_finite(self) -> bool:
        return all(v != INF for v in self.values)

    def __getitem__(self, w: int):
        return self.values[w]

    def indicator(self, pred) -> tuple:
        return tuple(ONE if pred(s) else ZERO for s in self.values)

    def is_stopping_time(self, filt: Filtration) -> bool:
        T = filt.horizon
        for t in range(T + 1):
            ind = [s <= t for s in self.values]
            if not filt[t].is_measurable(ind):
                return False
        return True

    def relabel(self, perm: Sequence[int]) -> "RandomTime":
        new = [0] * len(self.values)
        for w, s in enumerate(self.values):
            new[perm[w]] = s
        return RandomTime(tuple(new))


@dataclass(frozen=True)
class AzemaData:
    Z: Process
    Ztilde: Process
    DoF: Process
    m: Process


def _validate_tau(tau: RandomTime, filt: Filtration) -> None:
    if tau.n_outcomes != filt.n_outcomes:
        raise ValueError("random time and filtration disagree on the outcome count")
    for w, s in enumerate(tau.values):
        if s != INF and s > filt.horizon:
            raise ValueError(f"tau({w}) = {s} exceeds the horizon {filt.horizon}; use inf")


def azema(tau: RandomTime, filt: Filtration, space: ProbSpace) -> AzemaData:
    """``Z_t = P(tau > t | F_t)``, ``Ztilde_t = P(tau >= t | F_t)``, ``m = Z + D^{o,F}``."""
    _validate_tau(tau, filt)
    T = filt.horizon
    Z = []
    Zt = []
    for t in range(T + 1):
        Z.append(tuple(space.cond_exp(tau.indicator(lambda s: s > t), filt[t])))
        Zt.append(tuple(space.cond_exp(tau.indicator(lambda s: s >= t), filt[t])))
    D = Process(tuple(tau.indicator(lambda s: s <= t) for t in range(T + 1)))
    DoF = dual_optional_projection(D, filt, space)
    Zp = Process._raw(tuple(Z))
    return AzemaData(Zp, Process._raw(tuple(Zt)), DoF, Zp + DoF)


def enlarge(filt: Filtration, tau: RandomTime) -> Filtration:
    """Split every atom ``A`` of ``F_t`` into ``A & {tau = s}`` (``s <= t``) and ``A & {tau > t}``."""
    _validate_tau(tau, filt)
    parts = []
    for t, part in enumerate(filt.partitions):
        blocks = []
        for b in part.blocks:
            groups: dict = {}
            for w in b:
                s = tau[w]
                key = s if s <= t else -1
                groups.setdefault(key, []).append(w)
            blocks.extend(tuple(g) for g in groups.values())
        parts.append(Partition(tuple(blocks)))
    return Filtration(tuple(parts))


def is_honest(tau: RandomTime, filt: Filtration) -> Check:
    """For every ``t`` and atom ``A`` of ``F_t``, ``tau`` is constant on ``A & {tau <= t}``."""
    for t, part in enumerate(filt.partitions):
        for b in part.blocks:
            seen = {tau[w] for w in b if tau[w] <= t}
            if len(seen) > 1:
                return Check(False, (t, b))
    return Check(True)


def z_tau_less_one(tau: RandomTime, az: AzemaData) -> bool:
    if not tau.is_finite:
        bad = [w for w, s in enumerate(tau.values) if s == INF]
        raise ValueError(f"Z_tau < 1 needs a finite tau; tau = inf on outcomes {bad}")
    return all(az.Z[s][w] < 1 for w, s in enumerate(tau.values))


@dataclass(frozen=True)
class ExceptionalSets:
    """``before``: ``{Ztilde_t = 0, Z_{t-1} > 0}``; ``after``: ``{Ztilde_t = 1, Z_{t-1} < 1}``.

    Each is a tuple of ``(t, outcomes)`` for the grid times where the set is nonempty.
    """

    before: tuple
    after: tuple

    def before_at(self, t: int) -> tuple:
        return dict(self.before).get(t, ())

    def after_at(self, t: int) -> tuple:
        return dict(self.after).get(t, ())


def exceptional_sets(az: AzemaData) -> ExceptionalSets:
    before, after_ = [], []
    Z, Zt = az.Z, az.Ztilde
    for t in range(1, Z.horizon + 1):
        b = tuple(w for w in range(Z.n_outcomes) if Zt[t][w] == 0 and Z[t - 1][w] > 0)
        a = tuple(w for w in range(Z.n_outcomes) if Zt[t][w] == 1 and Z[t - 1][w] < 1)
        if b:
            before.append((t, b))
        if a:
            after_.append((t, a))
    return ExceptionalSets(tuple(before), tuple(after_))


@dataclass(frozen=True)
class Enlargement:
    """A filtered space together with a random time and everything derived from it."""

    space: ProbSpace
    F: Filtration
    tau: RandomTime
    azema: AzemaData = field(init=False, repr=False, compare=False)
    G: Filtration = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "azema", azema(self.tau, self.F, self.space))
        object.__setattr__(self, "G", enlarge(self.F, self.tau))

    @property
    def horizon(self) -> int:
        return self.F.horizon

    @property
    def n_outcomes(self) -> int:
        return self.space.n_outcomes

    @cached_property
    def honest(self) -> Check:
        return is_honest(self.tau, self.F)

    @cached_property
    def exceptional(self) -> ExceptionalSets:
        return exceptional_sets(self.azema)

    def before(self, t: int) -> tuple[bool, ...]:
        """``{t <= tau}`` outcome-wise (predictable in ``G``)."""
        return tuple(t <= s for s in self.tau.values)

    def after(self, t: int) -> tuple[bool, ...]:
        """``{t > tau}`` outcome-wise."""
        return tuple(t > s for s in self.tau.values)
