"""Exact finite probability spaces, partitions and filtrations.

Every number is a ``gmpy2.mpq``; nothing in here ever rounds.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from gmpy2 import mpq

__all__ = [
    "Check",
    "Partition",
    "Filtration",
    "ProbSpace",
    "FiniteProbSpace",
    "AbsContSpace",
    "FiltrationError",
    "to_rational",
    "parse_rational",
    "format_rational",
    "conditional_expectation",
    "conditional_probability",
    "refine_check",
    "reweight",
]

ZERO = mpq(0)
ONE = mpq(1)

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


class FiltrationError(ValueError):
    """A partition sequence that does not refine, or does not cover the outcomes."""


@dataclass(frozen=True)
class Check:
    """Outcome of an exact test; ``detail`` locates the first failure."""

    ok: bool
    detail: tuple = ()

    def __bool__(self) -> bool:
        return self.ok


def to_rational(x) -> mpq:
    if isinstance(x, float):
        raise TypeError(f"floats are not accepted as exact values: {x!r}")
    if isinstance(x, str):
        return parse_rational(x)
    return mpq(x)


def parse_rational(text: str) -> mpq:
    """Parse ``"num/den"`` or an integer string. Decimals are rejected."""
    m = _RATIONAL_RE.match(text)
    if m is None:
        raise ValueError(f"not an exact rational: {text!r}")
    num, den = m.group(1), m.group(2)
    if den is not None and int(den) == 0:
        raise ValueError(f"zero denominator: {text!r}")
    return mpq(int(num), int(den) if den is not None else 1)


def format_rational(q) -> str:
    q = mpq(q)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Partition:
    """Atoms of a finite sigma-field, kept in canonical (sorted) form."""

    blocks: tuple[tuple[int, ...], ...]
    _index: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        blocks = tuple(sorted(tuple(sorted(b)) for b in self.blocks))
        if any(len(b) == 0 for b in blocks):
            raise FiltrationError("empty block in partition")
        flat = [w for b in blocks for w in b]
        n = len(flat)
        if sorted(flat) != list(range(n)):
            raise FiltrationError(f"blocks do not partition range({n}): {blocks}")
        index = [0] * n
        for i, b in enumerate(blocks):
            for w in b:
                index[w] = i
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "_index", tuple(index))

    @classmethod
    def trivial(cls, n: int) -> "Partition":
        return cls((tuple(range(n)),))

    @classmethod
    def discrete(cls, n: int) -> "Partition":
        return cls(tuple((w,) for w in range(n)))

    @property
    def n_outcomes(self) -> int:
        return len(self._index)

    def block_of(self, w: int) -> tuple[int, ...]:
        return self.blocks[self._index[w]]

    def block_index(self, w: int) -> int:
        return self._index[w]

    def refines(self, other: "Partition") -> bool:
        """True iff every block of ``self`` lies inside one block of ``other``."""
        idx = other._index
        return all(len({idx[w] for w in b}) == 1 for b in self.blocks)

    def is_measurable(self, values: Sequence) -> bool:
        return all(len({values[w] for w in b}) == 1 for b in self.blocks)

    def children(self, finer: "Partition") -> list[list[tuple[int, ...]]]:
        """Group the blocks of ``finer`` by the block of ``self`` containing them."""
        out: list[list[tuple[int, ...]]] = [[] for _ in self.blocks]
        for b in finer.blocks:
            out[self._index[b[0]]].append(b)
        return out


def refine_check(partitions: Sequence[Partition]) -> Check:
    """Check that ``partitions[t+1]`` refines ``partitions[t]`` for every ``t``."""
    for t in range(1, len(partitions)):
        if partitions[t].n_outcomes != partitions[t - 1].n_outcomes:
            return Check(False, (t, "outcome count differs"))
        if not partitions[t].refines(partitions[t - 1]):
            return Check(False, (t, "partition does not refine its predecessor"))
    return Check(True)


@dataclass(frozen=True)
class Filtration:
    partitions: tuple[Partition, ...]

    def __post_init__(self):
        parts = tuple(p if isinstance(p, Partition) else Partition(p) for p in self.partitions)
        if not parts:
            raise FiltrationError("a filtration needs at least one partition")
        chk = refine_check(parts)
        if not chk:
            raise FiltrationError(f"refinement fails at t={chk.detail[0]}: {chk.detail[1]}")
        object.__setattr__(self, "partitions", parts)

    @property
    def horizon(self) -> int:
        return len(self.partitions) - 1

    @property
    def n_outcomes(self) -> int:
        return self.partitions[0].n_outcomes

    def __getitem__(self, t: int) -> Partition:
        return self.partitions[t]

    def __len__(self) -> int:
        return len(self.partitions)

    def relabel(self, perm: Sequence[int]) -> "Filtration":
        """Image under the outcome relabelling ``w -> perm[w]``."""
        return Filtration(
            tuple(Partition(tuple(tuple(perm[w] for w in b) for b in p.blocks)) for p in self.partitions)
        )


class ProbSpace:
    """Finite outcome set with exact, nonnegative masses summing to one.

    Use :class:`FiniteProbSpace` for the reference measure (every outcome
    charged) and :class:`AbsContSpace` for measures that may kill outcomes.
    """

    def __init__(self, probs: Iterable):
        p = tuple(to_rational(x) for x in probs)
        if not p:
            raise ValueError("empty outcome set")
        if any(x < 0 for x in p):
            raise ValueError("negative probability")
        if sum(p) != 1:
            raise ValueError(f"probabilities sum to {sum(p)}, not 1")
        self.probs = p

    @property
    def n_outcomes(self) -> int:
        return len(self.probs)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(w for w, x in enumerate(self.probs) if x > 0)

    @property
    def null_set(self) -> frozenset[int]:
        return frozenset(w for w, x in enumerate(self.probs) if x == 0)

    @property
    def is_equivalent(self) -> bool:
        return all(x > 0 for x in self.probs)

    def mass(self, outcomes: Iterable[int]) -> mpq:
        p = self.probs
        return sum((p[w] for w in outcomes), ZERO)

    def expectation(self, values: Sequence) -> mpq:
        return sum((x * v for x, v in zip(self.probs, values)), ZERO)

    def cond_exp(self, values: Sequence, partition: Partition) -> list:
        """Blockwise weighted averages; ``None`` on blocks of zero mass."""
        p = self.probs
        out: list = [None] * len(p)
        for b in partition.blocks:
            mass = ZERO
            acc = ZERO
            for w in b:
                if p[w]:
                    mass += p[w]
                    acc += p[w] * values[w]
            v = acc / mass if mass else None
            for w in b:
                out[w] = v
        return out

    def relabel(self, perm: Sequence[int]) -> "ProbSpace":
        new = [ZERO] * len(self.probs)
        for w, x in enumerate(self.probs):
            new[perm[w]] = x
        return type(self)(new) if type(self) is FiniteProbSpace else ProbSpace(new)

    def __eq__(self, other):
        return isinstance(other, ProbSpace) and self.probs == other.probs

    def __hash__(self):
        return hash(self.probs)

    def __repr__(self):
        return f"{type(self).__name__}({[format_rational(x) for x in self.probs]})"


class FiniteProbSpace(ProbSpace):
    def __init__(self, probs: Iterable):
        super().__init__(probs)
        if any(x == 0 for x in self.probs):
            raise ValueError("every outcome must carry positive probability")


class AbsContSpace(ProbSpace):
    """A measure absolutely continuous w.r.t. ``base``; null outcomes are kept but flagged."""

    def __init__(self, base: ProbSpace, density: Sequence):
        self.base = base
        self.density = tuple(to_rational(d) for d in density)
        super().__init__(b * d for b, d in zip(base.probs, self.density))


def conditional_expectation(X: Sequence, pi: Partition, space: ProbSpace) -> list:
    return space.cond_exp(X, pi)


def conditional_probability(A: Iterable[int], pi: Partition, space: ProbSpace) -> list:
    A = set(A)
    ind = [ONE if w in A else ZERO for w in range(space.n_outcomes)]
    return space.cond_exp(ind, pi)


def reweight(space: ProbSpace, density: Sequence) -> ProbSpace:
    """Apply ``density`` (dQ/dP) to ``space``.

    Returns an equivalent :class:`FiniteProbSpace` when the density is
    strictly positive on the support, else an :class:`AbsContSpace`.
    """
    d = [to_rational(x) for x in density]
    if len(d) != space.n_outcomes:
        raise ValueError("density length does not match the outcome count")
    if any(x < 0 for x in d):
        raise ValueError("density takes a negative value")
    total = space.expectation(d)
    if total != 1:
        raise ValueError(f"density integrates to {total}, not 1")
    if isinstance(space, FiniteProbSpace) and all(x > 0 for x in d):
        return FiniteProbSpace(p * x for p, x in zip(space.probs, d))
    return AbsContSpace(space, d)
