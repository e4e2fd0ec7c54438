"""A market model (space, filtration, assets, random time) and its JSON file format.

Rationals are written as ``"num/den"`` strings; integers are accepted on
input. ``tau`` entries are integers or ``"inf"``. Emission is canonical, so
``parse(emit(m)) == m`` and the digest is stable.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from functools import cached_property
from typing import Any

from .prob import FiniteProbSpace, Filtration, FiltrationError, Partition, format_rational, parse_rational
from .process import Process
from .randomtime import INF, Enlargement, RandomTime

__all__ = ["SCHEMA_VERSION", "Model", "ModelFormatError", "parse_model", "emit_model", "load_model", "save_model"]

SCHEMA_VERSION = 1


class ModelFormatError(ValueError):
    """Invalid model file; ``location`` is a JSON path such as ``assets[0][1][2]``."""

    def __init__(self, location: str, message: str):
        super().__init__(f"{location}: {message}")
        self.location = location


@dataclass(frozen=True)
class Model:
    space: FiniteProbSpace
    F: Filtration
    assets: tuple[Process, ...]
    tau: RandomTime

    def __post_init__(self):
        n, T = self.space.n_outcomes, self.F.horizon
        if self.F.n_outcomes != n:
            raise ValueError("filtration and space disagree on the outcome count")
        if not self.assets:
            raise ValueError("at least one asset is required")
        for k, S in enumerate(self.assets):
            if S.horizon != T or S.n_outcomes != n:
                raise ValueError(f"asset {k} has the wrong shape")
            chk = S.is_adapted(self.F)
            if not chk:
                raise ValueError(f"asset {k} is not adapted at t={chk.detail[0]}")
        if self.tau.n_outcomes != n:
            raise ValueError("tau has the wrong length")
        for w, s in enumerate(self.tau.values):
            if s != INF and s > T:
                raise ValueError(f"tau({w}) = {s} exceeds the horizon {T}")

    @property
    def horizon(self) -> int:
        return self.F.horizon

    @property
    def n_outcomes(self) -> int:
        return self.space.n_outcomes

    @cached_property
    def enlargement(self) -> Enlargement:
        return Enlargement(self.space, self.F, self.tau)

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "probabilities": [format_rational(p) for p in self.space.probs],
            "filtration": [[list(b) for b in part.blocks] for part in self.F.partitions],
            "assets": [[[format_rational(v) for v in row] for row in S.values] for S in self.assets],
            "tau": ["inf" if s == INF else s for s in self.tau.values],
        }

    def digest(self) -> str:
        return hashlib.sha256(emit_model(self).encode()).hexdigest()

    def relabel(self, perm) -> "Model":
        """Rename outcome ``w`` to ``perm[w]``."""
        return Model(
            self.space.relabel(perm),
            self.F.relabel(perm),
            tuple(S.relabel(perm) for S in self.assets),
            self.tau.relabel(perm),
        )


def _rational(value: Any, where: str):
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise ModelFormatError(where, f"expected a 'num/den' string, got {value!r}")
    try:
        return parse_rational(str(value))
    except (ValueError, ZeroDivisionError) as exc:
        raise ModelFormatError(where, f"malformed rational {value!r}") from exc


def _list(value: Any, where: str) -> list:
    if not isinstance(value, list):
        raise ModelFormatError(where, "expected a list")
    return value


def parse_model(data: Any) -> Model:
    """Validate a decoded JSON object and build a :class:`Model`."""
    if not isinstance(data, dict):
        raise ModelFormatError("$", "expected an object")
    for key in ("schema", "probabilities", "filtration", "assets", "tau"):
        if key not in data:
            raise ModelFormatError(key, "missing")
    if data["schema"] != SCHEMA_VERSION:
        raise ModelFormatError("schema", f"unsupported version {data['schema']!r}")

    probs = [_rational(p, f"probabilities[{w}]") for w, p in enumerate(_list(data["probabilities"], "probabilities"))]
    try:
        space = FiniteProbSpace(probs)
    except ValueError as exc:
        raise ModelFormatError("probabilities", str(exc)) from exc
    n = len(probs)

    parts = []
    for t, part in enumerate(_list(data["filtration"], "filtration")):
        blocks = []
        for i, b in enumerate(_list(part, f"filtration[{t}]")):
            b = _list(b, f"filtration[{t}][{i}]")
            for j, w in enumerate(b):
                if isinstance(w, bool) or not isinstance(w, int) or not 0 <= w < n:
                    raise ModelFormatError(f"filtration[{t}][{i}][{j}]", f"invalid outcome {w!r}")
            blocks.append(tuple(b))
        try:
            parts.append(Partition(tuple(blocks)))
        except ValueError as exc:
            raise ModelFormatError(f"filtration[{t}]", str(exc)) from exc
    if not parts:
        raise ModelFormatError("filtration", "empty")
    try:
        F = Filtration(tuple(parts))
    except FiltrationError as exc:
        raise ModelFormatError("filtration", str(exc)) from exc
    if F.n_outcomes != n:
        raise ModelFormatError("filtration", f"covers {F.n_outcomes} outcomes, expected {n}")
    T = F.horizon

    assets = []
    for k, S in enumerate(_list(data["assets"], "assets")):
        rows = _list(S, f"assets[{k}]")
        if len(rows) != T + 1:
            raise ModelFormatError(f"assets[{k}]", f"expected {T + 1} times, got {len(rows)}")
        table = []
        for t, row in enumerate(rows):
            row = _list(row, f"assets[{k}][{t}]")
            if len(row) != n:
                raise ModelFormatError(f"assets[{k}][{t}]", f"expected {n} outcomes, got {len(row)}")
            table.append([_rational(v, f"assets[{k}][{t}][{w}]") for w, v in enumerate(row)])
        proc = Process(table)
        chk = proc.is_adapted(F)
        if not chk:
            raise ModelFormatError(f"assets[{k}][{chk.detail[0]}]", "not measurable for the filtration")
        assets.append(proc)
    if not assets:
        raise ModelFormatError("assets", "at least one asset is required")

    taus = []
    for w, s in enumerate(_list(data["tau"], "tau")):
        if s == "inf":
            taus.append(INF)
        elif isinstance(s, int) and not isinstance(s, bool) and 0 <= s <= T:
            taus.append(s)
        else:
            raise ModelFormatError(f"tau[{w}]", f"expected an integer in 0..{T} or 'inf', got {s!r}")
    if len(taus) != n:
        raise ModelFormatError("tau", f"expected {n} entries, got {len(taus)}")
    return Model(space, F, tuple(assets), RandomTime(tuple(taus)))


def emit_model(model: Model) -> str:
    return json.dumps(model.to_dict(), sort_keys=True, indent=1) + "\n"


def load_model(path) -> Model:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"line {exc.lineno}", exc.msg) from exc
    return parse_model(data)


def save_model(model: Model, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(emit_model(model))
