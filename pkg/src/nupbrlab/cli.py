"""Command-line front end: ``check``, ``deflate``, ``theorems`` and ``gen``.

Exit codes: 0 success (NUPBR holds, invariants hold, no disagreements),
3 violation (arbitrage found, invariant broken, theorem disagreement),
2 invalid input. Reports are JSON with sorted keys and exact rationals.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .decider import nupbr_check
from .deflator import DeflatorError, build_after, build_before, jump_ratio_identities
from .harness import GROUPS, SUITES, GenerationError, ModelGenParams, gen_model, run_suites
from .measures import (
    PredictableTime,
    qf_after,
    qg_after,
    qg_before,
    qprime,
    qt,
    qtilde,
    qtilde_prime,
)
from .model import Model, ModelFormatError, emit_model, load_model
from .prob import format_rational
from .process import Process, is_martingale, stop
from .randomtime import INF

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_VIOLATED = 3

MEASURES = {
    "QT": qt,
    "QtildeT": qtilde,
    "QprimeT": qprime,
    "QtildeprimeT": qtilde_prime,
    "QGbefore": qg_before,
    "QFafter": qf_after,
    "QGafter": qg_after,
}


class InputError(Exception):
    pass


def _table(P: Process) -> list:
    return [[format_rational(v) for v in row] for row in P.values]


def _emit(report: dict, out: str | None) -> None:
    text = json.dumps(report, sort_keys=True, indent=1) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load(path: str) -> Model:
    try:
        return load_model(path)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    except ModelFormatError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _require_finite_tau(model: Model, what: str) -> None:
    inf = [w for w, s in enumerate(model.tau.values) if s == INF]
    if inf:
        raise InputError(f"{what} needs a finite tau; tau = inf at outcomes {inf}")


def cmd_check(args) -> int:
    model = _load(args.model)
    enl = model.enlargement
    if args.mode == "after":
        _require_finite_tau(model, "--mode after")
    X = model.assets
    if args.mode == "stopped":
        X = tuple(stop(S, model.tau) for S in X)
    elif args.mode == "after":
        X = tuple(S - stop(S, model.tau) for S in X)
    filt = enl.G if args.filtration == "G" else model.F
    space = model.space
    if args.measure != "P":
        if args.at is None:
            raise InputError(f"--measure {args.measure} needs --at")
        try:
            T = PredictableTime.constant(model.n_outcomes, args.at)
            space = MEASURES[args.measure](enl, T)
        except ValueError as exc:
            raise InputError(f"--measure {args.measure} --at {args.at}: {exc}") from exc
    try:
        verdict = nupbr_check(X, filt, space)
    except ValueError as exc:
        raise InputError(f"--mode {args.mode} under {args.filtration}: {exc}") from exc
    report = {
        "command": "check",
        "model_digest": model.digest(),
        "filtration": args.filtration,
        "mode": args.mode,
        "measure": args.measure,
        "at": args.at,
        "holds": verdict.holds,
    }
    if args.measure != "P":
        report["density"] = [format_rational(x) for x in space.density]
    if verdict.holds:
        report["densities"] = _table(verdict.densities)
    else:
        w = verdict.witness
        report["witness"] = {
            "t": w.t,
            "atom": list(w.atom),
            "h": [format_rational(x) for x in w.h],
            "H": [_table(h) for h in w.H],
        }
    _emit(report, args.output)
    return EXIT_OK if verdict.holds else EXIT_VIOLATED


def cmd_deflate(args) -> int:
    model = _load(args.model)
    enl = model.enlargement
    try:
        if args.side == "before":
            defl = build_before(enl)
            tables = {"KG": defl.KG, "VG": defl.VG, "m_hat": defl.m_hat, "Ltilde_b": defl.Ltilde_b}
            L = defl.Ltilde_b
            rep = jump_ratio_identities(defl, None, enl)
            identity = {"before_mismatches": [list(p) for p in rep.before_mismatches],
                        "open_interval_gaps": [list(p) for p in rep.open_interval_gaps]}
            ok_identity = not rep.before_mismatches
        else:
            _require_finite_tau(model, "--side after")
            try:
                defl = build_after(enl)
            except ValueError as exc:
                raise InputError(f"--side after: {exc}") from exc
            tables = {"Ka": defl.Ka, "WG": defl.WG, "m_hat_a": defl.m_hat_a, "Ltilde_a": defl.Ltilde_a}
            L = defl.Ltilde_a
            rep = jump_ratio_identities(build_before(enl), defl, enl)
            identity = {"after_mismatches": [list(p) for p in rep.after_mismatches]}
            ok_identity = not rep.after_mismatches
    except DeflatorError as exc:
        _emit({"command": "deflate", "side": args.side, "model_digest": model.digest(), "error": str(exc)}, args.output)
        return EXIT_VIOLATED
    positive = all(v > 0 for row in L.values for v in row)
    martingale = bool(is_martingale(L, enl.G, model.space))
    report = {
        "command": "deflate",
        "side": args.side,
        "model_digest": model.digest(),
        "tables": {k: _table(v) for k, v in tables.items()},
        "invariants": {"positive": positive, "G_martingale": martingale, "jump_ratio_identity": ok_identity},
        "jump_ratio": identity,
    }
    _emit(report, args.output)
    return EXIT_OK if positive and martingale and ok_identity else EXIT_VIOLATED


def _params(args, seed: int = 0) -> ModelGenParams:
    try:
        return ModelGenParams(
            n_outcomes=args.max_outcomes,
            horizon=args.max_horizon,
            n_assets=args.max_assets,
            branching=args.branching,
            honest_only=getattr(args, "honest_only", False),
            force_before_set=getattr(args, "force_before_set", False),
            force_after_set=getattr(args, "force_after_set", False),
            seed=seed,
        )
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def cmd_theorems(args) -> int:
    if args.suite not in SUITES and args.suite not in GROUPS:
        raise InputError(f"unknown suite {args.suite!r}; choose from {sorted(SUITES) + sorted(GROUPS)}")
    if args.models < 0:
        raise InputError("--models must be nonnegative")
    params = _params(args)
    reports = run_suites(args.suite, args.models, args.seed, params, args.samples, max(1, args.jobs))
    body = {
        "command": "theorems",
        "suite": args.suite,
        "seed": args.seed,
        "models": args.models,
        "reports": [r.to_dict() for r in reports],
        "disagreements": sum(len(r.disagreements) for r in reports),
    }
    _emit(body, args.output)
    failures = [(r.theorem, c) for r in reports for c in r.disagreements]
    if failures:
        dump_dir = Path(args.output).parent if args.output else Path(".")
        for theorem, case in failures:
            path = dump_dir / f"disagreement-{theorem}-{args.seed}-{case['index']}.json"
            path.write_text(json.dumps(case["model"], sort_keys=True, indent=1) + "\n", encoding="utf-8")
            print(f"{theorem}: disagreement on model {case['index']}, dumped to {path}", file=sys.stderr)
        return EXIT_VIOLATED
    return EXIT_OK


def cmd_gen(args) -> int:
    try:
        model = gen_model(_params(args, args.seed))
    except GenerationError as exc:
        raise InputError(str(exc)) from exc
    text = emit_model(model)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _default_jobs() -> int:
    raw = os.environ.get("NUPBRLAB_JOBS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _gen_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-outcomes", type=int, default=8)
    p.add_argument("--max-horizon", type=int, default=3)
    p.add_argument("--max-assets", type=int, default=2)
    p.add_argument("--branching", type=int, default=3)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nupbrlab", description="Exact NUPBR checks under progressive enlargement.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="decide NUPBR of the assets (or a transform) for F or G")
    p.add_argument("model")
    p.add_argument("--filtration", choices=("F", "G"), default="F")
    p.add_argument("--mode", choices=("plain", "stopped", "after"), default="plain")
    p.add_argument("--measure", choices=("P",) + tuple(MEASURES), default="P")
    p.add_argument("--at", type=int, help="jump time T for the single-jump measures")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("deflate", help="build the explicit G-deflator and check its invariants")
    p.add_argument("model")
    p.add_argument("--side", choices=("before", "after"), default="before")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_deflate)

    p = sub.add_parser("theorems", help="run the theorem suites on seeded random models")
    p.add_argument("--suite", default="all", help="suite id or group: " + ", ".join(sorted(GROUPS)))
    p.add_argument("--models", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=3, help="random processes per model for universal statements")
    p.add_argument("--jobs", type=int, default=_default_jobs())
    _gen_flags(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_theorems)

    p = sub.add_parser("gen", help="generate a seeded random model file")
    p.add_argument("--seed", type=int, default=0)
    _gen_flags(p)
    p.add_argument("--honest-only", action="store_true")
    p.add_argument("--force-before-set", action="store_true")
    p.add_argument("--force-after-set", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"nupbrlab: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
