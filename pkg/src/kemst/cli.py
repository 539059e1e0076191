"""Batch front end: generate scenarios, run the three regimes, query the
flip oracle, and audit runs. Each run writes a CSV trace (and optionally
an SVG plot) named after the scenario label and prints a one-line
summary."""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .errors import AuditFailure, ParameterError
from .event_stability import (
    TRACE_COLUMNS,
    approximation_audit,
    run_event_regime,
)
from .flip_oracle import minimax_flip_oracle
from .lipschitz import LIPSCHITZ_COLUMNS, run_lipschitz_regime
from .morph import TOPO_COLUMNS, diamond_rotation_certificate, run_topo_regime
from .scenario_io import build_generator, load_scenario, save_scenario
from .scenarios import GENERATORS
from .traces import svg_plot, write_csv

OUT_DIR_ENV = "KEMST_OUT_DIR"


def _out_dir(value: str | None) -> Path:
    if value:
        return Path(value)
    return Path(os.environ.get(OUT_DIR_ENV, "."))


def _load(path_or_name: str, args) -> "KineticScenario":
    p = Path(path_or_name)
    if p.exists():
        sc = load_scenario(p)
    elif path_or_name in GENERATORS:
        sc = build_generator(
            path_or_name,
            s=getattr(args, "s", None),
            n=getattr(args, "n", None),
            T=getattr(args, "T", None),
            e_len=getattr(args, "e_len", None),
            per_side=getattr(args, "per_side", None) or 6,
        )
    else:
        raise ParameterError(f"no such scenario file or generator: {path_or_name}")
    import dataclasses

    updates = {}
    if getattr(args, "k", None) is not None:
        updates["k"] = args.k
    if getattr(args, "K", None) is not None:
        updates["K"] = args.K
    if getattr(args, "label", None):
        updates["label"] = args.label
    return dataclasses.replace(sc, **updates) if updates else sc


def _event_job(payload: dict) -> tuple[str, int]:
    ns = argparse.Namespace(**payload["args"])
    sc = _load(payload["scenario"], ns)
    result = run_event_regime(sc, samples=ns.samples)
    out = _out_dir(ns.out_dir)
    csv_path = out / f"{sc.label}_event.csv"
    write_csv(csv_path, TRACE_COLUMNS, [r.row() for r in result.trace.records])
    if ns.svg:
        recs = result.trace.records
        svg_plot(
            out / f"{sc.label}_event.svg",
            [
                ("ratio", [r.time for r in recs], [r.ratio for r in recs]),
                ("tree_length", [r.time for r in recs], [r.tree_length for r in recs]),
            ],
            title=sc.label,
        )
    summary = (
        f"{sc.label} events={result.event_count} "
        f"max_ratio={result.trace.max_ratio():.6g}"
    )
    return summary, 0


def _topo_job(payload: dict) -> tuple[str, int]:
    ns = argparse.Namespace(**payload["args"])
    sc = _load(payload["scenario"], ns)
    result = run_topo_regime(sc, mode=ns.mode, samples=ns.samples, grid=ns.grid)
    out = _out_dir(ns.out_dir)
    write_csv(
        out / f"{sc.label}_topo.csv", TOPO_COLUMNS, [r.row() for r in result.records]
    )
    if ns.svg:
        svg_plot(
            out / f"{sc.label}_topo.svg",
            [
                (
                    "ratio",
                    [r.time for r in result.records],
                    [r.ratio for r in result.records],
                )
            ],
            title=sc.label,
        )
    flag = f" fallbacks={result.fallback_count}" if result.fallback_count else ""
    summary = (
        f"{sc.label} events={result.swap_count} "
        f"max_ratio={result.max_ratio:.6g}{flag}"
    )
    return summary, 0


def _lipschitz_job(payload: dict) -> tuple[str, int]:
    ns = argparse.Namespace(**payload["args"])
    sc = _load(payload["scenario"], ns)
    result = run_lipschitz_regime(sc, K=ns.K, trace_samples=ns.samples)
    out = _out_dir(ns.out_dir)
    write_csv(
        out / f"{sc.label}_lipschitz.csv",
        LIPSCHITZ_COLUMNS,
        [r.row() for r in result.records],
    )
    summary = (
        f"{sc.label} events={result.completed} max_ratio={result.ratio:.6g}"
    )
    return summary, 0


_JOB_FNS = {
    "run-event": _event_job,
    "run-topo": _topo_job,
    "run-lipschitz": _lipschitz_job,
}


def _run_many(cmd: str, args) -> int:
    payloads = [
        {"scenario": s, "args": vars(args)} for s in args.scenario
    ]
    fn = _JOB_FNS[cmd]
    if args.jobs > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(fn, payloads))
    else:
        results = [fn(p) for p in payloads]
    code = 0
    for summary, rc in results:
        print(summary)
        code = max(code, rc)
    return code


def _add_common_run_flags(p, samples_default=64):
    p.add_argument("scenario", nargs="+", help="scenario file(s) or generator name")
    p.add_argument("--out-dir", default=None, help=f"default ${OUT_DIR_ENV} or cwd")
    p.add_argument("--samples", type=int, default=samples_default)
    p.add_argument("--svg", action="store_true", help="also emit an SVG plot")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--seed", type=int, default=0, help="seed for sampled estimators")
    p.add_argument("--label", default=None)
    p.add_argument("--k", type=float, default=None)
    p.add_argument("--K", type=float, default=None)
    p.add_argument("--s", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--T", type=float, default=None)
    p.add_argument("--e-len", dest="e_len", type=float, default=None)
    p.add_argument("--per-side", dest="per_side", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="kemst",
        description="kinetic EMST stability experiments",
    )
    sub = ap.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="write a scenario file from a generator")
    g.add_argument("generator", choices=sorted(GENERATORS))
    g.add_argument("--s", type=int, default=None)
    g.add_argument("--n", type=int, default=None)
    g.add_argument("--T", type=float, default=None)
    g.add_argument("--e-len", dest="e_len", type=float, default=None)
    g.add_argument("--per-side", dest="per_side", type=int, default=6)
    g.add_argument("--k", type=float, default=None)
    g.add_argument("--K", type=float, default=None)
    g.add_argument("--morph-mode", dest="morph_mode", default=None)
    g.add_argument("--label", default=None)
    g.add_argument("--out", default=None, help="default <label>.json")

    e = sub.add_parser("run-event", help="displacement-budget maintenance run")
    _add_common_run_flags(e)

    t = sub.add_parser("run-topo", help="EMST morph run (slides/rotations)")
    _add_common_run_flags(t)
    t.add_argument("--mode", choices=["slide", "rotation"], default=None)
    t.add_argument("--grid", type=int, default=257)

    l = sub.add_parser("run-lipschitz", help="budgeted-slide run on the split scenario")
    _add_common_run_flags(l, samples_default=65)

    o = sub.add_parser("oracle", help="minimax flip-strategy ratio (small n)")
    o.add_argument("--scenario", required=True, help="file or generator name")
    o.add_argument("--mode", choices=["slide", "rotation"], default=None)
    o.add_argument("--time-steps", dest="time_steps", type=int, default=64)
    o.add_argument("--n", type=int, default=None)
    o.add_argument("--s", type=int, default=None)
    o.add_argument("--T", type=float, default=None)
    o.add_argument("--e-len", dest="e_len", type=float, default=None)
    o.add_argument("--per-side", dest="per_side", type=int, default=None)
    o.add_argument("--k", type=float, default=None)
    o.add_argument("--K", type=float, default=None)
    o.add_argument("--label", default=None)
    o.add_argument("--n-limit", dest="n_limit", type=int, default=7)

    a = sub.add_parser("audit", help="event run plus approximation audit")
    _add_common_run_flags(a)
    a.add_argument("--l", dest="l", type=int, default=1, help="spread neighbor rank")

    c = sub.add_parser("certify-diamond", help="rotation lower-bound certificate")
    c.add_argument("--per-side", dest="per_side", type=int, default=6)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.cmd == "gen":
            sc = build_generator(
                args.generator,
                s=args.s,
                n=args.n,
                T=args.T,
                e_len=args.e_len,
                per_side=args.per_side,
            )
            import dataclasses

            updates = {}
            if args.k is not None:
                updates["k"] = args.k
            if args.K is not None:
                updates["K"] = args.K
            if args.morph_mode:
                updates["morph_mode"] = args.morph_mode
            if args.label:
                updates["label"] = args.label
            if updates:
                sc = dataclasses.replace(sc, **updates)
            out = Path(args.out) if args.out else Path(f"{sc.label}.json")
            save_scenario(out, sc)
            print(f"{sc.label} wrote {out}")
            return 0
        if args.cmd in _JOB_FNS:
            return _run_many(args.cmd, args)
        if args.cmd == "oracle":
            sc = _load(args.scenario, args)
            res = minimax_flip_oracle(
                sc, mode=args.mode, time_steps=args.time_steps, n_limit=args.n_limit
            )
            print(f"{sc.label} oracle_ratio={res.ratio:.9g}")
            return 0
        if args.cmd == "audit":
            code = 0
            for path in args.scenario:
                sc = _load(path, args)
                result = run_event_regime(sc, samples=args.samples)
                try:
                    report = approximation_audit(result, sc, l=args.l)
                except AuditFailure as exc:
                    print(f"{sc.label} AUDIT FAIL: {exc} record={exc.record}")
                    code = 1
                    continue
                print(
                    f"{sc.label} events={result.event_count} "
                    f"max_ratio={report.max_ratio:.6g} "
                    f"max_slack={report.max_slack:.6g} bound={report.bound_4kn:.6g}"
                )
            return code
        if args.cmd == "certify-diamond":
            from .scenarios import gen_diamond

            cert = diamond_rotation_certificate(gen_diamond(args.per_side))
            print(
                f"diamond_q{args.per_side} blocking={cert.blocking_length:.9g} "
                f"emst={cert.emst_length:.9g} ratio={cert.ratio:.9g}"
            )
            return 0
    except AuditFailure as exc:
        print(f"AUDIT FAIL: {exc}", file=sys.stderr)
        return 1
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
