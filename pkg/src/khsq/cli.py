"""Command line entry point: ``khsq homology|sq|verify|dump``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from .burnside import functor_to_json, khovanov_functor
from .f2algebra import cochain_complex, homology_basis, homology_rows
from .harness import (
    FIXTURE_DIR,
    reports_json,
    sq_action_table,
    verify_suite,
)
from .linkio import LinkDiagram, PDParseError, format_pd, parse_pd
from .lssq import MATCHINGS, boundary_matching, chord_presentation, chords_svg, chords_tsv
from .moransq import SqEvalContext
from .semisimp import SpanOrder, lambda_of, spans_tsv

log = logging.getLogger("khsq")

JOBS_ENV = "KHSQ_JOBS"


class InputError(Exception):
    pass


@dataclass
class CliConfig:
    command: str
    source: str | None
    fmt: str
    seed: int | None
    reorders: int
    matching: str
    jobs: int


def _read_diagram(source: str, unknots: int | None) -> tuple[str, LinkDiagram]:
    path = Path(source)
    try:
        if path.is_file():
            return path.stem, parse_pd(path.read_text(), unknots)
        if source.lstrip().startswith(("PD", "unknots")):
            return "inline", parse_pd(source, unknots)
        bundled = FIXTURE_DIR / (source if source.endswith(".pd") else source + ".pd")
        if bundled.is_file():
            return bundled.stem, parse_pd(bundled.read_text(), unknots)
    except PDParseError as exc:
        raise InputError(f"{source}: {exc}") from exc
    raise InputError(f"{source}: no such file, bundled fixture, or inline PD code")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------- commands


def _cmd_homology(args, out) -> int:
    name, d = _read_diagram(args.pd, args.unknots)
    X = lambda_of(khovanov_functor(d))
    rows = homology_rows(cochain_complex(X))
    if args.format == "json":
        out.write(_dump({"schema": "khsq.homology/1", "diagram": name, "rows": rows}))
    else:
        out.write(f"# Kh over F2 of {name}: N={d.N} n+={d.n_plus} n-={d.n_minus}\n")
        out.write("i\tj\tdim\n")
        for r in rows:
            out.write(f"{r['i']}\t{r['j']}\t{r['dim']}\n")
        out.write(f"# total {sum(r['dim'] for r in rows)}\n")
    return 0


def _cmd_sq(args, out) -> int:
    name, d = _read_diagram(args.pd, args.unknots)
    methods = ("moran", "ls") if args.method == "both" else (args.method,)
    rows = sq_action_table(d, seed=args.seed, matching=args.matching, ops=(args.op,), methods=methods)
    agree = all(r["moran"] == r["ls"] for r in rows if "moran" in r and "ls" in r)
    if args.format == "json":
        out.write(
            _dump({"schema": "khsq.sq/1", "diagram": name, "op": args.op, "agree": agree, "rows": rows})
        )
    else:
        out.write(f"# {args.op} on Kh({name}); matrices are target x source\n")
        for r in rows:
            out.write(f"{args.op}: ({r['i']},{r['j']}) -> ({r['target_i']},{r['j']})\n")
            for kind in ("bockstein", "moran", "ls"):
                if kind in r:
                    out.write(f"  {kind:9s} {r[kind]}\n")
        if args.op == "sq2" and len(methods) == 2:
            out.write(f"# moran and ls matrices {'agree' if agree else 'DIFFER'}\n")
    if not agree:
        print("khsq: moran and ls square matrices differ", file=sys.stderr)
        return 1
    return 0


def _cmd_verify(args, out) -> int:
    if args.suite == (args.pd is not None):
        raise InputError("verify takes exactly one of <pd> or --suite")
    diagrams = None
    if not args.suite:
        name, d = _read_diagram(args.pd, args.unknots)
        diagrams = [(name, format_pd(d))]
    base = args.seed or 0
    seeds = (None,) + tuple(base + k for k in range(1, args.reorders + 1))
    matchings = ("disjoint", "nested") if args.matching == "both" else (args.matching,)
    reports = verify_suite(
        diagrams,
        jobs=args.jobs,
        seeds=seeds,
        matchings=matchings,
        identities=not args.no_identities,
        samples_per_block=args.samples,
        sample_seed=base,
        fault=args.inject,
    )
    if args.format == "json":
        out.write(reports_json(reports))
    else:
        for r in reports:
            out.write(r.to_text())
        ok = sum(r.passed for r in reports)
        out.write(f"# {ok}/{len(reports)} fixtures pass\n")
    failed = [r.fixture for r in reports if not r.passed]
    if failed:
        print(f"khsq: verification failed for {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


def _cmd_dump(args, out) -> int:
    name, d = _read_diagram(args.pd, args.unknots)
    F = khovanov_functor(d)
    if args.what == "functor":
        out.write(json.dumps(functor_to_json(F), sort_keys=True) + "\n")
        return 0
    X = lambda_of(F)
    order = SpanOrder(X, args.seed)
    if args.what == "spans":
        out.write(spans_tsv(X, order))
        return 0
    C = cochain_complex(X)
    svg_dir = Path(args.svg_dir) if args.svg_dir else None
    if svg_dir:
        svg_dir.mkdir(parents=True, exist_ok=True)
    for n, j in C.bidegrees():
        _, reps = homology_basis(C, n, j)
        for k, a in enumerate(reps):
            ctx = SqEvalContext(X, order, a)
            boundary_matching(ctx, args.matching)
            for z in ctx.candidates():
                P = chord_presentation(ctx, z)
                if not P.chords:
                    continue
                out.write(f"# class ({X.hom_degree(n)},{j})#{k} z={z}\n")
                out.write(chords_tsv(P))
                if svg_dir:
                    (svg_dir / f"{name}_{X.hom_degree(n)}_{j}_{k}_z{z}.svg").write_text(chords_svg(P))
    return 0


# ---------------------------------------------------------------- parser


def _default_jobs() -> int:
    try:
        return max(1, int(os.environ.get(JOBS_ENV, "1")))
    except ValueError:
        return 1


def _common(fmt: str = "text") -> argparse.ArgumentParser:
    # fresh per subcommand: parents share Action objects, hence defaults
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default=fmt)
    common.add_argument("--seed", type=int, default=None, help="seed for the base span order")
    common.add_argument("--unknots", type=int, default=None, help="unknot count for PD[] input")
    common.add_argument("-v", "--verbose", action="store_true")
    return common


def build_parser() -> argparse.ArgumentParser:

    p = argparse.ArgumentParser(prog="khsq", description="Khovanov homology over F2 and its second square.")
    sub = p.add_subparsers(dest="command", required=True)

    h = sub.add_parser("homology", parents=[_common()], help="F2 Khovanov dimensions")
    h.add_argument("pd", help="PD file, bundled fixture name, or inline PD[...]")

    s = sub.add_parser("sq", parents=[_common()], help="action of sq1 / sq2 on homology")
    s.add_argument("pd")
    s.add_argument("--op", choices=("sq1", "sq2"), default="sq2")
    s.add_argument("--method", choices=("moran", "ls", "both"), default="both")
    s.add_argument("--matching", choices=MATCHINGS[:2], default="disjoint")

    v = sub.add_parser("verify", parents=[_common("json")], help="theorem check and identity suite")
    v.add_argument("pd", nargs="?")
    v.add_argument("--suite", action="store_true", help="run every bundled fixture")
    v.add_argument("--reorders", type=int, default=3, help="seeded base orders besides the default")
    v.add_argument("--matching", choices=("disjoint", "nested", "both"), default="both")
    v.add_argument("--samples", type=int, default=32, help="random cocycles per block")
    v.add_argument("--no-identities", action="store_true")
    v.add_argument("--inject", choices=("III_leftbreak", "face_bijection"), default=None,
                   help="fault injection for sensitivity checks")
    v.add_argument("-j", "--jobs", type=int, default=_default_jobs(),
                   help=f"worker processes (default ${JOBS_ENV} or 1)")

    d = sub.add_parser("dump", parents=[_common()], help="debug dumps")
    d.add_argument("pd")
    d.add_argument("--what", choices=("functor", "spans", "chords"), required=True)
    d.add_argument("--matching", choices=MATCHINGS[:2], default="disjoint")
    d.add_argument("--svg-dir", default=None, help="also write chord pictures here")
    return p


def config_of(args: argparse.Namespace) -> CliConfig:
    return CliConfig(
        command=args.command,
        source=getattr(args, "pd", None),
        fmt=args.format,
        seed=args.seed,
        reorders=getattr(args, "reorders", 0),
        matching=getattr(args, "matching", "disjoint"),
        jobs=getattr(args, "jobs", 1),
    )


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(name)s: %(message)s",
        stream=sys.stderr,
    )
    handler = {
        "homology": _cmd_homology,
        "sq": _cmd_sq,
        "verify": _cmd_verify,
        "dump": _cmd_dump,
    }[args.command]
    try:
        return handler(args, out)
    except InputError as exc:
        print(f"khsq: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
