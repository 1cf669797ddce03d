"""Command-line front end: ``tgr <command> ...``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import catalog as cat
from .detvar import kappa, stratum_codim
from .errors import (
    DEFAULT_CHART_BUDGET,
    DEFAULT_SPAIR_BUDGET,
    InternalConsistencyError,
    ResourceLimitError,
    StrategyError,
    limits,
)
from .georank import (
    classify_gr3,
    decide_slice_rank_leq,
    find_decomposition,
    gr_alternative,
    gr_direct,
)
from .polyring import FP, FieldSpec
from .tensor_core import LinearMatrix, Tensor, load_json_object

EXIT_FAIL, EXIT_PARSE, EXIT_RESOURCE, EXIT_CONSISTENCY = 1, 2, 3, 4


class ParseError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    field: FieldSpec = FP
    seed: int = 0
    spair_budget: int = DEFAULT_SPAIR_BUDGET
    chart_budget: int = DEFAULT_CHART_BUDGET
    output: str = "text"

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        return cls(args.field, args.seed, args.spair_budget, args.chart_budget, "json" if args.json else "text")


def _field_arg(text: str) -> FieldSpec:
    try:
        return FieldSpec.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def load_object(source: str, fld: FieldSpec) -> Tensor | LinearMatrix:
    """Resolve a file path or a ``catalog:`` / ``catalog-pencil:`` pseudo-path."""
    try:
        if source.startswith("catalog-pencil:"):
            entry = cat.catalog(source.split(":", 1)[1], fld)
            return entry.obj if entry.is_pencil else entry.obj.pencil(0)
        if source.startswith("catalog:"):
            return cat.catalog(source.split(":", 1)[1], fld).obj
        text = Path(source).read_text()
        return load_json_object(text, fld)
    except (KeyError, ValueError, TypeError, OSError, ZeroDivisionError) as exc:
        raise ParseError(f"cannot load {source!r}: {exc}") from exc


def load_tensor(source: str, fld: FieldSpec) -> Tensor:
    obj = load_object(source, fld)
    return obj.to_tensor() if isinstance(obj, LinearMatrix) else obj


def load_pencil(source: str, fld: FieldSpec, axis: int = 0) -> LinearMatrix:
    obj = load_object(source, fld)
    if isinstance(obj, LinearMatrix):
        return obj
    if obj.order != 3:
        raise ParseError("a pencil needs an order-3 tensor")
    return obj.pencil(axis)


def _emit(cfg: RunConfig, payload: dict, text: str):
    if cfg.output == "json":
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_gr(args, cfg: RunConfig) -> int:
    T = load_tensor(args.file, cfg.field)
    if T.order == 3:
        rep = gr_alternative(T)
        per_axis = [[list(p) for p in prof] for prof in rep.per_axis_minima]
        value = rep.value
        lines = [f"gr={value}"]
        for ax, prof in enumerate(rep.per_axis_minima):
            lines.append(f"axis {ax}: " + " ".join(f"i={i}:{v}" for i, v in prof) + f" (min at i={rep.achieving_i[ax]})")
        lines.append(f"direct codim={rep.direct_codim}")
        text = "\n".join(lines)
    else:
        value = gr_direct(T) if not T.is_zero() else 0
        per_axis = []
        text = f"gr={value}"
    _emit(cfg, {"gr": value, "per_axis": per_axis, "seed": cfg.seed}, text)
    return 0


def cmd_classify3(args, cfg: RunConfig) -> int:
    T = load_tensor(args.file, cfg.field)
    label = classify_gr3(T)
    _emit(cfg, {"label": label.label, "gr": label.evidence.get("gr"), "seed": cfg.seed}, label.label)
    return 0


def cmd_mlrank(args, cfg: RunConfig) -> int:
    T = load_tensor(args.file, cfg.field)
    ml = list(T.multilinear_ranks())
    _emit(cfg, {"ml": ml, "dims": list(T.dims)}, " ".join(map(str, ml)))
    return 0


def cmd_codim(args, cfg: RunConfig) -> int:
    E = load_pencil(args.file, cfg.field, args.axis)
    rep = stratum_codim(E, args.r)
    d = rep.dim_report
    _emit(
        cfg,
        {"r": args.r, "codim": d.codim, "ambient_dim": d.ambient_dim, "variety_dim": d.variety_dim},
        f"codim={d.codim}",
    )
    return 0


def cmd_kappa(args, cfg: RunConfig) -> int:
    E = load_pencil(args.file, cfg.field, args.axis)
    rep = kappa(E)
    _emit(
        cfg,
        {"kappa": rep.kappa, "side": rep.side, "row_kappa": rep.row_kappa, "column_kappa": rep.column_kappa},
        f"kappa={rep.kappa} side={rep.side}",
    )
    return 0


def cmd_sr_leq(args, cfg: RunConfig) -> int:
    T = load_tensor(args.file, cfg.field)
    dec = decide_slice_rank_leq(T, args.r)
    split = list(dec.witness[0]) if dec.witness else None
    _emit(cfg, {"r": args.r, "answer": dec.label, "split": split}, dec.label)
    return 0


def cmd_decompose(args, cfg: RunConfig) -> int:
    T = load_tensor(args.file, cfg.field)
    cands = None
    if args.candidate:
        cands = []
        for spec in args.candidate:
            try:
                axis, vec = spec.split(":", 1)
                cands.append((int(axis), [cfg.field(v) for v in vec.split(",")]))
            except ValueError as exc:
                raise ParseError(f"bad candidate {spec!r}; use AXIS:c1,c2,...") from exc
    cert = find_decomposition(T, cands, seed=cfg.seed, k=args.k)
    payload = {
        "kind": cert.kind,
        "gr_split": list(cert.gr_split),
        "steps": [{"axis": a, "phi": [cfg.field.format(c) for c in phi], "gr_after": g} for a, phi, _, g in cert.pieces],
        "seed": cfg.seed,
    }
    text = cert.kind if not cert.found else f"{cert.kind} gr_split={'+'.join(map(str, cert.gr_split))}"
    _emit(cfg, payload, text)
    return 0


def cmd_catalog(args, cfg: RunConfig) -> int:
    if not args.name:
        for name in cat.registry_names():
            print(name)
        return 0
    try:
        entry = cat.catalog(args.name, cfg.field)
    except (KeyError, ValueError) as exc:
        raise ParseError(str(exc)) from exc
    if cfg.output == "json":
        expected = {k: (v if not isinstance(v, dict) else {str(kk): vv for kk, vv in v.items()}) for k, v in entry.expected.items()}
        print(json.dumps({"name": entry.name, "expected": expected, "object": json.loads(entry.obj.to_json())}, sort_keys=True))
    else:
        print(entry.obj.to_json())
    return 0


def cmd_verify_paper(args, cfg: RunConfig) -> int:
    from .verify import run_all, select

    if not select(args.only):
        raise ParseError(f"no criterion matches {args.only!r}")
    echo = None if cfg.output == "json" else print
    results = run_all(args.only, cfg.field, cfg.seed, echo=echo)
    failed = [r for r in results if not r.passed]
    if cfg.output == "json":
        print(
            json.dumps(
                {
                    "passed": not failed,
                    "criteria": [
                        {"number": r.number, "name": r.name, "passed": r.passed, "detail": r.detail} for r in results
                    ],
                },
                sort_keys=True,
            )
        )
    else:
        print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    for r in failed:
        print(f"failed: {r.number} {r.name}", file=sys.stderr)
    return EXIT_FAIL if failed else 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    default_field = os.environ.get("TGR_FIELD", "fp")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", type=_field_arg, default=default_field, help="qq or fp:<prime> (env TGR_FIELD)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--spair-budget", type=int, default=DEFAULT_SPAIR_BUDGET)
    common.add_argument("--chart-budget", type=int, default=DEFAULT_CHART_BUDGET)
    common.add_argument("--json", action="store_true", help="machine-readable output")

    p = argparse.ArgumentParser(prog="tgr", description="Geometric rank and determinantal varieties of small tensors.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        sp.set_defaults(func=fn)
        return sp

    add("gr", cmd_gr, "geometric rank with per-axis strata").add_argument("file")
    add("classify3", cmd_classify3, "label a tensor by the GR <= 3 trichotomy").add_argument("file")
    add("mlrank", cmd_mlrank, "multilinear ranks").add_argument("file")
    sp = add("codim", cmd_codim, "codimension of the rank <= r stratum of a pencil")
    sp.add_argument("file")
    sp.add_argument("r", type=int)
    sp.add_argument("--axis", type=int, default=0)
    sp = add("kappa", cmd_kappa, "index of degeneracy of a pencil")
    sp.add_argument("file")
    sp.add_argument("--axis", type=int, default=0)
    sp = add("sr-leq", cmd_sr_leq, "decide slice rank <= r")
    sp.add_argument("file")
    sp.add_argument("r", type=int)
    sp = add("decompose", cmd_decompose, "search for a primitive + compression splitting")
    sp.add_argument("file")
    sp.add_argument("--candidate", action="append", help="hyperplane as AXIS:c1,c2,... (repeatable)")
    sp.add_argument("-k", type=int, default=64, help="number of random hyperplanes")
    add("catalog", cmd_catalog, "list the registry or export an entry as JSON").add_argument("name", nargs="?")
    add("verify-paper", cmd_verify_paper, "run the reproduction suite").add_argument(
        "--only", default=None, help="comma-separated criterion names or globs"
    )
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else 0
    if isinstance(args.field, str):
        try:
            args.field = FieldSpec.parse(args.field)
        except ValueError as exc:
            print(f"error: bad TGR_FIELD: {exc}", file=sys.stderr)
            return EXIT_PARSE
    cfg = RunConfig.from_args(args)
    try:
        with limits(spair_budget=cfg.spair_budget, chart_budget=cfg.chart_budget):
            return args.func(args, cfg)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (InternalConsistencyError, StrategyError) as exc:
        print(f"consistency failure: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY


if __name__ == "__main__":
    sys.exit(main())
