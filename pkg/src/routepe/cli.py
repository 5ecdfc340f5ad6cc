"""Command-line front end: gen, solve, encode, probe, stats and pipeline.

Stages hand off through files. Instances and solutions are JSON documents
(see :mod:`routepe.io`); reports are CSV with a leading ``#`` line holding
the schema version and the producing config as JSON.

Failures print one JSON line ``{"error": kind, "exit": code, "message": ...}``
to stderr and return the exit code listed in :data:`EXIT_CODES`.
"""

from __future__ import annotations

import argparse
import csv
import io as _stdio
import json
import sys
import zlib
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from . import io
from .core import Variant
from .errors import (ConfigError, DegenerateRouteError, InfeasibleInstanceError, NumericalError,
                     RoutePEError, SchemaError, StructuralError)
from .gen import GenConfig, calibrate_kappa, gen_instance
from .pe import ALL_METHODS, Method, PEConfig, encode
from .probe import anisometry, angular_entropy, probe_method, sample_pairs
from .solve import SearchConfig, solve, solve_rng

EXIT_CODES = {
    "usage": 2,
    "missing_file": 3,
    "no_solutions": 4,
    "schema": 5,
    "config": 6,
    "infeasible": 7,
    "numerical": 8,
    "internal": 9,
}


class CLIError(Exception):
    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


def fmt(x) -> str:
    """Six significant digits; ``None`` becomes an empty field."""
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return f"{float(x) + 0.0:.6g}"


def round6(x):
    return None if x is None else float(f"{float(x) + 0.0:.6g}")


# -- file handling ----------------------------------------------------------

def instance_filename(name: str) -> str:
    return f"{name}.json"


def _sort_key(path: Path, doc: dict):
    inst = doc.get("instance", doc)
    meta = inst.get("meta") or {}
    return (meta.get("generator", {}).get("variant", ""), meta.get("generator", {}).get("n", 0),
            meta.get("generator", {}).get("seed", 0), meta.get("index", 0), path.name)


def _load_dir(directory: str | Path, kind: str) -> list[tuple[Path, dict]]:
    d = Path(directory)
    if not d.is_dir():
        raise CLIError("missing_file", f"directory not found: {d}")
    docs = []
    for p in sorted(d.glob("*.json")):
        doc = io.read_json(p)
        if doc.get("kind") == kind:
            docs.append((p, doc))
    docs.sort(key=lambda pd: _sort_key(*pd))
    return docs


def _ensure_out_dir(path: str | Path) -> Path:
    p = Path(path)
    if p.exists() and not p.is_dir():
        raise CLIError("config", f"output path is not a directory: {p}")
    p.mkdir(parents=True, exist_ok=True)
    return p


def _map(fn: Callable, items: Sequence, jobs: int) -> list:
    """Ordered map; results follow ``items`` regardless of ``jobs``."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


def _write_text(path: str | Path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def _csv_text(header: dict, columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = _stdio.StringIO()
    buf.write("# " + json.dumps(header, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(x) if not isinstance(x, str) else x for x in row])
    return buf.getvalue()


# -- gen --------------------------------------------------------------------

def _gen_one(args: tuple[dict, int]) -> dict:
    cfg, index = args
    return io.instance_to_dict(gen_instance(GenConfig(**cfg), index))


def do_gen(variant: str, n: int, count: int, seed: int, out: str | Path, *, layout: str = "uniform",
           kappa: float | None = None, start: int = 0, jobs: int = 1) -> list[Path]:
    cfg = GenConfig(variant, n, layout, seed, kappa)
    if count < 1:
        raise ConfigError("count must be >= 1")
    out_dir = _ensure_out_dir(out)
    docs = _map(_gen_one, [(cfg.to_dict(), start + k) for k in range(count)], jobs)
    paths = []
    for doc in docs:
        p = out_dir / instance_filename(doc["name"])
        io.write_json(p, doc)
        paths.append(p)
    return paths


# -- solve ------------------------------------------------------------------

def _solve_one(args: tuple[dict, dict, int]) -> dict:
    doc, scfg, seed = args
    inst = io.instance_from_dict(doc)
    cfg = SearchConfig(**scfg)
    rng = solve_rng(seed, zlib.crc32(inst.name.encode()))
    sol, trace = solve(inst, cfg, rng)
    return io.solution_to_dict(inst, sol, extra={"trace_length": len(trace),
                                                 "config": {"seed": seed, "search": scfg}})


def do_solve(src: str | Path, out: str | Path, seed: int, *, budget: int = 2000, sigma: float = 0.02,
             decay: float = 0.9995, jobs: int = 1) -> list[Path]:
    docs = _load_dir(src, "instance")
    if not docs:
        raise CLIError("missing_file", f"no instance files in {src}")
    scfg = SearchConfig(budget=budget, sigma=sigma, decay=decay, seed=seed).to_dict()
    out_dir = _ensure_out_dir(out)
    sols = _map(_solve_one, [(doc, scfg, seed) for _, doc in docs], jobs)
    paths = []
    for doc in sols:
        p = out_dir / instance_filename(doc["name"])
        io.write_json(p, doc)
        paths.append(p)
    return paths


# -- encode -----------------------------------------------------------------

def _direction(arg: str, variant: Variant) -> str:
    if arg != "auto":
        return arg
    return "aware" if variant in (Variant.VRPTW, Variant.PDTSP) else "invariant"


def _pe_config(method, variant: Variant, opts: dict) -> PEConfig:
    return PEConfig(method=method, dim=opts["dim"], direction=_direction(opts["direction"], variant),
                    freq_mode=opts["freq"], bands=opts.get("bands"), ipe_bands=opts["ipe_bands"],
                    seed=opts["pe_seed"])


def _encode_one(args: tuple[dict, str, dict]) -> dict:
    doc, method, opts = args
    inst, sol = io.solution_from_dict(doc)
    emb = encode(inst, sol, _pe_config(method, inst.variant, opts))
    out = {
        "schema": io.SCHEMA_VERSION,
        "kind": "embedding",
        "name": inst.name,
        "method": emb.method,
        "config": emb.config,
        "layout": "row-major, one row per node id, row 0 is the depot",
        "shape": list(emb.vectors.shape),
        "vectors": emb.vectors.tolist(),
        "active": emb.active.astype(int).tolist(),
        "meta": emb.meta,
    }
    if emb.bias is not None:
        out["bias"] = emb.bias.tolist()
    return out


def do_encode(src: str | Path, out: str | Path, method: str, opts: dict, jobs: int = 1) -> list[Path]:
    docs = _load_dir(src, "solution")
    if not docs:
        raise CLIError("no_solutions", f"no solutions in {src}")
    Method.parse(method)
    out_dir = _ensure_out_dir(out)
    embs = _map(_encode_one, [(doc, method, opts) for _, doc in docs], jobs)
    paths = []
    for doc in embs:
        p = out_dir / f"{doc['name']}.{Method.parse(method).value}.json"
        io.write_json(p, doc)
        paths.append(p)
    return paths


# -- probe and stats --------------------------------------------------------

PROBE_COLUMNS = ("method", "rho_d1", "rho_d2", "rho_d3", "n_pairs_d1", "n_pairs_d3")
STATS_COLUMNS = ("problem", "CV", "max/min", "MAD", "entropy_mean", "entropy_min", "n_instances")


def parse_methods(text: str) -> list[Method]:
    if text.strip().lower() == "all":
        return list(ALL_METHODS)
    out = []
    for tok in text.split(","):
        m = Method.parse(tok)
        if m not in out:
            out.append(m)
    return out


def _load_solutions(src: str | Path):
    docs = _load_dir(src, "solution")
    if not docs:
        raise CLIError("no_solutions", f"no solutions in {src}")
    pairs = [io.solution_from_dict(doc) for _, doc in docs]
    return [p[0] for p in pairs], [p[1] for p in pairs]


def _vectors_one(args):
    doc, methods, opts = args
    inst, sol = io.solution_from_dict(doc)
    return [encode(inst, sol, _pe_config(m, inst.variant, opts)).vectors for m in methods]


def probe_reports(src: str | Path, methods: Sequence[Method], pairs: int, seed: int, opts: dict,
                  jobs: int = 1):
    docs = _load_dir(src, "solution")
    if not docs:
        raise CLIError("no_solutions", f"no solutions in {src}")
    insts, sols = zip(*(io.solution_from_dict(doc) for _, doc in docs))
    samples = sample_pairs(insts, sols, pairs, seed)
    per_sol = _map(_vectors_one, [(doc, methods, opts) for _, doc in docs], jobs)
    reports = []
    for k, m in enumerate(methods):
        cfg = _pe_config(m, insts[0].variant, opts).to_dict()
        reports.append(probe_method(m.value, samples, [v[k] for v in per_sol], cfg))
    return reports


def probe_csv(reports, header: dict) -> str:
    rows = [(r.method, r.rho_d1, r.rho_d2, r.rho_d3, r.n_pairs_d1, r.n_pairs_d3) for r in reports]
    return _csv_text(header, PROBE_COLUMNS, rows)


def stats_rows(src: str | Path, bins: int = 36, per_route: bool = False):
    insts, sols = _load_solutions(src)
    a = anisometry(insts, sols, per_route=per_route)
    e = angular_entropy(insts, sols, bins=bins)
    name = f"{insts[0].variant.name}-{insts[0].n_customers}"
    return [(name, a.cv, a.max_min, a.mad, e.mean, e.min, a.n_instances)], a, e


# -- argument parsing -------------------------------------------------------

def _add_pe_args(p: argparse.ArgumentParser, freq_default: str) -> None:
    p.add_argument("--dim", type=int, default=128)
    p.add_argument("--direction", choices=("auto", "aware", "invariant"), default="auto")
    p.add_argument("--freq", choices=("integer", "geometric", "integer_harmonic", "paper_geometric"),
                   default=freq_default)
    p.add_argument("--bands", type=int, default=None)
    p.add_argument("--ipe-bands", type=int, default=2)
    p.add_argument("--pe-seed", type=int, default=0)


def _pe_opts(ns) -> dict:
    return {"dim": ns.dim, "direction": ns.direction, "freq": ns.freq, "bands": ns.bands,
            "ipe_bands": ns.ipe_bands, "pe_seed": ns.pe_seed}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CLIError("usage", message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="routepe", description="Routing positional-encoding toolkit.")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate instances")
    g.add_argument("--variant", required=True, choices=[v.value for v in Variant])
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--layout", choices=("uniform", "clustered"), default="uniform")
    g.add_argument("--kappa", type=float, default=None)
    g.add_argument("--start", type=int, default=0)
    g.add_argument("--out", required=True)
    g.add_argument("--jobs", type=int, default=1)

    s = sub.add_parser("solve", help="solve every instance in a directory")
    s.add_argument("--in", dest="src", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--budget", type=int, default=2000)
    s.add_argument("--sigma", type=float, default=0.02)
    s.add_argument("--decay", type=float, default=0.9995)
    s.add_argument("--jobs", type=int, default=1)

    e = sub.add_parser("encode", help="write one embedding file per solution")
    e.add_argument("--method", required=True)
    e.add_argument("--in", dest="src", required=True)
    e.add_argument("--out", required=True)
    e.add_argument("--jobs", type=int, default=1)
    _add_pe_args(e, "integer")

    pr = sub.add_parser("probe", help="Spearman probes of PE distances")
    pr.add_argument("--solutions", required=True)
    pr.add_argument("--methods", default="all")
    pr.add_argument("--pairs", type=int, default=10000)
    pr.add_argument("--seed", type=int, required=True)
    pr.add_argument("--out", required=True)
    pr.add_argument("--format", choices=("csv", "json"), default="csv")
    pr.add_argument("--jobs", type=int, default=1)
    _add_pe_args(pr, "geometric")

    st = sub.add_parser("stats", help="anisometry and angular entropy")
    st.add_argument("--solutions", required=True)
    st.add_argument("--out", required=True)
    st.add_argument("--bins", type=int, default=36)
    st.add_argument("--per-route", action="store_true")

    pl = sub.add_parser("pipeline", help="gen, solve, probe and stats in one run")
    pl.add_argument("--variant", required=True, choices=[v.value for v in Variant])
    pl.add_argument("--n", type=int, required=True)
    pl.add_argument("--count", type=int, default=100)
    pl.add_argument("--seed", type=int, required=True)
    pl.add_argument("--kappa", type=float, default=None)
    pl.add_argument("--budget", type=int, default=2000)
    pl.add_argument("--methods", default="all")
    pl.add_argument("--pairs", type=int, default=10000)
    pl.add_argument("--out", default="pipeline_out")
    pl.add_argument("--jobs", type=int, default=1)
    _add_pe_args(pl, "geometric")
    return ap


# -- commands ---------------------------------------------------------------

def _cmd_gen(ns) -> None:
    do_gen(ns.variant, ns.n, ns.count, ns.seed, ns.out, layout=ns.layout, kappa=ns.kappa,
           start=ns.start, jobs=ns.jobs)


def _cmd_solve(ns) -> None:
    do_solve(ns.src, ns.out, ns.seed, budget=ns.budget, sigma=ns.sigma, decay=ns.decay, jobs=ns.jobs)


def _cmd_encode(ns) -> None:
    do_encode(ns.src, ns.out, ns.method, _pe_opts(ns), ns.jobs)


def _probe_header(ns, methods) -> dict:
    return {"schema": io.SCHEMA_VERSION, "kind": "probe_report",
            "config": {"methods": [m.value for m in methods], "pairs": ns.pairs, "seed": ns.seed,
                       "pe": _pe_opts(ns)}}


def _report_json(reports, header: dict) -> dict:
    doc = dict(header)
    doc["results"] = [{"method": r.method, "rho_d1": round6(r.rho_d1), "rho_d2": round6(r.rho_d2),
                       "rho_d3": round6(r.rho_d3), "n_pairs_d1": r.n_pairs_d1,
                       "n_pairs_d3": r.n_pairs_d3, "d3_ratio": round6(r.d3_ratio)} for r in reports]
    return doc


def _cmd_probe(ns) -> None:
    methods = parse_methods(ns.methods)
    if ns.pairs < 1:
        raise ConfigError("pairs must be >= 1")
    reports = probe_reports(ns.solutions, methods, ns.pairs, ns.seed, _pe_opts(ns), ns.jobs)
    header = _probe_header(ns, methods)
    if ns.format == "json":
        _write_text(ns.out, io.dumps(_report_json(reports, header)))
    else:
        _write_text(ns.out, probe_csv(reports, header))


def _stats_header(cfg: dict) -> dict:
    return {"schema": io.SCHEMA_VERSION, "kind": "stats_report", "config": cfg}


def _cmd_stats(ns) -> None:
    rows, _, _ = stats_rows(ns.solutions, ns.bins, ns.per_route)
    cfg = {"bins": ns.bins, "per_route": ns.per_route}
    _write_text(ns.out, _csv_text(_stats_header(cfg), STATS_COLUMNS, rows))


def _cmd_pipeline(ns) -> None:
    methods = parse_methods(ns.methods)
    root = _ensure_out_dir(ns.out)
    inst_dir, sol_dir = root / "instances", root / "solutions"
    if Variant.parse(ns.variant) is Variant.PCVRP and ns.kappa is None:
        ns.kappa = calibrate_kappa(ns.n, ns.seed)
    do_gen(ns.variant, ns.n, ns.count, ns.seed, inst_dir, kappa=ns.kappa, jobs=ns.jobs)
    do_solve(inst_dir, sol_dir, ns.seed, budget=ns.budget, jobs=ns.jobs)
    reports = probe_reports(sol_dir, methods, ns.pairs, ns.seed, _pe_opts(ns), ns.jobs)
    header = _probe_header(ns, methods)
    header["config"].update({"variant": ns.variant, "n": ns.n, "count": ns.count, "kappa": ns.kappa,
                             "budget": ns.budget})
    _write_text(root / "report.csv", probe_csv(reports, header))
    rows, a, e = stats_rows(sol_dir)
    stats_cfg = dict(header["config"], bins=36, per_route=False)
    _write_text(root / "stats.csv", _csv_text(_stats_header(stats_cfg), STATS_COLUMNS, rows))
    doc = _report_json(reports, header)
    doc["kind"] = "pipeline_report"
    doc["stats"] = {"cv": round6(a.cv), "max_min": round6(a.max_min), "mad": round6(a.mad),
                    "entropy_mean": round6(e.mean), "entropy_min": round6(e.min),
                    "entropy_per_k": {str(k): round6(v) for k, v in e.per_k.items()},
                    "n_instances": a.n_instances}
    _write_text(root / "report.json", io.dumps(doc))


COMMANDS = {"gen": _cmd_gen, "solve": _cmd_solve, "encode": _cmd_encode, "probe": _cmd_probe,
            "stats": _cmd_stats, "pipeline": _cmd_pipeline}


def _error_kind(exc: BaseException) -> str:
    if isinstance(exc, CLIError):
        return exc.kind
    if isinstance(exc, FileNotFoundError):
        return "missing_file"
    if isinstance(exc, SchemaError):
        return "schema"
    if isinstance(exc, (ConfigError, StructuralError, DegenerateRouteError)):
        return "config"
    if isinstance(exc, InfeasibleInstanceError):
        return "infeasible"
    if isinstance(exc, NumericalError):
        return "numerical"
    return "internal"


def run(argv: Sequence[str] | None = None) -> int:
    try:
        ns = build_parser().parse_args(argv)
        COMMANDS[ns.cmd](ns)
    except (CLIError, RoutePEError, OSError, ValueError) as exc:
        kind = _error_kind(exc)
        code = EXIT_CODES[kind]
        print(json.dumps({"error": kind, "exit": code, "message": str(exc)}), file=sys.stderr)
        return code
    return 0


def main() -> None:
    sys.exit(run())
