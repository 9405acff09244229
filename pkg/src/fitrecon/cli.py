"""Command-line front end.

Every subcommand accepts ``--seed``, ``--out``, ``--format csv|json`` and
``--threads``. Primary outputs are written atomically; with ``--out`` a
``<out>.manifest.json`` sidecar records the command, configuration, input
digests, tool version and wall-clock duration. Failures exit nonzero with a
JSON error document on stderr.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import tempfile
import time
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from fitrecon import __version__
from fitrecon.bench import BenchmarkConfig, run_real_benchmark, run_synthetic_benchmark
from fitrecon.bootstrap import MODES, reconstruct
from fitrecon.ensemble import (
    FitnessEnsemble,
    calibrate_z,
    expected_degrees,
    fit_configuration_model,
    sample,
)
from fitrecon.errors import ReconstructionError, RichClubUndefined
from fitrecon.graph import FitnessVector, binarize, strengths
from fitrecon.io import (
    digest,
    fmt,
    ingest_degrees,
    ingest_edge_list,
    ingest_fitness,
    write_edge_list,
    write_fitness,
)
from fitrecon.metrics import PROPERTIES, exact_metrics

log = logging.getLogger("fitrecon")


class UsageError(ReconstructionError):
    def __init__(self, violations: List[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError([message])


# --- helpers -----------------------------------------------------------------


def _common(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--threads", type=int, default=1, help="worker cap; results do not depend on it")


def _parse_properties(text: str, violations: List[str]):
    props = tuple(s.strip() for s in text.split(",") if s.strip())
    bad = [s for s in props if s not in PROPERTIES]
    if bad or not props:
        violations.append(f"--properties: unknown {bad}; choose from {','.join(PROPERTIES)}")
    return props


def _parse_grid(text: str, violations: List[str]):
    out = []
    for item in text.split(","):
        item = item.strip()
        try:
            v = float(item)
        except ValueError:
            violations.append(f"--n-grid: {item!r} is not a number")
            continue
        if v <= 0:
            violations.append(f"--n-grid: {item!r} must be positive")
        elif v.is_integer() and "." not in item:
            out.append(int(v))
        elif 0 < v <= 1:
            out.append(v)
        else:
            violations.append(f"--n-grid: {item!r} must be an integer size or a fraction in (0, 1]")
    return tuple(out)


def _require_files(violations: List[str], **paths):
    for flag, path in paths.items():
        if path is not None and not Path(path).is_file():
            violations.append(f"--{flag.replace('_', '-')}: file not found: {path}")


def _generate_fitness(spec: str, seed: int, violations: List[str]) -> Optional[FitnessVector]:
    """``lognormal:mu,sigma,N`` or ``powerlaw:alpha,xmin,N``."""
    kind, _, params = spec.partition(":")
    try:
        a, b, n = (float(v) for v in params.split(","))
    except ValueError:
        violations.append(f"--fitness-gen: expected KIND:p1,p2,N, got {spec!r}")
        return None
    if not n.is_integer() or n < 3:
        violations.append("--fitness-gen: N must be an integer >= 3")
        return None
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(3,)))
    n = int(n)
    if kind == "lognormal":
        if b <= 0:
            violations.append("--fitness-gen: lognormal sigma must be positive")
            return None
        y = rng.lognormal(a, b, n)
    elif kind == "powerlaw":
        if a <= 1 or b <= 0:
            violations.append("--fitness-gen: powerlaw needs alpha > 1 and xmin > 0")
            return None
        y = b * (1.0 - rng.random(n)) ** (-1.0 / (a - 1.0))
    else:
        violations.append(f"--fitness-gen: unknown generator {kind!r} (lognormal, powerlaw)")
        return None
    return FitnessVector(y, tuple(str(i) for i in range(n)))


def _csv(header: List[str], rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join("" if v is None else (fmt(v) if isinstance(v, float) else str(v)) for v in row))
    return "\n".join(lines) + "\n"


def _json(doc) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _config_echo(args) -> Dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "func" and not k.startswith("_")}


# --- subcommands ---------------------------------------------------------------
# Each returns {suffix_or_path: text}; "" is the primary output.


def cmd_metrics(args) -> Dict[str, str]:
    g = binarize(ingest_edge_list(args.graph))
    props = [p for p in args.properties if p != "rich_club"]
    values = exact_metrics(g, props).values()
    if "rich_club" in args.properties:
        try:
            values["rich_club"] = exact_metrics(g, ["rich_club"]).rich_club
        except RichClubUndefined as exc:
            log.warning("%s", exc)
            values["rich_club"] = None
    values = {k: values[k] for k in args.properties}
    if args.format == "json":
        return {"": _json({"config": _config_echo(args), "n_nodes": g.n, "n_edges": g.n_edges, "metrics": values})}
    return {"": _csv(["property", "value"], values.items())}


def cmd_cm_fit(args) -> Dict[str, str]:
    wg = ingest_edge_list(args.graph)
    g = binarize(wg)
    fit = fit_configuration_model(g.degrees, tolerance=args.tol, max_iterations=args.max_iterations)
    y = ingest_fitness(args.fitness, wg.labels).values if args.fitness else None
    labels = wg.labels
    out = {}
    if args.format == "json":
        nodes = []
        for i, label in enumerate(labels):
            row = {"node": label, "degree": int(g.degrees[i]), "x": float(fit.x[i])}
            if y is not None:
                row["y"] = float(y[i])
            nodes.append(row)
        out[""] = _json({"config": _config_echo(args), "residual": fit.residual, "iterations": fit.iterations,
                         "nodes": nodes})
    else:
        header = ["node", "degree", "x"] + (["y"] if y is not None else [])
        rows = [[label, int(g.degrees[i]), float(fit.x[i])] + ([float(y[i])] if y is not None else [])
                for i, label in enumerate(labels)]
        out[""] = _csv(header, rows)
    if args.scatter:
        out[args.scatter] = _csv(["y", "x"], fit.scatter(y).tolist())
    return out


def cmd_calibrate(args) -> Dict[str, str]:
    y = ingest_fitness(args.fitness)
    obs = ingest_degrees(args.observed, y.labels)
    obs.validate(y.n)
    z = calibrate_z(y, obs.subset, obs.observed_degrees)
    k = expected_degrees(FitnessEnsemble(y, z))
    target = float(obs.observed_degrees.sum())
    residual = abs(float(k[obs.subset].sum()) - target)
    row = {"z": z, "residual": residual, "target": target, "n_observed": obs.size, "n_nodes": y.n}
    if args.format == "json":
        return {"": _json({"config": _config_echo(args), **row})}
    return {"": _csv(list(row), [list(row.values())])}


def cmd_reconstruct(args) -> Dict[str, str]:
    y = ingest_fitness(args.fitness)
    obs = ingest_degrees(args.observed, y.labels)
    est = reconstruct(y, obs, args.properties, mode=args.mode, samples=args.samples, seed=args.seed,
                      workers=args.threads)
    if args.format == "json":
        return {"": _json({"config": _config_echo(args), "estimates": [e.as_dict() for e in est]})}
    return {"": _csv(["property", "mean", "std", "method", "samples", "z"],
                     [[e.property, e.mean, e.std, e.method, e.samples, e.z] for e in est])}


def cmd_sample(args) -> Dict[str, str]:
    y = ingest_fitness(args.fitness)
    e = FitnessEnsemble(y, args.z)
    root = np.random.SeedSequence(args.seed)
    graphs = [sample(e, np.random.default_rng(s)) for s in root.spawn(args.count)]
    texts = []
    for g in graphs:
        if args.format == "json":
            texts.append(_json({"nodes": list(y.labels),
                                "edges": [[y.labels[i], y.labels[j]] for i, j in g.edges()]}))
        else:
            texts.append(write_edge_list(g, y.labels))
    if args.count == 1:
        return {"": texts[0]}
    ext = ".json" if args.format == "json" else ".csv"
    base = Path(args.out)
    stem = base.name[: -len(base.suffix)] if base.suffix else base.name
    return {str(base.with_name(f"{stem}_{c:04d}{base.suffix or ext}")): t for c, t in enumerate(texts)}


def _bench_config(args, mode: str, **extra) -> BenchmarkConfig:
    return BenchmarkConfig(
        n_values=args.n_grid,
        subsets=args.subsets,
        samples=args.samples,
        seed=args.seed,
        mode=mode,
        properties=args.properties,
        estimator=args.estimator,
        workers=args.threads,
        **extra,
    )


def cmd_bench_synthetic(args) -> Dict[str, str]:
    if args.fitness:
        y = ingest_fitness(args.fitness)
    else:
        y = args._generated
    cfg = _bench_config(args, "synthetic", target_density=args.density)
    result = run_synthetic_benchmark(y, cfg)
    out = {"": result.to_json() if args.format == "json" else result.to_csv()}
    if args.fitness_out:
        out[args.fitness_out] = write_fitness(y)
    return out


def cmd_bench_real(args) -> Dict[str, str]:
    wg = ingest_edge_list(args.graph)
    g = binarize(wg)
    y = ingest_fitness(args.fitness, wg.labels) if args.fitness else strengths(wg, args.strength)
    cfg = _bench_config(args, "real")
    result = run_real_benchmark(g, y, cfg)
    return {"": result.to_json() if args.format == "json" else result.to_csv()}


# --- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fitrecon", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"fitrecon {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("metrics", help="exact metrics of a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--properties", default=",".join(PROPERTIES))
    _common(p)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("cm-fit", help="configuration-model multipliers of a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--fitness")
    p.add_argument("--scatter", help="write the (y, x) scatter CSV here (needs --fitness)")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iterations", type=int, default=100_000)
    _common(p)
    p.set_defaults(func=cmd_cm_fit)

    p = sub.add_parser("calibrate", help="solve for the coupling z")
    p.add_argument("--fitness", required=True)
    p.add_argument("--observed", required=True)
    _common(p)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("reconstruct", help="estimate properties from partial degrees")
    p.add_argument("--fitness", required=True)
    p.add_argument("--observed", required=True)
    p.add_argument("--mode", choices=MODES, default="hybrid")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--properties", default=",".join(PROPERTIES))
    _common(p)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("sample", help="draw graphs from the fitness ensemble")
    p.add_argument("--fitness", required=True)
    p.add_argument("--z", type=float, required=True)
    p.add_argument("--count", type=int, default=1)
    _common(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("bench", help="rRMSE versus subset size")
    bench = p.add_subparsers(dest="bench_mode", parser_class=_Parser)
    bench.required = True
    for name in ("synthetic", "real"):
        b = bench.add_parser(name)
        if name == "synthetic":
            b.add_argument("--fitness")
            b.add_argument("--fitness-gen", help="lognormal:mu,sigma,N or powerlaw:alpha,xmin,N")
            b.add_argument("--fitness-out", help="also write the fitness vector used")
            b.add_argument("--density", type=float, default=0.5, help="target density of the ground truth")
            b.set_defaults(func=cmd_bench_synthetic)
        else:
            b.add_argument("--graph", required=True)
            b.add_argument("--fitness", help="default: node strengths of the graph")
            b.add_argument("--strength", choices=("out", "total"), default="out")
            b.set_defaults(func=cmd_bench_real)
        b.add_argument("--n-grid", default="0.05,0.1,0.25,0.5,1.0")
        b.add_argument("--subsets", type=int, default=100)
        b.add_argument("--samples", type=int, default=1000)
        b.add_argument("--estimator", choices=("plugin", "mc"), default="plugin")
        b.add_argument("--properties", default=",".join(PROPERTIES))
        _common(b)
    return parser


def _validate(args):
    v: List[str] = []
    if args.threads < 1:
        v.append("--threads must be >= 1")
    if hasattr(args, "properties") and isinstance(args.properties, str):
        args.properties = _parse_properties(args.properties, v)
    cmd = args.command
    _require_files(v, graph=getattr(args, "graph", None), fitness=getattr(args, "fitness", None),
                   observed=getattr(args, "observed", None))
    if cmd == "cm-fit":
        if args.tol <= 0:
            v.append("--tol must be positive")
        if args.max_iterations < 1:
            v.append("--max-iterations must be >= 1")
        if args.scatter and not args.fitness:
            v.append("--scatter requires --fitness")
    if cmd == "reconstruct" and args.mode in ("mc", "hybrid") and args.samples < 2:
        v.append("--samples must be >= 2 for Monte Carlo modes")
    if cmd == "sample":
        if not (args.z > 0 and math.isfinite(args.z)):
            v.append("--z must be positive and finite")
        if args.count < 1:
            v.append("--count must be >= 1")
        if args.count > 1 and not args.out:
            v.append("--count > 1 requires --out (files are numbered from it)")
    if cmd == "bench":
        args.n_grid = _parse_grid(args.n_grid, v)
        if args.subsets < 1:
            v.append("--subsets must be >= 1")
        if args.estimator == "mc" and args.samples < 2:
            v.append("--samples must be >= 2 for the mc estimator")
        if args.bench_mode == "synthetic":
            if not 0 < args.density < 1:
                v.append("--density must lie in (0, 1)")
            if bool(args.fitness) == bool(args.fitness_gen):
                v.append("give exactly one of --fitness or --fitness-gen")
            elif args.fitness_gen:
                args._generated = _generate_fitness(args.fitness_gen, args.seed, v)
    if v:
        raise UsageError(v)


def _write_atomic(outputs: Dict[str, str]):
    """Write all files via temporaries, renaming only once every write succeeded."""
    staged = []
    try:
        for path, text in outputs.items():
            path = Path(path)
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            staged.append((tmp, path))
    except BaseException:
        for tmp, _ in staged:
            os.unlink(tmp)
        raise
    for tmp, path in staged:
        os.replace(tmp, path)


def _manifest(args, argv, duration: float, outputs) -> str:
    inputs = {}
    for flag in ("graph", "fitness", "observed"):
        path = getattr(args, flag, None)
        if path:
            inputs[path] = digest(path)
    doc = {
        "command": " ".join(["fitrecon"] + list(argv)),
        "config": {k: (list(v) if isinstance(v, tuple) else v) for k, v in _config_echo(args).items()
                   if not k.startswith("_")},
        "seed": args.seed,
        "inputs_sha256": inputs,
        "outputs": sorted(str(p) for p in outputs),
        "version": __version__,
        "duration_seconds": duration,
    }
    graph = getattr(args, "graph", None)
    if graph:
        doc["node_order"] = list(ingest_edge_list(graph).labels)
    return _json(doc)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    start = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
        _validate(args)
        produced = args.func(args)
        primary = produced.pop("", None)
        outputs = dict(produced)
        if primary is not None:
            if args.out:
                outputs[args.out] = primary
            else:
                sys.stdout.write(primary)
        if args.out:
            outputs[f"{args.out}.manifest.json"] = _manifest(args, argv, time.perf_counter() - start, outputs)
        _write_atomic(outputs)
    except UsageError as exc:
        sys.stderr.write(json.dumps({"error": "usage", "message": str(exc), "violations": exc.violations}) + "\n")
        return 2
    except (ReconstructionError, OSError) as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 1
    except SystemExit as exc:
        # --help / --version
        return int(exc.code or 0)
    except Exception as exc:
        sys.stderr.write(json.dumps({"error": "internal", "message": f"{type(exc).__name__}: {exc}"}) + "\n")
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
