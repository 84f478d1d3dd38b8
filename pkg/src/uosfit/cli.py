"""Command-line interface: fit, sweep, generate, score.

Exit codes: 0 on success, 1 on numeric failure, 2 on I/O or configuration
errors.  Reports are deterministic JSON (see dataio); set UOSFIT_THREADS to
run solver restarts in parallel.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .bundles import Bundle, distance_matrix, objective_e
from .dataio import format_float, generate, ingest, to_json, write_dataset_csv, write_json
from .errors import (
    DimensionMismatch,
    EmptyDataSet,
    IndexOutOfRange,
    InvalidSpec,
    LengthMismatch,
    ParseError,
    StructureMismatch,
    UosfitError,
)
from .sis import ShiftStructure, SISModel, sis_distance_matrix, solve_sis_bundle
from .solver import SolveConfig, solve, sparsity_curve
from .sparsity import encode, extract_dictionary
from .subspace import Subspace

SCHEMA_VERSION = 1

_CONFIG_ERRORS = (
    FileNotFoundError,
    IsADirectoryError,
    ParseError,
    InvalidSpec,
    StructureMismatch,
    LengthMismatch,
    DimensionMismatch,
    EmptyDataSet,
    IndexOutOfRange,
    json.JSONDecodeError,
    KeyError,
)


def _parse_range(text):
    """'3' -> [3]; '1:5' -> [1..5]; '1,3,5' -> [1, 3, 5]."""
    text = text.strip()
    try:
        if ":" in text:
            lo, hi = text.split(":", 1)
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        if "," in text:
            return [int(part) for part in text.split(",")]
        return [int(text)]
    except ValueError:
        raise InvalidSpec(f"cannot parse range {text!r}; use N, A:B or A,B,C") from None


def _threads():
    try:
        return max(1, int(os.environ.get("UOSFIT_THREADS", "1")))
    except ValueError:
        return 1


def _solve_config(args):
    return SolveConfig(
        l=args.l if isinstance(args.l, int) else args.l[0],
        n=args.n if isinstance(args.n, int) else args.n[0],
        restarts=args.restarts,
        seed=args.seed,
        init_strategy=args.init,
        rel_tol=args.rel_tol,
        max_iters=args.max_iters,
    )


def _config_echo(args, mode, extra=None):
    echo = {
        "input": args.input,
        "mode": mode,
        "restarts": args.restarts,
        "seed": args.seed,
        "init_strategy": args.init,
        "rel_tol": args.rel_tol,
        "max_iters": args.max_iters,
    }
    if mode == "sis":
        echo["signal_len"] = args.signal_len
        echo["shift_step"] = args.shift_step
        echo["input_format"] = args.input_format
    if extra:
        echo.update(extra)
    return echo


def _load_dataset(args, mode):
    complex_pairs = mode == "sis" and args.input_format == "spectra"
    dataset = ingest(args.input, complex_pairs=complex_pairs)
    if dataset.m == 0:
        raise EmptyDataSet(f"input file {args.input} holds no data rows")
    return dataset


def _structure(args):
    if args.signal_len is None or args.shift_step is None:
        raise InvalidSpec("sis mode requires --signal-len and --shift-step")
    return ShiftStructure(args.signal_len, args.shift_step)


def _euclidean_components(bundle):
    return [
        {"dim": sub.dim, "basis": [[float(v) for v in row] for row in sub.basis]}
        for sub in bundle
    ]


def _sis_components(models):
    out = []
    for mo in models:
        gens = [
            {"re": [float(v) for v in g.real], "im": [float(v) for v in g.imag]}
            for g in mo.generators
        ]
        out.append(
            {
                "length": mo.length,
                "per_freq_rank": [int(r) for r in mo.per_freq_rank],
                "generators": gens,
            }
        )
    return out


def _restart_stats(report):
    return {
        "per_restart_objectives": [float(v) for v in report.per_restart_objectives],
        "iterations_per_restart": [int(v) for v in report.iterations_per_restart],
        "objective_trace": [float(v) for v in report.objective_trace],
        "degenerate_flags": [bool(v) for v in report.degenerate_flags],
    }


def cmd_fit(args):
    t0 = time.perf_counter()
    mode = args.mode
    dataset = _load_dataset(args, mode)
    cfg = _solve_config(args)
    threads = _threads()

    doc = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "mode": mode,
        "config": _config_echo(args, mode, {"l": cfg.l, "n": cfg.n, "dedup_tol": args.dedup_tol}),
    }
    if mode == "euclidean":
        report = solve(dataset, cfg, threads=threads)
        dmat = distance_matrix(dataset, report.bundle)
        dictionary = extract_dictionary(report.bundle, args.dedup_tol)
        code = encode(dataset, report.bundle, report.partition, dictionary)
        doc["ambient_dim"] = dataset.ambient_dim
        doc["components"] = _euclidean_components(report.bundle)
        doc["dictionary"] = {
            "atoms": [[float(v) for v in a] for a in dictionary.atoms],
            "atom_to_subspace": [list(g) for g in dictionary.atom_to_subspace],
            "raw_atom_count": dictionary.raw_atom_count,
        }
        supports = []
        coefficients = []
        for i in range(dataset.m):
            nz = np.nonzero(code.columns[:, i])[0]
            supports.append([int(k) for k in nz])
            coefficients.append([float(code.columns[k, i]) for k in nz])
        doc["codes"] = {
            "support": supports,
            "coefficients": coefficients,
            "support_sizes": list(code.support_sizes),
        }
    else:
        structure = _structure(args)
        report = solve_sis_bundle(dataset, structure, cfg.l, cfg.n, cfg, threads=threads)
        dmat = sis_distance_matrix(dataset, report.bundle, structure)
        doc["components"] = _sis_components(report.bundle)

    assign = report.partition.assignment
    doc["objective"] = report.objective
    doc["converged"] = report.converged
    doc["assignment"] = [int(a) for a in assign]
    doc["residuals_sq"] = [float(dmat[i, assign[i]]) for i in range(dataset.m)]
    doc["labels"] = list(dataset.labels) if dataset.labels is not None else None
    doc["restarts"] = _restart_stats(report)
    if not args.no_timings:
        doc["timings"] = {"elapsed_s": time.perf_counter() - t0}

    text = write_json(args.report, doc)
    if args.verbose:
        sys.stdout.write(text)
    else:
        print(f"objective {format_float(report.objective)} -> {args.report}")
    return 0


def cmd_sweep(args):
    t0 = time.perf_counter()
    dataset = _load_dataset(args, "euclidean")
    l_values = _parse_range(args.l)
    n_values = _parse_range(args.n)
    base = SolveConfig(
        l=l_values[0],
        n=n_values[0],
        restarts=args.restarts,
        seed=args.seed,
        init_strategy=args.init,
        rel_tol=args.rel_tol,
        max_iters=args.max_iters,
    )
    rows = sparsity_curve(dataset, l_values, n_values, base, threads=_threads())

    doc = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "mode": "sweep",
        "config": _config_echo(args, "euclidean", {"l": args.l, "n": args.n}),
        "rows": [{"l": r.l, "n": r.n, "epsilon": r.epsilon} for r in rows],
    }
    if not args.no_timings:
        doc["timings"] = {"elapsed_s": time.perf_counter() - t0}
    write_json(args.report, doc)

    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write("l,n,epsilon\n")
            for r in rows:
                fh.write(f"{r.l},{r.n},{format_float(r.epsilon)}\n")
    print(f"{len(rows)} sweep rows -> {args.report}")
    return 0


def cmd_generate(args):
    dataset, _truth = generate(
        l=args.l,
        n=args.n,
        ambient_dim=args.ambient_dim,
        points_per_subspace=args.points_per_subspace,
        noise_sigma=args.noise_sigma,
        seed=args.seed,
    )
    write_dataset_csv(args.out, dataset, with_labels=not args.no_labels)
    print(f"{dataset.m} points in R^{dataset.ambient_dim} -> {args.out}")
    return 0


def _rebuild_euclidean(doc):
    ambient = int(doc["ambient_dim"])
    subs = []
    for comp in doc["components"]:
        dim = int(comp["dim"])
        basis = np.array(comp["basis"], dtype=np.float64).reshape(dim, ambient)
        subs.append(Subspace(ambient, basis))
    return Bundle(tuple(subs))


def _rebuild_sis(doc):
    cfgd = doc["config"]
    structure = ShiftStructure(int(cfgd["signal_len"]), int(cfgd["shift_step"]))
    models = []
    for comp in doc["components"]:
        length = int(comp["length"])
        gens = np.zeros((length, structure.signal_len), dtype=np.complex128)
        for i, g in enumerate(comp["generators"]):
            gens[i] = np.array(g["re"], dtype=np.float64) + 1j * np.array(g["im"], dtype=np.float64)
        models.append(
            SISModel(
                structure=structure,
                generators=gens,
                per_freq_rank=np.array(comp["per_freq_rank"], dtype=np.intp),
            )
        )
    return structure, tuple(models)


def cmd_score(args):
    with open(args.report, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    mode = doc["mode"]
    if mode == "euclidean":
        dataset = ingest(args.input)
        bundle = _rebuild_euclidean(doc)
        objective = objective_e(dataset, bundle)
    elif mode == "sis":
        structure, models = _rebuild_sis(doc)
        complex_pairs = doc["config"].get("input_format") == "spectra"
        dataset = ingest(args.input, complex_pairs=complex_pairs)
        objective = float(sis_distance_matrix(dataset, models, structure).min(axis=1).sum())
    else:
        raise InvalidSpec(f"cannot score a report of mode {mode!r}")

    out = {
        "objective": objective,
        "stored_objective": float(doc["objective"]),
    }
    text = to_json(out)
    if args.out:
        write_json(args.out, out)
    sys.stdout.write(text)
    return 0


def _add_common_solver_flags(p):
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--init", default="random_partition",
                   choices=["random_partition", "farthest_point"])
    p.add_argument("--rel-tol", type=float, default=1e-12)
    p.add_argument("--max-iters", type=int, default=1000)
    p.add_argument("--no-timings", action="store_true",
                   help="omit the timings section for byte-identical reports")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="uosfit",
        description="Fit optimal unions of subspaces (or shift-invariant models) to data.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit a bundle and write a JSON report")
    p_fit.add_argument("--input", required=True, help="CSV, one vector per row")
    p_fit.add_argument("--mode", default="euclidean", choices=["euclidean", "sis"])
    p_fit.add_argument("--l", type=int, required=True, help="number of subspaces")
    p_fit.add_argument("--n", type=int, required=True, help="max subspace dimension")
    p_fit.add_argument("--signal-len", type=int, default=None, help="M (sis mode)")
    p_fit.add_argument("--shift-step", type=int, default=None, help="L (sis mode)")
    p_fit.add_argument("--input-format", default="rows", choices=["rows", "spectra"],
                       help="sis input: real time-domain rows, or interleaved re,im spectra")
    p_fit.add_argument("--dedup-tol", type=float, default=0.0)
    p_fit.add_argument("--report", required=True)
    p_fit.add_argument("--verbose", action="store_true")
    _add_common_solver_flags(p_fit)
    p_fit.set_defaults(func=cmd_fit)

    p_sweep = sub.add_parser("sweep", help="sweep (l, n) and tabulate epsilon")
    p_sweep.add_argument("--input", required=True)
    p_sweep.add_argument("--l", required=True, help="range: N, A:B or A,B,C")
    p_sweep.add_argument("--n", required=True, help="range: N, A:B or A,B,C")
    p_sweep.add_argument("--report", required=True)
    p_sweep.add_argument("--csv", default=None, help="plot data: columns l,n,epsilon")
    _add_common_solver_flags(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    p_gen = sub.add_parser("generate", help="synthesize union-of-subspaces data")
    p_gen.add_argument("--l", type=int, required=True)
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--ambient-dim", type=int, required=True)
    p_gen.add_argument("--points-per-subspace", type=int, required=True)
    p_gen.add_argument("--noise-sigma", type=float, default=0.0)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--no-labels", action="store_true")
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=cmd_generate)

    p_score = sub.add_parser("score", help="re-evaluate a stored model on data")
    p_score.add_argument("--input", required=True)
    p_score.add_argument("--report", required=True, help="report JSON holding the model")
    p_score.add_argument("--out", default=None)
    p_score.set_defaults(func=cmd_score)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (UosfitError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
