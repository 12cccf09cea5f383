"""Batch command-line front end.

Subcommands:
  replicate-table1  run the built-in 60-cell grid and emit one CSV row per cell
  run               execute a user-defined grid from a config file
  sample-network    export one small replication as node/edge tables or DOT

Given a seed, every command maps inputs to byte-identical data files;
wall-clock timestamps live only in the metadata sidecar.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import time
from datetime import datetime, timezone

import numpy as np

from . import __version__, netgen
from .config import ConfigError, load_config
from .dynamics import draw_shocks, update_traits
from .montecarlo import (
    CALIBRATED,
    Conventions,
    run_grid,
    table1_grid,
)
from .params import SimParams, validate
from .rng import derive_stream, standard_normals

TABLE1_COLUMNS = [
    "row",
    "retention_eta0",
    "formation_eta1",
    "retention_eta1",
    "bias",
    "coverage",
    "corr_t0",
    "corr_t1",
    "fpp_t0",
    "fpp_t1",
    "retention_rate",
]

RUN_COLUMNS = [
    "cell",
    "n",
    "b1",
    "formation_eta0",
    "formation_eta1",
    "retention_eta0",
    "retention_eta1",
    "bias",
    "coverage",
    "corr_t0",
    "corr_t1",
    "fpp_t0",
    "fpp_t1",
    "retention_rate",
    "replications",
    "degenerate",
    "error",
]

MIN_RECOMMENDED_REPS = 100

# Sample-network parameters from the illustrative figure: formation
# intercept -2.5, retention intercept 1, homophily 0.05 at both stages.
SAMPLE_NET_PARAMS = dict(
    eta0_form=-2.5, eta1_form=0.05, eta0_ret=1.0, eta1_ret=0.05
)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="peerbias",
        description="Monte Carlo audit of peer-influence estimation bias "
        "under homophilous friendship retention.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_table = sub.add_parser(
        "replicate-table1", help="run the built-in 60-cell grid"
    )
    _common_flags(p_table)
    p_table.add_argument("--n", type=int, default=1000, help="population size")
    p_table.add_argument(
        "--rows",
        type=str,
        default=None,
        help="comma-separated subset of table rows (1-60), e.g. 1,3,15",
    )
    p_table.add_argument(
        "--formation-eta0",
        type=float,
        default=CALIBRATED.formation_eta0,
        help="formation-stage probit intercept (default: calibrated value)",
    )
    p_table.set_defaults(func=cmd_replicate_table1)

    p_run = sub.add_parser("run", help="execute a grid from a config file")
    p_run.add_argument("config", help="path to the plain-text config file")
    _common_flags(p_run)
    p_run.set_defaults(func=cmd_run)

    p_net = sub.add_parser(
        "sample-network", help="export one small replication for visualization"
    )
    p_net.add_argument("--n", type=int, default=120)
    p_net.add_argument("--seed", type=int, default=0)
    p_net.add_argument(
        "--out", type=str, default="sample_network", help="output path prefix"
    )
    p_net.add_argument("--format", choices=("csv", "dot"), default="csv")
    p_net.set_defaults(func=cmd_sample_network)
    return parser


def _common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--seed", type=int, default=None, help="master seed")
    sub.add_argument(
        "--reps", type=int, default=None, help="replications per cell"
    )
    sub.add_argument(
        "--threads",
        type=int,
        default=None,
        help="worker processes (default: available parallelism; "
        "results are independent of this)",
    )
    sub.add_argument("--out", type=str, default=None, help="output CSV path")
    sub.add_argument(
        "--plot-data",
        type=str,
        default=None,
        help="also write long-format (row, statistic, value) CSV",
    )


def cmd_replicate_table1(args) -> int:
    seed = args.seed if args.seed is not None else 0
    reps = args.reps if args.reps is not None else 1000
    threads = args.threads if args.threads is not None else _default_threads()
    out = args.out if args.out is not None else "table1.csv"

    cells = table1_grid(
        replications=reps,
        master_seed=seed,
        n=args.n,
        formation_eta0=args.formation_eta0,
    )
    rows = _parse_rows(args.rows, len(cells))

    started = time.time()
    # Stream indices stay the table row position even for subsets, so a
    # subset run reproduces the corresponding full-run rows exactly.
    selected = [cells[row - 1] for row in rows]
    results = run_grid(
        selected,
        threads=threads,
        cell_indices=[row - 1 for row in rows],
        progress=lambda i, total, _s: _progress(f"cell {i + 1}/{total} done"),
    )
    records = []
    for row, s in zip(rows, results):
        cell = cells[row - 1]
        records.append(
            {
                "row": row,
                "retention_eta0": cell.eta0_ret,
                "formation_eta1": cell.eta1_form,
                "retention_eta1": cell.eta1_ret,
                "bias": s.bias,
                "coverage": s.coverage,
                "corr_t0": s.corr_t0,
                "corr_t1": s.corr_t1,
                "fpp_t0": s.friends_per_person_t0,
                "fpp_t1": s.friends_per_person_t1,
                "retention_rate": s.retention_rate,
            }
        )

    write_csv(out, TABLE1_COLUMNS, records)
    if args.plot_data:
        write_plot_data(args.plot_data, "row", records)
    _print_table(records)

    warnings = []
    if reps < MIN_RECOMMENDED_REPS:
        warnings.append("replications below recommended minimum")
    degenerate = sum(s.n_degenerate for s in results)
    write_metadata(
        out + ".meta",
        {
            "command": "replicate-table1",
            "seed": seed,
            "replications": reps,
            "n": args.n,
            "threads": threads,
            "rows": ",".join(str(r) for r in rows),
            "formation_eta0": args.formation_eta0,
            "degree_convention": CALIBRATED.degree,
            "center_differences": CALIBRATED.center_differences,
            "corr_t1_dyads": CALIBRATED.corr_t1_dyads,
            "fpp_t1_dyads": CALIBRATED.fpp_t1_dyads,
            "degenerate_replications": degenerate,
            "wall_time_s": round(time.time() - started, 3),
            "warnings": "; ".join(warnings),
        },
    )
    return 0


def cmd_run(args) -> int:
    grid = load_config(args.config)
    cells = grid.cells
    if args.seed is not None:
        cells = [c.with_(master_seed=args.seed) for c in cells]
    if args.reps is not None:
        cells = [c.with_(replications=args.reps) for c in cells]
    for cell in cells:
        validate(cell)
    threads = args.threads if args.threads is not None else grid.threads
    out = args.out if args.out is not None else "grid.csv"

    started = time.time()
    summaries = run_grid(
        cells,
        threads=threads,
        progress=lambda i, total, _s: _progress(f"cell {i + 1}/{total} done"),
    )
    records = []
    for index, (cell, s) in enumerate(zip(cells, summaries)):
        records.append(
            {
                "cell": index,
                "n": cell.n,
                "b1": cell.b1,
                "formation_eta0": cell.eta0_form,
                "formation_eta1": cell.eta1_form,
                "retention_eta0": cell.eta0_ret,
                "retention_eta1": cell.eta1_ret,
                "bias": s.bias,
                "coverage": s.coverage,
                "corr_t0": s.corr_t0,
                "corr_t1": s.corr_t1,
                "fpp_t0": s.friends_per_person_t0,
                "fpp_t1": s.friends_per_person_t1,
                "retention_rate": s.retention_rate,
                "replications": s.n_replications,
                "degenerate": s.n_degenerate,
                "error": s.error or "",
            }
        )
    write_csv(out, RUN_COLUMNS, records)
    if args.plot_data:
        write_plot_data(args.plot_data, "cell", records)

    warnings = []
    if cells[0].replications < MIN_RECOMMENDED_REPS:
        warnings.append("replications below recommended minimum")
    write_metadata(
        out + ".meta",
        {
            "command": "run",
            "config": args.config,
            "seed": cells[0].master_seed,
            "replications": cells[0].replications,
            "threads": threads,
            "cells": len(cells),
            "failed_cells": sum(1 for s in summaries if s.error),
            "degree_convention": CALIBRATED.degree,
            "center_differences": CALIBRATED.center_differences,
            "corr_t1_dyads": CALIBRATED.corr_t1_dyads,
            "fpp_t1_dyads": CALIBRATED.fpp_t1_dyads,
            "wall_time_s": round(time.time() - started, 3),
            "warnings": "; ".join(warnings),
        },
    )
    return 0


def cmd_sample_network(args) -> int:
    params = validate(
        SimParams(n=args.n, master_seed=args.seed, replications=1, **SAMPLE_NET_PARAMS)
    )
    rng = derive_stream(params.master_seed, 0, 0)
    y_t0 = params.trait_mean + params.trait_sd * standard_normals(rng, params.n)
    net_t0 = netgen.probit_ties(
        netgen.pairwise_difference(y_t0),
        params.eta0_form,
        params.eta1_form,
        rng,
        center=CALIBRATED.center_differences,
    )
    shocks = draw_shocks(params.n, params.shock_sd, rng)
    y_t1 = update_traits(y_t0, shocks, net_t0, params.b1)
    net_t1 = net_t0 & netgen.probit_ties(
        netgen.pairwise_difference(y_t1),
        params.eta0_ret,
        params.eta1_ret,
        rng,
        center=CALIBRATED.center_differences,
        center_mask=net_t0,
        draw_mask=net_t0,
    )

    deg_t0 = net_t0.sum(0) + net_t0.sum(1)
    deg_t1 = net_t1.sum(0) + net_t1.sum(1)
    if args.format == "dot":
        write_dot(f"{args.out}.dot", y_t0, y_t1, net_t0, net_t1, deg_t0, deg_t1)
    else:
        nodes = [
            {
                "id": i,
                "y_t0": y_t0[i],
                "y_t1": y_t1[i],
                "isolate_t0": int(deg_t0[i] == 0),
                "isolate_t1": int(deg_t1[i] == 0),
            }
            for i in range(params.n)
        ]
        write_csv(
            f"{args.out}_nodes.csv",
            ["id", "y_t0", "y_t1", "isolate_t0", "isolate_t1"],
            nodes,
        )
        edges = [
            {"source": i, "target": j, "wave": wave}
            for wave, net in (("t0", net_t0), ("t1", net_t1))
            for i, j in zip(*np.nonzero(net))
        ]
        write_csv(f"{args.out}_edges.csv", ["source", "target", "wave"], edges)
    return 0


def write_csv(path: str, columns: list, records: list) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, quoting=csv.QUOTE_MINIMAL)
        writer.writerow(columns)
        for record in records:
            writer.writerow([_format_value(record[c]) for c in columns])


def write_plot_data(path: str, key_column: str, records: list) -> None:
    """Long-format output: one row per (cell, statistic) pair."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, quoting=csv.QUOTE_MINIMAL)
        writer.writerow([key_column, "statistic", "value"])
        for record in records:
            for column, value in record.items():
                if column == key_column:
                    continue
                writer.writerow(
                    [_format_value(record[key_column]), column, _format_value(value)]
                )


def write_metadata(path: str, entries: dict) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(f"created_utc={datetime.now(timezone.utc).isoformat()}\n")
        for key, value in entries.items():
            handle.write(f"{key}={value}\n")


def write_dot(path, y_t0, y_t1, net_t0, net_t1, deg_t0, deg_t1) -> None:
    n = len(y_t0)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("digraph sample_network {\n")
        for i in range(n):
            isolate = "true" if deg_t0[i] == 0 and deg_t1[i] == 0 else "false"
            handle.write(
                f'  {i} [y_t0="{float(y_t0[i])!r}", y_t1="{float(y_t1[i])!r}", '
                f'isolate={isolate}];\n'
            )
        for wave, net in (("t0", net_t0), ("t1", net_t1)):
            for i, j in zip(*np.nonzero(net)):
                handle.write(f'  {i} -> {j} [wave="{wave}"];\n')
        handle.write("}\n")


def _format_value(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return value


def _parse_rows(spec, n_rows: int) -> list:
    if spec is None:
        return list(range(1, n_rows + 1))
    try:
        rows = sorted({int(part) for part in spec.split(",") if part.strip()})
    except ValueError as exc:
        raise ValueError(f"bad --rows value: {spec!r}") from exc
    if not rows:
        raise ValueError("no rows selected")
    for row in rows:
        if not 1 <= row <= n_rows:
            raise ValueError(f"row {row} out of range 1..{n_rows}")
    return rows


def _print_table(records: list) -> None:
    header = (
        f"{'row':>3} {'ret_e0':>6} {'form_e1':>7} {'ret_e1':>6} "
        f"{'bias':>6} {'cover':>6} {'corr0':>6} {'corr1':>6} "
        f"{'fpp0':>5} {'fpp1':>5} {'ret':>5}"
    )
    print(header)
    for r in records:
        print(
            f"{r['row']:>3} {r['retention_eta0']:>6.2f} {r['formation_eta1']:>7.4f} "
            f"{r['retention_eta1']:>6.3f} {r['bias']:>6.2f} {r['coverage']:>6.2f} "
            f"{r['corr_t0']:>6.2f} {r['corr_t1']:>6.2f} {r['fpp_t0']:>5.1f} "
            f"{r['fpp_t1']:>5.1f} {r['retention_rate']:>5.2f}"
        )


def _progress(message: str) -> None:
    print(message, file=sys.stderr, flush=True)


def _default_threads() -> int:
    return os.cpu_count() or 1


if __name__ == "__main__":
    sys.exit(main())
