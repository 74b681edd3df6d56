"""Command-line front end.

Subcommands: gen, uniform-af, batch, sweep, variational, bound, bench.
Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, backend_name
from .evolve import IntegrationError, write_diagnostics
from .hamiltonian import SimParams
from .lhz import (
    IsingInstance,
    build_lhz,
    c_lower_bound,
    load_instance,
    save_instance,
)

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _add_sim_flags(sub: argparse.ArgumentParser) -> None:
    defaults = SimParams()
    sub.add_argument("--pump-final", type=float, default=defaults.pump_final)
    sub.add_argument("--detuning", type=float, default=defaults.detuning)
    sub.add_argument("--coupling", type=float, default=defaults.coupling,
                     help="drive/interaction scale xi in units of K")
    sub.add_argument("--four-body", type=float, default=defaults.four_body,
                     help="plaquette constraint strength C")
    sub.add_argument("--duration", type=float, default=defaults.duration)
    sub.add_argument("--levels", type=int, default=defaults.levels)
    sub.add_argument("--dt", type=float, default=defaults.dt)
    sub.add_argument("--correction", action="store_true",
                     help="enable the per-mode detuning correction")
    sub.add_argument("--correction-tracks", choices=("instant", "final"),
                     default=defaults.correction_tracks_pump)
    sub.add_argument("--renormalize", action="store_true")
    sub.add_argument("--tolerance", type=float, default=defaults.norm_tolerance,
                     help="norm drift tolerance")
    sub.add_argument("--method", choices=("rk4", "split"), default="rk4")
    sub.add_argument("--progress", action="store_true")


def _params_from_args(args) -> SimParams:
    params = SimParams(
        pump_final=args.pump_final,
        detuning=args.detuning,
        coupling=args.coupling,
        four_body=args.four_body,
        duration=args.duration,
        levels=args.levels,
        dt=args.dt,
        correction=args.correction,
        correction_tracks_pump=args.correction_tracks,
        renormalize=args.renormalize,
        norm_tolerance=args.tolerance,
    )
    params.validate()
    return params


def _load_or_uniform(args) -> IsingInstance:
    from .experiments import uniform_af_instance

    if args.instance is not None:
        return load_instance(args.instance)
    return uniform_af_instance(args.n_spins)


def _write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _write_metadata(out_dir: Path, command: str, extra: dict | None = None) -> None:
    meta = {
        "command": command,
        "version": __version__,
        "backend": backend_name(),
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }
    meta.update(extra or {})
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = [f"{key}: {val}" for key, val in meta.items()]
    (out_dir / "metadata.txt").write_text("\n".join(lines) + "\n")


def cmd_gen(args) -> int:
    from .experiments import gen_random_instance, instance_hash

    inst = gen_random_instance(args.n_spins, args.seed)
    if args.out:
        save_instance(inst, args.out)
        print(f"wrote {args.out} (key {instance_hash(inst)})")
    else:
        json.dump(
            {
                "n_spins": inst.n_spins,
                "couplings": [[i, j, v] for (i, j), v in sorted(inst.couplings.items())],
            },
            sys.stdout,
            indent=1,
        )
        print()
    return 0


def cmd_uniform_af(args) -> int:
    from .experiments import run_uniform_af
    from .variational import ground_signs, photon_prediction

    params = _params_from_args(args)
    out_dir = Path(args.out_dir)
    records = run_uniform_af(
        n_spins=args.n_spins,
        params=params,
        method=args.method,
        save_final_state=args.save_state,
        progress=args.progress,
    )

    from .experiments import uniform_af_instance

    inst = uniform_af_instance(args.n_spins)
    lhz = build_lhz(inst)
    signs = ground_signs(lhz, inst)
    preds = {
        label: photon_prediction(lhz, dataclasses.replace(params, correction=corr), signs)
        for label, corr in (("without", False), ("with", True))
    }

    rows = []
    for k in range(lhz.n_modes):
        rows.append(
            [
                k,
                int(lhz.degree[k]),
                f"{records['without'].mean_photons[k]:.6f}",
                f"{records['with'].mean_photons[k]:.6f}",
                f"{preds['without'][k]:.6f}",
                f"{preds['with'][k]:.6f}",
            ]
        )
    _write_csv(
        out_dir / "photons.csv",
        ["mode", "degree", "n_without", "n_with", "predicted_without", "predicted_with"],
        rows,
    )

    ground = set(records["without"].ground_configs)
    configs = sorted(set(records["without"].distribution) | set(records["with"].distribution))
    _write_csv(
        out_dir / "probabilities.csv",
        ["config", "p_without", "p_with", "is_ground"],
        [
            [
                c,
                f"{records['without'].distribution.get(c, 0.0):.9f}",
                f"{records['with'].distribution.get(c, 0.0):.9f}",
                int(c in ground),
            ]
            for c in configs
        ],
    )
    _write_metadata(out_dir, "uniform-af", {"runs": [r.key for r in records.values()]})
    for label, rec in records.items():
        print(f"{label}: P_s={rec.success:.4f} E_res={rec.residual:.4f} "
              f"n={np.round(rec.mean_photons, 3)}")
    return 0


def cmd_batch(args) -> int:
    from .experiments import run_batch

    params = _params_from_args(args)
    out_dir = Path(args.out_dir)
    result = run_batch(
        n_instances=args.instances,
        n_spins=args.n_spins,
        base_seed=args.seed,
        params=params,
        method=args.method,
        progress=args.progress,
    )
    header = [
        "seed",
        "instance_key",
        "success_uncorrected",
        "success_corrected",
        "residual_uncorrected",
        "residual_corrected",
        "improvement_rate",
    ]
    rows = [
        [
            r["seed"],
            r["instance_key"],
            f"{r['success_uncorrected']:.9f}",
            f"{r['success_corrected']:.9f}",
            f"{r['residual_uncorrected']:.9f}",
            f"{r['residual_corrected']:.9f}",
            f"{r['improvement_rate']:.6g}",
        ]
        for r in result["rows"]
    ]
    _write_csv(out_dir / "batch.csv", header, rows)
    _write_metadata(
        out_dir,
        "batch",
        {"aggregates": json.dumps(result["aggregates"]),
         "failures": json.dumps(result["failures"])},
    )
    print(json.dumps(result["aggregates"], indent=1))
    if result["failures"]:
        print(f"{len(result['failures'])} failures quarantined", file=sys.stderr)
    return 0


def cmd_sweep(args) -> int:
    from .experiments import run_sweep

    params = _params_from_args(args)
    out_dir = Path(args.out_dir)
    c_values = [float(x) for x in args.c_grid.split(",")]
    xi_values = [float(x) for x in args.xi_grid.split(",")]
    rows = run_sweep(
        c_values,
        xi_values,
        n_instances=args.instances,
        n_spins=args.n_spins,
        base_seed=args.seed,
        correction=args.correction,
        params=params,
        method=args.method,
        progress=args.progress,
    )
    _write_csv(
        out_dir / "sweep.csv",
        ["four_body", "coupling", "correction", "mean_success", "n_instances"],
        [
            [r["four_body"], r["coupling"], r["correction"],
             f"{r['mean_success']:.9f}", r["n_instances"]]
            for r in rows
        ],
    )
    _write_metadata(out_dir, "sweep")
    print(f"wrote {out_dir / 'sweep.csv'} ({len(rows)} grid points)")
    return 0


def cmd_variational(args) -> int:
    from .variational import ground_signs, photon_prediction, solve_meanfield

    params = _params_from_args(args)
    inst = _load_or_uniform(args)
    lhz = build_lhz(inst)
    signs = ground_signs(lhz, inst)
    sol = solve_meanfield(lhz, params, signs)
    if not sol.converged:
        print("mean-field Newton iteration did not converge", file=sys.stderr)
        return EXIT_NUMERICAL
    pred = photon_prediction(lhz, params, signs)
    rows = [
        [k, f"{pred[k]:.9f}", f"{sol.photons[k]:.9f}"]
        for k in range(lhz.n_modes)
    ]
    if args.out:
        _write_csv(Path(args.out), ["mode", "first_order", "newton"], rows)
        print(f"wrote {args.out}")
    else:
        print("mode,first_order,newton")
        for row in rows:
            print(",".join(str(x) for x in row))
    return 0


def cmd_bound(args) -> int:
    inst = _load_or_uniform(args)
    lhz = build_lhz(inst)
    print(f"{c_lower_bound(lhz):.10f}")
    return 0


def cmd_bench(args) -> int:
    from .benchmark import run_benchmark

    run_benchmark(n_modes=args.modes, levels=args.levels, repeats=args.repeats)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kponet",
        description="Parity-encoded Kerr-oscillator Ising machine simulator",
    )
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("gen", help="generate a random instance")
    p.add_argument("--n-spins", type=int, default=4)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=cmd_gen)

    p = subs.add_parser("uniform-af", help="uniform antiferromagnet study")
    p.add_argument("--n-spins", type=int, default=4)
    p.add_argument("--out-dir", type=Path, default=Path("results/uniform_af"))
    p.add_argument("--save-state", action="store_true")
    _add_sim_flags(p)
    p.set_defaults(func=cmd_uniform_af)

    p = subs.add_parser("batch", help="random-instance benchmark")
    p.add_argument("--n-spins", type=int, default=4)
    p.add_argument("--instances", type=int, default=20)
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--out-dir", type=Path, default=Path("results/batch"))
    _add_sim_flags(p)
    p.set_defaults(func=cmd_batch)

    p = subs.add_parser("sweep", help="(C, xi/K) grid sweep")
    p.add_argument("--n-spins", type=int, default=4)
    p.add_argument("--instances", type=int, default=5)
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--c-grid", default="0.1,0.2,0.3,0.4,0.5,0.6")
    p.add_argument("--xi-grid", default="0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8")
    p.add_argument("--out-dir", type=Path, default=Path("results/sweep"))
    _add_sim_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = subs.add_parser("variational", help="mean-field photon numbers")
    p.add_argument("--instance", type=Path, default=None)
    p.add_argument("--n-spins", type=int, default=4)
    p.add_argument("--out", type=Path, default=None)
    _add_sim_flags(p)
    p.set_defaults(func=cmd_variational)

    p = subs.add_parser("bound", help="constraint-strength lower bound")
    p.add_argument("--instance", type=Path, default=None)
    p.add_argument("--n-spins", type=int, default=4)
    p.set_defaults(func=cmd_bound)

    p = subs.add_parser("bench", help="compare compiled vs numpy kernels")
    p.add_argument("--modes", type=int, default=6)
    p.add_argument("--levels", type=int, default=13)
    p.add_argument("--repeats", type=int, default=5)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IntegrationError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
