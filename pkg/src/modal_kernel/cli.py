"""Command line driver.

Reports go to stdout (JSON by default, delimited text with
``--format text``), diagnostics go to stderr.  Exit codes: 0 on
success, 2 for input validation errors, 3 for numerical contract
violations.  The MODAL_KERNEL_TOLERANCES environment variable may name
a JSON file overriding the run configuration.  Several subcommands
accept ``--plot FILE`` to render a figure alongside the report.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances, tolerances_from_mapping
from .decoherence import DecoherenceModel, cross_term_report, generate_decohered_state, \
    triorthogonal_check
from .envariance import run_envariance_trials
from .errors import ContractViolation, ValidationError
from .hilbert import HermitianOperator, PureState
from .io import emit, load_observable, load_state, matrix_pairs, basis_pairs
from .lattice import DefiniteLattice, definite_lattice, modal_lattice, orthodox_lattice
from .measure import born_measure, sample_counts
from .schmidt import decompose
from .stability import degeneracy_sweep

ENV_CONFIG = "MODAL_KERNEL_TOLERANCES"

_CONFIG_KEYS = {"seed", "output_format"}


@dataclass(frozen=True)
class RunConfig:
    """Run-wide settings: tolerances, default seed, and output format."""

    tolerances: Tolerances = DEFAULT_TOLERANCES
    seed: int | None = None
    output_format: str = "json"


def load_run_config(environ=None) -> RunConfig:
    """Build the run configuration, honoring the config file env var."""
    env = os.environ if environ is None else environ
    path = env.get(ENV_CONFIG)
    if not path:
        return RunConfig()
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise ValidationError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ValidationError(f"config file {path} must hold a JSON object")
    fields = {k: v for k, v in data.items() if k not in _CONFIG_KEYS}
    tolerances = tolerances_from_mapping(fields)
    seed = data.get("seed")
    if seed is not None and not isinstance(seed, int):
        raise ValidationError(f"config file {path}: 'seed' must be an integer")
    output_format = data.get("output_format", "json")
    if output_format not in ("json", "text"):
        raise ValidationError(
            f"config file {path}: 'output_format' must be 'json' or 'text'")
    return RunConfig(tolerances=tolerances, seed=seed, output_format=output_format)


def _float_row(values) -> str:
    return "\t".join(repr(float(v)) for v in values)


def _text_table(header: Sequence[str], rows) -> str:
    lines = ["\t".join(header)]
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, float):
                cells.append(repr(cell))
            else:
                cells.append(str(cell))
        lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"


def _resolve_lattice(args, state: PureState, tols: Tolerances) -> DefiniteLattice:
    if getattr(args, "preferred", None):
        observable = load_observable(args.preferred, herm_tol=tols.herm_tol)
        return definite_lattice(state, observable, cluster_tol=tols.cluster_tol,
                                rank_tol=tols.rank_tol)
    if getattr(args, "orthodox", False):
        return orthodox_lattice(state)
    if getattr(args, "modal", False) or state.num_factors == 2:
        return modal_lattice(state, cluster_tol=tols.cluster_tol,
                             rank_tol=tols.rank_tol)
    return orthodox_lattice(state)


def _add_lattice_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--preferred", metavar="OBSFILE",
                       help="build the lattice from the observable in OBSFILE")
    group.add_argument("--modal", action="store_true",
                       help="use the factorization-preferred lattice (default for "
                            "two-factor states)")
    group.add_argument("--orthodox", action="store_true",
                       help="use the trivial preferred observable")


def _cmd_decompose(args, config: RunConfig) -> tuple[str, int]:
    tols = config.tolerances
    state = load_state(args.state, norm_tol=tols.norm_tol)
    sd = decompose(state, tols.cluster_tol, rank_tol=tols.rank_tol)
    clusters = []
    for cluster in sd.clusters:
        clusters.append({
            "weight": cluster.weight,
            "multiplicity": cluster.multiplicity,
            "coefficients": [ [z.real, z.imag] for z in cluster.coefficients ],
            "left_basis": basis_pairs(cluster.left_basis),
            "right_basis": basis_pairs(cluster.right_basis),
        })
    payload = {"left_dim": sd.left_dim, "right_dim": sd.right_dim,
               "cluster_tol": sd.cluster_tol, "clusters": clusters}
    if args.plot:
        from .plots import render_weight_bars
        labels = [f"cluster {i}" for i in range(len(sd.clusters))]
        render_weight_bars(labels, [c.weight for c in sd.clusters], args.plot,
                           title="decomposition weights")
    if config.output_format == "text":
        rows = [(i, c.weight, c.multiplicity)
                for i, c in enumerate(sd.clusters)]
        return _text_table(("cluster", "weight", "multiplicity"), rows), 0
    return emit(payload), 0


def _cmd_lattice(args, config: RunConfig) -> tuple[str, int]:
    tols = config.tolerances
    state = load_state(args.state, norm_tol=tols.norm_tol)
    lat = _resolve_lattice(args, state, tols)
    weights = born_measure(state, lat).atom_weights
    atoms = []
    for subspace, label, weight in zip(lat.atoms, lat.labels, weights):
        atoms.append({"label": label, "dimension": subspace.rank,
                      "weight": float(weight), "basis": basis_pairs(subspace)})
    payload = {"ambient_dim": lat.ambient_dim, "atoms": atoms}
    if config.output_format == "text":
        rows = [(a["label"], a["dimension"], a["weight"]) for a in atoms]
        return _text_table(("label", "dimension", "weight"), rows), 0
    return emit(payload), 0


def _cmd_born(args, config: RunConfig) -> tuple[str, int]:
    tols = config.tolerances
    state = load_state(args.state, norm_tol=tols.norm_tol)
    lat = _resolve_lattice(args, state, tols)
    weights = born_measure(state, lat).atom_weights
    payload = {"atoms": [{"label": label, "weight": float(weight)}
                         for label, weight in zip(lat.labels, weights)]}
    if args.plot:
        from .plots import render_weight_bars
        render_weight_bars(list(lat.labels), list(map(float, weights)), args.plot)
    if config.output_format == "text":
        rows = list(zip(lat.labels, (float(w) for w in weights)))
        return _text_table(("label", "weight"), rows), 0
    return emit(payload), 0


def _cmd_sample(args, config: RunConfig) -> tuple[str, int]:
    tols = config.tolerances
    seed = args.seed if args.seed is not None else config.seed
    if seed is None:
        raise ValidationError("a seed is required (pass --seed or set one in the "
                              "config file)")
    state = load_state(args.state, norm_tol=tols.norm_tol)
    lat = _resolve_lattice(args, state, tols)
    measure = born_measure(state, lat)
    counts = sample_counts(measure, lat, args.n, seed)
    payload = {"n": args.n, "seed": seed,
               "counts": [{"label": label, "count": int(count)}
                          for label, count in zip(lat.labels, counts)]}
    if args.plot:
        from .plots import render_count_bars
        render_count_bars(list(lat.labels), [int(c) for c in counts], args.plot)
    if config.output_format == "text":
        rows = list(zip(lat.labels, (int(c) for c in counts)))
        return _text_table(("label", "count"), rows), 0
    return emit(payload), 0


def _cmd_envariance(args, config: RunConfig) -> tuple[str, int]:
    seed = args.seed if args.seed is not None else config.seed
    if seed is None:
        raise ValidationError("a seed is required (pass --seed or set one in the "
                              "config file)")
    report = run_envariance_trials(args.trials, args.dim, seed)
    payload = {"trials": report.trials, "dim": report.dim, "seed": report.seed,
               "max_unitarity_defect": report.max_unitarity_defect,
               "max_invariance_defect": report.max_invariance_defect,
               "max_row_sum_defect": report.max_row_sum_defect,
               "pass": report.passed}
    if config.output_format == "text":
        rows = [(key, value) for key, value in payload.items()]
        out = _text_table(("field", "value"), rows)
    else:
        out = emit(payload)
    return out, 0 if report.passed else 3


def _cmd_decohere(args, config: RunConfig) -> tuple[str, int]:
    tols = config.tolerances
    coeffs = np.full(args.branches, 1.0 / np.sqrt(args.branches))
    model = DecoherenceModel(system_dim=args.branches, env_qubits=args.qubits,
                             branch_coefficients=coeffs,
                             env_rotation_angles=np.full(args.qubits, args.theta))
    state = generate_decohered_state(model)
    if args.observable:
        observable = load_observable(args.observable, herm_tol=tols.herm_tol)
    else:
        # default probe: uniform mixing observable (all entries 1)
        observable = HermitianOperator(np.ones((args.branches, args.branches)))
    report = cross_term_report(state, observable, model.branches(),
                               recon_tol=tols.recon_tol)
    payload = {"branches": args.branches, "env_qubits": args.qubits,
               "theta": args.theta,
               "cross_magnitude": report.cross_magnitude,
               "additivity_defect": report.additivity_defect,
               "overlaps": matrix_pairs(report.overlaps)}
    if args.plot:
        from .plots import render_overlap_heatmap
        render_overlap_heatmap(report.overlaps, args.plot)
    if config.output_format == "text":
        lines = [("cross_magnitude", report.cross_magnitude),
                 ("additivity_defect", report.additivity_defect)]
        m = report.overlaps.shape[0]
        for i in range(m):
            for j in range(m):
                z = report.overlaps[i, j]
                lines.append((f"overlap_{i}_{j}", f"{z.real!r}\t{z.imag!r}"))
        rows = [(key, value if isinstance(value, str) else repr(float(value)))
                for key, value in lines]
        return _text_table(("field", "value"), rows), 0
    return emit(payload), 0


def _cmd_triortho(args, config: RunConfig) -> tuple[str, int]:
    tols = config.tolerances
    state = load_state(args.state, norm_tol=tols.norm_tol)
    verdict = triorthogonal_check(state, cluster_tol=tols.cluster_tol,
                                  rank_tol=tols.rank_tol,
                                  ortho_tol=tols.ortho_tol)
    if config.output_format == "text":
        return _text_table(("field", "value"), [("result", verdict.value)]), 0
    return emit({"result": verdict.value}), 0


def _cmd_stability(args, config: RunConfig) -> tuple[str, int]:
    try:
        gaps = [float(g) for g in args.gaps.split(",") if g.strip()]
    except ValueError as exc:
        raise ValidationError(f"--gaps must be a comma-separated list of reals: {exc}")
    seed = args.seed if args.seed is not None else config.seed
    points = degeneracy_sweep(gaps, args.delta,
                              seed=seed, trials=args.trials,
                              randomize=args.randomize)
    payload = {"delta": args.delta,
               "rows": [{"gap": p.gap, "mean_angle": p.mean_angle} for p in points]}
    if args.plot:
        from .plots import render_stability_curve
        render_stability_curve([p.gap for p in points],
                               [p.mean_angle for p in points], args.plot)
    if config.output_format == "text":
        rows = [(p.gap, p.mean_angle) for p in points]
        return _text_table(("gap", "mean_angle"), rows), 0
    return emit(payload), 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modal-kernel",
        description="Definite-property lattices, measures, and decoherence "
                    "diagnostics for finite-dimensional quantum states.")
    parser.add_argument("--format", choices=("json", "text"), default=None,
                        help="report format on stdout (default json)")
    # accepted before or after the subcommand; the later value wins
    format_parent = argparse.ArgumentParser(add_help=False)
    format_parent.add_argument("--format", choices=("json", "text"),
                               default=argparse.SUPPRESS,
                               help="report format on stdout (default json)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", parents=[format_parent],
                       help="clustered biorthogonal decomposition")
    p.add_argument("state", help="state JSON file")
    p.add_argument("--plot", metavar="FILE", help="render cluster weights to FILE")
    p.set_defaults(handler=_cmd_decompose)

    p = sub.add_parser("lattice", parents=[format_parent],
                       help="definite-property lattice atoms")
    p.add_argument("state", help="state JSON file")
    _add_lattice_flags(p)
    p.set_defaults(handler=_cmd_lattice)

    p = sub.add_parser("born", parents=[format_parent],
                       help="atom weights of the chosen lattice")
    p.add_argument("state", help="state JSON file")
    _add_lattice_flags(p)
    p.add_argument("--plot", metavar="FILE", help="render atom weights to FILE")
    p.set_defaults(handler=_cmd_born)

    p = sub.add_parser("sample", parents=[format_parent],
                       help="seeded draws from the atom measure")
    p.add_argument("state", help="state JSON file")
    p.add_argument("--n", type=int, required=True, help="number of draws")
    p.add_argument("--seed", type=int, help="PRNG seed (PCG64 stream)")
    _add_lattice_flags(p)
    p.add_argument("--plot", metavar="FILE", help="render draw counts to FILE")
    p.set_defaults(handler=_cmd_sample)

    p = sub.add_parser("envariance", parents=[format_parent],
                       help="randomized compensator construction check")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--seed", type=int, help="PRNG seed (PCG64 stream)")
    p.set_defaults(handler=_cmd_envariance)

    p = sub.add_parser("decohere", parents=[format_parent],
                       help="cross-term report for a rotated-record environment")
    p.add_argument("--branches", type=int, required=True)
    p.add_argument("--qubits", type=int, required=True)
    p.add_argument("--theta", type=float, required=True,
                   help="rotation angle applied to every environment qubit")
    p.add_argument("--observable", metavar="FILE",
                   help="observable JSON file (default: uniform mixing observable)")
    p.add_argument("--plot", metavar="FILE", help="render record overlaps to FILE")
    p.set_defaults(handler=_cmd_decohere)

    p = sub.add_parser("triortho", parents=[format_parent],
                       help="three-way decomposition classification")
    p.add_argument("state", help="state JSON file with three factors")
    p.set_defaults(handler=_cmd_triortho)

    p = sub.add_parser("stability", parents=[format_parent],
                       help="property basis rotation across gaps")
    p.add_argument("--gaps", required=True,
                   help="comma-separated gap list, strictly descending")
    p.add_argument("--delta", type=float, required=True,
                   help="perturbation strength")
    p.add_argument("--seed", type=int, help="PRNG seed for randomized axes")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--randomize", action="store_true",
                   help="draw a random mixing axis per trial")
    p.add_argument("--plot", metavar="FILE", help="render the sweep curve to FILE")
    p.set_defaults(handler=_cmd_stability)

    return parser


def dispatch(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_run_config()
        if args.format is not None:
            config = RunConfig(tolerances=config.tolerances, seed=config.seed,
                               output_format=args.format)
        out, code = args.handler(args, config)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ContractViolation as exc:
        print(f"numerical contract violation: {exc}", file=sys.stderr)
        return 3
    sys.stdout.write(out)
    return code


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
