"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 input error, 3 protocol
infeasible (equalization unreachable).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from . import acceptance
from .entropy import von_neumann
from .errors import CohmeterError, EqualizationUnreachable
from .optics import equalizing_angle, rotation
from .protocols import ProtocolConfig, basis_change_report, run_polarization, run_spatial
from .search import DEFAULT_GRID, equatorial_sweep, min_shannon_random_search, refine_minimum, sweep_entropy
from .serialize import dumps_report, load_basis, load_state, manifest, round_sig
from .states import apply_unitary

DEFAULT_SEED = 7

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_INFEASIBLE = 0, 1, 2, 3


def _default_seed() -> int:
    env = os.environ.get("COHMETER_SEED")
    return int(env) if env else DEFAULT_SEED


def _config(args, basis=None) -> ProtocolConfig:
    return ProtocolConfig(
        shots=args.shots,
        seed=args.seed,
        grid_points=args.grid,
        coherence_basis=basis,
        refine=not args.no_refine,
        equalizer=args.equalizer,
    )


def cmd_entropy(args) -> int:
    rho = load_state(args.state)
    best, _ = min_shannon_random_search(rho, args.trials, args.seed)
    out = {
        "manifest": manifest("entropy", {"state": args.state, "trials": args.trials, "grid_points": args.grid}, args.seed),
        "dim": rho.dim,
        "von_neumann": von_neumann(rho),
        "random_search": {"min_shannon": best, "trials": args.trials, "seed": args.seed},
    }
    if rho.dim == 2:
        theta = equalizing_angle(rho)
        equalized = apply_unitary(rho, rotation(theta))
        sweep = equatorial_sweep(equalized, args.grid)
        phi, h = refine_minimum(lambda x: sweep_entropy(equalized, x), sweep)
        out["sweep"] = {
            "equalizer_theta": theta,
            "argmin_phi": sweep.argmin_phi,
            "min_shannon": sweep.min_entropy,
            "refined_argmin_phi": phi,
            "refined_min_shannon": h,
        }
    sys.stdout.write(dumps_report(out))
    return EXIT_OK


def cmd_coherence(args) -> int:
    rho = load_state(args.state)
    basis = load_basis(args.basis)
    cfg = _config(args, basis)
    report = basis_change_report(rho, basis, cfg)
    out = {"manifest": manifest("coherence", {"state": args.state, "basis": args.basis, **cfg.to_json()}, args.seed), "report": report.to_json()}
    sys.stdout.write(dumps_report(out))
    return EXIT_OK


def write_sweep_csv(path: Path, sweep) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["phi_rad", "p0", "p1", "shannon_bits"])
        for phi, p, h in zip(sweep.phis, sweep.probs, sweep.entropies):
            w.writerow([repr(round_sig(float(x))) for x in (phi, p[0], p[1], h)])


def cmd_protocol(args) -> int:
    rho = load_state(args.state)
    basis = load_basis(args.basis) if args.basis else None
    cfg = _config(args, basis)
    run = run_spatial(rho, cfg) if args.kind == "spatial" else run_polarization(rho, cfg)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = {
        "manifest": manifest(f"protocol {args.kind}", {"state": args.state, **cfg.to_json()}, args.seed),
        "report": run.report.to_json(),
    }
    text = dumps_report(payload)
    (out_dir / "report.json").write_text(text)
    write_sweep_csv(out_dir / "sweep.csv", run.sweep)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    results = acceptance.run_suite(args.suite, args.seed)
    for res in results:
        print(acceptance.format_line(res))
    passed = all(r.passed for r in results)
    print(f"{sum(r.passed for r in results)}/{len(results)} criteria passed")
    if args.out:
        payload = {
            "manifest": manifest("verify", {"suite": args.suite}, args.seed),
            "passed": passed,
            "criteria": [r.to_json() for r in results],
        }
        Path(args.out).write_text(dumps_report(payload))
    return EXIT_OK if passed else EXIT_VERIFY


def _add_protocol_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--shots", type=int, default=None, help="finite-shot mode with this many shots per setting")
    p.add_argument("--grid", type=int, default=DEFAULT_GRID, help="phase-sweep grid points")
    p.add_argument("--no-refine", action="store_true", help="skip golden-section refinement of the sweep minimum")
    p.add_argument("--equalizer", choices=("analytic", "feedback"), default="analytic")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cohmeter", description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=None, help="random seed (default: $COHMETER_SEED or 7)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", help="von Neumann entropy: oracle, random search and qubit sweep")
    p.add_argument("--state", required=True, help="preset:NAME or a JSON state file")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--grid", type=int, default=DEFAULT_GRID)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("coherence", help="relative entropy of coherence in a chosen basis")
    p.add_argument("--state", required=True)
    p.add_argument("--basis", default="computational", help="computational, plusminus, circular or a JSON file")
    _add_protocol_flags(p)
    p.set_defaults(func=cmd_coherence)

    p = sub.add_parser("protocol", help="run the spatial or polarization measurement pipeline")
    p.add_argument("kind", choices=("spatial", "polarization"))
    p.add_argument("--state", required=True)
    p.add_argument("--basis", default=None, help="coherence basis (polarization only)")
    p.add_argument("--out", default="run", help="output directory for report.json and sweep.csv")
    _add_protocol_flags(p)
    p.set_defaults(func=cmd_protocol)

    p = sub.add_parser("verify", help="run the acceptance criteria")
    p.add_argument("--suite", choices=tuple(acceptance.SUITES), default="all")
    p.add_argument("--out", default=None, help="write the JSON results here")
    p.set_defaults(func=cmd_verify)

    for name, sp in sub.choices.items():
        sp.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.seed is None:
        args.seed = _default_seed()
    try:
        return args.func(args)
    except EqualizationUnreachable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (CohmeterError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
