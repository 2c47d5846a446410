"""Command line interface for running walks, scans, and table checks.

Angles are given as rational multiples of pi by default ("1/8" means
pi/8); pass --radians to supply raw radians instead. JSON output uses
sorted keys and round-trip float formatting, so identical runs produce
byte-identical files. Exit codes: 0 success, 1 verification mismatch,
2 usage error, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .analysis import polya_number, tv_distance
from .analysis import effective_coin_balanced_strings, effective_coin_from_operator
from .coins import StepConvention, equal_up_to_global_phase
from .evolution import (
    WalkSchedule,
    bisect_visibility,
    evolve,
    evolve_density,
)
from .search import (
    RevivalCandidate,
    SearchConfig,
    angle_fraction,
    load_reference_catalog,
    parse_catalog,
    scan,
    verify_table,
)
from .states import (
    CoinVector,
    Lattice,
    density_from_pure,
    initial_state,
    position_distribution,
    reduced_coin_state,
)


@dataclass(frozen=True)
class RunConfig:
    """Settings for one `walk` invocation."""

    theta: float
    omega: float
    steps: int
    visibility: float = 1.0
    convention: StepConvention = StepConvention.ONE_BASED
    csv_out: str | None = None
    json_out: str | None = None


def _parse_angle(text: str, radians: bool) -> float:
    if radians:
        return float(text)
    return float(Fraction(text)) * math.pi


def _angle_doc(value: float) -> dict:
    frac = angle_fraction(value)
    return {"radians": float(value), "of_pi": str(frac) if frac is not None else None}


def _complex_doc(value: complex) -> dict:
    return {"re": float(value.real), "im": float(value.imag)}


def _matrix_doc(matrix: np.ndarray) -> list:
    return [[_complex_doc(complex(entry)) for entry in row] for row in np.asarray(matrix)]


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _dump_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def cmd_walk(config: RunConfig) -> int:
    """Run one walk and emit per-step distributions and summaries."""
    schedule = WalkSchedule(
        theta=config.theta,
        omega=config.omega,
        steps=config.steps,
        convention=config.convention,
        visibility=config.visibility,
    )
    lattice = Lattice.for_steps(config.steps)
    start = initial_state(lattice, CoinVector.symmetric())
    start_distribution = position_distribution(start)
    if config.visibility == 1.0:
        states = evolve(start, schedule)
    else:
        states = evolve_density(density_from_pure(start), schedule)
    distributions = [position_distribution(state) for state in states]
    p0_series = [dist.at_site(0) for dist in distributions]
    tv_series = [tv_distance(dist, start_distribution) for dist in distributions]
    polya = polya_number(p0_series)
    final_coin = reduced_coin_state(states[-1])

    if config.csv_out is not None:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["step", "site", "probability"])
        sites = lattice.sites()
        for step_number, dist in enumerate(distributions, start=1):
            for site, probability in zip(sites, dist.probabilities):
                writer.writerow([step_number, int(site), float(probability)])
        _write_text(config.csv_out, buffer.getvalue())

    if config.json_out is not None:
        doc = {
            "schedule": {
                "theta": _angle_doc(config.theta),
                "omega": _angle_doc(config.omega),
                "steps": config.steps,
                "visibility": float(config.visibility),
                "convention": config.convention.value,
            },
            "sites": [int(site) for site in lattice.sites()],
            "probabilities": [
                [float(p) for p in dist.probabilities] for dist in distributions
            ],
            "origin_probability": [float(p) for p in p0_series],
            "tv_distance": [float(d) for d in tv_series],
            "polya_truncated": float(polya),
            "reduced_coin": _matrix_doc(final_coin),
        }
        _write_text(config.json_out, _dump_json(doc))
    return 0


def cmd_search(config: SearchConfig, workers: int = 1, json_out: str | None = "-") -> int:
    """Scan for revivals and emit the candidate list as JSON."""
    candidates = scan(config, workers=workers)
    lo, hi, count = config.omega_grid
    doc = {
        "config": {
            "step_counts": list(config.step_counts),
            "theta": [_angle_doc(theta) for theta in config.theta_values],
            "omega_grid": {"min": float(lo), "max": float(hi), "count": int(count)},
            "refine_tol": float(config.refine_tol),
            "rational_max_denominator": int(config.rational_max_denominator),
            "convention": config.convention.value,
        },
        "candidates": [_candidate_doc(candidate) for candidate in candidates],
    }
    _write_text(json_out, _dump_json(doc))
    return 0


def _candidate_doc(candidate: RevivalCandidate) -> dict:
    if candidate.omega_rational is not None:
        omega_pi = str(Fraction(candidate.omega_rational[0], candidate.omega_rational[1]))
    else:
        omega_pi = None
    theta_frac = angle_fraction(candidate.theta)
    return {
        "steps": int(candidate.steps),
        "theta": float(candidate.theta),
        "theta_pi": str(theta_frac) if theta_frac is not None else None,
        "omega": float(candidate.omega),
        "omega_pi": omega_pi,
        "complete": bool(candidate.complete),
        "residual": float(candidate.residual),
    }


def _candidate_from_doc(raw: dict) -> RevivalCandidate:
    omega_pi = raw.get("omega_pi")
    if omega_pi is not None:
        frac = Fraction(omega_pi)
        rational: tuple[int, int] | None = (frac.numerator, frac.denominator)
    else:
        rational = None
    return RevivalCandidate(
        steps=int(raw["steps"]),
        theta=float(raw["theta"]),
        omega=float(raw["omega"]),
        omega_rational=rational,
        complete=bool(raw["complete"]),
        residual=float(raw["residual"]),
    )


def cmd_verify_table(
    candidates_path: str,
    catalog_path: str | None = None,
    json_out: str | None = "-",
) -> int:
    """Diff a candidates file against the reference catalog."""
    text = Path(candidates_path).read_text(encoding="utf-8")
    doc = json.loads(text)
    candidates = [_candidate_from_doc(raw) for raw in doc["candidates"]]
    if catalog_path is not None:
        reference = parse_catalog(Path(catalog_path).read_text(encoding="utf-8"))
    else:
        reference = load_reference_catalog()
    diff = verify_table(candidates, reference)
    _write_text(json_out, _dump_json(diff.to_dict()))
    return 0 if diff.ok else 1


def cmd_noise_sweep(
    theta: float,
    omega: float,
    steps: int,
    visibilities: list[float],
    target_p0: float | None = None,
    json_out: str | None = "-",
    convention: StepConvention = StepConvention.ONE_BASED,
) -> int:
    """Evaluate the walk under coin dephasing at several visibilities."""
    lattice = Lattice.for_steps(steps)
    start_coin = CoinVector.symmetric()
    start = density_from_pure(initial_state(lattice, start_coin))
    start_distribution = position_distribution(start)
    rows = []
    for visibility in visibilities:
        schedule = WalkSchedule(
            theta=theta, omega=omega, steps=steps,
            convention=convention, visibility=visibility,
        )
        states = evolve_density(start, schedule)
        final = states[-1]
        distribution = position_distribution(final)
        coin_rho = reduced_coin_state(final)
        overlap = float(np.real(start_coin.as_array().conj() @ coin_rho @ start_coin.as_array()))
        rows.append(
            {
                "visibility": float(visibility),
                "origin_probability": float(distribution.at_site(0)),
                "tv_distance": float(tv_distance(distribution, start_distribution)),
                "overlap_initial": overlap,
            }
        )
    doc: dict = {
        "theta": _angle_doc(theta),
        "omega": _angle_doc(omega),
        "steps": int(steps),
        "convention": convention.value,
        "rows": rows,
    }
    if target_p0 is not None:
        schedule = WalkSchedule(theta=theta, omega=omega, steps=steps, convention=convention)
        visibility, achieved = bisect_visibility(schedule, start, target_p0)
        doc["calibration"] = {
            "target_origin_probability": float(target_p0),
            "visibility": float(visibility),
            "origin_probability": float(achieved),
        }
    _write_text(json_out, _dump_json(doc))
    return 0


def cmd_effective_coin(
    theta: float,
    omega: float,
    steps: int,
    json_out: str | None = "-",
    convention: StepConvention = StepConvention.ONE_BASED,
) -> int:
    """Compute the effective coin by both constructions and compare them."""
    schedule = WalkSchedule(theta=theta, omega=omega, steps=steps, convention=convention)
    from_strings = effective_coin_balanced_strings(schedule)
    from_operator = effective_coin_from_operator(schedule)
    difference = float(np.max(np.abs(from_strings - from_operator)))
    doc = {
        "theta": _angle_doc(theta),
        "omega": _angle_doc(omega),
        "steps": int(steps),
        "convention": convention.value,
        "balanced_strings": _matrix_doc(from_strings),
        "operator_block": _matrix_doc(from_operator),
        "max_abs_difference": difference,
        "complete": bool(equal_up_to_global_phase(from_operator, np.eye(2))),
    }
    _write_text(json_out, _dump_json(doc))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rampwalk",
        description="Discrete-time walk with a linearly ramped coin.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    walk = sub.add_parser("walk", help="run one walk and write distributions")
    walk.add_argument("--theta", required=True, help="bias angle (fraction of pi)")
    walk.add_argument("--omega", required=True, help="ramp rate (fraction of pi)")
    walk.add_argument("--steps", "--T", dest="steps", type=int, required=True)
    walk.add_argument("--visibility", type=float, default=1.0)
    walk.add_argument("--zero-based", action="store_true", help="ramp steps from t = 0")
    walk.add_argument("--radians", action="store_true", help="angles are raw radians")
    walk.add_argument("--csv-out", default=None, help="CSV path or - for stdout")
    walk.add_argument("--json-out", default=None, help="JSON path or - for stdout")

    search_p = sub.add_parser("search", help="scan for revival parameters")
    search_p.add_argument("--steps", "--T", dest="steps", default="2,4,6,8",
                          help="comma separated even step counts")
    search_p.add_argument("--theta", default="0,1/4", help="comma separated bias angles")
    search_p.add_argument("--omega-min", default="0")
    search_p.add_argument("--omega-max", default="1/2")
    search_p.add_argument("--omega-count", type=int, default=4001)
    search_p.add_argument("--max-denominator", type=int, default=64)
    search_p.add_argument("--refine-tol", type=float, default=1e-12)
    search_p.add_argument("--workers", type=int, default=1)
    search_p.add_argument("--zero-based", action="store_true")
    search_p.add_argument("--radians", action="store_true")
    search_p.add_argument("--json-out", default="-")

    verify = sub.add_parser("verify-table", help="diff candidates against the catalog")
    verify.add_argument("candidates", help="candidates JSON from the search command")
    verify.add_argument("--catalog", default=None, help="override the bundled catalog")
    verify.add_argument("--json-out", default="-")

    noise = sub.add_parser("noise-sweep", help="walk under coin dephasing")
    noise.add_argument("--theta", required=True)
    noise.add_argument("--omega", required=True)
    noise.add_argument("--steps", "--T", dest="steps", type=int, required=True)
    noise.add_argument("--visibilities", default="1,0.996,0.99,0.95,0.9")
    noise.add_argument("--target-p0", type=float, default=None,
                       help="calibrate visibility to this final origin probability")
    noise.add_argument("--zero-based", action="store_true")
    noise.add_argument("--radians", action="store_true")
    noise.add_argument("--json-out", default="-")

    effective = sub.add_parser("effective-coin", help="effective coin, both constructions")
    effective.add_argument("--theta", required=True)
    effective.add_argument("--omega", required=True)
    effective.add_argument("--steps", "--T", dest="steps", type=int, required=True)
    effective.add_argument("--zero-based", action="store_true")
    effective.add_argument("--radians", action="store_true")
    effective.add_argument("--json-out", default="-")

    return parser


def _convention(args: argparse.Namespace) -> StepConvention:
    if getattr(args, "zero_based", False):
        return StepConvention.ZERO_BASED
    return StepConvention.ONE_BASED


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "walk":
        if args.steps < 1:
            raise ValueError(f"steps must be at least 1, got {args.steps}")
        config = RunConfig(
            theta=_parse_angle(args.theta, args.radians),
            omega=_parse_angle(args.omega, args.radians),
            steps=args.steps,
            visibility=args.visibility,
            convention=_convention(args),
            csv_out=args.csv_out,
            json_out=args.json_out,
        )
        if config.csv_out is None and config.json_out is None:
            raise ValueError("nothing to do: pass --csv-out and/or --json-out")
        return cmd_walk(config)

    if args.command == "search":
        step_counts = tuple(int(part) for part in args.steps.split(","))
        thetas = tuple(
            _parse_angle(part, args.radians) for part in args.theta.split(",")
        )
        config = SearchConfig(
            step_counts=step_counts,
            theta_values=thetas,
            omega_grid=(
                _parse_angle(args.omega_min, args.radians),
                _parse_angle(args.omega_max, args.radians),
                args.omega_count,
            ),
            refine_tol=args.refine_tol,
            rational_max_denominator=args.max_denominator,
            convention=_convention(args),
        )
        return cmd_search(config, workers=args.workers, json_out=args.json_out)

    if args.command == "verify-table":
        return cmd_verify_table(args.candidates, args.catalog, args.json_out)

    if args.command == "noise-sweep":
        if args.steps < 1:
            raise ValueError(f"steps must be at least 1, got {args.steps}")
        visibilities = [float(part) for part in args.visibilities.split(",") if part]
        if not visibilities and args.target_p0 is None:
            raise ValueError("need --visibilities and/or --target-p0")
        return cmd_noise_sweep(
            theta=_parse_angle(args.theta, args.radians),
            omega=_parse_angle(args.omega, args.radians),
            steps=args.steps,
            visibilities=visibilities,
            target_p0=args.target_p0,
            json_out=args.json_out,
            convention=_convention(args),
        )

    if args.command == "effective-coin":
        return cmd_effective_coin(
            theta=_parse_angle(args.theta, args.radians),
            omega=_parse_angle(args.omega, args.radians),
            steps=args.steps,
            json_out=args.json_out,
            convention=_convention(args),
        )

    raise ValueError(f"unknown command {args.command!r}")


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except OSError as exc:
        print(f"rampwalk: i/o error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, KeyError, ZeroDivisionError, json.JSONDecodeError) as exc:
        print(f"rampwalk: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
