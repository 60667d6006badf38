#!/usr/bin/env python3
"""Reproduce the stability experiments and write their data files.

Runs the scalar Monte Carlo experiments at h = 1/8 and h = 1, the two 2 x 2
system cases (spectral radii, step refinement and traces) and the real
stability region raster, and writes one CSV per experiment.

Usage:
    python3 scripts/reproduce_experiments.py
    python3 scripts/reproduce_experiments.py --output-dir results
    python3 scripts/reproduce_experiments.py --full-scale

Examples:
    # Desk scale (10^4 paths per scheme)
    python3 scripts/reproduce_experiments.py

    # Full scale (10^6 paths per scheme, slow)
    python3 scripts/reproduce_experiments.py --full-scale --workers 8
"""

import argparse
import sys
from pathlib import Path

try:
    from msstab.core.experiments import (
        EXPERIMENT_LARGE_STEP,
        EXPERIMENT_SMALL_STEP,
        FULL_SCALE,
        REFINEMENT_STEPS,
        SINGLE_NOISE_SPLIT,
        SPLIT_HORIZON,
        SPLIT_SCALE,
        TWO_NOISE_SPLIT,
    )
    from msstab.core.regions import scan_region
    from msstab.core.schemes import all_schemes
    from msstab.core.simulate import (
        SimConfig,
        run_two_step_scalar,
        run_two_step_system,
    )
    from msstab.core.system import classify_system, step_refinement
    from msstab.infrastructure.writers import write_region_csv, write_trace_csv
except ImportError:
    print("Error: msstab not installed")
    print("Install it with: poetry install")
    sys.exit(1)


class Colors:
    """ANSI color codes for terminal output."""
    RED = '\033[0;31m'
    GREEN = '\033[0;32m'
    YELLOW = '\033[1;33m'
    NC = '\033[0m'  # No Color

    @classmethod
    def disable(cls):
        """Disable colors (for non-TTY output)."""
        cls.RED = cls.GREEN = cls.YELLOW = cls.NC = ''


def print_header(text: str):
    """Print section header."""
    print("=" * 70)
    print(f"  {text}")
    print("=" * 70)
    print()


def print_success(text: str):
    """Print success message."""
    print(f"{Colors.GREEN}✓ {text}{Colors.NC}")


def print_error(text: str):
    """Print error message."""
    print(f"{Colors.RED}✗ {text}{Colors.NC}", file=sys.stderr)


def print_warning(text: str):
    """Print warning message."""
    print(f"{Colors.YELLOW}⚠ {text}{Colors.NC}")


def run_traces(cfg: SimConfig, output_file: Path, workers: int) -> None:
    """Simulate every scheme of cfg and write the trace CSV."""
    runner = run_two_step_system if cfg.is_system else run_two_step_scalar
    traces = runner(cfg, workers=workers)

    output_file.parent.mkdir(parents=True, exist_ok=True)
    with open(output_file, "w", newline="") as handle:
        write_trace_csv(traces, handle)

    for token, trace in traces.items():
        terminal = trace.ms_norm[-1]
        if trace.diverged:
            print_warning(f"{token:6s} diverged (clamped), terminal {terminal:.4g}")
        else:
            print(f"  {token:6s} terminal ms norm {terminal:.6g}")
    print_success(f"Saved {output_file}")
    print()


def report_system_case(case, output_dir: Path, t_end: float, scale: dict, workers):
    """Spectral radii, step refinement and traces of one test system."""
    eq = case.eq()
    stable = "stable" if case.sde_stable() else "unstable"
    print(f"{case.name}: lam={case.lam}, sigma={case.sigma}, eps={case.eps:.6g}, "
          f"h={case.h} (SDE {stable})")
    for spec in all_schemes():
        verdict = classify_system(spec, eq, case.h)
        print(f"  {spec.label:6s} rho={verdict.witness:.6f}  {verdict.status.value}")
    print()

    print(f"Step refinement {', '.join(f'{h:g}' for h in REFINEMENT_STEPS)}:")
    for spec in all_schemes():
        steps = step_refinement(spec, eq, REFINEMENT_STEPS)
        radii = "  ".join(f"{rho:.5f}" for _, rho, _ in steps)
        print(f"  {spec.label:6s} {radii}")
    print()

    cfg = case.sim_config(t_end).model_copy(update=scale)
    run_traces(cfg, output_dir / f"{case.name}_traces.csv", workers)


def main():
    """Main entry point."""
    parser = argparse.ArgumentParser(
        description="Reproduce the mean-square stability experiments",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s
  %(prog)s --output-dir results
  %(prog)s --full-scale --workers 8
        """
    )

    parser.add_argument(
        "--output-dir",
        default="results",
        type=Path,
        help="Directory for the CSV files (default: results)"
    )

    parser.add_argument(
        "--full-scale",
        action="store_true",
        help="Use 100 batches of 10^4 paths instead of the desk-scale defaults"
    )

    parser.add_argument(
        "--grid",
        default=400,
        type=int,
        help="Region raster cells per axis (default: 400)"
    )

    parser.add_argument(
        "--system-t-end",
        default=SPLIT_HORIZON,
        type=float,
        help=f"Final time of the system traces (default: {SPLIT_HORIZON:g})"
    )

    parser.add_argument(
        "--workers",
        default=None,
        type=int,
        help="Thread pool size (default: settings)"
    )

    parser.add_argument(
        "--no-color",
        action="store_true",
        help="Disable colored output"
    )

    args = parser.parse_args()

    if args.no_color or not sys.stdout.isatty():
        Colors.disable()

    scale = FULL_SCALE if args.full_scale else {}
    output_dir = args.output_dir

    print_header("Mean-square stability experiments")
    print(f"Output Dir:   {output_dir}")
    print(f"Scale:        {'full' if args.full_scale else 'desk'}")
    print()

    try:
        print_header("Real stability regions")
        raster = scan_region(all_schemes(), resolution=args.grid, workers=args.workers)
        output_dir.mkdir(parents=True, exist_ok=True)
        region_file = output_dir / "region.csv"
        with open(region_file, "w", newline="") as handle:
            rows = write_region_csv(raster, handle)
        print_success(f"Saved {region_file} ({rows} rows)")
        print()

        print_header("Scalar test equation, h = 1/8")
        run_traces(
            EXPERIMENT_SMALL_STEP.model_copy(update=scale),
            output_dir / "scalar_small_step.csv",
            args.workers,
        )

        print_header("Scalar test equation, h = 1")
        run_traces(
            EXPERIMENT_LARGE_STEP.model_copy(update=scale),
            output_dir / "scalar_large_step.csv",
            args.workers,
        )

        for case in (SINGLE_NOISE_SPLIT, TWO_NOISE_SPLIT):
            print_header(f"Test system: {case.name}")
            report_system_case(
                case,
                output_dir,
                args.system_t_end,
                scale or SPLIT_SCALE,
                args.workers,
            )
    except Exception as e:
        print_error(f"Experiment failed: {e}")
        sys.exit(1)

    print_header("Success: experiment data written")


if __name__ == "__main__":
    main()
