"""Subcommand handlers.

Each handler writes data to the given stream and returns the exit code.
Errors propagate to msstab.main, which maps them to exit codes.
"""

import argparse
import contextlib
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, TextIO

from ..core.errors import CriterionDisagreement
from ..core.polystab import spectral_radius_of
from ..core.regions import scan_domain, scan_region
from ..core.scalar import (
    check_agreement,
    classify,
    criteria_report,
    h0_ab2,
    h0_am2,
    quartic_coeffs,
)
from ..core.schemes import (
    ScalarTestEq,
    SystemTestEq,
    all_schemes,
    parse_scheme_list,
    reduce_scalar,
)
from ..core.simulate import (
    SimConfig,
    SystemModel,
    run_two_step_scalar,
    run_two_step_system,
)
from ..core.system import (
    classify_system,
    sde_system_stable,
    single_noise_system,
    two_noise_system,
)
from ..infrastructure.writers import (
    complex_to_json,
    write_json,
    write_region_csv,
    write_trace_csv,
)

logger = logging.getLogger(__name__)


def _schemes(args: argparse.Namespace):
    if not args.scheme:
        return all_schemes()
    return parse_scheme_list(args.scheme)


@contextlib.contextmanager
def _output(path: Optional[Path], stream: TextIO) -> Iterator[TextIO]:
    if path is None:
        yield stream
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as handle:
        yield handle
    logger.info(f"Wrote {path}")


def cmd_classify(args: argparse.Namespace, stream: TextIO) -> int:
    """theorem_conditions verdict, root-oracle radius and failed condition per scheme"""
    eq = ScalarTestEq(args.lam, args.mu)
    results: List[Dict[str, Any]] = []
    for spec in _schemes(args):
        verdict = classify(spec, eq, args.h)
        rc = reduce_scalar(spec, eq, args.h)
        entry = {
            "scheme": spec.name.value,
            "lambda": complex_to_json(eq.lam),
            "mu": complex_to_json(eq.mu),
            "h": args.h,
            "rho": spectral_radius_of(quartic_coeffs(rc)),
            **verdict.to_dict(),
        }
        if args.check:
            entry["agreement"] = check_agreement(criteria_report(rc)).value
        results.append(entry)

    if args.json:
        write_json(results, stream)
        return 0
    for entry in results:
        line = f"{entry['scheme']}: {entry['status']} (rho={entry['rho']:.12g}"
        if entry["failed_condition"] is not None:
            line += f", failed_condition={entry['failed_condition']}"
        stream.write(line + ")\n")
    return 0


def cmd_region(args: argparse.Namespace, stream: TextIO) -> int:
    """Region or domain raster as CSV, one row per cell per scheme"""
    schemes = _schemes(args)
    if args.domain:
        raster = scan_domain(
            schemes,
            args.y_value,
            re_bounds=tuple(args.x_range),
            im_bounds=tuple(args.im_range),
            resolution=args.grid,
            workers=args.workers,
        )
    else:
        raster = scan_region(
            schemes,
            x_bounds=tuple(args.x_range),
            y_bounds=tuple(args.y_range),
            resolution=args.grid,
            workers=args.workers,
        )
    with _output(args.out, stream) as handle:
        rows = write_region_csv(raster, handle)
    logger.info(f"Region raster: {rows} rows")
    return 0


def cmd_h0(args: argparse.Namespace, stream: TextIO) -> int:
    """Step-size bounds below which AB2 / AM2 are mean-square stable"""
    eq = ScalarTestEq(args.lam, args.mu)
    bounds = {"ab2": h0_ab2, "am2": h0_am2}
    selected = args.scheme or ["ab2", "am2"]
    results = {name: bounds[name](eq) for name in dict.fromkeys(selected)}
    if args.json:
        write_json(results, stream)
        return 0
    for name, value in results.items():
        stream.write(f"{name}: h0={value:.12g}\n")
    return 0


def _system_from_args(args: argparse.Namespace) -> SystemTestEq:
    if args.system is not None:
        return SystemModel.model_validate_json(args.system.read_text()).to_eq()
    missing = [n for n in ("lam", "sigma", "eps") if getattr(args, n) is None]
    if missing:
        raise ValueError(
            f"--example needs --lambda, --sigma and --eps, missing {missing}"
        )
    builder = single_noise_system if args.example == "single" else two_noise_system
    return builder(args.lam, args.sigma, args.eps)


def cmd_spectral(args: argparse.Namespace, stream: TextIO) -> int:
    """Spectral radius of the system stability matrix per scheme"""
    eq = _system_from_args(args)
    sde = sde_system_stable(eq)
    results = []
    for spec in _schemes(args):
        verdict = classify_system(spec, eq, args.h, cross_check=args.cross_check)
        results.append(
            {"scheme": spec.name.value, "h": args.h, "rho": verdict.witness,
             "status": verdict.status.value}
        )
    if args.json:
        write_json({"sde_stable": sde, "schemes": results}, stream)
        return 0
    stream.write(f"sde: {'stable' if sde else 'unstable'}\n")
    for entry in results:
        stream.write(
            f"{entry['scheme']}: {entry['status']} (rho={entry['rho']:.12g})\n"
        )
    return 0


_FLAG_FIELDS = {
    "scheme": "schemes",
    "lam": "lam",
    "mu": "mu",
    "h": "h",
    "t_end": "t_end",
    "theta": "theta",
    "seed": "seed",
    "batches": "batches",
    "paths": "paths_per_batch",
}


def build_sim_config(args: argparse.Namespace) -> SimConfig:
    """Merge a --config file with explicit flags (flags win)"""
    data: Dict[str, Any] = {}
    if args.config is not None:
        data = json.loads(args.config.read_text())
    for flag, field in _FLAG_FIELDS.items():
        value = getattr(args, flag)
        if value is not None:
            data[field] = value
    if args.system is not None:
        data["system"] = json.loads(args.system.read_text())
    return SimConfig.model_validate(data)


def cmd_simulate(args: argparse.Namespace, stream: TextIO) -> int:
    """Monte Carlo traces as CSV"""
    cfg = build_sim_config(args)
    if args.dump_config is not None:
        args.dump_config.write_text(cfg.model_dump_json(indent=2))
    if cfg.is_system:
        traces = run_two_step_system(cfg, workers=args.workers)
    else:
        traces = run_two_step_scalar(cfg, workers=args.workers)
    with _output(args.out, stream) as handle:
        write_trace_csv(traces, handle)
    return 0


def cmd_check(args: argparse.Namespace, stream: TextIO) -> int:
    """Every criterion per scheme; CriterionDisagreement exits with code 3"""
    eq = ScalarTestEq(args.lam, args.mu)
    results = []
    failure: Optional[CriterionDisagreement] = None
    for spec in _schemes(args):
        report = criteria_report(reduce_scalar(spec, eq, args.h))
        entry = {
            "scheme": spec.name.value,
            "criteria": {name: v.status.value for name, v in report.items()},
        }
        try:
            entry["agreement"] = check_agreement(report).value
        except CriterionDisagreement as exc:
            entry["agreement"] = "disagreement"
            failure = failure or exc
        results.append(entry)

    if args.json:
        write_json(results, stream)
    else:
        for entry in results:
            detail = ", ".join(f"{k}={v}" for k, v in entry["criteria"].items())
            stream.write(f"{entry['scheme']}: {entry['agreement']} ({detail})\n")
    if failure is not None:
        raise failure
    return 0


COMMANDS = {
    "classify": cmd_classify,
    "region": cmd_region,
    "h0": cmd_h0,
    "spectral": cmd_spectral,
    "simulate": cmd_simulate,
    "check": cmd_check,
}


def dispatch(args: argparse.Namespace, stream: TextIO = sys.stdout) -> int:
    return COMMANDS[args.command](args, stream)
