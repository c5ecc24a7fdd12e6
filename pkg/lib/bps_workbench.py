#!/usr/bin/env python3
"""
Command-line workbench for the BPS sector of the gauged restricted baby Skyrme model.

Sub-commands:

- ``solve-radial``: integrate the reduced Bogomolny equations and write the profile
  CSV plus a summary block (energy, bound, termination).
- ``lift``: turn a profile CSV into a 2D field snapshot (optionally stretched).
- ``verify``: Euler-Lagrange, Bogomolny, dual-equation and bound checks on a
  snapshot; exits 4 when any check exceeds its threshold.
- ``flow``: gradient flow from a snapshot, writing the energy history and the
  final snapshot.
- ``potential``: tabulate V(u) generated by G1 and check the existence condition.
- ``check-tautology``: the pointwise dual-equation checks on seeded random jets.

Configuration is layered: built-in defaults, then an optional ``--config`` file
of ``key = value`` lines, then explicit flags. Every output file starts with the
resolved configuration as ``# key = value`` comments. Paths may be local files
or ``s3://`` URIs; S3 credentials are read from a local ``.env``.

Exit codes: 0 success, 2 usage or input error, 3 numerical failure
(singularity, non-finite energy), 4 verification threshold exceeded.

Example:
    $ bps-workbench solve-radial --g1 power:2 --lambda2 10 --out profile.csv
    $ bps-workbench lift --profile profile.csv --grid 128,128,-8,8,-8,8 --out bps.csv
    $ bps-workbench verify --snapshot bps.csv --g1 power:2 --lambda2 10
"""

import argparse
import dataclasses
import logging
import sys
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np
from dotenv import dotenv_values, load_dotenv

from .common import get_timestamp, open_path, setup_logging
from .energy import energy_components
from .errors import (
    BPSWorkbenchError,
    IntegrationError,
    NonFiniteEnergyError,
    SingularityError,
)
from .fields import FieldState, Grid2D, ModelParams, lift_radial
from .flow import FlowConfig, run_flow
from .io_formats import (
    format_report,
    read_potential_table,
    read_profile,
    read_snapshot,
    write_header,
    write_history,
    write_potential_table,
    write_profile,
    write_snapshot,
)
from .potentials import (
    GProfile,
    PotentialSpec,
    check_condition,
    parse_g_spec,
    potential_from_g,
    potential_from_table,
    tabulate,
)
from .radial import (
    SolverOptions,
    Termination,
    asymptotic_gauge,
    power_first_integral,
    radial_densities,
    radial_energy,
    solve_radial,
    stretch_profile,
)
from .residuals import (
    DEFAULT_JET_SEED,
    bogomolny_residual,
    el_residual,
    sweep_jets,
)
from .topology import bound_report, degree

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_THRESHOLD = 4


class UsageError(BPSWorkbenchError):
    """Missing or contradictory options."""


def _to_bool(text: str) -> bool:
    lowered = str(text).strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off", ""):
        return False
    raise ValueError(f"not a boolean: {text!r}")


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved configuration of one command."""

    command: str
    lambda1: float = 1.0
    lambda2: float = 1.0
    lambda4: float = 1.0
    # None: 1, or the winding stored in the profile for lift
    n: Optional[int] = field(default=None, metadata={"type": int})
    g1: Optional[str] = None
    grid: str = "128,128,-8,8,-8,8"
    seed: int = DEFAULT_JET_SEED
    out: Optional[str] = None
    summary: Optional[str] = None
    # radial solver
    rtol: float = 1e-10
    atol: float = 1e-12
    r_max: float = 50.0
    u_stop: float = 1e-10
    a_stop: float = 1e-6
    dr_out: float = 1e-3
    compacton_ratio: float = 1e-3
    # lift
    profile: Optional[str] = None
    stretch: float = 1.0
    keep_grid: bool = False
    # verify / flow inputs
    snapshot: Optional[str] = None
    potential_table: Optional[str] = None
    potential_scale: float = 1.0
    el_tol: float = 2e-2
    r1_tol: float = 5e-2
    r2_tol: float = 3e-3
    tautology_tol: float = 1e-12
    bound_tol: float = 1e-3
    samples: int = 1000
    jet_scale: float = 2.0
    u_samples: int = 201
    # flow
    history: Optional[str] = None
    step: float = 1e-3
    max_iter: int = 5000
    grad_tol: float = 1e-8
    energy_tol: float = 1e-10
    snapshot_every: int = 0
    fixed_step: bool = False

    @property
    def params(self) -> ModelParams:
        n = 1 if self.n is None else self.n
        return ModelParams(self.lambda1, self.lambda2, self.lambda4, n)

    def g_profile(self) -> GProfile:
        if not self.g1:
            raise UsageError(f"{self.command} needs --g1 family:params")
        return parse_g_spec(self.g1)

    def solver_options(self) -> SolverOptions:
        return SolverOptions(
            rtol=self.rtol,
            atol=self.atol,
            r_max=self.r_max,
            u_stop=self.u_stop,
            a_stop=self.a_stop,
            dr_out=self.dr_out,
            compacton_ratio=self.compacton_ratio,
        )

    def to_header(self) -> Dict[str, object]:
        """Resolved configuration for output file headers."""
        header: Dict[str, object] = {"tool": "bps-workbench"}
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if value is not None:
                header[f.name] = value
        header["timestamp"] = get_timestamp()
        return header


_FIELD_TYPES: Dict[str, Callable[[str], object]] = {}
for _f in dataclasses.fields(RunConfig):
    if _f.name == "command":
        continue
    _default = _f.default
    if "type" in _f.metadata:
        _FIELD_TYPES[_f.name] = _f.metadata["type"]
    elif isinstance(_default, bool):
        _FIELD_TYPES[_f.name] = _to_bool
    elif isinstance(_default, int):
        _FIELD_TYPES[_f.name] = int
    elif isinstance(_default, float):
        _FIELD_TYPES[_f.name] = float
    else:
        _FIELD_TYPES[_f.name] = str


def resolve_config(options: argparse.Namespace) -> RunConfig:
    """Merge defaults, the optional config file and explicit flags.

    Raises:
        UsageError: If the config file is unreadable or holds unknown keys or
            malformed values.
    """
    values: Dict[str, object] = {}
    if options.config:
        try:
            with open_path(options.config, "r") as stream:
                raw = dotenv_values(stream=stream)
        except OSError as e:
            raise UsageError(f"cannot read config {options.config}: {e}") from e
        for key, text in raw.items():
            name = key.strip().replace("-", "_")
            if name not in _FIELD_TYPES:
                raise UsageError(f"unknown config key {key!r} in {options.config}")
            if text is None:
                continue
            try:
                values[name] = _FIELD_TYPES[name](text)
            except ValueError as e:
                raise UsageError(f"bad value for {key!r}: {e}") from e
    for name in _FIELD_TYPES:
        flag_value = getattr(options, name, None)
        if flag_value is not None:
            values[name] = flag_value
    return RunConfig(command=options.command, **values)


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file with option defaults")
    common.add_argument(
        "--log-file", dest="log_file", help="Write log to FILE", metavar="FILE"
    )
    common.add_argument(
        "--log-level",
        default="INFO",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging level (default: %(default)s)",
    )
    common.add_argument("--lambda1", type=float, help="Skyrme coupling (> 0)")
    common.add_argument("--lambda2", type=float, help="Maxwell coupling (> 0)")
    common.add_argument("--lambda4", type=float, help="invariant coupling (!= 0)")
    common.add_argument("--n", type=int, help="winding number")
    common.add_argument("--g1", help="G1 family, e.g. power:2 or scaled:0.5,2")
    common.add_argument("--grid", help="NX,NY,XMIN,XMAX,YMIN,YMAX")
    common.add_argument("--seed", type=int, help="seed for random jets")
    common.add_argument("--out", help="primary output file")
    common.add_argument("--summary", help="also write the summary block here")
    return common


def parse_arguments(args: Optional[List[str]] = None) -> argparse.Namespace:
    """
    Parse command-line arguments.

    Config-layer options default to None so that only explicit flags override
    the config file.
    """
    parser = argparse.ArgumentParser(
        prog="bps-workbench",
        description="Solve and cross-verify BPS solitons of the gauged restricted"
        " baby Skyrme model.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_parser()

    solve = sub.add_parser("solve-radial", parents=[common], help="radial BPS solve")
    for flag in ("--rtol", "--atol", "--r-max", "--u-stop", "--a-stop", "--dr-out"):
        solve.add_argument(flag, type=float)
    solve.add_argument("--compacton-ratio", type=float)

    lift = sub.add_parser("lift", parents=[common], help="profile CSV to snapshot")
    lift.add_argument("--profile", help="radial profile CSV")
    lift.add_argument("--stretch", type=float, help="scale radii by this factor")
    lift.add_argument(
        "--keep-grid",
        action="store_const",
        const=True,
        help="do not shift a grid that has a node on the soliton centre",
    )

    verify = sub.add_parser("verify", parents=[common], help="check a snapshot")
    verify.add_argument("--snapshot", help="field snapshot CSV")
    _add_potential_flags(verify)
    for flag in ("--el-tol", "--r1-tol", "--r2-tol", "--tautology-tol", "--bound-tol"):
        verify.add_argument(flag, type=float)
    verify.add_argument("--samples", type=int, help="random jets for the dual checks")

    flow = sub.add_parser("flow", parents=[common], help="gradient flow")
    flow.add_argument("--snapshot", help="initial field snapshot CSV")
    flow.add_argument("--history", help="energy history CSV")
    _add_potential_flags(flow)
    flow.add_argument("--step", type=float, help="initial (or fixed) step size")
    flow.add_argument("--max-iter", type=int)
    flow.add_argument("--grad-tol", type=float)
    flow.add_argument("--energy-tol", type=float)
    flow.add_argument("--snapshot-every", type=int)
    flow.add_argument(
        "--fixed-step",
        action="store_const",
        const=True,
        help="disable the backtracking line search",
    )

    potential = sub.add_parser("potential", parents=[common], help="tabulate V(u)")
    _add_potential_flags(potential)
    potential.add_argument("--u-samples", type=int, help="samples on [0, 2]")

    tautology = sub.add_parser(
        "check-tautology", parents=[common], help="dual-equation checks"
    )
    _add_potential_flags(tautology)
    tautology.add_argument("--samples", type=int)
    tautology.add_argument("--jet-scale", type=float)
    tautology.add_argument("--tautology-tol", type=float)

    return parser.parse_args(args)


def _add_potential_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--potential-table", help="u,V CSV used instead of the G1 potential"
    )
    parser.add_argument(
        "--potential-scale", type=float, help="multiply the potential by this factor"
    )


class WorkbenchProcessor:
    """Base class: holds the resolved config and writes outputs with headers."""

    def __init__(
        self, cfg: RunConfig, log_level: str = "INFO", log_file: Optional[str] = None
    ) -> None:
        self.cfg = cfg
        self.log_level = log_level
        self.log_file = log_file
        setup_logging(self.log_level, self.log_file, force=True)
        self.header = cfg.to_header()
        self._blocks: List[str] = []

    def require(self, name: str) -> str:
        value = getattr(self.cfg, name)
        if not value:
            raise UsageError(
                f"{self.cfg.command} needs --{name.replace('_', '-')}"
            )
        return value

    def potential(self, g: GProfile) -> PotentialSpec:
        if self.cfg.potential_table:
            pot = potential_from_table(*read_potential_table(self.cfg.potential_table))
        else:
            pot = potential_from_g(g, self.cfg.params)
        if self.cfg.potential_scale != 1.0:
            pot = pot.scaled(self.cfg.potential_scale)
        return pot

    def emit(self, block: str) -> None:
        """Print a report block and append it to the summary file if any."""
        print(block)
        print()
        self._blocks.append(block)

    def flush_summary(self) -> None:
        if self.cfg.summary and self._blocks:
            with open_path(self.cfg.summary, "w") as out:
                write_header(out, self.header)
                out.write("\n\n".join(self._blocks) + "\n")

    def run(self) -> int:
        try:
            return self.execute()
        finally:
            self.flush_summary()

    def execute(self) -> int:  # pragma: no cover - abstract
        raise NotImplementedError


class SolveRadialProcessor(WorkbenchProcessor):
    """Radial solve, profile CSV and energy/bound summary."""

    def execute(self) -> int:
        g = self.cfg.g_profile()
        out = self.require("out")
        params = self.cfg.params
        profile = solve_radial(g, params, self.cfg.solver_options())
        write_profile(out, profile, params, g.label, self.header)

        energy = radial_energy(profile, g, params)
        densities = radial_densities(profile, g, params)
        summary: Dict[str, object] = {
            "termination": profile.termination.value,
            "degenerate": profile.degenerate,
            "branch": profile.branch,
            "r_end": profile.r_end,
            "u_end": profile.u_end,
            "a_end": profile.a_end,
            "min_one_plus_a": float(np.min(1.0 + profile.a)),
            "energy": energy.energy,
            "bound": energy.bound,
            "charge_bound": energy.charge_bound,
            "relative_gap": energy.relative_gap,
            "on_shell_error": densities.on_shell_error(),
            "max_abs_h_plus_i1": densities.max_abs_sum(),
        }
        if g.family in ("power", "scaled"):
            drift = power_first_integral(profile, g, params)
            summary["first_integral_drift"] = float(np.max(np.abs(drift)))
            summary["asymptotic_gauge"] = asymptotic_gauge(g, params)
        self.emit(format_report("solve-radial", summary))
        if profile.termination is Termination.SINGULARITY:
            log.error(
                "Singular gauge profile at r = %.6g; no regular soliton for these"
                " couplings",
                profile.r_end,
            )
            return EXIT_NUMERICAL
        return EXIT_OK


class LiftProcessor(WorkbenchProcessor):
    """Radial profile to 2D hedgehog snapshot."""

    def execute(self) -> int:
        profile, meta = read_profile(self.require("profile"))
        out = self.require("out")
        if self.cfg.stretch != 1.0:
            profile = stretch_profile(profile, self.cfg.stretch)
        grid = Grid2D.from_spec(self.cfg.grid)
        if grid.has_node_at_origin() and not self.cfg.keep_grid:
            grid = grid.shifted_half_cell()
            log.info("Shifted grid by half a spacing to avoid the soliton centre")
        n = profile.n if self.cfg.n is None else self.cfg.n
        state = lift_radial(profile, grid, n)
        header = dict(self.header, grid=grid.spec_string(), n=n)
        write_snapshot(out, state, header)
        self.emit(
            format_report(
                "lift",
                {
                    "profile_termination": meta.get("termination", ""),
                    "grid": grid.spec_string(),
                    "n": n,
                    "stretch": self.cfg.stretch,
                    "degree": degree(state),
                },
            )
        )
        return EXIT_OK


class VerifyProcessor(WorkbenchProcessor):
    """EL, Bogomolny, dual-equation and bound checks on a snapshot."""

    def execute(self) -> int:
        g = self.cfg.g_profile()
        state, _ = read_snapshot(self.require("snapshot"))
        params = self.cfg.params
        pot = self.potential(g)
        cfg = self.cfg

        el = el_residual(state, pot, params)
        bogo = bogomolny_residual(state, g, params)
        sweep = sweep_jets(
            g, pot, params, samples=cfg.samples, seed=cfg.seed, scale=cfg.jet_scale
        )
        bound = bound_report(state, pot, g, params)

        checks = {
            "el": el.sup_norm <= cfg.el_tol,
            "R1": bogo.sup("R1") <= cfg.r1_tol,
            "R2": bogo.sup("R2") <= cfg.r2_tol,
            "tautology": sweep.tautology <= cfg.tautology_tol,
            "el_consistency": sweep.el_consistency <= cfg.tautology_tol,
            "bound": bound.relative_gap <= cfg.bound_tol,
        }
        self.emit(
            format_report(
                "euler-lagrange",
                {
                    "sup_norm": el.sup_norm,
                    "l2_norm": el.l2_norm,
                    **{f"sup_{k}": v for k, v in el.breakdown},
                    "threshold": cfg.el_tol,
                    "pass": checks["el"],
                },
            )
        )
        self.emit(
            format_report(
                "bogomolny",
                {
                    "sup_norm": bogo.sup_norm,
                    "l2_norm": bogo.l2_norm,
                    "sup_R1": bogo.sup("R1"),
                    "sup_R2": bogo.sup("R2"),
                    "threshold_R1": cfg.r1_tol,
                    "threshold_R2": cfg.r2_tol,
                    "pass_R1": checks["R1"],
                    "pass_R2": checks["R2"],
                },
            )
        )
        self.emit(
            format_report(
                "tautology",
                {
                    "samples": sweep.samples,
                    "seed": sweep.seed,
                    "max_dual_residual": sweep.tautology,
                    "max_el_consistency": sweep.el_consistency,
                    "threshold": cfg.tautology_tol,
                    "pass": checks["tautology"] and checks["el_consistency"],
                },
            )
        )
        self.emit(
            format_report(
                "bound",
                {
                    "energy": bound.energy,
                    "integral_i1": bound.integral_i1,
                    "bound": bound.bound,
                    "relative_gap": bound.relative_gap,
                    "degree": bound.degree_q,
                    "invariant_charge": bound.invariant_charge,
                    "max_abs_h_plus_i1": bound.max_abs_h_plus_i1,
                    "min_h_plus_i1": bound.min_h_plus_i1,
                    "threshold": cfg.bound_tol,
                    "pass": checks["bound"],
                },
            )
        )
        failed = [name for name, ok in checks.items() if not ok]
        if failed:
            log.warning("Verification failed: %s", ", ".join(failed))
            return EXIT_THRESHOLD
        log.info("All verification checks passed")
        return EXIT_OK


class FlowProcessor(WorkbenchProcessor):
    """Gradient flow from a snapshot."""

    def execute(self) -> int:
        g = self.cfg.g_profile()
        initial, _ = read_snapshot(self.require("snapshot"))
        out = self.require("out")
        history_path = self.cfg.history or _with_suffix(out, "history")
        params = self.cfg.params
        pot = self.potential(g)
        cfg = self.cfg
        flow_cfg = FlowConfig(
            step=cfg.step,
            line_search=not cfg.fixed_step,
            max_iter=cfg.max_iter,
            grad_tol=cfg.grad_tol,
            energy_tol=cfg.energy_tol,
            snapshot_every=cfg.snapshot_every,
        )

        def on_snapshot(iteration: int, state: FieldState) -> None:
            write_snapshot(
                _with_suffix(out, f"iter{iteration:06d}"),
                state,
                dict(self.header, iteration=iteration),
            )

        q_before = degree(initial)
        result = run_flow(initial, pot, params, flow_cfg, on_snapshot)
        write_history(history_path, result.history, self.header)
        write_snapshot(out, result.state, self.header)
        parts = energy_components(result.state, pot, params)
        q_after = degree(result.state)
        self.emit(
            format_report(
                "flow",
                {
                    "reason": result.reason,
                    "iterations": result.iterations,
                    "initial_energy": result.initial_energy,
                    "final_energy": result.final_energy,
                    "final_grad_norm": result.history[-1].grad_norm,
                    "skyrme": parts.skyrme,
                    "maxwell": parts.maxwell,
                    "potential": parts.potential,
                    "degree_before": q_before,
                    "degree_after": q_after,
                    "history": history_path,
                },
            )
        )
        return EXIT_OK


class PotentialProcessor(WorkbenchProcessor):
    """Tabulate V(u) and check the existence condition."""

    def execute(self) -> int:
        g = self.cfg.g_profile()
        out = self.require("out")
        params = self.cfg.params
        pot = self.potential(g)
        table = tabulate(pot, g, params, self.cfg.u_samples)
        write_potential_table(out, table, self.header)
        self.emit(
            format_report(
                "potential",
                {
                    "family": g.label,
                    "provenance": pot.provenance,
                    "samples": self.cfg.u_samples,
                    "condition_max_error": check_condition(
                        pot, g, params, self.cfg.u_samples
                    ),
                    "V_at_2": float(table.v[-1]),
                },
            )
        )
        return EXIT_OK


class CheckTautologyProcessor(WorkbenchProcessor):
    """Dual-equation tautology and EL consistency on random jets."""

    def execute(self) -> int:
        g = self.cfg.g_profile()
        cfg = self.cfg
        pot = self.potential(g)
        sweep = sweep_jets(
            g, pot, cfg.params, samples=cfg.samples, seed=cfg.seed, scale=cfg.jet_scale
        )
        ok = max(sweep.tautology, sweep.el_consistency) <= cfg.tautology_tol
        self.emit(
            format_report(
                "check-tautology",
                {
                    "samples": sweep.samples,
                    "seed": sweep.seed,
                    "max_dual_residual": sweep.tautology,
                    "max_el_consistency": sweep.el_consistency,
                    **{f"max_{k}": v for k, v in sweep.worst},
                    "threshold": cfg.tautology_tol,
                    "pass": ok,
                },
            )
        )
        return EXIT_OK if ok else EXIT_THRESHOLD


PROCESSORS = {
    "solve-radial": SolveRadialProcessor,
    "lift": LiftProcessor,
    "verify": VerifyProcessor,
    "flow": FlowProcessor,
    "potential": PotentialProcessor,
    "check-tautology": CheckTautologyProcessor,
}


def _with_suffix(path: str, suffix: str) -> str:
    """``run.csv`` -> ``run.<suffix>.csv``.

    >>> _with_suffix("s3://bucket/run.csv", "history")
    's3://bucket/run.history.csv'
    """
    stem, dot, ext = path.rpartition(".")
    if not dot or "/" in ext:
        return f"{path}.{suffix}"
    return f"{stem}.{suffix}.{ext}"


def main(args: Optional[List[str]] = None) -> int:
    """
    Run one workbench command and return its exit code.

    Args:
        args: Command-line arguments (uses sys.argv if None)
    """
    load_dotenv()
    options = parse_arguments(args)
    try:
        cfg = resolve_config(options)
    except UsageError as e:
        log.error("%s", e)
        return EXIT_USAGE

    processor = PROCESSORS[cfg.command](
        cfg, log_level=options.log_level, log_file=options.log_file
    )
    log.info("Arguments: %s", options)

    try:
        return processor.run()
    except (SingularityError, NonFiniteEnergyError, IntegrationError) as e:
        log.error("Numerical failure: %s", e)
        return EXIT_NUMERICAL
    except BPSWorkbenchError as e:
        log.error("%s", e)
        return EXIT_USAGE


def cli() -> None:
    """Console-script entry point."""
    try:
        sys.exit(main())
    except Exception as e:
        log.error(f"Processing error: {e}", exc_info=True)
        sys.exit(EXIT_USAGE)


if __name__ == "__main__":
    cli()
