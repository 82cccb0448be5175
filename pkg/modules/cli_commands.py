import argparse
import json
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np
from pydantic import ValidationError

from config import DEFAULT_OUTPUT_DIR, DEFAULT_THREADS
from models.config_models import Provenance, RunConfig, grid_values
from models.errors import ConfigError
from models.physics_models import Pulse, QubitState, SweepOutcome
from modules.network_layer import (
    branch_fidelities,
    hadamard_perceptron,
    perceptron_gate,
    phase_correction,
    product_register,
)
from modules.propagation import distance_C, transfer_function
from services.faquad_service import faquad_ctilde, synthesize_faquad, worst_case_x
from services.ie_synthesis import synthesize
from services.sweep_service import PLATEAU_TOLERANCE, SweepService, optimal_time
from storage import tables
from utils.logging_setup import get_logger

logger = get_logger("cli")

COMMAND_NAMES = ("synth", "faquad", "transfer", "sweep", "scan", "network")


def load_run_config(path: str, command: Optional[str] = None) -> RunConfig:
    """Read a JSON run config; a missing 'command' is taken from the subcommand."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must hold a JSON object")
    if command is not None:
        data.setdefault("command", command)
        if data["command"] != command:
            raise ConfigError(f"{path} configures '{data['command']}', not '{command}'")
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(str(e)) from e


def _echo(run: RunConfig) -> dict:
    return run.model_dump(mode="json", exclude_none=True)


def _inner_grids(run: RunConfig, degree: Optional[int]):
    if degree is None or degree < 4:
        return None
    names = ["a2_grid", "a3_grid", "a4_grid"][: degree - 3]
    grids = [grid_values(getattr(run, name)) for name in names]
    if any(len(g) == 0 for g in grids):
        return None
    return grids


def build_pulse(run: RunConfig) -> Pulse:
    """Pulse for transfer/network runs: read from pulse_path or synthesized per the method."""
    if run.pulse_path is not None:
        return tables.read_pulse_csv(run.pulse_path)
    if run.resolved_method is Provenance.FAQUAD:
        return synthesize_faquad(run.faquad_config())
    return synthesize(run.synthesis).pulse


# --------------- COMMANDS ---------------
def cmd_synth(run: RunConfig, out: Path, service: SweepService, prefix: str = "") -> List[Path]:
    result = synthesize(run.synthesis)
    diag = result.diagnostics
    logger.info(
        f"{result.pulse.provenance.value} t_f={run.synthesis.t_f}: "
        f"epsilon_achieved={diag.epsilon_achieved:.3e}, Omega(0)={diag.omega_0:.6g}"
    )
    echo = _echo(run)
    return [
        tables.write_pulse_csv(result.pulse, out / f"{prefix}pulse.csv", echo),
        tables.write_trajectory_csv(result, out / f"{prefix}trajectory.csv"),
        tables.write_json(tables.diagnostics_payload(result, echo), out / f"{prefix}diagnostics.json"),
    ]


def cmd_faquad(run: RunConfig, out: Path, service: SweepService, prefix: str = "") -> List[Path]:
    cfg = run.faquad_config()
    worst = worst_case_x(cfg.omega_f, cfg.omega_start, report=cfg.x_star is None)
    x_star = cfg.x_star if cfg.x_star is not None else worst
    pulse = synthesize_faquad(cfg)
    report = distance_C(pulse, run.synthesis.x_max, run.synthesis.bias)
    logger.info(f"FAQUAD t_f={cfg.t_f}: x_star={x_star:.6g}, C={report.C:.4g}")
    echo = _echo(run)
    summary = {
        "provenance": Provenance.FAQUAD.value,
        "config_hash": pulse.config_hash,
        "x_star": x_star,
        "worst_case_x": worst,
        "ctilde": faquad_ctilde(x_star, cfg.omega_start, cfg.omega_f),
        "C": report.C,
        "F0": report.F0,
        "F1": report.F1,
        "config": echo,
    }
    return [
        tables.write_pulse_csv(pulse, out / f"{prefix}pulse.csv", echo),
        tables.write_json(summary, out / f"{prefix}faquad.json"),
    ]


def cmd_transfer(run: RunConfig, out: Path, service: SweepService, prefix: str = "") -> List[Path]:
    pulse = build_pulse(run)
    x_max = run.synthesis.x_max
    x_grid = None if run.x_grid is None else grid_values(run.x_grid) * pulse.omega_f
    curve = transfer_function(pulse, x_grid, x_max=x_max, bias=run.synthesis.bias)
    report = distance_C(pulse, x_max, run.synthesis.bias)
    logger.info(f"{pulse.provenance.value} transfer over {len(curve.excitation)} points, C={report.C:.4g}")
    header = {
        "provenance": pulse.provenance.value,
        "config_hash": pulse.config_hash,
        "C": report.C,
        "config": _echo(run),
    }
    return [tables.write_transfer_csv(curve, out / f"{prefix}transfer.csv", header)]


def cmd_sweep(run: RunConfig, out: Path, service: SweepService, prefix: str = "") -> List[Path]:
    method = run.resolved_method
    echo = _echo(run)
    inner = _inner_grids(run, method.degree)

    if run.sweep == "time_optimal":
        template = run.synthesis.model_copy(
            update={"degree": method.degree, "free_coeffs": [0.0] * (method.degree - 3)}
        )
        result = service.time_optimal(template, run.c_tolerance, grid_values(run.tf_grid), inner)
        logger.info(f"Time-optimal t_f={result.t_f:g} with C={result.best.C:.4g}")
        evaluated = SweepOutcome(records=result.evaluated, best=result.best, swept=["t_f"])
        summary = tables.sweep_summary(evaluated, echo)
        summary.update({"t_f_min": result.t_f, "c_tolerance": run.c_tolerance})
        return [
            tables.write_sweep_csv(evaluated, out / f"{prefix}sweep.csv", {"method": method.value}),
            tables.write_json(summary, out / f"{prefix}summary.json"),
            tables.write_pulse_csv(result.witness.pulse, out / f"{prefix}witness_pulse.csv"),
        ]

    if run.sweep == "tf":
        outcome = service.sweep_tf(run.synthesis, grid_values(run.tf_grid), method, inner)
    elif run.sweep == "omega_f":
        outcome = service.sweep_omega_f(run.synthesis, grid_values(run.omega_f_grid), method, inner)
    else:
        outcome = service.scan_y(run.synthesis, grid_values(run.y_grid), method)
    logger.info(f"Sweep over {', '.join(outcome.swept)}: best C={outcome.best.C:.4g} at {outcome.best.params}")
    summary = tables.sweep_summary(outcome, echo)
    if run.sweep == "tf" and not all(r.failed for r in outcome.records):
        summary.update({"optimal_t_f": optimal_time(outcome), "plateau_tolerance": PLATEAU_TOLERANCE})
    return [
        tables.write_sweep_csv(outcome, out / f"{prefix}sweep.csv", {"method": method.value}),
        tables.write_json(summary, out / f"{prefix}summary.json"),
    ]


def cmd_scan(run: RunConfig, out: Path, service: SweepService, prefix: str = "") -> List[Path]:
    grids = [grid_values(getattr(run, name)) for name in ["a2_grid", "a3_grid", "a4_grid"][: run.synthesis.degree - 3]]
    outcome = service.scan_coefficients(run.synthesis, *grids)
    logger.info(f"Coefficient scan: best C={outcome.best.C:.4g} at {outcome.best.params}")
    return [
        tables.write_sweep_csv(outcome, out / f"{prefix}scan.csv", {"method": run.synthesis.provenance.value}),
        tables.write_json(tables.sweep_summary(outcome, _echo(run)), out / f"{prefix}summary.json"),
    ]


def cmd_network(run: RunConfig, out: Path, service: SweepService, prefix: str = "") -> List[Path]:
    layer = run.layer
    pulse = build_pulse(run)
    if run.register_path is not None:
        register = tables.read_register_csv(run.register_path)
    else:
        # previous layer in the uniform superposition, perceptron in |0>
        size = 2 ** layer.n_prev
        register = product_register(np.full(size, 1 / np.sqrt(size)), QubitState(1.0, 0.0))

    state = hadamard_perceptron(register)
    state = perceptron_gate(pulse, layer, state, run.synthesis.x_max)
    state = phase_correction(state, layer)
    reports = branch_fidelities(state, layer, pulse.omega_f, run.synthesis.x_max)
    worst = min((r.fidelity for r in reports if r.mass > 0), default=float("nan"))
    logger.info(f"Perceptron gate over {len(reports)} configurations, worst branch fidelity {worst:.6f}")

    header = {"provenance": pulse.provenance.value, "config_hash": pulse.config_hash, "config": _echo(run)}
    return [
        tables.write_register_csv(state, out / f"{prefix}register.csv", header),
        tables.write_branch_csv(reports, out / f"{prefix}branches.csv", header),
    ]


COMMANDS: Dict[str, Callable[..., List[Path]]] = {
    "synth": cmd_synth,
    "faquad": cmd_faquad,
    "transfer": cmd_transfer,
    "sweep": cmd_sweep,
    "scan": cmd_scan,
    "network": cmd_network,
}


def execute(run: RunConfig, out: Path, service: SweepService, prefix: str = "") -> List[Path]:
    return COMMANDS[run.command](run, out, service, prefix)



# --------------- ARGUMENT PARSING ---------------
def register_commands(subparsers, preset_names) -> None:
    """Attach one subcommand per run kind plus 'preset'."""
    for name in COMMAND_NAMES:
        sub = subparsers.add_parser(name, help=f"{name} run from a JSON config")
        sub.add_argument("--config", required=True, help="JSON run config")
        add_common_flags(sub)

    preset = subparsers.add_parser("preset", help="reproduce a bundled figure data set")
    preset.add_argument("name", choices=sorted(preset_names))
    add_common_flags(preset)


def add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", default=DEFAULT_OUTPUT_DIR, help="output directory")
    parser.add_argument("--threads", type=int, default=DEFAULT_THREADS, help="worker threads (speed only)")
    parser.add_argument("--progress", action="store_true", help="show progress bars")
