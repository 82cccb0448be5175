"""Bundled run sets, one per reference figure data set (fig2 ... figS3).

Every preset writes into <out>/<name>/ and uses the default operating point
(kappa = 2000, x_max = 12, omega_f = 1, y / omega_f = 12, b = 0).
"""
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

from models.config_models import GridSpec, Provenance, RunConfig, SynthesisConfig
from modules.cli_commands import execute
from services.sweep_service import SweepService
from storage import tables
from utils.logging_setup import get_logger

logger = get_logger("presets")

TF_GRID = GridSpec(start=0.1, stop=1.0, step=0.05)
Y_GRID = GridSpec(start=-12.0, stop=12.0, step=0.5)
OMEGA_F_GRID = GridSpec(start=0.1, stop=1.6, step=0.1)
# coarse inner grids for the per-t_f quintic search; figS3 holds the fine scan
QUINTIC_A2_COARSE = GridSpec(start=-200.0, stop=100.0, step=25.0)
QUINTIC_A3_COARSE = GridSpec(start=-6000.0, stop=0.0, step=250.0)
QUINTIC_BEST_015 = [-50.0, -3980.0]


def _synthesis(t_f: float, degree: int = 3, free_coeffs: Optional[List[float]] = None) -> SynthesisConfig:
    return SynthesisConfig(t_f=t_f, degree=degree, free_coeffs=free_coeffs or [])


def _pulse_and_transfer(out: Path, service: SweepService, label: str, run: RunConfig) -> List[Path]:
    """Write a pulse, then the transfer curve of that same file."""
    synth_kind = "faquad" if run.resolved_method is Provenance.FAQUAD else "synth"
    written = execute(run.model_copy(update={"command": synth_kind}), out, service, f"{label}_")
    transfer = RunConfig(
        command="transfer",
        synthesis=run.synthesis,
        method=run.resolved_method,
        pulse_path=str(out / f"{label}_pulse.csv"),
    )
    return written + execute(transfer, out, service, f"{label}_")


def _combine(paths: Dict[str, Path], key: str, target: Path) -> Path:
    """Join the C column of several sweep tables on their swept parameter."""
    merged = None
    for label, path in paths.items():
        frame = tables.read_table(path, [key, "C"])[[key, "C"]].rename(columns={"C": label})
        merged = frame if merged is None else merged.merge(frame, on=key, how="outer")
    merged = merged.sort_values(key).reset_index(drop=True)
    return tables.write_table(merged, target, {"columns": ",".join(paths)})


def fig2(out: Path, service: SweepService) -> List[Path]:
    run = RunConfig(command="synth", synthesis=_synthesis(1.0))
    return _pulse_and_transfer(out, service, "ie_cubic", run)


def _scan_y(out: Path, service: SweepService, method: Provenance) -> List[Path]:
    written = []
    for t_f in (0.2, 0.5, 1.0):
        run = RunConfig(command="sweep", sweep="y", synthesis=_synthesis(t_f), method=method, y_grid=Y_GRID)
        written += execute(run, out, service, f"tf{t_f:g}_")
    return written


def fig3a(out: Path, service: SweepService) -> List[Path]:
    return _scan_y(out, service, Provenance.IE_CUBIC)


def fig3b(out: Path, service: SweepService) -> List[Path]:
    return _scan_y(out, service, Provenance.FAQUAD)


def fig4(out: Path, service: SweepService) -> List[Path]:
    written, tables_by_method = [], {}
    for method in (Provenance.IE_CUBIC, Provenance.FAQUAD):
        run = RunConfig(
            command="sweep", sweep="omega_f", synthesis=_synthesis(0.2), method=method, omega_f_grid=OMEGA_F_GRID
        )
        label = method.value.lower().replace("-", "_")
        written += execute(run, out, service, f"{label}_")
        tables_by_method[method.value] = out / f"{label}_sweep.csv"
    return written + [_combine(tables_by_method, "omega_f", out / "fig4.csv")]


def fig5a(out: Path, service: SweepService) -> List[Path]:
    written, tables_by_method = [], {}
    for method in (Provenance.IE_CUBIC, Provenance.IE_QUINTIC, Provenance.FAQUAD):
        run = RunConfig(
            command="sweep",
            sweep="tf",
            synthesis=_synthesis(1.0),
            method=method,
            tf_grid=TF_GRID,
            a2_grid=QUINTIC_A2_COARSE,
            a3_grid=QUINTIC_A3_COARSE,
        )
        label = method.value.lower().replace("-", "_")
        written += execute(run, out, service, f"{label}_")
        tables_by_method[method.value] = out / f"{label}_sweep.csv"
    return written + [_combine(tables_by_method, "t_f", out / "fig5a.csv")]


def _compare_at(out: Path, service: SweepService, t_f: float, quintic: bool) -> List[Path]:
    runs: List[Tuple[str, RunConfig]] = [
        ("ie_cubic", RunConfig(command="synth", synthesis=_synthesis(t_f))),
        ("faquad", RunConfig(command="faquad", synthesis=_synthesis(t_f), method=Provenance.FAQUAD)),
    ]
    if quintic:
        runs.insert(1, ("ie_quintic", RunConfig(command="synth", synthesis=_synthesis(t_f, 5, QUINTIC_BEST_015))))
    written = []
    for label, run in runs:
        written += _pulse_and_transfer(out, service, label, run)
    return written


def fig5b(out: Path, service: SweepService) -> List[Path]:
    return _compare_at(out, service, 0.15, quintic=True)


def figS1(out: Path, service: SweepService) -> List[Path]:
    return _compare_at(out, service, 0.3, quintic=False)


def figS2(out: Path, service: SweepService) -> List[Path]:
    run = RunConfig(
        command="scan",
        synthesis=_synthesis(0.15, 4, [0.0]),
        a2_grid=GridSpec(start=-600.0, stop=100.0, step=1.0),
    )
    return execute(run, out, service, "ie_quartic_")


def figS3(out: Path, service: SweepService) -> List[Path]:
    run = RunConfig(
        command="scan",
        synthesis=_synthesis(0.15, 5, [0.0, 0.0]),
        a2_grid=GridSpec(start=-200.0, stop=100.0, step=5.0),
        a3_grid=GridSpec(start=-6000.0, stop=0.0, step=20.0),
    )
    return execute(run, out, service, "ie_quintic_")


PRESETS: Dict[str, Tuple[Callable[[Path, SweepService], List[Path]], str]] = {
    "fig2": (fig2, "cubic IE pulse, angles and transfer curve at t_f = 1"),
    "fig3a": (fig3a, "IE distance C versus design potential y"),
    "fig3b": (fig3b, "FAQUAD distance C versus design potential y"),
    "fig4": (fig4, "C versus omega_f at t_f = 0.2, IE and FAQUAD"),
    "fig5a": (fig5a, "C versus t_f for IE-cubic, IE-quintic and FAQUAD"),
    "fig5b": (fig5b, "pulses and transfer curves at t_f = 0.15"),
    "figS1": (figS1, "IE and FAQUAD pulses and transfer curves at t_f = 0.3"),
    "figS2": (figS2, "quartic coefficient scan at t_f = 0.15"),
    "figS3": (figS3, "quintic two-coefficient scan at t_f = 0.15"),
}


def run_preset(name: str, out: Path, service: SweepService) -> List[Path]:
    runner, description = PRESETS[name]
    logger.info(f"Preset {name}: {description}")
    return runner(Path(out) / name, service)
