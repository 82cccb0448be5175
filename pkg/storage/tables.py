import json
from dataclasses import asdict
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Union

import numpy as np
import pandas as pd

from models.config_models import LayerSpec, Provenance
from models.errors import TableFormatError
from models.physics_models import Pulse, RegisterState, SweepOutcome, SynthesisResult, TransferCurve

PathLike = Union[str, Path]


def _header_lines(header: Mapping[str, object]) -> List[str]:
    lines = []
    for key, value in header.items():
        if isinstance(value, (dict, list)):
            value = json.dumps(value, sort_keys=True)
        elif isinstance(value, bool):
            value = str(value).lower()
        elif isinstance(value, float):
            value = repr(value)
        lines.append(f"# {key}: {value}\n")
    return lines


def write_table(frame: pd.DataFrame, path: PathLike, header: Optional[Mapping[str, object]] = None) -> Path:
    """CSV with '#'-prefixed 'key: value' comment lines ahead of the column row."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        f.writelines(_header_lines(header or {}))
        frame.to_csv(f, index=False, lineterminator="\n")
    return path


def read_header(path: PathLike) -> Dict[str, str]:
    header = {}
    with open(path) as f:
        for line in f:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].partition(":")
            header[key.strip()] = value.strip()
    return header


def read_table(path: PathLike, columns: Sequence[str]) -> pd.DataFrame:
    frame = pd.read_csv(path, comment="#", float_precision="round_trip")
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise TableFormatError(f"{path} lacks column(s) {', '.join(missing)}")
    return frame


def write_json(payload: Mapping[str, object], path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


# --------------- PULSES ---------------
def write_pulse_csv(pulse: Pulse, path: PathLike, echo: Optional[Mapping[str, object]] = None) -> Path:
    header = {
        "provenance": pulse.provenance.value,
        "config_hash": pulse.config_hash,
        "omega_f": float(pulse.omega_f),
        "theta0": float(pulse.theta0),
        "beta0": float(pulse.beta0),
        "clamped": bool(pulse.clamped),
    }
    if echo is not None:
        header["config"] = dict(echo)
    frame = pd.DataFrame({"time": pulse.grid, "omega": pulse.omega})
    return write_table(frame, path, header)


def read_pulse_csv(path: PathLike) -> Pulse:
    header = read_header(path)
    frame = read_table(path, ["time", "omega"])
    try:
        return Pulse(
            grid=frame["time"].to_numpy(dtype=float),
            omega=frame["omega"].to_numpy(dtype=float),
            provenance=Provenance(header["provenance"]),
            omega_f=float(header["omega_f"]),
            theta0=float(header.get("theta0", np.pi / 2)),
            beta0=float(header.get("beta0", np.pi)),
            config_hash=header.get("config_hash", ""),
            clamped=header.get("clamped", "false") == "true",
        )
    except (KeyError, ValueError) as e:
        raise TableFormatError(f"{path} is not a pulse table: {e}") from e


# --------------- SYNTHESIS ARTIFACTS ---------------
def write_trajectory_csv(result: SynthesisResult, path: PathLike) -> Path:
    grid = result.beta.grid
    frame = pd.DataFrame({"time": grid, "theta": result.theta.theta(grid), "beta": result.beta.beta})
    return write_table(frame, path, {"config_hash": result.diagnostics.config_hash})


def diagnostics_payload(result: SynthesisResult, echo: Optional[Mapping[str, object]] = None) -> Dict[str, object]:
    diag = result.diagnostics
    payload = {
        "provenance": result.pulse.provenance.value,
        "config_hash": diag.config_hash,
        "epsilon_achieved": diag.epsilon_achieved,
        "omega_0": diag.omega_0,
        "omega_max": diag.omega_max,
        "clamped": diag.clamped,
        "theta_boundaries": list(diag.theta_boundaries),
        "theta_coeffs": [float(c) for c in result.theta.coeffs],
    }
    if echo is not None:
        payload["config"] = dict(echo)
    return payload


# --------------- TRANSFER CURVES ---------------
def write_transfer_csv(curve: TransferCurve, path: PathLike, header: Optional[Mapping[str, object]] = None) -> Path:
    frame = pd.DataFrame({"x_over_omega_f": curve.x_over_omega_f, "P": curve.excitation})
    return write_table(frame, path, header)


def read_transfer_csv(path: PathLike) -> TransferCurve:
    frame = read_table(path, ["x_over_omega_f", "P"])
    return TransferCurve(
        x_over_omega_f=frame["x_over_omega_f"].to_numpy(dtype=float),
        excitation=frame["P"].to_numpy(dtype=float),
    )


# --------------- SWEEPS ---------------
def sweep_frame(outcome: SweepOutcome) -> pd.DataFrame:
    rows = []
    for record in outcome.records:
        row = dict(record.params)
        row.update({
            "C": record.C,
            "failed": record.failed,
            "epsilon_achieved": record.epsilon_achieved,
            "omega_0": record.omega_0,
            "config_hash": record.config_hash,
        })
        row.update(record.extra)
        rows.append(row)
    return pd.DataFrame(rows)


def write_sweep_csv(outcome: SweepOutcome, path: PathLike, header: Optional[Mapping[str, object]] = None) -> Path:
    meta = {"swept": ",".join(outcome.swept)}
    meta.update(header or {})
    return write_table(sweep_frame(outcome), path, meta)


def sweep_summary(outcome: SweepOutcome, echo: Optional[Mapping[str, object]] = None) -> Dict[str, object]:
    best = outcome.best
    payload = {
        "swept": outcome.swept,
        "n_records": len(outcome.records),
        "n_failed": sum(1 for r in outcome.records if r.failed),
        "argmin": dict(best.params),
        "C_min": best.C,
        "config_hash": best.config_hash,
    }
    if echo is not None:
        payload["config"] = dict(echo)
    return payload


# --------------- REGISTERS & LAYERS ---------------
def write_register_csv(state: RegisterState, path: PathLike, header: Optional[Mapping[str, object]] = None) -> Path:
    amplitudes = state.amplitudes
    frame = pd.DataFrame({"index": np.arange(amplitudes.size), "re": amplitudes.real, "im": amplitudes.imag})
    return write_table(frame, path, {"n_prev": state.n_prev, **(header or {})})


def read_register_csv(path: PathLike) -> RegisterState:
    frame = read_table(path, ["index", "re", "im"]).sort_values("index")
    amplitudes = frame["re"].to_numpy(dtype=float) + 1j * frame["im"].to_numpy(dtype=float)
    size = amplitudes.size
    if size < 2 or size & (size - 1):
        raise TableFormatError(f"{path} holds {amplitudes.size} amplitudes, not a power of two >= 2")
    n_prev = size.bit_length() - 2
    try:
        return RegisterState(amplitudes=amplitudes, n_prev=n_prev)
    except ValueError as e:
        raise TableFormatError(f"{path}: {e}") from e


def write_layer_json(layer: LayerSpec, path: PathLike) -> Path:
    return write_json(layer.model_dump(mode="json"), path)


def read_layer_json(path: PathLike) -> LayerSpec:
    return LayerSpec.model_validate_json(Path(path).read_text())


def write_branch_csv(reports: Sequence, path: PathLike, header: Optional[Mapping[str, object]] = None) -> Path:
    frame = pd.DataFrame([asdict(r) for r in reports])
    return write_table(frame, path, header)
