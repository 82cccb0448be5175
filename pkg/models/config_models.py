from enum import Enum
from typing import List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config import EPSILON, KAPPA, N_TIME, OMEGA_F, X_MAX, DESIGN_Y


class Provenance(str, Enum):
    IE_CUBIC = "IE-cubic"
    IE_QUARTIC = "IE-quartic"
    IE_QUINTIC = "IE-quintic"
    IE_SEXTIC = "IE-sextic"
    FAQUAD = "FAQUAD"

    @classmethod
    def for_degree(cls, degree: int) -> "Provenance":
        return {3: cls.IE_CUBIC, 4: cls.IE_QUARTIC, 5: cls.IE_QUINTIC, 6: cls.IE_SEXTIC}[degree]

    @property
    def degree(self) -> Optional[int]:
        return {"IE-cubic": 3, "IE-quartic": 4, "IE-quintic": 5, "IE-sextic": 6}.get(self.value)


class SynthesisConfig(BaseModel):
    """Scalar knobs of one inverse-engineering run."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    kappa: float = Field(KAPPA, gt=0)
    omega_f: float = Field(OMEGA_F, gt=0)
    # t_f = 0 passes validation and is rejected by the synthesis itself
    t_f: float = Field(1.0, ge=0)
    x_max: float = Field(X_MAX, gt=0)
    y: float = DESIGN_Y
    epsilon: float = Field(EPSILON, gt=0, lt=0.1)
    bias: float = 0.0
    degree: int = 3
    free_coeffs: List[float] = Field(default_factory=list)
    n_time: int = Field(N_TIME, ge=1000)
    omega_cap: Optional[float] = Field(None, gt=0)
    ode_method: str = "RK45"

    @field_validator("degree")
    @classmethod
    def _known_degree(cls, value: int) -> int:
        if value not in (3, 4, 5, 6):
            raise ValueError(f"ansatz degree must be one of 3, 4, 5, 6 (got {value})")
        return value

    @model_validator(mode="after")
    def _check_invariants(self) -> "SynthesisConfig":
        if self.kappa < 100 * self.x_max * self.omega_f:
            raise ValueError("kappa must be at least 100 * x_max * omega_f")
        if len(self.free_coeffs) != self.degree - 3:
            raise ValueError(
                f"degree {self.degree} needs {self.degree - 3} free coefficients, got {len(self.free_coeffs)}"
            )
        return self

    @property
    def cap(self) -> float:
        return self.omega_cap if self.omega_cap is not None else 10 * self.kappa

    @property
    def provenance(self) -> Provenance:
        return Provenance.for_degree(self.degree)


class FaquadConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    omega_start: float = KAPPA
    omega_f: float = OMEGA_F
    t_f: float = Field(1.0, gt=0)
    # None selects worst_case_x(omega_f); comparisons against IE use matched_to()
    x_star: Optional[float] = None
    n_s: int = Field(N_TIME, ge=2)

    @model_validator(mode="after")
    def _check_invariants(self) -> "FaquadConfig":
        if not (self.omega_start > self.omega_f > 0):
            raise ValueError("FAQUAD needs omega_start > omega_f > 0")
        if self.x_star is not None and self.x_star == 0:
            raise ValueError("x_star = 0 has no adiabatic coupling")
        return self

    @classmethod
    def matched_to(cls, synthesis: SynthesisConfig, y: Optional[float] = None) -> "FaquadConfig":
        """Ramp designed at the potential |y| of the IE run it is compared with."""
        design = synthesis.y if y is None else y
        return cls(
            omega_start=synthesis.kappa,
            omega_f=synthesis.omega_f,
            t_f=synthesis.t_f,
            x_star=abs(float(design)),
            n_s=synthesis.n_time,
        )


class LayerSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    weights: List[float]
    bias: float = 0.0
    n_prev: int

    @model_validator(mode="before")
    @classmethod
    def _default_n_prev(cls, data):
        if isinstance(data, dict) and data.get("n_prev") is None and "weights" in data:
            data = {**data, "n_prev": len(data["weights"])}
        return data

    @model_validator(mode="after")
    def _check_invariants(self) -> "LayerSpec":
        if len(self.weights) != self.n_prev:
            raise ValueError(f"weights has {len(self.weights)} entries but n_prev = {self.n_prev}")
        if self.n_prev > 12:
            raise ValueError("at most 12 previous-layer qubits are supported")
        return self


class GridSpec(BaseModel):
    """Inclusive uniform grid start, start+step, ..., stop."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    start: float
    stop: float
    step: float = Field(gt=0)

    @model_validator(mode="after")
    def _non_empty(self) -> "GridSpec":
        if self.stop < self.start:
            raise ValueError("grid stop lies before start")
        return self

    def values(self) -> np.ndarray:
        n = int(np.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return np.round(self.start + self.step * np.arange(n), 12)


Grid = Union[GridSpec, List[float]]


def grid_values(grid: Optional[Grid]) -> np.ndarray:
    if grid is None:
        return np.array([], dtype=float)
    if isinstance(grid, GridSpec):
        return grid.values()
    return np.asarray(grid, dtype=float)


class RunConfig(BaseModel):
    """One CLI invocation: a command plus the parameter sets it needs."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    command: Literal["synth", "faquad", "transfer", "sweep", "scan", "network"]
    synthesis: SynthesisConfig = Field(default_factory=SynthesisConfig)
    faquad: Optional[FaquadConfig] = None
    layer: Optional[LayerSpec] = None
    # None follows synthesis.degree
    method: Optional[Provenance] = None
    # transfer / network inputs
    pulse_path: Optional[str] = None
    register_path: Optional[str] = None
    x_grid: Optional[Grid] = None
    # sweep / scan grids
    sweep: Optional[Literal["tf", "omega_f", "y", "time_optimal"]] = None
    tf_grid: Optional[Grid] = None
    omega_f_grid: Optional[Grid] = None
    y_grid: Optional[Grid] = None
    a2_grid: Optional[Grid] = None
    a3_grid: Optional[Grid] = None
    a4_grid: Optional[Grid] = None
    c_tolerance: float = Field(0.01, gt=0)

    @model_validator(mode="after")
    def _grids_present(self) -> "RunConfig":
        required = {
            ("sweep", "tf"): ["tf_grid"],
            ("sweep", "time_optimal"): ["tf_grid"],
            ("sweep", "omega_f"): ["omega_f_grid"],
            ("sweep", "y"): ["y_grid"],
        }
        if self.command == "sweep":
            if self.sweep is None:
                raise ValueError("sweep command needs a 'sweep' kind")
            for name in required[("sweep", self.sweep)]:
                if len(grid_values(getattr(self, name))) == 0:
                    raise ValueError(f"{name} must be a non-empty grid")
        if self.command == "scan":
            if self.synthesis.degree < 4:
                raise ValueError("coefficient scans need an ansatz of degree >= 4")
            names = ["a2_grid", "a3_grid", "a4_grid"][: self.synthesis.degree - 3]
            for name in names:
                if len(grid_values(getattr(self, name))) == 0:
                    raise ValueError(f"{name} must be a non-empty grid")
        if self.command == "network" and self.layer is None:
            raise ValueError("network command needs a layer spec")
        if self.x_grid is not None and len(grid_values(self.x_grid)) == 0:
            raise ValueError("x_grid must be non-empty")
        method = self.resolved_method
        if self.command == "sweep" and self.sweep == "time_optimal" and method is Provenance.FAQUAD:
            raise ValueError("time_optimal searches IE ansatzes only")
        single_pulse = self.command in ("synth", "transfer", "network") and self.pulse_path is None
        single_pulse = single_pulse or (self.command == "sweep" and self.sweep == "y")
        if single_pulse and method.degree is not None and method.degree != self.synthesis.degree:
            raise ValueError(f"method {method.value} disagrees with synthesis.degree = {self.synthesis.degree}")
        if self.command == "synth" and method is Provenance.FAQUAD:
            raise ValueError("use the faquad command for FAQUAD pulses")
        return self

    @property
    def resolved_method(self) -> Provenance:
        return self.method if self.method is not None else self.synthesis.provenance

    def faquad_config(self) -> FaquadConfig:
        """Explicit FAQUAD block, or one designed at the synthesis potential y."""
        if self.faquad is not None:
            return self.faquad
        return FaquadConfig.matched_to(self.synthesis)
