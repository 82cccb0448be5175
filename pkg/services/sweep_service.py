import asyncio
from concurrent.futures import ThreadPoolExecutor
from itertools import product
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from pydantic import ValidationError
from tqdm import tqdm

from config import DEFAULT_THREADS
from models.config_models import FaquadConfig, Provenance, SynthesisConfig
from models.errors import QuadratureError, SynthesisFailure, UnattainableTolerance
from models.physics_models import SweepOutcome, SweepRecord, TimeOptimalResult
from modules.propagation import distance_C
from services.faquad_service import synthesize_faquad
from services.ie_synthesis import synthesize
from utils.hashing import config_hash
from utils.logging_setup import get_logger

logger = get_logger("sweep")

FAILED_C = 2.0
# C above the sweep minimum still counted as on the plateau by optimal_time
PLATEAU_TOLERANCE = 0.02

# Coarse defaults; the fine grids of the coefficient scans are passed explicitly
DEFAULT_A2_QUARTIC = np.arange(-600.0, 101.0, 1.0)
DEFAULT_A2_QUINTIC = np.arange(-200.0, 101.0, 5.0)
DEFAULT_A3_QUINTIC = np.arange(-6000.0, 1.0, 20.0)


def _ranking_key(record: SweepRecord):
    # equal C: smallest |a2|, then |a3|, then t_f
    params = record.params
    c_value = FAILED_C if record.failed else record.C
    return (c_value, abs(params.get("a2", 0.0)), abs(params.get("a3", 0.0)), params.get("t_f", 0.0))


def best_record(records: Sequence[SweepRecord]) -> SweepRecord:
    return min(records, key=_ranking_key)


def optimal_time(outcome: SweepOutcome, tolerance: float = PLATEAU_TOLERANCE) -> float:
    """Shortest t_f whose C lies within tolerance of the smallest C of a t_f sweep.

    The argmin of C sits anywhere on the long-time plateau, so it is not used here.
    """
    timed = [r for r in outcome.records if not r.failed and "t_f" in r.params]
    if not timed:
        raise ValueError("optimal_time needs at least one successful t_f record")
    floor = min(r.C for r in timed)
    return min(r.params["t_f"] for r in timed if r.C <= floor + tolerance)


def evaluate_ie(cfg: SynthesisConfig, params: Dict[str, float]) -> SweepRecord:
    """Synthesize one IE pulse and score it; failures become C = 2 records."""
    digest = config_hash(cfg)
    try:
        result = synthesize(cfg)
        if result.pulse.clamped:
            return SweepRecord(
                params=params, C=FAILED_C, config_hash=digest, failed=True, note="pulse clamped at omega_cap",
                epsilon_achieved=result.diagnostics.epsilon_achieved, omega_0=result.diagnostics.omega_0,
            )
        report = distance_C(result.pulse, cfg.x_max, cfg.bias)
        return SweepRecord(
            params=params,
            C=report.C,
            config_hash=digest,
            epsilon_achieved=result.diagnostics.epsilon_achieved,
            omega_0=result.diagnostics.omega_0,
            extra={"F0": report.F0, "F1": report.F1},
        )
    except SynthesisFailure as e:
        logger.warning(f"Synthesis failed for {params}: {e}")
        return SweepRecord(params=params, C=FAILED_C, config_hash=digest, failed=True, note=str(e))


def evaluate_faquad(cfg: FaquadConfig, params: Dict[str, float], x_max: float, bias: float = 0.0) -> SweepRecord:
    digest = config_hash(cfg)
    try:
        pulse = synthesize_faquad(cfg)
        report = distance_C(pulse, x_max, bias)
        return SweepRecord(
            params=params,
            C=report.C,
            config_hash=digest,
            omega_0=float(pulse.omega[0]),
            extra={"F0": report.F0, "F1": report.F1},
        )
    except QuadratureError as e:
        logger.warning(f"FAQUAD synthesis failed for {params}: {e}")
        return SweepRecord(params=params, C=FAILED_C, config_hash=digest, failed=True, note=str(e))


def evaluate_matched_faquad(cfg: SynthesisConfig, params: Dict[str, float], y: Optional[float] = None) -> SweepRecord:
    """FAQUAD ramp designed at the same potential as the IE run described by cfg."""
    try:
        faquad_cfg = FaquadConfig.matched_to(cfg, y)
    except ValidationError as e:
        logger.warning(f"Skipping FAQUAD cell {params}: {e.errors()[0]['msg']}")
        return SweepRecord(params=params, C=FAILED_C, config_hash="", failed=True, note="invalid configuration")
    return evaluate_faquad(faquad_cfg, params, cfg.x_max, cfg.bias)


class SweepService:
    """Deterministic grid sweeps; cells run concurrently, results come back in grid order."""

    def __init__(self, threads: int = DEFAULT_THREADS, progress: bool = False):
        self.threads = max(1, int(threads))
        self.progress = progress

    async def _gather(self, cells: List, worker: Callable, label: str) -> List[SweepRecord]:
        loop = asyncio.get_running_loop()
        with ThreadPoolExecutor(max_workers=self.threads) as pool, tqdm(
            total=len(cells), desc=label, disable=not self.progress
        ) as pbar:
            futures = [loop.run_in_executor(pool, worker, cell) for cell in cells]
            for future in futures:
                future.add_done_callback(lambda _: pbar.update(1))
            return list(await asyncio.gather(*futures))

    def run_cells(self, cells: List, worker: Callable, label: str = "cells") -> List[SweepRecord]:
        if self.threads == 1:
            return [worker(cell) for cell in tqdm(cells, desc=label, disable=not self.progress)]
        return asyncio.run(self._gather(cells, worker, label))

    # ---------------- scans at fixed t_f ----------------

    def scan_y(self, cfg: SynthesisConfig, y_grid: Sequence[float], method: Provenance = None) -> SweepOutcome:
        y_values = np.asarray(y_grid, dtype=float)
        if y_values.size == 0:
            raise ValueError("y_grid must be non-empty")
        method = method or cfg.provenance
        logger.info(f"Scanning {y_values.size} design potentials with {method.value} at t_f={cfg.t_f}")

        if method is Provenance.FAQUAD:
            def worker(y):
                # the ramp only sees |y|
                return evaluate_matched_faquad(cfg, {"y": float(y)}, float(y))
        else:
            def worker(y):
                return evaluate_ie(cfg.model_copy(update={"y": float(y)}), {"y": float(y)})

        records = self.run_cells(list(y_values), worker, "scan y")
        return SweepOutcome(records=records, best=best_record(records), swept=["y"])

    def scan_coefficients(
        self,
        cfg: SynthesisConfig,
        a2_grid: Sequence[float],
        a3_grid: Optional[Sequence[float]] = None,
        a4_grid: Optional[Sequence[float]] = None,
    ) -> SweepOutcome:
        grids = [np.asarray(a2_grid, dtype=float)]
        if a3_grid is not None:
            grids.append(np.asarray(a3_grid, dtype=float))
        if a4_grid is not None:
            grids.append(np.asarray(a4_grid, dtype=float))
        if len(grids) != cfg.degree - 3:
            raise ValueError(f"degree {cfg.degree} ansatz needs {cfg.degree - 3} coefficient grids, got {len(grids)}")
        if any(g.size == 0 for g in grids):
            raise ValueError("coefficient grids must be non-empty")

        names = ["a2", "a3", "a4"][: len(grids)]
        cells = [tuple(float(v) for v in cell) for cell in product(*grids)]
        logger.info(f"Scanning {len(cells)} coefficient cells for {cfg.provenance.value} at t_f={cfg.t_f}")

        def worker(cell):
            params = {"t_f": cfg.t_f, **dict(zip(names, cell))}
            return evaluate_ie(cfg.model_copy(update={"free_coeffs": list(cell)}), params)

        records = self.run_cells(cells, worker, "scan coefficients")
        return SweepOutcome(records=records, best=best_record(records), swept=names)

    # ---------------- sweeps over t_f and Omega_f ----------------

    def _best_at(self, cfg: SynthesisConfig, method: Provenance, inner_grids: Optional[List[Sequence[float]]]):
        """Best record for one configuration, with the inner coefficient scan for degree >= 4."""
        if method is Provenance.FAQUAD:
            return evaluate_matched_faquad(cfg, {"t_f": cfg.t_f, "omega_f": cfg.omega_f})

        degree = method.degree
        if degree == 3:
            return evaluate_ie(
                cfg.model_copy(update={"degree": 3, "free_coeffs": []}),
                {"t_f": cfg.t_f, "omega_f": cfg.omega_f},
            )
        grids = inner_grids or _default_inner_grids(degree)
        seed = cfg.model_copy(update={"degree": degree, "free_coeffs": [0.0] * (degree - 3)})
        outcome = self.scan_coefficients(seed, *grids)
        best = outcome.best
        return SweepRecord(
            params={**best.params, "omega_f": cfg.omega_f},
            C=best.C,
            config_hash=best.config_hash,
            epsilon_achieved=best.epsilon_achieved,
            omega_0=best.omega_0,
            failed=best.failed,
            note=best.note,
            extra=best.extra,
        )

    def sweep_tf(
        self,
        template: SynthesisConfig,
        tf_grid: Sequence[float],
        method: Provenance,
        inner_grids: Optional[List[Sequence[float]]] = None,
    ) -> SweepOutcome:
        tf_values = np.asarray(tf_grid, dtype=float)
        logger.info(f"Sweeping {tf_values.size} final times with {method.value}")
        if method.degree is not None and method.degree >= 4:
            records = [
                self._best_at(template.model_copy(update={"t_f": float(t)}), method, inner_grids)
                for t in tqdm(tf_values, desc="sweep t_f", disable=not self.progress)
            ]
        else:
            records = self.run_cells(
                list(tf_values),
                lambda t: self._best_at(template.model_copy(update={"t_f": float(t)}), method, None),
                "sweep t_f",
            )
        return SweepOutcome(records=records, best=best_record(records), swept=["t_f"])

    def sweep_omega_f(
        self,
        template: SynthesisConfig,
        omega_f_grid: Sequence[float],
        method: Provenance,
        inner_grids: Optional[List[Sequence[float]]] = None,
    ) -> SweepOutcome:
        ratio = template.y / template.omega_f
        omega_values = np.asarray(omega_f_grid, dtype=float)
        logger.info(f"Sweeping {omega_values.size} final fields with {method.value} at t_f={template.t_f}")

        def cell_config(omega_f: float):
            try:
                return SynthesisConfig.model_validate({**template.model_dump(), "omega_f": omega_f, "y": ratio * omega_f})
            except ValidationError as e:
                return e

        def worker(omega_f):
            cfg = cell_config(float(omega_f))
            if isinstance(cfg, ValidationError):
                logger.warning(f"Skipping omega_f={omega_f}: {cfg.errors()[0]['msg']}")
                return SweepRecord(params={"omega_f": float(omega_f)}, C=FAILED_C, config_hash="", failed=True,
                                   note="invalid configuration")
            return self._best_at(cfg, method, inner_grids)

        if method.degree is not None and method.degree >= 4:
            records = [worker(w) for w in omega_values]
        else:
            records = self.run_cells(list(omega_values), worker, "sweep omega_f")
        return SweepOutcome(records=records, best=best_record(records), swept=["omega_f"])

    # ---------------- time-optimal search ----------------

    def time_optimal(
        self,
        template: SynthesisConfig,
        c_tolerance: float,
        tf_grid: Sequence[float],
        inner_grids: Optional[List[Sequence[float]]] = None,
    ) -> TimeOptimalResult:
        """Smallest sampled t_f whose best C meets the tolerance, found by bisection on the sorted grid."""
        if not c_tolerance > 0:
            raise ValueError("c_tolerance must be positive")
        tf_values = np.unique(np.asarray(tf_grid, dtype=float))
        if tf_values.size == 0:
            raise ValueError("tf_grid must be non-empty")
        method = template.provenance
        evaluated: Dict[int, SweepRecord] = {}

        def best_at(index: int) -> SweepRecord:
            if index not in evaluated:
                cfg = template.model_copy(update={"t_f": float(tf_values[index])})
                evaluated[index] = self._best_at(cfg, method, inner_grids)
                logger.info(f"t_f={tf_values[index]:.4g}: best C={evaluated[index].C:.4g}")
            return evaluated[index]

        def feasible(index: int) -> bool:
            record = best_at(index)
            return not record.failed and record.C <= c_tolerance

        lo, hi = 0, tf_values.size - 1
        if not feasible(hi):
            raise UnattainableTolerance(
                f"no t_f in [{tf_values[0]:g}, {tf_values[-1]:g}] reaches C <= {c_tolerance:g}"
            )
        while lo < hi:
            mid = (lo + hi) // 2
            if feasible(mid):
                hi = mid
            else:
                lo = mid + 1

        best = best_at(lo)
        free = [best.params[name] for name in ("a2", "a3", "a4") if name in best.params]
        witness_cfg = template.model_copy(update={"t_f": float(tf_values[lo]), "free_coeffs": free})
        return TimeOptimalResult(
            t_f=float(tf_values[lo]),
            best=best,
            witness=synthesize(witness_cfg),
            evaluated=[evaluated[i] for i in sorted(evaluated)],
        )


def _default_inner_grids(degree: int) -> List[np.ndarray]:
    if degree == 4:
        return [DEFAULT_A2_QUARTIC]
    if degree == 5:
        return [DEFAULT_A2_QUINTIC, DEFAULT_A3_QUINTIC]
    raise ValueError(f"no default coefficient grids for degree {degree}; pass inner_grids")
