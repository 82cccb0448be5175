import numpy as np
import pytest

from models.config_models import FaquadConfig, Provenance, SynthesisConfig
from models.errors import UnattainableTolerance
from models.physics_models import SweepOutcome, SweepRecord
from services.sweep_service import FAILED_C, SweepService, best_record, evaluate_ie, optimal_time
from storage import tables
from utils.hashing import config_hash

FAST = SynthesisConfig(t_f=1.0, n_time=2000)
TF_GRID = np.round(np.arange(0.1, 1.0001, 0.05), 10)


def _record(C, **params):
    return SweepRecord(params=params, C=C, config_hash="")


def test_best_record_breaks_ties_by_smallest_coefficients():
    records = [_record(0.1, a2=-20.0), _record(0.05, a2=-300.0, a3=5.0), _record(0.05, a2=10.0, a3=-5.0)]
    assert best_record(records).params == {"a2": 10.0, "a3": -5.0}


def test_failed_records_never_win():
    failed = SweepRecord(params={"t_f": 0.1}, C=0.0, config_hash="", failed=True)
    assert best_record([failed, _record(1.9, t_f=0.2)]).params == {"t_f": 0.2}


def test_optimal_time_is_the_first_point_on_the_plateau():
    records = [_record(C, t_f=t) for t, C in [(0.1, 0.9), (0.2, 0.015), (0.3, 0.002), (0.7, 0.0001)]]
    outcome = SweepOutcome(records=records, best=best_record(records), swept=["t_f"])
    assert outcome.best.params["t_f"] == 0.7
    assert optimal_time(outcome) == 0.2
    assert optimal_time(outcome, tolerance=0.01) == 0.3


def test_optimal_time_skips_failed_cells():
    failed = SweepRecord(params={"t_f": 0.05}, C=0.0, config_hash="", failed=True)
    records = [failed, _record(0.3, t_f=0.1), _record(0.01, t_f=0.2)]
    outcome = SweepOutcome(records=records, best=best_record(records), swept=["t_f"])
    assert optimal_time(outcome) == 0.2
    with pytest.raises(ValueError):
        optimal_time(SweepOutcome(records=[failed], best=failed, swept=["t_f"]))


def test_failed_synthesis_becomes_worst_case_record():
    record = evaluate_ie(FAST.model_copy(update={"t_f": 0.0}), {"t_f": 0.0})
    assert record.failed
    assert record.C == FAILED_C
    assert "t_f" in record.note


def test_scan_y_keeps_grid_order():
    outcome = SweepService().scan_y(FAST, [12.0, 6.0, 9.0])
    assert [r.params["y"] for r in outcome.records] == [12.0, 6.0, 9.0]
    assert outcome.swept == ["y"]
    assert outcome.best in outcome.records


def test_scan_y_rejects_empty_grid():
    with pytest.raises(ValueError):
        SweepService().scan_y(FAST, [])


def test_faquad_scan_y_marks_zero_potential_invalid():
    outcome = SweepService().scan_y(FAST, [0.0], Provenance.FAQUAD)
    assert outcome.records[0].failed
    assert outcome.records[0].C == FAILED_C


def test_faquad_cells_are_designed_at_the_ie_potential():
    template = SynthesisConfig(t_f=0.3, n_time=4000)
    matched = FaquadConfig.matched_to(template)
    assert matched.x_star == 12.0
    assert FaquadConfig.matched_to(template, -8.0).x_star == 8.0

    record = SweepService().sweep_tf(template, [0.3], Provenance.FAQUAD).records[0]
    assert record.config_hash == config_hash(matched)
    assert record.C < 0.1


def test_scan_coefficients_checks_grid_count():
    quartic = FAST.model_copy(update={"degree": 4, "free_coeffs": [0.0]})
    with pytest.raises(ValueError):
        SweepService().scan_coefficients(quartic, [0.0], [1.0])


def test_scan_coefficients_cartesian_order():
    quintic = SynthesisConfig(t_f=1.0, n_time=2000, degree=5, free_coeffs=[0.0, 0.0])
    outcome = SweepService().scan_coefficients(quintic, [-1.0, 0.0], [0.0, 2.0])
    cells = [(r.params["a2"], r.params["a3"]) for r in outcome.records]
    assert cells == [(-1.0, 0.0), (-1.0, 2.0), (0.0, 0.0), (0.0, 2.0)]
    assert outcome.swept == ["a2", "a3"]


def test_sweep_omega_f_flags_invalid_fields():
    outcome = SweepService().sweep_omega_f(FAST, [1.0, 2.0], Provenance.IE_CUBIC)
    valid, invalid = outcome.records
    assert not valid.failed
    assert invalid.failed and invalid.C == FAILED_C
    assert outcome.best is valid


def test_sweep_omega_f_single_point_passes_through():
    outcome = SweepService().sweep_omega_f(FAST, [1.0], Provenance.IE_CUBIC)
    direct = evaluate_ie(FAST, {"t_f": 1.0, "omega_f": 1.0})
    assert len(outcome.records) == 1
    assert outcome.records[0].C == direct.C


def test_sweep_tf_records_every_time():
    outcome = SweepService().sweep_tf(FAST, [0.5, 1.0], Provenance.IE_CUBIC)
    assert [r.params["t_f"] for r in outcome.records] == [0.5, 1.0]


def test_time_optimal_reports_unattainable_tolerance():
    with pytest.raises(UnattainableTolerance):
        SweepService().time_optimal(FAST, 1e-12, [0.5, 1.0])


def test_loose_tolerance_returns_shortest_time():
    result = SweepService().time_optimal(FAST, 2.0, [1.0, 0.5])
    assert result.t_f == 0.5
    assert result.witness.pulse.grid[-1] == pytest.approx(0.5)


def test_output_bytes_do_not_depend_on_threads(tmp_path):
    y_grid = [4.0, 6.0, 8.0, 10.0, 12.0]
    serial = SweepService(threads=1).scan_y(FAST, y_grid)
    threaded = SweepService(threads=3).scan_y(FAST, y_grid)

    first = tables.write_sweep_csv(serial, tmp_path / "serial.csv")
    second = tables.write_sweep_csv(threaded, tmp_path / "threaded.csv")
    assert first.read_bytes() == second.read_bytes()


@pytest.mark.slow
def test_scan_y_keeps_distance_small_for_positive_design_potentials():
    outcome = SweepService().scan_y(SynthesisConfig(t_f=1.0), [5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.0])
    assert all(not r.failed and r.C < 1e-2 for r in outcome.records)


@pytest.mark.slow
def test_quartic_scan_minimum():
    quartic = SynthesisConfig(t_f=0.15, degree=4, free_coeffs=[0.0])
    outcome = SweepService().scan_coefficients(quartic, [-450.0 + 5.0 * i for i in range(25)])
    assert outcome.best.C == pytest.approx(0.026, abs=0.01)
    assert outcome.best.params["a2"] == pytest.approx(-391.0, abs=25.0)


@pytest.mark.slow
def test_faquad_at_short_time_matches_reference_distance():
    outcome = SweepService().sweep_tf(SynthesisConfig(), [0.15], Provenance.FAQUAD)
    assert outcome.records[0].C == pytest.approx(0.41, abs=0.05)


@pytest.mark.slow
def test_cubic_and_faquad_optimal_times():
    service = SweepService(threads=4)
    cubic = service.sweep_tf(SynthesisConfig(), TF_GRID, Provenance.IE_CUBIC)
    assert optimal_time(cubic) == pytest.approx(0.20, abs=0.03)

    faquad = service.sweep_tf(SynthesisConfig(), TF_GRID, Provenance.FAQUAD)
    assert optimal_time(faquad) == pytest.approx(0.30, abs=0.03)


@pytest.mark.slow
def test_quintic_plateau_and_faquad_oscillation():
    service = SweepService(threads=4)
    coarse = [np.arange(-200.0, 101.0, 25.0), np.arange(-6000.0, 1.0, 250.0)]
    quintic = service.sweep_tf(SynthesisConfig(), [0.2, 0.5, 1.0], Provenance.IE_QUINTIC, coarse)
    assert all(not r.failed and r.C <= 0.02 for r in quintic.records)

    faquad = service.sweep_tf(SynthesisConfig(), [0.3, 0.35, 0.4, 0.45, 0.5, 0.6], Provenance.FAQUAD)
    c_values = [r.C for r in faquad.records]
    peak = int(np.argmax(c_values))
    assert 0 < peak < len(c_values) - 1
    assert c_values[peak] > 0.05


@pytest.mark.slow
def test_larger_final_field_helps_ie_more_than_faquad():
    service = SweepService(threads=3)
    template = SynthesisConfig(t_f=0.2)
    ie = [r.C for r in service.sweep_omega_f(template, [0.5, 1.0, 1.5], Provenance.IE_CUBIC).records]
    faquad = [r.C for r in service.sweep_omega_f(template, [0.5, 1.0, 1.5], Provenance.FAQUAD).records]
    assert ie[0] > ie[1] > ie[2]
    assert all(a < b for a, b in zip(ie, faquad))


@pytest.mark.slow
def test_quintic_time_optimal_search():
    template = SynthesisConfig(t_f=0.15, degree=5, free_coeffs=[0.0, 0.0])
    inner = [np.arange(-150.0, 51.0, 50.0), np.arange(-4480.0, -3479.0, 100.0)]
    result = SweepService(threads=4).time_optimal(template, 0.01, [0.13, 0.14, 0.15], inner)
    assert result.t_f == pytest.approx(0.15, abs=0.02)
    assert result.best.C <= 0.01
    assert result.witness.pulse.provenance is Provenance.IE_QUINTIC
