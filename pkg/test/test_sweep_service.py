"""Tests for the threaded sweep runner."""

import math

import pytest

from normctl.models.pair import AlgebraPair
from normctl.schemas.bound import AsfBound, Branch
from normctl.schemas.sweep import SweepConfig
from normctl.services.bound_service import BoundService
from normctl.services.inversion_service import InversionService
from normctl.services.sweep_service import SweepService
from normctl.services.visibility_service import an_family

pytestmark = pytest.mark.integration


async def test_default_bounds_grid():
    rows = await SweepService(threads=2).run(SweepConfig())
    assert len(rows) == 27
    assert rows[0].label == "u=2,xi=4,c=1"
    assert rows[-1].label == "u=8,xi=8,c=1000"
    assert not any(row.flagged for row in rows)
    for row in rows:
        assert row.xi == pytest.approx(float(row.label.split(",")[1][3:]))
        assert row.product_bound_ln <= row.asymptotic_bound_ln


async def test_thread_count_does_not_change_rows():
    config = SweepConfig(u_values=[2.0, 3.0], xi_values=[4.0, 5.0], c_values=[1.0, 50.0])
    serial = await SweepService(threads=1).run(config)
    parallel = await SweepService(threads=4).run(config)
    assert serial == parallel


async def test_rows_below_xi_four_have_no_cutoff():
    rows = await SweepService(threads=1).run(SweepConfig(u_values=[2.0], xi_values=[2.0], c_values=[1.0]))
    assert rows[0].M is None
    assert rows[0].asymptotic_bound_ln is None
    assert rows[0].flagged is False


async def test_inversion_rows_are_reproducible():
    config = SweepConfig(
        kind="inversion", kappa_values=[2.0, 8.0], elements_per_point=2, dimension=4, certify_samples=30, seed=9
    )
    first = await SweepService(threads=3).run(config)
    second = await SweepService(threads=1).run(config)
    assert [row.label for row in first] == ["kappa=2#0", "kappa=2#1", "kappa=8#0", "kappa=8#1"]
    assert first == second
    assert all(row.kappa == pytest.approx(float(row.label[6:7]), rel=1e-8) for row in first)


async def test_an_row_matches_the_element_report():
    config = SweepConfig(kind="inversion", n_values=[5])
    (row,) = await SweepService().run(config)
    report = BoundService().element_report(InversionService(AlgebraPair(kind="C1_in_C")), an_family(5), 1.0)
    assert row.label == "a_5"
    assert row.product_bound_ln == pytest.approx(report.product_bound_ln)
    assert row.measured_ln == pytest.approx(math.log(report.measured))
    assert row.flagged is False


async def test_element_files(element_file, skewed):
    path = element_file(skewed)
    (row,) = await SweepService().run(SweepConfig(kind="inversion", element_paths=[path], constant=1.0))
    assert row.label == path
    assert row.branch in (Branch.CONDITION_DOMINATED.value, Branch.RATIO_DOMINATED.value)
    assert row.little_o_ratio_ln < 0.0


async def test_flagged_rows_leave_repro_cases(tmp_path):
    service = SweepService(threads=1)
    service.bounds.asf_bound = lambda inputs: AsfBound(
        ln_value=-1.0, branch=Branch.RATIO_DOMINATED, proof_variant_ln_value=-1.0
    )
    config = SweepConfig(u_values=[2.0], xi_values=[4.0], c_values=[1.0], repro_dir=str(tmp_path / "repro"))
    (row,) = await service.run(config)
    assert row.flagged
    assert (tmp_path / "repro" / "u=2,xi=4,c=1.json").exists()
