import numpy as np
import pytest

from hilldirac.bands import Gap
from hilldirac.combgeom import (
    GRID_POINTS, SourceGapError, chebyshev_grid, evaluate_correction, extrema, gap_measure,
    source_measures,
)
from hilldirac.quasimomentum import v_on_gap


def test_single_gap_has_no_correction(dirac_const):
    rec = dirac_const.records[0]
    assert rec.corr.M == 0.0 and rec.corr.M1 == 0.0 and rec.corr.M2 == 0.0
    assert np.all(rec.corr.values.V == 0.0)
    assert extrema(rec.corr) == (0.0, 0.0, 0.0)


def test_constant_dirac_moments(dirac_const):
    mo = dirac_const.moments
    assert mo.Q0 == pytest.approx(0.5, rel=1e-10)
    assert mo.Q0 == pytest.approx(dirac_const.q0_ref, rel=1e-10)


def test_hill_half_moment_identity(hill_half):
    assert hill_half.moments.Q0 == pytest.approx(0.0625, rel=1e-4)


def test_correction_signs_and_bounds(dirac_mixed):
    for n, rec in dirac_mixed.records.items():
        if not rec.gap.open:
            continue
        c = rec.corr.values
        slack = c.V_err + rec.corr.tail[0]
        assert np.all(c.V >= -slack)
        assert np.all(c.V2 > 0)
        rho = rec.rho
        assert np.all(np.abs(c.V1) <= c.V / rho + c.V1_err + rec.corr.tail[1] + slack / rho)
        assert np.all(c.V2 <= 2 * c.V / rho**2 + c.V2_err + rec.corr.tail[2]
                      + 2 * slack / rho**2)


def test_poisson_identity(dirac_mixed):
    for rec in dirac_mixed.records.values():
        g = rec.gap
        if not g.open:
            continue
        x = g.left + g.width * np.arange(1, 34) / 34
        assert np.max(np.abs(rec.corr(x).V - rec.corr.ratio_check(x))) <= max(1e-6,
                                                                             rec.corr.tail[0])


def test_mirror_symmetry(hill_half):
    c1, cm = hill_half.records[1].corr, hill_half.records[-1].corr
    g = hill_half.bands.gap(1)
    x = g.left + g.width * np.array([0.2, 0.5, 0.7])
    assert c1(x).V == pytest.approx(cm(-x).V, rel=1e-10, abs=1e-15)


def test_grid_max_refinement(dirac_mixed):
    for rec in dirac_mixed.records.values():
        if not rec.gap.open:
            continue
        fine = chebyshev_grid(rec.gap, 10 * (GRID_POINTS - 1) + 1)
        vals = rec.corr(fine)
        assert abs(rec.corr.M - np.max(np.abs(vals.V))) < 1e-8
        assert abs(rec.corr.M1 - np.max(np.abs(vals.V1))) < 1e-8
        assert rec.corr.M2 > 0


def test_source_point_rejected(dirac_mixed):
    g = dirac_mixed.bands.gap(1)
    with pytest.raises(SourceGapError):
        evaluate_correction(dirac_mixed.comb, g, g.right + 1.0)


def test_measure_integrates_v(dirac_mixed):
    g = dirac_mixed.bands.gap(1)
    meas = dirac_mixed.comb.measures[1]
    assert meas.converged
    val, err = meas.integral()
    from scipy.integrate import quad
    ref = quad(lambda x: v_on_gap(dirac_mixed.pot, g, x)[0], g.left, g.right,
               epsabs=1e-13, limit=200)[0]
    assert val == pytest.approx(ref, abs=max(err, 1e-10))


def test_closed_gap_measure_rejected(dirac_const):
    g = Gap(n=2, left=1.0, right=1.0, critical=1.0, height=0.0, open=False)
    with pytest.raises(ValueError):
        gap_measure(dirac_const.pot, g)


def test_order_doubling_stability(dirac_mixed):
    comb = source_measures(dirac_mixed.bands, order=128)
    for n, m in comb.measures.items():
        a = m.integral()[0]
        b = dirac_mixed.comb.measures[n].integral()[0]
        assert a == pytest.approx(b, rel=1e-9, abs=1e-300)
