"""Property-based tests of the structural invariants."""

import math

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from hilldirac.bands import locate
from hilldirac.floquet import DEFAULT_TOL, record_determinants, system_for
from hilldirac.pipeline import Settings
from hilldirac.potential import DiracPotential, HillPotential, TrigPoly, hill_q_prime, riccati_map
from hilldirac.quasimomentum import effective_masses
from hilldirac.verify import FAIL, PASS, PASS_UNC, evaluate_check, verdict

coef = st.floats(-1.0, 1.0, allow_nan=False)


@st.composite
def trig(draw, max_modes=5, mean=True):
    k = draw(st.integers(1, max_modes))
    cos = [draw(coef) if mean else 0.0] + [draw(coef) for _ in range(k)]
    sin = [draw(coef) for _ in range(k)]
    return TrigPoly(cos, sin)


@st.composite
def hill_pot(draw, max_modes=3):
    p = draw(trig(max_modes, mean=False))
    return HillPotential(p)


@st.composite
def dirac_pot(draw, max_modes=3):
    return DiracPotential(draw(trig(max_modes)), draw(trig(max_modes)))


slow = settings(max_examples=8, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@given(trig(), st.floats(-3, 3))
def test_trig_periodic(f, t):
    assert abs(f(t) - f(t + 1)) < 1e-13


@given(trig(), trig())
def test_product_pointwise(f, g):
    t = np.linspace(0, 1, 9)
    assert np.allclose((f * g)(t), f(t) * g(t), atol=1e-12)


@given(trig())
def test_parseval(f):
    t = np.arange(256) / 256
    assert f.l2_norm_sq() == pytest.approx(np.mean(f(t) ** 2), abs=1e-12)


@given(hill_pot(5))
def test_riccati_zero_mean_and_derivative(pot):
    q = riccati_map(pot)
    assert abs(q.mean) < 1e-12
    assert (q.derivative() - hill_q_prime(pot)).sup_norm() < 1e-12


@slow
@given(dirac_pot(), st.lists(st.floats(-25, 25), min_size=3, max_size=3))
def test_dirac_determinant(pot, zs):
    with record_determinants() as dets:
        for z in zs:
            system_for(pot).monodromy(z)
    assert max(dets) <= 10 * DEFAULT_TOL


@slow
@given(hill_pot())
def test_hill_spectrum_starts_at_zero(pot):
    assert system_for(pot).lyapunov(0.0).delta == pytest.approx(1.0, abs=1e-10)


@slow
@given(dirac_pot())
def test_gap_structure(pot):
    bs = locate(pot, n_max=3)
    prev = -math.inf
    for g in bs.gaps:
        assert prev < g.left <= g.critical <= g.right
        prev = g.right
        assert (g.height > 0) == g.open
        ms = effective_masses(pot, g)
        if g.open:
            assert ms.m_plus > 0 > ms.m_minus
            assert bs.rho[g.n] > 0
        else:
            assert ms.m_plus == ms.m_minus == 0.0


@slow
@given(hill_pot())
def test_hill_mirror_and_bridge(pot):
    bs = locate(pot, n_max=3)
    for g in bs.open_gaps():
        m = bs.gap(-g.n)
        assert (m.left, m.right, m.height) == (-g.right, -g.left, g.height)
        if g.n > 0:
            ms = effective_masses(pot, g)
            assert ms.m_plus == pytest.approx(2 * g.right * ms.mu_plus, rel=1e-12)


@given(st.floats(-1, 1), st.floats(0, 1))
def test_verdict_partition(margin, unc):
    v = verdict(margin, unc)
    assert (v == PASS) == (margin >= 0)
    assert (v == FAIL) == (margin < -unc)
    assert v in (PASS, PASS_UNC, FAIL)


@given(st.floats(0.1, 10), st.floats(0, 1e-3))
def test_uncertainty_nonnegative(a, e):
    c = evaluate_check("P", 0, lambda x: x.a**2, lambda x: x.a, {"a": a}, {"a": e})
    assert c.uncertainty >= 0
    assert c.uncertainty == pytest.approx(abs((a + e) ** 2 - a * a) + e, rel=1e-9, abs=1e-15)


@given(st.integers(-5, 300), st.floats(1e-16, 1e-2))
def test_settings_validation(n_max, tol):
    ok = 1 <= n_max <= 256 and 1e-14 < tol <= 1e-3
    if ok:
        Settings(n_max=n_max, ode_tol=tol)
    else:
        with pytest.raises(ValueError):
            Settings(n_max=n_max, ode_tol=tol)
