import math

import numpy as np
import pytest
from scipy.integrate import quad

from hilldirac.potential import (
    DiracPotential, HillPotential, ModeOverflowError, TrigPoly, evaluate, hill_q_prime, norms,
    riccati_map, trace_identities,
)


def test_trig_eval_matches_formula():
    f = TrigPoly([0.3, 1.0, -0.5], [0.2, 0.7])
    t = np.linspace(0, 1, 17)
    ref = (0.3 + np.cos(2 * np.pi * t) - 0.5 * np.cos(4 * np.pi * t)
           + 0.2 * np.sin(2 * np.pi * t) + 0.7 * np.sin(4 * np.pi * t))
    assert np.allclose(f(t), ref, atol=1e-15)


def test_periodicity():
    pot = HillPotential.from_coeffs([0.0, 0.5])
    assert evaluate(pot, 0.0) == pytest.approx(0.5)
    assert abs(evaluate(pot, 0.25)) < 1e-15
    for t in (0.1, 0.37, 0.9):
        assert abs(evaluate(pot, t) - evaluate(pot, t + 1)) < 1e-14


def test_product_and_antiderivative():
    f = TrigPoly([0.0, 1.0], [0.5])
    g = f * f
    t = np.linspace(0, 1, 11)
    assert np.allclose(g(t), f(t) ** 2, atol=1e-14)
    F = (f).antiderivative()
    h = 1e-6
    assert np.allclose((F(t + h) - F(t - h)) / (2 * h), f(t), atol=1e-8)
    with pytest.raises(ValueError):
        TrigPoly([1.0, 1.0]).antiderivative()


def test_invalid_coefficients():
    with pytest.raises(ValueError):
        TrigPoly([np.nan])
    with pytest.raises(ValueError):
        HillPotential.from_coeffs([0.1, 1.0])  # nonzero mean
    with pytest.raises(ModeOverflowError):
        TrigPoly(np.ones(70))
    with pytest.raises(ModeOverflowError):
        TrigPoly(np.r_[0.0, np.ones(40)]) * TrigPoly(np.r_[0.0, np.ones(40)])


def test_riccati_zero():
    q = riccati_map(HillPotential.from_coeffs([0.0]))
    assert np.all(q.cos == 0) and np.all(q.sin == 0)


def test_riccati_cosine_closed_form():
    # p = a cos: p^2 - |p|^2 = (a^2/2) cos(4 pi t), antiderivative (a^2 / (8 pi)) sin(4 pi t)
    a = 0.9
    q = riccati_map(HillPotential.from_coeffs([0.0, a]))
    t = np.linspace(0, 1, 23)
    ref = a * np.cos(2 * np.pi * t) + a * a / (8 * np.pi) * np.sin(4 * np.pi * t)
    assert np.allclose(q(t), ref, atol=1e-15)


def test_riccati_defining_integral():
    rng = np.random.default_rng(3)
    p = HillPotential.from_coeffs(np.r_[0.0, rng.normal(size=5)], rng.normal(size=5))
    q = riccati_map(p)
    assert abs(q.mean) < 1e-12
    pp = p.p
    const = quad(lambda t: (t - 0.5) * pp(t) ** 2, 0, 1, epsabs=1e-14, limit=200)[0]
    for x in (0.13, 0.5, 0.81):
        run_int = quad(lambda t: pp(t) ** 2 - p.q0, 0, x, epsabs=1e-14, limit=200)[0]
        assert q(x) == pytest.approx(pp(x) + run_int + const, abs=1e-11)
    # q' = p' + p^2 - |p|^2 exactly on coefficients
    resid = q.derivative() - hill_q_prime(p)
    assert resid.sup_norm() < 1e-12


def test_norms():
    assert norms(HillPotential.from_coeffs([0.0])) == {"l2_norm_sq": 0.0, "sup_norm": 0.0}
    a = 0.7
    assert norms(HillPotential.from_coeffs([0.0, a]))["l2_norm_sq"] == pytest.approx(a * a / 2)
    assert norms(DiracPotential.from_coeffs([a]))["l2_norm_sq"] == pytest.approx(a * a)
    f = TrigPoly([0.2, 0.3, -1.0], [0.5, 0.1])
    ref = quad(lambda t: f(t) ** 2, 0, 1, epsabs=1e-15, limit=200)[0]
    assert norms(f)["l2_norm_sq"] == pytest.approx(ref, abs=1e-12)


def test_trace_identity_references():
    q0, q2 = trace_identities(DiracPotential.from_coeffs([2.0]))
    assert (q0, q2) == pytest.approx((2.0, 2.0))
    pot = HillPotential.from_coeffs([0.0, 0.5])
    q0, q2 = trace_identities(pot)
    assert q0 == pytest.approx(0.0625)
    qp = hill_q_prime(pot)
    ref = (pot.q0**2 + quad(lambda t: qp(t) ** 2, 0, 1, limit=200)[0]) / 8
    assert q2 == pytest.approx(ref, rel=1e-12)
    assert math.isfinite(q2)
