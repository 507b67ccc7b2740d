import math

import numpy as np
import pytest

from hilldirac.actions import action_table, closed_actions, kdv_action, nls_action
from hilldirac.bands import Gap, locate
from hilldirac.combgeom import GapMeasure, _rule, gap_measure
from hilldirac.pipeline import Settings, run
from hilldirac.potential import DiracPotential, HillPotential


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_constant_dirac_action(a):
    pot = DiracPotential.from_coeffs([a])
    bs = locate(pot, n_max=2)
    act = nls_action(pot, bs.gap(0))
    assert act.a == pytest.approx(a * a / 2, rel=1e-9)
    assert act.b == pytest.approx(a / math.sqrt(2), rel=1e-9)
    table = action_table(pot, bs)
    assert [r.n for r in table] == [0]


def test_semicircle_moment_closed_form():
    # (4/pi) int x v_n dx = z0 |g|^2 / 2 for the semicircle profile
    g = Gap(n=1, left=3.0, right=3.4, critical=3.2, height=0.2, open=True)
    nodes, base = _rule(g, 64)
    vn = np.sqrt(np.abs((nodes - g.left) * (g.right - nodes)))
    meas = GapMeasure(g, 64, nodes, base * vn, np.zeros(64), nodes, base * vn, True)
    A = 4 / math.pi * meas.integral(lambda t: t)[0]
    assert A == pytest.approx(g.center * g.width**2 / 2, rel=1e-10)


def test_hill_action_properties(hill_half):
    pot = hill_half.pot
    g = hill_half.bands.gap(1)
    act = kdv_action(pot, g)
    assert act.A >= g.center * g.width**2 / 2 * (1 - 1e-10)
    assert act.beta**2 == pytest.approx(act.A, rel=1e-15)
    assert act.b**2 == pytest.approx(act.a, rel=1e-15)
    fine = kdv_action(pot, g, gap_measure(pot, g, order=256, max_order=512))
    assert fine.A == pytest.approx(act.A, rel=1e-8)


def test_kind_guards(hill_half, dirac_const):
    with pytest.raises(TypeError):
        kdv_action(dirac_const.pot, dirac_const.bands.gap(0))
    with pytest.raises(TypeError):
        nls_action(hill_half.pot, hill_half.bands.gap(1))


def test_closed_and_free():
    g = Gap(n=2, left=1.0, right=1.0, critical=1.0, height=0.0, open=False)
    act = closed_actions(g, hill=True)
    assert (act.a, act.A) == (0.0, 0.0)
    free = HillPotential.from_coeffs([0.0])
    assert action_table(free, locate(free, n_max=3)) == []


def test_lower_bound_and_table_invariance(dirac_mixed):
    for r in dirac_mixed.records.values():
        if r.gap.open:
            assert r.actions.a >= r.gap.width**2 / 8 * (1 - 1e-10)
        else:
            assert r.actions.a == 0.0
    more = run(dirac_mixed.pot, Settings(n_max=12))
    for r in dirac_mixed.records.values():
        if r.gap.open:
            assert more.records[r.gap.n].actions.a == pytest.approx(r.actions.a, rel=1e-9)


def test_actions_shrink_with_scale():
    base = HillPotential.from_coeffs([0.0, 0.8], [0.3])
    vals = []
    for s in (1.0, 0.5, 0.25):
        pot = base.scale(s)
        g = locate(pot, n_max=2).gap(1)
        vals.append(kdv_action(pot, g).A)
    assert vals[0] > vals[1] > vals[2] > 0
