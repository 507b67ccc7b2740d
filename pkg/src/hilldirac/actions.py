"""Action integrals of the quasimomentum over single gaps.

KdV (Hill):  A_n = (4/pi) int_{g_n} x v(x) dx,  beta_n = sqrt(A_n).
NLS (Dirac): a_n = (1/pi) int_{g_n} v(x) dx,    b_n = sqrt(a_n).

The local first moment A_loc = (4/pi) int (x - z_n^0) v dx is kept as well
since it controls the difference between the two for a recentred gap. All
integrals use the sin(theta) Gauss-Legendre measures of ``combgeom``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ._parallel import ordered_map
from .bands import BandStructure, Gap
from .combgeom import DEFAULT_ORDER, CombMeasures, GapMeasure, gap_measure
from .potential import HillPotential


@dataclass(frozen=True)
class GapActions:
    n: int
    open: bool
    a: float  # (1/pi) int v
    a_err: float
    A_loc: float  # (4/pi) int (x - z^0) v
    A_loc_err: float
    A: float | None = None  # Hill only
    A_err: float | None = None

    @property
    def b(self) -> float:
        return math.sqrt(self.a)

    @property
    def beta(self) -> float | None:
        return None if self.A is None else math.sqrt(self.A)


def _from_measure(meas: GapMeasure, hill: bool) -> GapActions:
    g = meas.gap
    a, ea = meas.integral()
    loc, eloc = meas.integral(lambda t: t - g.center)
    a = max(a, 0.0)
    pi = math.pi
    out = dict(n=g.n, open=True, a=a / pi, a_err=ea / pi, A_loc=4 * loc / pi, A_loc_err=4 * eloc / pi)
    if hill:
        A, eA = meas.integral(lambda t: t)
        out.update(A=max(abs(A), 0.0) * 4 / pi, A_err=4 * eA / pi)
    return GapActions(**out)


def closed_actions(gap: Gap, hill: bool) -> GapActions:
    return GapActions(gap.n, False, 0.0, 0.0, 0.0, 0.0, 0.0 if hill else None, 0.0 if hill else None)


def _actions(pot, gap, measure, order):
    hill = isinstance(pot, HillPotential)
    if not gap.open:
        return closed_actions(gap, hill)
    if measure is None:
        measure = gap_measure(pot, gap, order)
    return _from_measure(measure, hill)


def kdv_action(pot: HillPotential, gap: Gap, measure: GapMeasure | None = None,
               order: int = DEFAULT_ORDER) -> GapActions:
    """A_n and beta_n of a Hill momentum gap (closed gap gives exact zeros)."""
    if not isinstance(pot, HillPotential):
        raise TypeError("KdV actions are defined for the Hill operator")
    return _actions(pot, gap, measure, order)


def nls_action(pot, gap: Gap, measure: GapMeasure | None = None,
               order: int = DEFAULT_ORDER) -> GapActions:
    """a_n and b_n of a Dirac gap (closed gap gives exact zeros)."""
    if isinstance(pot, HillPotential):
        raise TypeError("NLS actions are defined for the Dirac operator")
    return _actions(pot, gap, measure, order)


def action_table(pot, bands: BandStructure, comb: CombMeasures | None = None) -> list[GapActions]:
    """Actions of every open momentum gap, ordered by n.

    Hill rows carry both A_n and the local quantities of the momentum gap; the
    mirrored gap -n has the same a_n and A_loc and A_{-n} = A_n.
    """
    gaps = bands.open_gaps()
    hill = isinstance(pot, HillPotential)
    if comb is not None:
        return [_from_measure(comb.measures[g.n], hill) for g in gaps]
    return ordered_map(lambda g: _actions(pot, g, None, DEFAULT_ORDER), gaps)
