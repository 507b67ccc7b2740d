"""Imaginary part of the quasimomentum on gaps, effective masses, and k on R.

On an open gap g_n (momentum plane) the quasimomentum is k = pi n + i v with
(-1)^n cosh v = Delta. Writing F(x) = (-1)^n Delta(x) for Dirac and
F(x) = (-1)^n Delta(x^2) for Hill,

    sinh v = sqrt(Delta^2 - 1),   v' = F' / sinh v,   v'' = (F'' - F v'^2) / sinh v.

Near an edge z^+- the band-side expansion z - z^+- = (k - pi n)^2 / (2 m^+-)
gives m^+- = (-1)^(n+1) Delta'(z^+-); in the Hill lam-plane likewise
mu^+- = (-1)^(n+1) dDelta/dlam(lam^+-), hence m^+- = 2 z^+- mu^+-.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


from .bands import BandStructure, Gap
from .floquet import DEFAULT_TOL, system_for
from .potential import HillPotential

BELOW_ONE_SLACK = 1e-12


class NotInGapError(ValueError):
    """(-1)^n Delta < 1 at a point assumed to lie in a gap."""


def _sign(n: int) -> float:
    return -1.0 if n % 2 else 1.0


@dataclass(frozen=True)
class _GapFunction:
    """F = (-1)^n Delta along the momentum axis, with derivatives and errors."""

    F: float
    F1: float
    F2: float
    disc: float
    disc_err: float
    F1_err: float
    F2_err: float


def _F(pot, n, x, tol) -> _GapFunction:
    system = system_for(pot)
    sgn = _sign(n)
    if isinstance(pot, HillPotential):
        if x == 0.0:
            raise ValueError("Hill chain rule through lam = z^2 is singular at z = 0")
        ev = system.lyapunov(x * x, tol)
        f1 = 2.0 * x * ev.d_delta
        f2 = 2.0 * ev.d_delta + 4.0 * x * x * ev.dd_delta
        f1_err = 2.0 * abs(x) * ev.d_error
        f2_err = 2.0 * ev.d_error + 4.0 * x * x * ev.dd_error
    else:
        ev = system.lyapunov(x, tol)
        f1, f2, f1_err, f2_err = ev.d_delta, ev.dd_delta, ev.d_error, ev.dd_error
    return _GapFunction(sgn * ev.delta, sgn * f1, sgn * f2, ev.disc, ev.disc_error, f1_err, f2_err)


def v_on_gap(pot, gap: Gap, x: float, tol: float = DEFAULT_TOL):
    """(v, v', v'') at x strictly inside the open momentum gap ``gap``."""
    gf = _F(pot, gap.n, x, tol)
    F, F1, F2, disc = gf.F, gf.F1, gf.F2, gf.disc
    if F < 1.0 - BELOW_ONE_SLACK or (F > 0 and disc < -2 * BELOW_ONE_SLACK):
        raise NotInGapError(f"(-1)^n Delta = {F:.15g} < 1 at x = {x:.15g} (gap {gap.n})")
    sh = math.sqrt(max(disc, 0.0))
    v = math.asinh(sh)
    if sh == 0.0:
        return v, math.copysign(math.inf, F1), -math.inf
    v1 = F1 / sh
    v2 = (F2 - F * v1 * v1) / sh
    return v, v1, v2


def v_only(pot, gap: Gap, x: float, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """v and an absolute error estimate, from the monodromy alone."""
    system = system_for(pot)
    s = x * x if isinstance(pot, HillPotential) else x
    mono = system.monodromy(s, tol)
    m = mono.matrix
    hd = 0.5 * (m[0, 0] - m[1, 1])
    disc = hd * hd + m[0, 1] * m[1, 0]
    if _sign(gap.n) * mono.trace < 0 or disc < -2 * BELOW_ONE_SLACK:
        raise NotInGapError(f"x = {x:.15g} is not inside gap {gap.n}")
    sh = math.sqrt(max(disc, 0.0))
    err = mono.error * (2 * abs(hd) + abs(m[0, 1]) + abs(m[1, 0])) + 2 * mono.error**2
    v = math.asinh(sh)
    v_err = err / (2 * sh * math.sqrt(1 + disc)) if sh > 0 else math.sqrt(err)
    return v, v_err


@dataclass(frozen=True)
class GapProfile:
    gap: Gap
    parity: int
    nu: float  # -1 / v''(z_n)
    nu_err: float


def profile(pot, gap: Gap, tol: float = DEFAULT_TOL) -> GapProfile:
    if not gap.open:
        raise ValueError(f"gap {gap.n} is closed")
    return GapProfile(gap=gap, parity=gap.n % 2, nu=curvature_at_max(pot, gap, tol),
                      nu_err=_nu_error(pot, gap, tol))


def curvature_at_max(pot, gap: Gap, tol: float = DEFAULT_TOL) -> float:
    """nu = -1 / v''(z_n) at the critical point of an open gap."""
    if not gap.open:
        raise ValueError(f"gap {gap.n} is closed")
    _, _, v2 = v_on_gap(pot, gap, gap.critical, tol)
    return -1.0 / v2


def _nu_error(pot, gap, tol):
    # at the maximum v' = 0, so nu = sinh h / |F''|
    gf = _F(pot, gap.n, gap.critical, tol)
    disc = max(gf.disc, 1e-300)
    nu = math.sqrt(disc) / abs(gf.F2)
    return nu * (gf.disc_err / (2 * disc) + gf.F2_err / abs(gf.F2))


@dataclass(frozen=True)
class EffectiveMasses:
    """Edge masses of one gap; ``mu_*`` are the Hill lam-plane masses (None for Dirac)."""

    n: int
    m_plus: float
    m_minus: float
    m_err: float
    m_n: float  # 2 h^2 / |g_n|
    mu_plus: float | None = None
    mu_minus: float | None = None
    mu_err: float | None = None
    mu_n: float | None = None  # 2 h^2 / |gamma_n|


class DegenerateEdgeError(RuntimeError):
    pass


def effective_masses(pot, gap: Gap) -> EffectiveMasses:
    """Masses from the edge slopes stored on a momentum gap."""
    hill = isinstance(pot, HillPotential)
    if not gap.open:
        if hill:
            return EffectiveMasses(gap.n, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
        return EffectiveMasses(gap.n, 0.0, 0.0, 0.0, 0.0)
    if min(abs(gap.slope_left), abs(gap.slope_right)) < 1e-10:
        raise DegenerateEdgeError(f"Delta' vanishes at an edge of open gap {gap.n}")
    s = -_sign(gap.n)
    m_plus = s * gap.slope_right
    m_minus = s * gap.slope_left
    m_n = 2.0 * gap.height**2 / gap.width
    if hill and gap.n > 0:
        lam_width = gap.right**2 - gap.left**2
        return EffectiveMasses(
            gap.n, m_plus, m_minus, gap.slope_err, m_n,
            mu_plus=m_plus / (2 * gap.right),
            mu_minus=m_minus / (2 * gap.left),
            mu_err=gap.slope_err / (2 * gap.left),
            mu_n=2.0 * gap.height**2 / lam_width,
        )
    return EffectiveMasses(gap.n, m_plus, m_minus, gap.slope_err, m_n)


def k_on_real_axis(pot, bands: BandStructure, x: float, tol: float = DEFAULT_TOL):
    """(u, v) with k(x) = u + i v; u nondecreasing, v > 0 only on gaps."""
    hill = isinstance(pot, HillPotential)
    if hill and x < 0:
        u, v = k_on_real_axis(pot, bands, -x, tol)
        return -u, v
    for g in bands.momentum:
        if g.open and g.left <= x <= g.right:
            if x in (g.left, g.right):
                return math.pi * g.n, 0.0
            return math.pi * g.n, v_on_gap(pot, g, x, tol)[0]
    # band between the gaps around x: u in [pi(n-1), pi n]
    n = _band_index(bands, x, hill)
    system = system_for(pot)
    delta = system.monodromy(x * x if hill else x, tol).trace / 2
    c = max(-1.0, min(1.0, _sign(n - 1) * delta))
    return math.pi * (n - 1) + math.acos(c), 0.0


def _band_index(bands, x, hill):
    """Index n of the band s_n = [z_{n-1}^+, z_n^-] containing x."""
    gaps = sorted((g for g in bands.momentum if g.n >= 1 or not hill), key=lambda g: g.n)
    for g in gaps:
        if x <= g.left:
            return g.n
    return gaps[-1].n + 1


def k_on_imaginary_axis_hill(pot: HillPotential, y: float, tol: float = DEFAULT_TOL) -> float:
    """Im k(iy) for the Hill operator, where Delta(-y^2) > 1 and k(iy) = i v."""
    ev = system_for(pot).lyapunov(-y * y, tol)
    return math.asinh(math.sqrt(max(ev.disc, 0.0)))
