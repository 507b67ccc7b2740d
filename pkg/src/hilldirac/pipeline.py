"""Full computation for one potential: bands, masses, V_n profiles, actions, moments."""

from __future__ import annotations

from dataclasses import dataclass, field

from . import actions as _actions
from . import bands as _bands
from . import combgeom as _comb
from . import quasimomentum as _qm
from .floquet import DEFAULT_TOL
from .potential import HillPotential, trace_identities


class StageError(RuntimeError):
    """A pipeline stage failed; ``stage`` names it and ``__cause__`` holds the original error."""

    def __init__(self, stage: str, exc: BaseException):
        super().__init__(f"[{stage}] {type(exc).__name__}: {exc}")
        self.stage = stage


@dataclass(frozen=True)
class Settings:
    n_max: int = 32
    ode_tol: float = DEFAULT_TOL
    edge_tol: float = _bands.DEFAULT_EDGE_TOL
    quad_order: int = _comb.DEFAULT_ORDER

    def __post_init__(self):
        if not 1 <= self.n_max <= 256:
            raise ValueError(f"n_max must lie in [1, 256], got {self.n_max}")
        if not 1e-14 < self.ode_tol <= 1e-3:
            raise ValueError(f"ode_tol must lie in (1e-14, 1e-3], got {self.ode_tol}")
        if not 1e-14 < self.edge_tol <= 1e-3:
            raise ValueError(f"edge_tol must lie in (1e-14, 1e-3], got {self.edge_tol}")
        if not 4 <= self.quad_order <= _comb.MAX_ORDER // 2:
            raise ValueError(f"quad_order must lie in [4, {_comb.MAX_ORDER // 2}]")


@dataclass
class GapRecord:
    """Everything computed for one momentum gap g_n (open or closed)."""

    gap: _bands.Gap
    native: _bands.Gap | None = None  # Hill lam-plane gap (n >= 1)
    masses: _qm.EffectiveMasses | None = None
    nu: float = 0.0
    nu_err: float = 0.0
    corr: _comb.GapCorrection | None = None
    actions: _actions.GapActions | None = None
    rho: float = _bands.INF


@dataclass
class PipelineResult:
    pot: object
    settings: Settings
    bands: _bands.BandStructure
    comb: _comb.CombMeasures
    moments: _comb.Moments
    records: dict[int, GapRecord] = field(default_factory=dict)
    q0_ref: float = 0.0
    q2_ref: float = 0.0

    @property
    def kind(self) -> str:
        return self.bands.kind


def _stage(name, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except StageError:
        raise
    except Exception as exc:  # tag and re-raise
        raise StageError(name, exc) from exc


def run(pot, settings: Settings | None = None) -> PipelineResult:
    s = settings or Settings()
    bs = _stage("bands", _bands.locate, pot, n_max=s.n_max, tol=s.ode_tol, edge_tol=s.edge_tol)
    comb = _stage("combgeom", _comb.source_measures, bs, order=s.quad_order, tol=s.ode_tol)
    corrs = _stage("combgeom", _comb.all_corrections, bs, comb)
    mom = _stage("combgeom", _comb.moments, bs, comb)
    table = _stage("actions", _actions.action_table, pot, bs, comb)
    acts = {r.n: r for r in table}
    hill = isinstance(pot, HillPotential)
    native = {g.n: g for g in bs.gaps} if hill else {}

    records = {}
    for g in bs.momentum:
        rec = GapRecord(gap=g, native=native.get(g.n), rho=bs.rho.get(g.n, _bands.INF))
        rec.masses = _stage("quasimomentum", _qm.effective_masses, pot, g)
        if g.open:
            prof = _stage("quasimomentum", _qm.profile, pot, g, s.ode_tol)
            rec.nu, rec.nu_err = prof.nu, prof.nu_err
            rec.corr = corrs[g.n]
            rec.actions = acts[g.n]
        else:
            rec.actions = _actions.closed_actions(g, hill)
        records[g.n] = rec
    q0_ref, q2_ref = trace_identities(pot)
    return PipelineResult(pot, s, bs, comb, mom, records, q0_ref, q2_ref)
