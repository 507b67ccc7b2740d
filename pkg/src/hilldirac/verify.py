"""Machine checks of the gap estimates and trace identities.

Every check is a pair (lhs, rhs) evaluated from a flat set of named inputs,
each carrying an absolute error. The uncertainty of a row is the first-order
sum  sum_i |lhs(x + e_i) - lhs(x)| + |rhs(x + e_i) - rhs(x)|  over inputs x_i
with error e_i. Identities are encoded as lhs = |L - R|, rhs = 0.

Verdicts: ``pass`` when rhs - lhs >= 0, ``pass-within-uncertainty`` when the
shortfall is covered by the uncertainty, ``FAIL`` otherwise.

The id -> formula table lives in the README.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

from . import banddata
from ._parallel import ordered_map
from .pipeline import Settings, run

PASS = "pass"
PASS_UNC = "pass-within-uncertainty"
FAIL = "FAIL"
CSV_COLUMNS = ("id", "n", "lhs", "rhs", "margin", "uncertainty", "verdict")
SQRT2 = math.sqrt(2.0)
PI = math.pi


def verdict(margin: float, uncertainty: float) -> str:
    if margin >= 0:
        return PASS
    if margin >= -uncertainty:
        return PASS_UNC
    return FAIL


@dataclass(frozen=True)
class EstimateCheck:
    id: str
    n: int | None  # None for global rows
    lhs: float
    rhs: float
    uncertainty: float
    verdict: str

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    def sort_key(self):
        return (self.id, -math.inf if self.n is None else self.n)

    def row(self) -> dict:
        return {"id": self.id, "n": "global" if self.n is None else self.n, "lhs": self.lhs,
                "rhs": self.rhs, "margin": self.margin, "uncertainty": self.uncertainty,
                "verdict": self.verdict}


class _X(dict):
    """Inputs with attribute access inside check formulas."""

    __getattr__ = dict.__getitem__


def _safe(f, x):
    try:
        val = float(f(x))
    except (ValueError, ZeroDivisionError, OverflowError):
        return math.nan
    return val


def evaluate_check(cid: str, n, lhs, rhs, x: dict, err: dict) -> EstimateCheck:
    """Evaluate one check with perturbation-propagated uncertainty."""
    x = _X(x)
    L, R = _safe(lhs, x), _safe(rhs, x)
    if math.isnan(L) or math.isnan(R):
        raise ValueError(f"check {cid} (n={n}) is undefined at the computed data")
    unc = 0.0
    for k, e in err.items():
        if not e or not math.isfinite(e) or not math.isfinite(x[k]):
            continue
        for step in (e, -e):
            y = _X(x)
            y[k] = x[k] + step
            dl, dr = _safe(lhs, y), _safe(rhs, y)
            if not (math.isnan(dl) or math.isnan(dr)):
                break
        else:
            continue
        for new, old in ((dl, L), (dr, R)):
            if math.isfinite(new) and math.isfinite(old):
                unc += abs(new - old)
            elif new != old:
                unc = math.inf
    return EstimateCheck(cid, n, L, R, unc, verdict(R - L, unc))


def vacuous(cid: str, n) -> EstimateCheck:
    return EstimateCheck(cid, n, 0.0, 0.0, 0.0, PASS)


# --- inputs ----------------------------------------------------------------


def _gap_inputs(rec: dict, glob: dict) -> tuple[dict, dict]:
    """Check inputs (values, absolute errors) from a band-data gap record."""
    ed, V, ms, ac = rec["edges"], rec["V"], rec["masses"], rec["actions"]
    x = dict(n=rec["n"], zm=ed["left"], zp=ed["right"], zc=rec["critical"]["value"],
             h=rec["height"]["value"], mp=ms["m_plus"], mm=ms["m_minus"], nu=rec["nu"]["value"],
             a=ac["a"], Aloc=ac["A_loc"], rho=rec["rho"]["value"],
             h_plus=glob["h_plus"]["value"], Q0=glob["Q0"]["value"], Q2=glob["Q2"]["value"])
    e = dict(zm=ed["left_err"], zp=ed["right_err"], zc=rec["critical"]["err"],
             h=rec["height"]["err"], mp=ms["m_err"], mm=ms["m_err"], nu=rec["nu"]["err"],
             a=ac["a_err"], Aloc=ac["A_loc_err"], rho=rec["rho"]["err"],
             h_plus=glob["h_plus"]["err"], Q0=glob["Q0"]["err"], Q2=glob["Q2"]["err"])
    for key in ("M", "M1", "M2"):
        x[key], e[key] = rec[key]["value"], rec[key]["err"]
    for prefix, point in (("V0", "critical"), ("Vc", "center"), ("Vr", "right"), ("Vl", "left")):
        pv = V[point]
        x[prefix], e[prefix] = pv["V"], pv["V_err"]
        if prefix == "V0":
            x["V0p"], e["V0p"] = pv["V1"], pv["V1_err"]
            x["V0pp"], e["V0pp"] = pv["V2"], pv["V2_err"]
    inner = V["inner"]
    x.update(xg1=inner["x"][0], xg2=inner["x"][1], Vg1=inner["V"][0], Vg2=inner["V"][1])
    e.update(Vg1=inner["V_err"][0], Vg2=inner["V_err"][1])
    if "native" in rec:
        nat = rec["native"]
        x.update(lm=nat["left"], lp=nat["right"], lc=nat["critical"], mup=ms["mu_plus"],
                 mum=ms["mu_minus"], A=ac["A"])
        e.update(lm=nat["left_err"], lp=nat["right_err"], lc=nat["critical_err"],
                 mup=ms["mu_err"], mum=ms["mu_err"], A=ac["A_err"])
    x["z0"] = 0.5 * (x["zp"] + x["zm"])
    return x, e


def _c(x):
    return 0.5 * (x.zp - x.zm)


def _z0(x):
    return 0.5 * (x.zp + x.zm)


def _r0(x):
    return math.sqrt(abs((x.zc - x.zm) * (x.zp - x.zc)))


def _m(x, sign):
    return x.mp if sign > 0 else x.mm


def _b(x):
    return math.sqrt(abs(x.a))


# --- per-gap check tables: (id, lhs, rhs) -----------------------------------


def _pm(cid, lhs, rhs):
    """Expand a check with +- variants into ids cid+ and cid-."""
    return [(cid + "+", (lambda x, f=lhs: f(x, 1)), (lambda x, f=rhs: f(x, 1))),
            (cid + "-", (lambda x, f=lhs: f(x, -1)), (lambda x, f=rhs: f(x, -1)))]


def _k(x, s):
    """V0'^2 sqrt(c|m|) / (4 (1 + V0)^2), the edge-mass correction term."""
    return x.V0p**2 * math.sqrt(_c(x) * abs(_m(x, s))) / (4 * (1 + x.V0) ** 2)


LEMMA_CHECKS = [
    ("L6.18", lambda x: abs((x.zc - _z0(x)) * (1 + x.V0) - _r0(x) ** 2 * x.V0p), lambda x: 0.0),
    ("L6.19", lambda x: abs(_c(x) - _r0(x)),
     lambda x: _r0(x) ** 3 * x.V0p**2 / (2 * (1 + x.V0) ** 2)),
    ("L6.20", lambda x: abs(x.h - _c(x) * (1 + x.V0)),
     lambda x: _r0(x) ** 3 * x.V0p**2 / (2 * (1 + x.V0))),
    ("L6.21", lambda x: abs(_c(x) ** 2 / x.h - x.nu),
     lambda x: x.h * _c(x) ** 2 * ((3 + _c(x)) * x.V0p**2 + x.V0pp)),
    *_pm("Liemg", lambda x, s: abs(s * _m(x, s) - _c(x) * (1 + (x.Vr if s > 0 else x.Vl)) ** 2),
         lambda x, s: 0.0),
    ("L6.25", lambda x: abs(x.a - _c(x) ** 2 / 2 * (1 + x.Vc)), lambda x: _c(x) ** 4 / 8 * x.M2),
    ("LeA", lambda x: abs(x.Aloc), lambda x: _c(x) ** 4 / 2 * x.M1),
    ("L6.26", lambda x: abs(x.a - _c(x) * x.h / 2),
     lambda x: _c(x) ** 4 / 8 * (x.M2 + 6 * x.M1**2)),
    *_pm("Lam1", lambda x, s: abs(x.a - _c(x) / 2 * math.sqrt(_c(x) * abs(_m(x, s)))),
         lambda x, s: _c(x) ** 3 / 2 * (x.M1 + _c(x) / 4 * x.M2)),
    ("L6.27", lambda x: abs(_b(x) - _c(x) * math.sqrt((1 + x.Vc) / 2)),
     lambda x: _c(x) ** 3 / (8 * SQRT2) * x.M2),
    ("L6.28", lambda x: abs(_b(x) - math.sqrt(_c(x) * x.h / 2)),
     lambda x: _c(x) ** 3 / (8 * SQRT2) * (x.M2 + 6 * x.M1**2)),
    *_pm("Lam2", lambda x, s: abs(_b(x) - _c(x) ** 0.75 / SQRT2 * abs(_m(x, s)) ** 0.25),
         lambda x, s: _c(x) ** 2 / (2 * SQRT2) * (x.M1 + _c(x) / 4 * x.M2)),
    *_pm("Lh+", lambda x, s: abs(x.h - math.sqrt(_c(x) * abs(_m(x, s)))),
         lambda x, s: 2 * _c(x) ** 2 * (x.M1 + _k(x, s))),
    ("Lm+-", lambda x: abs(x.mp + x.mm), lambda x: 4 * _c(x) ** 2 * (1 + x.M) * x.M1),
    *_pm("Lm+-0", lambda x, s: abs(_m(x, s) - s * x.h**2 / _c(x)),
         lambda x, s: 4 * _c(x) ** 2 * (1 + x.M) * (x.M1 + _k(x, s))),
]


def _g(x):
    return x.zp - x.zm


def _td_corr(x, s):
    """1 + (M'/8) sqrt(2|g||m|), shared by TD1-3 and TD1-5."""
    return 1 + x.M1 / 8 * math.sqrt(2 * _g(x) * abs(_m(x, s)))


DIRAC_CHECKS = [
    ("TD1-1", lambda x: abs(x.zc - _z0(x)), lambda x: _g(x) ** 2 / 4 * x.M1),
    ("TD1-2", lambda x: abs(2 * x.h - _g(x) * (1 + x.V0)), lambda x: _g(x) ** 3 / 8 * x.M1**2),
    *_pm("TD1-3", lambda x, s: abs(x.h - math.sqrt(_g(x) * abs(_m(x, s)) / 2)),
         lambda x, s: _g(x) ** 2 / 2 * x.M1 * _td_corr(x, s)),
    ("TD1-4", lambda x: abs(x.mp + x.mm), lambda x: _g(x) ** 2 * (1 + x.M) * x.M1),
    *_pm("TD1-5", lambda x, s: abs(_m(x, s) - s * 2 * x.h**2 / _g(x)),
         lambda x, s: _g(x) ** 2 * (1 + x.M) * x.M1 * _td_corr(x, s)),
    ("TD2-1", lambda x: abs(x.a - _g(x) ** 2 / 8 * (1 + x.Vc)),
     lambda x: 2 * _g(x) ** 4 / 4**4 * x.M2),
    ("TD2-2", lambda x: abs(x.a - _g(x) * x.h / 4),
     lambda x: _g(x) ** 4 / 2**7 * (x.M2 + 6 * x.M1**2)),
    ("TD2-3", lambda x: abs(_b(x) - 2**-1.5 * _g(x) * math.sqrt(1 + x.Vc)),
     lambda x: SQRT2 * _g(x) ** 3 / 4**3 * x.M2),
    # centred comparison sqrt(|g| h / 4); see the README note on this row
    ("TD2-4", lambda x: abs(_b(x) - math.sqrt(_g(x) * x.h / 4)),
     lambda x: SQRT2 * _g(x) ** 3 / 2**7 * (x.M2 + 6 * x.M1**2)),
    *_pm("TD2-5", lambda x, s: abs(x.a - _g(x) ** 1.5 / 2**2.5 * math.sqrt(abs(_m(x, s)))),
         lambda x, s: _g(x) ** 3 / 16 * x.M1 + _g(x) ** 4 / 2**7 * x.M2),
    *_pm("TD2-6", lambda x, s: abs(_b(x) - _g(x) ** 0.75 / 2**1.25 * abs(_m(x, s)) ** 0.25),
         lambda x, s: (_g(x) ** 2 / 8 * x.M1 + _g(x) ** 3 / 8**2 * x.M2) / SQRT2),
    ("R-TD1a", lambda x: _g(x) / 2, lambda x: x.h),
    *_pm("R-TD1b", lambda x, s: x.h, lambda x, s: PI * math.sqrt(2 * _g(x) * abs(_m(x, s)))),
    *_pm("R-TD1c", lambda x, s: PI * math.sqrt(2 * _g(x) * abs(_m(x, s))),
         lambda x, s: 2 * PI * abs(_m(x, s))),
    ("R-TD1d", lambda x: x.h**2, lambda x: 2 * _g(x) * math.sqrt(abs(x.mp * x.mm))),
    *_pm("R-TD1e", lambda x, s: _g(x), lambda x, s: 2 * abs(_m(x, s))),
]


def _gam(x):
    return x.lp - x.lm


def _zs(x, s):
    return x.zp if s > 0 else x.zm


def _mu(x, s):
    return x.mup if s > 0 else x.mum


def _beta(x):
    return math.sqrt(abs(x.A))


def _t1_corr(x, s):
    return math.sqrt(_gam(x) * abs(_mu(x, s)))


HILL_CHECKS = [
    ("T1-1", lambda x: abs((x.lm + x.lp) / 2 - _g(x) ** 2 / 4 - x.lc),
     lambda x: 3 * _gam(x) ** 2 / (8 * _z0(x)) * x.M1),
    ("T1-2", lambda x: abs(x.h - _gam(x) * (1 + x.V0) / (4 * _z0(x))),
     lambda x: _gam(x) ** 3 * x.M1**2 / (16 * _z0(x) ** 3)),
    *_pm("T1-3", lambda x, s: abs(x.h - math.sqrt(abs(_g(x) * _zs(x, s) * _mu(x, s)))),
         lambda x, s: _g(x) ** 2 / 2 * x.M1 * (1 + x.M1 * _t1_corr(x, s) / 4)),
    # |m+ - m-| <= 2c(1+M)^2 gives the extra factor (1+M); see the README
    ("T1-4", lambda x: abs(x.mup + x.mum),
     lambda x: _g(x) ** 2 / (4 * x.zp * x.zm) * (1 + x.M) * (1 + x.M + 2 * _z0(x) * x.M1)),
    *_pm("T1-5", lambda x, s: abs(_mu(x, s) - s * 2 * x.h**2 / _gam(x)),
         lambda x, s: _g(x) ** 2 / (8 * _z0(x) * _zs(x, s)) * (1 + x.M) ** 2
         * (1 + 4 * _zs(x, s) * x.M1 * (1 + x.M1 / 4 * _t1_corr(x, s)))),
    ("T2-1", lambda x: abs(x.A - _gam(x) ** 2 / (8 * _z0(x)) * (1 + x.Vc)),
     lambda x: _g(x) ** 4 / 2**5 * (_z0(x) * x.M2 + x.M1)),
    ("T2-2", lambda x: abs(x.A - _gam(x) * x.h / 2),
     lambda x: _g(x) ** 4 / 2**5 * (_z0(x) * x.M2 + 6 * _z0(x) * x.M1**2 + x.M1)),
    *_pm("T2-3", lambda x, s: abs(x.A - _gam(x) / 2 * math.sqrt(abs(_g(x) * _m(x, s) / 2))),
         lambda x, s: _g(x) ** 3 / 4 * (_z0(x) * x.M1 + _g(x) / 8 * x.M1 + _g(x) * x.M2)),
    ("T2-4", lambda x: abs(_beta(x) - _gam(x) * math.sqrt((1 + x.Vc) / (8 * _z0(x)))),
     lambda x: _g(x) ** 3 / (2**5 * math.sqrt(2 * _z0(x))) * (_z0(x) * x.M2 + x.M1)),
    ("T2-5", lambda x: abs(_beta(x) - math.sqrt(_gam(x) * x.h / 2)),
     lambda x: _g(x) ** 3 / (2**5 * math.sqrt(2 * _z0(x)))
     * (_z0(x) * x.M2 + 6 * _z0(x) * x.M1**2 + x.M1)),
    *_pm("T2-6", lambda x, s: abs(_beta(x) - math.sqrt(_gam(x) / 2)
                                  * abs(_g(x) * _m(x, s)) ** 0.25 / 2**0.25),
         lambda x, s: _g(x) ** 2 / (4 * math.sqrt(2 * _z0(x)))
         * (_z0(x) * x.M1 + _g(x) / 8 * x.M1 + _g(x) * x.M2)),
    ("R-T1a", lambda x: _gam(x), lambda x: (4 * PI * x.n) ** 2 * (x.mup - x.mum)),
    *_pm("R-T1b", lambda x, s: x.h**2, lambda x, s: 9 * PI**2 / 2 * _gam(x) * abs(_mu(x, s))),
    ("BR-g", lambda x: _gam(x) / (2 * math.sqrt(x.lp)), lambda x: _g(x)),
    *_pm("BR-m", lambda x, s: abs(_m(x, s) - 2 * _zs(x, s) * _mu(x, s)), lambda x, s: 0.0),
]


def _t5_4(xkey, vkey):
    def rhs(x):
        den = abs(x[xkey]) * math.sqrt(abs(x.zp * x.zm))
        # the bound is vacuous where |x| |z^+ z^-| vanishes
        return math.inf if den == 0 else 2 / den * (x.Q0 + x.Q2 / x.rho**2)
    return (lambda x: x[vkey]), rhs


COMB_CHECKS = [
    ("T5-1a", lambda x: x.M, lambda x: 2 / (PI * x.rho) * x.h_plus),
    ("T5-1c", lambda x: x.M1, lambda x: x.M / x.rho),
    # factor 2 as in the pointwise bound V'' <= 2V/rho^2; see the README
    ("T5-1d", lambda x: x.M2, lambda x: 2 * x.M / x.rho**2),
    ("T5-4a", *_t5_4("z0", "Vc")),
    ("T5-4b", *_t5_4("xg1", "Vg1")),
    ("T5-4c", *_t5_4("xg2", "Vg2")),
]

# Printed forms replaced above, kept for the tests that exhibit their failure.
PRINTED_VARIANTS = {
    "TD2-4": (lambda x: abs(_b(x) - math.sqrt(_g(x) * x.h / 2)),
              lambda x: SQRT2 * _g(x) ** 3 / 2**7 * (x.M2 + 6 * x.M1**2)),
    "T5-1d": (lambda x: x.M2, lambda x: x.M / x.rho**2),
    "T1-4": (lambda x: abs(x.mup + x.mum),
             lambda x: _g(x) ** 2 / (4 * x.zp * x.zm) * (1 + x.M) * (1 + 2 * _z0(x) * x.M1)),
}


def _gap_table(kind: str, n: int) -> list[tuple]:
    table = []
    if kind == "dirac" or n >= 1:
        table += LEMMA_CHECKS + COMB_CHECKS
    table += DIRAC_CHECKS if kind == "dirac" else (HILL_CHECKS if n >= 1 else [])
    return table


def check_ids(kind: str) -> list[str]:
    ids = [c[0] for c in _gap_table(kind, 1)] + GLOBAL_IDS[kind]
    return sorted(ids)


def gap_checks(doc: dict, n: int, table=None) -> list[EstimateCheck]:
    """All per-gap rows for momentum gap n of a band-data document (vacuous when closed)."""
    table = _gap_table(doc["kind"], n) if table is None else table
    rec = _records(doc).get(n)
    if rec is None:
        return [vacuous(cid, n) for cid, _, _ in table]
    x, e = _gap_inputs(rec, doc["global"])
    return [evaluate_check(cid, n, lhs, rhs, x, e) for cid, lhs, rhs in table]


def _records(doc: dict) -> dict[int, dict]:
    return {r["n"]: r for r in doc["gaps"]}


def check_section2_lemmas(doc: dict, n: int) -> list[EstimateCheck]:
    return gap_checks(doc, n, LEMMA_CHECKS)


def check_dirac_theorems(doc: dict, n: int) -> list[EstimateCheck]:
    return gap_checks(doc, n, [c for c in DIRAC_CHECKS if c[0].startswith("TD")])


def check_hill_theorem1(doc: dict, n: int) -> list[EstimateCheck]:
    return gap_checks(doc, n, [c for c in HILL_CHECKS if c[0].startswith("T1")])


def check_hill_theorem2(doc: dict, n: int) -> list[EstimateCheck]:
    return gap_checks(doc, n, [c for c in HILL_CHECKS if c[0].startswith("T2")])


def check_theorem5(doc: dict, n: int) -> list[EstimateCheck]:
    return gap_checks(doc, n, COMB_CHECKS)


# --- global checks -----------------------------------------------------------

GLOBAL_IDS = {
    "hill": ["ID-Q0", "ID-Q2", "T5-1b", "T5-2", "T5-3", "TeM-3"],
    "dirac": ["ID-Q0", "ID-Q2", "T5-1b", "T5-2", "T5-3", "TeM-3", "T6-1", "T6-2"],
}


def _sum_err(vals):
    return sum(v for v in vals if math.isfinite(v))


def check_global(doc: dict) -> list[EstimateCheck]:
    """Trace identities, T5-1b/2/3, TeM-3 and (Dirac) the T6 sums."""
    glob, recs = doc["global"], doc["gaps"]
    x = dict(Q0=glob["Q0"]["value"], Q2=glob["Q2"]["value"], q0=glob["Q0_identity"],
             q2=glob["Q2_identity"], rho=glob["rho"]["value"], h_plus=glob["h_plus"]["value"],
             g_plus=glob["g_plus"]["value"], sumM=sum(r["M"]["value"] for r in recs))
    e = dict(Q0=glob["Q0"]["err"], Q2=glob["Q2"]["err"], rho=glob["rho"]["err"],
             h_plus=glob["h_plus"]["err"], g_plus=glob["g_plus"]["err"],
             sumM=_sum_err(r["M"]["err"] for r in recs))
    rows = [
        ("ID-Q0", lambda x: abs(x.Q0 - x.q0), lambda x: 0.0),
        ("ID-Q2", lambda x: abs(x.Q2 - x.q2), lambda x: 0.0),
        ("T5-1b", lambda x: x.h_plus, lambda x: math.sqrt(2 * x.Q0)),
        ("T5-2", lambda x: x.sumM, lambda x: PI**2 / (3 * x.rho**2) * x.Q0),
        ("T5-3", lambda x: 1 / x.rho, lambda x: 2.5 * math.exp(5 * math.sqrt(x.Q0 / 2))),
        ("TeM-3", lambda x: 0.4 * math.exp(-2.5 * x.h_plus), lambda x: x.rho),
    ]
    if doc["kind"] == "dirac":
        dev, dev_err = [], []
        for r in recs:
            w, h, a = r["width"], r["height"]["value"], r["actions"]["a"]
            w_err = r["edges"]["left_err"] + r["edges"]["right_err"]
            dev.append(abs(a - w * h / 4))
            dev_err.append(r["actions"]["a_err"] + w_err * h / 4 + w * r["height"]["err"] / 4)
        x.update(T6s=sum(d ** (1 / 3) for d in dev) ** 3, T6d=sum(dev))
        e.update(T6s=_cube_sum_err(dev, dev_err), T6d=_sum_err(dev_err))
        rows += [
            # constant from sum |g_n|^2 <= 8 Q0 and the T6-2 chain; see the README
            ("T6-1", lambda x: x.T6s, _t6_1),
            ("T6-2", lambda x: x.T6d,
             lambda x: x.g_plus**4 / 2**7 * PI**2 * x.Q0 / (3 * x.rho**4)
             * (1 + 6 * math.sqrt(8 * x.Q0) / (PI * x.rho))),
        ]
    return [evaluate_check(cid, None, lhs, rhs, x, e) for cid, lhs, rhs in rows]


def _t6_1(x):
    return x.Q0**3 * PI**2 / (6 * x.rho**4) * (1 + 6 * math.sqrt(8 * x.Q0) / (PI * x.rho))


def _t6_1_printed(x):
    return x.Q0**3 * PI**2 / (4**7 * x.rho**4) * (1 + math.sqrt(8 * x.Q0) / (PI * x.rho))


# printed T6-1 right-hand side (global row, same lhs)
PRINTED_T6_1_RHS = _t6_1_printed


def _cube_sum_err(dev, err):
    """Error of (sum d^(1/3))^3 from per-term errors (d^(1/3) is not Lipschitz at 0)."""
    s = sum(d ** (1 / 3) for d in dev)
    s_hi = sum((d + e) ** (1 / 3) for d, e in zip(dev, err))
    return s_hi**3 - s**3


# --- report ------------------------------------------------------------------


@dataclass
class EstimateReport:
    potential: dict
    settings: dict
    checks: list[EstimateCheck] = field(default_factory=list)

    @property
    def summary(self) -> dict:
        out = {PASS: 0, PASS_UNC: 0, FAIL: 0}
        for c in self.checks:
            out[c.verdict] += 1
        out["total"] = len(self.checks)
        return out

    @property
    def ok(self) -> bool:
        return not any(c.verdict == FAIL for c in self.checks)

    def failures(self) -> list[EstimateCheck]:
        return [c for c in self.checks if c.verdict == FAIL]

    def get(self, cid: str, n=None) -> EstimateCheck:
        for c in self.checks:
            if c.id == cid and c.n == n:
                return c
        raise KeyError((cid, n))

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if header:
            w.writerow(CSV_COLUMNS)
        for c in self.checks:
            r = c.row()
            w.writerow([r["id"], r["n"]] + [repr(float(r[k])) for k in CSV_COLUMNS[2:6]]
                       + [r["verdict"]])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {"potential": self.potential, "settings": self.settings, "summary": self.summary,
               "checks": [c.row() for c in self.checks]}
        return json.dumps(doc, indent=1, allow_nan=True)


def build_report(doc: dict) -> EstimateReport:
    """Every check on a band-data document; rows sorted by (id, n)."""
    ns = banddata.gap_indices(doc)
    per_gap = ordered_map(lambda n: gap_checks(doc, n), ns)
    checks = [c for rows in per_gap for c in rows] + check_global(doc)
    checks.sort(key=EstimateCheck.sort_key)
    ids = [(c.id, c.n) for c in checks]
    if len(set(ids)) != len(ids):
        raise RuntimeError("duplicate check ids in report")
    pot = doc["config"].get("potential", {})
    return EstimateReport(pot, doc["config"].get("compute", {}), checks)


def run_suite(pot, settings: Settings | None = None) -> EstimateReport:
    """Full pipeline followed by every check; deterministic row order (id, then n)."""
    return build_report(banddata.to_document(run(pot, settings)))
