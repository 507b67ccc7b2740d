"""Band-data JSON document: per-gap records and global quantities of one run.

The document is self-contained for ``verify``: every check input is stored
with its absolute error. Floats are written with ``repr`` precision, so
``load(dump(doc)) == doc``; an infinite separation is written as ``Infinity``.
"""

from __future__ import annotations

import json

from .pipeline import PipelineResult

SCHEMA = "hilldirac.banddata"
SCHEMA_VERSION = 1


class BandDataError(ValueError):
    """Malformed or incompatible band-data document."""


def _val(v, e):
    return {"value": float(v), "err": float(e)}


def _cv(cv):
    return {k: float(getattr(cv, k)) for k in ("V", "V1", "V2", "V_err", "V1_err", "V2_err")}


def gap_record(res: PipelineResult, n: int) -> dict:
    rec = res.records[n]
    g, c, ac, ms = rec.gap, rec.corr, rec.actions, rec.masses
    edge = max(g.left_err, g.right_err)
    out = {
        "n": n,
        "edges": {"left": g.left, "right": g.right, "left_err": g.left_err,
                  "right_err": g.right_err},
        "critical": _val(g.critical, g.critical_err),
        "height": _val(g.height, g.height_err),
        "width": g.width,
        "masses": {"m_plus": ms.m_plus, "m_minus": ms.m_minus, "m_err": ms.m_err, "m_n": ms.m_n},
        "nu": _val(rec.nu, rec.nu_err),
        "actions": {"a": ac.a, "a_err": ac.a_err, "b": ac.b, "A_loc": ac.A_loc,
                    "A_loc_err": ac.A_loc_err},
        "M": _val(c.M, c.M_err),
        "M1": _val(c.M1, c.M1_err),
        "M2": _val(c.M2, c.M2_err),
        "rho": _val(rec.rho, 2 * edge),
        "V": {"critical": _cv(c.at_critical), "center": _cv(c.at_center),
              "left": _cv(c.at_left), "right": _cv(c.at_right),
              "inner": {"x": [float(c.grid[1]), float(c.grid[-2])],
                        "V": [float(c.values.V[1]), float(c.values.V[-2])],
                        "V_err": [float(c.values.V_err[1]), float(c.values.V_err[-2])]}},
        "tail": [float(t) for t in c.tail],
        "quadrature_order": res.comb.measures[n].order,
    }
    if rec.native is not None:
        nat = rec.native
        out["native"] = {"left": nat.left, "right": nat.right, "critical": nat.critical,
                         "left_err": nat.left_err, "right_err": nat.right_err,
                         "critical_err": nat.critical_err}
        out["masses"].update(mu_plus=ms.mu_plus, mu_minus=ms.mu_minus, mu_err=ms.mu_err,
                             mu_n=ms.mu_n)
        out["actions"].update(A=ac.A, A_err=ac.A_err, beta=ac.beta)
    return out


def to_document(res: PipelineResult, config: dict | None = None) -> dict:
    """Band-data document of a pipeline run; gap list holds the open gaps only."""
    bs, mo = res.bands, res.moments
    opens = bs.open_gaps()
    edge_err = max((max(g.left_err, g.right_err) for g in opens), default=0.0)
    glob = {
        "Q0": _val(mo.Q0, mo.Q0_err), "Q2": _val(mo.Q2, mo.Q2_err),
        "Q0_tail": mo.Q0_tail, "Q2_tail": mo.Q2_tail,
        "Q0_identity": res.q0_ref, "Q2_identity": res.q2_ref,
        "rho": _val(bs.rho_inf, 2 * edge_err),
        "h_plus": _val(bs.h_plus, max((g.height_err for g in opens), default=0.0)),
        "g_plus": _val(bs.g_plus, 2 * edge_err),
        "cutoff_limited": bs.cutoff_limited,
        "n_open": len(opens),
    }
    if bs.kind == "hill":
        glob["lambda0_plus"] = _val(bs.lambda0_plus, bs.lambda0_err)
    return {
        "schema": SCHEMA,
        "schema_version": SCHEMA_VERSION,
        "kind": bs.kind,
        "n_max": bs.n_max,
        "config": config if config is not None else {"potential": res.pot.describe(),
                                                      "compute": _settings(res)},
        "global": glob,
        "gaps": [gap_record(res, g.n) for g in opens],
    }


def _settings(res):
    s = res.settings
    return {"n_max": s.n_max, "ode_tol": s.ode_tol, "edge_tol": s.edge_tol,
            "quad_order": s.quad_order}


def dump(doc: dict) -> str:
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


_REQUIRED_GAP = ("n", "edges", "critical", "height", "masses", "nu", "actions", "M", "M1", "M2",
                 "rho", "V")


def validate(doc) -> dict:
    if not isinstance(doc, dict):
        raise BandDataError("band data must be a JSON object")
    if doc.get("schema") != SCHEMA:
        raise BandDataError(f"not a band-data document (schema={doc.get('schema')!r})")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise BandDataError(f"unsupported schema_version {doc.get('schema_version')!r}")
    if doc.get("kind") not in ("hill", "dirac"):
        raise BandDataError(f"unknown operator kind {doc.get('kind')!r}")
    for key in ("n_max", "global", "gaps"):
        if key not in doc:
            raise BandDataError(f"missing key {key!r}")
    for rec in doc["gaps"]:
        missing = [k for k in _REQUIRED_GAP if k not in rec]
        if missing:
            raise BandDataError(f"gap record {rec.get('n')} lacks {missing}")
        if doc["kind"] == "hill" and rec["n"] >= 1 and "native" not in rec:
            raise BandDataError(f"Hill gap record {rec['n']} lacks native edges")
    ns = [r["n"] for r in doc["gaps"]]
    if ns != sorted(set(ns)):
        raise BandDataError("gap records must have unique, increasing n")
    return doc


def load(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BandDataError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return validate(doc)


def gap_indices(doc: dict) -> list[int]:
    """Every gap index covered by the run (Hill: 1..N, Dirac: -N..N)."""
    n_max = doc["n_max"]
    return list(range(1, n_max + 1)) if doc["kind"] == "hill" else list(range(-n_max, n_max + 1))
