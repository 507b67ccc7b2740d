"""Command line: ``hilldirac compute | verify | sweep``.

Exit codes: 0 success, 1 at least one FAIL verdict, 2 input error (config,
arguments, band-data file), 3 numerical failure in a pipeline stage.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import tomli

from . import banddata
from .pipeline import Settings, StageError, run
from .potential import DiracPotential, HillPotential, ModeOverflowError
from .verify import CSV_COLUMNS, EstimateReport, build_report

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3
SWEEP_PARAMS = ("amp", "n_max", "ode_tol", "edge_tol", "quad_order")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    kind: str
    potential: dict
    settings: Settings
    output: dict = field(default_factory=dict)
    select: list[str] = field(default_factory=list)

    def build_potential(self, amp: float = 1.0):
        p = self.potential
        if self.kind == "hill":
            pot = HillPotential.from_coeffs(p["cos"], p["sin"])
        else:
            pot = DiracPotential.from_coeffs(p["q1"]["cos"], p["q1"]["sin"],
                                             p["q2"]["cos"], p["q2"]["sin"])
        return pot if amp == 1.0 else pot.scale(amp)

    def echo(self) -> dict:
        return {"operator": {"kind": self.kind}, "potential": self.potential,
                "compute": asdict(self.settings), "output": self.output,
                "verify": {"select": self.select}}


def _coeffs(table: dict, where: str) -> dict:
    unknown = set(table) - {"cos", "sin"}
    if unknown:
        raise ConfigError(f"[{where}] unknown keys {sorted(unknown)}")
    out = {}
    for key in ("cos", "sin"):
        vals = table.get(key, [0.0] if key == "cos" else [])
        if not isinstance(vals, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool)
                                                 for v in vals):
            raise ConfigError(f"[{where}] {key} must be a list of numbers")
        out[key] = [float(v) for v in vals]
    return out


def parse_config(text: str) -> RunConfig:
    try:
        raw = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"config parse error: {exc}") from exc
    unknown = set(raw) - {"operator", "potential", "compute", "output", "verify"}
    if unknown:
        raise ConfigError(f"unknown tables {sorted(unknown)}")
    kind = raw.get("operator", {}).get("kind")
    if kind not in ("hill", "dirac"):
        raise ConfigError("[operator] kind must be \"hill\" or \"dirac\"")
    pot_raw = raw.get("potential", {})
    if kind == "hill":
        potential = _coeffs(pot_raw, "potential")
    else:
        unknown = set(pot_raw) - {"q1", "q2"}
        if unknown:
            raise ConfigError(f"[potential] unknown keys {sorted(unknown)} (Dirac uses q1, q2)")
        potential = {q: _coeffs(pot_raw.get(q, {}), f"potential.{q}") for q in ("q1", "q2")}
    comp = raw.get("compute", {})
    unknown = set(comp) - {"n_max", "ode_tol", "edge_tol", "quad_order"}
    if unknown:
        raise ConfigError(f"[compute] unknown keys {sorted(unknown)}")
    try:
        settings = Settings(**comp)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[compute] {exc}") from exc
    output = raw.get("output", {})
    select = raw.get("verify", {}).get("select", [])
    if not isinstance(select, list) or not all(isinstance(s, str) for s in select):
        raise ConfigError("[verify] select must be a list of id prefixes")
    cfg = RunConfig(kind, potential, settings, output, select)
    try:
        cfg.build_potential()
    except (ValueError, ModeOverflowError) as exc:
        raise ConfigError(f"[potential] {exc}") from exc
    return cfg


def load_config(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


def compute_document(cfg: RunConfig, amp: float = 1.0) -> dict:
    return banddata.to_document(run(cfg.build_potential(amp), cfg.settings), cfg.echo())


def select_rows(report: EstimateReport, prefixes: list[str]) -> EstimateReport:
    if not prefixes:
        return report
    keep = [c for c in report.checks if any(c.id.startswith(p) for p in prefixes)]
    return EstimateReport(report.potential, report.settings, keep)


def _write(path: str | Path, text: str):
    Path(path).write_text(text)


# --- subcommands ---------------------------------------------------------------


def cmd_compute(args) -> int:
    cfg = load_config(args.config)
    doc = compute_document(cfg)
    _write(args.out, banddata.dump(doc))
    print(f"wrote {args.out}: {doc['global']['n_open']} open gaps")
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.bands:
        try:
            doc = banddata.load(Path(args.bands).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read band data {args.bands}: {exc}") from exc
        select = load_config(args.config).select if args.config else []
    elif args.config:
        cfg = load_config(args.config)
        doc, select = compute_document(cfg), cfg.select
    else:
        raise ConfigError("verify needs --config or --bands")
    report = select_rows(build_report(doc), select)
    _write(args.report, report.to_csv())
    _write(Path(args.report).with_suffix(".json"), _report_json(report, doc))
    s = report.summary
    print(f"{s['total']} checks: {s['pass']} pass, {s['pass-within-uncertainty']} "
          f"pass-within-uncertainty, {s['FAIL']} FAIL")
    for c in report.failures():
        print(f"FAIL {c.id} n={c.n}: lhs={c.lhs!r} rhs={c.rhs!r} unc={c.uncertainty!r}")
    return EXIT_OK if report.ok else EXIT_FAIL


def _report_json(report: EstimateReport, doc: dict) -> str:
    out = json.loads(report.to_json())
    out["config"] = doc.get("config", {})
    return json.dumps(out, indent=1, sort_keys=True) + "\n"


def _parse_values(param: str, text: str) -> list:
    items = [t.strip() for t in text.split(",") if t.strip()]
    if not items:
        raise ConfigError("sweep needs at least one value")
    conv = int if param in ("n_max", "quad_order") else float
    try:
        return [conv(t) for t in items]
    except ValueError as exc:
        raise ConfigError(f"bad sweep value: {exc}") from exc


def _opt(v) -> str:
    return "" if v is None else repr(v)


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    if args.param not in SWEEP_PARAMS:
        raise ConfigError(f"--param must be one of {', '.join(SWEEP_PARAMS)}")
    values = _parse_values(args.param, args.values)
    blocks = io.StringIO()
    gaps = io.StringIO()
    wb = csv.writer(blocks, lineterminator="\n")
    wg = csv.writer(gaps, lineterminator="\n")
    wb.writerow(("param", "value") + CSV_COLUMNS)
    wg.writerow(("param", "value", "n", "left", "right", "width", "height", "a", "A"))
    any_fail = False
    for val in values:
        amp = 1.0
        run_cfg = cfg
        if args.param == "amp":
            amp = val
        else:
            try:
                settings = Settings(**{**asdict(cfg.settings), args.param: val})
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
            run_cfg = RunConfig(cfg.kind, cfg.potential, settings, cfg.output, cfg.select)
        doc = compute_document(run_cfg, amp)
        report = select_rows(build_report(doc), cfg.select)
        any_fail |= not report.ok
        for line in csv.reader(io.StringIO(report.to_csv(header=False))):
            wb.writerow([args.param, repr(val)] + line)
        for r in doc["gaps"]:
            wg.writerow([args.param, repr(val), r["n"], repr(r["edges"]["left"]),
                         repr(r["edges"]["right"]), repr(r["width"]), repr(r["height"]["value"]),
                         repr(r["actions"]["a"]), _opt(r["actions"].get("A"))])
        print(f"{args.param}={val!r}: {report.summary['total']} checks, "
              f"{report.summary['FAIL']} FAIL, {len(doc['gaps'])} open gaps")
    out = Path(args.out)
    _write(out, blocks.getvalue())
    _write(out.with_name(out.stem + "_gaps.csv"), gaps.getvalue())
    return EXIT_FAIL if any_fail else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hilldirac",
                                 description="Band/gap geometry of periodic Hill and Dirac operators.")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("compute", help="run the pipeline and write band data JSON")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compute)
    p = sub.add_parser("verify", help="evaluate every estimate; write CSV and JSON reports")
    p.add_argument("--config")
    p.add_argument("--bands")
    p.add_argument("--report", required=True)
    p.set_defaults(func=cmd_verify)
    p = sub.add_parser("sweep", help="verify over a parameter grid; concatenated CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--param", required=True)
    p.add_argument("--values", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse uses 2 for usage errors already
        return int(exc.code) if exc.code is not None else EXIT_INPUT
    try:
        return args.func(args)
    except (ConfigError, banddata.BandDataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except StageError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
