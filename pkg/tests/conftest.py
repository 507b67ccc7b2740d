from __future__ import annotations

import sys
import time
from dataclasses import dataclass
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from corpus import corpus  # noqa: E402

from hilldirac import banddata  # noqa: E402
from hilldirac.floquet import record_determinants  # noqa: E402
from hilldirac.pipeline import PipelineResult, Settings, run  # noqa: E402
from hilldirac.potential import DiracPotential, HillPotential  # noqa: E402
from hilldirac.verify import EstimateReport, build_report  # noqa: E402

CORPUS_N_MAX = 64

# one line per acceptance criterion, filled by tests/test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@dataclass
class CorpusRun:
    name: str
    pot: object
    result: PipelineResult
    doc: dict
    report: EstimateReport
    seconds: float


@dataclass
class CorpusData:
    runs: list[CorpusRun]
    determinants: list[float]
    seconds: float


@pytest.fixture(scope="session")
def corpus_data() -> CorpusData:
    runs = []
    t0 = time.perf_counter()
    with record_determinants() as dets:
        for name, pot in corpus():
            t = time.perf_counter()
            res = run(pot, Settings(n_max=CORPUS_N_MAX))
            doc = banddata.to_document(res)
            runs.append(CorpusRun(name, pot, res, doc, build_report(doc), time.perf_counter() - t))
    return CorpusData(runs, list(dets), time.perf_counter() - t0)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, msg = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {msg}")


# small runs shared by the unit tests


@pytest.fixture(scope="session")
def hill_half():
    return run(HillPotential.from_coeffs([0.0, 0.5]), Settings(n_max=8))


@pytest.fixture(scope="session")
def dirac_const():
    return run(DiracPotential.from_coeffs([1.0]), Settings(n_max=8))


@pytest.fixture(scope="session")
def dirac_mixed():
    pot = DiracPotential.from_coeffs([0.0, 0.7], (), [0.3], [0.0, 0.4])
    return run(pot, Settings(n_max=8))


@pytest.fixture(scope="session")
def hill_mixed():
    pot = HillPotential.from_coeffs([0.0, 0.8, -0.5, 0.3], [0.4, 0.2])
    return run(pot, Settings(n_max=8))
