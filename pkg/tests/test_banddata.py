import json

import pytest

from hilldirac import banddata
from hilldirac.pipeline import Settings, run
from hilldirac.potential import DiracPotential


def test_roundtrip(hill_half, dirac_mixed):
    for res in (hill_half, dirac_mixed):
        doc = banddata.to_document(res)
        text = banddata.dump(doc)
        assert banddata.load(text) == doc
        assert banddata.dump(banddata.load(text)) == text


def test_constant_dirac_document(dirac_const):
    doc = banddata.to_document(dirac_const)
    assert doc["schema"] == banddata.SCHEMA and doc["schema_version"] == banddata.SCHEMA_VERSION
    assert [r["n"] for r in doc["gaps"]] == [0]
    rec = doc["gaps"][0]
    assert rec["edges"]["left"] == pytest.approx(-1.0, abs=1e-7)
    assert rec["height"]["value"] == pytest.approx(1.0, abs=1e-7)
    assert doc["global"]["Q0"]["value"] == pytest.approx(0.5, rel=1e-9)
    assert doc["global"]["rho"]["value"] == float("inf")


def test_free_document_has_no_gaps():
    doc = banddata.to_document(run(DiracPotential.from_coeffs([0.0]), Settings(n_max=4)))
    assert doc["gaps"] == [] and doc["global"]["n_open"] == 0


def test_validation_errors(dirac_const):
    with pytest.raises(banddata.BandDataError, match="line 1"):
        banddata.load('{"schema": ')
    doc = banddata.to_document(dirac_const)
    for key, val in (("schema", "other"), ("schema_version", 99), ("kind", "x")):
        bad = json.loads(banddata.dump(doc))
        bad[key] = val
        with pytest.raises(banddata.BandDataError):
            banddata.validate(bad)
    bad = json.loads(banddata.dump(doc))
    del bad["gaps"][0]["M"]
    with pytest.raises(banddata.BandDataError, match="lacks"):
        banddata.validate(bad)
    with pytest.raises(banddata.BandDataError):
        banddata.validate([])


def test_gap_indices(hill_half, dirac_const):
    assert banddata.gap_indices(banddata.to_document(hill_half)) == list(range(1, 9))
    assert banddata.gap_indices(banddata.to_document(dirac_const)) == list(range(-8, 9))
