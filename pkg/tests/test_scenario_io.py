"""Scenario JSON schema: defaults, unit conversion, validation."""

import json

import numpy as np
import pytest

from conftest import SCENARIO_FILE

from hcrb.errors import ScenarioError
from hcrb.scenario_io import build, dumps_normalized, load_file, normalize

MINIMAL = {
    "contour": {"m": [2.0], "n": [1.0]},
    "target": {"x": 6, "y": 3, "heading": 90},
    "channel": {"alpha": 5, "E_over_N0_dB": 40},
    "waveform": {"B": 1e9, "T": 1e-5},
}


def _doc(**overrides):
    doc = json.loads(json.dumps(MINIMAL))
    doc.update(overrides)
    return doc


def test_normalize_fills_defaults():
    nd = normalize(_doc())
    assert nd["contour"]["Q"] == 1
    assert nd["channel"]["N0"] == 1.0
    assert nd["radar"] == [{"x": 0.0, "y": 0.0, "kappa": 0.0, "N": 30}]
    assert nd["quadrature"] == {"nodes": 4096, "split_at_shadow": False}
    assert nd["segmentation"] == {"lR": 0.2}
    assert nd["waveform"]["fs"] == 2e9
    assert nd["waveform"]["fc"] == 77e9


def test_angles_enter_in_degrees():
    bundle = build(normalize(_doc()))
    assert bundle.scenario.pose.heading == pytest.approx(np.pi / 2.0)
    doc = _doc(radar=[{"x": 1, "y": 0, "kappa": 45, "N": 12}])
    bundle = build(normalize(doc))
    assert bundle.radars[0].kappa == pytest.approx(np.pi / 4.0)
    assert bundle.radars[0].array_n == 12


def test_polar_target_form():
    doc = _doc(target={"d": 10.0, "phi": 30.0, "heading": 0.0})
    bundle = build(normalize(doc))
    assert bundle.scenario.pose.d == pytest.approx(10.0)
    assert bundle.scenario.pose.phi == pytest.approx(np.pi / 6.0)
    np.testing.assert_allclose(
        bundle.target_xy, [10.0 * np.cos(np.pi / 6.0), 5.0], rtol=1e-12
    )


def test_polar_target_rejects_constellations():
    doc = _doc(
        target={"d": 10.0, "phi": 30.0, "heading": 0.0},
        radar=[{"x": 0, "y": 0, "kappa": 0, "N": 30},
               {"x": 5, "y": 5, "kappa": 0, "N": 30}],
    )
    with pytest.raises(ScenarioError, match="single radar"):
        normalize(doc)


def test_normalized_document_is_a_fixed_point():
    nd = normalize(_doc())
    text = dumps_normalized(nd)
    again = normalize(json.loads(text))
    assert again == nd
    assert dumps_normalized(again) == text


def test_load_file_bundle(bundle):
    assert bundle.scenario.contour.q == 10
    assert bundle.scenario.array_n == 30
    assert bundle.segmentation.segment_length == pytest.approx(0.2)
    assert len(bundle.radars) == 1
    np.testing.assert_allclose(bundle.target_xy, [6.0, 3.0])
    assert bundle.document == normalize(json.loads(SCENARIO_FILE.read_text()))


def test_validation_errors():
    with pytest.raises(ScenarioError, match="channel"):
        normalize({k: v for k, v in MINIMAL.items() if k != "channel"})
    with pytest.raises(ScenarioError, match="waveform"):
        normalize({k: v for k, v in MINIMAL.items() if k != "waveform"})
    with pytest.raises(ScenarioError, match="heading"):
        normalize(_doc(target={"x": 6, "y": 3}))
    with pytest.raises(ScenarioError, match="unknown top-level"):
        normalize(_doc(extra={}))
    with pytest.raises(ScenarioError, match="integer"):
        normalize(_doc(radar=[{"x": 0, "y": 0, "kappa": 0, "N": True}]))
    with pytest.raises(ScenarioError):
        normalize(_doc(radar=[{"x": 0, "y": 0, "kappa": 0, "N": 1}]))
    with pytest.raises(ScenarioError, match="anti-clockwise"):
        build(normalize(_doc(contour={"m": [-2.0], "n": [1.0]})))
    with pytest.raises(ScenarioError):
        normalize(_doc(contour={"m": [2.0, 0.1], "n": [1.0]}))
