import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cliffdirac import affine as af
from cliffdirac import algebra as alg
from cliffdirac import dirac as dr
from cliffdirac import geometry as geo
from cliffdirac import io
from cliffdirac.errors import ConfigError, DegenerateMetricError


@settings(max_examples=30)
@given(arrays(np.float64, 16, elements=st.floats(-1e6, 1e6)))
def test_multivector_round_trip(u):
    assert np.array_equal(io.multivector_from_json(json.loads(json.dumps(io.multivector_to_json(u)))), u)


def test_bad_multivector_rejected():
    with pytest.raises(ConfigError):
        io.multivector_from_json([1.0, 2.0])


def test_metric_round_trip():
    m = alg.random_metric(np.random.default_rng(0))
    assert np.allclose(io.metric_from_json(io.metric_to_json(m)).g, m.g, atol=0)
    with pytest.raises(DegenerateMetricError):
        io.metric_from_json(np.eye(4).ravel().tolist())
    with pytest.raises(ConfigError):
        io.metric_from_json([1.0])


def test_box_round_trip():
    b = geo.ChartBox.parse("-1:1,-2:2,0:1,0:3@5x5x2x2")
    assert io.box_from_json(io.box_to_json(b)) == b
    with pytest.raises(ConfigError):
        io.box_from_json({"lo": [0, 0, 0, 0]})


def test_sample_state_shapes():
    box = geo.ChartBox.parse("-1:1,-1:1,-1:1,-1:1@2")
    doc = json.loads(io.dumps(io.sample_state(dr.planewave_solve([1, 0, 0, 0], 1.0), box)))
    assert len(doc["Psi"]) == 16 and len(doc["Psi"][0]) == 16
    assert np.array(doc["B"]).shape == (16, 4, 16)
    assert doc["m"] == 1.0


def test_contorsion_document_is_compatible_and_interpolates():
    mf = geo.flrw()
    box = geo.ChartBox.parse("-1:1,-1:1,-1:1,-1:1@2")
    rng = np.random.default_rng(0)
    b = rng.normal(size=(16, 64))
    K = io.contorsion_from_json({"box": io.box_to_json(box), "b": b.ravel().tolist()}, mf)
    x = np.array([0.2, -0.1, 0.3, 0.0])
    assert af.compatibility_defect(K.lowered(x)) < 1e-13
    # at a node the value is the (antisymmetrised) node entry
    node = np.array([-1.0, -1.0, -1.0, -1.0])
    bn = b[0].reshape(4, 4, 4)
    bn = 0.5 * (bn - bn.transpose(1, 0, 2))
    assert np.allclose(K(node), af.contorsion_from_b(bn, mf.at(node).ginv), atol=1e-12)
    with pytest.raises(ConfigError):
        io.contorsion_from_json({"box": io.box_to_json(box), "b": [1.0]}, mf)
