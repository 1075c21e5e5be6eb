"""JSON interchange: multivectors, point metrics, sampled states and contorsions."""
import json

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from . import _blades as bl
from . import algebra as alg
from .affine import ContorsionField, contorsion_from_b
from .errors import ConfigError
from .geometry import ChartBox


def multivector_to_json(u):
    return [float(v) for v in np.asarray(u, float)]


def multivector_from_json(data):
    arr = np.asarray(data, float)
    if arr.shape != (bl.NBLADES,):
        raise ConfigError(f"a multivector needs {bl.NBLADES} coefficients, got shape {arr.shape}")
    return arr


def metric_to_json(m):
    return [float(v) for v in m.g.ravel()]


def metric_from_json(data):
    arr = np.asarray(data, float)
    if arr.size != 16:
        raise ConfigError("a point metric needs 16 numbers (row-major g)")
    return alg.MetricAtPoint.from_g(arr.reshape(4, 4))


def box_to_json(box):
    return {"lo": list(box.lo), "hi": list(box.hi), "n": list(box.n), "h": box.h}


def box_from_json(doc):
    try:
        return ChartBox(tuple(doc["lo"]), tuple(doc["hi"]), tuple(int(v) for v in doc["n"]), float(doc.get("h", 1e-3)))
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad box document: {exc}") from None


def sample_state(st, box):
    """Sample ``Psi, H, I, a, B`` at the box nodes (C order, blade order)."""
    nodes = box.nodes()
    return {
        "box": box_to_json(box),
        "m": st.m,
        "Psi": [multivector_to_json(st.Psi(x)) for x in nodes],
        "H": [multivector_to_json(st.H(x)) for x in nodes],
        "I": [multivector_to_json(st.I(x)) for x in nodes],
        "a": [[float(v) for v in st.a(x)] for x in nodes],
        "B": [[multivector_to_json(b) for b in st.B(x)] for x in nodes],
    }


def dumps(doc):
    return json.dumps(doc, sort_keys=True, indent=2)


def contorsion_from_json(doc, mf):
    """``{"box": ..., "b": prod(n)*64 numbers}`` holding ``b[a, b, mu]`` per node.

    ``b`` is antisymmetrised in its first two indices, so the result is
    compatible by construction; interpolation is multilinear.
    """
    box = box_from_json(doc["box"])
    try:
        vals = np.asarray(doc["b"], float).reshape(tuple(box.n) + (64,))
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad contorsion document: {exc}") from None
    axes = [np.linspace(a, c, k) for a, c, k in zip(box.lo, box.hi, box.n)]
    interp = RegularGridInterpolator(axes, vals, method="linear")

    def fn(x):
        b = interp(np.asarray(x, float)[None])[0].reshape(4, 4, 4)
        b = 0.5 * (b - b.transpose(1, 0, 2))
        return contorsion_from_b(b, mf.at(x).ginv)

    return ContorsionField(fn, mf)
