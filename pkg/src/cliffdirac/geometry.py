"""Metric fields on a one-chart box, Levi-Civita connection and curvature."""
import json
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from . import algebra as alg
from .errors import BoundaryError, ConfigError, DegenerateMetricError

DEFAULT_H = 1e-3

#: reported in check records where the connection formula is used
CHRISTOFFEL_CONVENTION = "corrected-Levi-Civita"


@dataclass(frozen=True)
class ChartBox:
    lo: tuple = (-1.0, -1.0, -1.0, -1.0)
    hi: tuple = (1.0, 1.0, 1.0, 1.0)
    n: tuple = (3, 3, 3, 3)
    h: float = DEFAULT_H

    def __post_init__(self):
        lo, hi = np.asarray(self.lo, float), np.asarray(self.hi, float)
        if lo.shape != (4,) or hi.shape != (4,) or len(self.n) != 4:
            raise ConfigError("chart box needs four bounds and four sample counts")
        if not np.all(lo < hi):
            raise ConfigError("chart box requires lo < hi componentwise")
        if min(self.n) < 2:
            raise ConfigError("chart box needs at least two samples per coordinate")
        if not 0 < self.h < 0.01 * (hi - lo).min():
            raise ConfigError("finite-difference step must satisfy 0 < h << box width")

    @classmethod
    def parse(cls, spec, h=DEFAULT_H):
        """Parse ``"lo:hi,lo:hi,lo:hi,lo:hi[@n]"``; ``n`` is one count or four comma-free counts joined by ``x``."""
        try:
            spec = spec.strip()
            counts = (3, 3, 3, 3)
            if "@" in spec:
                spec, ns = spec.split("@")
                parts = [int(v) for v in ns.split("x")]
                counts = tuple(parts * 4 if len(parts) == 1 else parts)
            bounds = [tuple(float(v) for v in item.split(":")) for item in spec.split(",")]
            lo = tuple(b[0] for b in bounds)
            hi = tuple(b[1] for b in bounds)
        except (ValueError, IndexError) as exc:
            raise ConfigError(f"bad box spec {spec!r}: {exc}") from None
        return cls(lo, hi, counts, h)

    def spec(self):
        body = ",".join(f"{a:g}:{b:g}" for a, b in zip(self.lo, self.hi))
        return body + "@" + "x".join(str(k) for k in self.n)

    def with_h(self, h):
        return ChartBox(self.lo, self.hi, self.n, h)

    def nodes(self):
        axes = [np.linspace(a, b, k) for a, b, k in zip(self.lo, self.hi, self.n)]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 4)

    def random_points(self, rng, count, margin=0.0):
        lo = np.asarray(self.lo) + margin
        hi = np.asarray(self.hi) - margin
        return lo + (hi - lo) * rng.random((count, 4))

    def contains(self, x, margin=0.0):
        x = np.asarray(x)
        return bool(np.all(x - margin >= np.asarray(self.lo)) and np.all(x + margin <= np.asarray(self.hi)))

    def require_interior(self, x, margin):
        if not self.contains(x, margin):
            raise BoundaryError(f"point {np.asarray(x).tolist()} is closer than {margin:g} to the chart boundary")


class MetricField:
    """A metric tensor field ``x -> g_{mu nu}(x)`` with optional analytic partials.

    ``dg_fn(x)[k, m, n] = d_k g_{mn}`` and ``d2g_fn(x)[a, b, m, n] = d_a d_b g_{mn}``.
    ``coframe_fn(x)`` returns rows ``e^a_mu`` with ``g = E^T eta E``.
    """

    def __init__(self, label, g_fn, dg_fn=None, d2g_fn=None, box=None, params=(),
                 coframe_fn=None, dcoframe_fn=None, constant=False, lower_accuracy=False):
        self.label = label
        self.g_fn = g_fn
        self.dg_fn = dg_fn
        self.d2g_fn = d2g_fn
        self.box = box if box is not None else ChartBox()
        self.params = tuple(params)
        self._coframe_fn = coframe_fn
        self._dcoframe_fn = dcoframe_fn
        self.constant = constant
        self.lower_accuracy = lower_accuracy
        self._cache = {}

    def __repr__(self):
        return f"MetricField({self.label!r}, params={self.params})"

    @property
    def h(self):
        return self.box.h

    def memo(self, kind, x, compute):
        """Per-point cache for derived quantities (connection matrices, ...)."""
        key = (kind, np.asarray(x, float).tobytes())
        val = self._cache.get(key)
        if val is None:
            if len(self._cache) > 4096:
                self._cache.clear()
            val = compute()
            self._cache[key] = val
        return val

    def g(self, x):
        return np.asarray(self.g_fn(np.asarray(x, float)), float)

    def at(self, x):
        x = np.asarray(x, float)
        key = x.tobytes()
        m = self._cache.get(key)
        if m is None:
            if len(self._cache) > 4096:
                self._cache.clear()
            m = alg.MetricAtPoint.from_g(self.g(x), check=True, node=x.tolist())
            self._cache[key] = m
        return m

    def dg(self, x, h=None, method="auto"):
        x = np.asarray(x, float)
        if method != "fd" and self.dg_fn is not None:
            return np.asarray(self.dg_fn(x), float)
        if method == "analytic":
            raise ValueError(f"{self.label} has no analytic first partials")
        h = self.h if h is None else h
        if not self.constant:
            self.box.require_interior(x, 2 * h)
        return central_partials(self.g, x, h)

    def d2g(self, x, h=None, method="auto"):
        x = np.asarray(x, float)
        if method != "fd" and self.d2g_fn is not None:
            return np.asarray(self.d2g_fn(x), float)
        if method == "analytic":
            raise ValueError(f"{self.label} has no analytic second partials")
        h = self.h if h is None else h
        if not self.constant:
            self.box.require_interior(x, 2 * h)
        return second_partials(self.g, x, h)

    # -- orthonormal coframe ---------------------------------------------
    def coframe(self, x):
        x = np.asarray(x, float)
        if self._coframe_fn is not None:
            return np.asarray(self._coframe_fn(x), float)
        return gram_schmidt_coframe(self.at(x).ginv)

    def dcoframe(self, x, h=None):
        """``out[k, a, mu] = d_k e^a_mu``."""
        x = np.asarray(x, float)
        if self._dcoframe_fn is not None:
            return np.asarray(self._dcoframe_fn(x), float)
        return central_partials(self.coframe, x, self.h if h is None else h)

    @property
    def analytic(self):
        return self.dg_fn is not None and self.d2g_fn is not None


# --------------------------------------------------------------------------
# finite differences
# --------------------------------------------------------------------------

def central_partials(fn, x, h):
    """Stack of central differences ``[d_0 f, ..., d_3 f]`` at ``x``."""
    x = np.asarray(x, float)
    out = []
    for mu in range(4):
        e = np.zeros(4)
        e[mu] = h
        out.append((np.asarray(fn(x + e)) - np.asarray(fn(x - e))) / (2 * h))
    return np.stack(out)


def second_partials(fn, x, h):
    x = np.asarray(x, float)
    f0 = np.asarray(fn(x))
    out = np.zeros((4, 4) + f0.shape)
    for a in range(4):
        ea = np.zeros(4)
        ea[a] = h
        out[a, a] = (np.asarray(fn(x + ea)) - 2 * f0 + np.asarray(fn(x - ea))) / h**2
        for b in range(a + 1, 4):
            eb = np.zeros(4)
            eb[b] = h
            val = (np.asarray(fn(x + ea + eb)) - np.asarray(fn(x + ea - eb))
                   - np.asarray(fn(x - ea + eb)) + np.asarray(fn(x - ea - eb))) / (4 * h**2)
            out[a, b] = out[b, a] = val
    return out


# --------------------------------------------------------------------------
# connection and curvature
# --------------------------------------------------------------------------

def christoffel_from(ginv, dg):
    """``Gamma^l_{mn} = 1/2 g^{lk} (d_m g_{nk} + d_n g_{mk} - d_k g_{mn})``."""
    # lower[k, m, n] = d_m g_{nk} + d_n g_{mk} - d_k g_{mn}
    lower = np.einsum("mnk->kmn", dg) + np.einsum("nmk->kmn", dg) - dg
    gamma = 0.5 * np.einsum("lk,kmn->lmn", ginv, lower)
    return 0.5 * (gamma + gamma.transpose(0, 2, 1))


def christoffel(mf, x, method="auto", h=None):
    """Levi-Civita symbols ``gamma[l, m, n] = Gamma^l_{mn}``."""
    m = mf.at(x)
    return christoffel_from(m.ginv, mf.dg(x, h, method))


def christoffel_derivative(mf, x, method="auto", h=None):
    """``out[s, l, m, n] = d_s Gamma^l_{mn}``.

    With analytic second partials this is exact; otherwise it is the central
    difference (same step ``h``) of the Christoffel symbols.
    """
    x = np.asarray(x, float)
    if method != "fd" and mf.analytic:
        m = mf.at(x)
        dg = mf.dg(x)
        d2g = mf.d2g(x)
        dginv = -np.einsum("ab,sbc,cd->sad", m.ginv, dg, m.ginv)
        lower = np.einsum("mnk->kmn", dg) + np.einsum("nmk->kmn", dg) - dg
        dlower = np.einsum("smnk->skmn", d2g) + np.einsum("snmk->skmn", d2g) - d2g
        out = 0.5 * (np.einsum("slk,kmn->slmn", dginv, lower) + np.einsum("lk,skmn->slmn", m.ginv, dlower))
        return 0.5 * (out + out.transpose(0, 1, 3, 2))
    h = mf.h if h is None else h
    if not mf.constant:
        mf.box.require_interior(x, 3 * h)
    inner = "fd" if method == "fd" else "auto"
    return central_partials(lambda y: christoffel(mf, y, inner, h), x, h)


def riemann_from(gamma, dgamma):
    """``R^k_{lmn} = d_m G^k_{nl} - d_n G^k_{ml} + G^k_{me} G^e_{nl} - G^k_{ne} G^e_{ml}``.

    ``gamma[k, a, b]`` may be non-symmetric in ``a, b`` (first lower index is the
    derivative direction); ``dgamma[s, k, a, b] = d_s gamma[k, a, b]``.
    """
    d1 = np.einsum("mknl->klmn", dgamma)
    quad = np.einsum("kme,enl->klmn", gamma, gamma)
    return d1 - d1.transpose(0, 1, 3, 2) + quad - quad.transpose(0, 1, 3, 2)


@dataclass
class Curvature:
    riemann_mixed: np.ndarray  # R^k_{lmn}
    riemann_lower: np.ndarray  # R_{ablmn} = g_{ka} R^k_{bmn}
    c2form: np.ndarray  # C[m, n] = 1/2 R_{ab mn} dx^a ^ dx^b, shape (4, 4, 16)


def curvature_2form(riemann_lower):
    c = np.zeros((4, 4, alg.NBLADES))
    for mu in range(4):
        for nu in range(4):
            c[mu, nu] = alg.from_components(riemann_lower[:, :, mu, nu], 2)
    return c


def riemann(mf, x, method="auto", h=None):
    gamma = christoffel(mf, x, method, h)
    rm = riemann_from(gamma, christoffel_derivative(mf, x, method, h))
    rl = np.einsum("ka,kbmn->abmn", mf.at(x).g, rm)
    return Curvature(rm, rl, curvature_2form(rl))


# --------------------------------------------------------------------------
# coframes
# --------------------------------------------------------------------------

def gram_schmidt_coframe(ginv):
    """Rows ``e^a`` orthonormal under ``g^{-1}`` with norms ``(+1, -1, -1, -1)``; smooth in ``g``."""
    eta = np.array([1.0, -1.0, -1.0, -1.0])
    rows = []
    for a in range(4):
        v = np.eye(4)[a].copy()
        for b, e in enumerate(rows):
            v -= eta[b] * (v @ ginv @ e) * e
        nrm = v @ ginv @ v
        if nrm * eta[a] <= 0:
            raise DegenerateMetricError("coordinate covectors do not admit a causal Gram-Schmidt frame")
        rows.append(v / np.sqrt(abs(nrm)))
    return np.array(rows)


# --------------------------------------------------------------------------
# catalog
# --------------------------------------------------------------------------

def minkowski(box=None):
    """Constant ``diag(1, -1, -1, -1)``."""
    eta = alg.ETA.copy()
    return MetricField(
        "minkowski", lambda x: eta, lambda x: np.zeros((4, 4, 4)), lambda x: np.zeros((4, 4, 4, 4)),
        box=box, coframe_fn=lambda x: np.eye(4), dcoframe_fn=lambda x: np.zeros((4, 4, 4)), constant=True,
    )


def flrw(a0=1.0, k=0.1, box=None):
    """``diag(1, -a^2, -a^2, -a^2)`` with ``a(t) = a0 + k t``."""

    def a(x):
        return a0 + k * x[0]

    def g(x):
        return np.diag([1.0, -a(x) ** 2, -a(x) ** 2, -a(x) ** 2])

    def dg(x):
        out = np.zeros((4, 4, 4))
        out[0] = np.diag([0.0, -2 * a(x) * k, -2 * a(x) * k, -2 * a(x) * k])
        return out

    def d2g(x):
        out = np.zeros((4, 4, 4, 4))
        out[0, 0] = np.diag([0.0, -2 * k * k, -2 * k * k, -2 * k * k])
        return out

    def coframe(x):
        return np.diag([1.0, a(x), a(x), a(x)])

    def dcoframe(x):
        out = np.zeros((4, 4, 4))
        out[0] = np.diag([0.0, k, k, k])
        return out

    return MetricField("flrw", g, dg, d2g, box=box, params=(a0, k), coframe_fn=coframe, dcoframe_fn=dcoframe)


def conformally_flat(c0=0.1, c1=0.05, c2=-0.08, c3=0.03, box=None):
    """``omega(x)^2 eta`` with ``omega = exp(c . x)``; all-zero parameters give Minkowski."""
    c = np.array([c0, c1, c2, c3], float)
    eta = alg.ETA

    def om(x):
        return np.exp(c @ x)

    def g(x):
        return om(x) ** 2 * eta

    def dg(x):
        return 2 * c[:, None, None] * g(x)[None]

    def d2g(x):
        return 4 * np.einsum("a,b->ab", c, c)[:, :, None, None] * g(x)[None, None]

    def coframe(x):
        return om(x) * np.eye(4)

    def dcoframe(x):
        return c[:, None, None] * om(x) * np.eye(4)[None]

    return MetricField("conformally-flat", g, dg, d2g, box=box, params=tuple(c), coframe_fn=coframe, dcoframe_fn=dcoframe)


def polynomial_perturbed(eps=0.05, seed=7, box=None):
    """Minkowski plus a fixed random symmetric cubic polynomial of size ``eps``."""
    rng = np.random.default_rng(int(seed))

    def sym(t):
        return 0.5 * (t + np.swapaxes(t, -1, -2))

    p0 = sym(rng.normal(size=(4, 4)))
    p1 = sym(rng.normal(size=(4, 4, 4))) / 4
    p2 = rng.normal(size=(4, 4, 4, 4)) / 16
    p2 = sym(0.5 * (p2 + p2.transpose(1, 0, 2, 3)))
    p3 = rng.normal(size=(4, 4, 4, 4, 4)) / 64
    p3 = sym(sum(p3.transpose(*perm, 3, 4) for perm in _perms3()) / 6)
    eta = alg.ETA

    def g(x):
        return eta + eps * (p0 + np.einsum("a,amn->mn", x, p1) + np.einsum("a,b,abmn->mn", x, x, p2)
                            + np.einsum("a,b,c,abcmn->mn", x, x, x, p3))

    def dg(x):
        return eps * (p1 + 2 * np.einsum("b,kbmn->kmn", x, p2) + 3 * np.einsum("b,c,kbcmn->kmn", x, x, p3))

    def d2g(x):
        return eps * (2 * p2 + 6 * np.einsum("c,abcmn->abmn", x, p3))

    return MetricField("polynomial-perturbed", g, dg, d2g, box=box, params=(eps, seed))


def _perms3():
    import itertools

    return list(itertools.permutations(range(3)))


CATALOG = {
    "minkowski": (minkowski, ()),
    "flrw": (flrw, (1.0, 0.1)),
    "polynomial-perturbed": (polynomial_perturbed, (0.05, 7)),
    "conformally-flat": (conformally_flat, (0.1, 0.05, -0.08, 0.03)),
}


def metric_catalog(name, *params, box=None):
    """Build a catalog metric; ``params`` override the defaults positionally."""
    try:
        factory, defaults = CATALOG[name]
    except KeyError:
        raise ConfigError(f"unknown metric {name!r}; choose from {sorted(CATALOG)}") from None
    if len(params) > len(defaults):
        raise ConfigError(f"{name} takes at most {len(defaults)} parameters")
    args = tuple(params) + tuple(defaults[len(params):])
    return factory(*args, box=box)


def parse_metric_spec(spec, box=None):
    """``"flrw:1,0.1"`` -> catalog metric; ``"grid:path.json"`` -> sampled metric."""
    name, _, rest = spec.partition(":")
    if name == "grid":
        with open(rest) as fh:
            return grid_metric(json.load(fh))
    try:
        params = tuple(float(v) for v in rest.split(",")) if rest else ()
    except ValueError:
        raise ConfigError(f"bad metric parameters in {spec!r}") from None
    return metric_catalog(name, *params, box=box)


def grid_metric(doc):
    """Metric sampled on a box grid, multilinearly interpolated.

    ``doc = {"box": {"lo": [...], "hi": [...], "n": [...], "h": ...}, "g": [...]}`` with
    ``g`` holding ``prod(n) * 16`` numbers, nodes in C order, each node row-major.
    """
    try:
        b = doc["box"]
        box = ChartBox(tuple(b["lo"]), tuple(b["hi"]), tuple(int(v) for v in b["n"]), float(b.get("h", 1e-2)))
        vals = np.asarray(doc["g"], float).reshape(tuple(box.n) + (4, 4))
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"bad grid metric document: {exc}") from None
    axes = [np.linspace(a, c, k) for a, c, k in zip(box.lo, box.hi, box.n)]
    interp = RegularGridInterpolator(axes, vals.reshape(tuple(box.n) + (16,)), method="linear")
    for idx in np.ndindex(*box.n):
        node = [axes[i][j] for i, j in enumerate(idx)]
        alg.check_metric(vals[idx], node=node)

    def g(x):
        out = interp(np.asarray(x, float)[None])[0].reshape(4, 4)
        return 0.5 * (out + out.T)

    return MetricField("grid", g, box=box, lower_accuracy=True)


def check_axioms(mf, points=None):
    """Verify det<0 and signature -2 at every box node (or the given points)."""
    pts = mf.box.nodes() if points is None else points
    for x in pts:
        alg.check_metric(mf.g(x), node=np.asarray(x).tolist())
    return len(pts)
