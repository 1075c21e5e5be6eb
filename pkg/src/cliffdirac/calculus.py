"""Covariant and Clifford derivatives of form-valued fields.

Two independent constructions of the Clifford derivative are provided:

* :func:`upsilon_leibniz` differentiates each basis blade by writing it as a
  symmetrised Clifford product of covectors and applying the product rule, with
  ``Y_mu dx^n = -Gamma^n_{mu l} dx^l`` on the factors;
* :func:`upsilon_components` applies the covariant derivative to the
  antisymmetric component tensor of each grade.
"""
import numpy as np

from . import _blades as bl
from . import algebra as alg
from .errors import BoundaryError, GradeError
from .fields import Field, combine_depth
from .geometry import DEFAULT_H, MetricField, christoffel, riemann

DEFAULT_UPSILON = "components"


def _margin(mf, *fields, h=DEFAULT_H):
    margin = 0.0
    for f in fields:
        if isinstance(f, Field):
            margin = max(margin, f.reach(h) + (0.0 if f.grad is not None else f.step(h)))
    if mf.dg_fn is None and not mf.constant:
        margin = max(margin, 2 * h)
    return margin


def require_interior(mf, x, *fields, h=DEFAULT_H):
    margin = _margin(mf, *fields, h=h)
    if margin > 0:
        mf.box.require_interior(x, margin)


def _metric_depth(mf):
    return 0 if (mf.dg_fn is not None or mf.constant) else 1


# --------------------------------------------------------------------------
# covariant derivative of ordinary tensors
# --------------------------------------------------------------------------

class IndexedField:
    """Tensor field of rank (r, s): value shape ``(4,)*(r+s)`` (upper indices first),
    followed by a trailing 16-axis when ``form`` is true."""

    def __init__(self, field, r, s, form=False):
        self.field = field
        self.r = r
        self.s = s
        self.form = form

    def __call__(self, x):
        return self.field(x)


def covariant_derivative(t, mu, x, mf, h=DEFAULT_H, gamma=None):
    """``nabla_mu t`` for a rank-(r, s) scalar-valued tensor field (rules 1-4)."""
    if t.form:
        raise GradeError("covariant_derivative acts on scalar-valued tensors; use upsilon for forms")
    require_interior(mf, x, t.field, h=h)
    gam = christoffel(mf, x) if gamma is None else gamma
    val = t(x)
    out = np.array(t.field.partial(x, mu, h), dtype=float)
    for i in range(t.r + t.s):
        if i < t.r:
            # + Gamma^n_{mu l} t^{..l..}
            corr = np.tensordot(gam[:, mu, :], val, axes=([1], [i]))
            out = out + np.moveaxis(corr, 0, i)
        else:
            # - Gamma^l_{mu n} t_{..l..}
            corr = np.tensordot(gam[:, mu, :], val, axes=([0], [i]))
            out = out - np.moveaxis(corr, 0, i)
    return out


# --------------------------------------------------------------------------
# Clifford derivative: connection action on the blade basis
# --------------------------------------------------------------------------

def leibniz_connection(gamma, m):
    """``D[mu]`` with ``(Y_mu U)(x) = d_mu u + D[mu] @ u`` built by the Clifford product rule."""
    D = np.zeros((4, bl.NBLADES, bl.NBLADES))
    for mu in range(4):
        ycov = {a: -alg.vector(gamma[a, mu, :]) for a in range(4)}
        yblade = {(): np.zeros(bl.NBLADES)}
        for b in bl.BLADES[1:]:
            a, rest = b[0], b[1:]
            r = alg.basis(bl.INDEX[rest])
            yr = yblade[rest]
            sign = (-1) ** len(rest)
            # a ^ R = 1/2 (a R + (-1)^{|R|} R a)
            ea = alg.basis(bl.INDEX[(a,)])
            yb = 0.5 * (alg.clifford_mul(ycov[a], r, m) + alg.clifford_mul(ea, yr, m)
                        + sign * (alg.clifford_mul(yr, ea, m) + alg.clifford_mul(r, ycov[a], m)))
            yblade[b] = yb
            D[mu][:, bl.INDEX[b]] = yb
    return D


def component_connection(gamma):
    """Same matrices as :func:`leibniz_connection`, from ``u_{n1..nk;mu}``."""
    D = np.zeros((4, bl.NBLADES, bl.NBLADES))
    for mu in range(4):
        for j in range(1, bl.NBLADES):
            k = bl.GRADE[j]
            comp = alg.components(alg.basis(j), k)
            corr = np.zeros_like(comp)
            for i in range(k):
                c = np.tensordot(gamma[:, mu, :], comp, axes=([0], [i]))
                corr += np.moveaxis(c, 0, i)
            D[mu][:, j] = -alg.from_components(corr, k)
    return D


def _connection(mf, x, method, gamma=None):
    if gamma is not None:
        return leibniz_connection(gamma, mf.at(x)) if method == "leibniz" else component_connection(gamma)
    if method == "leibniz":
        return mf.memo("D-leibniz", x, lambda: leibniz_connection(christoffel(mf, x), mf.at(x)))
    return mf.memo("D-components", x, lambda: component_connection(christoffel(mf, x)))


def upsilon(U, mu, x, mf, method=DEFAULT_UPSILON, h=DEFAULT_H, gamma=None):
    """``Y_mu U`` at ``x``; ``gamma`` overrides the Levi-Civita symbols (affine connections)."""
    if method not in ("leibniz", "components"):
        raise ValueError(f"unknown upsilon method {method!r}")
    require_interior(mf, x, U, h=h)
    x = np.asarray(x, float)
    return U.partial(x, mu, h) + _connection(mf, x, method, gamma)[mu] @ U(x)


def upsilon_all(U, x, mf, method=DEFAULT_UPSILON, h=DEFAULT_H, gamma=None):
    """Stack ``[Y_0 U, ..., Y_3 U]``."""
    require_interior(mf, x, U, h=h)
    x = np.asarray(x, float)
    D = _connection(mf, x, method, gamma)
    u = U(x)
    du = U.partials(x, h)
    return du + np.einsum("mij,j->mi", D, u)


def upsilon_leibniz(U, mu, x, mf, h=DEFAULT_H):
    return upsilon(U, mu, x, mf, "leibniz", h)


def upsilon_components(U, mu, x, mf, h=DEFAULT_H):
    return upsilon(U, mu, x, mf, "components", h)


def upsilon_field(U, mu, mf, method=DEFAULT_UPSILON, h=DEFAULT_H):
    """``Y_mu U`` as a field (``mu`` is held fixed as a label)."""
    depth = max(U.derivative_depth, _metric_depth(mf))
    return Field(lambda x: upsilon(U, mu, x, mf, method, h), None, depth)


# --------------------------------------------------------------------------
# first-order operators
# --------------------------------------------------------------------------

_COVECTORS = [alg.basis(1 + mu) for mu in range(4)]


def d_op(U, x, mf, method=DEFAULT_UPSILON, h=DEFAULT_H):
    """Exterior derivative ``dx^mu ^ Y_mu U``."""
    Y = upsilon_all(U, x, mf, method, h)
    return sum(alg.wedge(_COVECTORS[mu], Y[mu]) for mu in range(4))


def upsilon_op(U, x, mf, method=DEFAULT_UPSILON, h=DEFAULT_H):
    """Clifford differential ``dx^mu Y_mu U``."""
    m = mf.at(x)
    Y = upsilon_all(U, x, mf, method, h)
    return sum(alg.clifford_mul(_COVECTORS[mu], Y[mu], m) for mu in range(4))


def delta_op(U, x, mf, method=DEFAULT_UPSILON, h=DEFAULT_H):
    """Generalised divergence ``dU - Y U``."""
    m = mf.at(x)
    Y = upsilon_all(U, x, mf, method, h)
    return sum(alg.wedge(_COVECTORS[mu], Y[mu]) - alg.clifford_mul(_COVECTORS[mu], Y[mu], m) for mu in range(4))


def _op_field(op, U, mf, method, h):
    depth = max(U.derivative_depth, _metric_depth(mf))
    return Field(lambda x: op(U, x, mf, method, h), None, depth)


def d_field(U, mf, method=DEFAULT_UPSILON, h=DEFAULT_H):
    return _op_field(d_op, U, mf, method, h)


def delta_field(U, mf, method=DEFAULT_UPSILON, h=DEFAULT_H):
    return _op_field(delta_op, U, mf, method, h)


def upsilon_op_field(U, mf, method=DEFAULT_UPSILON, h=DEFAULT_H):
    return _op_field(upsilon_op, U, mf, method, h)


def star_field(U, mf):
    return Field(lambda x: alg.hodge_star(U(x), mf.at(x)), None, U.fd_depth)


def star_d_star(U, x, mf, method=DEFAULT_UPSILON, h=DEFAULT_H):
    return alg.hodge_star(d_op(star_field(U, mf), x, mf, method, h), mf.at(x))


# --------------------------------------------------------------------------
# curvature identity
# --------------------------------------------------------------------------

def curvature_commutator(U, x, mf, mu, nu, method=DEFAULT_UPSILON, h=DEFAULT_H):
    """``(Y_mu Y_nu - Y_nu Y_mu) U`` at ``x``."""
    a = upsilon(upsilon_field(U, nu, mf, method, h), mu, x, mf, method, h)
    b = upsilon(upsilon_field(U, mu, mf, method, h), nu, x, mf, method, h)
    return a - b


def curvature_commutator_check(U, x, mf, mu, nu, method=DEFAULT_UPSILON, h=DEFAULT_H, curvature=None):
    """Residual ``[Y_mu, Y_nu] U - 1/2 [C_{mu nu}, U]``."""
    m = mf.at(x)
    curv = riemann(mf, x) if curvature is None else curvature
    c = curv.c2form[mu, nu]
    u = U(x)
    return curvature_commutator(U, x, mf, mu, nu, method, h) - 0.5 * alg.commutator(c, u, m)


# --------------------------------------------------------------------------
# affine changes of chart
# --------------------------------------------------------------------------

def _check_jacobian(J):
    J = np.asarray(J, float)
    if J.shape != (4, 4):
        raise ValueError("Jacobian must be 4x4")
    det = np.linalg.det(J)
    if not det > 0:
        raise ValueError(f"coordinate change must have positive Jacobian, got det={det:.6g}")
    return J


def transform_form(u, J):
    """Re-express a form given in ``dx`` on the basis ``d(x~)`` for ``x~ = J x + c``."""
    q = np.linalg.inv(_check_jacobian(J))
    from ._kernels import compound

    return compound(np.ascontiguousarray(q)).T @ np.asarray(u, float)


def transform_indexed(values, r, s, J, form=False):
    """Component transformation of a rank-(r, s) tensor (optionally form valued)."""
    p = _check_jacobian(J)
    q = np.linalg.inv(p)
    out = np.asarray(values, float)
    for i in range(r + s):
        mat = p if i < r else q.T
        out = np.moveaxis(np.tensordot(mat, out, axes=([1], [i])), 0, i)
    if form:
        out = np.apply_along_axis(transform_form, -1, out, J)
    return out


def transformed_metric(mf, J, c=None):
    """Metric field in chart ``x~ = J x + c`` (exact chain rule, analytic partials when available)."""
    p = _check_jacobian(J)
    q = np.linalg.inv(p)
    c = np.zeros(4) if c is None else np.asarray(c, float)

    def back(y):
        return q @ (np.asarray(y, float) - c)

    def g(y):
        return q.T @ mf.g(back(y)) @ q

    dg = d2g = None
    if mf.dg_fn is not None:
        def dg(y):
            return np.einsum("sk,ma,nb,smn->kab", q, q, q, mf.dg_fn(back(y)))
    if mf.d2g_fn is not None:
        def d2g(y):
            return np.einsum("sk,tl,ma,nb,stmn->klab", q, q, q, q, mf.d2g_fn(back(y)))
    corners = np.array([[mf.box.hi[i] if (n >> i) & 1 else mf.box.lo[i] for i in range(4)] for n in range(16)])
    img = corners @ p.T + c
    from .geometry import ChartBox

    box = ChartBox(tuple(img.min(0)), tuple(img.max(0)), mf.box.n, mf.box.h)
    return MetricField(f"{mf.label}~", g, dg, d2g, box=box, params=mf.params, constant=mf.constant)


def transformed_field(U, J, c=None):
    p = _check_jacobian(J)
    q = np.linalg.inv(p)
    c = np.zeros(4) if c is None else np.asarray(c, float)
    from ._kernels import compound

    C = compound(np.ascontiguousarray(q)).T

    def back(y):
        return q @ (np.asarray(y, float) - c)

    grad = None
    if U.grad is not None:
        def grad(y):
            d = U.grad(back(y))
            return np.einsum("nk,ni->ki", q, d) @ C.T
    return Field(lambda y: C @ U(back(y)), grad, U.fd_depth)


def coordinate_change_residual(U, J, mf, x, c=None, method=DEFAULT_UPSILON, h=DEFAULT_H):
    """Max discrepancy of ``Y_nu = p^mu_nu Y~_mu`` (forms compared on the ``d(x~)`` basis)."""
    p = _check_jacobian(J)
    c = np.zeros(4) if c is None else np.asarray(c, float)
    x = np.asarray(x, float)
    y = p @ x + c
    mft = transformed_metric(mf, J, c)
    Ut = transformed_field(U, J, c)
    lhs = np.array([transform_form(v, J) for v in upsilon_all(U, x, mf, method, h)])
    Yt = upsilon_all(Ut, y, mft, method, h)
    rhs = np.einsum("mn,mi->ni", p, Yt)
    return float(np.abs(lhs - rhs).max())


def coordinate_change_check(U, J, mf, x, tol=1e-10, c=None, **kw):
    return coordinate_change_residual(U, J, mf, x, c, **kw) <= tol * (1 + alg.norm_inf(U(x)))
