"""Chart-domain fields ``x -> array`` with analytic or finite-difference partials."""
import numpy as np

from . import _blades as bl
from . import algebra as alg
from .geometry import DEFAULT_H


def nested_step(h, depth):
    """FD step for a field whose evaluation already contains ``depth`` FD layers."""
    return h ** (2.0 / (2.0 + depth))


class Field:
    """Smooth function on the chart.

    ``grad(x)`` (optional) returns the stacked partials ``[d_0 f, ..., d_3 f]``.
    ``fd_depth`` counts the finite-difference layers used to evaluate ``fn``;
    it sets the step used when this field is differenced in turn.
    """

    __slots__ = ("fn", "grad", "fd_depth", "name")

    def __init__(self, fn, grad=None, fd_depth=0, name=None):
        self.fn = fn
        self.grad = grad
        self.fd_depth = fd_depth
        self.name = name

    def __repr__(self):
        return f"Field({self.name or self.fn!r}, analytic={self.grad is not None}, depth={self.fd_depth})"

    def __call__(self, x):
        return np.asarray(self.fn(np.asarray(x, dtype=float)), dtype=float)

    @property
    def derivative_depth(self):
        return self.fd_depth if self.grad is not None else self.fd_depth + 1

    def step(self, h=DEFAULT_H):
        return nested_step(h, self.fd_depth)

    def partials(self, x, h=DEFAULT_H):
        x = np.asarray(x, dtype=float)
        if self.grad is not None:
            return np.asarray(self.grad(x), dtype=float)
        s = self.step(h)
        out = []
        for mu in range(4):
            e = np.zeros(4)
            e[mu] = s
            out.append((self(x + e) - self(x - e)) / (2 * s))
        return np.stack(out)

    def partial(self, x, mu, h=DEFAULT_H):
        if self.grad is not None:
            return self.partials(x, h)[mu]
        s = self.step(h)
        e = np.zeros(4)
        e[mu] = s
        return (self(np.asarray(x, float) + e) - self(np.asarray(x, float) - e)) / (2 * s)

    # -- constructors ----------------------------------------------------
    @classmethod
    def constant(cls, value, name=None):
        value = np.array(value, dtype=float)
        zeros = np.zeros((4,) + value.shape)
        return cls(lambda x: value, lambda x: zeros, 0, name)

    def reach(self, h=DEFAULT_H):
        """How far the evaluation of this field samples away from ``x``."""
        total, depth = 0.0, 0
        while depth < self.fd_depth:
            total += nested_step(h, depth)
            depth += 1
        return total


def combine_depth(*fields):
    return max((f.fd_depth for f in fields), default=0)


def lift(fn, *fields, grad=None, name=None):
    """Pointwise combination ``x -> fn(f1(x), ..., fk(x))`` without analytic partials."""
    return Field(lambda x: fn(*(f(x) for f in fields)), grad, combine_depth(*fields), name)


# --------------------------------------------------------------------------
# random smooth fields (analytic partials)
# --------------------------------------------------------------------------

class TrigField(Field):
    """``c + sum_m A_m sin(k_m . x + phi_m)`` per component; partials are exact."""

    __slots__ = ("c", "A", "K", "phi")

    def __init__(self, rng, shape, n_modes=2, amp=0.5, freq=1.0, offset=1.0, mask=None, name=None):
        shape = tuple(shape)
        self.c = offset * rng.normal(size=shape)
        self.A = amp * rng.normal(size=(n_modes,) + shape)
        self.K = freq * rng.uniform(-1.0, 1.0, size=(n_modes,) + shape + (4,))
        self.phi = rng.uniform(0, 2 * np.pi, size=(n_modes,) + shape)
        if mask is not None:
            self.c = self.c * mask
            self.A = self.A * mask
        super().__init__(self._eval, self._grad, 0, name)

    def _eval(self, x):
        return self.c + (self.A * np.sin(self.K @ x + self.phi)).sum(axis=0)

    def _grad(self, x):
        w = self.A * np.cos(self.K @ x + self.phi)
        return np.moveaxis((w[..., None] * self.K).sum(axis=0), -1, 0)


def grade_mask(grades):
    return np.isin(bl.GRADE, list(grades)).astype(float)


def random_multivector_field(rng, grades=(0, 1, 2, 3, 4), **kw):
    return TrigField(rng, (bl.NBLADES,), mask=grade_mask(grades), **kw)


def random_scalar_field(rng, **kw):
    return TrigField(rng, (), **kw)


def random_tensor_field(rng, shape, **kw):
    return TrigField(rng, shape, **kw)


# --------------------------------------------------------------------------
# field algebra
# --------------------------------------------------------------------------

def _connection_matrices(mf, x):
    from .calculus import _connection

    return _connection(mf, x, "components")


def product_grad_available(mf):
    return mf.constant or mf.dg_fn is not None


def product_field(u, v, mf, name=None):
    """Pointwise Clifford product; ``u`` or ``v`` may be a constant array.

    Partials are analytic when both factors have them and the metric has
    analytic first partials. On a curved metric the product itself depends on
    ``x``; that contribution is ``(D_k u) v + u (D_k v) - D_k (u v)`` with
    ``D_k`` the connection matrices, since ``Y_k`` obeys the product rule.
    """
    u = u if isinstance(u, Field) else Field.constant(u)
    v = v if isinstance(v, Field) else Field.constant(v)

    def fn(x):
        return alg.clifford_mul(u(x), v(x), mf.at(x))

    grad = None
    if u.grad is not None and v.grad is not None and product_grad_available(mf):
        def grad(x):
            m = mf.at(x)
            a, b = u(x), v(x)
            da, db = u.grad(x), v.grad(x)
            out = np.stack([alg.clifford_mul(da[k], b, m) + alg.clifford_mul(a, db[k], m) for k in range(4)])
            if not mf.constant:
                D = _connection_matrices(mf, x)
                ab = alg.clifford_mul(a, b, m)
                for k in range(4):
                    out[k] += alg.clifford_mul(D[k] @ a, b, m) + alg.clifford_mul(a, D[k] @ b, m) - D[k] @ ab
            return out
    return Field(fn, grad, combine_depth(u, v), name)


def products(mf, *factors):
    out = factors[0]
    for f in factors[1:]:
        out = product_field(out, f, mf)
    return out


def linear_field(f, matrix_or_fn, name=None):
    """Apply a fixed linear map (array or callable on arrays) pointwise; partials follow."""
    op = matrix_or_fn if callable(matrix_or_fn) else (lambda a: matrix_or_fn @ a)
    grad = None
    if f.grad is not None:
        def grad(x):
            d = f.grad(x)
            return np.stack([op(d[k]) for k in range(4)])
    return Field(lambda x: op(f(x)), grad, f.fd_depth, name)


def reversion_field(f):
    return linear_field(f, alg.reversion)


def sum_field(*fields, weights=None):
    weights = [1.0] * len(fields) if weights is None else weights
    grad = None
    if all(f.grad is not None for f in fields):
        def grad(x):
            return sum(w * f.grad(x) for w, f in zip(weights, fields))
    return Field(lambda x: sum(w * f(x) for w, f in zip(weights, fields)), grad, combine_depth(*fields))


def scalar_times(s, f):
    """Scalar field times multivector field."""
    grad = None
    if s.grad is not None and f.grad is not None:
        def grad(x):
            return s.grad(x)[:, None] * f(x)[None] + s(x) * f.grad(x)
    return Field(lambda x: s(x) * f(x), grad, combine_depth(s, f))


# --------------------------------------------------------------------------
# Spin-valued fields
# --------------------------------------------------------------------------

def frame_plane_field(mf, a, b):
    """The 2-form ``e^a ^ e^b`` of the metric's orthonormal coframe."""

    def fn(x):
        e = mf.coframe(x)
        return alg.wedge(alg.vector(e[a]), alg.vector(e[b]))

    def grad(x):
        e, de = mf.coframe(x), mf.dcoframe(x)
        return np.stack([alg.wedge(alg.vector(de[k, a]), alg.vector(e[b]))
                         + alg.wedge(alg.vector(e[a]), alg.vector(de[k, b])) for k in range(4)])

    return Field(fn, grad, 0)


FRAME_PLANES = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def exp_plane_field(theta, plane, mf, square=None):
    """``exp(theta(x) E(x))`` for a 2-form field ``E`` with ``E^2 = square = +-1``.

    ``plane`` may be a constant array; ``square`` is then read off at the origin.
    """
    plane = plane if isinstance(plane, Field) else Field.constant(plane)
    if square is None:
        x0 = np.zeros(4)
        square = alg.clifford_mul(plane(x0), plane(x0), mf.at(x0))[0]
    one = alg.scalar()
    if square < 0:
        c, s, dc, ds = np.cos, np.sin, lambda t: -np.sin(t), np.cos
    else:
        c, s, dc, ds = np.cosh, np.sinh, np.sinh, np.cosh

    def fn(x):
        t = theta(x)
        return c(t) * one + s(t) * plane(x)

    grad = None
    if theta.grad is not None and plane.grad is not None:
        def grad(x):
            t = theta(x)
            dt = theta.grad(x)
            e = plane(x)
            return dt[:, None] * (dc(t) * one + ds(t) * e)[None] + s(t) * plane.grad(x)

    return Field(fn, grad, combine_depth(theta, plane))


def random_spin_field(rng, mf, n_planes=3, amp=0.4, freq=1.0):
    """Ordered product of exponentials of coframe planes ``e^a ^ e^b``.

    Each factor has exact partials (given the coframe partials), so the product
    does too whenever :func:`product_field` can differentiate on ``mf``.
    """
    order = rng.permutation(len(FRAME_PLANES))[:n_planes]
    factors = []
    for idx in order:
        a, b = FRAME_PLANES[idx]
        square = 1.0 if a == 0 else -1.0
        theta = random_scalar_field(rng, amp=amp, freq=freq, offset=amp)
        factors.append(exp_plane_field(theta, frame_plane_field(mf, a, b), mf, square))
    return products(mf, *factors)
