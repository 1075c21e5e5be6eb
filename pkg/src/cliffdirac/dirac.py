"""Tensor Dirac system: residuals, gauge maps, current, Lagrangians, Maxwell coupling, plane waves."""
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from . import _blades as bl
from . import algebra as alg
from .affine import (b_from_contorsion, bg_residual, component_field, coframe_depth, pure_gauge_field,
                     weitzenbock_contorsion)
from .calculus import _metric_depth, d_field, d_op, delta_op, require_interior, upsilon_all
from .errors import GradeError, NotSpinError, OffShellError, PreconditionError
from .fields import Field, combine_depth, product_field, products, reversion_field
from .geometry import DEFAULT_H, riemann

_DX = [alg.basis(1 + mu) for mu in range(4)]
H_SEED = alg.blade(0)
I_SEED = alg.blade(1, 2)


# --------------------------------------------------------------------------
# states
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DiracState:
    """``Psi`` even, ``H`` a 1-form, ``I`` a 2-form, ``a`` the ``(4,)`` field ``a_mu``,
    ``B`` the ``(4, 16)`` field of 2-forms ``B_mu`` and the mass ``m >= 0``."""

    Psi: Field
    H: Field
    I: Field
    a: Field
    B: Field
    m: float = 0.0

    def __post_init__(self):
        if not self.m >= 0:
            raise ValueError("mass must be nonnegative")

    def check(self, points, tol=1e-12):
        """Grade checks at ``points``; raises :class:`GradeError`."""
        for x in points:
            psi = self.Psi(x)
            if np.abs(psi[bl.ODD]).max() > tol * max(1.0, np.abs(psi).max()):
                raise GradeError(f"Psi has odd components at {np.asarray(x).tolist()}")
            alg.require_grade(self.H(x), 1, "H", tol)
            alg.require_grade(self.I(x), 2, "I", tol)
            for b in self.B(x):
                alg.require_grade(b, 2, "B_mu", tol)
        return self

    def constraint_defect(self, x, mf):
        m = mf.at(x)
        hh, ii = self.H(x), self.I(x)
        return max(alg.norm_inf(alg.clifford_mul(hh, hh, m) - alg.scalar()),
                   alg.norm_inf(alg.clifford_mul(ii, ii, m) + alg.scalar()),
                   alg.norm_inf(alg.commutator(hh, ii, m)))


class GaugeElement:
    """A Spin-valued field, validated at ``points`` (default: the box nodes)."""

    def __init__(self, field, mf, points=None, tol=1e-10):
        self.field = field
        self.mf = mf
        pts = mf.box.nodes() if points is None else points
        for x in pts:
            if not alg.is_spin(field(x), mf.at(x), tol):
                raise NotSpinError(f"gauge element is not in the Spin group at {np.asarray(x).tolist()}")

    def __call__(self, x):
        return self.field(x)


@dataclass(frozen=True)
class MaxwellState:
    A: Field
    F: Field
    alpha: float = 1.0


def constant_field(value):
    return Field.constant(value)


def zero_state(m=0.0, H=H_SEED, I=I_SEED):
    return DiracState(Field.constant(alg.zero()), Field.constant(H), Field.constant(I),
                      Field.constant(np.zeros(4)), Field.constant(np.zeros((4, bl.NBLADES))), m)


# --------------------------------------------------------------------------
# backgrounds satisfying the H / I / B constraint lines
# --------------------------------------------------------------------------

def coframe_background(mf):
    """``H = e^0``, ``I = e^1 ^ e^2`` and ``B`` from the coframe (teleparallel) connection.

    Both forms are parallel for the flat connection, so ``Y_mu H = [B_mu, H]`` and
    ``Y_mu I = [B_mu, I]`` hold, and ``B`` satisfies the background curvature system.
    """
    depth = coframe_depth(mf)
    if mf.constant:
        e = mf.coframe(np.zeros(4))
        h, i = alg.vector(e[0]), alg.wedge(alg.vector(e[1]), alg.vector(e[2]))
        return Field.constant(h), Field.constant(i), Field.constant(np.zeros((4, bl.NBLADES)))

    def hfn(x):
        return alg.vector(mf.coframe(x)[0])

    def ifn(x):
        e = mf.coframe(x)
        return alg.wedge(alg.vector(e[1]), alg.vector(e[2]))

    def hgrad(x):
        de = mf.dcoframe(x)
        return np.stack([alg.vector(de[k, 0]) for k in range(4)])

    def igrad(x):
        e, de = mf.coframe(x), mf.dcoframe(x)
        e1, e2 = alg.vector(e[1]), alg.vector(e[2])
        return np.stack([alg.wedge(alg.vector(de[k, 1]), e2) + alg.wedge(e1, alg.vector(de[k, 2]))
                         for k in range(4)])

    analytic = depth == 0
    K = weitzenbock_contorsion(mf)
    B = Field(lambda x: b_from_contorsion(K, x), None, depth)
    return (Field(hfn, hgrad if analytic else None, 0), Field(ifn, igrad if analytic else None, 0), B)


def random_state(rng, mf, m=None, gauge=True, amp=0.5):
    """Random non-solution state whose constraint lines hold exactly (up to FD error)."""
    from .fields import random_multivector_field, random_tensor_field, random_spin_field

    H, I, B = coframe_background(mf)
    psi = random_multivector_field(rng, grades=(0, 2, 4), amp=amp)
    a = random_tensor_field(rng, (4,), amp=amp, offset=amp)
    mass = float(rng.uniform(0.2, 2.0)) if m is None else m
    st = DiracState(psi, H, I, a, B, mass)
    if gauge:
        st = gauge_spin(st, random_spin_field(rng, mf), mf, validate=False)
    return st


# --------------------------------------------------------------------------
# residuals
# --------------------------------------------------------------------------

def _inner(psi, Y, a, B, I, m):
    """``Y_mu Psi + Psi I a_mu + Psi B_mu`` stacked over ``mu``."""
    pi = alg.clifford_mul(psi, I, m)
    return np.stack([Y[mu] + a[mu] * pi + alg.clifford_mul(psi, B[mu], m) for mu in range(4)])


def _slash(vs, m):
    return sum(alg.clifford_mul(_DX[mu], vs[mu], m) for mu in range(4))


def first_line(st, x, mf, h=DEFAULT_H):
    """``dx^mu (Y_mu Psi + Psi I a_mu + Psi B_mu) + m Psi H I``."""
    x = np.asarray(x, float)
    m = mf.at(x)
    psi, H, I = st.Psi(x), st.H(x), st.I(x)
    Y = upsilon_all(st.Psi, x, mf, h=h)
    return _slash(_inner(psi, Y, st.a(x), st.B(x), I, m), m) + st.m * alg.mul(m, psi, H, I)


def constraint_residuals(st, x, mf, h=DEFAULT_H):
    x = np.asarray(x, float)
    m = mf.at(x)
    H, I, B = st.H(x), st.I(x), st.B(x)
    YH = upsilon_all(st.H, x, mf, h=h)
    YI = upsilon_all(st.I, x, mf, h=h)
    return {
        "upsilon_H": np.stack([YH[mu] - alg.commutator(B[mu], H, m) for mu in range(4)]),
        "upsilon_I": np.stack([YI[mu] - alg.commutator(B[mu], I, m) for mu in range(4)]),
        "H2": alg.clifford_mul(H, H, m) - alg.scalar(),
        "I2": alg.clifford_mul(I, I, m) + alg.scalar(),
        "HI": alg.commutator(H, I, m),
    }


def residual_main(st, x, mf, h=DEFAULT_H):
    """First-line residual and the named constraint residuals."""
    return first_line(st, x, mf, h), constraint_residuals(st, x, mf, h)


def residual_bg(B, x, mf, mu, nu, h=DEFAULT_H, curvature=None):
    return bg_residual(B, x, mf, mu, nu, h, curvature)


# --------------------------------------------------------------------------
# gauge transformations
# --------------------------------------------------------------------------

def exp_field(lam, I, mf):
    """``exp(lambda I) = cos(lambda) + I sin(lambda)``."""

    def fn(x):
        return alg.exp_bivector(lam(x), I(x), mf.at(x))

    grad = None
    if lam.grad is not None and I.grad is not None:
        def grad(x):
            t, dt, i, di = lam(x), lam.grad(x), I(x), I.grad(x)
            return np.stack([dt[k] * (-np.sin(t) * alg.scalar() + np.cos(t) * i) + np.sin(t) * di[k]
                             for k in range(4)])
    return Field(fn, grad, combine_depth(lam, I))


def gauge_u1(st, lam, mf):
    """``Psi -> Psi exp(lambda I)``, ``a_mu -> a_mu - d_mu lambda``."""
    S = exp_field(lam, st.I, mf)
    a = st.a
    a_new = Field(lambda x: a(x) - lam.partials(x), None, combine_depth(a, lam))
    return replace(st, Psi=product_field(st.Psi, S, mf), a=a_new)


def _b_transform(B, S, mf):
    """``B_mu -> S^-1 B_mu S - S^-1 Y_mu S`` with ``S^-1 = S*``."""

    def fn(x):
        m = mf.at(x)
        s = S(x)
        sr = alg.reversion(s)
        Y = upsilon_all(S, x, mf)
        b = B(x)
        return np.stack([alg.mul(m, sr, b[mu], s) - alg.clifford_mul(sr, Y[mu], m) for mu in range(4)])

    depth = max(B.fd_depth, S.derivative_depth, _metric_depth(mf))
    return Field(fn, None, depth)


def gauge_spin(st, S, mf, validate=True):
    """``Psi -> Psi S``, ``H -> S^-1 H S``, ``I -> S^-1 I S``, ``B_mu -> S^-1 B_mu S - S^-1 Y_mu S``."""
    if validate and not isinstance(S, GaugeElement):
        S = GaugeElement(S, mf)
    field = S.field if isinstance(S, GaugeElement) else S
    Sr = reversion_field(field)
    return replace(
        st,
        Psi=product_field(st.Psi, field, mf),
        H=products(mf, Sr, st.H, field),
        I=products(mf, Sr, st.I, field),
        B=_b_transform(st.B, field, mf),
    )


# --------------------------------------------------------------------------
# conjugation, current, conservation, Lagrangian
# --------------------------------------------------------------------------

def bar(u, H, m):
    return alg.conjugate(u, H, m)


def bar_field(st, mf):
    """``Psi_bar = H Psi*`` as a field."""
    return product_field(st.H, reversion_field(st.Psi), mf)


def l_form(st, x, mf, h=DEFAULT_H):
    """``L = Psi* (first-line residual)``."""
    m = mf.at(x)
    return alg.clifford_mul(alg.reversion(st.Psi(x)), first_line(st, x, mf, h), m)


def conjugate_form_check(st, x, mf, h=DEFAULT_H):
    """``H L*`` minus ``((Y_mu Pb - a_mu I Pb - B_mu Pb) dx^mu - m I H Pb) Psi``."""
    x = np.asarray(x, float)
    m = mf.at(x)
    psi, H, I, a, B = st.Psi(x), st.H(x), st.I(x), st.a(x), st.B(x)
    lbar = alg.clifford_mul(H, alg.reversion(l_form(st, x, mf, h)), m)
    pb_field = bar_field(st, mf)
    pb = pb_field(x)
    Y = upsilon_all(pb_field, x, mf, h=h)
    ipb = alg.clifford_mul(I, pb, m)
    acc = sum(alg.clifford_mul(Y[mu] - a[mu] * ipb - alg.clifford_mul(B[mu], pb, m), _DX[mu], m)
              for mu in range(4))
    rhs = alg.clifford_mul(acc - st.m * alg.mul(m, I, H, pb), psi, m)
    return lbar - rhs


def current_field(st, mf):
    """``J = Psi H Psi*`` as a field."""
    return products(mf, st.Psi, st.H, reversion_field(st.Psi))


def current(st, x, mf):
    """``(j^mu, J)`` with ``j^mu = Tr(Psi_bar dx^mu Psi)`` and ``J = Psi H Psi*``."""
    x = np.asarray(x, float)
    m = mf.at(x)
    psi = st.Psi(x)
    pb = bar(psi, st.H(x), m)
    j = np.array([alg.trace(alg.mul(m, pb, _DX[mu], psi)) for mu in range(4)])
    J = alg.mul(m, psi, st.H(x), alg.reversion(psi))
    return j, J


def current_consistency(st, x, mf):
    """``max |j^mu - g^{mu nu} <J>_1,nu|`` plus the non-vector part of ``J``."""
    j, J = current(st, x, mf)
    m = mf.at(x)
    return float(np.abs(j - m.ginv @ J[1:5]).max()), float(np.abs(J - alg.grade_project(J, 1)).max())


def _density_current(st, mf):
    def fn(x):
        return mf.at(x).sqrt_neg_det * current(st, x, mf)[0]

    grad = None
    if mf.constant and st.Psi.grad is not None and st.H.grad is not None:
        def grad(x):
            m = mf.at(x)
            psi, dpsi = st.Psi(x), st.Psi.grad(x)
            H, dH = st.H(x), st.H.grad(x)
            pr = alg.reversion(psi)
            out = np.zeros((4, 4))
            for k in range(4):
                dpr = alg.reversion(dpsi[k])
                for mu in range(4):
                    out[k, mu] = alg.trace(alg.mul(m, dH[k], pr, _DX[mu], psi) + alg.mul(m, H, dpr, _DX[mu], psi)
                                           + alg.mul(m, H, pr, _DX[mu], dpsi[k]))
            return m.sqrt_neg_det * out
    return Field(fn, grad, combine_depth(st.Psi, st.H))


def divergence(st, x, mf, h=DEFAULT_H):
    """``d_mu (sqrt(-g) j^mu)``."""
    f = _density_current(st, mf)
    require_interior(mf, x, f, h=h)
    d = f.partials(x, h)
    return float(np.trace(d))


def conservation_residual(st, x, mf, h=DEFAULT_H):
    """``(d_mu(sqrt(-g) j^mu), Tr(H(L + L*)) - d_mu(sqrt(-g) j^mu)/sqrt(-g))``."""
    x = np.asarray(x, float)
    m = mf.at(x)
    div = divergence(st, x, mf, h)
    L = l_form(st, x, mf, h)
    ident = alg.trace(alg.clifford_mul(st.H(x), L + alg.reversion(L), m)) - div / m.sqrt_neg_det
    return div, ident


def lagrangian_density(st, x, mf, h=DEFAULT_H):
    """``Tr(sqrt(-g) H L I)``."""
    x = np.asarray(x, float)
    m = mf.at(x)
    return m.sqrt_neg_det * alg.trace(alg.mul(m, st.H(x), l_form(st, x, mf, h), st.I(x)))


def lagrangian_density_expanded(st, x, mf, h=DEFAULT_H):
    """``Tr(sqrt(-g) Psi_bar (dx^mu(...) I - m Psi H))``."""
    x = np.asarray(x, float)
    m = mf.at(x)
    psi, H, I = st.Psi(x), st.H(x), st.I(x)
    Y = upsilon_all(st.Psi, x, mf, h=h)
    kin = _slash(_inner(psi, Y, st.a(x), st.B(x), I, m), m)
    body = alg.clifford_mul(kin, I, m) - st.m * alg.clifford_mul(psi, H, m)
    return m.sqrt_neg_det * alg.trace(alg.clifford_mul(bar(psi, H, m), body, m))


# --------------------------------------------------------------------------
# Maxwell coupling
# --------------------------------------------------------------------------

@dataclass
class MaxwellResidual:
    dA_minus_F: np.ndarray
    deltaF_minus_J: np.ndarray
    dF: np.ndarray
    deltaJ: np.ndarray

    def __iter__(self):
        return iter((self.dA_minus_F, self.deltaF_minus_J))


def maxwell_residual(ms, st, x, mf, h=DEFAULT_H):
    x = np.asarray(x, float)
    J = current_field(st, mf)
    return MaxwellResidual(
        d_op(ms.A, x, mf, h=h) - ms.F(x),
        delta_op(ms.F, x, mf, h=h) - ms.alpha * J(x),
        d_op(ms.F, x, mf, h=h),
        delta_op(J, x, mf, h=h),
    )


def maxwell_from_potential(A, mf, alpha=1.0):
    return MaxwellState(A, d_field(A, mf), alpha)


def maxwell_lagrangian_identity(F, x, mf):
    """``Tr(sqrt(-g) F^2) + 1/2 sqrt(-g) f_{mn} f^{mn}``."""
    m = mf.at(x)
    f = F(x) if callable(F) else np.asarray(F, float)
    fl = alg.components(f, 2)
    fu = m.ginv @ fl @ m.ginv.T
    return m.sqrt_neg_det * (alg.trace(alg.clifford_mul(f, f, m)) + 0.5 * float(np.sum(fl * fu)))


def a_from_potential(A):
    """``a_mu`` components of a 1-form field."""
    grad = None
    if A.grad is not None:
        def grad(x):
            return A.grad(x)[:, 1:5]
    return Field(lambda x: A(x)[1:5], grad, A.fd_depth)


# --------------------------------------------------------------------------
# D_mu form of the coupled system
# --------------------------------------------------------------------------

def residual_coupled(st, ms, x, mf, h=DEFAULT_H, curvature=None):
    """All lines of the coupled system written with ``D_mu U = Y_mu U - [B_mu, U]``.

    ``st.a`` is ignored; the electromagnetic coupling enters through ``ms.A``.
    """
    x = np.asarray(x, float)
    m = mf.at(x)
    psi, H, I, B = st.Psi(x), st.H(x), st.I(x), st.B(x)
    A = ms.A(x)
    Ypsi = upsilon_all(st.Psi, x, mf, h=h)
    Dpsi = np.stack([Ypsi[mu] - alg.commutator(B[mu], psi, m) for mu in range(4)])
    Bslash = _slash(B, m)
    dirac = (_slash(Dpsi, m) + alg.mul(m, A, psi, I) + alg.clifford_mul(Bslash, psi, m)
             + st.m * alg.mul(m, psi, H, I))
    curv = riemann(mf, x) if curvature is None else curvature
    bg = np.zeros((4, 4, bl.NBLADES))
    for mu in range(4):
        for nu in range(mu + 1, 4):
            # D_mu B_nu - D_nu B_mu + [B_mu, B_nu] equals the background curvature combination
            bg[mu, nu] = residual_bg(st.B, x, mf, mu, nu, h, curv)
            bg[nu, mu] = -bg[mu, nu]
    cons = constraint_residuals(st, x, mf, h)
    mx = maxwell_residual(ms, st, x, mf, h)
    return {
        "dirac": dirac,
        "bg": bg,
        "DH": cons["upsilon_H"],
        "DI": cons["upsilon_I"],
        "H2": cons["H2"],
        "I2": cons["I2"],
        "HI": cons["HI"],
        "dA_F": mx.dA_minus_F,
        "deltaF_J": mx.deltaF_minus_J,
    }


def d_scalar(lam):
    """``d lambda`` as a 1-form field."""

    def fn(x):
        out = np.zeros(bl.NBLADES)
        out[1:5] = lam.partials(x)
        return out

    return Field(fn, None, lam.derivative_depth)


def gauge_u1_ut(st, ms, lam, mf):
    A = ms.A
    dl = d_scalar(lam)
    A_new = Field(lambda x: A(x) - dl(x), None, max(A.fd_depth, dl.fd_depth))
    S = exp_field(lam, st.I, mf)
    return replace(st, Psi=product_field(st.Psi, S, mf)), MaxwellState(A_new, ms.F, ms.alpha)


def gauge_spin_ut(st, ms, S, mf, validate=True):
    return gauge_spin(st, S, mf, validate), ms


# --------------------------------------------------------------------------
# Minkowski plane waves
# --------------------------------------------------------------------------

ON_SHELL_TOL = 1e-12


def null_space(M, rcond=1e-10):
    return scipy.linalg.null_space(M, rcond=rcond)


def planewave_matrix(p, m, sign=1, metric=alg.MINKOWSKI, H=H_SEED):
    """Matrix of ``Psi0 -> p_mu dx^mu Psi0 - sign m Psi0 H`` from even to odd coefficients."""
    pslash = alg.vector(p)
    M = np.zeros((len(bl.ODD_INDICES), len(bl.EVEN_INDICES)))
    for col, j in enumerate(bl.EVEN_INDICES):
        e = alg.basis(j)
        out = alg.clifford_mul(pslash, e, metric) - sign * m * alg.clifford_mul(e, H, metric)
        M[:, col] = out[bl.ODD_INDICES]
    return M


def _select_null_vector(N):
    """Projection of the scalar ``1`` (or the first even blade with a nonzero projection)."""
    for col in range(N.shape[0]):
        v = N @ N[col]
        if np.abs(v).max() > 1e-8:
            break
    v = v / np.linalg.norm(v)
    first = np.flatnonzero(np.abs(v) > 1e-12)[0]
    return v if v[first] > 0 else -v


def planewave_amplitude(p, m, sign=1):
    """Even ``Psi0`` with ``p_mu dx^mu Psi0 = sign m Psi0 dx^0`` (unit Euclidean norm)."""
    p = np.asarray(p, float)
    if p.shape != (4,):
        raise ValueError("momentum needs four components")
    if not m > 0:
        raise PreconditionError("plane-wave construction requires m > 0")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    p2 = float(p @ alg.ETA @ p)
    if abs(p2 - m * m) > ON_SHELL_TOL * max(1.0, m * m):
        raise OffShellError(f"p.p = {p2:.15g} differs from m^2 = {m * m:.15g}")
    N = null_space(planewave_matrix(p, m, sign))
    if N.shape[1] == 0:
        raise RuntimeError("on-shell plane-wave system has a trivial null space")
    psi0 = np.zeros(bl.NBLADES)
    psi0[bl.EVEN_INDICES] = _select_null_vector(N)
    basis = np.zeros((bl.NBLADES, N.shape[1]))
    basis[bl.EVEN_INDICES] = N
    return psi0, basis


def planewave_solve(p, m, sign=1, mf=None):
    """State ``Psi = Psi0 exp(-sign p_nu x^nu I)`` with ``H = dx^0``, ``I = dx^1 ^ dx^2``, ``a = B = 0``."""
    from .geometry import minkowski

    mf = minkowski() if mf is None else mf
    p = np.asarray(p, float)
    psi0, _ = planewave_amplitude(p, m, sign)
    M = alg.MINKOWSKI
    psi0_I = alg.clifford_mul(psi0, I_SEED, M)

    def fn(x):
        t = -sign * float(p @ x)
        return np.cos(t) * psi0 + np.sin(t) * psi0_I

    def grad(x):
        t = -sign * float(p @ x)
        w = -np.sin(t) * psi0 + np.cos(t) * psi0_I
        return -sign * p[:, None] * w[None]

    st = zero_state(m)
    return replace(st, Psi=Field(fn, grad, 0, "planewave"))


# --------------------------------------------------------------------------
# Minkowski gauge fixing
# --------------------------------------------------------------------------

def pure_gauge_state(st, U, mf):
    """Spin-transform a ``B = 0`` state by ``U``; the result carries ``B_mu = -U^-1 d_mu U``."""
    return gauge_spin(st, U, mf)


def minkowski_gauge_fix(st, U, mf, points=None, tol=1e-8):
    """Apply ``S = U^-1`` to a state whose ``B`` is the pure gauge of ``U``."""
    field = U.field if isinstance(U, GaugeElement) else U
    expected = pure_gauge_field(field, mf)
    pts = mf.box.random_points(np.random.default_rng(0), 8, 0.1) if points is None else points
    for x in pts:
        b, e = st.B(x), expected(x)
        if np.abs(b - e).max() > tol * (1 + np.abs(e).max()):
            raise PreconditionError("B is not the pure gauge potential of U")
    return gauge_spin(st, reversion_field(field), mf)


def gauge_fixed_residual(st, x, mf, h=DEFAULT_H):
    """Gauge-fixed system: first line with ``B = 0`` plus ``d_mu H``, ``d_mu I`` and the constraints."""
    x = np.asarray(x, float)
    m = mf.at(x)
    psi, H, I, a = st.Psi(x), st.H(x), st.I(x), st.a(x)
    dpsi = st.Psi.partials(x, h)
    pi = alg.clifford_mul(psi, I, m)
    first = _slash(np.stack([dpsi[mu] + a[mu] * pi for mu in range(4)]), m) + st.m * alg.mul(m, psi, H, I)
    return {
        "first": first,
        "dH": st.H.partials(x, h),
        "dI": st.I.partials(x, h),
        "H2": alg.clifford_mul(H, H, m) - alg.scalar(),
        "I2": alg.clifford_mul(I, I, m) + alg.scalar(),
        "HI": alg.commutator(H, I, m),
    }


def global_transform(st, V, mf):
    """Constant Spin element ``V``: ``Psi -> Psi V``, ``H -> V^-1 H V``, ``I -> V^-1 I V``."""
    V = np.asarray(V, float)
    if not alg.is_spin(V, mf.at(np.zeros(4))):
        raise NotSpinError("V is not in Spin(1,3)")
    Vf = Field.constant(V)
    Vr = Field.constant(alg.reversion(V))
    return replace(st, Psi=product_field(st.Psi, Vf, mf), H=products(mf, Vr, st.H, Vf),
                   I=products(mf, Vr, st.I, Vf))
