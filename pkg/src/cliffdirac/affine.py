"""Metric-compatible affine connections, contorsion and the 2-form potential ``B_mu``."""
import numpy as np

from . import algebra as alg
from .calculus import upsilon
from .errors import CompatibilityError, GradeError, NotSpinError, PreconditionError
from .fields import Field
from .geometry import DEFAULT_H, central_partials, christoffel, christoffel_derivative, riemann, riemann_from

COMPATIBILITY_TOL = 1e-12


def lower_first(k_mixed, g):
    """``K_{a m n} = g_{a l} K^l_{m n}``."""
    return np.einsum("al,lmn->amn", g, k_mixed)


def raise_first(k_lower, ginv):
    return np.einsum("la,amn->lmn", ginv, k_lower)


def compatibility_defect(k_lower):
    """``max |K_{n m l} + K_{l m n}|``; zero iff the connection is metric compatible."""
    return float(np.abs(k_lower + k_lower.transpose(2, 1, 0)).max())


def require_compatible(k_lower, tol=COMPATIBILITY_TOL):
    scale = max(1.0, float(np.abs(k_lower).max()))
    defect = compatibility_defect(k_lower)
    if defect > tol * scale:
        raise CompatibilityError(f"contorsion is not metric compatible (defect {defect:.3g})")


class ContorsionField:
    """``x -> K^l_{mn}(x)`` on a metric field.

    ``checked_points`` are verified for compatibility at construction; fields
    built by :func:`random_contorsion_field` and :func:`weitzenbock_contorsion`
    are compatible by construction.
    """

    def __init__(self, fn, mf, checked_points=(), tol=COMPATIBILITY_TOL):
        self.fn = fn
        self.mf = mf
        for x in checked_points:
            require_compatible(self.lowered(x), tol)

    def __call__(self, x):
        return np.asarray(self.fn(np.asarray(x, float)), float)

    def lowered(self, x):
        return lower_first(self(x), self.mf.at(x).g)

    @classmethod
    def zero(cls, mf):
        z = np.zeros((4, 4, 4))
        return cls(lambda x: z, mf)

    @classmethod
    def constant(cls, k_mixed, mf, check=True):
        k = np.array(k_mixed, float)
        pts = [np.zeros(4)] if check else ()
        return cls(lambda x: k, mf, pts)


def contorsion_from_b(b, ginv):
    """Invert ``b_{ab m} = -1/2 K_{a m b}``: ``K^l_{mn} = -2 g^{la} b_{a n m}``."""
    return raise_first(-2.0 * np.einsum("anm->amn", b), ginv)


def random_contorsion_field(rng, mf, amp=0.3, freq=1.0):
    """Smooth compatible contorsion drawn through an antisymmetric ``b`` tensor."""
    from .fields import TrigField

    raw = TrigField(rng, (4, 4, 4), amp=amp, freq=freq, offset=amp)

    def fn(x):
        t = raw(x)
        b = 0.5 * (t - t.transpose(1, 0, 2))
        return contorsion_from_b(b, mf.at(x).ginv)

    return ContorsionField(fn, mf)


# --------------------------------------------------------------------------
# torsion <-> contorsion
# --------------------------------------------------------------------------

def torsion_from_contorsion(k_mixed):
    """``T^l_{mn} = K^l_{mn} - K^l_{nm}``."""
    k = np.asarray(k_mixed, float)
    return k - k.transpose(0, 2, 1)


def contorsion_from_torsion(T, x, mf, tol=COMPATIBILITY_TOL):
    """``K^l_{mn} = 1/2 (T^l_{mn} + T_m^l_n + T_n^l_m)``; ``T`` is an array or a callable."""
    t = np.asarray(T(x) if callable(T) else T, float)
    scale = max(1.0, float(np.abs(t).max()))
    if np.abs(t + t.transpose(0, 2, 1)).max() > tol * scale:
        raise CompatibilityError("torsion must be antisymmetric in its lower indices")
    m = mf.at(x)
    # T_m^l_n = g_{ma} g^{lb} T^a_{bn}
    mixed = np.einsum("ma,lb,abn->lmn", m.g, m.ginv, t)
    return 0.5 * (t + mixed + mixed.transpose(0, 2, 1))


# --------------------------------------------------------------------------
# B_mu dictionary
# --------------------------------------------------------------------------

def b_tensor(k_lower):
    """``b[a, b, m] = -1/2 K_{a m b}``."""
    return -0.5 * np.einsum("amb->abm", k_lower)


def b_from_lowered(k_lower, tol=COMPATIBILITY_TOL):
    require_compatible(k_lower, tol)
    b = b_tensor(k_lower)
    b = 0.5 * (b - b.transpose(1, 0, 2))
    return np.stack([alg.from_components(b[:, :, mu], 2) for mu in range(4)])


def b_from_contorsion(K, x):
    """``B_mu = 1/2 b_{ab mu} dx^a ^ dx^b`` at ``x``; shape ``(4, 16)``."""
    return b_from_lowered(K.lowered(x))


def b_field(K, depth=0):
    return Field(lambda x: b_from_contorsion(K, x), None, depth)


def contorsion_from_B(B, m):
    """Read ``K^n_{m l}`` back off ``[B_m, dx^n] = K^n_{m l} dx^l``."""
    k = np.zeros((4, 4, 4))
    for mu in range(4):
        for nu in range(4):
            k[nu, mu] = alg.commutator(B[mu], alg.basis(1 + nu), m)[1:5]
    return k


# --------------------------------------------------------------------------
# affine connection: derivative split and curvature identities
# --------------------------------------------------------------------------

class AffineConnectionField:
    """``Gamma_check = Gamma + K`` for a compatible contorsion ``K``."""

    def __init__(self, K, gamma_fn=None):
        self.K = K
        self.mf = K.mf
        self._gamma_fn = gamma_fn

    def gamma_check(self, x):
        if self._gamma_fn is not None:
            return np.asarray(self._gamma_fn(np.asarray(x, float)), float)
        return christoffel(self.mf, x) + self.K(x)

    def torsion(self, x):
        return torsion_from_contorsion(self.gamma_check(x) - christoffel(self.mf, x))

    def nabla_metric(self, x):
        """``nabla_check_k g_{mn}``; vanishes for compatible connections."""
        gam = self.gamma_check(x)
        g = self.mf.at(x).g
        dg = self.mf.dg(x)
        return dg - np.einsum("lkm,ln->kmn", gam, g) - np.einsum("lkn,ml->kmn", gam, g)

    def dgamma_check(self, x, h=DEFAULT_H):
        self.mf.box.require_interior(x, 3 * h)
        return central_partials(self.gamma_check, x, h)


def contorsion_split_residual(U, K, x, mf, mu, h=DEFAULT_H, method="components"):
    """``Y_check_mu U - (Y_mu U - [B_mu, U])``."""
    x = np.asarray(x, float)
    m = mf.at(x)
    gam_check = christoffel(mf, x) + K(x)
    lhs = upsilon(U, mu, x, mf, method, h, gamma=gam_check)
    B = b_from_contorsion(K, x)
    rhs = upsilon(U, mu, x, mf, method, h) - alg.commutator(B[mu], U(x), m)
    return lhs - rhs


def affine_curvature(conn, x, h=DEFAULT_H):
    """``R_check_{ab mn} = g_{ka}(d_m Gc^k_{n b} - d_n Gc^k_{m b} + Gc^k_{m e} Gc^e_{n b} - Gc^k_{n e} Gc^e_{m b})``.

    The free index of the bracket is identified with ``b``; with ``K = 0`` this is
    the lowered Riemann tensor.
    """
    x = np.asarray(x, float)
    rm = riemann_from(conn.gamma_check(x), conn.dgamma_check(x, h))
    return np.einsum("ka,kbmn->abmn", conn.mf.at(x).g, rm)


def bg_residual(B, x, mf, mu, nu, h=DEFAULT_H, curvature=None, method="components"):
    """``Y_mu B_nu - Y_nu B_mu - [B_mu, B_nu] - 1/2 C_{mu nu}`` for a ``(4, 16)``-valued field ``B``."""
    x = np.asarray(x, float)
    m = mf.at(x)
    b = B(x)
    bmu = component_field(B, mu)
    bnu = component_field(B, nu)
    c = (riemann(mf, x) if curvature is None else curvature).c2form[mu, nu]
    return (upsilon(bnu, mu, x, mf, method, h) - upsilon(bmu, nu, x, mf, method, h)
            - alg.commutator(b[mu], b[nu], m) - 0.5 * c)


def component_field(F, idx):
    grad = None
    if F.grad is not None:
        def grad(x):
            return F.grad(x)[:, idx]
    return Field(lambda x: F(x)[idx], grad, F.fd_depth)


def affine_curvature_check(K, x, mf, h=DEFAULT_H, conn=None):
    """Return ``(q, R_check, max |R_check + 2 q|)``."""
    x = np.asarray(x, float)
    conn = AffineConnectionField(K) if conn is None else conn
    B = b_field(K)
    curv = riemann(mf, x)
    q = np.zeros((4, 4, 4, 4))
    for mu in range(4):
        for nu in range(mu + 1, 4):
            r = bg_residual(B, x, mf, mu, nu, h, curv)
            q[:, :, mu, nu] = alg.components(r, 2)
            q[:, :, nu, mu] = -q[:, :, mu, nu]
    rc = affine_curvature(conn, x, h)
    return q, rc, float(np.abs(rc + 2 * q).max())


# --------------------------------------------------------------------------
# teleparallel (Weitzenbock) connection: flat, compatible
# --------------------------------------------------------------------------

def weitzenbock_connection(mf, x):
    """``Gc^l_{mn} = e_a^l d_m e^a_n`` for the metric's orthonormal coframe."""
    e = mf.coframe(x)
    de = mf.dcoframe(x)
    einv = np.linalg.inv(e)  # einv[l, a] = e_a^l
    return np.einsum("la,man->lmn", einv, de)


def weitzenbock_contorsion(mf):
    """Contorsion of the coframe connection.

    With a differenced coframe the compatibility holds only to truncation
    error, so the lowered tensor is projected onto its compatible part.
    """

    def fn(x):
        m = mf.at(x)
        kl = lower_first(weitzenbock_connection(mf, x) - christoffel(mf, x), m.g)
        return raise_first(0.5 * (kl - kl.transpose(2, 1, 0)), m.ginv)

    return ContorsionField(fn, mf)


def weitzenbock_affine(mf):
    K = weitzenbock_contorsion(mf)
    return AffineConnectionField(K, gamma_fn=lambda x: weitzenbock_connection(mf, x))


def coframe_depth(mf):
    return 0 if mf._dcoframe_fn is not None else 1


# --------------------------------------------------------------------------
# pure gauge potentials in Minkowski space
# --------------------------------------------------------------------------

PURE_GAUGE_SIGN = -1.0


def _require_minkowski(mf):
    if not (mf.constant and mf.at(np.zeros(4)).is_minkowski()):
        raise PreconditionError("pure-gauge potentials are defined on the Minkowski metric only")


def spin_pure_gauge_B(U, x, mf, sign=PURE_GAUGE_SIGN, h=DEFAULT_H, leak_tol=1e-8):
    """``B_mu = sign * U^{-1} d_mu U`` (default ``sign = -1`` solves the flat zero-curvature system)."""
    _require_minkowski(mf)
    x = np.asarray(x, float)
    m = mf.at(x)
    u = U(x)
    if not alg.is_spin(u, m):
        raise NotSpinError(f"U is not in Spin(1,3) at {x.tolist()}")
    du = U.partials(x, h)
    ur = alg.reversion(u)
    raw = np.stack([sign * alg.clifford_mul(ur, du[mu], m) for mu in range(4)])
    out = np.stack([alg.grade_project(r, 2) for r in raw])
    leak = float(np.abs(raw - out).max())
    if leak > leak_tol * (1.0 + float(np.abs(du).max())):
        raise GradeError(f"U^-1 dU leaks out of grade 2 by {leak:.3g}")
    return out


def pure_gauge_field(U, mf, sign=PURE_GAUGE_SIGN, h=DEFAULT_H):
    depth = U.derivative_depth
    return Field(lambda x: spin_pure_gauge_B(U, x, mf, sign, h), None, depth)


def bb_residual(B, x, mf, mu, nu, h=DEFAULT_H):
    """``d_mu B_nu - d_nu B_mu - [B_mu, B_nu]`` (Minkowski)."""
    _require_minkowski(mf)
    return bg_residual(B, x, mf, mu, nu, h)
