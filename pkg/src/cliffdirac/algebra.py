"""Pointwise Clifford algebra of differential forms on a 4D Lorentzian chart.

Multivectors are plain ``numpy`` arrays of 16 floats in canonical blade order
(grade-major, lexicographic within a grade). The coefficient of the blade
``(m1, ..., mk)`` with ``m1 < ... < mk`` is the strictly-increasing component
``u_{m1...mk}``.
"""
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg

from . import _blades as bl
from . import _kernels
from .errors import DegenerateMetricError, GradeError, SingularMultivectorError

BLADES = bl.BLADES
GRADE = bl.GRADE
NBLADES = bl.NBLADES
ETA = np.diag([1.0, -1.0, -1.0, -1.0])

#: relative tolerance used for exact algebraic identities
ALGEBRAIC_TOL = 1e-11
#: reciprocal-condition threshold below which ``inverse`` refuses to solve
INVERSE_RCOND = 1e-10


def check_metric(g, node=None):
    """Raise :class:`DegenerateMetricError` unless ``g`` is symmetric with det<0 and signature -2."""
    g = np.asarray(g, dtype=float)
    if g.shape != (4, 4):
        raise DegenerateMetricError(f"metric must be 4x4, got {g.shape}", node)
    if not np.allclose(g, g.T, rtol=0, atol=1e-12 * max(1.0, np.abs(g).max())):
        raise DegenerateMetricError("metric is not symmetric", node)
    det = np.linalg.det(g)
    if not det < 0:
        raise DegenerateMetricError(f"det g = {det:.6g} is not negative", node)
    ev = np.linalg.eigvalsh(g)
    if (ev > 0).sum() != 1 or (ev < 0).sum() != 3:
        raise DegenerateMetricError(f"signature of g is not -2 (eigenvalues {ev})", node)
    return g


@dataclass(frozen=True, eq=False)
class MetricAtPoint:
    """Covariant metric at one chart point plus the derived algebra tables."""

    g: np.ndarray
    ginv: np.ndarray = field(repr=False)
    det: float
    sqrt_neg_det: float

    @classmethod
    def from_g(cls, g, check=True, node=None):
        g = np.array(g, dtype=float)
        if check:
            check_metric(g, node)
        g = 0.5 * (g + g.T)
        ginv = np.linalg.inv(g)
        ginv = 0.5 * (ginv + ginv.T)
        det = float(np.linalg.det(g))
        g.setflags(write=False)
        ginv.setflags(write=False)
        return cls(g, ginv, det, float(np.sqrt(-det)))

    @cached_property
    def compound(self):
        """Minors of g^{-1} on the blade basis; raises all indices of a form."""
        return _kernels.compound(np.ascontiguousarray(self.ginv))

    @cached_property
    def hodge_matrix(self):
        return self.sqrt_neg_det * (bl.COMPLEMENT_EPS @ self.compound)

    @cached_property
    def table(self):
        """Structure tensor ``T[i, j, k]`` with ``e_i e_j = T[i, j, k] e_k``."""
        return _kernels.structure_tensor(self.hodge_matrix, np.ascontiguousarray(self.ginv), _kernels.GRADE_TABLE)

    def is_minkowski(self):
        return np.array_equal(self.g, ETA)


MINKOWSKI = MetricAtPoint.from_g(ETA)


# --------------------------------------------------------------------------
# construction helpers
# --------------------------------------------------------------------------

def zero():
    return np.zeros(NBLADES)


def scalar(c=1.0):
    u = np.zeros(NBLADES)
    u[0] = c
    return u


def blade(*indices):
    """Basis form ``dx^{i1} ^ ... ^ dx^{ik}`` (indices in any order; sign follows the permutation)."""
    sign = bl.permutation_parity(indices)
    u = np.zeros(NBLADES)
    if sign == 0:
        return u
    u[bl.INDEX[tuple(sorted(indices))]] = sign
    return u


def basis(i):
    u = np.zeros(NBLADES)
    u[i] = 1.0
    return u


def vector(coeffs):
    """1-form ``c_mu dx^mu``."""
    u = np.zeros(NBLADES)
    u[1:5] = coeffs
    return u


def from_components(comp, k):
    """Form ``1/k! u_{n1..nk} dx^{n1}^...^dx^{nk}`` from a full antisymmetric array."""
    u = np.zeros(NBLADES)
    if k == 0:
        u[0] = float(comp)
        return u
    sl = bl.GRADE_SLICES[k]
    flat, idx, sgn = bl.FULL_MAPS[k]
    first = np.searchsorted(idx, np.arange(sl.start, sl.stop))
    u[sl] = np.asarray(comp, dtype=float).reshape(-1)[flat[first]] * sgn[first]
    return u


def components(u, k):
    """Full antisymmetric covariant component array of the grade-``k`` part."""
    if k == 0:
        return np.asarray(u[0])
    flat, idx, sgn = bl.FULL_MAPS[k]
    out = np.zeros(4**k)
    out[flat] = sgn * np.asarray(u)[idx]
    return out.reshape((4,) * k)


def grade_project(u, k):
    if not 0 <= k <= 4:
        raise GradeError(f"grade must be in 0..4, got {k}")
    out = np.zeros(NBLADES)
    sl = bl.GRADE_SLICES[k]
    out[sl] = u[sl]
    return out


def grades_present(u, tol=0.0):
    return sorted({int(GRADE[i]) for i in range(NBLADES) if abs(u[i]) > tol})


def require_grade(u, k, name="operand", tol=1e-12):
    scale = max(1.0, float(np.abs(u).max()))
    mask = GRADE != k
    if np.abs(u[mask]).max(initial=0.0) > tol * scale:
        raise GradeError(f"{name} must be pure grade {k}, has grades {grades_present(u, tol * scale)}")


def even_part(u):
    return np.where(bl.EVEN, u, 0.0)


def odd_part(u):
    return np.where(bl.ODD, u, 0.0)


# --------------------------------------------------------------------------
# products
# --------------------------------------------------------------------------

def wedge(u, v):
    return _kernels.gp(np.asarray(u, float), np.asarray(v, float), bl.WEDGE_DENSE)


def hodge_star(u, m):
    return m.hodge_matrix @ u


def raise_indices(u, m):
    """Contravariant strictly-increasing components u^{N} of every grade."""
    return m.compound @ u


def com(u, v, m):
    """The four-term metric contraction on 2-forms; equals ``uv - vu``."""
    require_grade(u, 2, "U")
    require_grade(v, 2, "V")
    A = components(u, 2)
    B = components(v, 2)
    M = A @ m.ginv @ B
    c = 2.0 * (M - M.T)
    return _pack2(c)


def _pack2(full):
    # full is the coefficient array c[r, s] multiplying dx^r ^ dx^s summed over all r, s,
    # already antisymmetrised; the sorted coefficient is c[r, s] for r < s
    out = np.zeros(NBLADES)
    for n, (r, s) in enumerate(bl.BIVECTOR_PAIRS):
        out[5 + n] = full[r, s]
    return out


def clifford_mul(u, v, m):
    """Clifford product from the grade-pair table (bilinear, metric dependent)."""
    return _kernels.gp(np.asarray(u, float), np.asarray(v, float), m.table)


def mul(m, *factors):
    """Left-to-right Clifford product of several factors."""
    out = factors[0]
    for f in factors[1:]:
        out = clifford_mul(out, f, m)
    return out


def commutator(u, v, m):
    return clifford_mul(u, v, m) - clifford_mul(v, u, m)


def left_mul_matrix(u, m):
    """Matrix of ``v -> u v``."""
    return _kernels.left_matrix(np.asarray(u, float), m.table)


def right_mul_matrix(u, m):
    """Matrix of ``v -> v u``."""
    return np.tensordot(m.table, np.asarray(u, float), axes=([1], [0])).T


# -- independent product: single-covector absorption -----------------------

def _contract_covector(mu, v, ginv):
    # dx^mu _| v : sum_i (-1)^i g^{mu a_i} (blade without a_i)
    out = np.zeros(NBLADES)
    for i, b in enumerate(BLADES):
        c = v[i]
        if c == 0.0:
            continue
        for p, a in enumerate(b):
            g = ginv[mu, a]
            if g == 0.0:
                continue
            out[bl.INDEX[b[:p] + b[p + 1:]]] += (-1) ** p * g * c
    return out


def _wedge_covector(mu, v):
    out = np.zeros(NBLADES)
    for i, b in enumerate(BLADES):
        c = v[i]
        if c == 0.0 or mu in b:
            continue
        pos = sum(1 for a in b if a < mu)
        out[bl.INDEX[tuple(sorted(b + (mu,)))]] += (-1) ** pos * c
    return out


def _absorb(mu, v, ginv):
    # dx^mu v = dx^mu ^ v + dx^mu _| v, a consequence of dx^mu dx^nu = dx^mu ^ dx^nu + g^{mu nu}
    return _wedge_covector(mu, v) + _contract_covector(mu, v, ginv)


def _blade_times(b, v, ginv, memo):
    # (a ^ R) v = a (R v) - (a _| R) v
    if b in memo:
        return memo[b]
    if not b:
        out = v.copy()
    else:
        a, rest = b[0], b[1:]
        out = _absorb(a, _blade_times(rest, v, ginv, memo), ginv)
        cr = _contract_covector(a, basis(bl.INDEX[rest]), ginv)
        for j in np.flatnonzero(cr):
            out = out - cr[j] * _blade_times(BLADES[j], v, ginv, memo)
    memo[b] = out
    return out


def clifford_mul_oracle(u, v, m):
    """Clifford product by repeated covector absorption; independent of the grade table and of the Hodge star."""
    out = np.zeros(NBLADES)
    v = np.asarray(v, dtype=float)
    memo = {}
    for i in np.flatnonzero(u):
        out += u[i] * _blade_times(BLADES[i], v, m.ginv, memo)
    return out


# --------------------------------------------------------------------------
# unary operations
# --------------------------------------------------------------------------

def trace(u):
    return float(u[0])


def reversion(u):
    return bl.REVERSION_SIGN * u


def conjugate(u, h, m):
    """``H U*`` for a 1-form ``H``."""
    require_grade(h, 1, "H")
    return clifford_mul(h, reversion(u), m)


def exp_bivector(lam, i, m, tol=1e-9):
    """``cos(lam) + I sin(lam)`` for a 2-form with ``I^2 = -1``."""
    require_grade(i, 2, "I")
    sq = clifford_mul(i, i, m)
    if np.abs(sq + scalar()).max() > tol * max(1.0, np.abs(i).max() ** 2):
        raise GradeError("exp_bivector requires I^2 = -1")
    return np.cos(lam) * scalar() + np.sin(lam) * np.asarray(i, float)


def exp_mv(u, m):
    """Clifford exponential via the matrix exponential of left multiplication."""
    return scipy.linalg.expm(left_mul_matrix(u, m))[:, 0]


def inverse(u, m):
    L = left_mul_matrix(u, m)
    rcond = 1.0 / np.linalg.cond(L)
    if not rcond >= INVERSE_RCOND:
        raise SingularMultivectorError(f"multivector is not invertible (rcond={rcond:.3g})")
    return np.linalg.solve(L, scalar())


def is_spin(s, m, tol=1e-10):
    s = np.asarray(s, dtype=float)
    scale = max(1.0, float(np.abs(s).max()))
    if np.abs(s[bl.ODD]).max() > tol * scale:
        return False
    return bool(np.abs(clifford_mul(reversion(s), s, m) - scalar()).max() <= tol * scale ** 2)


def norm_inf(u):
    return float(np.abs(u).max()) if np.size(u) else 0.0


def random_metric(rng, spread=0.3):
    """Random valid metric ``E^T eta E`` with ``E = 1 + spread * N(0, 1)``."""
    while True:
        e = np.eye(4) + spread * rng.normal(size=(4, 4))
        if abs(np.linalg.det(e)) > 0.2:
            return MetricAtPoint.from_g(e.T @ ETA @ e)


def random_multivector(rng, grades=(0, 1, 2, 3, 4), scale=1.0):
    return scale * rng.normal(size=NBLADES) * np.isin(GRADE, list(grades))
