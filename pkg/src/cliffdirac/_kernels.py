"""Hot numeric kernels, numba-compiled when available.

Every public kernel has a numba implementation (``*_nb``) and a pure numpy
implementation (``*_np``); the module-level name binds whichever the
environment selects. Both are kept importable so the benchmark and the tests
can compare them directly.
"""
import numpy as np

from . import _blades as bl
from ._accel import HAVE_NUMBA, njit

# Grade-pair product table, expressed as coefficients on five bilinear terms:
#   0: U ^ V
#   1: *(U ^ *V)
#   2: *(*U ^ V)
#   3: *U ^ *V
#   4: Com(U, V)
TERM_WEDGE, TERM_STAR_U_STARV, TERM_STAR_STARU_V, TERM_STARU_STARV, TERM_COM = range(5)


def _grade_table():
    c = np.zeros((5, 5, 5))
    for k in range(5):
        c[TERM_WEDGE, 0, k] = 1.0
        c[TERM_WEDGE, k, 0] = 1.0
    for k in range(1, 5):
        c[TERM_WEDGE, 1, k] = 1.0
        c[TERM_STAR_U_STARV, 1, k] = -1.0
    for k in range(2, 5):
        # printed as U^V + *(U ^ *V), which vanishes identically for k >= 2;
        # *(*U ^ V) is the form consistent with 1-form products and associativity
        c[TERM_WEDGE, k, 1] = 1.0
        c[TERM_STAR_STARU_V, k, 1] = 1.0
    c[TERM_WEDGE, 2, 2] = 1.0
    c[TERM_STAR_U_STARV, 2, 2] = 1.0
    c[TERM_COM, 2, 2] = 0.5
    c[TERM_STARU_STARV, 2, 3] = 1.0
    c[TERM_STAR_U_STARV, 2, 3] = -1.0
    c[TERM_STARU_STARV, 2, 4] = 1.0
    c[TERM_STARU_STARV, 3, 2] = -1.0
    c[TERM_STAR_STARU_V, 3, 2] = -1.0
    c[TERM_STARU_STARV, 3, 3] = 1.0
    c[TERM_STAR_U_STARV, 3, 3] = 1.0
    c[TERM_STARU_STARV, 3, 4] = 1.0
    c[TERM_STARU_STARV, 4, 2] = 1.0
    c[TERM_STARU_STARV, 4, 3] = -1.0
    c[TERM_STARU_STARV, 4, 4] = -1.0
    return c


GRADE_TABLE = _grade_table()

_W = bl.WEDGE_ENTRIES
_GR = bl.GRADE
_BIV = bl.BIVECTOR_PAIRS


# --------------------------------------------------------------------------
# minors of a 4x4 matrix, arranged on the blade basis
# --------------------------------------------------------------------------

@njit
def _det2(m, r0, r1, c0, c1):
    return m[r0, c0] * m[r1, c1] - m[r0, c1] * m[r1, c0]


@njit
def _det3(m, r0, r1, r2, c0, c1, c2):
    return (m[r0, c0] * (m[r1, c1] * m[r2, c2] - m[r1, c2] * m[r2, c1])
            - m[r0, c1] * (m[r1, c0] * m[r2, c2] - m[r1, c2] * m[r2, c0])
            + m[r0, c2] * (m[r1, c0] * m[r2, c1] - m[r1, c1] * m[r2, c0]))


@njit
def compound_nb(m):
    out = np.zeros((16, 16))
    out[0, 0] = 1.0
    for a in range(4):
        for b in range(4):
            out[1 + a, 1 + b] = m[a, b]
    for a in range(6):
        for b in range(6):
            out[5 + a, 5 + b] = _det2(m, _BIV[a, 0], _BIV[a, 1], _BIV[b, 0], _BIV[b, 1])
    tri = np.array([[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]])
    for a in range(4):
        for b in range(4):
            out[11 + a, 11 + b] = _det3(m, tri[a, 0], tri[a, 1], tri[a, 2], tri[b, 0], tri[b, 1], tri[b, 2])
    det = 0.0
    for c in range(4):
        cols = np.empty(3, dtype=np.int64)
        n = 0
        for cc in range(4):
            if cc != c:
                cols[n] = cc
                n += 1
        sign = 1.0 if c % 2 == 0 else -1.0
        det += sign * m[0, c] * _det3(m, 1, 2, 3, cols[0], cols[1], cols[2])
    out[15, 15] = det
    return out


def compound_np(m):
    out = np.zeros((16, 16))
    for k, sl in enumerate(bl.GRADE_SLICES):
        if k == 0:
            out[0, 0] = 1.0
            continue
        idx = bl.GRADE_TUPLES[k]
        sub = m[idx[:, None, :, None], idx[None, :, None, :]]
        out[sl, sl] = np.linalg.det(sub)
    return out


# --------------------------------------------------------------------------
# structure tensor of the Clifford product: (e_i e_j)_k = T[i, j, k]
# --------------------------------------------------------------------------

@njit
def structure_tensor_nb(star, ginv, coef):
    T = np.zeros((16, 16, 16))
    nnz = _W.shape[0]
    for e in range(nnz):
        i, j, k, s = _W[e, 0], _W[e, 1], _W[e, 2], float(_W[e, 3])
        c = coef[0, _GR[i], _GR[j]]
        if c != 0.0:
            T[i, j, k] += c * s
    # *(U ^ *V): W[i, l, m] entries, V = e_j enters through star[l, j]
    for e in range(nnz):
        i, l, m, s = _W[e, 0], _W[e, 1], _W[e, 2], float(_W[e, 3])
        for j in range(16):
            c = coef[1, _GR[i], _GR[j]]
            if c == 0.0 or star[l, j] == 0.0:
                continue
            f = c * s * star[l, j]
            for k in range(16):
                T[i, j, k] += f * star[k, m]
    # *(*U ^ V)
    for e in range(nnz):
        l, j, m, s = _W[e, 0], _W[e, 1], _W[e, 2], float(_W[e, 3])
        for i in range(16):
            c = coef[2, _GR[i], _GR[j]]
            if c == 0.0 or star[l, i] == 0.0:
                continue
            f = c * s * star[l, i]
            for k in range(16):
                T[i, j, k] += f * star[k, m]
    # *U ^ *V
    for e in range(nnz):
        l, n, k, s = _W[e, 0], _W[e, 1], _W[e, 2], float(_W[e, 3])
        for i in range(16):
            if star[l, i] == 0.0:
                continue
            for j in range(16):
                c = coef[3, _GR[i], _GR[j]]
                if c == 0.0:
                    continue
                T[i, j, k] += c * s * star[l, i] * star[n, j]
    c = coef[4, 2, 2]
    if c != 0.0:
        for a in range(6):
            for b in range(6):
                com = com_basis_nb(_BIV[a, 0], _BIV[a, 1], _BIV[b, 0], _BIV[b, 1], ginv)
                for q in range(6):
                    T[5 + a, 5 + b, 5 + q] += c * com[q]
    return T


@njit
def com_basis_nb(p, q, r, s, ginv):
    # Com(dx^p ^ dx^q, dx^r ^ dx^s) as 2-form coefficients: 2 (M - M^T) with M = A ginv B
    A = np.zeros((4, 4))
    B = np.zeros((4, 4))
    A[p, q] = 1.0
    A[q, p] = -1.0
    B[r, s] = 1.0
    B[s, r] = -1.0
    M = A @ ginv @ B
    out = np.zeros(6)
    for a in range(6):
        x, y = _BIV[a, 0], _BIV[a, 1]
        out[a] = 2.0 * (M[x, y] - M[y, x])
    return out


def _terms_np(star, ginv):
    W = bl.WEDGE_DENSE
    t_wedge = W
    t_b = np.einsum("km,ilm,lj->ijk", star, W, star, optimize=True)
    t_c = np.einsum("km,ljm,li->ijk", star, W, star, optimize=True)
    t_d = np.einsum("lnk,li,nj->ijk", W, star, star, optimize=True)
    t_e = np.zeros((16, 16, 16))
    A = np.zeros((6, 4, 4))
    A[np.arange(6), _BIV[:, 0], _BIV[:, 1]] = 1.0
    A[np.arange(6), _BIV[:, 1], _BIV[:, 0]] = -1.0
    M = np.einsum("axy,yz,bzw->abxw", A, ginv, A)
    M = 2.0 * (M - M.transpose(0, 1, 3, 2))
    t_e[5:11, 5:11, 5:11] = M[:, :, _BIV[:, 0], _BIV[:, 1]]
    return (t_wedge, t_b, t_c, t_d, t_e)


def structure_tensor_np(star, ginv, coef):
    gi, gj = np.meshgrid(_GR, _GR, indexing="ij")
    T = np.zeros((16, 16, 16))
    for term, t in enumerate(_terms_np(star, ginv)):
        T += coef[term][gi, gj][:, :, None] * t
    return T


# --------------------------------------------------------------------------
# bilinear contraction with the structure tensor
# --------------------------------------------------------------------------

@njit
def gp_nb(a, b, T):
    out = np.zeros(16)
    for i in range(16):
        ai = a[i]
        if ai == 0.0:
            continue
        for j in range(16):
            f = ai * b[j]
            if f == 0.0:
                continue
            for k in range(16):
                out[k] += f * T[i, j, k]
    return out


def gp_np(a, b, T):
    return b @ (a @ T.reshape(16, 256)).reshape(16, 16)


@njit
def gp_batch_nb(A, B, T):
    n = A.shape[0]
    out = np.zeros((n, 16))
    for r in range(n):
        out[r] = gp_nb(A[r], B[r], T)
    return out


def gp_batch_np(A, B, T):
    return np.einsum("ni,nj,ijk->nk", A, B, T, optimize=True)


@njit
def left_matrix_nb(a, T):
    M = np.zeros((16, 16))
    for i in range(16):
        if a[i] == 0.0:
            continue
        for j in range(16):
            for k in range(16):
                M[k, j] += a[i] * T[i, j, k]
    return M


def left_matrix_np(a, T):
    return np.tensordot(a, T, axes=1).T


if HAVE_NUMBA:
    compound = compound_nb
    structure_tensor = structure_tensor_nb
    gp = gp_nb
    gp_batch = gp_batch_nb
    left_matrix = left_matrix_nb
else:
    compound = compound_np
    structure_tensor = structure_tensor_np
    gp = gp_np
    gp_batch = gp_batch_np
    left_matrix = left_matrix_np

BACKEND = "numba" if HAVE_NUMBA else "numpy"
