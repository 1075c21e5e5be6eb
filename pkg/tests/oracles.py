"""Reference implementations that share no code with the package.

* ``GammaRep``: the Clifford product realised as 4x4 complex matrices.
* ``hodge_star_sum``: the Hodge star as an explicit Levi-Civita sum.
* ``sympy_christoffel`` / ``sympy_riemann``: symbolic curvature.
"""
import itertools
from functools import lru_cache

import numpy as np
import sympy as sp

BLADES = [()] + [c for k in range(1, 5) for c in itertools.combinations(range(4), k)]


def perm_sign(seq):
    seq = list(seq)
    if len(set(seq)) < len(seq):
        return 0
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


_S = [np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.array([[1, 0], [0, -1]])]
_GAMMA = [np.diag([1, 1, -1, -1]).astype(complex)] + [
    np.block([[np.zeros((2, 2)), s], [-s, np.zeros((2, 2))]]).astype(complex) for s in _S
]


class GammaRep:
    """Faithful matrix representation of the algebra for a given inverse metric."""

    def __init__(self, ginv):
        w, Q = np.linalg.eigh(ginv)
        order = np.argsort(-w)  # the single positive eigenvalue goes with gamma^0
        w, Q = w[order], Q[:, order]
        A = Q * np.sqrt(np.abs(w))
        self.gamma = [sum(A[mu, a] * _GAMMA[a] for a in range(4)) for mu in range(4)]
        self.images = [self._blade(b) for b in BLADES]
        self._basis = np.stack([np.concatenate([M.real.ravel(), M.imag.ravel()]) for M in self.images], axis=1)

    def _blade(self, b):
        # wedge of covectors = antisymmetrised Clifford product
        if not b:
            return np.eye(4, dtype=complex)
        out = np.zeros((4, 4), dtype=complex)
        for perm in itertools.permutations(b):
            M = np.eye(4, dtype=complex)
            for mu in perm:
                M = M @ self.gamma[mu]
            out += perm_sign(perm) * M
        return out / len(list(itertools.permutations(b)))

    def to_matrix(self, u):
        return sum(c * M for c, M in zip(u, self.images))

    def from_matrix(self, M):
        rhs = np.concatenate([M.real.ravel(), M.imag.ravel()])
        coef, *_ = np.linalg.lstsq(self._basis, rhs, rcond=None)
        return coef

    def mul(self, u, v):
        return self.from_matrix(self.to_matrix(u) @ self.to_matrix(v))


def levi_civita(*idx):
    return perm_sign(idx)


def hodge_star_sum(u, g):
    """Explicit Levi-Civita sum with eps_{0123} = +1."""
    g = np.asarray(g, float)
    ginv = np.linalg.inv(g)
    sq = np.sqrt(-np.linalg.det(g))
    out = np.zeros(16)
    for i, b in enumerate(BLADES):
        if u[i] == 0:
            continue
        k = len(b)
        # raise every index of the single blade component
        for up in itertools.product(range(4), repeat=k):
            factor = u[i]
            for mu, nu in zip(up, b):
                factor *= ginv[mu, nu]
            if factor == 0 or len(set(up)) < k:
                continue
            rest = tuple(mu for mu in range(4) if mu not in up)
            # the k! orderings of b are absorbed by summing over ordered 'up'
            out[BLADES.index(rest)] += sq * factor * levi_civita(*(up + rest))
    return out


def wedge_blades(u, v):
    out = np.zeros(16)
    for i, a in enumerate(BLADES):
        for j, b in enumerate(BLADES):
            s = perm_sign(a + b)
            if s and u[i] and v[j]:
                out[BLADES.index(tuple(sorted(a + b)))] += s * u[i] * v[j]
    return out


# --------------------------------------------------------------------------
# symbolic geometry
# --------------------------------------------------------------------------

T, X, Y, Z = sp.symbols("t x y z")
COORDS = (T, X, Y, Z)


@lru_cache(maxsize=None)
def flrw_symbolic(a0=1.0, k=0.1):
    a = sp.nsimplify(a0) + sp.nsimplify(k) * T
    return sp.diag(1, -a ** 2, -a ** 2, -a ** 2)


@lru_cache(maxsize=None)
def sympy_christoffel(metric_key):
    g = flrw_symbolic(*metric_key)
    ginv = g.inv()
    G = [[[sp.simplify(sum(ginv[l, s] * (sp.diff(g[s, m], COORDS[n]) + sp.diff(g[s, n], COORDS[m])
                                         - sp.diff(g[m, n], COORDS[s])) for s in range(4)) / 2)
           for n in range(4)] for m in range(4)] for l in range(4)]
    return G


@lru_cache(maxsize=None)
def sympy_riemann(metric_key):
    """R^r_{s m n} = d_m G^r_{n s} - d_n G^r_{m s} + G^r_{m l} G^l_{n s} - G^r_{n l} G^l_{m s}."""
    G = sympy_christoffel(metric_key)
    R = [[[[sp.simplify(sp.diff(G[r][n][s], COORDS[m]) - sp.diff(G[r][m][s], COORDS[n])
                        + sum(G[r][m][l] * G[l][n][s] - G[r][n][l] * G[l][m][s] for l in range(4)))
            for n in range(4)] for m in range(4)] for s in range(4)] for r in range(4)]
    return R


def evaluate(nested, x):
    return np.array(sp.lambdify(COORDS, sp.Array(nested), "numpy")(*x), dtype=float)
