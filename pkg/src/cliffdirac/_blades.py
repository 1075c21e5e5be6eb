"""Canonical blade bookkeeping for the 16-dimensional form algebra in 4D."""
import itertools

import numpy as np

DIM = 4
NBLADES = 16

#: grade-major, lexicographic within a grade
BLADES = [()] + [c for k in range(1, DIM + 1) for c in itertools.combinations(range(DIM), k)]
INDEX = {b: i for i, b in enumerate(BLADES)}
GRADE = np.array([len(b) for b in BLADES], dtype=np.int64)
MASK = np.array([sum(1 << mu for mu in b) for b in BLADES], dtype=np.int64)
GRADE_SLICES = [slice(0, 1), slice(1, 5), slice(5, 11), slice(11, 15), slice(15, 16)]
EVEN = np.array([g % 2 == 0 for g in GRADE])
ODD = ~EVEN
EVEN_INDICES = np.flatnonzero(EVEN)
ODD_INDICES = np.flatnonzero(ODD)

#: U* = (-1)^{k(k-1)/2} U on grade k
REVERSION_SIGN = np.array([(-1) ** (k * (k - 1) // 2) for k in GRADE], dtype=np.float64)


def permutation_parity(seq):
    """Return +1/-1 for the parity of ``seq`` (distinct entries), 0 on repeats."""
    seq = list(seq)
    if len(set(seq)) < len(seq):
        return 0
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def _wedge_entries():
    rows = []
    for i, a in enumerate(BLADES):
        for j, b in enumerate(BLADES):
            if set(a) & set(b):
                continue
            sign = permutation_parity(a + b)
            rows.append((i, j, INDEX[tuple(sorted(a + b))], sign))
    return np.array(rows, dtype=np.int64)


#: sparse wedge table, rows (i, j, k, sign): e_i ^ e_j = sign * e_k
WEDGE_ENTRIES = _wedge_entries()
WEDGE_DENSE = np.zeros((NBLADES, NBLADES, NBLADES))
WEDGE_DENSE[WEDGE_ENTRIES[:, 0], WEDGE_ENTRIES[:, 1], WEDGE_ENTRIES[:, 2]] = WEDGE_ENTRIES[:, 3]


def _complement_perm():
    # EPS[J, N] = eps(N, J) with N the complement of J
    eps = np.zeros((NBLADES, NBLADES))
    for j, b in enumerate(BLADES):
        comp = tuple(mu for mu in range(DIM) if mu not in b)
        eps[j, INDEX[comp]] = permutation_parity(comp + b)
    return eps


COMPLEMENT_EPS = _complement_perm()

#: index pairs of the six basis 2-forms, in canonical order
BIVECTOR_PAIRS = np.array([b for b in BLADES if len(b) == 2], dtype=np.int64)
BIVECTOR_INDICES = np.arange(5, 11)

#: blades per grade as index arrays (for minors)
GRADE_TUPLES = [np.array([b for b in BLADES if len(b) == k], dtype=np.int64).reshape(-1, max(k, 1)) for k in range(DIM + 1)]


def _full_maps():
    # per grade k: flat index into a (4,)*k array, blade index, permutation sign
    maps = []
    for k in range(DIM + 1):
        flat, idx, sgn = [], [], []
        for i, b in enumerate(BLADES):
            if len(b) != k:
                continue
            for perm in itertools.permutations(b):
                flat.append(int(np.ravel_multi_index(perm, (DIM,) * k)) if k else 0)
                idx.append(i)
                sgn.append(permutation_parity(perm))
        maps.append((np.array(flat), np.array(idx), np.array(sgn, dtype=float)))
    return maps


FULL_MAPS = _full_maps()
