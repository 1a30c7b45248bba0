"""Linear algebra over the coefficient field.

Dense helpers work on lists of lists of scalars in either mode.  The sparse
:class:`Eliminator` performs incremental exact row reduction and is what the
ideal-membership solver uses for the degree-by-degree systems.
"""

import heapq

import numpy as np

from . import coeff as C
from .coeff import EXACT, FLOAT, mpq


class SingularMatrix(ValueError):
    pass


def _zero(mode):
    return mpq(0) if mode == EXACT else 0j


def _one(mode):
    return mpq(1) if mode == EXACT else 1 + 0j


def identity(n, mode=EXACT):
    return [[_one(mode) if i == j else _zero(mode) for j in range(n)] for i in range(n)]


def matmul(A, B):
    m = len(B)
    return [[sum((A[i][k] * B[k][j] for k in range(m)), A[i][0] * 0)
             for j in range(len(B[0]))] for i in range(len(A))]


def transpose(A):
    return [list(r) for r in zip(*A)]


def matvec(A, v):
    return [sum((a * b for a, b in zip(row, v)), row[0] * 0) for row in A]


def convert_matrix(A, mode):
    return [[C.convert(c, mode) for c in row] for row in A]


def rref(A, mode=EXACT):
    """Reduced row echelon form; returns (R, pivot columns)."""
    R = [list(r) for r in A]
    rows = len(R)
    cols = len(R[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        if mode == FLOAT:
            p = max(range(r, rows), key=lambda i: abs(R[i][c]))
            if C.is_zero(R[p][c], mode):
                continue
        else:
            p = next((i for i in range(r, rows) if R[i][c] != 0), None)
            if p is None:
                continue
        R[r], R[p] = R[p], R[r]
        inv = 1 / R[r][c]
        R[r] = [v * inv for v in R[r]]
        for i in range(rows):
            if i != r and not C.is_zero(R[i][c], mode):
                f = R[i][c]
                R[i] = [a - f * b for a, b in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
    return R, pivots


def rank(A, mode=EXACT):
    if not A:
        return 0
    if mode == FLOAT:
        M = np.array([[complex(c) for c in row] for row in A], dtype=complex)
        if M.size == 0:
            return 0
        s = np.linalg.svd(M, compute_uv=False)
        scale = max(1.0, float(s[0]) if len(s) else 1.0)
        return int(np.sum(s > C.get_tolerance() * scale * 10))
    return len(rref(A, mode)[1])


def inverse(A, mode=EXACT):
    n = len(A)
    aug = [list(A[i]) + [_one(mode) if i == j else _zero(mode) for j in range(n)]
           for i in range(n)]
    R, piv = rref(aug, mode)
    if piv[:n] != list(range(n)):
        raise SingularMatrix("matrix is singular")
    return [row[n:] for row in R]


def det(A, mode=EXACT):
    n = len(A)
    M = [list(r) for r in A]
    d = _one(mode)
    for c in range(n):
        p = next((i for i in range(c, n) if not C.is_zero(M[i][c], mode)), None)
        if p is None:
            return _zero(mode)
        if p != c:
            M[c], M[p] = M[p], M[c]
            d = -d
        d = d * M[c][c]
        inv = 1 / M[c][c]
        for i in range(c + 1, n):
            f = M[i][c] * inv
            if not C.is_zero(f, mode):
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return d


def nullspace(A, ncols=None, mode=EXACT):
    """Basis of {v : A v = 0}."""
    if not A:
        n = ncols or 0
        return [[_one(mode) if i == j else _zero(mode) for i in range(n)] for j in range(n)]
    R, piv = rref(A, mode)
    n = len(A[0])
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = [_zero(mode)] * n
        v[f] = _one(mode)
        for r, p in enumerate(piv):
            v[p] = -R[r][f]
        basis.append(v)
    return basis


def solve(A, b, mode=EXACT):
    """Some solution of A x = b (free variables zero), or None if inconsistent."""
    rows = len(A)
    n = len(A[0]) if rows else 0
    aug = [list(A[i]) + [b[i]] for i in range(rows)]
    R, piv = rref(aug, mode)
    if n in piv:
        return None
    x = [_zero(mode)] * n
    for r, p in enumerate(piv):
        x[p] = R[r][n]
    return x


class Eliminator:
    """Incremental sparse row reduction for exact (or float) systems.

    Rows are dicts column -> value.  ``add_row`` reduces a new equation
    against the stored pivots and either stores it or reports it as dependent
    (returning the leftover right-hand side, which is nonzero when the system
    has become inconsistent).  Right-hand sides are carried as a separate
    scalar per row.
    """

    def __init__(self, mode=EXACT):
        self.mode = mode
        self.pivots = {}   # pivot column -> (row dict, rhs); row[pivot] == 1

    def _reduce(self, row, rhs):
        mode = self.mode
        row = {c: v for c, v in row.items() if not C.is_zero(v, mode)}
        heap = [c for c in row if c in self.pivots]
        heapq.heapify(heap)
        seen = set()
        while heap:
            c = heapq.heappop(heap)
            if c in seen:
                continue
            seen.add(c)
            v = row.get(c)
            if v is None:
                continue
            prow, prhs = self.pivots[c]
            for k, w in prow.items():
                nv = row.get(k, 0) - v * w
                if C.is_zero(nv, mode):
                    row.pop(k, None)
                else:
                    row[k] = nv
                    if k in self.pivots and k not in seen:
                        heapq.heappush(heap, k)
            rhs = rhs - v * prhs
        return row, rhs

    def add_row(self, row, rhs=0):
        """Returns None if the row became a new pivot, else the reduced rhs."""
        row, rhs = self._reduce(dict(row), rhs)
        if not row:
            return rhs
        c = min(row)
        inv = 1 / row[c]
        row = {k: v * inv for k, v in row.items()}
        self.pivots[c] = (row, rhs * inv)
        return None

    def solution(self):
        """Particular solution with free variables set to zero."""
        x = {}
        for c in sorted(self.pivots, reverse=True):
            row, rhs = self.pivots[c]
            val = rhs
            for k, w in row.items():
                if k != c:
                    val = val - w * x.get(k, 0)
            if not C.is_zero(val, self.mode):
                x[c] = val
        return x


def lstsq_min_norm(A, b, mode=EXACT):
    """Minimum-norm solution of a consistent system A x = b (None if inconsistent).

    Exact mode solves A A^H y = b then x = A^H y; float mode uses numpy.
    """
    rows = len(A)
    if rows == 0:
        return None
    n = len(A[0])
    if mode == FLOAT:
        M = np.array([[complex(c) for c in row] for row in A], dtype=complex)
        v = np.array([complex(c) for c in b], dtype=complex)
        x, *_ = np.linalg.lstsq(M, v, rcond=None)
        scale = max(1.0, float(np.max(np.abs(v))) if v.size else 1.0)
        if np.max(np.abs(M @ x - v), initial=0.0) > 1e3 * C.get_tolerance() * scale:
            return None
        return [complex(c) for c in x]
    AH = [[C.conj(A[i][j]) for i in range(rows)] for j in range(n)]
    G = matmul(A, AH)
    y = solve(G, b, mode)
    if y is None:
        return None
    return matvec(AH, y)
