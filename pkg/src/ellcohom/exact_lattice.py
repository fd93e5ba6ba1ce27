"""Exact arithmetic on Q + Q*tau, integer matrices and systems over E = C/(Z + Z*tau).

Points of the complex plane are stored as pairs ``r + s*tau`` with rational
``r, s``; the lattice Lambda = Z + Z*tau is then exactly the set of pairs with
integral coordinates, which makes every membership test decidable.

Integer matrices are returned as numpy arrays of ``dtype=object`` holding
Python ints so that ``U @ a @ V`` stays exact.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

import numpy as np

from .exceptions import NotPrimitive, NotTransversal, NotUnimodular


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def format_fraction(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class QPair:
    """The exact point ``r + s*tau`` of the complex plane."""

    r: Fraction
    s: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "r", _frac(self.r))
        object.__setattr__(self, "s", _frac(self.s))

    @classmethod
    def coerce(cls, x) -> "QPair":
        if isinstance(x, QPair):
            return x
        if isinstance(x, EPoint):
            return x.lift()
        if isinstance(x, (tuple, list)) and len(x) == 2:
            return cls(x[0], x[1])
        if isinstance(x, complex):
            raise TypeError("complex numbers have no exact QPair form")
        return cls(x, 0)

    def __add__(self, other):
        other = QPair.coerce(other)
        return QPair(self.r + other.r, self.s + other.s)

    __radd__ = __add__

    def __sub__(self, other):
        other = QPair.coerce(other)
        return QPair(self.r - other.r, self.s - other.s)

    def __rsub__(self, other):
        return QPair.coerce(other) - self

    def __neg__(self):
        return QPair(-self.r, -self.s)

    def __mul__(self, c):
        if isinstance(c, (QPair, EPoint, complex)):
            return NotImplemented
        c = _frac(c)
        return QPair(self.r * c, self.s * c)

    __rmul__ = __mul__

    def __truediv__(self, c):
        c = _frac(c)
        return QPair(self.r / c, self.s / c)

    def reduce(self) -> "EPoint":
        return EPoint(self.r, self.s)

    def __repr__(self):
        return f"QPair({format_fraction(self.r)}, {format_fraction(self.s)})"

    def to_json(self):
        return [format_fraction(self.r), format_fraction(self.s)]

    @classmethod
    def from_json(cls, pair):
        return cls(Fraction(pair[0]), Fraction(pair[1]))


@dataclass(frozen=True)
class EPoint:
    """A point of E, stored by its representative in the half-open unit square."""

    r: Fraction
    s: Fraction = Fraction(0)

    def __post_init__(self):
        r, s = _frac(self.r), _frac(self.s)
        object.__setattr__(self, "r", r - (r.numerator // r.denominator))
        object.__setattr__(self, "s", s - (s.numerator // s.denominator))

    @classmethod
    def coerce(cls, x) -> "EPoint":
        if isinstance(x, EPoint):
            return x
        return QPair.coerce(x).reduce()

    def lift(self) -> QPair:
        return QPair(self.r, self.s)

    def is_zero(self) -> bool:
        return self.r == 0 and self.s == 0

    def __add__(self, other):
        other = EPoint.coerce(other)
        return EPoint(self.r + other.r, self.s + other.s)

    __radd__ = __add__

    def __sub__(self, other):
        other = EPoint.coerce(other)
        return EPoint(self.r - other.r, self.s - other.s)

    def __neg__(self):
        return EPoint(-self.r, -self.s)

    def __mul__(self, n):
        if not isinstance(n, (int, np.integer)):
            return NotImplemented
        n = int(n)
        return EPoint(self.r * n, self.s * n)

    __rmul__ = __mul__

    def sort_key(self):
        return (self.r, self.s)

    def __repr__(self):
        return f"EPoint({format_fraction(self.r)}, {format_fraction(self.s)})"

    def to_json(self):
        return [format_fraction(self.r), format_fraction(self.s)]

    @classmethod
    def from_json(cls, pair):
        return cls(Fraction(pair[0]), Fraction(pair[1]))


def in_lambda(x) -> bool:
    """True iff ``x`` lies in the lattice Z + Z*tau."""
    x = QPair.coerce(x)
    return x.r.denominator == 1 and x.s.denominator == 1


def embed(x, tau: complex) -> complex:
    x = QPair.coerce(x)
    return complex(float(x.r)) + float(x.s) * complex(tau)


def lattice_split(x) -> tuple[int, int]:
    """Return (A, B) with x = A*tau + B; x must lie in Lambda."""
    x = QPair.coerce(x)
    if not in_lambda(x):
        raise ValueError(f"{x!r} is not a lattice point")
    return int(x.s), int(x.r)


# ---------------------------------------------------------------------------
# integer matrices

def as_int_matrix(a) -> list[list[int]]:
    arr = np.asarray(a, dtype=object)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValueError("expected a 2-d integer matrix")
    out = []
    for row in arr.tolist():
        new_row = []
        for x in row:
            if isinstance(x, Fraction):
                if x.denominator != 1:
                    raise ValueError(f"non-integer entry {x}")
                x = x.numerator
            elif isinstance(x, float):
                if not x.is_integer():
                    raise ValueError(f"non-integer entry {x}")
            new_row.append(int(x))
        out.append(new_row)
    return out


def _obj(rows, ncols=None) -> np.ndarray:
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    arr = np.empty((len(rows), ncols), dtype=object)
    for i, row in enumerate(rows):
        for j, x in enumerate(row):
            arr[i, j] = int(x)
    return arr


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def det(a) -> int:
    """Exact determinant of a square integer matrix (Bareiss elimination)."""
    m = as_int_matrix(a)
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("det requires a square matrix")
    if n == 0:
        return 1
    m = [row[:] for row in m]
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def rank(a) -> int:
    """Exact rank over Q of an integer or rational matrix."""
    rows = [[_frac(x) for x in row] for row in np.asarray(a, dtype=object).tolist()]
    return sparse_rank([{j: x for j, x in enumerate(row) if x != 0} for row in rows])


def sparse_rank(rows: Iterable[dict]) -> int:
    """Exact rank over Q of a matrix given as sparse rows ``{column: value}``.

    Rows are reduced one at a time against the pivots found so far.
    """
    pivots: dict = {}
    r = 0
    for row in rows:
        row = {c: Fraction(v) for c, v in row.items() if v != 0}
        while row:
            c = min(row)
            if c not in pivots:
                lead = row[c]
                pivots[c] = {j: v / lead for j, v in row.items()}
                r += 1
                break
            f = row[c]
            for j, v in pivots[c].items():
                nv = row.get(j, 0) - f * v
                if nv:
                    row[j] = nv
                else:
                    row.pop(j, None)
    return r


def int_inverse(a) -> np.ndarray:
    """Inverse of a unimodular integer matrix, exactly."""
    m = as_int_matrix(a)
    n = len(m)
    if abs(det(m)) != 1:
        raise NotUnimodular("matrix is not unimodular")
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(m)]
    for c in range(n):
        p = next(i for i in range(c, n) if aug[i][c] != 0)
        aug[c], aug[p] = aug[p], aug[c]
        lead = aug[c][c]
        aug[c] = [x / lead for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    return _obj([[int(x) for x in row[n:]] for row in aug])


def snf(a) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Smith normal form.

    Returns ``(U, D, V)`` with ``U @ a @ V == D``, ``U`` and ``V`` unimodular,
    ``D`` diagonal with nonnegative entries and ``D[i, i] | D[i+1, i+1]``.
    """
    A = as_int_matrix(a)
    m = len(A)
    n = len(A[0]) if m else 0
    U = _identity(m)
    V = _identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, f):
        A[dst] = [x + f * y for x, y in zip(A[dst], A[src])]
        U[dst] = [x + f * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, f):
        for row in A:
            row[dst] += f * row[src]
        for row in V:
            row[dst] += f * row[src]

    for t in range(min(m, n)):
        # pivot on the smallest nonzero entry of the trailing block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            p = A[t][t]
            clean = True
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // p))
                    clean = clean and A[i][t] == 0
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // p))
                    clean = clean and A[t][j] == 0
            if not clean:
                cand = [(abs(A[i][t]), i, t) for i in range(t + 1, m) if A[i][t]]
                cand += [(abs(A[t][j]), t, j) for j in range(t + 1, n) if A[t][j]]
                _, i, j = min(cand)
                if j == t:
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if A[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
    return _obj(U, m), _obj(A, n), _obj(V, n)


def elementary_divisors(a) -> list[int]:
    _, D, _ = snf(a)
    return [int(D[i, i]) for i in range(min(D.shape)) if D[i, i] != 0]


def unimodular_complete(c: Sequence[int]) -> np.ndarray:
    """A matrix in GL(k, Z) whose first column is the primitive vector ``c``."""
    c = [int(x) for x in c]
    g = 0
    for x in c:
        g = gcd(g, x)
    if g != 1:
        raise NotPrimitive(f"column {c} has content {g}")
    U, D, V = snf(_obj([[x] for x in c]))
    # U c V = e_1 with V = [+-1], hence c = V[0,0] * U^{-1} e_1
    W = int_inverse(U)
    W[:, 0] = W[:, 0] * int(V[0, 0])
    return W


def kernel_basis(a) -> list[tuple[int, ...]]:
    """Z-basis of the left kernel {l : l @ a = 0}."""
    A = as_int_matrix(a)
    U, D, _ = snf(A)
    r = sum(1 for i in range(min(D.shape)) if D[i, i] != 0)
    return [tuple(int(x) for x in U[i]) for i in range(r, len(A))]


def _qvec_times(qvec, mat, j):
    return sum((QPair.coerce(x) * int(mat[i][j]) for i, x in enumerate(qvec)), QPair(0))


def solve_on_E(a, z, return_directions: bool = False):
    """Solve ``sum_i t_i a[i, j] = z_j`` (j < l) for t in E^k.

    ``a`` is the k x l integer block of rank l and ``z`` a list of l points
    (EPoint, QPair, or pairs).  Returns the canonical base points, one for each
    of the (d_1...d_l)^2 parallel components; for l = k these are all the
    solutions.  With ``return_directions`` the integer row vectors spanning the
    common tangent lattice of the components are returned as well.
    """
    A = as_int_matrix(a)
    k = len(A)
    ell = len(A[0])
    if len(z) != ell:
        raise ValueError("need one offset per column")
    if ell > k or rank(A) < ell:
        raise NotTransversal("coefficient block does not have full column rank")
    U, D, V = snf(A)
    zq = [QPair.coerce(x) for x in z]
    rhs = [_qvec_times(zq, V, j) for j in range(ell)]
    choices = []
    for j in range(ell):
        d = int(D[j, j])
        choices.append([(rhs[j] + QPair(n, m)) / d for m in range(d) for n in range(d)])
    points = set()
    for ys in itertools.product(*choices):
        y = list(ys) + [QPair(0)] * (k - ell)
        t = tuple(_qvec_times(y, U, i).reduce() for i in range(k))
        points.add(t)
    points = sorted(points, key=lambda p: [e.sort_key() for e in p])
    if return_directions:
        dirs = [tuple(int(x) for x in U[i]) for i in range(ell, k)]
        return points, dirs
    return points
