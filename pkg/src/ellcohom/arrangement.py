"""Elliptic arrangements in E^k: vertices, local Orlik-Solomon dimensions and Betti numbers.

A hyperplane is ``sum_i t_i c_i = z`` with a primitive integer column ``c``
and an offset ``z`` in E.  (c, z) and (-c, -z) cut out the same set, so the
column is stored with its first nonzero entry positive.  Hyperplane indices
are positions in ``EllipticArrangement.hyperplanes``; that order is also the
order used for no-broken-circuit sets.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

import numpy as np

from . import elliptic_core
from .exact_lattice import (EPoint, QPair, as_int_matrix, det, in_lambda, int_inverse,
                            kernel_basis, rank, solve_on_E, sparse_rank, unimodular_complete)
from .exceptions import (DuplicateZ, NotConvenient, NotPrimitive, NotTransversal,
                         NotUnimodular, RankDeficient, SizeLimit)
from .form_builder import TransversalSystem, form_at

MAX_HYPERPLANES = 12
MAX_K = 3
MAX_BRUTE_INCIDENT = 10
MAX_MOEBIUS = 6
DEFAULT_TAU = complex(0.1, 1.1)

_PRIMES = (3, 5, 7, 11, 13, 17, 19, 23, 29, 31)


@dataclass(frozen=True)
class EllipticHyperplane:
    column: tuple
    offset: EPoint

    def __post_init__(self):
        col = tuple(int(x) for x in self.column)
        g = 0
        for x in col:
            g = gcd(g, x)
        if g != 1:
            raise NotPrimitive(f"column {col} has content {g}")
        off = EPoint.coerce(self.offset)
        if next(x for x in col if x != 0) < 0:
            col, off = tuple(-x for x in col), -off
        object.__setattr__(self, "column", col)
        object.__setattr__(self, "offset", off)

    def contains(self, point: Sequence[EPoint]) -> bool:
        val = EPoint(0)
        for c, p in zip(self.column, point):
            val = val + p * c
        return (val - self.offset).is_zero()

    def to_json(self) -> dict:
        return {"coeffs": list(self.column), "z": self.offset.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "EllipticHyperplane":
        return cls(tuple(data["coeffs"]), EPoint.from_json(data["z"]))


@dataclass(frozen=True)
class EllipticArrangement:
    """Hyperplanes in E^k together with the weights w of the local system.

    ``k = 0`` is allowed only as the point E^0 produced by restricting a
    k = 1 arrangement.
    """

    k: int
    tau: complex
    weights: tuple
    hyperplanes: tuple = ()

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be nonnegative")
        object.__setattr__(self, "tau", elliptic_core.check_tau(self.tau))
        object.__setattr__(self, "weights", tuple(QPair.coerce(x) for x in self.weights))
        hs = tuple(h if isinstance(h, EllipticHyperplane) else EllipticHyperplane(*h)
                   for h in self.hyperplanes)
        object.__setattr__(self, "hyperplanes", hs)
        if len(self.weights) != self.k:
            raise ValueError(f"need {self.k} weights, got {len(self.weights)}")
        if any(len(h.column) != self.k for h in hs):
            raise ValueError("hyperplane columns must have length k")
        if len(set(hs)) != len(hs):
            raise ValueError("hyperplanes must be pairwise distinct")

    def __len__(self):
        return len(self.hyperplanes)

    def columns(self, idx: Sequence[int]) -> list[list[int]]:
        """k x len(idx) matrix whose columns are the given hyperplane columns."""
        return [[self.hyperplanes[j].column[i] for j in idx] for i in range(self.k)]

    def system(self, idx: Sequence[int]) -> TransversalSystem:
        """The TransversalSystem of k transversal hyperplanes, in the order given."""
        return TransversalSystem(self.columns(idx), [self.hyperplanes[j].offset.lift() for j in idx],
                                 self.weights, self.tau)

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "tau": [self.tau.real, self.tau.imag],
            "weights": [w.to_json() for w in self.weights],
            "hyperplanes": [h.to_json() for h in self.hyperplanes],
        }

    @classmethod
    def from_json(cls, data: dict) -> "EllipticArrangement":
        return cls(int(data["k"]), complex(*data["tau"]),
                   tuple(QPair.from_json(w) for w in data["weights"]),
                   tuple(EllipticHyperplane.from_json(h) for h in data["hyperplanes"]))


@dataclass(frozen=True)
class Vertex:
    point: tuple
    incident: tuple

    def to_json(self) -> dict:
        return {"point": [p.to_json() for p in self.point], "incident": list(self.incident)}


def default_weights(k: int) -> tuple:
    """(1/3, 1/5, 1/7, ...): no subset sum is an integer."""
    return tuple(QPair(Fraction(1, p)) for p in _PRIMES[:k])


def discriminantal(n: int, k: int, z: Optional[Sequence] = None, tau=DEFAULT_TAU,
                   weights: Optional[Sequence] = None) -> EllipticArrangement:
    """t_i = z_a for all i, a, then t_i = t_j for i < j.

    ``z`` defaults to z_a = a/(n+1); ``weights`` to :func:`default_weights`.
    """
    if z is None:
        z = [QPair(Fraction(a, n + 1)) for a in range(1, n + 1)]
    zs = [EPoint.coerce(x) for x in z]
    if len(zs) != n:
        raise ValueError(f"need {n} points z")
    if len(set(zs)) != n:
        raise DuplicateZ("the points z_a must be distinct on E")
    hs = []
    for i in range(k):
        e = [int(r == i) for r in range(k)]
        hs.extend(EllipticHyperplane(tuple(e), za) for za in zs)
    for i, j in itertools.combinations(range(k), 2):
        e = [0] * k
        e[i], e[j] = 1, -1
        hs.append(EllipticHyperplane(tuple(e), EPoint(0)))
    w = default_weights(k) if weights is None else weights
    return EllipticArrangement(k, tau, tuple(w), tuple(hs))


def _point_key(p):
    return [e.sort_key() for e in p]


def enumerate_vertices(C: EllipticArrangement) -> list[Vertex]:
    """All vertices, each with the full set of hyperplanes through it."""
    if C.k == 0:
        return [Vertex((), ())]
    if len(C) > MAX_HYPERPLANES or C.k > MAX_K:
        raise SizeLimit(f"{len(C)} hyperplanes in E^{C.k} exceeds the desk-scale limit")
    points = set()
    for idx in itertools.combinations(range(len(C)), C.k):
        a = C.columns(idx)
        if det(a) == 0:
            continue
        points.update(solve_on_E(a, [C.hyperplanes[j].offset for j in idx]))
    out = []
    for p in sorted(points, key=_point_key):
        inc = tuple(j for j, h in enumerate(C.hyperplanes) if h.contains(p))
        out.append(Vertex(p, inc))
    return out


# ---------------------------------------------------------------------------
# local Orlik-Solomon dimensions

def _closure(cols: list, S: Sequence[int]) -> set:
    r = rank([cols[i] for i in S]) if S else 0
    return {i for i in range(len(cols)) if rank([cols[j] for j in S] + [cols[i]]) == r}


def _incident_columns(vx: Vertex, C: EllipticArrangement, k: int) -> list:
    cols = [list(C.hyperplanes[j].column) for j in vx.incident]
    if (rank(cols) if cols else 0) < k:
        raise RankDeficient("incident columns do not span")
    return cols


def nbc_subsets(vx: Vertex, C: EllipticArrangement) -> list[tuple]:
    """nbc k-subsets of the hyperplanes through ``vx``, as global index tuples.

    A sorted independent S is nbc iff s_i = min cl(s_i, ..., s_k) for each i.
    """
    k = C.k
    if k == 0:
        return [()]
    cols = _incident_columns(vx, C, k)
    out = []
    for S in itertools.combinations(range(len(cols)), k):
        if rank([cols[i] for i in S]) < k:
            continue
        if all(min(_closure(cols, S[i:])) == S[i] for i in range(k)):
            out.append(tuple(vx.incident[i] for i in S))
    return out


def local_os_dim(vx: Vertex, C: EllipticArrangement) -> int:
    return len(nbc_subsets(vx, C))


def local_os_dim_bruteforce(vx: Vertex, C: EllipticArrangement) -> int:
    """#generators - rank of the relations of the presentation by symbols."""
    k = C.k
    if k == 0:
        return 1
    if len(vx.incident) > MAX_BRUTE_INCIDENT:
        raise SizeLimit("too many incident hyperplanes for the brute-force rank")
    cols = _incident_columns(vx, C, k)
    m = len(cols)
    gens = [S for S in itertools.combinations(range(m), k) if rank([cols[i] for i in S]) == k]
    index = {S: i for i, S in enumerate(gens)}
    rels = []
    for T in itertools.combinations(range(m), k + 1):
        row = {}
        for i in range(k + 1):
            S = T[:i] + T[i + 1:]
            if S in index:
                row[index[S]] = (-1) ** i
        if row:
            rels.append(row)
    return len(gens) - sparse_rank(rels)


# ---------------------------------------------------------------------------
# convenience and admissibility

def convenience_witness(C: EllipticArrangement) -> Optional[tuple]:
    """The first hyperplane subset (by size, then lexicographically) violating convenience.

    ``()`` stands for w in Lambda^k.  Returns None when w is convenient.
    """
    if C.k == 0:
        return None
    if all(in_lambda(w) for w in C.weights):
        return ()
    for size in range(1, C.k):
        for S in itertools.combinations(range(len(C)), size):
            block = C.columns(S)
            if rank(block) < size:
                continue
            kers = kernel_basis(block)
            if all(in_lambda(sum((w * l for w, l in zip(C.weights, vec)), QPair(0)))
                   for vec in kers):
                return S
    return None


def is_convenient(C: EllipticArrangement) -> bool:
    return convenience_witness(C) is None


def _require_convenient(C):
    S = convenience_witness(C)
    if S is not None:
        what = "w lies in Lambda^k" if S == () else f"kernel weight sums of hyperplanes {list(S)} lie in Lambda"
        raise NotConvenient(f"weights are not convenient: {what}", witness=S)


def admissible_at_vertex(C: EllipticArrangement, vx: Vertex, subset: Sequence[int]) -> bool:
    """All coordinates of all solutions of a v = w for the chosen hyperplanes are nonzero."""
    if not set(subset) <= set(vx.incident):
        raise ValueError("subset must consist of hyperplanes through the vertex")
    a = C.columns(subset)
    if len(subset) != C.k or det(a) == 0:
        raise NotTransversal("subset is not k transversal hyperplanes")
    at = [list(r) for r in zip(*a)]
    return all(not e.is_zero() for p in solve_on_E(at, C.weights) for e in p)


# ---------------------------------------------------------------------------
# Betti number, deletion and restriction

def betti(C: EllipticArrangement) -> tuple[int, dict]:
    """(total, {Vertex: local OS dimension}) for the degree-k cohomology."""
    _require_convenient(C)
    per = {vx: local_os_dim(vx, C) for vx in enumerate_vertices(C)}
    return sum(per.values()), per


def delete(C: EllipticArrangement, j0: int) -> EllipticArrangement:
    hs = list(C.hyperplanes)
    hs.pop(j0)
    return EllipticArrangement(C.k, C.tau, C.weights, tuple(hs))


@dataclass(frozen=True)
class RestrictedArrangement:
    """C restricted to H_{j0}: t = z0 * W_inv[0] + p @ P.T on H_{j0}, with p in E^{k-1}."""

    arrangement: EllipticArrangement
    P: np.ndarray = field(compare=False)
    weights: tuple = ()


def restrict(C: EllipticArrangement, j0: int) -> RestrictedArrangement:
    H = C.hyperplanes[j0]
    k = C.k
    W = unimodular_complete(H.column)
    W_inv = int_inverse(W)
    P = W_inv[1:, :].T
    w_new = tuple(sum((C.weights[i] * int(P[i, p]) for i in range(k)), QPair(0))
                  for p in range(k - 1))
    hs = []
    for j, Hj in enumerate(C.hyperplanes):
        if j == j0:
            continue
        b = W_inv @ np.array(Hj.column, dtype=object)
        sub = [int(x) for x in b[1:]]
        if all(x == 0 for x in sub):
            continue  # parallel to H_{j0}, no intersection
        off = Hj.offset - H.offset * int(b[0])
        g = 0
        for x in sub:
            g = gcd(g, x)
        prim = tuple(x // g for x in sub)
        for (y,) in solve_on_E([[g]], [off]):
            h = EllipticHyperplane(prim, y)
            if h not in hs:
                hs.append(h)
    return RestrictedArrangement(EllipticArrangement(k - 1, C.tau, w_new, tuple(hs)), P, w_new)


def deletion_restriction_defect(C: EllipticArrangement, j0: int) -> int:
    """betti(C) - betti(C') - betti(C''), zero by the short exact sequence."""
    return (betti(C)[0] - betti(delete(C, j0))[0]
            - betti(restrict(C, j0).arrangement)[0])


def change_coordinates(C: EllipticArrangement, W) -> EllipticArrangement:
    """Columns c -> W^T c and weights w -> W^T w; offsets are kept."""
    W = as_int_matrix(W)
    if len(W) != C.k or abs(det(W)) != 1:
        raise NotUnimodular("W must be a unimodular k x k matrix")
    Wt = np.array(W, dtype=object).T
    hs = tuple(EllipticHyperplane(tuple(int(x) for x in Wt @ np.array(h.column, dtype=object)),
                                  h.offset) for h in C.hyperplanes)
    w = tuple(sum((C.weights[j] * W[j][i] for j in range(C.k)), QPair(0)) for i in range(C.k))
    return EllipticArrangement(C.k, C.tau, w, hs)


def translate(C: EllipticArrangement, shift: Sequence) -> EllipticArrangement:
    """Move every hyperplane by t -> t + shift."""
    shift = [EPoint.coerce(x) for x in shift]
    hs = []
    for h in C.hyperplanes:
        off = h.offset
        for c, s in zip(h.column, shift):
            off = off + s * c
        hs.append(EllipticHyperplane(h.column, off))
    return EllipticArrangement(C.k, C.tau, C.weights, tuple(hs))


# ---------------------------------------------------------------------------
# the affine oracle

def _aug_rank(eqs: list) -> tuple[int, int]:
    """(rank of coefficients, rank of the augmented matrix) over Q."""
    coef = [{j: c for j, c in enumerate(row[:-1]) if c} for row in eqs]
    aug = [{j: c for j, c in enumerate(row) if c} for row in eqs]
    return sparse_rank(coef), sparse_rank(aug)


def affine_betti(equations: Sequence, k: int) -> int:
    """b_k of the complement of affine hyperplanes sum_i c_i t_i = r in C^k.

    ``equations`` are rows ``(c_1, ..., c_k, r)``.  The flats are enumerated
    as closed hyperplane sets and b_k = sum over rank-k flats of |mu(V, X)|.
    """
    eqs = [[Fraction(x) for x in row] for row in equations]
    m = len(eqs)

    def close(S):
        r, ra = _aug_rank([eqs[i] for i in S])
        return frozenset(i for i in range(m) if _aug_rank([eqs[j] for j in S] + [eqs[i]]) == (r, ra))

    levels = [{frozenset(): 0}]
    mu = {frozenset(): 1}
    for r in range(1, k + 1):
        nxt = {}
        for X in levels[-1]:
            for i in range(m):
                if i in X:
                    continue
                S = list(X) + [i]
                cr, ra = _aug_rank([eqs[j] for j in S])
                if cr != ra or cr != r:
                    continue
                nxt.setdefault(close(S), r)
        levels.append(nxt)
        for X in nxt:
            mu[X] = -sum(v for Y, v in mu.items() if Y < X)
    return sum(abs(mu[X]) for X in levels[k])


def _discriminantal_equations(n, k, z):
    rows = []
    for i in range(k):
        for a in range(n):
            rows.append([int(r == i) for r in range(k)] + [z[a]])
    for i, j in itertools.combinations(range(k), 2):
        rows.append([1 if r == i else -1 if r == j else 0 for r in range(k)] + [0])
    return rows


def affine_moebius_betti_oracle(n: int, k: int) -> int:
    """Top Betti number of C^k minus {t_i = z_a, t_i = t_j} for generic rational z."""
    if n + k > MAX_MOEBIUS:
        raise SizeLimit(f"n + k = {n + k} exceeds {MAX_MOEBIUS}")
    b = affine_betti(_discriminantal_equations(n, k, [Fraction(a, n + 1) for a in range(1, n + 1)]), k)
    b2 = affine_betti(_discriminantal_equations(n, k, [Fraction(a * a, 2 * n + 3) for a in range(1, n + 1)]), k)
    if b != b2:
        raise RuntimeError("intersection poset is not stable under a second choice of z")
    return b


# ---------------------------------------------------------------------------
# forms at a vertex

def vertex_lift(vx: Vertex) -> tuple:
    return tuple(p.lift() for p in vx.point)


def vertex_form(C: EllipticArrangement, vx: Vertex, subset: Sequence[int], u=None):
    """Normalized form omega_{u; H_{j_1}, ..., H_{j_k}} for the ordered subset."""
    sys = C.system(subset)
    return form_at(sys, vertex_lift(vx) if u is None else u)


def vertex_forms(C: EllipticArrangement, vx: Vertex, u=None) -> list[tuple]:
    """[(subset, FormDescriptor)] over the nbc subsets at ``vx``: a basis of A^k at the vertex."""
    _require_convenient(C)
    return [(S, vertex_form(C, vx, S, u)) for S in nbc_subsets(vx, C)]


def os_relation_terms(C: EllipticArrangement, vx: Vertex, T: Sequence[int], t, u=None) -> list[complex]:
    """Values of (-1)^i omega_{u; T minus T_i} at ``t``; non-transversal terms are 0."""
    out = []
    for i in range(len(T)):
        S = tuple(T[:i]) + tuple(T[i + 1:])
        if det(C.columns(S)) == 0:
            out.append(0j)
            continue
        fd = vertex_form(C, vx, S, u)
        out.append((-1) ** (i + 1) * complex(fd.evaluate(np.asarray(t, dtype=complex))))
    return out
