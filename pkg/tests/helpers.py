"""Random generators shared by the test modules."""
from __future__ import annotations

import itertools
from fractions import Fraction
from math import gcd

import numpy as np

from ellcohom import arrangement as arr
from ellcohom.exact_lattice import EPoint, QPair, det
from ellcohom.exceptions import NotAdmissible, NotConvenient
from ellcohom.form_builder import TransversalSystem, enumerate_v_solutions


def rand_qpair(rng, den=12):
    return QPair(Fraction(int(rng.integers(0, den)), den), Fraction(int(rng.integers(0, den)), den))


def rand_tau(rng):
    return complex(rng.uniform(-0.4, 0.4), rng.uniform(0.8, 1.3))


def rand_matrix(rng, k, max_det=3, lo=-3, hi=3):
    while True:
        a = rng.integers(lo, hi + 1, size=(k, k)).tolist()
        if 1 <= abs(det(a)) <= max_det:
            return a


def rand_system(rng, k=2, max_det=3):
    """A random admissible TransversalSystem with offsets and weights in (1/12) Lambda."""
    a = rand_matrix(rng, k, max_det)
    tau = rand_tau(rng)
    while True:
        s = TransversalSystem(a, [rand_qpair(rng) for _ in range(k)],
                              [rand_qpair(rng) for _ in range(k)], tau)
        try:
            enumerate_v_solutions(s)
            return s
        except NotAdmissible:
            pass


def rand_primitive(rng, k, bound=2):
    while True:
        c = [int(x) for x in rng.integers(-bound, bound + 1, size=k)]
        g = 0
        for x in c:
            g = gcd(g, x)
        if g == 1:
            return tuple(c)


def rand_weights(rng, k):
    return tuple(QPair(Fraction(int(rng.integers(1, 13)), 13), Fraction(int(rng.integers(0, 7)), 7))
                 for _ in range(k))


def rand_arrangement(rng, k=2, n_hyperplanes=(2, 5), den=4):
    """A random arrangement in E^k (at least one vertex) with weights convenient for it."""
    while True:
        m = int(rng.integers(n_hyperplanes[0], n_hyperplanes[1] + 1))
        hs = set()
        while len(hs) < m:
            off = EPoint(Fraction(int(rng.integers(0, den)), den), Fraction(int(rng.integers(0, den)), den))
            hs.add(arr.EllipticHyperplane(rand_primitive(rng, k), off))
        hs = sorted(hs, key=lambda h: (h.column, h.offset.sort_key()))
        C = arr.EllipticArrangement(k, rand_tau(rng), rand_weights(rng, k), tuple(hs))
        if not any(det(C.columns(S)) for S in itertools.combinations(range(m), k)):
            continue
        if arr.is_convenient(C):
            return C


def fully_convenient(C, j0) -> bool:
    """C, C - H_j0 and C restricted to H_j0 all have convenient weights and stay at desk scale.

    Restricting to H_j0 can replace one H_j by many parallel copies (g^2 of
    them in E^1, g the content of the induced column), so a desk-scale C can
    have a restriction beyond desk scale.
    """
    if len(arr.restrict(C, j0).arrangement) > arr.MAX_HYPERPLANES:
        return False
    try:
        arr._require_convenient(C)
        arr._require_convenient(arr.delete(C, j0))
        arr._require_convenient(arr.restrict(C, j0).arrangement)
    except NotConvenient:
        return False
    return True


def grid_solutions(a, z):
    """Brute-force t @ a = z on E^k for square a.

    Real and tau parts decouple, and every solution has coordinates in
    (1/(|det a| q)) Z for q the common denominator of z, so it suffices to scan
    that grid in [0, 1)^k for each part separately.
    """
    k = len(a)
    d = abs(det(a))
    q = 1
    for x in z:
        q = np.lcm(np.lcm(q, x.r.denominator), x.s.denominator)
    N = int(d * q)
    grid = [Fraction(i, N) for i in range(N)]

    def part(target):
        sols = []
        for t in itertools.product(grid, repeat=k):
            if all((sum(t[i] * a[i][j] for i in range(k)) - target[j]).denominator == 1
                   for j in range(k)):
                sols.append(t)
        return sols

    re = part([x.r for x in z])
    im = part([x.s for x in z])
    return sorted((tuple(EPoint(r[i], s[i]) for i in range(k)) for r in re for s in im),
                  key=lambda p: [e.sort_key() for e in p])
