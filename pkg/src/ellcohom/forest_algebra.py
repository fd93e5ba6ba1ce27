"""Admissible ordered forests, the triangle relations, and their rational and theta forms.

Vertices are integers: ``0 .. n-1`` stand for z_1 .. z_n and ``n .. n+k-1``
for t_1 .. t_k, so the natural integer order puts every z before every t.
A forest is admissible when all t's occur and each component carries exactly
one z; the edges are then oriented away from that root, and for an edge e the
head h(e) is the endpoint farther from the root, the tail t(e) the closer one.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import factorial
from typing import Sequence

import numpy as np

from . import elliptic_core
from .exact_lattice import QPair, det, embed, in_lambda, sparse_rank
from .exceptions import MalformedForest, NearSingular, NotConvenient, OnHyperplane, SizeLimit

MAX_SIZE = 9


def vertex_name(v: int, n: int) -> str:
    return f"z{v + 1}" if v < n else f"t{v - n + 1}"


@dataclass(frozen=True)
class Forest:
    n: int
    k: int
    edges: tuple

    def __post_init__(self):
        object.__setattr__(self, "edges",
                           tuple(tuple(sorted((int(a), int(b)))) for a, b in self.edges))

    def __repr__(self):
        es = ", ".join(f"{vertex_name(a, self.n)}-{vertex_name(b, self.n)}" for a, b in self.edges)
        return f"Forest(n={self.n}, k={self.k}: {es})"


def _components(F: Forest):
    parent = list(range(F.n + F.k))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in F.edges:
        ra, rb = find(a), find(b)
        if ra == rb:
            raise MalformedForest(f"{F!r} contains a cycle")
        parent[ra] = rb
    return find


def check_structure(F: Forest) -> None:
    if len(F.edges) != F.k:
        raise MalformedForest(f"expected {F.k} edges, got {len(F.edges)}")
    for a, b in F.edges:
        if a == b or not (0 <= a < F.n + F.k and 0 <= b < F.n + F.k):
            raise MalformedForest(f"bad edge {(a, b)}")
    _components(F)


def is_admissible(F: Forest) -> bool:
    check_structure(F)
    find = _components(F)
    touched = {v for e in F.edges for v in e}
    if any(F.n + i not in touched for i in range(F.k)):
        return False
    roots = {}
    for v in touched:
        if v < F.n:
            r = find(v)
            if r in roots:
                return False
            roots[r] = v
    return all(find(v) in roots for v in touched)


def canonicalize(F: Forest) -> tuple[Forest, int]:
    """Sort the edges lexicographically; the sign is the parity of the sort."""
    order = sorted(range(len(F.edges)), key=lambda i: F.edges[i])
    sign = 1
    seen = [False] * len(order)
    for i in range(len(order)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = order[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return Forest(F.n, F.k, tuple(F.edges[i] for i in order)), sign


def parents(F: Forest) -> dict:
    """Map each non-root vertex to its neighbour towards the component's z-vertex."""
    adj: dict = {}
    for a, b in F.edges:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    par = {}
    for root in (v for v in adj if v < F.n):
        stack = [root]
        seen = {root}
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    par[y] = x
                    stack.append(y)
    return par


def oriented_edges(F: Forest) -> list[tuple[int, int]]:
    """(head, tail) for each edge in order."""
    par = parents(F)
    out = []
    for a, b in F.edges:
        out.append((a, b) if par.get(a) == b else (b, a))
    return out


def _check_size(n, k):
    if n < 1 or k < 1:
        raise ValueError("n and k must be positive")
    if n + k > MAX_SIZE:
        raise SizeLimit(f"n + k = {n + k} exceeds {MAX_SIZE}")


def generate_admissible(n: int, k: int) -> list[Forest]:
    """All admissible forests, one canonical representative per underlying graph.

    Each admissible forest is the set of edges {t, parent(t)} of a parent map on
    t_1..t_k whose chains all end in a z-vertex.
    """
    _check_size(n, k)
    out = []
    par = [None] * k

    def ends_in_root(i):
        seen = set()
        v = n + i
        while v >= n:
            if v in seen:
                return False
            seen.add(v)
            p = par[v - n]
            if p is None:
                return True
            v = p
        return True

    def rec(i):
        if i == k:
            edges = sorted(tuple(sorted((n + j, par[j]))) for j in range(k))
            out.append(Forest(n, k, tuple(edges)))
            return
        for p in range(n + k):
            if p == n + i:
                continue
            par[i] = p
            if ends_in_root(i):
                rec(i + 1)
        par[i] = None

    rec(0)
    return sorted(out, key=lambda F: F.edges)


def _relation_key(terms: dict):
    items = sorted((F.edges, c) for F, c in terms.items() if c != 0)
    if not items:
        return None
    if items[0][1] < 0:
        items = [(e, -c) for e, c in items]
    return tuple(items)


def r2_instances(n: int, k: int, validate: bool = True, seed: int = 0) -> list[dict]:
    """Signed triangle relations, each a dict ``{canonical Forest: coefficient}``.

    For every admissible forest and every pair of positions (a, b) whose edges
    share a vertex c (edge a = {c, L}, edge b = {c, R}) the relation is

        {cL: a, cR: b} + {LR: a, cL: b} + {cR: a, LR: b} = 0,

    all other edges unchanged.  With ``validate`` each relation is checked to
    vanish under the rational representation at random points.
    """
    _check_size(n, k)
    seen = set()
    out = []
    for F in generate_admissible(n, k):
        edges = list(F.edges)
        for a, b in itertools.permutations(range(k), 2):
            shared = set(edges[a]) & set(edges[b])
            if not shared:
                continue
            (c,) = shared
            L = edges[a][0] if edges[a][1] == c else edges[a][1]
            R = edges[b][0] if edges[b][1] == c else edges[b][1]
            terms: dict = {}
            for ea, eb in (((c, L), (c, R)), ((L, R), (c, L)), ((c, R), (L, R))):
                new = edges[:]
                new[a], new[b] = ea, eb
                G, sign = canonicalize(Forest(n, k, tuple(new)))
                terms[G] = terms.get(G, 0) + sign
            key = _relation_key(terms)
            if key is None or key in seen:
                continue
            seen.add(key)
            out.append({Forest(n, k, e): c for e, c in key})
    if validate:
        _validate_relations(n, k, out, seed)
    return out


def _validate_relations(n, k, relations, seed, tol=1e-10, n_points=3):
    rng = np.random.default_rng(seed)
    for _ in range(n_points):
        z = list(rng.normal(size=n) + 1j * rng.normal(size=n))
        t = list(rng.normal(size=k) + 1j * rng.normal(size=k))
        for rel in relations:
            vals = [c * phi_rat_eval(F, z, t) for F, c in rel.items()]
            if abs(sum(vals)) > tol * max(abs(v) for v in vals):
                raise RuntimeError(f"triangle relation fails the rational check: {rel}")


def forest_space_dim(n: int, k: int, validate: bool = True) -> int:
    """dim of the span of admissible forests modulo the sign and triangle relations."""
    gens = generate_admissible(n, k)
    index = {F: i for i, F in enumerate(gens)}
    rels = r2_instances(n, k, validate=validate)
    r = sparse_rank({index[F]: c for F, c in rel.items()} for rel in rels)
    return len(gens) - r


def sv_formula_dim(n: int, k: int) -> int:
    """sum over m_1 + ... + m_n = k of m_1! ... m_n! (the closed form quoted from [SV])."""
    total = 0
    for ms in itertools.product(range(k + 1), repeat=n):
        if sum(ms) == k:
            p = 1
            for m in ms:
                p *= factorial(m)
            total += p
    return total


def rising_factorial_dim(n: int, k: int) -> int:
    """n (n+1) ... (n+k-1), the top Betti number of the affine discriminantal complement."""
    p = 1
    for i in range(k):
        p *= n + i
    return p


def branch(F: Forest, v: int) -> set:
    par = parents(F)
    out = {v}
    for x in par:
        y = x
        while y in par:
            if y == v:
                break
            y = par[y]
        if y == v:
            out.add(x)
    return out


def load(F: Forest, v: int, w: Sequence) -> QPair:
    """Sum of weights of t-vertices in the branch of ``v`` (z-vertices weigh 0)."""
    return sum((QPair.coerce(w[x - F.n]) for x in branch(F, v) if x >= F.n), QPair(0))


def pattern_det(F: Forest) -> int:
    """det of the rows d(h(e_i) - t(e_i)) in the basis dt_1, ..., dt_k."""
    rows = []
    for h, tl in oriented_edges(F):
        row = [0] * F.k
        if h >= F.n:
            row[h - F.n] += 1
        if tl >= F.n:
            row[tl - F.n] -= 1
        rows.append(row)
    return det(rows)


def _coords(F, z, t):
    def val(v):
        return z[v] if v < F.n else t[v - F.n]
    return val


def phi_rat_eval(F: Forest, z: Sequence[complex], t: Sequence[complex]) -> complex:
    """Coefficient of dt_1 ^ ... ^ dt_k in the wedge of d log(h(e_i) - t(e_i))."""
    val = _coords(F, [complex(x) for x in z], [complex(x) for x in t])
    prod = 1
    for h, tl in oriented_edges(F):
        d = val(h) - val(tl)
        if d == 0:
            raise OnHyperplane(f"t lies on the hyperplane {vertex_name(h, F.n)} = {vertex_name(tl, F.n)}")
        prod *= d
    return pattern_det(F) / prod


def discriminantal_witness(w: Sequence):
    """First nonempty index subset whose weight sum lies in Lambda, or None."""
    w = [QPair.coerce(x) for x in w]
    for size in range(1, len(w) + 1):
        for I in itertools.combinations(range(len(w)), size):
            if in_lambda(sum((w[i] for i in I), QPair(0))):
                return I
    return None


def is_discriminantal_convenient(w: Sequence) -> bool:
    return discriminantal_witness(w) is None


def phi_theta_eval(F: Forest, z: Sequence, w: Sequence, tau, t: Sequence[complex]) -> complex:
    """Coefficient of dt_1 ^ ... ^ dt_k in the wedge of sigma_{L(h)}(h - t) d(h - t)."""
    witness = discriminantal_witness(w)
    if witness is not None:
        raise NotConvenient(f"weights over {tuple(i + 1 for i in witness)} sum into the lattice",
                            witness=witness)
    zc = [embed(x, tau) for x in z]
    val = _coords(F, zc, [complex(x) for x in t])
    prod = complex(pattern_det(F))
    for h, tl in oriented_edges(F):
        weight = embed(load(F, h, w), tau)
        try:
            prod *= elliptic_core.sigma(weight, val(h) - val(tl), tau)
        except NearSingular as exc:
            raise OnHyperplane(str(exc)) from exc
    return prod
