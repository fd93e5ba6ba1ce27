"""Theta-product forms attached to k transversal elliptic hyperplanes.

The hyperplanes are sum_i t_i a[i, j] = z_j on E^k.  Lifts u of their common
points satisfy u @ a = A tau + B + z; solutions v of the dual system satisfy
a @ v = C tau + D + w.  Each v gives the form

    omega_v(t) = det(a) e^{-2 pi i C.t} prod_j sigma_{v_j}(sum_i t_i a[i, j] - z_j) dt_1 ^ ... ^ dt_k

whose iterated residue at u is M(u, v) = e^{2 pi i sum_i (A_i v_i - C_i u_i)}.
Solving M c = e_u gives the normalized form with residue delta_{u, u'}.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import elliptic_core
from ._numerics import limit_richardson
from .exact_lattice import (EPoint, QPair, as_int_matrix, det, embed, in_lambda,
                            int_inverse, lattice_split, solve_on_E, unimodular_complete)
from .exceptions import (BadDirection, Degenerate, DegenerateM, NearSingular,
                         NotAdmissible, OnHyperplane)

TWO_PI_I = 2j * np.pi
DET_FLOOR = 1e-10


@dataclass(frozen=True, eq=False)
class TransversalSystem:
    """k hyperplanes sum_i t_i a[i, j] = z_j with weights w and modulus tau."""

    a: tuple
    z: tuple
    w: tuple
    tau: complex

    def __post_init__(self):
        a = as_int_matrix(self.a)
        k = len(a)
        if any(len(row) != k for row in a):
            raise ValueError("coefficient matrix must be square")
        if len(self.z) != k or len(self.w) != k:
            raise ValueError("need k offsets and k weights")
        object.__setattr__(self, "a", tuple(tuple(row) for row in a))
        object.__setattr__(self, "z", tuple(QPair.coerce(x) for x in self.z))
        object.__setattr__(self, "w", tuple(QPair.coerce(x) for x in self.w))
        object.__setattr__(self, "tau", elliptic_core.check_tau(self.tau))
        if det(a) == 0:
            raise Degenerate("det a = 0")

    @property
    def k(self) -> int:
        return len(self.a)

    @property
    def det(self) -> int:
        return det(self.a)

    def column(self, j):
        return [self.a[i][j] for i in range(self.k)]

    def linear_forms(self, x):
        """sum_i x_i a[i, j] for each j; ``x`` has shape (..., k)."""
        return np.asarray(x, dtype=complex) @ np.array(self.a, dtype=float)


@dataclass(frozen=True)
class ULift:
    u: tuple
    A: tuple
    B: tuple


@dataclass(frozen=True)
class VSolution:
    v: tuple
    C: tuple
    D: tuple


def make_ulift(sys: TransversalSystem, u: Sequence) -> ULift:
    """Attach the integers A, B to an exact lift ``u`` of a common point."""
    u = tuple(QPair.coerce(x) for x in u)
    A, B = [], []
    for j in range(sys.k):
        lhs = sum((u[i] * sys.a[i][j] for i in range(sys.k)), QPair(0))
        a_j, b_j = lattice_split(lhs - sys.z[j])
        A.append(a_j)
        B.append(b_j)
    return ULift(u, tuple(A), tuple(B))


def make_vsolution(sys: TransversalSystem, v: Sequence) -> VSolution:
    v = tuple(QPair.coerce(x) for x in v)
    C, D = [], []
    for i in range(sys.k):
        lhs = sum((sys.a[i][j] * v[j] for j in range(sys.k)), QPair(0))
        c_i, d_i = lattice_split(lhs - sys.w[i])
        C.append(c_i)
        D.append(d_i)
    return VSolution(v, tuple(C), tuple(D))


def enumerate_u_lifts(sys: TransversalSystem) -> list[ULift]:
    """One lift per common point on E^k, taken in the fundamental square."""
    pts = solve_on_E(sys.a, sys.z)
    return [make_ulift(sys, [e.lift() for e in p]) for p in pts]


def enumerate_v_solutions(sys: TransversalSystem) -> list[VSolution]:
    at = [list(col) for col in zip(*sys.a)]
    pts = solve_on_E(at, sys.w)
    for p in pts:
        if any(e.is_zero() for e in p):
            raise NotAdmissible(f"dual solution {p} has a zero coordinate")
    return [make_vsolution(sys, [e.lift() for e in p]) for p in pts]


def is_admissible(sys: TransversalSystem) -> bool:
    try:
        enumerate_v_solutions(sys)
    except NotAdmissible:
        return False
    return True


def omega_v_eval(sys: TransversalSystem, vs: VSolution, t) -> np.ndarray:
    """Coefficient of dt_1 ^ ... ^ dt_k of omega_v at ``t`` (shape (..., k))."""
    t = np.asarray(t, dtype=complex)
    tau = sys.tau
    ell = sys.linear_forms(t) - np.array([embed(x, tau) for x in sys.z])
    phase = np.exp(-TWO_PI_I * (t @ np.array(vs.C, dtype=float)))
    out = sys.det * phase
    try:
        for j in range(sys.k):
            out = out * elliptic_core.sigma(embed(vs.v[j], tau), ell[..., j], tau)
    except NearSingular as exc:
        raise OnHyperplane("t lies on a lifted hyperplane") from exc
    return out


@dataclass(frozen=True)
class BasisForm:
    """A single omega_v, with the same evaluation interface as FormDescriptor."""

    system: TransversalSystem
    vsol: VSolution

    def evaluate(self, t):
        return omega_v_eval(self.system, self.vsol, t)


def transition_exponent(u: ULift, v: VSolution) -> QPair:
    """sum_i (A_i v_i - C_i u_i), exactly."""
    return sum((v.v[i] * u.A[i] - u.u[i] * v.C[i] for i in range(len(u.u))), QPair(0))


def _exp_qpair(x: QPair, tau) -> complex:
    r = x.r - (x.r.numerator // x.r.denominator)
    return complex(np.exp(TWO_PI_I * embed(QPair(r, x.s), tau)))


def transition_matrix(sys: TransversalSystem, ulifts, vsolutions, check: bool = True) -> np.ndarray:
    """M[u, v] = e^{2 pi i sum_i (A_i v_i - C_i u_i)}, rows indexed by ``ulifts``."""
    M = np.array([[_exp_qpair(transition_exponent(u, v), sys.tau) for v in vsolutions]
                  for u in ulifts], dtype=complex)
    if check and _hadamard_ratio(M) <= DET_FLOOR:
        raise DegenerateM("transition matrix is numerically singular")
    return M


def _hadamard_ratio(M: np.ndarray) -> float:
    """|det M| over the product of row norms, after scaling every column to unit norm.

    Invariant under rescaling rows and columns, so large but harmless
    exponentials e^{2 pi i C.u} do not trigger the degeneracy check.
    """
    Mc = M / np.linalg.norm(M, axis=0)
    return float(abs(np.linalg.det(Mc)) / np.prod(np.linalg.norm(Mc, axis=1)))


def exponent_identity(sys: TransversalSystem, u: ULift, v: VSolution):
    """Both sides of sum(A_i v_i - C_i u_i) = sum(A_i v_iR - B_i v_itau) + sum(u_i w_itau - z_i v_itau).

    Returned as complex numbers, with the real/tau splits computed numerically
    from the embedded values.
    """
    tau = sys.tau
    k = sys.k
    ve = [embed(x, tau) for x in v.v]
    ue = [embed(x, tau) for x in u.u]
    ze = [embed(x, tau) for x in sys.z]
    we = [embed(x, tau) for x in sys.w]
    split_v = [elliptic_core.split_real_tau(x, tau) for x in ve]
    split_w = [elliptic_core.split_real_tau(x, tau) for x in we]
    lhs = sum(u.A[i] * ve[i] - v.C[i] * ue[i] for i in range(k))
    rhs = sum(u.A[i] * split_v[i][0] - u.B[i] * split_v[i][1] for i in range(k))
    rhs += sum(ue[i] * split_w[i][1] - ze[i] * split_v[i][1] for i in range(k))
    return complex(lhs), complex(rhs)


def exponent_identity_exact(sys: TransversalSystem, u: ULift, v: VSolution) -> bool:
    lhs = transition_exponent(u, v)
    rhs = QPair(0)
    for i in range(sys.k):
        rhs = rhs + QPair(u.A[i] * v.v[i].r - u.B[i] * v.v[i].s, 0)
        rhs = rhs + u.u[i] * sys.w[i].s - sys.z[i] * v.v[i].s
    return lhs == rhs


@dataclass(frozen=True, eq=False)
class FormDescriptor:
    """The normalized form sum_v coeffs[v] omega_v with residue 1 at ``label`` only."""

    system: TransversalSystem
    label: ULift
    basis: tuple
    coeffs: np.ndarray
    condition: float = field(default=float("nan"))

    def evaluate(self, t):
        out = 0
        for c, vs in zip(self.coeffs, self.basis):
            out = out + c * omega_v_eval(self.system, vs, t)
        return out

    def to_json(self) -> dict:
        s = self.system
        return {
            "k": s.k,
            "tau": [s.tau.real, s.tau.imag],
            "a": [list(row) for row in s.a],
            "z": [x.to_json() for x in s.z],
            "w": [x.to_json() for x in s.w],
            "u": [x.to_json() for x in self.label.u],
            "A": list(self.label.A),
            "B": list(self.label.B),
            "basis": [{"v": [x.to_json() for x in vs.v], "C": list(vs.C), "D": list(vs.D)}
                      for vs in self.basis],
            "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, data: dict) -> "FormDescriptor":
        sys = TransversalSystem(
            a=data["a"], z=[QPair.from_json(p) for p in data["z"]],
            w=[QPair.from_json(p) for p in data["w"]], tau=complex(*data["tau"]))
        label = make_ulift(sys, [QPair.from_json(p) for p in data["u"]])
        if list(label.A) != list(data["A"]) or list(label.B) != list(data["B"]):
            raise ValueError("A, B do not match the lift u")
        basis = []
        for item in data["basis"]:
            vs = make_vsolution(sys, [QPair.from_json(p) for p in item["v"]])
            if list(vs.C) != list(item["C"]) or list(vs.D) != list(item["D"]):
                raise ValueError("C, D do not match the dual solution v")
            basis.append(vs)
        coeffs = np.array([complex(re, im) for re, im in data["coeffs"]])
        return cls(sys, label, tuple(basis), coeffs)


def normalized_forms(sys: TransversalSystem, ulifts=None, vsolutions=None) -> list[FormDescriptor]:
    """One FormDescriptor per lift u, with coefficients solving M c_u = e_u."""
    ulifts = enumerate_u_lifts(sys) if ulifts is None else list(ulifts)
    vsolutions = enumerate_v_solutions(sys) if vsolutions is None else list(vsolutions)
    M = transition_matrix(sys, ulifts, vsolutions)
    X = np.linalg.solve(M, np.eye(len(ulifts), dtype=complex))
    cond = float(np.linalg.cond(M))
    return [FormDescriptor(sys, u, tuple(vsolutions), X[:, i].copy(), cond)
            for i, u in enumerate(ulifts)]


def replace_lift(sys: TransversalSystem, ulifts, u) -> list[ULift]:
    """Swap the lift lying over the same point of E^k as ``u`` for ``u`` itself."""
    new = u if isinstance(u, ULift) else make_ulift(sys, u)
    target = tuple(x.reduce() for x in new.u)
    out, hit = [], False
    for old in ulifts:
        if tuple(x.reduce() for x in old.u) == target:
            out.append(new)
            hit = True
        else:
            out.append(old)
    if not hit:
        raise ValueError("u does not lie over a common point of the system")
    return out


def form_at(sys: TransversalSystem, u) -> FormDescriptor:
    """The normalized form labelled by the exact lift ``u``."""
    new = u if isinstance(u, ULift) else make_ulift(sys, u)
    ulifts = replace_lift(sys, enumerate_u_lifts(sys), new)
    return next(fd for fd in normalized_forms(sys, ulifts) if fd.label == new)


# ---------------------------------------------------------------------------
# numerical residues

def _direction(a_cols: np.ndarray, rng, tries=100, floor=1e-3):
    norms = np.linalg.norm(a_cols, axis=0)
    for _ in range(tries):
        d = rng.normal(size=a_cols.shape[0]) + 1j * rng.normal(size=a_cols.shape[0])
        d /= np.linalg.norm(d)
        if np.all(np.abs(d @ a_cols) >= floor * norms):
            return d
    raise BadDirection(f"no admissible direction in {tries} draws")


def point_residue(form, u, eps: float = 1e-3, seed: int = 0,
                  levels: int = 1, symmetric: bool = True) -> complex:
    """Iterated residue of ``form`` at the lift ``u`` along a random complex line.

    f(h) = g(u + h d) prod_j l_j(h d) / det(a) with l_j the linear parts of the
    hyperplane equations.  The limit h -> 0 is extrapolated from h = +-eps,
    +-eps/2; ``symmetric=False, levels=1`` is the plain step 2 f(eps/2) - f(eps),
    which is only good to about 1e-4 here.
    """
    sys = form.system
    uq = u.u if isinstance(u, ULift) else tuple(QPair.coerce(x) for x in u)
    base = np.array([embed(x, sys.tau) for x in uq])
    a = np.array(sys.a, dtype=float)
    d = _direction(a, np.random.default_rng(seed))
    lin = d @ a

    def f(h):
        return complex(form.evaluate(base + h * d) * np.prod(h * lin) / sys.det)

    return limit_richardson(f, eps, levels=levels, symmetric=symmetric)


def residue_matrix(sys: TransversalSystem, ulifts, vsolutions, **kw) -> np.ndarray:
    return np.array([[point_residue(BasisForm(sys, v), u, **kw) for v in vsolutions]
                     for u in ulifts])


# ---------------------------------------------------------------------------
# residues along a hyperplane

@dataclass(frozen=True, eq=False)
class Restriction:
    """Coordinates s = t @ W adapted to the lifted hyperplane H through u.

    H is sum_i t_i a[i, j] = A_j tau + B_j + z_j; with g the content of column
    j and W unimodular with first column a[:, j] / g, H reads s_1 = ``level``
    and (s_2, ..., s_k) are coordinates on it.
    """

    system: TransversalSystem
    j: int
    content: int
    W: np.ndarray
    W_inv: np.ndarray
    level: QPair
    sub: Optional[TransversalSystem]
    sub_lift: Optional[ULift]

    @property
    def sign(self) -> int:
        return -1 if self.j % 2 else 1

    def point(self, p, delta=0.0) -> np.ndarray:
        """t for s = (level + delta, p)."""
        tau = self.system.tau
        s = np.concatenate([[embed(self.level, tau) + delta], np.asarray(p, dtype=complex)])
        return s @ self.W_inv.astype(float)

    def tangent_lift(self, gamma_p) -> list[tuple[int, int]]:
        """Lattice vector of E^k (as (l, m) pairs) for a shift of the H-coordinates."""
        l_p = np.array([0] + [g[0] for g in gamma_p], dtype=object)
        m_p = np.array([0] + [g[1] for g in gamma_p], dtype=object)
        lt = l_p @ self.W_inv
        mt = m_p @ self.W_inv
        return [(int(x), int(y)) for x, y in zip(lt, mt)]


def restriction_data(sys: TransversalSystem, j: int, u: ULift) -> Restriction:
    from math import gcd

    col = sys.column(j)
    g = 0
    for x in col:
        g = gcd(g, x)
    W = unimodular_complete([x // g for x in col])
    W_inv = int_inverse(W)
    level = (QPair(u.B[j], u.A[j]) + sys.z[j]) / g
    k = sys.k
    if k == 1:
        return Restriction(sys, j, g, W, W_inv, level, None, None)
    b = W_inv @ np.array(sys.a, dtype=object)
    others = [i for i in range(k) if i != j]
    sub_a = [[int(b[p, i]) for i in others] for p in range(1, k)]
    sub_z = [sys.z[i] - level * int(b[0, i]) for i in others]
    w_t = [sum((sys.w[i] * int(W_inv[p, i]) for i in range(k)), QPair(0)) for p in range(k)]
    sub = TransversalSystem(sub_a, sub_z, w_t[1:], sys.tau)
    s_u = [sum((u.u[i] * int(W[i, p]) for i in range(k)), QPair(0)) for p in range(k)]
    assert s_u[0] == level
    return Restriction(sys, j, g, W, W_inv, level, sub, make_ulift(sub, s_u[1:]))


def hyperplane_residue_eval(fd, j: int, p, eps: float = 1e-4, levels: int = 2,
                            symmetric: bool = True, restriction=None) -> complex:
    """Coefficient of the residue of ``fd`` along the lifted H_j through fd.label.

    Uses the convention omega = (d l_j / l_j) ^ eta + regular, and returns the
    coefficient of eta in ds_2 ^ ... ^ ds_k at the point with H-coordinates ``p``.
    """
    R = restriction or restriction_data(fd.system, j, fd.label)
    jac = float(det(R.W_inv))

    def f(delta):
        return complex(delta * fd.evaluate(R.point(p, delta)) * jac)

    return limit_richardson(f, eps, levels=levels, symmetric=symmetric)


def restricted_form(fd: FormDescriptor, j: int, restriction=None):
    """The normalized form of the induced system on H_j at the matching lift (None if k = 1)."""
    R = restriction or restriction_data(fd.system, j, fd.label)
    if R.sub is None:
        return None
    return form_at(R.sub, R.sub_lift)
