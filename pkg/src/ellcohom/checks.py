"""Numerical property checks shared by ``ellcohom verify`` and the test-suite.

Every function returns plain dicts of floats (maximal defects) so the results
can be dumped as JSON unchanged.  All randomness is drawn from the generator
passed in.
"""
from __future__ import annotations

import itertools

import numpy as np

from . import arrangement as arr
from .elliptic_core import rho_factor
from .exact_lattice import QPair, det, embed
from .exceptions import NotConvenient
from .form_builder import (BasisForm, TransversalSystem, enumerate_u_lifts, enumerate_v_solutions,
                           exponent_identity, form_at, hyperplane_residue_eval, make_vsolution,
                           normalized_forms, omega_v_eval, point_residue, restricted_form,
                           restriction_data, transition_matrix)


def _rel(x, ref) -> float:
    return float(abs(x - ref) / max(1.0, abs(ref)))


def generic_point(sys_or_tau, k: int, rng, center=None, scale=0.35):
    """A point near ``center`` (default: a random point of the fundamental domain)."""
    tau = sys_or_tau.tau if hasattr(sys_or_tau, "tau") else complex(sys_or_tau)
    if center is None:
        x, y = rng.uniform(0, 1, size=(2, k))
        return x + y * tau
    return np.asarray(center, dtype=complex) + scale * (rng.normal(size=k) + 1j * rng.normal(size=k))


def _seed(rng) -> int:
    return int(rng.integers(0, 2 ** 31))


def residue_defects(sys: TransversalSystem, rng, forms=None) -> dict:
    """|Res_{u'} omega_u - delta| and |Res_u omega_v - M(u, v)| over all pairs."""
    ulifts = enumerate_u_lifts(sys)
    vsols = enumerate_v_solutions(sys)
    M = transition_matrix(sys, ulifts, vsols)
    forms = normalized_forms(sys, ulifts, vsols) if forms is None else forms
    seed = _seed(rng)
    raw = max(_rel(point_residue(BasisForm(sys, v), u, seed=seed), M[i, j])
              for i, u in enumerate(ulifts) for j, v in enumerate(vsols))
    delta = max(abs(point_residue(fd, u, seed=seed) - float(fd.label == u))
                for fd in forms for u in ulifts)
    return {"residue_delta": float(delta), "residue_vs_M": raw}


def quasi_periodicity_defect(form, rng, n_points: int = 3) -> float:
    """max |omega(t + gamma) - rho_w(gamma) omega(t)| / |omega| over unit lattice shifts."""
    sys = form.system
    k = sys.k
    worst = 0.0
    for _ in range(n_points):
        t = generic_point(sys, k, rng)
        base = complex(form.evaluate(t))
        for i in range(k):
            for l, m in ((1, 0), (0, 1)):
                gamma = [(0, 0)] * k
                gamma[i] = (l, m)
                shift = np.zeros(k, dtype=complex)
                shift[i] = l * sys.tau + m
                lhs = complex(form.evaluate(t + shift))
                rhs = rho_factor(sys.w, gamma, sys.tau) * base
                worst = max(worst, abs(lhs - rhs) / max(abs(lhs), abs(rhs)))
    return float(worst)


def shift_law_defects(sys: TransversalSystem, rng, n_points: int = 2) -> dict:
    """Defects of the lift-shift laws for a random lattice vector lambda = l tau + m.

    u -> u + lambda multiplies the normalized form by e^{-2 pi i l.w};
    v -> v + lambda multiplies omega_v by e^{-2 pi i l.z}.
    """
    k = sys.k
    tau = sys.tau
    worst_u = worst_v = 0.0
    ulifts = enumerate_u_lifts(sys)
    vsols = enumerate_v_solutions(sys)
    for _ in range(n_points):
        l = [int(x) for x in rng.integers(-1, 2, size=k)]
        m = [int(x) for x in rng.integers(-1, 2, size=k)]
        lam = [QPair(m[i], l[i]) for i in range(k)]
        t = generic_point(sys, k, rng)
        u = ulifts[int(rng.integers(len(ulifts)))]
        f1 = complex(form_at(sys, u.u).evaluate(t))
        f2 = complex(form_at(sys, [u.u[i] + lam[i] for i in range(k)]).evaluate(t))
        ph = np.exp(-2j * np.pi * sum(l[i] * embed(sys.w[i], tau) for i in range(k)))
        worst_u = max(worst_u, abs(f2 - ph * f1) / max(abs(f2), abs(ph * f1)))
        v = vsols[int(rng.integers(len(vsols)))]
        v2 = make_vsolution(sys, [v.v[i] + lam[i] for i in range(k)])
        g1 = complex(omega_v_eval(sys, v, t))
        g2 = complex(omega_v_eval(sys, v2, t))
        ph = np.exp(-2j * np.pi * sum(l[j] * embed(sys.z[j], tau) for j in range(k)))
        worst_v = max(worst_v, abs(g2 - ph * g1) / max(abs(g2), abs(ph * g1)))
    return {"u_shift": float(worst_u), "v_shift": float(worst_v)}


def exponent_identity_defect(sys: TransversalSystem) -> float:
    worst = 0.0
    for u in enumerate_u_lifts(sys):
        for v in enumerate_v_solutions(sys):
            lhs, rhs = exponent_identity(sys, u, v)
            worst = max(worst, abs(lhs - rhs))
    return float(worst)


def hyperplane_residue_defect(sys: TransversalSystem, rng, forms=None, n_points: int = 1) -> float:
    """max over forms, j and points of |eta - (-1)^j omega'| (relative, j zero-based)."""
    if sys.k < 2:
        return 0.0
    forms = normalized_forms(sys) if forms is None else forms
    worst = 0.0
    for fd in forms:
        for j in range(sys.k):
            R = restriction_data(sys, j, fd.label)
            ref_form = restricted_form(fd, j, R)
            for _ in range(n_points):
                p = generic_point(sys, sys.k - 1, rng)
                eta = hyperplane_residue_eval(fd, j, p, restriction=R)
                ref = R.sign * complex(ref_form.evaluate(p))
                worst = max(worst, _rel(eta, ref))
    return float(worst)


def verify_system(sys: TransversalSystem, rng) -> dict:
    forms = normalized_forms(sys)
    out = residue_defects(sys, rng, forms)
    out["quasi_periodicity"] = max(quasi_periodicity_defect(fd, rng) for fd in forms)
    out.update(shift_law_defects(sys, rng))
    out["exponent_identity"] = exponent_identity_defect(sys)
    out["hyperplane_residue"] = hyperplane_residue_defect(sys, rng, forms)
    return out


def os_relation_defect(C, vx, rng, n_points: int = 3) -> float:
    """Relative size of the alternating sums over all (k+1)-subsets through ``vx``."""
    worst = 0.0
    center = [embed(p.lift(), C.tau) for p in vx.point]
    for T in itertools.combinations(vx.incident, C.k + 1):
        if all(det(C.columns(T[:i] + T[i + 1:])) == 0 for i in range(len(T))):
            continue
        for _ in range(n_points):
            t = generic_point(C.tau, C.k, rng, center=center)
            terms = arr.os_relation_terms(C, vx, T, t)
            worst = max(worst, abs(sum(terms)) / max(abs(x) for x in terms))
    return float(worst)


def verify_arrangement(C, rng) -> dict:
    """Convenience, admissibility, per-vertex residues/periodicity/OS relations, deletion-restriction."""
    out: dict = {}
    arr._require_convenient(C)
    vertices = arr.enumerate_vertices(C)
    bad_adm = 0
    for vx in vertices:
        for S in itertools.combinations(vx.incident, C.k):
            if det(C.columns(S)) != 0 and not arr.admissible_at_vertex(C, vx, S):
                bad_adm += 1
    out["non_admissible_subsets"] = bad_adm
    out["os_dim_mismatch"] = sum(arr.local_os_dim(vx, C) != arr.local_os_dim_bruteforce(vx, C)
                                 for vx in vertices)
    res = per = os_ = 0.0
    seed = _seed(rng)
    for vx in vertices:
        for S, fd in arr.vertex_forms(C, vx):
            res = max(res, abs(point_residue(fd, fd.label, seed=seed) - 1))
            per = max(per, quasi_periodicity_defect(fd, rng, n_points=1))
        if len(vx.incident) > C.k:
            os_ = max(os_, os_relation_defect(C, vx, rng))
    out["vertex_residue"] = float(res)
    out["quasi_periodicity"] = float(per)
    out["os_relation"] = float(os_)
    dr = {}
    for j0 in range(len(C)):
        try:
            dr[str(j0)] = arr.deletion_restriction_defect(C, j0)
        except NotConvenient:
            dr[str(j0)] = None
    out["deletion_restriction"] = dr
    return out


# keys whose values are exact counts rather than floating defects
EXACT_KEYS = ("non_admissible_subsets", "os_dim_mismatch", "deletion_restriction")


def failures(report: dict, tol: float) -> list[str]:
    bad = []
    for key, val in report.items():
        if key in EXACT_KEYS:
            vals = val.values() if isinstance(val, dict) else [val]
            if any(v not in (0, None) for v in vals):
                bad.append(key)
        elif isinstance(val, float) and not val <= tol:
            bad.append(key)
    return bad
