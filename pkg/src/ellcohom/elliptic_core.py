"""Double-precision theta function, the sigma kernel and local-system phases.

theta(z, tau) = i e^{pi i (tau/4 - z)} (x; q) (q/x; q) (q; q) with
q = e^{2 pi i tau}, x = e^{2 pi i z}; it is odd, theta(z + 1) = -theta(z) and
theta(z + tau) = -e^{-pi i tau - 2 pi i z} theta(z).

sigma_w(t) = theta(w - t) theta'(0) / (theta(w) theta(t)) is 1-periodic in t,
picks up e^{2 pi i w} under t -> t + tau, and has residue 1 at t = 0.
"""
from __future__ import annotations

import math
import warnings
from typing import Sequence

import numpy as np

from ._numerics import limit_richardson
from .exact_lattice import QPair, embed
from .exceptions import (DimensionMismatch, InvalidModularParam, NearSingular,
                         PrecisionLossWarning)

TWO_PI_I = 2j * np.pi
NEAR_SINGULAR = 1e-13


def check_tau(tau) -> complex:
    tau = complex(tau)
    if not tau.imag > 0:
        raise InvalidModularParam(f"Im(tau) must be positive, got {tau}")
    if abs(np.exp(TWO_PI_I * tau)) > 0.9:
        warnings.warn(f"|q| > 0.9 for tau={tau}; theta product converges slowly",
                      PrecisionLossWarning, stacklevel=3)
    return tau


def truncation_depth(tau: complex, margin: int = 5) -> int:
    """Last index j kept in the products (1 - y q^j)."""
    aq = abs(np.exp(TWO_PI_I * complex(tau)))
    return math.ceil(17 / -math.log10(aq)) + margin


def theta(z, tau, margin: int = 5):
    """First Jacobi theta function as a truncated triple product.

    Each factor 1 - e^{2 pi i c} is formed as -expm1(2 pi i c) so that the
    value stays accurate next to its zeros.  Accepts scalar or array ``z``.
    """
    tau = check_tau(tau)
    z = np.asarray(z, dtype=complex)
    j = np.arange(truncation_depth(tau, margin) + 1)
    zz = z[..., None]
    f1 = -np.expm1(TWO_PI_I * (zz + j * tau))
    f2 = -np.expm1(TWO_PI_I * ((j + 1) * tau - zz))
    f3 = -np.expm1(TWO_PI_I * (j + 1) * tau)
    val = 1j * np.exp(1j * np.pi * (tau / 4 - z)) * np.prod(f1 * f2 * f3, axis=-1)
    return val[()] if val.ndim == 0 else val


def theta_prime_zero(tau, margin: int = 5) -> complex:
    """d/dz theta(z, tau) at z = 0, i.e. 2 pi e^{pi i tau/4} prod_{j>=1} (1 - q^j)^3."""
    tau = check_tau(tau)
    j = np.arange(1, truncation_depth(tau, margin) + 2)
    f = -np.expm1(TWO_PI_I * j * tau)
    return complex(2 * np.pi * np.exp(1j * np.pi * tau / 4) * np.prod(f ** 3))


def sigma(w, t, tau):
    """sigma_w(t, tau); raises NearSingular when w or t sits on the lattice."""
    tau = check_tau(tau)
    tp = theta_prime_zero(tau)
    w = np.asarray(w, dtype=complex)
    t = np.asarray(t, dtype=complex)
    th_w = theta(w, tau)
    th_t = theta(t, tau)
    floor = NEAR_SINGULAR * abs(tp)
    if np.any(np.abs(th_w) < floor) or np.any(np.abs(th_t) < floor):
        raise NearSingular("sigma evaluated at a lattice point")
    out = theta(w - t, tau) * tp / (th_w * th_t)
    return out[()] if np.ndim(out) == 0 else out


def three_term_defect(w1, w2, t, s, u, tau) -> float:
    """Relative defect of the three-term sigma identity.

    sigma_{w1+w2}(t-u) sigma_{w2}(s-t) - sigma_{w2}(s-u) sigma_{w1}(t-u)
    + sigma_{w1}(t-s) sigma_{w1+w2}(s-u), divided by its largest term.
    """
    terms = [
        sigma(w1 + w2, t - u, tau) * sigma(w2, s - t, tau),
        -sigma(w2, s - u, tau) * sigma(w1, t - u, tau),
        sigma(w1, t - s, tau) * sigma(w1 + w2, s - u, tau),
    ]
    return float(abs(sum(terms)) / max(abs(x) for x in terms))


def rho_factor(w: Sequence, gamma: Sequence, tau=None) -> complex:
    """e^{2 pi i sum_i w_i l_i} for the lattice vector gamma_i = l_i tau + m_i.

    ``gamma`` is given as ((l_1, m_1), ..., (l_k, m_k)); only the tau-parts
    carry monodromy.

    Exact weights (QPair) have the rational part of the exponent reduced
    mod 1 before exponentiating and need ``tau``; complex weights are used as is.
    """
    if len(w) != len(gamma):
        raise DimensionMismatch(f"{len(w)} weights but gamma has {len(gamma)} entries")
    ls = [int(g[0]) for g in gamma]
    if all(isinstance(x, QPair) for x in w):
        expo = sum((x * l for x, l in zip(w, ls)), QPair(0))
        frac_r = expo.r - (expo.r.numerator // expo.r.denominator)
        if expo.s == 0:
            return complex(np.exp(TWO_PI_I * float(frac_r)))
        if tau is None:
            raise ValueError("tau is needed to embed weights with a tau-component")
        return complex(np.exp(TWO_PI_I * embed(QPair(frac_r, expo.s), tau)))
    expo = sum(complex(x) * l for x, l in zip(w, ls))
    return complex(np.exp(TWO_PI_I * expo))


def split_real_tau(c, tau) -> tuple[float, float]:
    """Write c = c_R + tau * c_tau with real c_R, c_tau."""
    c, tau = complex(c), complex(tau)
    if tau.imag == 0:
        raise InvalidModularParam("tau must not be real")
    c_tau = c.imag / tau.imag
    return c.real - tau.real * c_tau, c_tau


def sigma_residue(w, tau, eps: float = 1e-3) -> complex:
    """Numerical residue of sigma_w at t = 0 via symmetric Richardson extrapolation."""
    return limit_richardson(lambda h: h * sigma(w, h, tau), eps, levels=2, symmetric=True)


def _random_generic(rng, tau, n, avoid=0.08):
    """Points in the fundamental parallelogram kept ``avoid`` away from lattice points."""
    out = []
    while len(out) < n:
        a, b = rng.uniform(-0.5, 0.5, size=2)
        if min(abs(a), abs(b)) > avoid:
            out.append(a + b * tau)
    return out


def _lattice_distance(x, tau):
    xr, xt = split_real_tau(x, tau)
    return max(abs(xr - round(xr)), abs(xt - round(xt)))


def identity_sweep(n_samples: int = 1000, seed: int = 42,
                   im_range=(0.5, 2.0)) -> dict:
    """Maximal relative defects of the theta/sigma identities over random samples."""
    rng = np.random.default_rng(seed)
    worst = dict.fromkeys(["theta_odd", "theta_period_1", "theta_period_tau",
                           "sigma_period_1", "sigma_period_tau", "sigma_residue",
                           "three_term"], 0.0)

    def bump(key, val):
        worst[key] = max(worst[key], float(val))

    for _ in range(n_samples):
        tau = complex(rng.uniform(-0.5, 0.5), rng.uniform(*im_range))
        z = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        th = theta(z, tau)
        scale = max(abs(th), 1e-300)
        bump("theta_odd", abs(theta(-z, tau) + th) / scale)
        bump("theta_period_1", abs(theta(z + 1, tau) + th) / scale)
        shifted = theta(z + tau, tau)
        mult = np.exp(-1j * np.pi * tau - TWO_PI_I * z) * th
        bump("theta_period_tau", abs(shifted + mult) / max(abs(shifted), abs(mult)))

        while True:
            w1, w2, t, s, u = _random_generic(rng, tau, 5)
            args = [w1 + w2, t - u, s - t, s - u, t - s]
            if min(_lattice_distance(x, tau) for x in args) > 0.05:
                break
        sg = sigma(w1, t, tau)
        bump("sigma_period_1", abs(sigma(w1, t + 1, tau) - sg) / abs(sg))
        rhs = np.exp(TWO_PI_I * w1) * sg
        lhs = sigma(w1, t + tau, tau)
        bump("sigma_period_tau", abs(lhs - rhs) / max(abs(lhs), abs(rhs)))
        bump("sigma_residue", abs(sigma_residue(w1, tau) - 1))
        bump("three_term", three_term_defect(w1, w2, t, s, u, tau))
    return worst
