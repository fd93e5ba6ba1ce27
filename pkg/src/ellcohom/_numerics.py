"""Limit extrapolation used by the numerical residue probes."""
from __future__ import annotations


def limit_richardson(f, eps: float, levels: int = 1, symmetric: bool = False) -> complex:
    """Estimate lim_{h -> 0} f(h) from samples at eps, eps/2, ..., eps/2**levels.

    With ``levels=1, symmetric=False`` this is the single step 2 f(eps/2) - f(eps).
    ``symmetric=True`` averages f(h) and f(-h), which removes the odd powers
    of h from the error expansion of an analytic f, so each level gains two
    orders instead of one.
    """
    hs = [eps / 2 ** i for i in range(levels + 1)]
    if symmetric:
        col = [(f(h) + f(-h)) / 2 for h in hs]
        power = 2
    else:
        col = [f(h) for h in hs]
        power = 1
    for m in range(1, levels + 1):
        r = 2 ** (power * m)
        col = [(r * col[i + 1] - col[i]) / (r - 1) for i in range(len(col) - 1)]
    return complex(col[0])
