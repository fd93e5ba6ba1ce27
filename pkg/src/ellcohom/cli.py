"""Command-line interface: ``ellcohom <command> [options]``.

Results are printed as JSON with sorted keys.  Commands that measure
defects return ``(payload, failed)``.  Exit status is 0 on success,
2 when a reported defect exceeds ``--tol`` and 1 on bad input (with
``{"error": ...}`` on stdout).
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import arrangement as arr
from . import checks, elliptic_core, forest_algebra
from .exact_lattice import QPair, snf, solve_on_E
from .exceptions import EllCohomError
from .form_builder import TransversalSystem

EXIT_OK, EXIT_INPUT, EXIT_DEFECT = 0, 1, 2


class InputError(Exception):
    pass


def _complex(text: str) -> complex:
    try:
        parts = [float(x) for x in text.split(",")]
    except ValueError as exc:
        raise InputError(f"cannot parse complex number {text!r}") from exc
    if len(parts) == 1:
        return complex(parts[0])
    if len(parts) != 2:
        raise InputError(f"expected 're,im', got {text!r}")
    return complex(*parts)


def _cjson(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _json_arg(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON argument: {exc}") from exc


def _qpair(item) -> QPair:
    """Accept "p/q", a number, or a pair ["p/q", "p/q"]."""
    if isinstance(item, list):
        if len(item) != 2:
            raise InputError(f"expected a pair, got {item!r}")
        return QPair(Fraction(str(item[0])), Fraction(str(item[1])))
    return QPair(Fraction(str(item)))


def _load(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from exc


def _arrangement(data: dict) -> arr.EllipticArrangement:
    try:
        return arr.EllipticArrangement.from_json(data)
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed arrangement JSON: {exc!r}") from exc


def _system(data: dict) -> TransversalSystem:
    try:
        return TransversalSystem(data["a"], [_qpair(x) for x in data["z"]],
                                 [_qpair(x) for x in data["w"]], complex(*data["tau"]))
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed system JSON: {exc!r}") from exc


# ---------------------------------------------------------------------------
# commands

def cmd_theta(args, rng):
    return {"value": _cjson(elliptic_core.theta(_complex(args.z), args.tau))}


def cmd_sigma(args, rng):
    return {"value": _cjson(elliptic_core.sigma(_complex(args.w), _complex(args.t), args.tau))}


def cmd_identities(args, rng):
    worst = elliptic_core.identity_sweep(args.samples, seed=args.seed)
    failed = sorted(k for k, v in worst.items() if not v <= args.tol)
    return {"max_defects": worst, "samples": args.samples, "failed": failed}, bool(failed)


def cmd_forest_dim(args, rng):
    n, k = args.n, args.k
    out = {"dim": forest_algebra.forest_space_dim(n, k),
           "generators": len(forest_algebra.generate_admissible(n, k)),
           "sv_formula": forest_algebra.sv_formula_dim(n, k),
           "rising_factorial": forest_algebra.rising_factorial_dim(n, k)}
    if n + k <= arr.MAX_MOEBIUS:
        out["moebius"] = arr.affine_moebius_betti_oracle(n, k)
    out["sv_formula_agrees"] = out["sv_formula"] == out["dim"]
    return out


def cmd_snf(args, rng):
    U, D, V = snf(_json_arg(args.matrix))
    as_list = lambda m: [[int(x) for x in row] for row in m]  # noqa: E731
    return {"U": as_list(U), "D": as_list(D), "V": as_list(V),
            "divisors": [int(D[i, i]) for i in range(min(D.shape)) if D[i, i] != 0]}


def cmd_solve_e(args, rng):
    z = [_qpair(x) for x in _json_arg(args.z)]
    pts = solve_on_E(_json_arg(args.matrix), z)
    return {"count": len(pts), "points": [[e.to_json() for e in p] for p in pts]}


def cmd_discriminantal(args, rng):
    z = [_qpair(x) for x in _json_arg(args.z)] if args.z else None
    w = [_qpair(x) for x in _json_arg(args.weights)] if args.weights else None
    return arr.discriminantal(args.n, args.k, z, tau=args.tau, weights=w).to_json()


def cmd_betti(args, rng):
    C = _arrangement(_load(args.input))
    total, per = arr.betti(C)
    return {"total": total,
            "vertices": [dict(vx.to_json(), os_dim=d) for vx, d in per.items()]}


def cmd_forms(args, rng):
    C = _arrangement(_load(args.input))
    vertices = arr.enumerate_vertices(C)
    if not 0 <= args.vertex < len(vertices):
        raise InputError(f"vertex index {args.vertex} out of range 0..{len(vertices) - 1}")
    vx = vertices[args.vertex]
    return {"vertex": vx.to_json(),
            "forms": [{"hyperplanes": list(S), "form": fd.to_json()}
                      for S, fd in arr.vertex_forms(C, vx)]}


def cmd_verify(args, rng):
    data = _load(args.input)
    if "a" in data:
        report = checks.verify_system(_system(data), rng)
        kind = "system"
    else:
        report = checks.verify_arrangement(_arrangement(data), rng)
        kind = "arrangement"
    bad = checks.failures(report, args.tol)
    return {"input": kind, "defects": report, "failed": bad, "tol": args.tol}, bool(bad)


COMMANDS = {
    "theta": cmd_theta, "sigma": cmd_sigma, "identities": cmd_identities,
    "forest-dim": cmd_forest_dim, "snf": cmd_snf, "solve-e": cmd_solve_e,
    "discriminantal": cmd_discriminantal, "betti": cmd_betti, "forms": cmd_forms,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-8)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--tau", type=_complex, default=complex(0.1, 1.1), help='"re,im"')

    p = argparse.ArgumentParser(prog="ellcohom", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("theta", parents=[common])
    s.add_argument("--z", required=True)
    s = sub.add_parser("sigma", parents=[common])
    s.add_argument("--w", required=True)
    s.add_argument("--t", required=True)
    s = sub.add_parser("identities", parents=[common])
    s.add_argument("--samples", type=int, default=1000)
    s = sub.add_parser("forest-dim", parents=[common])
    s.add_argument("-n", type=int, required=True)
    s.add_argument("-k", type=int, required=True)
    s = sub.add_parser("snf", parents=[common])
    s.add_argument("--matrix", required=True, help="JSON integer matrix")
    s = sub.add_parser("solve-e", parents=[common])
    s.add_argument("--matrix", required=True, help="JSON k x l integer block")
    s.add_argument("--z", required=True, help='JSON list of offsets, e.g. [["1/2","0"]]')
    s = sub.add_parser("discriminantal", parents=[common])
    s.add_argument("-n", type=int, required=True)
    s.add_argument("-k", type=int, required=True)
    s.add_argument("--z", help="JSON list of n points (default z_a = a/(n+1))")
    s.add_argument("--weights", help="JSON list of k weights (default 1/3, 1/5, ...)")
    for name in ("betti", "forms", "verify"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("--input", required=True)
    sub.choices["forms"].add_argument("--vertex", type=int, default=0)
    return p


def run(argv=None) -> tuple[int, dict]:
    args = build_parser().parse_args(argv)
    if not args.tol > 0:
        return EXIT_INPUT, {"error": "--tol must be positive"}
    rng = np.random.default_rng(args.seed)
    try:
        result = COMMANDS[args.command](args, rng)
    except (InputError, EllCohomError, ValueError, ZeroDivisionError) as exc:
        err = {"error": str(exc), "type": type(exc).__name__}
        witness = getattr(exc, "witness", None)
        if witness is not None:
            err["witness"] = list(witness)
        return EXIT_INPUT, err
    if isinstance(result, tuple):
        result, failed = result
        return (EXIT_DEFECT if failed else EXIT_OK), result
    return EXIT_OK, result


def main(argv=None) -> int:
    code, payload = run(argv)
    json.dump(payload, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
