"""Command-line front end.

Results are written as JSON {"command", "inputs", "result", "diagnostics"}
(or a one-row CSV). Complex numbers are [re, im] pairs in JSON and are given
on the command line as a+bi or a-bi with explicit decimal points.
Exit codes: 0 success, 1 computation error or failed check, 2 usage error.
"""

import argparse
import csv
import io
import json
import re
import sys

import numpy as np

from . import verify as verify_mod
from .algebraic_bethe import build_bethe_state, eigencheck, find_bethe_solutions, max_residual, solve_bethe
from .determinants import gaudin_norm, izergin, izergin_hom, slavnov_hom, slavnov_restricted
from .errors import NoConvergence, SU2DetError
from .gauge_map import basis_to_word, make_geometry, parse_trace, structure_constant, word_to_basis
from .vertex_model import brute_dwpf, brute_restricted

_NUM = r"[0-9]+\.[0-9]*(?:[eE][+-]?[0-9]+)?"
COMPLEX_RE = re.compile(rf"^([+-]?{_NUM})([+-]{_NUM})i$")


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_complex(text):
    """Parse 'a+bi' or 'a-bi'; both parts need a decimal point."""
    s = text.strip()
    m = COMPLEX_RE.match(s)
    if m:
        return complex(float(m.group(1)), float(m.group(2)))
    raise argparse.ArgumentTypeError(f"bad complex literal {text!r}; use a+bi with decimal points")


def _float_literal(x):
    s = repr(float(x))
    if "." in s:
        return s
    mant, _, exp = s.partition("e")
    return f"{mant}.0" + (f"e{exp}" if exp else "")


def format_complex(x):
    """Inverse of parse_complex; exact because repr round-trips floats."""
    x = complex(x)
    im = _float_literal(x.imag)
    return _float_literal(x.real) + ("" if im.startswith("-") else "+") + im + "i"


def complex_list(text):
    if text.strip() == "":
        return []
    return [parse_complex(t) for t in text.split(",")]


def int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}")


def cj(x):
    x = complex(x)
    return [x.real, x.imag]


def cjl(xs):
    return [cj(x) for x in xs]


def roots_json(r):
    return {"L": r.L, "N": r.N, "roots": cjl(r.roots), "residual": r.residual,
            "modes": list(r.mode_numbers) if r.mode_numbers else None}


def _roots_from_args(L, N, modes, values, eta, z, tol):
    if values is not None:
        if len(values) != N:
            raise UsageError(f"expected {N} rapidities, got {len(values)}")
        return np.array(values, dtype=complex), None
    r = solve_bethe(L, N, modes, tol=tol, z=z, eta=eta)
    return r.u, r


def cmd_dwpf(a):
    if len(a.w) != a.N:
        raise UsageError(f"--w needs {a.N} values")
    inputs = {"N": a.N, "w": cjl(a.w), "z": cjl(a.z), "eta": cj(a.eta)}
    if len(a.z) == 1 and a.N != 1:
        value = izergin_hom(a.w, a.z[0], a.eta)
        diag = {"homogeneous": True}
    else:
        if len(a.z) != a.N:
            raise UsageError(f"--z needs 1 or {a.N} values")
        value = izergin(a.w, a.z, a.eta)
        diag = {"homogeneous": False}
        if a.N <= 12:
            diag["lattice"] = cj(brute_dwpf(a.w, a.z, a.eta))
    return inputs, {"value": cj(value)}, diag


def cmd_slavnov(a):
    u, r = _roots_from_args(a.L, a.N1, a.modes, a.u, a.eta, a.z[0], a.tol)
    if len(a.v) != a.N2:
        raise UsageError(f"--v needs {a.N2} values")
    inputs = {"L": a.L, "N1": a.N1, "N2": a.N2, "u": cjl(u), "v": cjl(a.v), "z": cjl(a.z), "eta": cj(a.eta)}
    if len(a.z) == 1:
        value = slavnov_hom(a.L, a.N1, a.N2, u, a.v, a.z[0], a.eta, check_roots=not a.off_shell)
        zs = a.z[0]
    else:
        if len(a.z) != a.L:
            raise UsageError(f"--z needs 1 or {a.L} values")
        value = slavnov_restricted(a.L, a.N1, a.N2, u, a.v, a.z, a.eta)
        zs = a.z
    diag = {"bethe_residual": max_residual(u, a.L, zs, a.eta)}
    if a.L <= 12:
        diag["lattice"] = cj(brute_restricted(a.L, a.N1, a.N2, u, a.v, zs, a.eta))
    return inputs, {"value": cj(value)}, diag


def cmd_gaudin(a):
    u, r = _roots_from_args(a.L, a.N, a.modes, a.u, a.eta, a.z, a.tol)
    inputs = {"L": a.L, "N": a.N, "u": cjl(u), "z": cj(a.z), "eta": cj(a.eta)}
    value = gaudin_norm(a.L, u, a.z, a.eta)
    return inputs, {"value": cj(value)}, {"bethe_residual": max_residual(u, a.L, a.z, a.eta)}


def cmd_bethe(a):
    r = solve_bethe(a.L, a.N, a.modes, tol=a.tol, z=a.z, eta=a.eta)
    inputs = {"L": a.L, "N": a.N, "modes": a.modes, "z": cj(a.z), "eta": cj(a.eta), "tol": a.tol}
    result = {"roots": cjl(r.roots), "residual": r.residual}
    diag = {"status": r.status}
    if a.L <= 16 and a.N > 0:
        rng = np.random.default_rng(a.seed)
        state = build_bethe_state(r)
        diag["eigencheck_residual"] = max(eigencheck(state, x)[1] for x in rng.normal(size=3) + 1j * rng.normal(size=3))
    return inputs, result, diag


def cmd_sc(a):
    if len(a.L) != 3 or len(a.N) != 3:
        raise UsageError("--L and --N take three comma-separated integers")
    g = make_geometry(*a.L, *a.N, allow_extremal=a.allow_extremal)
    roots = []
    for L, N, modes in zip(a.L, a.N, (a.modes_1, a.modes_2, a.modes_3)):
        if modes is None and N:
            found = find_bethe_solutions(L, N, tol=a.tol, z=a.z, eta=a.eta)
            if not found:
                raise NoConvergence(f"no Bethe solution found for L={L}, N={N}")
            roots.append(found[0])
        else:
            roots.append(solve_bethe(L, N, modes if N else [], tol=a.tol, z=a.z, eta=a.eta))
    res = structure_constant(g, *roots)
    inputs = {"L": a.L, "N": a.N, "modes": [a.modes_1, a.modes_2, a.modes_3], "z": cj(a.z), "eta": cj(a.eta)}
    result = {"c": cj(res.c), "N123": cj(res.N123), "Z": cj(res.Z), "S": cj(res.S)}
    diag = {"branch": res.branch, "residuals": list(res.residuals), "norms": cjl(res.norms),
            "geometry": {"l12": g.l12, "l13": g.l13, "l23": g.l23},
            "roots": [cjl(r.roots) for r in roots]}
    return inputs, result, diag


def cmd_verify(a):
    geometry = tuple(a.geometry) if a.geometry else (6, 6, 4, 3, 1, 2)
    if len(geometry) != 6:
        raise UsageError("--geometry takes L1,L2,L3,N1,N2,N3")
    checks = verify_mod.run_suite(a.suite, seed=a.seed, max_N=a.max_N, geometry=geometry,
                                  trials=a.trials, max_L=a.max_L)
    inputs = {"suite": a.suite, "seed": a.seed, "max_N": a.max_N, "max_L": a.max_L,
              "geometry": list(geometry), "trials": a.trials}
    passed = all(c["passed"] for c in checks)
    return inputs, {"passed": passed, "checks": checks}, {"failed": [c["name"] for c in checks if not c["passed"]]}


def cmd_map(a):
    word = parse_trace(a.word)
    idx = word_to_basis(word, a.role, a.side)
    inputs = {"word": a.word, "role": a.role, "side": a.side}
    result = {"L": idx.L, "mask": idx.mask, "down_sites": [j for j in range(idx.L) if (idx.mask >> j) & 1]}
    return inputs, result, {"fields": list(basis_to_word(idx, a.role, a.side).fields)}


def build_parser():
    p = Parser(prog="su2det", description="Determinant formulas and lattice oracles for SU(2) Bethe states.")
    common = Parser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", default=None, help="output path (written only on success)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--check", action="store_true", help="re-run and require bit-identical output")
    common.add_argument("--eta", type=parse_complex, default=1j)
    common.add_argument("--tol", type=float, default=1e-10)
    sub = p.add_subparsers(dest="command", required=True, parser_class=Parser)

    s = sub.add_parser("dwpf", parents=[common], help="domain-wall partition function")
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--w", type=complex_list, required=True)
    s.add_argument("--z", type=complex_list, default=[0.5j])
    s.set_defaults(func=cmd_dwpf)

    s = sub.add_parser("slavnov", parents=[common], help="restricted Slavnov scalar product")
    s.add_argument("--L", type=int, required=True)
    s.add_argument("--N1", type=int, required=True)
    s.add_argument("--N2", type=int, required=True)
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--u", type=complex_list)
    g.add_argument("--modes", type=int_list)
    s.add_argument("--v", type=complex_list, default=[])
    s.add_argument("--z", type=complex_list, default=[0.5j])
    s.add_argument("--off-shell", action="store_true", help="skip the Bethe-root check")
    s.set_defaults(func=cmd_slavnov)

    s = sub.add_parser("gaudin", parents=[common], help="Gaudin norm of a Bethe state")
    s.add_argument("--L", type=int, required=True)
    s.add_argument("--N", type=int, required=True)
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--u", type=complex_list)
    g.add_argument("--modes", type=int_list)
    s.add_argument("--z", type=parse_complex, default=0.5j)
    s.set_defaults(func=cmd_gaudin)

    s = sub.add_parser("bethe", parents=[common], help="solve the Bethe equations")
    s.add_argument("--L", type=int, required=True)
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--modes", type=int_list, default=None)
    s.add_argument("--z", type=parse_complex, default=0.5j)
    s.set_defaults(func=cmd_bethe)

    s = sub.add_parser("sc", parents=[common], help="tree-level structure constant")
    s.add_argument("--L", type=int_list, required=True)
    s.add_argument("--N", type=int_list, required=True)
    s.add_argument("--modes-1", type=int_list, default=None)
    s.add_argument("--modes-2", type=int_list, default=None)
    s.add_argument("--modes-3", type=int_list, default=None)
    s.add_argument("--z", type=parse_complex, default=0.5j)
    s.add_argument("--allow-extremal", action="store_true", help="accept geometries with some l_ij = 0")
    s.set_defaults(func=cmd_sc)

    s = sub.add_parser("verify", parents=[common], help="run oracle-equivalence checks")
    s.add_argument("suite", choices=verify_mod.SUITES + ("all",))
    s.add_argument("--max-N", type=int, default=4)
    s.add_argument("--max-L", type=int, default=6)
    s.add_argument("--geometry", type=int_list, default=None)
    s.add_argument("--trials", type=int, default=3)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("map", parents=[common], help="trace word to spin basis index")
    s.add_argument("--word", required=True)
    s.add_argument("--role", choices=("O1", "O2", "O3"), required=True)
    s.add_argument("--side", choices=("initial", "final"), default="initial")
    s.set_defaults(func=cmd_map)
    return p


def _flatten(prefix, x, row):
    if isinstance(x, dict):
        for k, v in x.items():
            _flatten(f"{prefix}_{k}" if prefix else k, v, row)
    elif isinstance(x, list) and len(x) == 2 and all(isinstance(t, float) for t in x):
        row[f"{prefix}_re"], row[f"{prefix}_im"] = x
    elif isinstance(x, list):
        for i, v in enumerate(x):
            _flatten(f"{prefix}_{i}", v, row)
    else:
        row[prefix] = x


def _finite(x):
    # JSON has no inf/nan; emit them as strings
    if isinstance(x, float) and not np.isfinite(x):
        return str(x)
    if isinstance(x, dict):
        return {k: _finite(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_finite(v) for v in x]
    return x


def render(doc, fmt):
    doc = _finite(doc)
    if fmt == "json":
        return json.dumps(doc, allow_nan=False) + "\n"
    row = {}
    _flatten("", doc["result"], row)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(row))
    w.writeheader()
    w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    return buf.getvalue()


def _error(kind, message, context=None, code=1):
    payload = _finite({"error": {"kind": kind, "message": message, "context": context or {}}})
    sys.stderr.write(json.dumps(payload, default=str) + "\n")
    return code


def run(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except UsageError as exc:
        return _error("UsageError", str(exc), {"argv": argv}, 2)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        inputs, result, diag = a.func(a)
        doc = {"command": a.command, "inputs": inputs, "result": result, "diagnostics": diag}
        text = render(doc, a.format)
        if a.check:
            again = a.func(a)
            redo = render({"command": a.command, "inputs": again[0], "result": again[1], "diagnostics": again[2]},
                          a.format)
            if redo != text:
                return _error("CheckMismatch", "re-run produced different output")
    except UsageError as exc:
        return _error("UsageError", str(exc), {"argv": argv}, 2)
    except SU2DetError as exc:
        return _error(exc.kind, exc.message, exc.context, 1)
    if a.out:
        with open(a.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if a.command == "verify" and not result["passed"]:
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
