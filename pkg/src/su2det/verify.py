"""Oracle-equivalence checks shared by the CLI and the test suite.

Each check returns a dict with its name, the worst observed deviation, the
tolerance it is judged against and a pass flag.
"""

import itertools

import numpy as np

from .algebraic_bethe import build_bethe_state, eigencheck, find_bethe_solutions
from .determinants import gaudin_norm, izergin, slavnov_hom
from .errors import CoincidentRapidities, InvalidGeometry
from .gauge_map import make_geometry, oracle_contraction, structure_constant
from .vertex_model import (VertexWeights, apply_c_line, brute_dwpf, brute_restricted, dual_dwpf,
                           weight)

SUITES = ("weights", "dwpf", "slavnov", "gaudin", "sc")


def _check(name, deviation, tol, **extra):
    dev = float(deviation)
    return dict(name=name, max_deviation=dev, tolerance=tol, passed=bool(np.isfinite(dev) and dev <= tol), **extra)


def random_complex(rng, n, scale=1.0):
    return scale * (rng.normal(size=n) + 1j * rng.normal(size=n))


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def check_weights(rng, trials=20):
    w = VertexWeights()
    dev_b = 0.0
    dev_a = 0.0
    dev_c = 0.0
    for _ in range(trials):
        u, z = random_complex(rng, 2)
        dev_b = max(dev_b, abs(weight("b", u, z, w) - 1))
        dev_a = max(dev_a, abs(weight("a", z + w.eta, z, w) - 2))
        dev_c = max(dev_c, abs(weight("c", z + w.eta, z, w) - 1))
    poles_raise = True
    for kind in ("a", "c"):
        try:
            weight(kind, 0.3 + 0.1j, 0.3 + 0.1j, w)
            poles_raise = False
        except CoincidentRapidities:
            pass
    return [_check("b weight is identically 1", dev_b, 0.0),
            _check("a weight equals 2 at u - z = eta", dev_a, 1e-14),
            _check("c weight equals 1 at u - z = eta", dev_c, 1e-14),
            _check("a and c weights reject u = z", 0.0 if poles_raise else 1.0, 0.0)]


def check_dwpf(rng, max_N=4, trials=25):
    dev = 0.0
    dev_dual = 0.0
    for N in range(1, max_N + 1):
        for _ in range(trials):
            w, z = random_complex(rng, N), random_complex(rng, N)
            b = brute_dwpf(w, z)
            dev = max(dev, rel(izergin(w, z), b))
            dev_dual = max(dev_dual, rel(dual_dwpf(w, z), b))
    return [_check(f"izergin equals lattice DWPF (N <= {max_N})", dev, 1e-10),
            _check(f"arrow reversal of lattice DWPF (N <= {max_N})", dev_dual, 1e-12)]


def check_slavnov(rng, Ls=(4, 5, 6), max_N1=3, draws=3):
    dev = 0.0
    count = 0
    for L in Ls:
        for N1 in range(1, max_N1 + 1):
            for roots in find_bethe_solutions(L, N1):
                for N2 in range(N1 + 1):
                    for _ in range(draws):
                        v = random_complex(rng, N2)
                        b = brute_restricted(L, N1, N2, roots.u, v, roots.z)
                        dev = max(dev, rel(slavnov_hom(L, N1, N2, roots.u, v, roots.z), b))
                        count += 1
    return [_check("homogeneous Slavnov equals lattice value", dev, 1e-8, cases=count)]


def explicit_norm(roots):
    psi = build_bethe_state(roots).vector
    for x in roots.u[::-1]:
        psi = apply_c_line(x, roots.z, psi, roots.eta)
    return complex(psi[0])


def check_gaudin(rng, Ls=(4, 6), Ns=(1, 2)):
    dev = 0.0
    dev_eig = 0.0
    count = 0
    for L in Ls:
        for N in Ns:
            for roots in find_bethe_solutions(L, N):
                dev = max(dev, rel(gaudin_norm(L, roots.u, roots.z, roots.eta), explicit_norm(roots)))
                state = build_bethe_state(roots)
                for x in random_complex(rng, 3):
                    dev_eig = max(dev_eig, eigencheck(state, x)[1])
                count += 1
    return [_check("Gaudin norm equals explicit norm", dev, 1e-9, cases=count),
            _check("Bethe states are transfer-matrix eigenvectors", dev_eig, 1e-10, cases=count)]


def ratio_spread(ratios):
    r = np.asarray(ratios, dtype=complex)
    if r.size == 0:
        return float("inf")
    return float(np.max(np.abs(r - r[0])) / abs(r[0]))


def sc_ratios(g, trials=3, max_per_chain=6):
    """structure_constant / oracle_contraction over distinct Bethe-root choices."""
    us = find_bethe_solutions(g.L1, g.N1)[:max_per_chain]
    vs = find_bethe_solutions(g.L2, g.N2)[:max_per_chain]
    ws = find_bethe_solutions(g.L3, g.N3)[:max_per_chain]
    out = []
    for u, v, w in itertools.product(us, vs, ws):
        try:
            c = structure_constant(g, u, v, w).c
        except CoincidentRapidities:
            continue
        o = oracle_contraction(g, u, v, w)
        if abs(o) < 1e-8 * max(1.0, abs(c)):
            continue
        out.append(c / o)
        if len(out) >= trials:
            break
    return out


def check_sc(geometry=(6, 6, 4, 3, 1, 2), trials=3):
    name = "structure constant / contraction ratio is root independent {}".format(tuple(geometry))
    try:
        g = make_geometry(*geometry)
    except InvalidGeometry as exc:
        return [_check(name, float("inf"), 1e-6, error=exc.message)]
    ratios = sc_ratios(g, trials)
    extra = dict(cases=len(ratios), ratio=[[r.real, r.imag] for r in ratios[:1]])
    if len(ratios) < trials:
        return [_check(name, float("inf"), 1e-6, error=f"only {len(ratios)} usable root choices", **extra)]
    return [_check(name, ratio_spread(ratios), 1e-6, **extra)]


def run_suite(suite, seed=0, max_N=4, geometry=(6, 6, 4, 3, 1, 2), trials=3, max_L=6):
    rng = np.random.default_rng(seed)
    if suite == "all":
        out = []
        for s in SUITES:
            out += run_suite(s, seed, max_N, geometry, trials, max_L)
        return out
    if suite == "weights":
        return check_weights(rng)
    if suite == "dwpf":
        return check_dwpf(rng, max_N)
    if suite == "slavnov":
        return check_slavnov(rng, tuple(range(4, max_L + 1)))
    if suite == "gaudin":
        return check_gaudin(rng)
    if suite == "sc":
        return check_sc(geometry, trials)
    raise ValueError(f"unknown suite {suite!r}")
