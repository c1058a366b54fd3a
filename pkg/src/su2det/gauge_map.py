"""Trace words, the flip map, three-point geometry and structure constants.

Single-trace operators in the {Z, X} sector map to spin chains: one field of
each operator plays the role of spin up and the other of spin down, with the
assignment depending on the operator (O1, O2, O3) and on whether it is read
as an initial ket or a final bra.
"""

import cmath
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .algebraic_bethe import BetheRoots, build_bethe_state, max_residual
from .determinants import ONSHELL_TOL, gaudin_norm, izergin_hom, slavnov_hom
from .errors import InvalidGeometry, ParseError, TooLarge, UnverifiedRoots, WrongSector
from .vertex_model import chain_length

FIELDS = ("Z", "X", "Zbar", "Xbar")
TOKENS = (("Zbar", "Zbar"), ("Xbar", "Xbar"), ("Zb", "Zbar"), ("Xb", "Xbar"), ("Z", "Z"), ("X", "X"))

# (role, side) -> (field read as spin up, field read as spin down)
SPIN_TABLE = {
    ("O1", "initial"): ("Z", "X"),
    ("O1", "final"): ("Zbar", "Xbar"),
    ("O2", "initial"): ("Zbar", "Xbar"),
    ("O2", "final"): ("Z", "X"),
    ("O3", "initial"): ("Z", "Xbar"),
    ("O3", "final"): ("Zbar", "X"),
}

ORACLE_CAP = 14


@dataclass(frozen=True)
class OperatorWord:
    fields: tuple

    @property
    def length(self):
        return len(self.fields)


class SpinBasisIndex(NamedTuple):
    L: int
    mask: int


def parse_trace(text):
    """Parse 'Tr(<word>)' with tokens Z, X, Zb (or Zbar) and Xb (or Xbar)."""
    if not text.startswith("Tr("):
        pos = next((i for i, (a, b) in enumerate(zip(text, "Tr(")) if a != b), min(len(text), 3))
        raise ParseError("expected 'Tr('", position=pos)
    pos = 3
    fields = []
    while pos < len(text) and text[pos] != ")":
        for tok, name in TOKENS:
            if text.startswith(tok, pos):
                fields.append(name)
                pos += len(tok)
                break
        else:
            raise ParseError(f"invalid token {text[pos]!r}", position=pos)
    if pos >= len(text):
        raise ParseError("missing ')'", position=pos)
    if pos != len(text) - 1:
        raise ParseError("trailing characters after ')'", position=pos + 1)
    if not fields:
        raise ParseError("empty trace", position=pos)
    return OperatorWord(tuple(fields))


def word_to_basis(word, role, side="initial"):
    """Basis index of a word: bit j is set where field j is the spin-down field."""
    key = (role, side)
    if key not in SPIN_TABLE:
        raise WrongSector(f"unknown role/side {role!r}/{side!r}", role=role, side=side)
    up, down = SPIN_TABLE[key]
    mask = 0
    for j, f in enumerate(word.fields):
        if f == down:
            mask |= 1 << j
        elif f != up:
            raise WrongSector(f"field {f} at site {j} not allowed for {role} {side}",
                              role=role, side=side, site=j, field=f)
    return SpinBasisIndex(word.length, mask)


def basis_to_word(index, role, side="initial"):
    up, down = SPIN_TABLE[(role, side)]
    return OperatorWord(tuple(down if (index.mask >> j) & 1 else up for j in range(index.L)))


def reverse_bits(mask, L):
    out = 0
    for j in range(L):
        if (mask >> j) & 1:
            out |= 1 << (L - 1 - j)
    return out


def flip(vec):
    """Reverse the site order of every basis state; amplitudes are not conjugated."""
    vec = np.asarray(vec, dtype=complex)
    L = chain_length(vec)
    perm = np.array([reverse_bits(m, L) for m in range(1 << L)], dtype=np.int64)
    out = np.empty_like(vec)
    out[perm] = vec
    return out


@dataclass(frozen=True)
class ThreePointGeometry:
    L1: int
    L2: int
    L3: int
    N1: int
    N2: int
    N3: int
    l12: int
    l13: int
    l23: int

    @property
    def lengths(self):
        return (self.L1, self.L2, self.L3)

    @property
    def magnons(self):
        return (self.N1, self.N2, self.N3)


def make_geometry(L1, L2, L3, N1, N2, N3, allow_extremal=False):
    """Validate a three-point configuration and derive its propagator counts.

    The counts l_ij = (L_i + L_j - L_k)/2 must agree with l13 = N3,
    l23 = L3 - N3, l12 = L1 - N3, and N1 = N2 + N3. Extremal geometries
    (some l_ij = 0) are rejected unless ``allow_extremal`` is set.
    """
    vals = dict(L1=L1, L2=L2, L3=L3, N1=N1, N2=N2, N3=N3)
    for k, x in vals.items():
        if int(x) != x or x < 0:
            raise InvalidGeometry(f"{k} must be a non-negative integer", relation="counts", **vals)
    if L1 < 1 or L2 < 1 or L3 < 1:
        raise InvalidGeometry("operator lengths must be positive", relation="counts", **vals)
    if (L1 + L2 + L3) % 2:
        raise InvalidGeometry("L1 + L2 + L3 must be even", relation="parity", **vals)
    if N1 != N2 + N3:
        raise InvalidGeometry("N1 must equal N2 + N3", relation="N1 = N2 + N3", **vals)
    for name, n, L in (("N1", N1, L1), ("N2", N2, L2), ("N3", N3, L3)):
        if n > L:
            raise InvalidGeometry(f"{name} exceeds its chain length", relation="N <= L", **vals)
    l12 = (L1 + L2 - L3) // 2
    l13 = (L1 + L3 - L2) // 2
    l23 = (L2 + L3 - L1) // 2
    if l13 != N3:
        raise InvalidGeometry(f"l13 = (L1+L3-L2)/2 = {l13} differs from N3 = {N3}", relation="l13 = N3", **vals)
    if l23 != L3 - N3:
        raise InvalidGeometry(f"l23 = {l23} differs from L3 - N3 = {L3 - N3}", relation="l23 = L3 - N3", **vals)
    if l12 != L1 - N3:
        raise InvalidGeometry(f"l12 = {l12} differs from L1 - N3 = {L1 - N3}", relation="l12 = L1 - N3", **vals)
    if min(l12, l13, l23) < 0 or (not allow_extremal and min(l12, l13, l23) < 1):
        raise InvalidGeometry("extremal geometry: every l_ij must be at least 1", relation="non-extremal",
                              l12=l12, l13=l13, l23=l23, **vals)
    return ThreePointGeometry(L1, L2, L3, N1, N2, N3, l12, l13, l23)


@dataclass(frozen=True)
class StructureConstantResult:
    c: complex
    N123: complex
    Z: complex
    S: complex
    norms: tuple
    branch: dict
    residuals: tuple
    roots: tuple


def _check_roots(g, u, v, w):
    for name, r, L, N in (("u", u, g.L1, g.N1), ("v", v, g.L2, g.N2), ("w", w, g.L3, g.N3)):
        if r.L != L or r.N != N or len(r.roots) != N:
            raise InvalidGeometry(f"roots {name} do not match chain ({L}, {N})", root_set=name,
                                  expected=[L, N], got=[r.L, len(r.roots)])
        if np.ndim(r.z) != 0:
            raise InvalidGeometry(f"roots {name} are not at a homogeneous point", root_set=name)
    if len({(complex(r.z), complex(r.eta)) for r in (u, v, w)}) != 1:
        raise InvalidGeometry("root sets use different z or eta")
    res = []
    for name, r in (("u", u), ("v", v), ("w", w)):
        x = max_residual(r.u, r.L, r.z, r.eta)
        if not x <= ONSHELL_TOL:
            raise UnverifiedRoots(f"roots {name} fail the Bethe equations (residual {x:.3g})",
                                  root_set=name, residual=x)
        res.append(x)
    return tuple(res)


def normalization(g, u, v, w):
    """sqrt(L1 L2 L3 / (n1 n2 n3)) on the principal branch, with the Gaudin norms."""
    norms = tuple(gaudin_norm(r.L, r.u, r.z, r.eta) for r in (u, v, w))
    radicand = g.L1 * g.L2 * g.L3 / (norms[0] * norms[1] * norms[2])
    root = cmath.sqrt(radicand)
    branch = {"sheet": "principal", "radicand": [radicand.real, radicand.imag],
              "on_cut": bool(radicand.real < 0 and radicand.imag == 0)}
    return root, norms, branch


def structure_constant(g, u, v, w):
    """c = N123 * Z * S from the Gaudin norms, the DWPF of w and the Slavnov product of (u, v)."""
    residuals = _check_roots(g, u, v, w)
    N123, norms, branch = normalization(g, u, v, w)
    Z = izergin_hom(w.u, w.z, w.eta)
    S = slavnov_hom(g.L1, g.N1, g.N2, u.u, v.u, u.z, u.eta)
    return StructureConstantResult(N123 * Z * S, N123, Z, S, norms, branch, residuals, (u, v, w))


def oracle_contraction(g, u, v, w, cap=ORACLE_CAP):
    """Structure constant from explicit state vectors.

    O2 and O3 are flipped into bras. The N3 leftmost sites of O1 contract with
    the N3 rightmost sites of flipped O3 and the remaining l12 sites of O1
    with the l12 leftmost sites of flipped O2. The O2-O3 propagators carry no
    excitations, so the unused sites of both bras are projected on spin up.
    """
    _check_roots(g, u, v, w)
    if max(g.lengths) > cap:
        raise TooLarge(f"oracle contraction limited to L <= {cap}", cap=cap, lengths=list(g.lengths))
    psi1 = build_bethe_state(u).vector
    bra2 = flip(build_bethe_state(v).vector)
    bra3 = flip(build_bethe_state(w).vector)
    n3 = g.N3
    low = (1 << n3) - 1
    amp3 = bra3[low << g.l23]
    s = np.arange(1 << g.l12)
    overlap = np.sum(psi1[(s << n3) | low] * bra2[s])
    N123, _, _ = normalization(g, u, v, w)
    return complex(N123 * amp3 * overlap)
