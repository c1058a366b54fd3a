"""Six-vertex weights and brute-force lattice partition functions.

States live on the 2**L spin basis. Bit j of a basis index is set when column
j (0-based from the left) carries a down arrow, so mask 0 is the all-up
reference state. Horizontal lines are transferred column by column with a
two-state carry for the horizontal arrow, which costs O(L * 2**L) per line.
"""

from dataclasses import dataclass

import numpy as np

from .errors import CoincidentRapidities, InvalidGeometry, InvalidInput
from .numerics import as_complex, as_complex_array

DEFAULT_ETA = 1j
DEFAULT_Z = 0.5j
COINCIDENCE_RTOL = 1e-12

# Auxiliary boundary states (left, right) for each kind of line.
LINE_ENDS = {"A": (0, 0), "B": (0, 1), "C": (1, 0), "D": (1, 1)}


@dataclass(frozen=True)
class VertexWeights:
    """Rational six-vertex weights a = (u-z+eta)/(u-z), b = 1, c = eta/(u-z)."""

    eta: complex = DEFAULT_ETA

    def __post_init__(self):
        eta = as_complex(self.eta, "eta")
        if abs(eta) == 0:
            raise InvalidInput("eta must be nonzero")
        object.__setattr__(self, "eta", eta)

    def a(self, u, z):
        d = check_distinct(u, z)
        return (d + self.eta) / d

    def b(self, u, z):
        return 1.0 + 0j

    def c(self, u, z):
        return self.eta / check_distinct(u, z)


def as_weights(w):
    if w is None:
        return VertexWeights()
    if isinstance(w, VertexWeights):
        return w
    return VertexWeights(w)


def check_distinct(u, z):
    """Return u - z, raising CoincidentRapidities when it is numerically zero."""
    d = complex(u) - complex(z)
    if abs(d) < COINCIDENCE_RTOL * (1.0 + abs(u) + abs(z)):
        raise CoincidentRapidities(f"rapidities coincide: {complex(u)} and {complex(z)}",
                                   u=[complex(u).real, complex(u).imag], z=[complex(z).real, complex(z).imag])
    return d


def weight(kind, u, z, w=None):
    """Single vertex weight of kind 'a', 'b' or 'c'."""
    w = as_weights(w)
    if kind == "a":
        return w.a(u, z)
    if kind == "b":
        return w.b(u, z)
    if kind == "c":
        return w.c(u, z)
    raise InvalidInput(f"unknown weight kind {kind!r}", kind=kind)


def z_array(z_list, L=None):
    """Expand a scalar homogeneous point or validate a list of quantum rapidities."""
    if np.ndim(z_list) == 0:
        if L is None:
            raise InvalidInput("chain length needed for a homogeneous z")
        return np.full(L, as_complex(z_list, "z"))
    zs = as_complex_array(z_list, "z")
    if L is not None and zs.size != L:
        raise InvalidGeometry(f"expected {L} quantum rapidities, got {zs.size}", L=L, got=int(zs.size))
    return zs


def chain_length(vec):
    n = len(vec)
    L = n.bit_length() - 1
    if n < 1 or (1 << L) != n:
        raise InvalidInput(f"state length {n} is not a power of two")
    return L


def reference_state(L, down=False):
    """All-up (mask 0) or all-down (mask 2**L - 1) basis vector."""
    v = np.zeros(1 << L, dtype=complex)
    v[(1 << L) - 1 if down else 0] = 1.0
    return v


def _site_view(vec, L, j):
    # axis 1 is the spin of column j: 0 = up, 1 = down
    return vec.reshape(1 << (L - 1 - j), 2, 1 << j)


def apply_line(kind, u, z_list, vec, w=None):
    """Transfer one horizontal line of kind A, B, C or D across the row."""
    w = as_weights(w)
    vec = np.asarray(vec, dtype=complex)
    L = chain_length(vec)
    zs = z_array(z_list, L)
    u = as_complex(u, "u")
    start, end = LINE_ENDS[kind]
    carry = [None, None]
    carry[start] = vec.copy()
    for j in range(L):
        a = w.a(u, zs[j])
        c = w.c(u, zs[j])
        new = [np.zeros_like(vec), np.zeros_like(vec)]
        for alpha in (0, 1):
            if carry[alpha] is None:
                continue
            src = _site_view(carry[alpha], L, j)
            # diagonal vertices: a when the arrow matches the carry, b = 1 otherwise
            d = _site_view(new[alpha], L, j)
            d[:, alpha, :] += a * src[:, alpha, :]
            d[:, 1 - alpha, :] += src[:, 1 - alpha, :]
            # c-vertex: carry 0 turns an up arrow down, carry 1 turns a down arrow up
            o = _site_view(new[1 - alpha], L, j)
            o[:, 1 - alpha, :] += c * src[:, alpha, :]
        carry = new
    return carry[end]


def apply_b_line(u, z_list, vec, w=None):
    """B-line: adds one down arrow to every basis state."""
    return apply_line("B", u, z_list, vec, w)


def apply_c_line(u, z_list, vec, w=None):
    """C-line: removes one down arrow from every basis state."""
    return apply_line("C", u, z_list, vec, w)


def brute_dwpf(w_list, z_list, wt=None):
    """Domain-wall partition function from N B-lines on the all-up N-site state."""
    ws = as_complex_array(w_list, "w")
    zs = as_complex_array(z_list, "z")
    if ws.size != zs.size:
        raise InvalidGeometry("domain wall lattice needs as many lines as columns", N=int(ws.size), L=int(zs.size))
    vec = reference_state(zs.size)
    for x in ws:
        vec = apply_b_line(x, zs, vec, wt)
    return complex(vec[-1])


def dual_dwpf(w_list, z_list, wt=None):
    """Arrow-reversed domain-wall lattice: N C-lines on the all-down state."""
    ws = as_complex_array(w_list, "w")
    zs = as_complex_array(z_list, "z")
    if ws.size != zs.size:
        raise InvalidGeometry("domain wall lattice needs as many lines as columns", N=int(ws.size), L=int(zs.size))
    vec = reference_state(zs.size, down=True)
    for x in ws:
        vec = apply_c_line(x, zs, vec, wt)
    return complex(vec[0])


def restricted_mask(N3):
    """Basis index of the final state with the leftmost N3 arrows down."""
    return (1 << N3) - 1


def brute_restricted(L, N1, N2, u_list, v_list, z_list, wt=None):
    """Lattice value of <first N3 down| C(v)... B(u)... |all up> with N3 = N1 - N2."""
    us = as_complex_array(u_list, "u")
    vs = as_complex_array(v_list, "v")
    if not (0 <= N2 <= N1 <= L):
        raise InvalidGeometry("need 0 <= N2 <= N1 <= L", L=L, N1=N1, N2=N2)
    if us.size != N1 or vs.size != N2:
        raise InvalidGeometry("rapidity counts do not match N1, N2", N1=N1, N2=N2,
                              got_u=int(us.size), got_v=int(vs.size))
    zs = z_array(z_list, L)
    vec = reference_state(L)
    for x in us[::-1]:
        vec = apply_b_line(x, zs, vec, wt)
    for x in vs[::-1]:
        vec = apply_c_line(x, zs, vec, wt)
    return complex(vec[restricted_mask(N1 - N2)])


def popcount(mask):
    return bin(int(mask)).count("1")
