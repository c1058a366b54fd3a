"""Closed-form determinant evaluations.

Izergin's domain-wall determinant, the restricted Slavnov scalar product
<first N3 down| C(v_N2)...C(v_1) B(u_N1)...B(u_1) |all up> and the Gaudin norm,
together with their homogeneous limits z_j -> z. Derivative columns of the
homogeneous limits are exact Taylor coefficients built from pole series.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .algebraic_bethe import max_residual
from .errors import InvalidGeometry, UnverifiedRoots
from .numerics import as_complex, as_complex_array, det, pole_series, power_series, series_mul
from .vertex_model import DEFAULT_ETA, DEFAULT_Z, check_distinct, z_array

ONSHELL_TOL = 1e-8


@dataclass(frozen=True)
class SlavnovInput:
    """Arguments of a restricted scalar product; z is a list (inhomogeneous) or a scalar."""

    L: int
    N1: int
    N2: int
    u: tuple
    v: tuple
    z: object = DEFAULT_Z
    eta: complex = DEFAULT_ETA

    @property
    def N3(self):
        return self.N1 - self.N2

    def evaluate(self, check_roots=True):
        if np.ndim(self.z) == 0:
            return slavnov_hom(self.L, self.N1, self.N2, self.u, self.v, self.z, self.eta, check_roots)
        return slavnov_restricted(self.L, self.N1, self.N2, self.u, self.v, self.z, self.eta)


def _vandermonde(xs, descending=False):
    """prod_{i<j} (x_i - x_j), or prod_{i<j} (x_j - x_i) when descending is False."""
    p = 1.0 + 0j
    for i, j in itertools.combinations(range(len(xs)), 2):
        d = check_distinct(xs[i], xs[j])
        p *= d if descending else -d
    return p


def _ipow(x, n):
    """x**n for integer n >= 0 by repeated squaring."""
    result = 1.0 + 0j
    base = complex(x)
    while n:
        if n & 1:
            result *= base
        base *= base
        n >>= 1
    return result


def _check_counts(L, N1, N2, us, vs):
    if not (0 <= N2 <= N1 <= L):
        raise InvalidGeometry("need 0 <= N2 <= N1 <= L", L=L, N1=N1, N2=N2)
    if us.size != N1 or vs.size != N2:
        raise InvalidGeometry("rapidity counts do not match N1, N2", N1=N1, N2=N2,
                              got_u=int(us.size), got_v=int(vs.size))


def izergin(w_list, z_list, eta=DEFAULT_ETA):
    """Domain-wall partition function from Izergin's determinant."""
    ws = as_complex_array(w_list, "w")
    zs = as_complex_array(z_list, "z")
    eta = as_complex(eta, "eta")
    N = ws.size
    if zs.size != N:
        raise InvalidGeometry("izergin needs equal numbers of w and z", N=N, got_z=int(zs.size))
    M = np.empty((N, N), dtype=complex)
    num = 1.0 + 0j
    for i in range(N):
        for j in range(N):
            d = check_distinct(ws[i], zs[j])
            dp = check_distinct(ws[i] + eta, zs[j])
            M[i, j] = eta / (dp * d)
            num *= dp
    den = _vandermonde(ws, descending=True) * _vandermonde(zs)
    return num / den * det(M)


def izergin_hom(w_list, z=DEFAULT_Z, eta=DEFAULT_ETA):
    """Izergin determinant at coincident z_j = z, with exact derivative columns."""
    ws = as_complex_array(w_list, "w")
    z = as_complex(z, "z")
    eta = as_complex(eta, "eta")
    N = ws.size
    M = np.empty((N, N), dtype=complex)
    num = 1.0 + 0j
    for i, w in enumerate(ws):
        d = check_distinct(w, z)
        dp = check_distinct(w + eta, z)
        for j in range(N):
            # eta/((d+eta) d) = 1/d - 1/(d+eta), so the j-th Taylor coefficient is exact
            M[i, j] = d ** -(j + 1) - dp ** -(j + 1)
        num *= _ipow(dp, N)
    return num / _vandermonde(ws, descending=True) * det(M)


def _g_entry(ui_index, vj, us, bulk, eta):
    # bulk is prod_k a(v_j, z_k), the v-line eigenvalue ratio on the chain
    i = ui_index
    p_plus = 1.0 + 0j
    p_minus = 1.0 + 0j
    for k, uk in enumerate(us):
        if k != i:
            p_plus *= uk - vj + eta
            p_minus *= uk - vj - eta
    return eta / check_distinct(us[i], vj) * (bulk * p_plus - p_minus)


def slavnov_restricted(L, N1, N2, u_list, v_list, z_list, eta=DEFAULT_ETA):
    """Restricted scalar product for inhomogeneous quantum rapidities.

    The u are expected to satisfy the Bethe equations for z_list; this is not
    checked so that callers may evaluate mid-continuation.
    """
    us = as_complex_array(u_list, "u")
    vs = as_complex_array(v_list, "v")
    eta = as_complex(eta, "eta")
    _check_counts(L, N1, N2, us, vs)
    zs = z_array(z_list, L)
    N3 = N1 - N2
    M = np.empty((N1, N1), dtype=complex)
    num = 1.0 + 0j
    for i, ui in enumerate(us):
        for j in range(N3):
            d = check_distinct(ui, zs[j])
            dp = check_distinct(ui + eta, zs[j])
            f = eta / (dp * d)
            for vk in vs:
                f /= check_distinct(vk, zs[j])
            M[i, j] = f
            num *= dp
    for j, vj in enumerate(vs):
        bulk = 1.0 + 0j
        for zk in zs:
            d = check_distinct(vj, zk)
            bulk *= (d + eta) / d
        for i in range(N1):
            M[i, N3 + j] = _g_entry(i, vj, us, bulk, eta)
    den = _vandermonde(us) * _vandermonde(vs, descending=True) * _vandermonde(zs[:N3], descending=True)
    sign = (-1) ** (N2 * N3)
    return sign * num / den * det(M)


def f_taylor(ui, v_list, z, eta, order):
    """Taylor coefficients in eps of eta/((u-z-eps+eta)(u-z-eps)) * prod_k 1/(v_k-z-eps)."""
    s = power_series([eta] + [0] * order)
    poles = [check_distinct(ui + eta, z), check_distinct(ui, z)]
    poles += [check_distinct(vk, z) for vk in v_list]
    for c in poles:
        s = series_mul(s, pole_series(c, order))
    return np.array(s.coeffs)


def check_onshell(u_list, L, z, eta, what):
    res = max_residual(u_list, L, z, eta)
    if not res <= ONSHELL_TOL:
        raise UnverifiedRoots(f"{what} requires Bethe roots; residual is {res:.3g}", residual=res)
    return res


def slavnov_hom(L, N1, N2, u_list, v_list, z=DEFAULT_Z, eta=DEFAULT_ETA, check_roots=True):
    """Restricted scalar product at coincident quantum rapidities z_j = z.

    With ``check_roots`` the u must satisfy the homogeneous Bethe equations to
    1e-8, otherwise UnverifiedRoots is raised.
    """
    us = as_complex_array(u_list, "u")
    vs = as_complex_array(v_list, "v")
    z = as_complex(z, "z")
    eta = as_complex(eta, "eta")
    _check_counts(L, N1, N2, us, vs)
    if check_roots:
        check_onshell(us, L, z, eta, "slavnov_hom")
    N3 = N1 - N2
    M = np.empty((N1, N1), dtype=complex)
    if N3 > 0:
        for i, ui in enumerate(us):
            M[i, :N3] = f_taylor(ui, vs, z, eta, N3 - 1)
    for j, vj in enumerate(vs):
        d = check_distinct(vj, z)
        bulk = _ipow((d + eta) / d, L)
        for i in range(N1):
            M[i, N3 + j] = _g_entry(i, vj, us, bulk, eta)
    num = 1.0 + 0j
    for ui in us:
        num *= _ipow(check_distinct(ui + eta, z), N3)
    den = _vandermonde(us) * _vandermonde(vs, descending=True)
    sign = (-1) ** (N2 * N3 + N3 * (N3 - 1) // 2)
    return sign * num / den * det(M)


def gaudin_matrix(u_list, L, z=DEFAULT_Z, eta=DEFAULT_ETA):
    """Phi'_ij = -d/du_j log[a(u_i)**L prod_{k != i} (u_k-u_i+eta)/(u_k-u_i-eta)]."""
    us = as_complex_array(u_list, "u")
    z = as_complex(z, "z")
    eta = as_complex(eta, "eta")
    N = us.size
    P = np.empty((N, N), dtype=complex)
    for i, ui in enumerate(us):
        d = check_distinct(ui, z)
        diag = L / (d + eta) - L / d
        for j, uj in enumerate(us):
            if j == i:
                continue
            x = check_distinct(uj, ui)
            t = 1 / (x + eta) - 1 / (x - eta)
            diag -= t
            P[i, j] = -t
        P[i, i] = -diag
    return P


def gaudin_norm(L, u_list, z=DEFAULT_Z, eta=DEFAULT_ETA, check_roots=True):
    """Squared norm <0|C(u_1)..C(u_N) B(u_N)..B(u_1)|0> of a Bethe state."""
    us = as_complex_array(u_list, "u")
    eta = as_complex(eta, "eta")
    if check_roots:
        check_onshell(us, L, z, eta, "gaudin_norm")
    pre = _ipow(eta, us.size)
    for i, j in itertools.permutations(range(us.size), 2):
        d = check_distinct(us[i], us[j])
        pre *= (d + eta) / d
    return pre * det(gaudin_matrix(us, L, z, eta))
