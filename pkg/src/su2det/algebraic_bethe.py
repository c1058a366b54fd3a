"""Monodromy matrix, Bethe equations, root solving and Bethe eigenstates.

Conventions: the monodromy matrix is the ordered product T = L_1 L_2 ... L_L
over sites in the auxiliary space, with blocks A = T_00, B = T_01, C = T_10,
D = T_11. B adds a down arrow, C removes one.

The solver works in the scaled variable y = i (u - z + eta/2) / eta, in which
the Bethe equations take the form ((y + i/2)/(y - i/2))**L = prod_k (y - y_k + i)/(y - y_k - i)
for any eta. At the defaults eta = i, z = i/2 the two variables coincide.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import (CoincidentRapidities, CollidingRoots, InvalidGeometry, InvalidInput,
                     NoConvergence, SingularJacobian, TooLarge)
from .numerics import as_complex, as_complex_array, newton_solve
from .vertex_model import (DEFAULT_ETA, DEFAULT_Z, apply_line, as_weights, check_distinct,
                           reference_state, z_array)

MATRIX_CAP = 10
STATE_CAP = 16
ROOT_SEPARATION = 1e-10
NULL_VECTOR_TOL = 1e-8
MAX_ROOT = 1e6


@dataclass(frozen=True)
class MonodromyBlocks:
    L: int
    x: complex
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def block(self, alpha, beta):
        return ((self.A, self.B), (self.C, self.D))[alpha][beta]


@dataclass(frozen=True)
class BetheRoots:
    L: int
    N: int
    eta: complex
    z: object
    roots: tuple
    residual: float
    mode_numbers: tuple = None
    status: str = "verified"

    @property
    def u(self):
        return np.array(self.roots, dtype=complex)


@dataclass(frozen=True)
class BetheState:
    roots: object
    vector: np.ndarray = field(repr=False)

    @property
    def L(self):
        return self.vector.size.bit_length() - 1


def r_matrix(x, z, w=None):
    """4x4 R-matrix in the basis |aux, site> with the rational weights."""
    w = as_weights(w)
    a, b, c = w.a(x, z), w.b(x, z), w.c(x, z)
    return np.array([[a, 0, 0, 0],
                     [0, b, c, 0],
                     [0, c, b, 0],
                     [0, 0, 0, a]], dtype=complex)


def _site_operators(R):
    # op[alpha][beta][s_out, s_in] = R[2*alpha + s_out, 2*beta + s_in]
    return [[R[2 * al:2 * al + 2, 2 * be:2 * be + 2] for be in (0, 1)] for al in (0, 1)]


def _right_multiply_site(M, op, L, j):
    """M @ (identity except op on site j), acting on the column index."""
    n = 1 << L
    t = M.reshape(n, 1 << (L - 1 - j), 2, 1 << j)
    return np.einsum("rhsl,st->rhtl", t, op).reshape(n, n)


def build_monodromy(x, z_list, w=None, L=None):
    """Explicit 2**L x 2**L blocks of the monodromy matrix."""
    w = as_weights(w)
    x = as_complex(x, "x")
    zs = z_array(z_list, L)
    L = zs.size
    if L > MATRIX_CAP:
        raise TooLarge(f"explicit monodromy limited to L <= {MATRIX_CAP}", L=L, cap=MATRIX_CAP)
    n = 1 << L
    eye = np.eye(n, dtype=complex)
    T = [[eye, np.zeros((n, n), complex)], [np.zeros((n, n), complex), eye]]
    for j, zj in enumerate(zs):
        ops = _site_operators(r_matrix(x, zj, w))
        T = [[sum(_right_multiply_site(T[al][ga], ops[ga][be], L, j) for ga in (0, 1))
              for be in (0, 1)] for al in (0, 1)]
    return MonodromyBlocks(L, x, T[0][0], T[0][1], T[1][0], T[1][1])


def _a_product(u, zs, eta):
    p = 1.0 + 0j
    for zj in zs:
        d = check_distinct(u, zj)
        p *= (d + eta) / d
    return p


def _check_pairwise(us):
    for i, j in itertools.combinations(range(len(us)), 2):
        check_distinct(us[i], us[j])


def bethe_quotients(u_list, L, z=DEFAULT_Z, eta=DEFAULT_ETA):
    """Q_i = a(u_i)**L * prod_{k != i} (u_i-u_k-eta)/(u_i-u_k+eta); Bethe roots give Q_i = 1."""
    us = as_complex_array(u_list, "u")
    eta = as_complex(eta, "eta")
    zs = z_array(z, L)
    _check_pairwise(us)
    q = np.empty(us.size, dtype=complex)
    for i, ui in enumerate(us):
        p = _a_product(ui, zs, eta)
        for k, uk in enumerate(us):
            if k != i:
                d = ui - uk
                den = d + eta
                if abs(den) < 1e-300:
                    raise CoincidentRapidities("u_i - u_k + eta vanishes", i=i, k=k)
                p *= (d - eta) / den
        q[i] = p
    return q


def bethe_residual(u_list, L, z=DEFAULT_Z, eta=DEFAULT_ETA):
    """Componentwise |Q_i - 1| of the Bethe equations."""
    return np.abs(bethe_quotients(u_list, L, z, eta) - 1.0)


def max_residual(u_list, L, z=DEFAULT_Z, eta=DEFAULT_ETA):
    r = bethe_residual(u_list, L, z, eta)
    return float(np.max(r)) if r.size else 0.0


def to_scaled(u, z=DEFAULT_Z, eta=DEFAULT_ETA):
    return 1j * (np.asarray(u, dtype=complex) - z + eta / 2) / eta


def from_scaled(y, z=DEFAULT_Z, eta=DEFAULT_ETA):
    return z - eta / 2 - 1j * eta * np.asarray(y, dtype=complex)


def _momentum(y):
    return np.pi - 2 * np.arctan(2 * y)


def _scattering(x):
    return np.pi - 2 * np.arctan(x)


def _log_phases(y, L):
    N = y.size
    out = L * _momentum(y)
    for j in range(N):
        for k in range(N):
            if k != j:
                out[j] -= _scattering(y[j] - y[k])
    return out


def _log_jacobian(y, L):
    N = y.size
    J = np.zeros((N, N), dtype=complex)
    for j in range(N):
        J[j, j] = -4 * L / (1 + 4 * y[j] ** 2)
        for k in range(N):
            if k != j:
                g = 2 / (1 + (y[j] - y[k]) ** 2)
                J[j, j] += g
                J[j, k] = -g
    return J


def normalize_modes(modes, L):
    """Reduce mode numbers mod L; they must be nonzero and pairwise distinct."""
    ms = [int(m) % L for m in modes]
    if any(m == 0 for m in ms):
        raise InvalidInput("mode numbers must be nonzero mod L", modes=list(modes), L=L)
    if len(set(ms)) != len(ms):
        raise InvalidInput("mode numbers must be distinct mod L", modes=list(modes), L=L)
    return ms


def mode_seed(modes, L, z=DEFAULT_Z, eta=DEFAULT_ETA):
    """Free-magnon seed u = 1/2 cot(pi m / L), written in rapidity variables."""
    ms = normalize_modes(modes, L)
    y0 = np.array([0.5 / np.tan(np.pi * m / L) for m in ms], dtype=complex)
    return from_scaled(y0, z, eta)


def solve_bethe(L, N, seed=None, tol=1e-12, z=DEFAULT_Z, eta=DEFAULT_ETA, max_iter=100):
    """Solve the homogeneous Bethe equations by Newton on their logarithmic form.

    ``seed`` is either a sequence of N integer mode numbers or a sequence of N
    complex initial guesses. The branch integers of the logarithms are fixed
    from the seed. The result is verified on the multiplicative equations.
    """
    eta = as_complex(eta, "eta")
    z = as_complex(z, "z")
    if N < 0 or L < 1 or N > L:
        raise InvalidGeometry("need 0 <= N <= L and L >= 1", L=L, N=N)
    if N == 0:
        return BetheRoots(L, 0, eta, z, (), 0.0, (), "verified")
    if seed is None:
        seed = _default_modes(L, N)
    seed = list(seed)
    if len(seed) != N:
        raise InvalidInput(f"seed must have {N} entries", got=len(seed))
    modes = None
    if all(isinstance(s, (int, np.integer)) for s in seed):
        modes = tuple(int(s) for s in seed)
        u0 = mode_seed(modes, L, z, eta)
    else:
        u0 = as_complex_array(seed, "seed")
    y0 = to_scaled(u0, z, eta)
    with np.errstate(all="ignore"):
        phases = _log_phases(y0, L)
    if not np.all(np.isfinite(phases)):
        raise InvalidInput("seed sits on a singularity of the Bethe equations")
    n = np.round(phases.real / (2 * np.pi))

    def F(y):
        with np.errstate(all="ignore"):
            return _log_phases(y, L) - 2 * np.pi * n

    def J(y):
        with np.errstate(all="ignore"):
            return _log_jacobian(y, L)

    try:
        y = newton_solve(F, y0, J, tol=1e-13, max_iter=max_iter)
    except NoConvergence as exc:
        if exc.best is None:
            raise
        y = exc.best
    if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > MAX_ROOT:
        raise NoConvergence("roots ran away to infinity", best=from_scaled(y, z, eta), residual=float("inf"))
    u = from_scaled(y, z, eta)
    for i, j in itertools.combinations(range(N), 2):
        if abs(u[i] - u[j]) < ROOT_SEPARATION:
            raise CollidingRoots("solver returned coincident roots", i=i, j=j)
    try:
        res = max_residual(u, L, z, eta)
    except CoincidentRapidities as exc:
        raise NoConvergence("roots hit a pole of the Bethe equations", best=u, residual=float("inf")) from exc
    if not res <= tol:
        raise NoConvergence(f"Bethe residual {res:.3g} above tolerance {tol:.3g}", best=u, residual=res)
    return BetheRoots(L, N, eta, z, tuple(complex(x) for x in u), res, modes, "verified")


def _default_modes(L, N):
    # alternate 1, -1, 2, -2, ... as the low-lying choice
    out = []
    k = 1
    while len(out) < N:
        out.append(k)
        if len(out) < N:
            out.append(-k)
        k += 1
    return out


def continue_roots(roots, z_list, steps=4, tol=1e-12, max_iter=50):
    """Follow Bethe roots from their homogeneous point to inhomogeneous z_list.

    The quantum rapidities are moved linearly in ``steps`` stages and Newton
    is re-run on the multiplicative equations at each stage.
    """
    L, eta = roots.L, roots.eta
    z_target = z_array(z_list, L)
    z_start = z_array(roots.z, L)
    u = roots.u.copy()
    if u.size == 0:
        return BetheRoots(L, 0, eta, tuple(z_target), (), 0.0, roots.mode_numbers, "verified")
    for s in range(1, steps + 1):
        zs = z_start + (z_target - z_start) * s / steps

        def F(x, zs=zs):
            return bethe_quotients(x, L, zs, eta) - 1.0

        def Jac(x, zs=zs):
            q = bethe_quotients(x, L, zs, eta)
            N = x.size
            J = np.zeros((N, N), dtype=complex)
            for i in range(N):
                J[i, i] = np.sum(1 / (x[i] - zs + eta) - 1 / (x[i] - zs))
                for k in range(N):
                    if k != i:
                        d = x[i] - x[k]
                        t = 1 / (d - eta) - 1 / (d + eta)
                        J[i, i] += t
                        J[i, k] = -t
                J[i] *= q[i]
            return J

        u = newton_solve(F, u, Jac, tol=tol, max_iter=max_iter)
    for i, j in itertools.combinations(range(u.size), 2):
        if abs(u[i] - u[j]) < ROOT_SEPARATION:
            raise CollidingRoots("continuation merged two roots", i=i, j=j)
    res = max_residual(u, L, z_target, eta)
    return BetheRoots(L, u.size, eta, tuple(complex(x) for x in z_target), tuple(complex(x) for x in u),
                      res, roots.mode_numbers, "verified")


def build_bethe_state(roots, z_list=None, L=None, eta=None, cap=STATE_CAP):
    """|psi> = B(u_N) ... B(u_1)|all up>, built by line transfer."""
    if isinstance(roots, BetheRoots):
        us = roots.u
        L = roots.L if L is None else L
        eta = roots.eta if eta is None else eta
        z_list = roots.z if z_list is None else z_list
    else:
        us = as_complex_array(roots, "u")
        eta = DEFAULT_ETA if eta is None else eta
        z_list = DEFAULT_Z if z_list is None else z_list
        if L is None:
            if np.ndim(z_list) == 0:
                raise InvalidInput("chain length needed for a homogeneous z")
            L = len(z_list)
    if L > cap:
        raise TooLarge(f"state vectors limited to L <= {cap}", L=L, cap=cap)
    if us.size > L:
        raise InvalidGeometry("more magnons than sites", L=L, N=int(us.size))
    zs = z_array(z_list, L)
    w = as_weights(eta)
    vec = reference_state(L)
    for x in us:
        vec = apply_line("B", x, zs, vec, w)
    return BetheState(roots, vec)


def transfer_apply(x, z_list, vec, eta=DEFAULT_ETA):
    """(A(x) + D(x)) vec by line transfer."""
    w = as_weights(eta)
    return apply_line("A", x, z_list, vec, w) + apply_line("D", x, z_list, vec, w)


def eigencheck(state, x, z_list=None, eta=None):
    """Eigenvalue estimate and relative residual of the transfer matrix on a state.

    The eigenvalue is the Hermitian Rayleigh quotient <psi|T psi>/<psi|psi>;
    the residual is ||T psi - lambda psi||_inf / ||psi||_inf.
    """
    psi = state.vector
    L = state.L
    roots = state.roots
    if isinstance(roots, BetheRoots):
        z_list = roots.z if z_list is None else z_list
        eta = roots.eta if eta is None else eta
    z_list = DEFAULT_Z if z_list is None else z_list
    eta = DEFAULT_ETA if eta is None else eta
    norm = np.max(np.abs(psi))
    if norm == 0:
        raise InvalidInput("eigencheck on the zero vector")
    Tpsi = transfer_apply(x, z_array(z_list, L), psi, eta)
    lam = np.vdot(psi, Tpsi) / np.vdot(psi, psi)
    return complex(lam), float(np.max(np.abs(Tpsi - lam * psi)) / norm)


def null_measure(roots):
    """Size of the Bethe vector relative to the natural scale of its weights.

    Solutions of the Bethe equations whose state vector vanishes identically
    give values at the roundoff level; physical states give O(1) values.
    """
    psi = build_bethe_state(roots).vector
    zs = z_array(roots.z, roots.L)
    w = as_weights(roots.eta)
    scale = 1.0
    for x in roots.u:
        amax = max(abs(w.a(x, zj)) for zj in zs)
        cmax = max(abs(w.c(x, zj)) for zj in zs)
        scale *= max(1.0, cmax) * max(1.0, amax) ** roots.L
    return float(np.linalg.norm(psi) / scale)


def find_bethe_solutions(L, N, tol=1e-12, z=DEFAULT_Z, eta=DEFAULT_ETA, drop_null=True):
    """All distinct solutions reached from mode-number seeds drawn from 1..L-1.

    Seeds that fail to converge, collide, run to infinity, hit the singular
    points u = z or u = z - eta, or give a vanishing Bethe vector are dropped.
    """
    if N == 0:
        return [solve_bethe(L, 0, z=z, eta=eta)]
    found = []
    for modes in itertools.combinations(range(1, L), N):
        try:
            r = solve_bethe(L, N, modes, tol=tol, z=z, eta=eta)
        except (NoConvergence, CollidingRoots, SingularJacobian, CoincidentRapidities, InvalidInput):
            continue
        u = r.u
        if np.max(np.abs(u)) > MAX_ROOT:
            continue
        if min(min(abs(u - z)), min(abs(u - z + eta))) < 1e-6:
            continue
        if N > 1 and min(abs(u[i] - u[j]) for i, j in itertools.combinations(range(N), 2)) < 1e-6:
            continue
        if drop_null and L <= STATE_CAP and null_measure(r) < NULL_VECTOR_TOL:
            continue
        key = np.array(sorted(u, key=lambda t: (round(t.real, 8), round(t.imag, 8))))
        if any(np.allclose(key, k, atol=1e-8) for k, _ in found):
            continue
        found.append((key, r))
    return [r for _, r in found]
