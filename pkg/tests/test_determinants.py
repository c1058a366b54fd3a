import itertools

import numpy as np
import pytest

from conftest import rand_c, rel
from su2det.algebraic_bethe import continue_roots, find_bethe_solutions, solve_bethe
from su2det.determinants import (SlavnovInput, gaudin_matrix, gaudin_norm, izergin, izergin_hom, slavnov_hom,
                                 slavnov_restricted)
from su2det.errors import CoincidentRapidities, InvalidGeometry, UnverifiedRoots
from su2det.verify import explicit_norm
from su2det.vertex_model import brute_dwpf, brute_restricted

ETA, Z = 1j, 0.5j
S = 1 / (2 * np.sqrt(3))


def centered(n):
    return np.arange(n) * 2 - (n - 1)


def test_izergin_small():
    w, z = 0.3 + 0.4j, -0.1j
    assert izergin([w], [z]) == pytest.approx(ETA / (w - z))
    assert izergin([], []) == 1


@pytest.mark.parametrize("N", [2, 3])
def test_izergin_matches_lattice(rng, N):
    for _ in range(5):
        w, z = rand_c(rng, N), rand_c(rng, N)
        assert rel(izergin(w, z), brute_dwpf(w, z)) < 1e-10


def test_izergin_coincident():
    with pytest.raises(CoincidentRapidities):
        izergin([0.1, 0.1], [0.2j, 0.3j])
    with pytest.raises(CoincidentRapidities):
        izergin([0.1, 0.2], [0.3j, 0.3j])
    with pytest.raises(InvalidGeometry):
        izergin([0.1], [0.2, 0.3])


def test_izergin_hom_single():
    w = 0.2 - 0.3j
    assert izergin_hom([w], Z) == pytest.approx(ETA / (w - Z))


def test_izergin_hom_limit(rng):
    w = rand_c(rng, 3)
    H = izergin_hom(w, Z)
    # offsets symmetric about z cancel the first-order term
    assert rel(izergin(w, Z + centered(3) * 1e-4), H) < 1e-6
    # offsets 1..N converge at first order
    e4 = rel(izergin(w, Z + np.arange(1, 4) * 1e-4), H)
    e5 = rel(izergin(w, Z + np.arange(1, 4) * 1e-5), H)
    assert e5 < e4 and e5 < 1e-3


def test_izergin_hom_symmetric_pair():
    assert rel(izergin_hom([0.4, -0.4]), izergin_hom([-0.4, 0.4])) < 1e-14


def test_izergin_hom_matches_lattice(rng):
    w = rand_c(rng, 4)
    assert rel(izergin_hom(w, Z), brute_dwpf(w, [Z] * 4)) < 1e-10


def test_slavnov_restricted_trivial(rng):
    assert slavnov_restricted(3, 0, 0, [], [], [0.1, 0.2, 0.3]) == 1
    for N in (1, 2, 3):
        u, z = rand_c(rng, N), rand_c(rng, N)
        assert rel(slavnov_restricted(N, N, 0, u, [], z), izergin(u, z)) < 1e-12


def test_slavnov_restricted_continued_roots(rng):
    zs = Z + np.arange(1, 5) * 1e-2
    r = continue_roots(solve_bethe(4, 2, (1, -1)), zs)
    v = rand_c(rng, 2)
    assert rel(slavnov_restricted(4, 2, 2, r.u, v, zs), brute_restricted(4, 2, 2, r.u, v, zs)) < 1e-9


@pytest.mark.parametrize("L,N1", [(5, 2), (6, 3)])
def test_slavnov_restricted_generic_inhomogeneous(rng, L, N1):
    zs = Z + 0.1 * rand_c(rng, L)
    r = continue_roots(find_bethe_solutions(L, N1)[0], zs, steps=6)
    for N2 in range(N1 + 1):
        v = rand_c(rng, N2)
        assert rel(slavnov_restricted(L, N1, N2, r.u, v, zs), brute_restricted(L, N1, N2, r.u, v, zs)) < 1e-9


def test_slavnov_restricted_n2_zero_off_shell(rng):
    # without C-lines the identity holds for arbitrary u
    zs = rand_c(rng, 5)
    u = rand_c(rng, 3)
    assert rel(slavnov_restricted(5, 3, 0, u, [], zs), brute_restricted(5, 3, 0, u, [], zs)) < 1e-10


def test_slavnov_hom_trivial():
    assert slavnov_hom(4, 0, 0, [], []) == 1


def test_slavnov_hom_matches_lattice():
    v = [0.3 + 0.2j]
    assert rel(slavnov_hom(4, 2, 1, [S, -S], v), brute_restricted(4, 2, 1, [S, -S], v, Z)) < 1e-9
    v2 = [0.3 + 0.2j, -0.4 + 0.1j]
    # lattice value frozen from the line-transfer oracle
    assert abs(slavnov_hom(4, 2, 2, [S, -S], v2) - (1879.3402777777785 + 267.65046296296373j)) < 1e-8


def test_slavnov_hom_requires_bethe_roots(rng):
    with pytest.raises(UnverifiedRoots):
        slavnov_hom(4, 2, 1, [0.1, 0.3], [0.2j])
    slavnov_hom(4, 2, 1, [0.1, 0.3], [0.2j], check_roots=False)


def test_slavnov_input_dispatch(rng):
    v = (0.3 + 0.2j,)
    inp = SlavnovInput(4, 2, 1, (S, -S), v)
    assert inp.N3 == 1
    assert inp.evaluate() == slavnov_hom(4, 2, 1, [S, -S], v)
    zs = tuple(Z + np.arange(4) * 1e-3)
    assert SlavnovInput(4, 2, 1, (S, -S), v, zs).evaluate() == slavnov_restricted(4, 2, 1, [S, -S], v, zs)


def test_slavnov_geometry_errors():
    with pytest.raises(InvalidGeometry):
        slavnov_hom(4, 1, 2, [0.1], [0.2, 0.3], check_roots=False)
    with pytest.raises(InvalidGeometry):
        slavnov_restricted(4, 2, 1, [0.1, 0.2], [0.3], [0.1, 0.2])


def test_slavnov_hom_diagonal_limit(rng):
    u = np.array([S, -S])
    G = gaudin_norm(4, u)
    d = rand_c(rng, 2)
    vals = [slavnov_hom(4, 2, 2, u, u + s * d) for s in (1e-2, 1e-3, 1e-4)]
    # first-order Richardson extrapolation in s
    extrap = (10 * vals[2] - vals[1]) / 9
    assert rel(extrap, G) < 1e-5
    assert rel(slavnov_hom(4, 2, 2, u, u + 1e-3), G) < 2e-2


def test_gaudin_small_cases():
    assert gaudin_norm(4, []) == 1
    # explicit-vector norms frozen from the lattice oracle
    assert abs(gaudin_norm(4, [0.5]) - (-8)) < 1e-10
    assert abs(gaudin_norm(4, [S, -S]) - 432) < 1e-9


@pytest.mark.parametrize("L,N", [(4, 1), (4, 2), (6, 1), (6, 2), (6, 3)])
def test_gaudin_matches_explicit_norm(L, N):
    for r in find_bethe_solutions(L, N):
        assert rel(gaudin_norm(L, r.u), explicit_norm(r)) < 1e-9


def test_gaudin_requires_roots():
    with pytest.raises(UnverifiedRoots):
        gaudin_norm(4, [0.1, 0.2])


def test_gaudin_matrix_finite_differences(rng):
    L = 6
    u = find_bethe_solutions(L, 3)[0].u
    P = gaudin_matrix(u, L)

    def q(x, i):
        a = ((x[i] - Z + ETA) / (x[i] - Z)) ** L
        return a * np.prod([(x[k] - x[i] + ETA) / (x[k] - x[i] - ETA) for k in range(len(x)) if k != i])

    h = 1e-6
    for i, j in itertools.product(range(3), repeat=2):
        xp, xm = u.copy(), u.copy()
        xp[j] += h
        xm[j] -= h
        # log of the quotient avoids branch jumps
        fd = -np.log(q(xp, i) / q(xm, i)) / (2 * h)
        assert abs(fd - P[i, j]) <= 1e-6 * max(abs(P[i, j]), 1.0)


def perms(rng, x):
    return np.asarray(x)[rng.permutation(len(x))]


def test_permutation_invariance(rng):
    w, z = rand_c(rng, 3), rand_c(rng, 3)
    assert rel(izergin(perms(rng, w), perms(rng, z)), izergin(w, z)) < 1e-11
    assert rel(izergin_hom(perms(rng, w)), izergin_hom(w)) < 1e-11
    r = find_bethe_solutions(6, 3)[0]
    v = rand_c(rng, 2)
    assert rel(slavnov_hom(6, 3, 2, perms(rng, r.u), perms(rng, v)), slavnov_hom(6, 3, 2, r.u, v)) < 1e-11
    assert rel(gaudin_norm(6, perms(rng, r.u)), gaudin_norm(6, r.u)) < 1e-11
    zs = rand_c(rng, 5)
    u = rand_c(rng, 3)
    v = rand_c(rng, 1)
    pz = np.concatenate([perms(rng, zs[:2]), zs[2:]])
    assert rel(slavnov_restricted(5, 3, 1, perms(rng, u), v, pz), slavnov_restricted(5, 3, 1, u, v, zs)) < 1e-11
