import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import rand_c, rel
from su2det.algebraic_bethe import build_monodromy, solve_bethe
from su2det.determinants import izergin, slavnov_hom
from su2det.errors import CoincidentRapidities, InvalidGeometry, InvalidInput
from su2det.vertex_model import (VertexWeights, apply_b_line, apply_c_line, brute_dwpf, brute_restricted,
                                 dual_dwpf, popcount, reference_state, weight)

ETA = 1j


def enumerate_line(kind_ends, u, zs, in_mask, eta=ETA):
    """Sum over every internal horizontal-arrow assignment of one line (independent oracle).

    A horizontal segment carries 0 or 1 and a vertical segment 0 (up) or 1
    (down). Arrow conservation at a vertex (h_in, s_in) -> (h_out, s_out)
    reads h_in - s_in = h_out - s_out.
    """
    L = len(zs)
    start, end = kind_ends
    out = {}
    for hs in itertools.product((0, 1), repeat=L - 1):
        h = (start,) + hs + (end,)
        for outs in itertools.product((0, 1), repeat=L):
            wgt = 1.0 + 0j
            for j in range(L):
                s_in = (in_mask >> j) & 1
                if h[j] - s_in != h[j + 1] - outs[j]:
                    wgt = 0
                    break
                d = u - zs[j]
                if h[j] == h[j + 1]:
                    wgt *= (d + eta) / d if h[j] == s_in else 1.0
                else:
                    wgt *= eta / d
            if wgt != 0:
                m = sum(o << j for j, o in enumerate(outs))
                out[m] = out.get(m, 0) + wgt
    return out


def test_weight_values():
    w = VertexWeights()
    assert weight("b", 0.3, 0.7j, w) == 1
    assert weight("a", 0.1 + 1j, 0.1, w) == pytest.approx(2)
    assert weight("c", 0.1 + 1j, 0.1, w) == pytest.approx(1)


def test_weight_pole_and_kind_errors():
    with pytest.raises(CoincidentRapidities):
        weight("a", 0.2, 0.2)
    with pytest.raises(CoincidentRapidities):
        weight("c", 0.2, 0.2 + 1e-15)
    with pytest.raises(InvalidInput):
        weight("d", 0.1, 0.2)
    with pytest.raises(InvalidInput):
        VertexWeights(0)


def test_one_column_b_and_c_lines():
    z = 0.5j
    u = z + ETA
    b = apply_b_line(u, [z], reference_state(1))
    assert np.allclose(b, [0, 1])
    c = apply_c_line(u, [z], np.array([0, 1], dtype=complex))
    assert np.allclose(c, [1, 0])


def test_two_column_b_line_amplitudes():
    u, z = 0.3 + 0.1j, 0.5j
    w = VertexWeights()
    out = apply_b_line(u, [z, z], reference_state(2))
    # down arrow leaves at column 0 (c then b) or at column 1 (a then c)
    assert out[0b01] == pytest.approx(w.c(u, z))
    assert out[0b10] == pytest.approx(w.c(u, z) * w.a(u, z))
    assert out[0] == 0 and out[3] == 0


def test_c_after_b_on_one_column():
    z = 0.5j
    u1, u2 = 0.3 + 0.2j, -0.6 + 0.1j
    w = VertexWeights()
    v = apply_c_line(u2, [z], apply_b_line(u1, [z], reference_state(1)))
    assert np.allclose(v, [w.c(u1, z) * w.c(u2, z), 0])


def test_zero_input_gives_zero():
    assert not np.any(apply_b_line(0.3, [0.1j, 0.2j, 0.3j], np.zeros(8, complex)))


@pytest.mark.parametrize("L", [1, 2, 3])
@pytest.mark.parametrize("kind,ends,fn", [("B", (0, 1), apply_b_line), ("C", (1, 0), apply_c_line)])
def test_line_transfer_matches_enumeration(rng, L, kind, ends, fn):
    zs = rand_c(rng, L)
    u = complex(rand_c(rng, 1)[0])
    for m in range(1 << L):
        e = np.zeros(1 << L, complex)
        e[m] = 1
        got = fn(u, zs, e)
        ref = np.zeros(1 << L, complex)
        for k, val in enumerate_line(ends, u, zs, m).items():
            ref[k] = val
        assert np.allclose(got, ref, rtol=1e-13, atol=1e-13)


def test_line_coincidence_raises():
    with pytest.raises(CoincidentRapidities):
        apply_b_line(0.2j, [0.1, 0.2j], reference_state(2))


def test_dwpf_small_cases(rng):
    w, z = 0.4 + 0.3j, -0.2j
    assert brute_dwpf([w], [z]) == pytest.approx(ETA / (w - z))
    assert brute_dwpf([], []) == 1
    assert rel(brute_dwpf([0.3, -0.7], [0.1j, -0.2j]), izergin([0.3, -0.7], [0.1j, -0.2j])) < 1e-11
    ws, zs = rand_c(rng, 3), rand_c(rng, 3)
    assert rel(brute_dwpf(ws, zs), izergin(ws, zs)) < 1e-10


def test_dwpf_frozen_value():
    # lattice value frozen from the line-transfer oracle
    assert abs(brute_dwpf([0.3, -0.7], [0.1j, -0.2j]) - (25.973875181422354 + 4.168359941944846j)) < 1e-12


def test_dwpf_cardinality_mismatch():
    with pytest.raises(InvalidGeometry):
        brute_dwpf([0.1, 0.2], [0.3j])


def test_restricted_trivial_cases(rng):
    assert brute_restricted(4, 0, 0, [], [], 0.5j) == 1
    for N in (1, 2, 3):
        us, zs = rand_c(rng, N), rand_c(rng, N)
        assert rel(brute_restricted(N, N, 0, us, [], zs), brute_dwpf(us, zs)) < 1e-13


def test_restricted_against_determinant():
    u = solve_bethe(4, 2, (1, -1)).u
    v = [0.3 + 0.2j]
    b = brute_restricted(4, 2, 1, u, v, 0.5j)
    assert rel(b, slavnov_hom(4, 2, 1, u, v)) < 1e-9
    # exact rational value -3500/27 + 500/9 i, frozen from the lattice oracle
    assert abs(b - (-3500 / 27 + 500j / 9)) < 1e-10


def test_restricted_geometry_errors():
    with pytest.raises(InvalidGeometry):
        brute_restricted(3, 1, 2, [0.1], [0.2, 0.3], 0.5j)
    with pytest.raises(InvalidGeometry):
        brute_restricted(3, 2, 1, [0.1], [0.2], 0.5j)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2 ** 31 - 1))
def test_popcount_selection_rule(L, seed):
    rng = np.random.default_rng(seed)
    zs = rand_c(rng, L)
    u = complex(rand_c(rng, 1)[0])
    vec = rand_c(rng, 1 << L)
    for fn, shift in ((apply_b_line, 1), (apply_c_line, -1)):
        for m in range(1 << L):
            e = np.zeros(1 << L, complex)
            e[m] = vec[m]
            out = fn(u, zs, e)
            for k in np.nonzero(np.abs(out) > 0)[0]:
                assert popcount(k) == popcount(m) + shift


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_arrow_reversal(rng, N):
    for _ in range(5):
        ws, zs = rand_c(rng, N), rand_c(rng, N)
        assert rel(dual_dwpf(ws, zs), brute_dwpf(ws, zs)) < 1e-12


@pytest.mark.parametrize("L", [2, 4, 6])
def test_b_lines_commute(rng, L):
    zs = rand_c(rng, L)
    u1, u2 = rand_c(rng, 2)
    vec = rand_c(rng, 1 << L)
    x = apply_b_line(u1, zs, apply_b_line(u2, zs, vec))
    y = apply_b_line(u2, zs, apply_b_line(u1, zs, vec))
    assert np.max(np.abs(x - y)) <= 1e-12 * np.max(np.abs(x))


@pytest.mark.parametrize("L", [1, 3, 6])
def test_lines_match_monodromy_blocks(rng, L):
    zs = rand_c(rng, L)
    u = complex(rand_c(rng, 1)[0])
    M = build_monodromy(u, zs)
    vec = rand_c(rng, 1 << L)
    for blk, fn in ((M.B, apply_b_line), (M.C, apply_c_line)):
        ref = blk @ vec
        assert np.max(np.abs(fn(u, zs, vec) - ref)) <= 1e-12 * np.max(np.abs(ref))
