import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from condswap.coherent import (CoherentSuperposition, fidelity_coherent, gram, mode_transform, overlap,
                               phase_shift, secs, to_fock)
from condswap.errors import CutoffTooSmall, NonUnitary, ZeroState
from condswap.hilbert import FockCutoff, bs_matrix, coherent_amplitudes, coherent_fock, fidelity_fock
from condswap.protocol import BALANCED_BS

A, B = 6 * math.sqrt(2), math.sqrt(2)


def series_overlap(a, b, nmax=60):
    """Single-mode ``<a|b>`` by summing Fock amplitudes."""
    return complex(np.vdot(coherent_amplitudes(a, nmax), coherent_amplitudes(b, nmax)))


def test_self_overlap():
    s = CoherentSuperposition.product(0.7 - 0.2j, 1.3)
    assert overlap(s, s) == pytest.approx(1.0)


def test_vacuum_overlap():
    alpha = 0.9 + 0.4j
    got = overlap(CoherentSuperposition.product(0, 0), CoherentSuperposition.product(alpha, 0))
    assert got == pytest.approx(math.exp(-abs(alpha) ** 2 / 2))


def test_large_amplitude_overlap():
    got = overlap(CoherentSuperposition.product(A, 0), CoherentSuperposition.product(B, 0))
    assert got.real == pytest.approx(math.exp(-25), rel=1e-12)
    assert abs(got.imag) < 1e-25


@pytest.mark.parametrize("a,b", [(1.2, 0.2), (0.5 + 0.5j, -0.3j), (2.0, -1.0)])
def test_overlap_series_cross_check(a, b):
    got = overlap(CoherentSuperposition.product(a, 0), CoherentSuperposition.product(b, 0))
    assert got == pytest.approx(series_overlap(a, b), abs=1e-14)


def test_identity_transform():
    s = secs(1 + 1j, 0.3)
    out = mode_transform(s, np.eye(2))
    assert np.array_equal(out.alphas, s.alphas)
    assert np.array_equal(out.weights, s.weights)


def test_full_swap_transform():
    out = mode_transform(CoherentSuperposition.product(A, B), bs_matrix(math.pi / 2, 0.0))
    assert out.alphas[0] == pytest.approx([-1j * B, -1j * A])


def test_balanced_bs_makes_cat():
    out = mode_transform(secs(A, B), BALANCED_BS)
    first = out.alphas[:, 0]
    second = out.alphas[:, 1]
    assert np.allclose(first, (A + B) / math.sqrt(2))
    assert sorted(abs(second)) == pytest.approx([5.0, 5.0])
    assert second[0] == pytest.approx(-second[1])


def test_non_unitary_rejected():
    with pytest.raises(NonUnitary):
        mode_transform(secs(1, 0), [[1, 0], [0, 1.001]])


def test_fidelity_examples():
    a = secs(1.2, -0.4)
    assert fidelity_coherent(a, a) == pytest.approx(1.0)
    assert fidelity_coherent(secs(1.2, -0.4), secs(1.2, -0.4, -1)) == pytest.approx(0.0, abs=1e-15)
    got = fidelity_coherent(CoherentSuperposition.product(2, 0), CoherentSuperposition.product(0, 2))
    assert got == pytest.approx(math.exp(-8), rel=1e-12)
    with pytest.raises(ZeroState):
        fidelity_coherent(secs(1, 1, -1), a)


def test_to_fock_examples():
    cut = FockCutoff(20, 20)
    assert to_fock(CoherentSuperposition.product(0, 0), cut).amplitudes[0, 0] == 1
    single = to_fock(CoherentSuperposition.product(1.0, 0), cut)
    assert np.allclose(single.amplitudes, coherent_fock(1.0, 0, cut).amplitudes, atol=1e-12)
    cut = FockCutoff(25, 25)
    f = fidelity_fock(to_fock(secs(1.5, 0.5), cut), to_fock(secs(1.5, 0.5, -1), cut))
    assert f < 1e-10
    with pytest.raises(CutoffTooSmall):
        to_fock(CoherentSuperposition.product(4, 0), FockCutoff(5, 5))


amp = st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False)
weight = st.complex_numbers(min_magnitude=0.1, max_magnitude=2.0, allow_nan=False, allow_infinity=False)
terms = st.lists(st.tuples(weight, amp, amp), min_size=1, max_size=4)


def nonzero(s):
    return s.norm_squared() > 1e-6


@given(terms, terms)
def test_backend_equivalence(ta, tb):
    a, b = CoherentSuperposition(ta), CoherentSuperposition(tb)
    if not (nonzero(a) and nonzero(b)):
        return
    cut = FockCutoff(22, 22)
    fa, fb = to_fock(a, cut), to_fock(b, cut)
    if fa.norm_squared() < 1e-6 or fb.norm_squared() < 1e-6:
        return
    assert fidelity_fock(fa, fb) == pytest.approx(fidelity_coherent(a, b), abs=1e-6)


def unitaries():
    ang = st.floats(-math.pi, math.pi)
    return st.tuples(ang, ang, ang, ang).map(
        lambda p: np.exp(1j * p[3]) * np.diag([np.exp(1j * p[2]), 1]) @ bs_matrix(p[0], p[1]))


@given(terms, unitaries())
def test_transform_preserves_norm(ta, u):
    s = CoherentSuperposition(ta)
    out = mode_transform(s, u)
    assert out.norm_squared() == pytest.approx(s.norm_squared(), rel=1e-10, abs=1e-12)


@given(terms, unitaries(), unitaries())
def test_transform_composition(ta, u1, u2):
    s = CoherentSuperposition(ta, merge_tol=-1)
    lhs = mode_transform(mode_transform(s, u1), u2)
    rhs = mode_transform(s, u2 @ u1)
    assert np.allclose(lhs.alphas, rhs.alphas, atol=1e-12)
    assert np.array_equal(lhs.weights, rhs.weights)


def test_merge_and_limit():
    s = CoherentSuperposition([(1, 0.5, 0.5), (2, 0.5 + 1e-14, 0.5)])
    assert len(s) == 1 and s.weights[0] == 3
    with pytest.raises(ValueError):
        CoherentSuperposition([(1, k, 0) for k in range(65)])
    assert len(secs(1, 1, -1)) == 1 and secs(1, 1, -1).weights[0] == 0


def test_mean_photons():
    s = secs(A, B)
    n1, n2 = s.mean_photons()
    assert n1 == pytest.approx(n2)
    assert n1 + n2 == pytest.approx(A ** 2 + B ** 2, rel=1e-12)


def test_phase_shift():
    s = phase_shift(CoherentSuperposition.product(1, 2), 0.3, -0.1)
    assert s.alphas[0] == pytest.approx([np.exp(0.3j), 2 * np.exp(-0.1j)])


def test_gram_hermitian():
    s = secs(1 + 0.5j, -0.7)
    g = gram(s, s)
    assert np.allclose(g, g.conj().T)


def test_serialization_roundtrip():
    s = secs(1 + 0.5j, -0.7, -1) * (0.5 - 0.1j)
    rec = s.to_records()
    assert rec["kind"] == "coherent" and len(rec["terms"][0]) == 6
    back = CoherentSuperposition.loads(s.dumps())
    assert np.array_equal(back.alphas, s.alphas) and np.array_equal(back.weights, s.weights)


def test_phase_convention():
    s = (secs(1, 0) * 1j).with_phase_convention()
    assert s.weights[0] == pytest.approx(1.0)
