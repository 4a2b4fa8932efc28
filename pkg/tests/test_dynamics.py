import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from condswap.coherent import CoherentSuperposition, fidelity_coherent, secs, to_fock
from condswap.dynamics import (FullHamiltonianSpec, compare_full_vs_effective, decompose, effective_mode_matrix,
                               evolve_effective, evolve_full, full_hamiltonian, magnus_mode_matrix, mode_matrix,
                               output_phases, swap_angle_ratio, swap_time, swapped_output, wrap_phase)
from condswap.errors import RegimeViolation, SwapUnreachable
from condswap.hilbert import AncillaLevel, FockCutoff, JointState, TwoModeState, fidelity_fock, fock_state
from condswap.params import EffectiveParams, PhysicalParams, derive_effective, max_excitation_probabilities

from oracles import (bisect, effective_hamiltonian, five_level_hamiltonian, five_level_propagator,
                     effective_propagator, five_level_trajectory, magnus4_propagate)

A, B = 6 * math.sqrt(2), math.sqrt(2)

LOOP = PhysicalParams(g1=0.2, g2=0.15, omega_rabi1=0.7, omega_rabi2=0.5, delta1=1.3, delta2=-0.9,
                      delta_two_photon=0.4, delta_four_photon=0.3)


def random_joint(rng, cutoff, levels=range(5)):
    data = np.zeros((5,) + cutoff.shape, complex)
    for lvl in levels:
        data[lvl] = rng.normal(size=cutoff.shape) + 1j * rng.normal(size=cutoff.shape)
    data /= np.linalg.norm(data)
    return JointState.from_array(data, cutoff)


# -- full engine ------------------------------------------------------------

@pytest.mark.parametrize("t", [0.0, 1.7, 40.0])
def test_hamiltonian_matches_operator_form(t):
    cut = FockCutoff(2, 3)
    h = full_hamiltonian(FullHamiltonianSpec(LOOP, cut), t)
    assert np.allclose(h, five_level_hamiltonian(LOOP, cut, t), atol=1e-14)
    assert np.max(abs(h - h.conj().T)) <= 1e-12 * np.linalg.norm(h, 2)


def test_full_engine_matches_expm_oracle():
    rng = np.random.default_rng(11)
    cut = FockCutoff(2, 2)
    psi0 = random_joint(rng, cut)
    t = 25.0
    res = evolve_full(FullHamiltonianSpec(LOOP, cut), psi0, t, tol=1e-11)
    want = five_level_propagator(LOOP, cut, t) @ psi0.array.reshape(-1)
    assert np.allclose(res.final.array.reshape(-1), want, atol=1e-7)
    assert res.norm_drift < 1e-8


def test_sparse_path_matches_oracle():
    rng = np.random.default_rng(5)
    cut = FockCutoff(10, 10)
    spec = FullHamiltonianSpec(LOOP, cut)
    assert spec.dim > 600
    psi0 = random_joint(rng, cut, levels=(1,))
    res = evolve_full(spec, psi0, 2.0, tol=1e-11)
    want = five_level_propagator(LOOP, cut, 2.0) @ psi0.array.reshape(-1)
    assert np.allclose(res.final.array.reshape(-1), want, atol=1e-7)


def test_zero_couplings_idle():
    rng = np.random.default_rng(2)
    cut = FockCutoff(2, 2)
    p = PhysicalParams(delta1=0.0 + 1.0, delta2=1.0, delta_two_photon=0.0)
    psi0 = random_joint(rng, cut, levels=(0, 1))
    res = evolve_full(FullHamiltonianSpec(p, cut), psi0, 50.0, n_samples=5)
    assert np.allclose(res.final.array, psi0.array, atol=1e-12)
    for lvl in AncillaLevel:
        assert np.allclose(res.populations[lvl], res.populations[lvl][0], atol=1e-12)


def test_m_branch_inert():
    rng = np.random.default_rng(3)
    cut = FockCutoff(2, 2)
    psi0 = random_joint(rng, cut, levels=(0,))
    res = evolve_full(FullHamiltonianSpec(LOOP, cut), psi0, 30.0)
    assert np.array_equal(res.final.array, psi0.array)


def test_nonconditional_rejects_m():
    rng = np.random.default_rng(3)
    cut = FockCutoff(1, 1)
    with pytest.raises(ValueError):
        evolve_full(FullHamiltonianSpec(LOOP, cut, conditional=False), random_joint(rng, cut), 1.0)


def bound_ratio(n1, n2, delta_f=0.0):
    """Max oracle non-ground population over a swap period divided by 2 (P_a + P_b + P_c)."""
    p = PhysicalParams(g1=0.03, g2=0.03, omega_rabi1=1, omega_rabi2=1, delta_two_photon=0,
                       delta_four_photon=delta_f, n1=n1, n2=n2)
    cut = FockCutoff(n1 + n2, n1 + n2)
    psi = JointState.product(AncillaLevel.G, fock_state(n1, n2, cut)).array.reshape(-1)
    worst = 0.0
    for v in five_level_trajectory(p, cut, psi, np.linspace(0, 3500, 351)[1:]):
        worst = max(worst, float(np.sum(abs(v.reshape(5, -1)[2:]) ** 2)))
    return worst / (2 * sum(max_excitation_probabilities(p)))


@pytest.mark.parametrize("n1,n2", [(1, 0), (0, 1), (1, 1), (2, 1), (3, 0), (3, 3)])
@pytest.mark.parametrize("delta_f", [0.0, 2e-4])
def test_excitation_within_acceptance_margin(n1, n2, delta_f):
    assert bound_ratio(n1, n2, delta_f) <= 1.5


@pytest.mark.parametrize("n1,n2", [(1, 1), (2, 1), (2, 2), (3, 3)])
def test_excitation_below_twice_probability_balanced(n1, n2):
    assert bound_ratio(n1, n2) <= 1.0


@pytest.mark.xfail(strict=True, reason="switch-on transient pushes single-mode inputs ~10% past 2 sum P")
@pytest.mark.parametrize("n1,n2", [(1, 0), (3, 0)])
def test_excitation_below_twice_probability_single_mode(n1, n2):
    assert bound_ratio(n1, n2) <= 1.0


def test_norm_conserved_over_swap():
    p = PhysicalParams(g1=0.06, g2=0.06, omega_rabi1=1, omega_rabi2=1, delta_two_photon=0, n1=1, n2=0)
    cut = FockCutoff(1, 1)
    t_s = swap_time(derive_effective(p))
    res = evolve_full(FullHamiltonianSpec(p, cut), JointState.product(AncillaLevel.G, fock_state(1, 0, cut)),
                      t_s, n_samples=11)
    assert res.norm_drift < 1e-8
    assert len(list(res.trace_rows())) == 11


@given(st.floats(0, 0.5), st.floats(0, 0.5), st.floats(0, 1.5), st.floats(0, 1.5), st.floats(-2, 2),
       st.floats(-2, 2), st.floats(-1, 1), st.floats(-0.5, 0.5), st.floats(0.1, 10), st.integers(0, 2 ** 31))
def test_full_engine_conserves_norm(g1, g2, om1, om2, d1, d2, delta, df, t, seed):
    p = PhysicalParams(g1=g1, g2=g2, omega_rabi1=om1, omega_rabi2=om2, delta1=d1, delta2=d2,
                       delta_two_photon=delta, delta_four_photon=df)
    cut = FockCutoff(1, 1)
    res = evolve_full(FullHamiltonianSpec(p, cut), random_joint(np.random.default_rng(seed), cut), t,
                      n_samples=3, keep_states=True)
    assert res.norm_drift < 1e-8
    assert all(abs(s.norm() - 1) < 1e-8 for s in res.states)


# -- effective engine ----------------------------------------------------------

def test_pure_phase_rotation():
    eff = EffectiveParams(0.3, 0.3, 0.0, delta_f=0.0)
    out = evolve_effective(eff, CoherentSuperposition.product(1.0, 0.5j), 2.0)
    assert out.alphas[0] == pytest.approx([np.exp(-0.6j), 0.5j * np.exp(-0.6j)])


@pytest.mark.parametrize("chi0", [0.7, -0.7])
def test_exact_swap_tuning(chi0):
    # Real chi0 at delta_F = 0: the swap channel picks up -eta t - pi/2 + arg(chi0); eta = -|chi0| cancels it
    eff = EffectiveParams(-abs(chi0), -abs(chi0), chi0, delta_f=0.0)
    if chi0 < 0:
        eff = EffectiveParams(abs(chi0), abs(chi0), chi0, delta_f=0.0)
    t = swap_time(eff)
    assert t == pytest.approx(math.pi / (2 * abs(chi0)))
    out = evolve_effective(eff, CoherentSuperposition.product(A, B), t)
    assert out.alphas[0] == pytest.approx([B, A], abs=1e-12)


def test_physical_symmetric_tuning_swaps(trapped_ion):
    eff = derive_effective(trapped_ion)
    out = evolve_effective(eff, CoherentSuperposition.product(A, B), swap_time(eff))
    assert fidelity_coherent(out, CoherentSuperposition.product(B, A)) == pytest.approx(1.0, abs=1e-12)


def low_sectors(state):
    n1, n2 = np.indices(state.cutoff.shape)
    return TwoModeState(np.where(n1 + n2 <= state.cutoff.nmax1, state.amplitudes, 0), state.cutoff)


GENERIC = EffectiveParams(eta1=0.15, eta2=-0.1, chi0=0.4, delta_f=0.85)


@pytest.mark.parametrize("alpha1,alpha2", [(1.2, 0.5j), (-0.3 + 0.8j, 1.0)])
def test_mode_matrix_against_fock_propagation(alpha1, alpha2):
    # sectors n1 + n2 <= nmax are complete in a square cutoff and are not mixed with the rest
    cut = FockCutoff(12, 12)
    t = 3.0
    psi0 = low_sectors(to_fock(CoherentSuperposition.product(alpha1, alpha2), cut, accept_leakage=True))
    ref = TwoModeState.from_vector(effective_propagator(GENERIC, cut, t) @ psi0.vector, cut)
    coh = evolve_effective(GENERIC, CoherentSuperposition.product(alpha1, alpha2), t)
    assert np.allclose(low_sectors(to_fock(coh, cut, accept_leakage=True)).vector, ref.vector, atol=1e-10)
    lifted = evolve_effective(GENERIC, psi0, t)
    assert np.allclose(lifted.vector, ref.vector, atol=1e-10)


def test_frame_oracle_matches_time_stepping():
    cut = FockCutoff(3, 3)
    psi = np.random.default_rng(5).normal(size=cut.dim) + 0j
    psi /= np.linalg.norm(psi)
    stepped = magnus4_propagate(lambda s: effective_hamiltonian(GENERIC, cut, s), psi, 3.0, 2000)
    assert np.allclose(stepped, effective_propagator(GENERIC, cut, 3.0) @ psi, atol=1e-10)


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2), st.floats(0, 20),
       st.complex_numbers(max_magnitude=3, allow_nan=False), st.complex_numbers(max_magnitude=3, allow_nan=False))
def test_effective_number_conservation(e1, e2, chi0, df, t, a1, a2):
    eff = EffectiveParams(e1, e2, chi0, delta_f=df)
    out = evolve_effective(eff, CoherentSuperposition.product(a1, a2), t)
    total = abs(a1) ** 2 + abs(a2) ** 2
    assert np.sum(abs(out.alphas[0]) ** 2) == pytest.approx(total, abs=1e-12 * max(1.0, total))
    u = effective_mode_matrix(eff, t)
    assert np.allclose(u.conj().T @ u, np.eye(2), atol=1e-12)


# -- decomposition and swap time ---------------------------------------------

def test_decompose_limits():
    eff = EffectiveParams(0.2, 0.1, 0.5, delta_f=0.0)
    d = decompose(eff, math.pi / (2 * 0.5))
    assert d.bs_angle == pytest.approx(math.pi / 2)
    assert (d.phase1, d.phase2) == pytest.approx((0.2 * math.pi, 0.1 * math.pi))
    eff = EffectiveParams(0.0, 0.0, 0.5, delta_f=0.8)
    assert decompose(eff, 2 * math.pi / 0.8).bs_angle == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize("chi0,df,t", [(0.5, 0.8, 3.3), (-0.2, 1.7, 0.9), (1.0, -0.3, 12.0), (0.4, 1e-9, 2.0)])
def test_bs_angle_quadrature(chi0, df, t):
    re = quad(lambda s: math.cos(df * s), 0, t, epsabs=1e-13, epsrel=1e-13, limit=200)[0]
    im = quad(lambda s: math.sin(df * s), 0, t, epsabs=1e-13, epsrel=1e-13, limit=200)[0]
    d = decompose(EffectiveParams(0, 0, chi0, delta_f=df), t)
    assert d.bs_angle == pytest.approx(abs(chi0) * math.hypot(re, im), abs=1e-10)
    assert d.bs_angle == pytest.approx(abs(2 * chi0 * math.sin(0.5 * df * t) / df), abs=1e-10)


def test_unit_ratio_swap_angle():
    # root of 2 sin(x/2) = pi/2 by bisection
    root = bisect(lambda x: 2 * math.sin(x / 2) - math.pi / 2, 0.0, math.pi)
    assert swap_angle_ratio(1.0) == pytest.approx(root, abs=1e-12)
    assert root == pytest.approx(1.806678, abs=1e-6)


def test_swap_time_closed_form():
    assert swap_time(EffectiveParams(0, 0, 5e4)) == pytest.approx(math.pi / 1e5, rel=1e-15)


def test_swap_time_plateau():
    for ratio in (1e2, 1e3, 1e4):
        eff = EffectiveParams.from_ratios(1.0, ratio)
        assert eff.chi0 * swap_time(eff) == pytest.approx(math.pi / 2, abs=2 / ratio ** 2)


def test_swap_unreachable():
    with pytest.raises(SwapUnreachable):
        swap_time(EffectiveParams.from_ratios(1.0, 0.7))
    assert swap_angle_ratio(math.pi / 4) == pytest.approx(math.pi)


def test_swap_time_continuous_at_zero_detuning():
    chi0 = 0.3
    limit = math.pi / (2 * chi0)
    for df in (1e-3, 1e-5, 1e-7):
        assert swap_time(EffectiveParams(0, 0, chi0, delta_f=df)) == pytest.approx(limit, rel=df)


def test_swap_relation_holds():
    eff = EffectiveParams.from_ratios(1.0, 2.5)
    t = swap_time(eff)
    assert 2 * eff.chi0 * math.sin(0.5 * eff.delta_f * t) / eff.delta_f == pytest.approx(math.pi / 2)


def test_exact_equals_magnus_without_detuning():
    rng = np.random.default_rng(8)
    for _ in range(10):
        e1, e2, chi0 = rng.normal(size=3)
        eff = EffectiveParams(e1, e2, chi0, delta_f=0.0)
        t = rng.uniform(0, 10)
        if e1 == e2:
            assert np.allclose(effective_mode_matrix(eff, t), magnus_mode_matrix(eff, t), atol=1e-12)
    eff = EffectiveParams(0.3, 0.3, 0.8, delta_f=0.0)
    assert np.allclose(mode_matrix(eff, 2.0, "exact"), mode_matrix(eff, 2.0, "magnus"), atol=1e-12)
    with pytest.raises(ValueError):
        mode_matrix(eff, 1.0, "rk4")


def test_magnus_error_grows_with_detuning():
    errs = []
    for inv in (0.01, 0.1, 0.4, 1.0):
        eff = EffectiveParams.from_ratios(1.0, 1 / inv, 0.2)
        t = swap_time(eff)
        errs.append(np.linalg.norm(effective_mode_matrix(eff, t) - magnus_mode_matrix(eff, t)))
    assert all(a < b for a, b in zip(errs, errs[1:]))
    assert errs[0] < 1e-2 < 0.1 < errs[-1]


def test_first_order_matrix_phases():
    eff = EffectiveParams.from_ratios(1.0, 3.0, 0.4)
    t = swap_time(eff)
    u = magnus_mode_matrix(eff, t)
    x = eff.delta_f * t
    assert wrap_phase(np.angle(u[0, 1])) == pytest.approx(wrap_phase(-eff.eta1 * t - math.pi / 2 + x / 2))
    assert wrap_phase(np.angle(u[1, 0])) == pytest.approx(wrap_phase(-eff.eta2 * t - math.pi / 2 - x / 2))
    # the closed-form output phases carry +eta t and the same delta_F sign on both modes
    phi1, phi2 = output_phases(eff, t)
    assert phi1 == pytest.approx(wrap_phase(eff.eta1 * t - math.pi / 2 + x / 2))
    assert phi2 != pytest.approx(wrap_phase(np.angle(u[1, 0])), abs=1e-3)


# -- output phases --------------------------------------------------------------

def test_output_phases_examples():
    t = 2.0
    eff = EffectiveParams(math.pi / 4, math.pi / 4, 1.0, delta_f=0.0)
    assert output_phases(eff, t) == pytest.approx((0.0, 0.0), abs=1e-15)
    assert output_phases(EffectiveParams(0, 0, 1.0), t) == pytest.approx((-math.pi / 2, -math.pi / 2))


@pytest.mark.parametrize("x", [-7.0, -math.pi, 0.0, math.pi, 3 * math.pi, 10.0])
def test_wrap_phase_range(x):
    w = wrap_phase(x)
    assert -math.pi < w <= math.pi
    assert math.cos(w) == pytest.approx(math.cos(x)) and math.sin(w) == pytest.approx(math.sin(x), abs=1e-12)
    assert np.allclose(wrap_phase(np.array([x])), [w])


def test_fig3b_spot_checks():
    target = secs(A, B)

    def fid(ratio, eta):
        eff = EffectiveParams.from_ratios(1.0, ratio, eta)
        t = swap_time(eff)
        return fidelity_coherent(swapped_output(A, B, *output_phases(eff, t)), target)

    # closed-form zero-phase line eta t_s = pi/2 - delta_F t_s / 2 at ratio 2
    x = swap_angle_ratio(2.0)
    eta_star = (math.pi / 2 - x / 2) / (2.0 * x)
    assert 0 < eta_star < 1
    assert fid(2.0, eta_star) == pytest.approx(1.0, abs=1e-12)
    assert fid(2.0, eta_star + 0.05) < 0.9
    # far off the line the swapped branch is near orthogonal and only the direct term overlaps
    assert fid(2.0, 2.0) < 0.3


# -- full vs effective ----------------------------------------------------------

def test_compare_idle_without_couplings():
    p = PhysicalParams(omega_rabi1=1, omega_rabi2=1, delta_two_photon=0.3, n1=1)
    rep = compare_full_vs_effective(p, fock_state(1, 0, FockCutoff(1, 1)), 100.0, n_times=5)
    assert np.allclose(rep.fidelity, 1.0, atol=1e-12)
    assert rep.max_nonground == 0


def test_compare_refuses_broken_regime():
    p = PhysicalParams(g1=0.5, g2=0.5, omega_rabi1=1, omega_rabi2=1, delta_two_photon=0, n1=1)
    with pytest.raises(RegimeViolation) as info:
        compare_full_vs_effective(p, fock_state(1, 0, FockCutoff(1, 1)), 10.0)
    assert "one_photon_1" in info.value.failures


def test_compare_dispersive_single_photon():
    p = PhysicalParams(g1=0.06, g2=0.06, omega_rabi1=1, omega_rabi2=1, delta_two_photon=0, n1=1, n2=0)
    cut = FockCutoff(1, 1)
    t_s = swap_time(derive_effective(p))
    rep = compare_full_vs_effective(p, fock_state(1, 0, cut), t_s, n_times=11)
    fine = compare_full_vs_effective(p, fock_state(1, 0, cut), t_s, n_times=11, tol=1e-12)
    assert rep.min_fidelity >= 0.99
    assert np.allclose(rep.fidelity, fine.fidelity, atol=1e-6)
    assert rep.max_nonground <= 1.5 * rep.excitation_bound
    assert len(list(rep.rows())) == 11


def test_compare_explicit_times():
    p = PhysicalParams(g1=0.06, g2=0.06, omega_rabi1=1, omega_rabi2=1, delta_two_photon=0, n1=1)
    rep = compare_full_vs_effective(p, fock_state(1, 0, FockCutoff(1, 1)), 0, times=[0, 10, 30])
    assert list(rep.times) == [0, 10, 30]
    with pytest.raises(ValueError):
        compare_full_vs_effective(p, fock_state(1, 0, FockCutoff(1, 1)), 0, times=[1, 2])
