import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate as quad_integrate

from conftest import sauter_pulse, oscillating_pulse
from pairspin.bispinor import BispinorBasis, interaction_matrix, mode_bispinors
from pairspin.pulse import PulseConfig, eval_potential, integration_window
from pairspin.smatrix import (
    Variant,
    coefficient_rhs,
    evolve_basis,
    pair_distributions,
    solve_boundary_value,
)

Z = BispinorBasis()
HELICITY = BispinorBasis("helicity")


def weak_pulse(E0):
    return PulseConfig("SauterLike", E0=E0, tau0=3.0, t0=3.0, sigma=0.0)


def first_order_amplitudes(pulse, q, window):
    """-i * integral of V[(+, o), (-, c)] dt, arranged as [c, o]."""
    mode = mode_bispinors(Z, q)
    out = np.zeros((2, 2), dtype=complex)
    for c in range(2):
        for o in range(2):
            def part(t, fn):
                return fn(interaction_matrix(mode, eval_potential(pulse, t), t)[o, 2 + c])
            re = quad_integrate.quad(part, *window, args=(np.real,), limit=4000, points=[0.0])[0]
            im = quad_integrate.quad(part, *window, args=(np.imag,), limit=4000, points=[0.0])[0]
            out[c, o] = -1j * (re + 1j * im)
    return out


def relative_gap(E0, q=np.array([0.5, 0.0, 0.0])):
    pulse = weak_pulse(E0)
    window = integration_window(pulse)
    exact = pair_distributions(q, Variant.FEYNMAN, pulse, Z, window=window).f_total
    pert = (np.abs(first_order_amplitudes(pulse, q, window)) ** 2).sum()
    return exact / pert - 1.0


def test_zero_field_gives_trivial_shooting():
    pulse = sauter_pulse().with_(E0=0.0)
    M, P, drift = evolve_basis(np.array([0.3, -0.2, 0.0]), Variant.FEYNMAN, pulse, Z)
    np.testing.assert_array_equal(M, np.eye(2))
    assert not P.any() and drift == 0.0
    for variant in Variant:
        amp = pair_distributions(np.array([0.3, -0.2, 0.0]), variant, pulse)
        assert not amp.A.any()
        np.testing.assert_array_equal(amp.N_tilde, [1.0, 1.0])
        assert amp.f_total == 0.0


def test_zero_field_rhs_vanishes():
    mode = mode_bispinors(Z, np.array([0.4, 0.1, -0.3]))
    c = np.array([1.0, 0.5j, -0.2, 0.3 + 0.1j])
    assert not coefficient_rhs(mode, sauter_pulse().with_(E0=0.0), 1.2, c).any()


@given(st.tuples(*[st.floats(-3, 3)] * 3), st.floats(-20, 20),
       st.tuples(*[st.floats(-1, 1)] * 8))
def test_rhs_preserves_norm(q, t, parts):
    mode = mode_bispinors(HELICITY, np.array(q))
    c = np.array(parts[:4]) + 1j * np.array(parts[4:])
    dc = coefficient_rhs(mode, sauter_pulse(), t, c)
    assert abs(np.real(np.vdot(c, dc))) <= 1e-14 * max(1.0, np.abs(dc).max())


def test_rest_frame_coupling_only_reaches_positive_sector():
    pulse = PulseConfig("SauterLike", E0=0.5, sigma=0.3, eps1=(0.0, 0.0, 1.0))
    mode = mode_bispinors(Z, np.zeros(3))
    c = np.array([0, 0, 1.0, 0], dtype=complex)
    dc = coefficient_rhs(mode, pulse, 0.4, c)
    assert np.abs(dc[:2]).max() > 0.1
    assert np.abs(dc[2:]).max() == 0.0


@pytest.mark.parametrize("variant", list(Variant))
@pytest.mark.parametrize("p", [(-0.8, 0.0, 0.0), (0.3, 0.7, 0.0), (-1.2, -0.4, 0.5)])
def test_normalization_identity(sauter, variant, p):
    pulse, window = sauter
    amp = pair_distributions(np.array(p), variant, pulse, HELICITY, window=window)
    lhs = amp.N_tilde ** 2
    rhs = 1.0 + (np.abs(amp.C_out) ** 2).sum(axis=1)
    np.testing.assert_allclose(lhs, rhs, rtol=0, atol=1e-9)
    assert amp.norm_drift <= 1e-9
    np.testing.assert_array_equal(amp.f, np.abs(amp.A) ** 2)
    assert np.all(amp.N_tilde >= 1.0)


def test_solve_boundary_value_matches_full_solution(sauter):
    pulse, window = sauter
    q = np.array([-0.8, 0.1, 0.0])
    full = pair_distributions(q, Variant.FEYNMAN, pulse, Z, window=window)
    for row, cond in enumerate((1, -1)):
        A, N, C = solve_boundary_value(q, cond, Variant.FEYNMAN, pulse, Z, window=window)
        np.testing.assert_array_equal(A, full.A[row])
        assert N == full.N_tilde[row]


def test_linear_pulse_flips_spin_in_z_basis(sauter):
    pulse, window = sauter
    amp = pair_distributions(np.array([-0.8, 0.0, 0.0]), Variant.FEYNMAN, pulse, Z, window=window)
    peak = amp.f.max()
    assert amp.f[0, 0] <= 1e-12 * peak and amp.f[1, 1] <= 1e-12 * peak
    assert amp.f[0, 1] == pytest.approx(amp.f[1, 0], rel=1e-9)


@pytest.mark.parametrize("pulse", [sauter_pulse(), oscillating_pulse(0.5)], ids=["sauter", "oscillating"])
@pytest.mark.parametrize("p", [(-0.8, 0.0, 0.0), (0.4, -0.6, 0.2)])
def test_reflection_duality(pulse, p):
    window = integration_window(pulse)
    p = np.array(p)
    anti = pair_distributions(p, Variant.ANTI_FEYNMAN, pulse, Z, window=window)
    feyn = pair_distributions(-p, Variant.FEYNMAN, pulse, Z, window=window)
    assert anti.f_total == pytest.approx(feyn.f_total, rel=1e-8, abs=1e-300)
    np.testing.assert_array_equal(anti.q, -p)


@pytest.mark.parametrize("p", [(-0.8, 0.0, 0.0), (-0.3, 0.5, 0.0), (0.6, 0.2, 0.4)])
def test_total_is_basis_independent(sauter, p):
    pulse, window = sauter
    totals = [pair_distributions(np.array(p), Variant.FEYNMAN, pulse, b, window=window).f_total
              for b in (Z, HELICITY, BispinorBasis("fixed", (0.6, 0.0, 0.8)))]
    np.testing.assert_allclose(totals, totals[0], rtol=1e-8)


def test_helicity_pairing_symmetry(sauter):
    pulse, window = sauter
    f = pair_distributions(np.array([-0.5, 0.4, 0.0]), Variant.FEYNMAN, pulse, HELICITY,
                           window=window).f
    assert f[0, 0] == pytest.approx(f[1, 1], rel=1e-8)
    assert f[0, 1] == pytest.approx(f[1, 0], rel=1e-8)


def test_variant_parse():
    assert Variant.parse("anti-feynman") is Variant.ANTI_FEYNMAN
    assert Variant.parse(" Feynman") is Variant.FEYNMAN
    with pytest.raises(ValueError):
        Variant.parse("retarded")


@pytest.mark.xfail(strict=True, reason="diagonal q.A coupling is first order in E0 and shifts the "
                   "phase of the exponentially small amplitude; gap is ~42% at E0 = 0.01")
def test_weak_field_matches_first_order_theory():
    assert abs(relative_gap(0.01)) <= 0.05


def test_weak_field_converges_to_first_order_theory():
    gaps = [relative_gap(E0) for E0 in (1e-3, 3e-4)]
    assert abs(gaps[1]) <= 0.05
    assert abs(gaps[1]) < abs(gaps[0])
    # the gap is linear in E0
    assert abs(gaps[0] / gaps[1]) == pytest.approx(1e-3 / 3e-4, rel=0.2)
