import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import cat_vector, coherent_vector, kron_all, partial_trace_purity
from qrconv import (CatSpec, CouplingConfig, compute_coefficients, evolve, fidelity,
                    gram_matrix, make_state, mean_photons, reduced_spectrum)
from qrconv.branch_states import (BranchState, coherent_overlap, compact, inner, normalize,
                                  product_state, rotate_free)
from qrconv.errors import DegenerateCat

amps = st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False)


def test_coherent_overlap_closed_form():
    a, b = 0.3 + 0.4j, -1.1 + 0.2j
    expected = np.exp(-abs(a) ** 2 / 2 - abs(b) ** 2 / 2 + np.conj(a) * b)
    assert coherent_overlap(a, b) == pytest.approx(expected, abs=1e-15)


@settings(max_examples=100, deadline=None)
@given(amps, amps)
def test_coherent_overlap_matches_fock_vectors(a, b):
    va, vb = coherent_vector(a, 80), coherent_vector(b, 80)
    assert abs(coherent_overlap(a, b) - np.vdot(va, vb)) < 1e-12


@pytest.mark.parametrize("alpha,Phi", [(0.5, 0.0), (1.0, math.pi), (2.0, math.pi / 2), (0.1j, 1.0)])
def test_cat_norm(alpha, Phi):
    state = product_state([CatSpec(alpha, Phi)], ("A",))
    assert state.norm == pytest.approx(1.0, abs=1e-13)


def test_degenerate_odd_cat_rejected():
    with pytest.raises(DegenerateCat):
        CatSpec(1e-7, math.pi).branches()


def test_cat_matches_fock_expansion():
    state = product_state([CatSpec(1.3 - 0.4j, 0.7)], ("A",))
    v = cat_vector(1.3 - 0.4j, 0.7, 60)
    # <n|state> as a branch sum
    branch = sum(c * coherent_vector(a[0], 60) for c, a in zip(state.coeffs, state.amps))
    np.testing.assert_allclose(branch, v, atol=1e-14)


class TestValidation:
    def test_amplitude_cap(self):
        with pytest.raises(ValueError):
            make_state(25.0)

    def test_branch_cap(self):
        with pytest.raises(ValueError):
            BranchState(np.ones(3), np.zeros((3, 3)), branch_cap=2)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            BranchState(np.ones(2), np.zeros((3, 3)))

    def test_nonfinite(self):
        with pytest.raises(ValueError):
            BranchState([1.0], [[np.nan, 0, 0]])

    def test_mode_lookup(self):
        s = make_state(1.0)
        assert s.mode_indices("BC") == [1, 2]
        assert s.mode_index("C") == 2
        with pytest.raises(KeyError):
            s.mode_index("D")


def test_product_branch_count():
    s = make_state(CatSpec(1.0), CatSpec(0.5, math.pi), 0.2j)
    assert s.n_branches == 4
    assert s.norm == pytest.approx(1.0, abs=1e-13)


def test_mean_photons_coherent_and_cat():
    s = make_state(CatSpec(2.0, 0.0), 0.5 + 0.5j, 0j)
    expected_cat = 4 * math.tanh(4)  # even cat: |a|^2 tanh|a|^2
    np.testing.assert_allclose(mean_photons(s), [expected_cat, 0.5, 0.0], atol=1e-12)


def test_normalize_and_compact():
    s = BranchState([2.0, 1e-20], [[0.1, 0, 0], [0.2, 0, 0]])
    n = normalize(s)
    assert n.normalized
    assert compact(n).n_branches == 1


def test_rotate_free_phase():
    s = make_state(1.0, 1j, 0j)
    r = rotate_free(s, [1.0, 2.0, 3.0], 0.5)
    np.testing.assert_allclose(r.amps[0], [np.exp(-0.5j), 1j * np.exp(-1j), 0])


def test_gram_is_psd_and_unit_diagonal():
    s = make_state(CatSpec(1.0), CatSpec(0.7 + 0.2j, 1.0), CatSpec(0.3))
    g = gram_matrix(s)
    np.testing.assert_allclose(np.diag(g), 1.0)
    assert np.linalg.eigvalsh(g).min() > -1e-14
    np.testing.assert_allclose(g, g.conj().T, atol=1e-15)


class TestReducedSpectrum:
    def test_product_state_is_pure(self):
        s = make_state(1.0 + 1j, -0.5, 2.0)
        for m in "ABC":
            np.testing.assert_allclose(reduced_spectrum(s, m), [1.0], atol=1e-14)

    def test_matches_dense_partial_trace(self):
        cfg = CouplingConfig.resonant(0.8, 1.2, phi=0.3)
        s = evolve(make_state(CatSpec(1.1, 0.4), 0.3, -0.2j), compute_coefficients(cfg, 0.9))
        n = 24
        psi = sum(c * kron_all(*(coherent_vector(a, n) for a in amps))
                  for c, amps in zip(s.coeffs, s.amps))
        for m in range(3):
            p = reduced_spectrum(s, [m])
            assert np.sum(p ** 2) == pytest.approx(partial_trace_purity(psi, (n + 1,) * 3, m),
                                                   abs=1e-10)

    def test_complementary_cuts_agree(self):
        cfg = CouplingConfig.resonant(1.0, 0.6, Omega=0.4)
        s = evolve(make_state(CatSpec(1.5, 0.0), CatSpec(0.4, math.pi / 2), 0.3),
                   compute_coefficients(cfg, 1.3))
        for keep, rest in [("A", "BC"), ("B", "AC"), ("C", "AB")]:
            p, q = reduced_spectrum(s, keep), reduced_spectrum(s, rest)
            k = min(len(p), len(q))
            np.testing.assert_allclose(p[:k], q[:k], atol=1e-12)

    def test_spectrum_sums_to_one(self):
        s = evolve(make_state(CatSpec(2.0)), compute_coefficients(CouplingConfig(1.0, 1.0), 0.5))
        assert reduced_spectrum(s, "A").sum() == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(amps, amps, amps, st.floats(0.0, 10.0))
def test_coherent_product_stays_product(a, b, c, t):
    s = make_state(a, b, c)
    out = evolve(s, compute_coefficients(CouplingConfig(1.0, 0.5, phi=0.2), t))
    for m in "ABC":
        assert reduced_spectrum(out, m)[0] > 1 - 1e-12


def test_evolution_preserves_inner_products():
    M = compute_coefficients(CouplingConfig.resonant(0.5, 1.5, Omega=1.0, theta=0.3), 2.0)
    s1 = make_state(CatSpec(1.0), 0.2, 0j)
    s2 = make_state(0.8 + 0.1j, CatSpec(0.4, 1.0), 0.1)
    assert inner(evolve(s1, M), evolve(s2, M)) == pytest.approx(inner(s1, s2), abs=1e-13)
    assert fidelity(evolve(s1, M), evolve(s1, M)) == pytest.approx(1.0)
