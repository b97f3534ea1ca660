import math

import numpy as np
import pytest
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from oracles import (cat_vector, coherent_vector, dense_evolve, dense_interaction_hamiltonian,
                     kron_all)
from qrconv import CatSpec, CouplingConfig, compute_coefficients, evolve, make_state
from qrconv import fock_oracle as fo
from qrconv.branch_states import apply_linear
from qrconv.errors import CutoffMismatch, CutoffTooLarge, TruncationBreach
from qrconv.krylov import expm_multiply_hermitian
from qrconv.optics_network import BeamSplitterSpec

RES = CouplingConfig(1.0, 1.0)


class TestCutoff:
    def test_dims(self):
        c = fo.FockCutoff(4)
        assert c.shape == (5, 5, 5) and c.full_dim == 125 and c.dim == 125

    def test_sector_dim(self):
        # photons distributed over three modes: (N + 2 choose 2)
        assert fo.FockCutoff(6, sector_total=3).dim == 10

    def test_too_large(self):
        with pytest.raises(CutoffTooLarge):
            fo.FockCutoff(300)

    def test_default_rule(self):
        assert fo.default_cutoff(4.0) == math.ceil(4 + 16 + 10)


class TestHamiltonian:
    def test_one_photon_block(self):
        H = fo.build_hamiltonian(RES, fo.FockCutoff(3, sector_total=1)).toarray()
        # basis |100>, |010>, |001> in some order; spectrum {0, +-sqrt(2)}
        np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(H)), [-math.sqrt(2), 0, math.sqrt(2)],
                                   atol=1e-14)
        assert H.shape == (3, 3)

    def test_hermitian_and_number_conserving(self):
        cfg = CouplingConfig(0.7, 1.3, phi=0.4, theta=-1.1)
        cut = fo.FockCutoff(4)
        H = fo.build_hamiltonian(cfg, cut)
        assert abs(H - H.conj().T).max() < 1e-15
        N = fo.number_operator_total(cut)
        assert abs(H @ N - N @ H).max() < 1e-12

    def test_matches_dense_oracle(self):
        cfg = CouplingConfig(0.7, 1.3, phi=0.4, theta=-1.1)
        H = fo.build_hamiltonian(cfg, fo.FockCutoff(3)).toarray()
        np.testing.assert_allclose(H, dense_interaction_hamiltonian(3, 0.7, 1.3, 0.4, -1.1),
                                   atol=1e-14)


class TestKrylov:
    @pytest.mark.parametrize("t", [0.1, 3.0, 25.0])
    def test_against_scipy(self, rng, t):
        n = 200
        X = sp.random(n, n, density=0.05, random_state=7, dtype=float)
        H = (X + X.T).tocsr()
        v = rng.normal(size=n) + 1j * rng.normal(size=n)
        ours = expm_multiply_hermitian(H, v, t)
        ref = expm_multiply(-1j * t * H.astype(complex), v)
        assert np.abs(ours - ref).max() < 1e-11 * np.linalg.norm(v)

    def test_invariant_subspace_breakdown(self):
        H = sp.diags([1.0, 2.0, 3.0]).tocsr()
        v = np.array([1.0, 0, 0], dtype=complex)
        np.testing.assert_allclose(expm_multiply_hermitian(H, v, 2.0), [np.exp(-2j), 0, 0])


class TestConversion:
    def test_coherent_expansion(self):
        psi = fo.branch_to_fock(make_state(0.5 + 0.2j, -0.3, 0.1j), 20)
        ref = kron_all(coherent_vector(0.5 + 0.2j, 20), coherent_vector(-0.3, 20),
                       coherent_vector(0.1j, 20))
        np.testing.assert_allclose(psi.amps.ravel(), ref, atol=1e-15)
        assert psi.deficiency < 1e-15 and psi.certified

    def test_cat_alpha2_deficiency(self):
        psi = fo.branch_to_fock(make_state(CatSpec(2.0)), 30)
        assert psi.deficiency < 1e-12

    def test_breach(self):
        with pytest.raises(TruncationBreach) as err:
            fo.branch_to_fock(make_state(CatSpec(6.0)), 10)
        assert err.value.n_max == 10 and err.value.deficiency > 1e-8

    def test_mode_count_mismatch(self):
        with pytest.raises(CutoffMismatch):
            fo.branch_to_fock(make_state(0.1), fo.FockCutoff(5, n_modes=2))

    def test_fidelity_cutoff_mismatch(self):
        a = fo.fock_basis_state(fo.FockCutoff(3), (0, 0, 0))
        b = fo.fock_basis_state(fo.FockCutoff(4), (0, 0, 0))
        with pytest.raises(CutoffMismatch):
            fo.fock_fidelity(a, b)


class TestEvolution:
    def test_vacuum_invariant(self):
        vac = fo.fock_basis_state(fo.FockCutoff(5), (0, 0, 0))
        out = fo.evolve_fock(vac, CouplingConfig(1.3, 0.4, phi=1.0), 7.0)
        assert fo.fock_fidelity(vac, out) == pytest.approx(1.0, abs=1e-14)

    def test_single_photon_probabilities(self):
        cut = fo.FockCutoff(3)
        psi = fo.fock_basis_state(cut, (1, 0, 0))
        out = fo.evolve_fock(psi, RES, math.pi / (2 * math.sqrt(2)))
        probs = [abs(out.amps[occ]) ** 2 for occ in [(1, 0, 0), (0, 1, 0), (0, 0, 1)]]
        np.testing.assert_allclose(probs, [0.0, 0.5, 0.5], atol=1e-14)

    def test_sector_path_matches_dense(self):
        cfg = CouplingConfig(0.7, 1.3, phi=0.4, theta=-1.1)
        n = 6
        psi = fo.branch_to_fock(make_state(CatSpec(0.6), 0.3j, 0.2), n, truncation_tol=1e-2)
        out = fo.evolve_fock(psi, cfg, 2.3, truncation_tol=1e-2)
        ref = dense_evolve(psi.amps.ravel(), dense_interaction_hamiltonian(n, 0.7, 1.3, 0.4, -1.1),
                           2.3)
        np.testing.assert_allclose(out.amps.ravel(), ref, atol=1e-12)

    def test_recurrence(self):
        psi = fo.branch_to_fock(make_state(CatSpec(1.5, 0.5), 0.2, 0.0), 25)
        out = fo.evolve_fock(psi, RES, 2 * math.pi / math.sqrt(2))
        assert fo.fock_fidelity(psi, out) > 1 - 1e-12

    def test_odd_cat_parity_preserved(self):
        # odd cat lives in odd-total sectors; evolution never leaves them
        psi = fo.branch_to_fock(make_state(CatSpec(1.0, math.pi)), 20)
        out = fo.evolve_fock(psi, RES, 1.234)
        assert out.sector_weights()[::2].sum() < 1e-28

    def test_matches_branch_evolution(self):
        cfg = CouplingConfig.resonant(0.8, 1.1, phi=0.3, omega_a=1.0, omega_b=0.5, omega_c=0.2)
        s0 = make_state(CatSpec(1.2, 0.4), 0.3, -0.1j)
        t = 1.7
        analytic = fo.branch_to_fock(evolve(s0, compute_coefficients(cfg, t)), 25)
        numeric = fo.evolve_fock(fo.branch_to_fock(s0, 25), cfg, t)
        assert fo.fock_fidelity(analytic, numeric) > 1 - 1e-12

    @pytest.mark.parametrize("method,tol", [("krylov", 1e-12), ("ode", 1e-9)])
    def test_detuned(self, method, tol):
        cfg = CouplingConfig.resonant(0.9, 0.6, Omega=1.3, phi=0.2, omega_a=2.0, omega_b=0.4,
                                      omega_c=0.1)
        s0 = make_state(CatSpec(1.0), 0.2j, 0.0)
        t = 2.1
        analytic = fo.branch_to_fock(evolve(s0, compute_coefficients(cfg, t)), 15)
        numeric = fo.evolve_fock(fo.branch_to_fock(s0, 15), cfg, t, method=method)
        assert fo.fock_fidelity(analytic, numeric) > 1 - tol

    def test_detuned_methods_agree(self):
        cfg = CouplingConfig.resonant(1.2, 0.4, Omega=-2.0, theta=0.7)
        psi = fo.branch_to_fock(make_state(CatSpec(0.8, 1.0), 0.3, 0.1j), 12)
        a = fo.evolve_fock(psi, cfg, 3.3, method="krylov")
        b = fo.evolve_fock(psi, cfg, 3.3, method="ode")
        assert np.abs(a.amps - b.amps).max() < 1e-9

    def test_mean_photons_conserved(self):
        psi = fo.branch_to_fock(make_state(CatSpec(2.0)), 30)
        out = fo.evolve_fock(psi, RES, 0.77)
        assert out.mean_photons().sum() == pytest.approx(psi.mean_photons().sum(), abs=1e-10)


class TestReduced:
    def test_purity_of_cat_marginal(self):
        n = 25
        psi = fo.branch_to_fock(make_state(CatSpec(1.0)), n)
        assert fo.purity_fock(psi, 0) == pytest.approx(1.0, abs=1e-12)
        v = cat_vector(1.0, 0.0, n)
        np.testing.assert_allclose(np.abs(fo.reduced_density(psi, [0])),
                                   np.abs(np.outer(v, v.conj())), atol=1e-12)

    def test_spectrum_sorted(self):
        psi = fo.branch_to_fock(make_state(CatSpec(1.5)), 25)
        out = fo.evolve_fock(psi, RES, 0.5)
        spec = fo.reduced_spectrum_fock(out, [1])
        assert np.all(np.diff(spec) <= 1e-15) and spec.sum() == pytest.approx(1.0, abs=1e-12)


def test_beam_splitter_fock_matches_linear_map():
    phi = 0.6
    s0 = make_state(CatSpec(0.8), 0.3j, 0.0)
    U = np.eye(3, dtype=complex)
    U[:2, :2] = BeamSplitterSpec(phi).matrix()
    analytic = fo.branch_to_fock(apply_linear(s0, U), 20)
    numeric = fo.beam_splitter_fock(fo.branch_to_fock(s0, 20), 0, 1, phi)
    assert fo.fock_fidelity(analytic, numeric) > 1 - 1e-12
