import json
import math

import numpy as np
import pytest

from divergelab import matcore
from divergelab.errors import DimensionMismatch, DomainError, NotHermitian, NotPSD

from conftest import random_hermitian, random_psd

SIGMA_Z = np.diag([1.0, -1.0])


class TestEigHermitian:
    def test_identity(self):
        dec = matcore.eig_hermitian(np.eye(2))
        assert np.allclose(dec.eigenvalues, [1.0, 1.0])

    def test_sigma_z_sorted_descending(self):
        dec = matcore.eig_hermitian(SIGMA_Z)
        assert np.allclose(dec.eigenvalues, [1.0, -1.0])
        # already diagonal: eigenvectors are the computational basis
        assert np.allclose(np.abs(dec.eigenvectors), np.eye(2), atol=1e-12)

    def test_trace_identity_random(self, rng):
        m = random_hermitian(5, rng)
        dec = matcore.eig_hermitian(m)
        assert abs(dec.eigenvalues.sum() - np.trace(m).real) < 1e-10

    @pytest.mark.parametrize("dim", [2, 3, 7, 16])
    def test_spectral_invariants(self, dim, rng):
        # sum of eigenvalues = trace, sum of squares = squared Frobenius norm
        for _ in range(25):
            m = random_hermitian(dim, rng)
            dec = matcore.eig_hermitian(m)
            scale = max(1.0, np.linalg.norm(m))
            assert abs(dec.eigenvalues.sum() - np.trace(m).real) < 1e-10 * scale
            assert abs((dec.eigenvalues**2).sum() - np.linalg.norm(m) ** 2) < 1e-10 * scale**2
            assert np.linalg.norm(dec.reconstruct() - m) < 1e-10 * scale
            q = dec.eigenvectors
            assert np.max(np.abs(q.conj().T @ q - np.eye(dim))) < 1e-10

    def test_phase_convention_reproducible(self, rng):
        m = random_hermitian(4, rng)
        a = matcore.eig_hermitian(m)
        b = matcore.eig_hermitian(m.copy())
        assert np.array_equal(a.eigenvectors, b.eigenvectors)

    def test_not_hermitian(self):
        with pytest.raises(NotHermitian):
            matcore.eig_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_rectangular(self):
        with pytest.raises(DimensionMismatch):
            matcore.eig_hermitian(np.zeros((2, 3)))


class TestMatrixFunction:
    def test_sqrt_diagonal(self):
        out = matcore.matrix_function(np.diag([4.0, 9.0]), np.sqrt)
        assert np.allclose(out, np.diag([2.0, 3.0]), atol=1e-12)

    def test_log_identity_is_zero(self):
        out = matcore.matrix_function(np.eye(3), np.log)
        assert np.max(np.abs(out)) < 1e-12

    def test_log_skip_zero_eigenvalues(self):
        m = np.diag([0.5, 0.5, 0.0, 0.0])
        out = matcore.matrix_function(m, np.log, zero_policy="skip")
        expected = np.diag([-math.log(2), -math.log(2), 0.0, 0.0])
        assert np.max(np.abs(out - expected)) < 1e-12

    def test_log_apply_on_singular_raises(self):
        with pytest.raises(DomainError):
            matcore.matrix_function(np.diag([1.0, 0.0]), np.log, zero_policy="apply")

    def test_sqrt_squares_back(self, rng):
        m = random_psd(4, rng)
        root = matcore.matrix_function(m, np.sqrt)
        assert np.linalg.norm(root @ root - m) < 1e-9 * max(1.0, np.linalg.norm(m))


class TestSchattenNorm:
    def test_sigma_z(self):
        assert abs(matcore.schatten_norm(SIGMA_Z, "trace") - 2.0) < 1e-12
        assert abs(matcore.schatten_norm(SIGMA_Z, "hilbert_schmidt") - math.sqrt(2)) < 1e-12
        assert abs(matcore.schatten_norm(SIGMA_Z, "operator") - 1.0) < 1e-12

    def test_zero_matrix(self):
        z = np.zeros((3, 3))
        for kind in ("trace", "hilbert_schmidt", "operator"):
            assert matcore.schatten_norm(z, kind) == 0.0

    def test_orthogonal_support_difference(self):
        # difference of states on orthogonal supports has trace norm 2
        rho = np.diag([0.5, 0.5, 0.0, 0.0])
        sigma = np.diag([0.0, 0.0, 0.5, 0.5])
        assert abs(matcore.schatten_norm(rho - sigma, "trace") - 2.0) < 1e-12

    def test_norm_ordering(self, rng):
        for _ in range(20):
            m = random_hermitian(5, rng)
            op = matcore.schatten_norm(m, "operator")
            hs = matcore.schatten_norm(m, "hilbert_schmidt")
            tr = matcore.schatten_norm(m, "trace")
            assert op <= hs + 1e-12 <= tr + 2e-12

    def test_general_matrix_uses_singular_values(self, rng):
        m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        sv = np.linalg.svd(m, compute_uv=False)
        assert abs(matcore.schatten_norm(m, "trace") - sv.sum()) < 1e-10


class TestTensor:
    def test_identity(self):
        assert np.allclose(matcore.tensor(np.eye(2), np.eye(3)), np.eye(6))

    def test_projector_with_mixed_environment(self):
        n = 3
        out = matcore.tensor(np.diag([1.0, 0.0]), np.eye(n) / n)
        expected = np.zeros((2 * n, 2 * n))
        expected[:n, :n] = np.eye(n) / n
        assert np.allclose(out, expected)

    def test_trace_multiplicativity(self, rng):
        a = random_hermitian(3, rng)
        b = random_hermitian(4, rng)
        assert abs(np.trace(matcore.tensor(a, b)) - np.trace(a) * np.trace(b)) < 1e-12


def brute_force_partial_trace(m, d_s, d_e, keep):
    """Index-sum oracle, independent of the reshape/trace implementation."""
    if keep == "S":
        out = np.zeros((d_s, d_s), dtype=complex)
        for i in range(d_s):
            for j in range(d_s):
                for a in range(d_e):
                    out[i, j] += m[i * d_e + a, j * d_e + a]
    else:
        out = np.zeros((d_e, d_e), dtype=complex)
        for a in range(d_e):
            for b in range(d_e):
                for i in range(d_s):
                    out[a, b] += m[i * d_e + a, i * d_e + b]
    return out


class TestPartialTrace:
    def test_left_inverse_of_assignment(self, rng):
        rho = random_psd(3, rng)
        tau = random_psd(2, rng)
        tau /= np.trace(tau)
        out = matcore.partial_trace(matcore.tensor(rho, tau), (3, 2), keep="S")
        assert np.max(np.abs(out - rho)) < 1e-12

    def test_recovers_scaled_factor_either_side(self, rng):
        a = random_hermitian(2, rng)
        b = random_hermitian(3, rng)
        prod = matcore.tensor(a, b)
        assert np.max(np.abs(matcore.partial_trace(prod, (2, 3), "S") - np.trace(b) * a)) < 1e-12
        assert np.max(np.abs(matcore.partial_trace(prod, (2, 3), "E") - np.trace(a) * b)) < 1e-12

    def test_maximally_entangled_reduces_to_mixed(self):
        psi = (np.kron([1, 0], [1, 0]) + np.kron([0, 1], [0, 1])) / math.sqrt(2)
        proj = np.outer(psi, psi.conj())
        out = matcore.partial_trace(proj, (2, 2), keep="S")
        assert np.max(np.abs(out - brute_force_partial_trace(proj, 2, 2, "S"))) < 1e-14
        assert np.max(np.abs(out - np.eye(2) / 2)) < 1e-12

    def test_matches_brute_force(self, rng):
        m = random_hermitian(6, rng)
        for keep in ("S", "E"):
            got = matcore.partial_trace(m, (2, 3), keep)
            assert np.max(np.abs(got - brute_force_partial_trace(m, 2, 3, keep))) < 1e-13

    def test_trace_preserved(self, rng):
        m = random_hermitian(6, rng)
        assert abs(np.trace(matcore.partial_trace(m, (3, 2), "S")) - np.trace(m)) < 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            matcore.partial_trace(np.eye(5), (2, 2))


class TestSupportProjector:
    def test_full_rank_gives_identity(self, rng):
        m = random_psd(3, rng)
        assert np.max(np.abs(matcore.support_projector(m) - np.eye(3))) < 1e-10

    def test_pure_state_is_its_own_projector(self):
        v = np.array([1.0, 1j]) / math.sqrt(2)
        proj = np.outer(v, v.conj())
        assert np.max(np.abs(matcore.support_projector(proj) - proj)) < 1e-12

    def test_rank_two_block(self):
        m = np.diag([0.5, 0.5, 0.0, 0.0])
        assert np.allclose(matcore.support_projector(m), np.diag([1.0, 1.0, 0.0, 0.0]), atol=1e-12)

    def test_idempotent_and_reproduces(self, rng):
        g = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
        m = g @ g.conj().T
        p = matcore.support_projector(m)
        assert np.max(np.abs(p @ p - p)) < 1e-10
        assert np.max(np.abs(p @ m @ p - m)) < 1e-10 * 4

    def test_not_psd(self):
        with pytest.raises(NotPSD):
            matcore.support_projector(np.diag([1.0, -0.5]))


def test_matrix_json_roundtrip(rng):
    m = random_hermitian(3, rng)
    back = matcore.matrix_from_dict(json.loads(json.dumps(matcore.matrix_to_dict(m))))
    assert np.max(np.abs(back - m)) < 1e-15
