import numpy as np
import pytest

import stapvcf as sv
from stapvcf.grassmann import GrassmannPoint, OptimizerConfig, _qr_retract

from _oracles import gram_volume


def _random_basis(rng, K, s):
    A = rng.standard_normal((K, s)) + 1j * rng.standard_normal((K, s))
    Q, _ = np.linalg.qr(A)
    return Q


def _random_unitary(rng, s):
    return _random_basis(rng, s, s)


def test_extract_subspace_diagonal():
    point = sv.extract_subspace(np.diag([5.0, 3.0, 2.0, 1.0]).astype(complex), 2)
    np.testing.assert_allclose(np.abs(point.basis),
                               np.eye(4)[:, :2], atol=1e-12)
    np.testing.assert_allclose(point.eigenvalues, [5.0, 3.0])
    assert point.noise_floor == pytest.approx(1.5)


def test_extract_subspace_identity_tie_break():
    point = sv.extract_subspace(np.eye(4, dtype=complex), 2)
    np.testing.assert_allclose(point.basis, np.eye(4)[:, :2], atol=1e-12)


def test_extract_subspace_diagonalizes(rng):
    A = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    R = A @ A.conj().T + np.eye(6)
    point = sv.extract_subspace(R, 3)
    lam_all = np.sort(np.linalg.eigvalsh(R))[::-1]
    D = point.basis.conj().T @ R @ point.basis
    np.testing.assert_allclose(D, np.diag(lam_all[:3]), atol=1e-9)
    with pytest.raises(ValueError):
        sv.extract_subspace(R, 0)
    with pytest.raises(ValueError):
        sv.extract_subspace(R, 7)


def test_volume_matches_gram_determinant(rng):
    for _ in range(20):
        S = rng.standard_normal((8, 3)) + 1j * rng.standard_normal((8, 3))
        assert sv.volume(S, 3) == pytest.approx(gram_volume(S), rel=1e-9)
    with pytest.raises(ValueError):
        sv.volume(S, 2)


def test_volume_rank_deficient():
    S = np.ones((4, 2), dtype=complex)
    assert sv.volume(S, 2) == pytest.approx(0.0, abs=1e-12)


def test_principal_angles_planted_rotation(rng):
    theta = 0.4
    U1 = np.eye(4, dtype=complex)[:, :2]
    U2 = np.zeros((4, 2), dtype=complex)
    U2[:, 0] = [np.cos(theta), 0.0, np.sin(theta), 0.0]
    U2[:, 1] = [0.0, 1.0, 0.0, 0.0]
    ang = sv.principal_angles(U1, U2)
    np.testing.assert_allclose(ang, [0.0, theta], atol=1e-12)


def test_vcf_endpoints(rng):
    U = _random_basis(rng, 8, 3)
    assert sv.vcf(U, U) == pytest.approx(0.0, abs=1e-9)
    I8 = np.eye(8, dtype=complex)
    assert sv.vcf(I8[:, :3], I8[:, 3:6]) == pytest.approx(1.0)


def test_vcf_triple_consistency(rng):
    """Determinant form == sine product of principal angles == volume of the
    concatenated bases, and right-unitary invariance holds."""
    for _ in range(25):
        K = 10
        s = int(rng.integers(1, 5))
        U1, U2 = _random_basis(rng, K, s), _random_basis(rng, K, s)
        f_det = sv.vcf(U1, U2)
        f_sin = float(np.prod(np.sin(sv.principal_angles(U1, U2))))
        f_vol = sv.volume(np.hstack([U1, U2]), 2 * s)
        assert f_det == pytest.approx(f_sin, abs=1e-10)
        assert f_det == pytest.approx(f_vol, abs=1e-10)
        Q = _random_unitary(rng, s)
        assert sv.vcf(U1 @ Q, U2) == pytest.approx(f_det, abs=1e-10)
        assert sv.vcf(U1, U2 @ Q) == pytest.approx(f_det, abs=1e-10)


def test_vcf_rejects_non_orthonormal():
    bad = np.ones((6, 2), dtype=complex)
    good = np.eye(6, dtype=complex)[:, :2]
    with pytest.raises(ValueError):
        sv.vcf(bad, good)
    with pytest.raises(ValueError):
        sv.principal_angles(good, np.eye(5, dtype=complex)[:, :2])


def test_gradient_matches_finite_differences(rng):
    h = 1e-6
    for _ in range(10):
        K, s = 10, 3
        U_q, U = _random_basis(rng, K, s), _random_basis(rng, K, s)
        grad = sv.vcf_gradient(U_q, U)
        for _ in range(3):
            D = rng.standard_normal((K, s)) + 1j * rng.standard_normal((K, s))
            D /= np.linalg.norm(D)

            def f(t):
                Ut = U + t * D
                C = U_q.conj().T @ Ut
                G = np.eye(s) - C.conj().T @ C
                return float(np.sqrt(max(np.linalg.det(G).real, 0.0)))

            fd = (f(h) - f(-h)) / (2 * h)
            analytic = float(np.real(np.trace(grad.conj().T @ D)))
            assert analytic == pytest.approx(fd, rel=1e-4, abs=1e-9)


def test_qr_retract_is_orthonormal_and_sign_fixed(rng):
    Y = rng.standard_normal((8, 3)) + 1j * rng.standard_normal((8, 3))
    Q = _qr_retract(Y)
    np.testing.assert_allclose(Q.conj().T @ Q, np.eye(3), atol=1e-12)
    # Retracting an orthonormal basis reproduces it exactly (up to roundoff).
    np.testing.assert_allclose(_qr_retract(Q), Q, atol=1e-12)


def test_grassmann_point_validation(rng):
    U = _random_basis(rng, 6, 2)
    with pytest.raises(ValueError):
        GrassmannPoint(basis=np.ones((6, 2), dtype=complex), eigenvalues=np.array([2.0, 1.0]))
    with pytest.raises(ValueError):
        GrassmannPoint(basis=U, eigenvalues=np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        GrassmannPoint(basis=U, eigenvalues=np.array([1.0, -2.0]))


def test_optimizer_config_validation():
    with pytest.raises(ValueError):
        OptimizerConfig(step_size=0.0)
    with pytest.raises(ValueError):
        OptimizerConfig(weights=np.array([0.5, 0.6]))
    with pytest.raises(ValueError):
        OptimizerConfig(weights=np.array([1.0, -0.0001]))


def test_estimate_ccm_single_point(rng):
    U = _random_basis(rng, 8, 2)
    p = GrassmannPoint(basis=U, eigenvalues=np.array([4.0, 2.0]), noise_floor=0.5)
    est = sv.estimate_ccm([p])
    assert est.converged
    assert sv.vcf(U, est.basis.basis) == pytest.approx(0.0, abs=1e-8)
    expect = (U * [4.0, 2.0]) @ U.conj().T + 0.5 * np.eye(8)
    np.testing.assert_allclose(est.covariance, expect, atol=1e-10)


def test_estimate_ccm_planted_recovery(rng):
    """Noisy perturbations of one subspace average back to (near) the truth,
    with a monotone objective trace."""
    K, s = 12, 3
    truth = _random_basis(rng, K, s)
    points = []
    for i in range(8):
        noisy = _qr_retract(truth + 0.01 * (rng.standard_normal((K, s))
                                            + 1j * rng.standard_normal((K, s))))
        points.append(GrassmannPoint(basis=noisy,
                                     eigenvalues=np.array([3.0, 2.0, 1.0]),
                                     noise_floor=0.1))
    est = sv.estimate_ccm(points, OptimizerConfig(step_size=1.0, max_iterations=300))
    assert np.all(np.diff(est.objective_trace) <= 1e-12)
    assert sv.principal_angles(truth, est.basis.basis).max() < 0.1


def test_estimate_ccm_validation(rng):
    with pytest.raises(ValueError):
        sv.estimate_ccm([])
    p1 = GrassmannPoint(basis=_random_basis(rng, 6, 2), eigenvalues=np.array([2.0, 1.0]))
    p2 = GrassmannPoint(basis=_random_basis(rng, 6, 3), eigenvalues=np.array([3.0, 2.0, 1.0]))
    with pytest.raises(ValueError):
        sv.estimate_ccm([p1, p2])
    with pytest.raises(ValueError):
        sv.estimate_ccm([p1], OptimizerConfig(weights=np.array([0.5, 0.5])))


def test_estimate_ccm_covariance_is_pd(rng):
    points = [GrassmannPoint(basis=_random_basis(rng, 8, 2),
                             eigenvalues=np.array([5.0, 2.0]), noise_floor=0.3)
              for _ in range(4)]
    est = sv.estimate_ccm(points)
    R = est.covariance
    np.testing.assert_allclose(R, R.conj().T, atol=1e-12)
    assert np.linalg.eigvalsh(R).min() > 0
