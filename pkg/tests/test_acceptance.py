"""Acceptance gate: one test per release criterion, each reporting a single
PASS/FAIL line (collected into the terminal summary) with its headline number.

Tolerances are pinned here and nowhere else; do not loosen them to make a
criterion pass.
"""
import time

import numpy as np
from scipy.linalg import toeplitz

import stapvcf as sv
from stapvcf.grassmann import OptimizerConfig, _qr_retract
from stapvcf.pipeline import PipelineConfig, WindowSpec, estimate_covariance
from stapvcf.screening import brauer_radius
from stapvcf.thpd import ReflectionSpectrum

import conftest
from _oracles import levinson_durbin, random_reflection_sequence

# Minimum final-to-initial prediction-power ratio enforced by the round-trip
# sampler.  The recovery error grows like roundoff divided by this power
# ratio, so sequences below it cannot meet the 1e-9 tolerance in double
# precision no matter which algorithm recovers them; the sampler shrinks the
# magnitudes (phases kept) until the ratio holds.
ROUND_TRIP_MIN_POWER = 0.03


def _record(name: str, ok: bool, detail: str = "") -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {name}" + (f" — {detail}" if detail else "")
    print(line)
    conftest.ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_acceptance_round_trip():
    rng = np.random.default_rng(42)
    t0 = time.time()
    worst = 0.0
    for _ in range(200):
        mu = random_reflection_sequence(rng, 32, max_mag=0.95,
                                        min_power_ratio=ROUND_TRIP_MIN_POWER)
        powers = np.cumprod(np.concatenate(([1.0], 1.0 - np.abs(mu) ** 2)))
        spec = ReflectionSpectrum(p0=1.0, mu=mu, prediction_powers=powers)
        r = sv.reconstruct_autocorrelation(spec, 32)
        mu_back, _ = levinson_durbin(r)
        worst = max(worst, float(np.max(np.abs(mu_back - mu) / np.abs(mu))))
    elapsed = time.time() - t0
    ok = worst < 1e-9 and elapsed < 5.0
    _record("round trip: 200 reflection sequences recovered",
            ok, f"max rel err {worst:.2e}, {elapsed:.2f}s")


def test_acceptance_thpd_positive_definite(table1_dataset):
    t0 = time.time()
    min_eig = np.inf
    for snap in table1_dataset.snapshots[:100]:
        R = sv.thpd_from_snapshot(snap.data).matrix()
        min_eig = min(min_eig, float(np.linalg.eigvalsh(R).min()))
    elapsed = time.time() - t0
    ok = min_eig > 0 and elapsed < 30.0
    _record("THPD positive definiteness: 100 snapshots",
            ok, f"min eigenvalue {min_eig:.3e}, {elapsed:.1f}s")


def test_acceptance_brauer_containment():
    rng = np.random.default_rng(7)
    violations = 0
    for _ in range(1000):
        r = np.concatenate(([rng.uniform(0.5, 4.0)],
                            rng.standard_normal(7) + 1j * rng.standard_normal(7)))
        M = toeplitz(r, r.conj())  # Hermitian Toeplitz, not necessarily PD
        center, D = brauer_radius(M)
        eigs = np.linalg.eigvalsh(M)
        if np.any(np.abs(eigs - center) > D + 1e-10):
            violations += 1
    _record("Brauer containment: 1000 Hermitian Toeplitz matrices",
            violations == 0, f"{violations} violations")


def _basis(rng, K, s):
    A = rng.standard_normal((K, s)) + 1j * rng.standard_normal((K, s))
    return np.linalg.qr(A)[0]


def test_acceptance_vcf_triple_consistency():
    rng = np.random.default_rng(11)
    worst_pair, worst_unitary = 0.0, 0.0
    for _ in range(500):
        s = int(rng.integers(1, 6))
        U1, U2 = _basis(rng, 16, s), _basis(rng, 16, s)
        f_det = sv.vcf(U1, U2)
        f_sin = float(np.prod(np.sin(sv.principal_angles(U1, U2))))
        f_vol = sv.volume(np.hstack([U1, U2]), 2 * s)
        assert 0.0 <= f_det <= 1.0
        worst_pair = max(worst_pair, abs(f_det - f_sin), abs(f_det - f_vol),
                         abs(f_sin - f_vol))
        Q = np.linalg.qr(rng.standard_normal((s, s))
                         + 1j * rng.standard_normal((s, s)))[0]
        worst_unitary = max(worst_unitary, abs(sv.vcf(U1 @ Q, U2) - f_det))
    ok = worst_pair < 1e-9 and worst_unitary < 1e-10
    _record("VCF triple consistency: 500 basis pairs",
            ok, f"max pairwise gap {worst_pair:.2e}, unitary gap {worst_unitary:.2e}")


def test_acceptance_gradient_check():
    rng = np.random.default_rng(23)
    h = 1e-6
    worst = 0.0
    for _ in range(100):
        s = int(rng.integers(1, 5))
        U_q, U = _basis(rng, 12, s), _basis(rng, 12, s)
        grad = sv.vcf_gradient(U_q, U)
        for _ in range(5):
            D = rng.standard_normal((12, s)) + 1j * rng.standard_normal((12, s))
            D /= np.linalg.norm(D)

            def f(t):
                C = U_q.conj().T @ (U + t * D)
                G = np.eye(s) - C.conj().T @ C
                return float(np.sqrt(max(np.linalg.det(G).real, 0.0)))

            fd = (f(h) - f(-h)) / (2 * h)
            analytic = float(np.real(np.trace(grad.conj().T @ D)))
            worst = max(worst, abs(analytic - fd) / max(abs(fd), 1e-12))
    _record("gradient check: 100 instances x 5 directions",
            worst < 1e-5, f"max rel err {worst:.2e}")


def test_acceptance_descent_and_planted_recovery():
    rng = np.random.default_rng(31)
    worst_angle = 0.0
    monotone = True
    for _ in range(20):
        K, s = 16, 4
        truth = _basis(rng, K, s)
        points = []
        for _ in range(6):
            noisy = _qr_retract(truth + 0.01 * (rng.standard_normal((K, s))
                                                + 1j * rng.standard_normal((K, s))))
            points.append(sv.GrassmannPoint(basis=noisy,
                                            eigenvalues=np.arange(s, 0, -1.0),
                                            noise_floor=0.1))
        est = sv.estimate_ccm(points, OptimizerConfig(step_size=1.0, max_iterations=300))
        monotone &= bool(np.all(np.diff(est.objective_trace) <= 1e-12))
        worst_angle = max(worst_angle,
                          float(sv.principal_angles(truth, est.basis.basis).max()))
    ok = monotone and worst_angle < 0.1
    _record("descent monotonicity and planted recovery: 20 batches",
            ok, f"monotone={monotone}, max angle {worst_angle:.3f} rad")


# Contaminating targets shared by the screening / ordering scenarios.  The
# injected per-element amplitude is expressed relative to the noise floor; on
# the input signal-to-clutter scale (clutter sits 50 dB above noise) 85 dB
# here is a 35 dB target, comfortably above the >= 10 dB regime.
def _fig4_targets(snr_db=85.0):
    return [sv.TargetSpec(range_cells=[30, 31, 32], normalized_doppler=0.25,
                          normalized_spatial=0.0, snr_db=snr_db),
            sv.TargetSpec(range_cells=[39, 40, 41], normalized_doppler=-0.1,
                          normalized_spatial=0.0, snr_db=snr_db)]


def test_acceptance_screening_reproduction():
    exact_a = exact_b = 0
    for seed in range(10):
        ds = sv.simulate_dataset(sv.table1_scenario(seed=seed), _fig4_targets())
        mats = {i: sv.thpd_from_snapshot(ds.snapshots[i].data, cell_index=i)
                for i in range(15, 65)}
        res_a = sv.screen([mats[i] for i in range(15, 40)])
        res_b = sv.screen([mats[i] for i in range(15, 65)])
        exact_a += set(res_a.target_cells) == {30, 31, 32, 39}
        exact_b += set(res_b.target_cells) == {30, 31, 32, 39, 40, 41}
    ok = exact_a >= 9 and exact_b >= 9
    _record("screening reproduction: contaminated-cell detection",
            ok, f"25-cell window {exact_a}/10 exact, 50-cell window {exact_b}/10 exact")


def _ordering_setup(targets):
    scenario = sv.table1_scenario(seed=0)
    cfg = PipelineConfig(scenario=scenario, targets=targets,
                         window=WindowSpec(num_training=25, num_guard=2, cut_index=35),
                         estimators=["bgvcf", "gvcf", "lsmi"])
    ds = sv.simulate_dataset(scenario, targets)
    idx = sv.select_training_window(scenario.num_range_cells, 35, 25, 2)
    train = [ds.snapshots[i] for i in idx]
    mats = sv.compute_thpd(train, cfg.burg)
    return cfg, ds, train, mats


def test_acceptance_if_ordering():
    t0 = time.time()
    cfg, ds, train, mats = _ordering_setup(_fig4_targets(snr_db=5.0))
    grid = np.linspace(-0.5, 0.5, 81)
    keep = np.abs(grid) >= 0.05
    mean_if = {}
    for name in cfg.estimators:
        R_hat, _ = estimate_covariance(name, train, mats, cfg,
                                       ideal=ds.ideal_clutter_covariance)
        curve = sv.improvement_factor(R_hat, ds.ideal_clutter_covariance, grid, 0.0,
                                      cfg.scenario.num_pulses, cfg.scenario.num_elements,
                                      name)
        mean_if[name] = float(curve.values[keep].mean())
    elapsed = time.time() - t0
    ok = (mean_if["bgvcf"] >= mean_if["lsmi"] + 5.0
          and mean_if["bgvcf"] >= mean_if["gvcf"] - 1e-9
          and elapsed < 300.0)
    _record("IF ordering: screened estimator leads the loaded-SCM baseline",
            ok, "mean IF dB: " + ", ".join(f"{k}={v:.1f}" for k, v in mean_if.items())
            + f"; {elapsed:.0f}s")


def test_acceptance_output_scnr_ordering():
    scenario = sv.table1_scenario(seed=11)
    targets = [sv.TargetSpec(range_cells=[31], normalized_doppler=0.25,
                             normalized_spatial=0.0, snr_db=5.0)]
    cfg = PipelineConfig(scenario=scenario, targets=targets,
                         window=WindowSpec(num_training=25, num_guard=2, cut_index=31),
                         estimators=["optimal", "bgvcf", "gvcf", "lsmi"],
                         scnr_grid_db=list(np.arange(-10.0, 30.0, 5.0)))
    curves = {c.estimator_name: c.values for c in sv.output_scnr_curves(cfg)}
    n = len(cfg.scnr_grid_db)
    chain = (np.all(curves["bgvcf"] >= curves["gvcf"] - 0.5)
             and np.all(curves["gvcf"] >= curves["lsmi"] - 0.5))
    bounded = all(np.all(curves[k] <= curves["optimal"] + 1e-6)
                  for k in ("bgvcf", "gvcf", "lsmi"))
    ok = bool(n >= 8 and chain and bounded)
    mids = {k: float(v[n // 2]) for k, v in curves.items()}
    _record("output-SCNR ordering over the input sweep",
            ok, f"{n} points, chain={bool(chain)}, bounded={bool(bounded)}, "
            "mid-sweep dB: " + ", ".join(f"{k}={v:.1f}" for k, v in mids.items()))


def test_acceptance_unit_gain_and_scale_invariance(table1_dataset):
    rng = np.random.default_rng(5)
    cfg = table1_dataset.config
    R_ideal = table1_dataset.ideal_clutter_covariance
    train = table1_dataset.snapshots[10:35]
    mats = sv.compute_thpd(train, sv.BurgParams())
    pcfg = PipelineConfig(scenario=cfg)
    worst_gain, worst_scale = 0.0, 0.0
    for name in ("optimal", "bgvcf", "gvcf", "lsmi", "euclidean_mean"):
        R_hat, _ = estimate_covariance(name, train, mats, pcfg, ideal=R_ideal)
        for f_d in (-0.3, 0.0, 0.25):
            v = cfg.steering(f_d, 0.1)
            w = sv.stap_weights(R_hat, v, name).w
            worst_gain = max(worst_gain, abs(w.conj() @ v - 1.0))
            for c in (1e-3, 1.0, 1e3):
                w_c = sv.stap_weights(c * R_hat, v, name).w
                worst_scale = max(worst_scale,
                                  float(np.max(np.abs(w_c - w) / np.abs(w))))
    ok = worst_gain < 1e-10 and worst_scale < 1e-9
    _record("unit gain and scale invariance across estimators",
            ok, f"max |w^H v - 1| {worst_gain:.1e}, max scaling drift {worst_scale:.1e}")


def test_acceptance_determinism(tmp_path):
    digests = []
    for sub in ("run1", "run2"):
        cfg = PipelineConfig(scenario=sv.table1_scenario(seed=2),
                             targets=_fig4_targets(),
                             window=WindowSpec(num_training=25, num_guard=2,
                                               cut_index=31),
                             estimators=["bgvcf", "lsmi"],
                             scnr_grid_db=[0.0, 10.0],
                             output_dir=str(tmp_path / sub))
        sv.run_pipeline(cfg)
        files = sorted((tmp_path / sub).glob("*.csv"))
        digests.append({f.name: f.read_bytes() for f in files})
    ok = bool(digests[0]) and digests[0] == digests[1]
    _record("determinism: repeated runs are byte-identical",
            ok, f"{len(digests[0])} CSV files compared")
