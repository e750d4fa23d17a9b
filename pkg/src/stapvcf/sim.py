"""Synthetic space-time data generation for a side-looking airborne ULA radar.

Generates clutter-plus-noise snapshots, injects range-spread targets, and
computes diagnostic Capon spectra.  Conventions: a space-time snapshot is the
Kronecker product of a temporal (Doppler) phase ramp and a spatial phase ramp,
temporal factor first.  The snapshot length is num_pulses * num_elements.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import cho_factor, cho_solve

SPEED_OF_LIGHT = 299792458.0


@dataclass
class ScenarioConfig:
    """Radar geometry, waveform, clutter and noise parameters."""

    num_elements: int = 10
    num_pulses: int = 12
    carrier_frequency: float = 1.5e9
    prf: float = 3000.0
    platform_velocity: float = 150.0
    platform_height: float = 10e3
    element_spacing: float | None = None  # None -> half wavelength
    num_clutter_patches: int = 201
    num_range_ambiguities: int = 1
    cnr_db: float = 50.0
    noise_variance: float = 1.0
    num_range_cells: int = 100
    rng_seed: int = 0
    # Per-cell log-normal power texture (dB std); 0 disables it.
    texture_sigma_db: float = 3.0

    def __post_init__(self):
        if self.num_elements < 2 or self.num_pulses < 2:
            raise ValueError("need at least 2 elements and 2 pulses")
        if self.prf <= 0:
            raise ValueError("prf must be positive")
        if self.num_clutter_patches < 1 or self.num_range_ambiguities < 1:
            raise ValueError("need at least one clutter patch and one ambiguity")
        if self.noise_variance <= 0:
            raise ValueError("noise_variance must be positive")
        if not math.isfinite(self.cnr_db):
            raise ValueError("cnr_db must be finite")
        if self.element_spacing is not None and self.element_spacing <= 0:
            raise ValueError("element_spacing must be positive")
        if self.num_range_cells < 1:
            raise ValueError("num_range_cells must be positive")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_frequency

    @property
    def spacing(self) -> float:
        return self.element_spacing if self.element_spacing is not None else self.wavelength / 2.0

    @property
    def dof(self) -> int:
        """Space-time degrees of freedom (snapshot length)."""
        return self.num_elements * self.num_pulses

    @property
    def beta(self) -> float:
        """Clutter ridge slope: Doppler/spatial frequency coupling."""
        return 2.0 * self.platform_velocity / (self.spacing * self.prf)

    @property
    def brennan_rank(self) -> int:
        """Clutter-rank estimate round(N + (M-1)*beta) for the side-looking ULA."""
        return int(round(self.num_pulses + (self.num_elements - 1) * self.beta))

    def steering(self, f_d: float, f_s: float) -> np.ndarray:
        """Space-time steering vector with the temporal length set by num_pulses."""
        return steering_vector(f_d, f_s, self.num_pulses, self.num_elements)


@dataclass
class TargetSpec:
    """A (possibly range-spread) target injected into listed range cells."""

    range_cells: list[int]
    normalized_doppler: float
    normalized_spatial: float
    amplitude: complex | None = None
    snr_db: float | None = None  # per-element power over noise_variance

    def __post_init__(self):
        if not self.range_cells:
            raise ValueError("range_cells must be non-empty")
        if abs(self.normalized_doppler) > 0.5:
            raise ValueError("|normalized_doppler| must be <= 0.5")
        if self.amplitude is None and self.snr_db is None:
            raise ValueError("provide amplitude or snr_db")

    def resolve_amplitude(self, noise_variance: float) -> complex:
        if self.amplitude is not None:
            return complex(self.amplitude)
        return complex(math.sqrt(10.0 ** (self.snr_db / 10.0) * noise_variance))


@dataclass
class SpaceTimeSnapshot:
    """One range cell's length-MN complex data vector."""

    cell_index: int
    data: np.ndarray

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=complex)
        if self.data.ndim != 1:
            raise ValueError("snapshot data must be a vector")
        if not np.all(np.isfinite(self.data)):
            raise ValueError("snapshot data must be finite")


@dataclass
class SpaceTimeDataset:
    config: ScenarioConfig
    snapshots: list[SpaceTimeSnapshot]
    targets: list[TargetSpec] = field(default_factory=list)
    ideal_clutter_covariance: np.ndarray | None = None

    def __post_init__(self):
        if len(self.snapshots) != self.config.num_range_cells:
            raise ValueError("snapshot count must equal num_range_cells")

    def data_matrix(self) -> np.ndarray:
        """Snapshots stacked as an (L, MN) array."""
        return np.stack([s.data for s in self.snapshots])


def steering_vector(f_d: float, f_s: float, M: int, N: int) -> np.ndarray:
    """Kronecker space-time steering vector, temporal factor (length M) first.

    Entry (m, n) equals exp(j*2*pi*(f_d*m + f_s*n)) for m = 0..M-1, n = 0..N-1.
    """
    if M < 1 or N < 1:
        raise ValueError("M and N must be >= 1")
    if not (math.isfinite(f_d) and math.isfinite(f_s)):
        raise ValueError("frequencies must be finite")
    v_d = np.exp(2j * np.pi * f_d * np.arange(M))
    v_s = np.exp(2j * np.pi * f_s * np.arange(N))
    return np.kron(v_d, v_s)


def _complex_normal(rng: np.random.Generator, size, scale=1.0) -> np.ndarray:
    """Circular complex Gaussian with per-sample variance scale**2."""
    return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) * (scale / np.sqrt(2.0))


def clutter_patch_frequencies(config: ScenarioConfig) -> tuple[np.ndarray, np.ndarray]:
    """Per-patch (doppler, spatial) normalized frequencies on the ridge f_d = beta*f_s."""
    nc = config.num_clutter_patches
    # Patch centres uniform in sine-of-azimuth over (-1, 1], front hemisphere.
    u = -1.0 + 2.0 * np.arange(1, nc + 1) / nc
    f_s = (config.spacing / config.wavelength) * u
    f_d = config.beta * f_s
    return f_d, f_s


def generate_clutter(config: ScenarioConfig, rng: np.random.Generator):
    """Clutter-only snapshots for every range cell plus the ideal covariance.

    Each cell sums num_range_ambiguities * num_clutter_patches patch returns
    with i.i.d. circular complex Gaussian amplitudes, scaled so that
    tr(R_c - noise*I) / (MN*noise) matches cnr_db.  The returned covariance
    includes the noise floor: sum sigma^2 v v^H + noise_variance * I.
    """
    f_d, f_s = clutter_patch_frequencies(config)
    mn = config.dof
    n_src = config.num_clutter_patches * config.num_range_ambiguities
    # Steering matrix, one column per patch, repeated per ambiguity.
    V1 = np.stack([config.steering(fd, fs) for fd, fs in zip(f_d, f_s)], axis=1)
    V = np.tile(V1, (1, config.num_range_ambiguities))
    cnr = 10.0 ** (config.cnr_db / 10.0)
    sigma2 = cnr * config.noise_variance / n_src
    R = sigma2 * (V @ V.conj().T) + config.noise_variance * np.eye(mn)
    R = 0.5 * (R + R.conj().T)

    sigma_ln = config.texture_sigma_db * np.log(10.0) / 10.0
    snaps = np.empty((config.num_range_cells, mn), dtype=complex)
    for l in range(config.num_range_cells):
        a = _complex_normal(rng, n_src, scale=np.sqrt(sigma2))
        c = V @ a
        if sigma_ln > 0:
            # Unit-mean log-normal power texture per cell.
            tau = np.exp(sigma_ln * rng.standard_normal() - 0.5 * sigma_ln**2)
            c = c * np.sqrt(tau)
        snaps[l] = c
    return snaps, R


def simulate_dataset(config: ScenarioConfig, targets: list[TargetSpec] | None = None) -> SpaceTimeDataset:
    """Full clutter + noise (+ targets) dataset, deterministic given rng_seed."""
    rng = np.random.default_rng(config.rng_seed)
    clutter, R = generate_clutter(config, rng)
    noise = _complex_normal(rng, clutter.shape, scale=np.sqrt(config.noise_variance))
    data = clutter + noise
    snapshots = [SpaceTimeSnapshot(l, data[l]) for l in range(config.num_range_cells)]
    dataset = SpaceTimeDataset(config=config, snapshots=snapshots, targets=[],
                               ideal_clutter_covariance=R)
    if targets:
        dataset = inject_targets(dataset, targets)
    return dataset


def inject_targets(dataset: SpaceTimeDataset, targets: list[TargetSpec]) -> SpaceTimeDataset:
    """Adds each target's scaled steering vector to its listed range cells."""
    cfg = dataset.config
    snaps = [SpaceTimeSnapshot(s.cell_index, s.data.copy()) for s in dataset.snapshots]
    for t in targets:
        a = t.resolve_amplitude(cfg.noise_variance)
        v = cfg.steering(t.normalized_doppler, t.normalized_spatial)
        for cell in t.range_cells:
            if cell < 0 or cell >= len(snaps):
                raise IndexError(f"target cell {cell} outside dataset (0..{len(snaps)-1})")
            snaps[cell].data = snaps[cell].data + a * v
    return SpaceTimeDataset(config=cfg, snapshots=snaps,
                            targets=list(dataset.targets) + list(targets),
                            ideal_clutter_covariance=dataset.ideal_clutter_covariance)


def capon_spectrum(R: np.ndarray, doppler_grid: np.ndarray, spatial_grid: np.ndarray,
                   M: int, N: int, loading: float = 0.0) -> np.ndarray:
    """Capon power P(f_d, f_s) = 1 / (v^H R^{-1} v) on the grid.

    Returns an array of shape (len(doppler_grid), len(spatial_grid)).
    """
    R = np.asarray(R, dtype=complex)
    if loading > 0:
        R = R + loading * np.eye(R.shape[0])
    try:
        cf = cho_factor(R)
    except np.linalg.LinAlgError as exc:
        raise ValueError("covariance is singular; use diagonal loading") from exc
    doppler_grid = np.asarray(doppler_grid, dtype=float)
    spatial_grid = np.asarray(spatial_grid, dtype=float)
    Vd = np.exp(2j * np.pi * np.outer(np.arange(M), doppler_grid))  # (M, nd)
    Vs = np.exp(2j * np.pi * np.outer(np.arange(N), spatial_grid))  # (N, ns)
    out = np.empty((doppler_grid.size, spatial_grid.size))
    for i in range(doppler_grid.size):
        V = np.einsum("m,ns->mns", Vd[:, i], Vs).reshape(M * N, spatial_grid.size)
        X = cho_solve(cf, V)
        denom = np.einsum("ks,ks->s", V.conj(), X).real
        out[i] = 1.0 / denom
    return out


def table1_scenario(seed: int = 0, **overrides) -> ScenarioConfig:
    """The simulated side-looking ULA scenario used throughout the test-bench."""
    return replace(ScenarioConfig(rng_seed=seed), **overrides) if overrides else ScenarioConfig(rng_seed=seed)
