"""Space-time adaptive clutter suppression with structured Toeplitz covariance
reconstruction, Brauer-disc training-cell screening and subspace-volume
covariance estimation."""

from .sim import (ScenarioConfig, SpaceTimeDataset, SpaceTimeSnapshot, TargetSpec,
                  capon_spectrum, generate_clutter, inject_targets, simulate_dataset,
                  steering_vector, table1_scenario)
from .thpd import (ReflectionSpectrum, ThpdCovariance, assemble_thpd, burg_reflection,
                   reconstruct_autocorrelation, thpd_from_snapshot)
from .screening import (BrauerSummary, ScreeningResult, brauer_radius, brauer_threshold,
                        screen)
from .grassmann import (CcmEstimate, GrassmannPoint, OptimizerConfig, estimate_ccm,
                        extract_subspace, principal_angles, vcf, vcf_gradient, volume)
from .stap import (MetricCurve, StapWeights, apply_filter, beampattern_slices,
                   euclidean_mean_ccm, gip_select, improvement_factor, lsmi,
                   output_scnr, scm, stap_weights)
from .pipeline import (BurgParams, PipelineConfig, RunManifest, WindowSpec,
                       compute_thpd, estimate_covariance, output_power_sweep,
                       output_scnr_curves, run_pipeline, select_training_window)

__version__ = "0.1.0"
