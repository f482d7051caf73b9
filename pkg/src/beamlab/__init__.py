"""beamlab: robust adaptive beamforming with sector-sampled interference
covariance reconstruction, steering-vector estimation by power iteration,
and a Monte Carlo experiment harness."""

from ._kernels import BACKEND
from .signal_model import (ArrayGeometry, MismatchSpec, ScenarioTruth,
                           generate_snapshots, perturbed_steering,
                           realize_scenario, steering_derivative, steering_vector)
from .covariance import (hermitianize, is_hermitian, is_psd, load_matrix_csv,
                         pearson_correlation, sample_covariance, save_matrix_csv,
                         theoretical_covariance, theoretical_ipnc)
from .doa_tracking import (DoaTrack, SectorEntry, SectorSpec, coarse_doas_dft,
                           fine_doa, fine_doa_series, fit_trajectory,
                           sector_indices, track_interferers)
from .reconstruction import (ShrinkageStats, closed_form_weights,
                             preprocessing_matrix, reconstruct_ipnc,
                             shrinkage_stats)
from .soi_estimation import (PowerMethodResult, SoiSector, max_entropy_spectrum,
                             power_method, soi_covariance, spectrum_inverse)
from .beamforming import (BeamformerResult, approx_beampattern, beampattern,
                          diagonal_loading_weight, mvdr_weight, optimal_sinr_db,
                          optimal_weight, output_sinr_db, smi_weight)
from .analysis import CrbReport, crb_doa, doa_mse_experiment
from .pipeline import PipelineSettings, ppbss_beamformer
from .experiments import (ExperimentConfig, ScenarioConfig, aggregate_rows,
                          load_and_verify, run_sweep, run_trial, trial_rng)
from .presets import PRESETS, load_config, preset

__version__ = "0.1.0"
