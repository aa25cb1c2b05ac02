"""Sub-Nyquist compressed-sensing pulse-Doppler radar with difference-set sampling."""

from .ds_codes import DifferenceSet, catalog, equivalent_shift, quadratic_residue_ds, verify_difference_set
from .dictionaries import (
    build_sampling,
    coherence,
    delay_dictionary,
    doppler_dictionary,
    fourier_range,
    mu_profile,
    sparsity_bound,
    welch_bound,
)
from .waveforms import ctft, fourier_coefficients, make_waveform
from .measurement import (
    NoiseSpec,
    RadarParams,
    Scene,
    Target,
    add_noise,
    fourier_extract,
    random_scene,
    synthesize_model,
    synthesize_time_oracle,
)
from .recovery import RecoveryConfig, df_recover, doppler_focus, extract_targets, somp, standard_recover, structured_recover
from .metrics import NyquistBins, match_detections, separate_detection

__version__ = "0.1.0"
