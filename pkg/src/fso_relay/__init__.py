"""Triple-hop all-optical amplify-and-forward FSO link simulator."""

from .capacity import (CapacityEstimate, GeometryError, PlacementPoint, SweepResult,
                       compare_modes, ergodic_capacity, instantaneous_capacity, sweep)
from .channel import (FadingRealization, HopChannel, build_hop, fading_gains, fading_pdf,
                      hop_gains, path_loss, rytov_variance, sample_fading,
                      scattering_coefficient)
from .params import (ParameterError, PhotonBudget, SystemParams, dbm_to_watts, load_params,
                     params_to_config, photons_per_symbol, serialize_params, watts_to_dbm)
from .relay import (BREAKDOWN_LABELS, ChainComponents, DestinationStats, LaguerreParams,
                    VarianceMode, apply_detector, chain_components, chain_gains,
                    destination_stats, detector_input_params, electrical_snr,
                    full_csi_gain, laguerre_moments, printed_variance_terms,
                    relay1_output_params, relay2_output_params, signal_variance,
                    thermal_noise_variance)

__version__ = "0.1.0"
