"""Knowledge-aided low-rank STAP laboratory for side-looking airborne arrays."""

__version__ = "0.1.0"

from .algorithms import AlgorithmSpec, Knowledge, KnowledgeSpec, compute_weights
from .clutter import (ChannelMismatchSpec, ClutterScenario, SnapshotSet, TaperSpec, build_clutter_matrix, build_cmt,
                      generate_snapshots, ground_truth_covariance, icm_autocorrelation)
from .errors import (ConfigError, DegenerateTargetError, EmptyBasisError, IllConditionedError,
                     InvalidArgumentError)
from .evaluation import output_sinr, pd_vs_snr, sinr_vs_doppler, sinr_vs_parameter, sinr_vs_snapshots
from .filters import (FilterWeights, ReductionTransform, efa_transform, eigen_weights, jdl_transform,
                      ka_combo_covariance, ka_stap_weights, lse_covariance, lsmi_weights, mne_weights,
                      rd_ka_stap_weights)
from .geometry import (PriorDeviation, RadarConfig, brennan_rank, clutter_patch_frequencies, space_time_steering,
                       spatial_steering, temporal_steering)
from .subspace import (CovarianceEstimate, SubspaceBasis, assemble_tapered_ccm, estimate_powers, gram_schmidt,
                       low_rank_eig, select_lrgp_steering)
