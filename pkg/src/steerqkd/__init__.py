"""Key rates, thresholds and simulation for steering-certified one-sided
device-independent QKD under collective attacks."""

from .keyrates import (
    NoiseParams,
    RateReport,
    binary_entropy,
    eve_info_from_f3,
    holevo_bell_diagonal_upper,
    observables_from_werner,
    r_squared,
    rate_1sdi,
    rate_1sdi_nonps,
    rate_1sdi_ps,
    rate_dd,
    rate_di_chsh,
    s_lambda_bound,
)
from .noise import BinaryPovm, lossy_povm, projective_povm, werner
from .simulator import ProtocolConfig, SimStats, empirical_rate, run_protocol
from .steering import (
    BellDiagonalState,
    MeasurementSettings,
    bell_diagonal_correlators,
    bell_diagonal_to_density,
    cjwr_f3_optimal,
    cjwr_operator,
    cjwr_value,
    correlation_matrix,
    protocol_settings,
    symmetrize_to_bell_diagonal,
)
from .thresholds import SweepSpec, ThresholdResult, critical_eta, critical_qber, sweep

__version__ = "0.1.0"
