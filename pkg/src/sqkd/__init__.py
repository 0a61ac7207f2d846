"""Key-rate analysis and Monte-Carlo simulation for single-state semi-quantum key distribution."""
from ._kernels import BACKEND
from .attack import (
    AttackSpec,
    ChannelStatistics,
    JointKeyDistribution,
    derive_states,
    exact_conditional_entropy,
    exact_statistics,
    identity_attack,
    joint_distribution,
    random_attack,
    validate,
)
from .bound import KeyRateReport, eta_lower_bound, key_rate, lambda_from
from .depol import DepolScenario, closed_form_qij, closed_form_statistics, dilation
from .sim import SimulationConfig, SimulationTally, estimate, run
from .sweep import sweep_keyrate, threshold

__version__ = "0.1.0"
