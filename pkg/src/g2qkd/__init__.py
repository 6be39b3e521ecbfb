"""Simulation and key-rate analysis for QKD with g2(0)-monitored
single-photon sources under photon-number-splitting attacks."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigError,
    DegenerateGain,
    DegenerateMean,
    DegenerateReference,
    DomainError,
    InfeasibleLink,
    InsufficientCoincidences,
    InvalidDistribution,
    NonConvergent,
    NumericalError,
)
from .photon_stats import (  # noqa: E402
    PhotonDistribution,
    SourceParams,
    build_distribution,
    g2_exact,
    g3_exact,
    moments,
)
from .pns_attack import AttackKind, AttackSpec, apply_attack, attack_signature  # noqa: E402
