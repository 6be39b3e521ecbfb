"""Attack alarm from a measured g2(0), and photon-accumulation waiting times."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateReference, DomainError, InfeasibleLink
from .sampling import RunStatistics

DEFAULT_THRESHOLD = 0.03
DEFAULT_K_SIGMA = 3.0
DEFAULT_N_REQUIRED = 10**5
DEFAULT_REP_RATE = 100e6


@dataclass(frozen=True)
class DeviationVerdict:
    reference_g2: float
    measured_g2: float
    relative_deviation: float
    threshold: float
    significant: bool
    alarm: bool


def detect_attack(
    reference_g2: float,
    measured: RunStatistics,
    threshold: float = DEFAULT_THRESHOLD,
    k_sigma: float = DEFAULT_K_SIGMA,
) -> DeviationVerdict:
    """Raise an alarm when the measured g2 departs from the reference.

    Both conditions must hold: the relative deviation exceeds ``threshold``
    and the absolute deviation exceeds ``k_sigma`` run-to-run standard
    deviations.  The direction of the deviation is irrelevant.
    """
    if not reference_g2 > 0:
        raise DegenerateReference(f"reference g2 must be positive, got {reference_g2}")
    if measured.n_runs < 1 or not math.isfinite(measured.mean):
        raise DomainError("measured statistics contain no valid run")
    diff = abs(measured.mean - reference_g2)
    rel = diff / reference_g2
    significant = diff > k_sigma * measured.std
    return DeviationVerdict(reference_g2, measured.mean, rel, threshold, significant, rel > threshold and significant)


@dataclass(frozen=True)
class LinkBudget:
    mu: float
    loss_db: float
    eta_det: float = 0.9
    repetition_rate: float = DEFAULT_REP_RATE
    n_required: int = DEFAULT_N_REQUIRED

    @property
    def waiting_time(self) -> float:
        return waiting_time(self.n_required, self.repetition_rate, self.mu, self.loss_db, self.eta_det)


def waiting_time(
    n_required: float = DEFAULT_N_REQUIRED,
    repetition_rate: float = DEFAULT_REP_RATE,
    mu: float = 0.037,
    loss_db: float = 0.0,
    eta_det: float = 0.9,
) -> float:
    """Seconds needed to detect ``n_required`` photons through the link.

    T = N / (f * (1 - exp(-mu)) * 10**(-loss/10) * eta_det)
    """
    emission = -math.expm1(-mu)
    rate = repetition_rate * emission * 10.0 ** (-loss_db / 10.0) * eta_det
    if not rate > 0 or not math.isfinite(rate):
        raise InfeasibleLink(
            f"detection rate is zero (f={repetition_rate}, mu={mu}, loss={loss_db} dB, eta_det={eta_det})"
        )
    return n_required / rate


def satellite_feasible(lb: LinkBudget, flyover_s: float) -> tuple[bool, float]:
    """``(T < flyover, flyover - T)``; a tie counts as infeasible."""
    if not flyover_s > 0:
        raise DomainError(f"flyover duration must be positive, got {flyover_s}")
    t = lb.waiting_time
    return t < flyover_s, flyover_s - t
