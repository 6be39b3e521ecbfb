"""Asymptotic secret key rates: the g2-monitored protocol (one- and
two-photon pulses contribute) and the GLLP baseline (only untagged pulses).

Rates are per sent pulse and include the 1/2 sifting factor.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGain, DomainError
from .photon_stats import PhotonDistribution

NMAX = 3


@dataclass(frozen=True)
class ChannelParams:
    """Channel and receiver.

    Attributes:
        channel_loss_db: Channel attenuation; transmission is 10**(-loss/10).
        detector_efficiency: Detection efficiency of Bob's detectors.
        dark_yield: Y0, detection probability per pulse with no signal.
        intrinsic_error: e_int, optical misalignment error.
        baseline_error: e0, error rate of dark counts.
        ec_efficiency: f, error-correction inefficiency factor.
        exact_yield: Use Y_n = Y0 + eta_n - Y0*eta_n instead of Y0 + eta_n.
    """

    channel_loss_db: float = 0.0
    detector_efficiency: float = 0.9
    dark_yield: float = 1e-6
    intrinsic_error: float = 0.03
    baseline_error: float = 0.5
    ec_efficiency: float = 1.22
    exact_yield: bool = False

    def __post_init__(self):
        if not self.channel_loss_db >= 0:
            raise DomainError(f"channel_loss_db must be >= 0, got {self.channel_loss_db}")
        for name in ("detector_efficiency", "dark_yield", "intrinsic_error", "baseline_error"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {v}")
        if not self.ec_efficiency >= 1.0:
            raise DomainError(f"ec_efficiency must be >= 1, got {self.ec_efficiency}")

    @classmethod
    def from_transmission(cls, transmission: float, **kw) -> "ChannelParams":
        if not 0.0 < transmission <= 1.0:
            raise DomainError(f"transmission must lie in (0, 1], got {transmission}")
        return cls(channel_loss_db=-10.0 * math.log10(transmission), **kw)

    @property
    def transmission(self) -> float:
        return 10.0 ** (-self.channel_loss_db / 10.0)

    @property
    def eta_tot(self) -> float:
        return self.transmission * self.detector_efficiency


@dataclass(frozen=True)
class RateBreakdown:
    Q_mu: float
    E_mu: float
    Y: np.ndarray
    Q: np.ndarray
    e: np.ndarray
    R_proposed: float = math.nan
    R_gllp: float = math.nan
    omega: float = math.nan


def binary_entropy(x):
    """Shannon entropy h2(x) in bits; h2(0) = h2(1) = 0.

    >>> float(binary_entropy(0.5))
    1.0
    """
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0) or np.any(arr > 1):
        raise DomainError(f"binary entropy argument outside [0, 1]: {x}")
    inner = (arr > 0) & (arr < 1)
    safe = np.where(inner, arr, 0.5)
    h = np.where(inner, -safe * np.log2(safe) - (1 - safe) * np.log2(1 - safe), 0.0)
    return float(h) if h.ndim == 0 else h


def phi(a):
    """h2(1/2 + a/2) for a in [-1, 1]."""
    arr = np.asarray(a, dtype=float)
    if np.any(np.abs(arr) > 1):
        raise DomainError(f"phi argument outside [-1, 1]: {a}")
    return binary_entropy(np.clip(0.5 + 0.5 * arr, 0.0, 1.0))


def holevo_bound(n: int, cos_c: float) -> float:
    """Upper bound on Eve's information from an n-photon pulse with state overlap cos_c."""
    if n < 1:
        raise DomainError(f"photon number must be >= 1, got {n}")
    if not 0.0 <= cos_c <= 1.0:
        raise DomainError(f"cos_c must lie in [0, 1], got {cos_c}")
    return binary_entropy((1.0 + cos_c**n) / 2.0)


def _h2_clamped(x: float) -> float:
    return binary_entropy(min(max(x, 0.0), 1.0))


def yields_and_gains(d: PhotonDistribution, ch: ChannelParams) -> RateBreakdown:
    """Per-photon-number yields, gains and error rates, plus Q_mu and E_mu."""
    n = np.arange(NMAX + 1)
    eta_n = 1.0 - (1.0 - ch.eta_tot) ** n
    y0 = ch.dark_yield
    Y = y0 + eta_n - (y0 * eta_n if ch.exact_yield else 0.0)
    Q = Y * d.p
    q_mu = float(Q.sum())
    if q_mu <= 0.0:
        raise DegenerateGain("total gain Q_mu is zero (no signal and no dark counts)")
    # an n-photon state that can never click (Y_n = 0) carries e0 by convention
    safe_Y = np.where(Y > 0, Y, 1.0)
    e = np.where(Y > 0, (ch.baseline_error * y0 + ch.intrinsic_error * eta_n) / safe_Y, ch.baseline_error)
    e_mu = float(np.sum(e * Y * d.p) / q_mu)
    return RateBreakdown(Q_mu=q_mu, E_mu=e_mu, Y=Y, Q=Q, e=e)


def _ec_cost(b: RateBreakdown, ch: ChannelParams) -> float:
    return b.Q_mu * _h2_clamped(b.E_mu) * ch.ec_efficiency


def _proposed(b: RateBreakdown, ch: ChannelParams) -> float:
    e1, e2 = b.e[1], b.e[2]
    one = b.Q[1] * (1.0 - phi(2.0 * e1 - 1.0))
    two = b.Q[2] * (1.0 - phi((2.0 * e2 - 1.0) ** 2))
    return max(0.0, 0.5 * (-_ec_cost(b, ch) + one + two))


def _gllp(b: RateBreakdown, ch: ChannelParams, p2: float) -> tuple[float, float]:
    omega = 1.0 - p2 / b.Q_mu
    if omega <= 0.0:
        return 0.0, 0.0
    omega = min(omega, 1.0)
    pa = b.Q_mu * omega * (1.0 - binary_entropy(min(b.E_mu / omega, 0.5)))
    return max(0.0, 0.5 * (-_ec_cost(b, ch) + pa)), omega


def rate_proposed(d: PhotonDistribution, ch: ChannelParams) -> float:
    return _proposed(yields_and_gains(d, ch), ch)


def rate_gllp(d: PhotonDistribution, ch: ChannelParams) -> float:
    """GLLP rate with untagged fraction ``1 - P2 / Q_mu`` (zero if non-positive)."""
    return _gllp(yields_and_gains(d, ch), ch, float(d.p[2]))[0]


def rate_breakdown(d: PhotonDistribution, ch: ChannelParams) -> RateBreakdown:
    b = yields_and_gains(d, ch)
    r_gllp, omega = _gllp(b, ch, float(d.p[2]))
    return RateBreakdown(b.Q_mu, b.E_mu, b.Y, b.Q, b.e, _proposed(b, ch), r_gllp, omega)


def loss_sweep(d: PhotonDistribution, losses_db, **channel) -> list[RateBreakdown]:
    return [rate_breakdown(d, ChannelParams(channel_loss_db=float(L), **channel)) for L in losses_db]
