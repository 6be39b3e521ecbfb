"""Truncated (n <= 3) photon-number distributions of a pulsed emitter."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMean, DomainError, InvalidDistribution, NonConvergent

NORM_TOL = 1e-12
MU_FLOOR = 1e-15
MU_MAX = 3.0


@dataclass(frozen=True)
class SourceParams:
    """Measured characterization of a single-photon emitter.

    Attributes:
        quantum_efficiency: Probability of emitting exactly one photon per pulse.
        g2: Second-order correlation at zero delay.
        g3: Third-order correlation at zero delays.
        repetition_rate: Excitation rate in Hz.
    """

    quantum_efficiency: float
    g2: float
    g3: float
    repetition_rate: float = 25e6

    def __post_init__(self):
        if not 0.0 <= self.quantum_efficiency <= 1.0:
            raise DomainError(f"quantum_efficiency must lie in [0, 1], got {self.quantum_efficiency}")
        if self.g2 < 0 or self.g3 < 0:
            raise DomainError(f"g2 and g3 must be non-negative, got g2={self.g2}, g3={self.g3}")
        if not self.repetition_rate > 0:
            raise DomainError(f"repetition_rate must be positive, got {self.repetition_rate}")


@dataclass(frozen=True, init=False)
class PhotonDistribution:
    """Probabilities of 0..3 photons per pulse; ``mu`` is always recomputed."""

    p: np.ndarray

    def __init__(self, probabilities, *, tol: float = NORM_TOL):
        p = np.array(probabilities, dtype=float).reshape(-1)
        if p.shape != (4,):
            raise DomainError(f"expected 4 probabilities (n = 0..3), got {p.shape[0]}")
        if np.any(p < 0) or np.any(p > 1) or not np.all(np.isfinite(p)):
            raise InvalidDistribution(f"probabilities outside [0, 1]: {p.tolist()}")
        if abs(p.sum() - 1.0) > tol:
            raise InvalidDistribution(f"probabilities sum to {p.sum()!r}, not 1")
        p.flags.writeable = False
        object.__setattr__(self, "p", p)

    @property
    def mu(self) -> float:
        return float(np.dot(np.arange(4), self.p))

    def __getitem__(self, n: int) -> float:
        return float(self.p[n])

    def __eq__(self, other):
        if not isinstance(other, PhotonDistribution):
            return NotImplemented
        return bool(np.array_equal(self.p, other.p))

    def __hash__(self):
        return hash(self.p.tobytes())

    def __repr__(self):
        vals = ", ".join(f"{v:.6g}" for v in self.p)
        return f"PhotonDistribution(p=({vals}), mu={self.mu:.6g})"


def build_distribution(src: SourceParams, tol: float = 1e-12, max_iter: int = 10_000) -> PhotonDistribution:
    """Photon-number distribution implied by (QE, g2, g3).

    P1 is the quantum efficiency, the multi-photon bounds are taken with
    equality, ``P2 = mu^2 g2 / 2`` and ``P3 = mu^3 g3 / 6``, and mu is the
    fixed point of ``mu = P1 + 2 P2 + 3 P3`` iterated from ``mu = P1``.

    Raises:
        NonConvergent: the iteration leaves [0, 3] or does not settle.
        InvalidDistribution: the resulting P0 is negative.
    """
    p1 = src.quantum_efficiency
    g2, g3 = src.g2, src.g3
    mu = p1
    for _ in range(max_iter):
        nxt = p1 + mu * mu * g2 + 0.5 * mu**3 * g3
        if not 0.0 <= nxt <= MU_MAX:
            raise NonConvergent(f"mean photon number left [0, {MU_MAX}] during iteration ({nxt!r})")
        done = abs(nxt - mu) < tol
        mu = nxt
        if done:
            break
    else:
        raise NonConvergent(f"no fixed point for mu after {max_iter} iterations")

    p2 = 0.5 * mu * mu * g2
    p3 = mu**3 * g3 / 6.0
    p0 = 1.0 - p1 - p2 - p3
    if p0 < 0:
        raise InvalidDistribution(f"P0 = {p0:.3g} < 0: source parameters are mutually inconsistent")
    return PhotonDistribution([p0, p1, p2, p3])


def moments(d: PhotonDistribution) -> tuple[float, float, float]:
    """Mean and the 2nd/3rd factorial moments <n(n-1)>, <n(n-1)(n-2)>."""
    p = d.p
    return (
        float(p[1] + 2 * p[2] + 3 * p[3]),
        float(2 * p[2] + 6 * p[3]),
        float(6 * p[3]),
    )


def _check_mean(m1: float) -> None:
    if m1 <= MU_FLOOR:
        raise DegenerateMean(f"mean photon number {m1:.3g} too small; correlation diverges")


def g2_exact(d: PhotonDistribution) -> float:
    m1, m2f, _ = moments(d)
    _check_mean(m1)
    return m2f / m1**2


def g3_exact(d: PhotonDistribution) -> float:
    m1, _, m3f = moments(d)
    _check_mean(m1)
    return m3f / m1**3
