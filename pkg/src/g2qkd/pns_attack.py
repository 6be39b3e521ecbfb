"""Soft and hard photon-number-splitting attacks on a truncated distribution."""
from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import DegenerateMean, DomainError
from .photon_stats import PhotonDistribution, g2_exact

# Post-attack mean below this fraction of the pre-attack mean is treated as an
# extinguished source whose g2 has diverged.
MIN_MEAN_FRACTION = 0.02


class AttackKind(enum.Enum):
    NONE = "none"
    SOFT = "soft"
    HARD = "hard"

    @classmethod
    def parse(cls, value) -> "AttackKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise DomainError(f"unknown attack kind {value!r}; expected one of none, soft, hard") from None


@dataclass(frozen=True)
class AttackSpec:
    kind: AttackKind = AttackKind.NONE
    x: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", AttackKind.parse(self.kind))
        if not 0.0 <= self.x <= 1.0:
            raise DomainError(f"attack strength x must lie in [0, 1], got {self.x}")

    @property
    def strength(self) -> float:
        """Effective x (zero when there is no attack)."""
        return 0.0 if self.kind is AttackKind.NONE else float(self.x)

    @property
    def hard(self) -> bool:
        return self.kind is AttackKind.HARD


def apply_attack(d: PhotonDistribution, a: AttackSpec) -> PhotonDistribution:
    """Redistribute photon-number weight as Eve splits one photon off.

    Soft: a fraction x of multi-photon pulses lose one photon.
    Hard: additionally a fraction x of single-photon pulses are blocked.
    """
    x = a.strength
    if x == 0.0:
        return d
    p0, p1, p2, p3 = d.p
    if a.hard:
        new = [p0 + x * p1, (1 - x) * p1 + x * p2, (1 - x) * p2 + x * p3, (1 - x) * p3]
    else:
        new = [p0, p1 + x * p2, (1 - x) * p2 + x * p3, (1 - x) * p3]
    return PhotonDistribution(new)


def attack_signature(
    d: PhotonDistribution, a: AttackSpec, min_mean_fraction: float = MIN_MEAN_FRACTION
) -> tuple[float, float]:
    """Return ``(|g2' - g2|, |mu' - mu|)`` for the attack ``a``.

    Raises:
        DegenerateMean: either mean vanishes, or the attack leaves less than
            ``min_mean_fraction`` of the original mean (g2 diverges there).
    """
    after = apply_attack(d, a)
    if d.mu > 0 and after.mu < min_mean_fraction * d.mu:
        raise DegenerateMean(
            f"attack reduces mu from {d.mu:.3g} to {after.mu:.3g} "
            f"(< {min_mean_fraction:g} of the source mean); g2 diverges",
            quantity="g2",
        )
    return abs(g2_exact(after) - g2_exact(d)), abs(after.mu - d.mu)
