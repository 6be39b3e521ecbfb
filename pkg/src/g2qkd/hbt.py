"""Hanbury Brown-Twiss receiver: beam splitter, two threshold detectors,
and g2(0) from the pulsed coincidence histogram.

Analysis runs in pulse-index space, where one lag bin is one repetition
period (a 40 ns window at 25 MHz).  Click streams are kept sparse as sorted
arrays of the pulse indices at which each detector fired.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import kernels
from .errors import DomainError, InsufficientCoincidences
from .photon_stats import PhotonDistribution
from .sampling import CHUNK, _cdf, make_rng

DEFAULT_MAX_LAG = 500


@dataclass(frozen=True)
class DetectorParams:
    efficiency: float = 0.1
    dark_click_prob: float = 1e-6
    split_ratio: float = 0.5

    def __post_init__(self):
        for name in ("efficiency", "dark_click_prob", "split_ratio"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {v}")


@dataclass(frozen=True)
class ClickRecord:
    pulse_index: int
    clicked_A: bool
    clicked_B: bool


@dataclass(frozen=True)
class ClickRecords:
    """Sparse click stream over ``n_pulses`` pulses."""

    n_pulses: int
    a_idx: np.ndarray
    b_idx: np.ndarray

    def __iter__(self) -> Iterator[ClickRecord]:
        """Yield one record per pulse with at least one click."""
        a, b = set(self.a_idx.tolist()), set(self.b_idx.tolist())
        for i in sorted(a | b):
            yield ClickRecord(i, i in a, i in b)

    @classmethod
    def from_records(cls, records, n_pulses: int) -> "ClickRecords":
        a, b = [], []
        for r in records:
            if r.clicked_A:
                a.append(r.pulse_index)
            if r.clicked_B:
                b.append(r.pulse_index)
        return cls(n_pulses, np.unique(np.array(a, np.int64)), np.unique(np.array(b, np.int64)))


def _dark_clicks(n: int, p: float, rng: np.random.Generator) -> np.ndarray:
    if p == 0.0 or n == 0:
        return np.zeros(0, np.int64)
    k = int(rng.binomial(n, p))
    return np.sort(rng.choice(n, size=k, replace=False)).astype(np.int64)


def _detect_chunk(photons: np.ndarray, offset: int, det: DetectorParams, rng: np.random.Generator):
    occupied = np.flatnonzero(photons)
    n_ph = photons[occupied]
    u = rng.random(int(n_ph.sum(dtype=np.int64)))
    p_a = det.split_ratio * det.efficiency
    p_b = (1.0 - det.split_ratio) * det.efficiency
    hit_a, hit_b = kernels.route_photons(n_ph, u, p_a, p_b)
    a = np.union1d(occupied[hit_a], _dark_clicks(photons.shape[0], det.dark_click_prob, rng))
    b = np.union1d(occupied[hit_b], _dark_clicks(photons.shape[0], det.dark_click_prob, rng))
    return a.astype(np.int64) + offset, b.astype(np.int64) + offset


def simulate_hbt(photon_numbers, det: DetectorParams, seed) -> ClickRecords:
    """Detect a given pulse stream.

    Each photon goes to A with probability ``split_ratio`` (else B) and is
    registered with probability ``efficiency``; a detector clicks if any of
    its photons registers or a dark click occurs.
    """
    photons = np.asarray(photon_numbers)
    if photons.ndim != 1 or (photons.size and photons.min() < 0):
        raise DomainError("photon_numbers must be a 1-D stream of non-negative counts")
    rng = make_rng(seed)
    a_parts, b_parts = [], []
    for start in range(0, photons.shape[0], CHUNK):
        a, b = _detect_chunk(photons[start : start + CHUNK], start, det, rng)
        a_parts.append(a)
        b_parts.append(b)
    cat = lambda parts: np.concatenate(parts) if parts else np.zeros(0, np.int64)  # noqa: E731
    return ClickRecords(int(photons.shape[0]), cat(a_parts), cat(b_parts))


def simulate_source_hbt(d: PhotonDistribution, n_pulses: int, det: DetectorParams, seed) -> ClickRecords:
    """Draw ``n_pulses`` from ``d`` and detect them, chunk by chunk.

    Avoids materialising the full pulse stream, so 1e8 pulses fit in memory.
    """
    rng = make_rng(seed)
    cdf = _cdf(d)
    a_parts, b_parts = [], []
    for start in range(0, int(n_pulses), CHUNK):
        m = min(CHUNK, int(n_pulses) - start)
        photons = kernels.events_inverse_cdf(rng.random(m), cdf)
        a, b = _detect_chunk(photons, start, det, rng)
        a_parts.append(a)
        b_parts.append(b)
    return ClickRecords(int(n_pulses), np.concatenate(a_parts), np.concatenate(b_parts))


def poisson_stream(mu: float, n_pulses: int, seed) -> np.ndarray:
    """Coherent-light control: Poisson photon numbers per pulse."""
    return make_rng(seed).poisson(mu, int(n_pulses)).astype(np.int16)


def coincidence_histogram(records: ClickRecords, max_lag: int = DEFAULT_MAX_LAG) -> np.ndarray:
    """``C[k + max_lag]`` = number of pulses i with A at i and B at i + k."""
    if max_lag < 0:
        raise DomainError("max_lag must be non-negative")
    if records.n_pulses < 2 * max_lag + 1:
        raise DomainError(f"need at least {2 * max_lag + 1} pulses for max_lag={max_lag}")
    return kernels.coincidences(records.a_idx, records.b_idx, int(max_lag))


def g2_from_clicks(records: ClickRecords, max_lag: int = DEFAULT_MAX_LAG) -> float:
    """Zero-delay peak over the mean of the side peaks at 1 <= |k| <= max_lag."""
    if max_lag < 1:
        raise DomainError("max_lag must be at least 1")
    hist = coincidence_histogram(records, max_lag)
    side = np.concatenate([hist[:max_lag], hist[max_lag + 1 :]])
    if side.sum() == 0:
        raise InsufficientCoincidences("all side-peak coincidence counts are zero")
    return float(hist[max_lag] / side.mean())
