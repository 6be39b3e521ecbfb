"""Pulse-level Monte Carlo: sampling, per-event attacks, loss and estimators.

Every run draws from its own ``PCG64`` stream obtained from
``SeedSequence(master_seed, spawn_key=(stream, run))``, so results depend only
on ``(inputs, master_seed)`` and never on execution order.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DegenerateMean, DomainError
from .photon_stats import PhotonDistribution
from .pns_attack import AttackKind, AttackSpec

DEFAULT_SAMPLES = 10**7
DEFAULT_RUNS = 100
DEFAULT_SEED = 12345
CHUNK = 1 << 22
GENERATOR = "numpy.random.PCG64 via SeedSequence(master_seed, spawn_key=(stream, run))"

QUANTITIES = ("mu", "g2", "g3", "P0", "P1", "P2", "P3")

NO_ATTACK = AttackSpec()


@dataclass(frozen=True)
class SamplingPlan:
    n_samples: int = DEFAULT_SAMPLES
    n_runs: int = DEFAULT_RUNS
    master_seed: int = DEFAULT_SEED

    def __post_init__(self):
        if int(self.n_samples) < 1 or int(self.n_runs) < 1:
            raise DomainError("n_samples and n_runs must be at least 1")
        object.__setattr__(self, "n_samples", int(self.n_samples))
        object.__setattr__(self, "n_runs", int(self.n_runs))
        object.__setattr__(self, "master_seed", int(self.master_seed))


@dataclass(frozen=True)
class RunStatistics:
    """Per-run values of one estimated quantity; NaN marks a degenerate run."""

    name: str
    values: np.ndarray = field(repr=False)
    n_samples: int

    @property
    def n_runs(self) -> int:
        return int(self.values.shape[0])

    @property
    def valid(self) -> np.ndarray:
        return self.values[np.isfinite(self.values)]

    @property
    def n_excluded(self) -> int:
        return self.n_runs - int(self.valid.shape[0])

    @property
    def mean(self) -> float:
        v = self.valid
        return float(v.mean()) if v.size else math.nan

    @property
    def std(self) -> float:
        """Population standard deviation over non-degenerate runs."""
        v = self.valid
        return float(v.std()) if v.size else math.nan

    @property
    def standard_error(self) -> float:
        v = self.valid
        return float(v.std() / math.sqrt(v.size)) if v.size else math.nan


def run_seed(master_seed: int, run: int, stream: int = 0) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(master_seed), spawn_key=(int(stream), int(run)))


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(int(seed))
    return np.random.Generator(np.random.PCG64(seed))


def _chunk_sizes(n: int):
    while n > 0:
        m = min(n, CHUNK)
        yield m
        n -= m


def _cdf(d: PhotonDistribution) -> np.ndarray:
    return np.cumsum(d.p)[:3].copy()


def sample_counts(d: PhotonDistribution, n_samples: int, seed, sampler: str = "inverse_cdf") -> np.ndarray:
    """Histogram of ``n_samples`` i.i.d. photon numbers drawn from ``d``.

    ``sampler="multinomial"`` draws the histogram in one step; it has the same
    distribution as the inverse-CDF path but not the same realisation.
    """
    rng = make_rng(seed)
    if sampler == "multinomial":
        return rng.multinomial(int(n_samples), d.p).astype(np.int64)
    if sampler != "inverse_cdf":
        raise DomainError(f"unknown sampler {sampler!r}")
    cdf = _cdf(d)
    counts = np.zeros(4, np.int64)
    for m in _chunk_sizes(int(n_samples)):
        counts += kernels.histogram_inverse_cdf(rng.random(m), cdf)
    return counts


def sample_events(d: PhotonDistribution, n_samples: int, seed) -> np.ndarray:
    """Photon number of each pulse, as an int8 array (same draws as :func:`sample_counts`)."""
    rng = make_rng(seed)
    cdf = _cdf(d)
    parts = [kernels.events_inverse_cdf(rng.random(m), cdf) for m in _chunk_sizes(int(n_samples))]
    return np.concatenate(parts) if parts else np.zeros(0, np.int8)


def estimate_stats(counts) -> tuple[float, float, float]:
    """Plug-in ``(mu, g2, g3)`` from a photon-number histogram."""
    c = [int(v) for v in counts]
    c += [0] * (4 - len(c))
    if any(v < 0 for v in c) or len(c) > 4:
        raise DomainError("counts must be a non-negative histogram over n = 0..3")
    total = sum(c)
    if total == 0:
        raise DegenerateMean("empty histogram")
    s1 = c[1] + 2 * c[2] + 3 * c[3]
    if s1 == 0:
        raise DegenerateMean("sample mean photon number is zero")
    s2 = 2 * c[2] + 6 * c[3]
    s3 = 6 * c[3]
    return s1 / total, s2 * total / s1**2, s3 * total**2 / s1**3


def attack_event_stream(events: np.ndarray, attack: AttackSpec, seed) -> np.ndarray:
    """Per-pulse attack: with probability x a multi-photon pulse loses one
    photon; a hard attack also blocks single-photon pulses with probability x."""
    if attack.strength == 0.0:
        return events
    rng = make_rng(seed)
    return kernels.attack_events(events, rng.random(events.shape[0]), attack.strength, attack.hard)


def apply_linear_loss(data: np.ndarray, eta: float, seed, histogram: bool = False) -> np.ndarray:
    """Keep each photon independently with probability ``eta``.

    ``data`` is an event stream (photon number per pulse) unless
    ``histogram=True``, in which case it is a length-4 count histogram and the
    thinned histogram is returned.
    """
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"eta must lie in [0, 1], got {eta}")
    data = np.asarray(data)
    if eta == 1.0:
        return data.copy()
    rng = make_rng(seed)
    if histogram:
        return _thin_histogram(data.astype(np.int64), eta, rng)
    if eta == 0.0:
        return np.zeros_like(data)
    return kernels.thin_events(data, rng.random(int(data.sum(dtype=np.int64))), eta)


def _thin_histogram(counts: np.ndarray, eta: float, rng: np.random.Generator) -> np.ndarray:
    out = np.zeros(4, np.int64)
    out[0] = counts[0]
    for n in range(1, 4):
        k = np.arange(n + 1)
        pmf = np.array([math.comb(n, j) for j in k]) * eta**k * (1 - eta) ** (n - k)
        out[: n + 1] += rng.multinomial(int(counts[n]), pmf / pmf.sum())
    return out


def _run_counts(d, attack, eta, n_samples, seed) -> np.ndarray:
    if attack.strength == 0.0 and eta == 1.0:
        return sample_counts(d, n_samples, seed)
    rng = make_rng(seed)
    cdf = _cdf(d)
    counts = np.zeros(4, np.int64)
    for m in _chunk_sizes(n_samples):
        ev = kernels.events_inverse_cdf(rng.random(m), cdf)
        if attack.strength > 0.0:
            ev = kernels.attack_events(ev, rng.random(m), attack.strength, attack.hard)
        if eta < 1.0:
            ev = kernels.thin_events(ev, rng.random(int(ev.sum(dtype=np.int64))), eta)
        counts += np.bincount(ev, minlength=4)[:4]
    return counts


def _run_row(counts: np.ndarray) -> np.ndarray:
    total = counts.sum()
    row = np.empty(len(QUANTITIES))
    row[3:] = counts / total
    try:
        row[:3] = estimate_stats(counts)
    except DegenerateMean:
        row[0], row[1], row[2] = 0.0, math.nan, math.nan
    return row


def repeated_runs(
    d: PhotonDistribution,
    attack: AttackSpec = NO_ATTACK,
    eta: float = 1.0,
    plan: SamplingPlan = SamplingPlan(),
    *,
    stream: int = 0,
    workers: int = 1,
) -> dict[str, RunStatistics]:
    """Repeat the sample -> attack -> loss -> estimate pipeline ``plan.n_runs`` times.

    Runs whose sample mean is zero keep NaN for g2/g3 and are counted in
    ``RunStatistics.n_excluded``.
    """
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"eta must lie in [0, 1], got {eta}")
    attack = attack or NO_ATTACK

    def one(run: int) -> np.ndarray:
        seed = run_seed(plan.master_seed, run, stream)
        return _run_row(_run_counts(d, attack, eta, plan.n_samples, seed))

    runs = range(plan.n_runs)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, runs))
    else:
        rows = [one(r) for r in runs]
    table = np.vstack(rows)
    return {q: RunStatistics(q, table[:, i].copy(), plan.n_samples) for i, q in enumerate(QUANTITIES)}


@dataclass(frozen=True)
class ConvergenceRow:
    n_samples: int
    g2: RunStatistics
    mu: RunStatistics
    reference_g2: float

    @property
    def relative_std(self) -> float:
        mean = self.g2.mean
        return self.g2.std / mean if mean > 0 else math.nan

    @property
    def relative_deviation(self) -> float:
        ref = self.reference_g2
        return abs(self.g2.mean - ref) / ref if ref > 0 else math.nan


def convergence_scan(
    d: PhotonDistribution,
    sizes,
    n_runs: int = DEFAULT_RUNS,
    master_seed: int = DEFAULT_SEED,
    reference_size: int = 10**8,
    attack: AttackSpec = NO_ATTACK,
    eta: float = 1.0,
) -> list[ConvergenceRow]:
    """g2 mean/std per sample size, against a reference at ``reference_size``.

    The reference uses an independent seed stream so it does not share draws
    with the scanned sizes.
    """
    sizes = [int(s) for s in sizes]
    if not sizes or any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise DomainError("sizes must be a non-empty strictly ascending list")
    ref_plan = SamplingPlan(reference_size, n_runs, master_seed)
    reference = repeated_runs(d, attack, eta, ref_plan, stream=1)["g2"].mean
    rows = []
    for size in sizes:
        stats = repeated_runs(d, attack, eta, SamplingPlan(size, n_runs, master_seed))
        rows.append(ConvergenceRow(size, stats["g2"], stats["mu"], reference))
    return rows


__all__ = [
    "AttackKind",
    "ConvergenceRow",
    "GENERATOR",
    "RunStatistics",
    "SamplingPlan",
    "apply_linear_loss",
    "attack_event_stream",
    "convergence_scan",
    "estimate_stats",
    "repeated_runs",
    "run_seed",
    "sample_counts",
    "sample_events",
]
