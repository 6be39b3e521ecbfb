"""Figure-style tables and their CSV serialisation.

Each ``*_table`` function returns ``(columns, rows)``; :func:`write_csv`
prefixes a ``#`` metadata block.  Only the ``created`` line varies between
identical invocations.
"""
from __future__ import annotations

import csv
import io
import json
import math
from datetime import datetime, timezone

from . import __version__
from ._accel import backend_name
from .detection import LinkBudget, detect_attack, satellite_feasible
from .errors import DegenerateMean
from .hbt import DetectorParams, coincidence_histogram, simulate_source_hbt
from .keyrate import loss_sweep
from .photon_stats import PhotonDistribution, g2_exact
from .pns_attack import AttackKind, AttackSpec, apply_attack
from .sampling import GENERATOR, QUANTITIES, SamplingPlan, convergence_scan, repeated_runs


def _exact_g2(d: PhotonDistribution) -> float:
    try:
        return g2_exact(d)
    except DegenerateMean:
        return math.nan


def attack_sweep_table(d: PhotonDistribution, kind, xs, plan: SamplingPlan, eta: float = 1.0):
    kind = AttackKind.parse(kind)
    base = repeated_runs(d, AttackSpec(), eta, plan)
    columns = ["x", *QUANTITIES[3:], "mu", "g2", "g3"]
    columns += [f"std_{q}" for q in (*QUANTITIES[3:], "mu", "g2", "g3")]
    columns += ["delta_g2", "delta_mu", "exact_mu", "exact_g2", "n_excluded"]
    rows = []
    for x in xs:
        attack = AttackSpec(kind, float(x))
        stats = base if attack.strength == 0.0 else repeated_runs(d, attack, eta, plan)
        exact = apply_attack(d, attack)
        order = (*QUANTITIES[3:], "mu", "g2", "g3")
        rows.append(
            [float(x)]
            + [stats[q].mean for q in order]
            + [stats[q].std for q in order]
            + [
                abs(stats["g2"].mean - base["g2"].mean),
                abs(stats["mu"].mean - base["mu"].mean),
                exact.mu,
                _exact_g2(exact),
                stats["g2"].n_excluded,
            ]
        )
    return columns, rows


def keyrate_table(d: PhotonDistribution, losses, channel: dict, link: dict):
    columns = ["loss_db", "R_proposed", "R_gllp", "Q_mu", "E_mu", "omega", "T_wait"]
    rows = []
    for loss, b in zip(losses, loss_sweep(d, losses, **channel)):
        lb = LinkBudget(
            mu=d.mu,
            loss_db=float(loss),
            eta_det=channel.get("detector_efficiency", 0.9),
            **link,
        )
        rows.append([float(loss), b.R_proposed, b.R_gllp, b.Q_mu, b.E_mu, b.omega, lb.waiting_time])
    return columns, rows


def convergence_table(d: PhotonDistribution, sizes, n_runs: int, master_seed: int, reference_size: int, eta=1.0):
    scan = convergence_scan(d, sizes, n_runs, master_seed, reference_size, eta=eta)
    columns = ["n_samples", "g2_mean", "g2_std", "g2_rel_std", "rel_dev", "mu_mean", "mu_std", "reference_g2", "n_excluded"]
    rows = [
        [r.n_samples, r.g2.mean, r.g2.std, r.relative_std, r.relative_deviation, r.mu.mean, r.mu.std, r.reference_g2, r.g2.n_excluded]
        for r in scan
    ]
    return columns, rows


def waiting_time_table(mu: float, losses, eta_det: float, link: dict, flyover_s: float | None):
    columns = ["loss_db", "T_wait", "feasible", "margin_s"]
    rows = []
    for loss in losses:
        lb = LinkBudget(mu=mu, loss_db=float(loss), eta_det=eta_det, **link)
        if flyover_s is None:
            rows.append([float(loss), lb.waiting_time, "", ""])
        else:
            ok, margin = satellite_feasible(lb, flyover_s)
            rows.append([float(loss), lb.waiting_time, int(ok), margin])
    return columns, rows


def hbt_table(d: PhotonDistribution, n_pulses: int, det: DetectorParams, max_lag: int, seed: int):
    rec = simulate_source_hbt(d, n_pulses, det, seed)
    hist = coincidence_histogram(rec, max_lag)
    side = [*hist[:max_lag], *hist[max_lag + 1 :]]
    side_mean = sum(int(v) for v in side) / len(side)
    g2 = hist[max_lag] / side_mean if side_mean > 0 else math.nan
    columns = ["n_pulses", "clicks_A", "clicks_B", "C0", "side_mean", "g2_hbt", "g2_exact"]
    rows = [[n_pulses, rec.a_idx.size, rec.b_idx.size, int(hist[max_lag]), side_mean, g2, _exact_g2(d)]]
    return columns, rows


def detect_table(d: PhotonDistribution, kind, xs, plan: SamplingPlan, eta: float, threshold: float, k_sigma: float):
    reference = g2_exact(d)
    columns = ["x", "g2_mean", "g2_std", "reference_g2", "relative_deviation", "significant", "alarm"]
    rows = []
    for x in xs:
        stats = repeated_runs(d, AttackSpec(kind, float(x)), eta, plan)["g2"]
        v = detect_attack(reference, stats, threshold, k_sigma)
        rows.append([float(x), v.measured_g2, stats.std, reference, v.relative_deviation, int(v.significant), int(v.alarm)])
    return columns, rows


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return "nan" if math.isnan(v) else format(v, ".12g")
    if hasattr(v, "item"):
        return _fmt(v.item())
    return str(v)


def render_csv(columns, rows, metadata: dict) -> str:
    buf = io.StringIO()
    meta = {
        "g2qkd_version": __version__,
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "backend": backend_name(),
        "generator": GENERATOR,
        **metadata,
    }
    for key, value in meta.items():
        text = value if isinstance(value, str) else json.dumps(value, sort_keys=True)
        buf.write(f"# {key}: {text}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def data_section(text: str) -> str:
    """CSV text with the ``#`` metadata block stripped."""
    return "".join(line for line in text.splitlines(keepends=True) if not line.startswith("#"))
