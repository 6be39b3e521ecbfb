import math

import numpy as np
import pytest

from g2qkd import AttackSpec, DegenerateReference, DomainError, InfeasibleLink, apply_attack
from g2qkd.detection import LinkBudget, detect_attack, satellite_feasible, waiting_time
from g2qkd.photon_stats import g2_exact
from g2qkd.sampling import RunStatistics, estimate_stats, make_rng


def direct_wait(n, f, mu, loss, eta):
    return n / (f * (1 - math.exp(-mu)) * 10 ** (-loss / 10) * eta)


def stats(values, n=10**6):
    return RunStatistics("g2", np.asarray(values, float), n)


@pytest.mark.parametrize("loss,expected", [(38.0, 193.0), (0.0, 0.0306), (60.0, 3.06e4)])
def test_waiting_time_values(loss, expected):
    t = waiting_time(1e5, 1e8, 0.037, loss, 0.9)
    assert t == pytest.approx(direct_wait(1e5, 1e8, 0.037, loss, 0.9), rel=1e-12)
    assert t == pytest.approx(expected, rel=0.01)


def test_saturated_source_limit():
    # mu -> infinity: every pulse carries a photon
    assert waiting_time(1e5, 1e8, 50.0, 0.0, 1.0) == pytest.approx(1e-3)


def test_waiting_time_monotone():
    ts = [waiting_time(loss_db=l) for l in range(0, 60, 2)]
    assert all(a < b for a, b in zip(ts, ts[1:]))
    assert waiting_time(mu=0.1) < waiting_time(mu=0.037)


def test_infeasible_link():
    with pytest.raises(InfeasibleLink):
        waiting_time(mu=0.0)
    with pytest.raises(InfeasibleLink):
        waiting_time(eta_det=0.0)


def test_micius_margin():
    ok, margin = satellite_feasible(LinkBudget(0.037, 38.0), 273.0)
    assert ok and margin == pytest.approx(80.0, abs=1.0)


def test_tie_is_infeasible():
    lb = LinkBudget(0.037, 38.0)
    ok, margin = satellite_feasible(lb, lb.waiting_time)
    assert not ok and margin == 0.0
    with pytest.raises(DomainError):
        satellite_feasible(lb, 0.0)


def test_no_alarm_at_reference():
    v = detect_attack(0.58, stats([0.58] * 5))
    assert not v.alarm and v.relative_deviation == 0.0


def test_alarm_on_soft_attack(our_hbn):
    ref = g2_exact(our_hbn)
    attacked = g2_exact(apply_attack(our_hbn, AttackSpec("soft", 0.5)))
    v = detect_attack(ref, stats(attacked + 0.01 * np.linspace(-1, 1, 100)))
    assert v.alarm and v.relative_deviation == pytest.approx(0.49, abs=0.01)


def test_small_deviation_is_not_alarm():
    v = detect_attack(1.0, stats(1.02 + 1e-4 * np.linspace(-1, 1, 50)))
    assert v.significant and not v.alarm


def test_noisy_deviation_is_not_alarm():
    v = detect_attack(1.0, stats([0.7, 1.3, 0.8, 1.2, 0.75]))
    assert v.relative_deviation > 0.03 and not v.alarm


def test_direction_symmetric():
    up = detect_attack(1.0, stats([1.1] * 3))
    down = detect_attack(1.0, stats([0.9] * 3))
    assert up.alarm and down.alarm
    assert up.relative_deviation == pytest.approx(down.relative_deviation)


def test_degenerate_reference():
    with pytest.raises(DegenerateReference):
        detect_attack(0.0, stats([0.5]))
    with pytest.raises(DomainError):
        detect_attack(0.5, stats([math.nan]))


def test_false_alarm_rate_without_attack(our_hbn):
    """Honest sources: 200 trials of 100 x 10^7 pulses each."""
    ref = g2_exact(our_hbn)
    rng = make_rng(2024)
    trials, alarms = 200, 0
    for _ in range(trials):
        counts = rng.multinomial(10**7, our_hbn.p, size=100)
        g2 = [estimate_stats(c)[1] for c in counts]
        alarms += detect_attack(ref, stats(g2, 10**7)).alarm
    assert alarms / trials < 0.01
