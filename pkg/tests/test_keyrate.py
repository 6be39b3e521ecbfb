import logging

import numpy as np
import pytest

from g2qkd import DegenerateGain, DomainError, PhotonDistribution
from g2qkd.keyrate import (
    ChannelParams,
    binary_entropy,
    holevo_bound,
    loss_sweep,
    phi,
    rate_breakdown,
    rate_gllp,
    rate_proposed,
    yields_and_gains,
)

log = logging.getLogger(__name__)


def test_binary_entropy_values():
    assert binary_entropy(0.5) == 1.0
    assert binary_entropy(0.0) == 0.0 and binary_entropy(1.0) == 0.0
    assert binary_entropy(0.11) == pytest.approx(0.4999159581645, abs=1e-12)
    assert binary_entropy(np.array([0.0, 0.5])).tolist() == [0.0, 1.0]
    with pytest.raises(DomainError):
        binary_entropy(1.01)


def test_phi_values():
    assert phi(0.0) == 1.0
    assert phi(1.0) == 0.0 and phi(-1.0) == 0.0
    with pytest.raises(DomainError):
        phi(1.5)


def test_holevo_bound():
    assert all(holevo_bound(n, 0.0) == 1.0 for n in (1, 2, 5))
    assert holevo_bound(3, 1.0) == 0.0
    assert holevo_bound(64, 0.7) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(DomainError):
        holevo_bound(0, 0.5)


def test_perfect_channel_no_dark_counts(our_hbn):
    b = yields_and_gains(our_hbn, ChannelParams(0.0, 1.0, dark_yield=0.0))
    assert b.Y.tolist() == [0.0, 1.0, 1.0, 1.0]
    assert b.e[1:] == pytest.approx([0.03] * 3)


def test_dark_counts_only(our_hbn):
    ch = ChannelParams(0.0, 0.0, dark_yield=1e-5)
    b = yields_and_gains(our_hbn, ch)
    assert b.Y == pytest.approx([1e-5] * 4)
    assert b.e == pytest.approx([0.5] * 4)


def test_degenerate_gain():
    with pytest.raises(DegenerateGain):
        yields_and_gains(PhotonDistribution([1, 0, 0, 0]), ChannelParams(dark_yield=0.0))


# Frozen from a straight-line scalar evaluation of the gain/yield/error
# formulas (math module only), our-hBN at 20 dB, eta_det 0.9, Y0 1e-6.
ORACLE_20DB = {
    "Y": [1e-06, 0.009001000000000007, 0.01792000000000002, 0.026758729000000064],
    "Q": [9.633142819384259e-07, 0.00032673630000000026, 6.8839141934790865e-06, 4.203968036858894e-08],
    "e": [0.5, 0.030052216420397734, 0.030026227678571424, 0.03001756436189476],
    "Q_mu": 0.0003346255681557863,
    "E_mu": 0.031404554955529254,
    "R_proposed": 9.279937678005853e-05,
}
ORACLE_10DB = {"Q_mu": 0.0033344220246261072, "E_mu": 0.030140953963394217, "omega": 0.8847935280636705,
               "R_proposed": 0.0009415462106521397, "R_gllp": 0.0007620573730738589}


def test_breakdown_against_oracle(our_hbn):
    b = rate_breakdown(our_hbn, ChannelParams(20.0, 0.9, 1e-6))
    for key in ("Y", "Q", "e"):
        assert getattr(b, key) == pytest.approx(ORACLE_20DB[key], rel=1e-12)
    assert b.Q_mu == pytest.approx(ORACLE_20DB["Q_mu"], rel=1e-12)
    assert b.E_mu == pytest.approx(ORACLE_20DB["E_mu"], rel=1e-12)
    assert b.R_proposed == pytest.approx(ORACLE_20DB["R_proposed"], rel=1e-12)
    assert b.R_gllp == 0.0 and b.omega == 0.0


def test_rates_at_10db_against_oracle(our_hbn):
    b = rate_breakdown(our_hbn, ChannelParams(10.0, 0.9, 1e-6))
    for key, want in ORACLE_10DB.items():
        assert getattr(b, key) == pytest.approx(want, rel=1e-12), key


def test_breakdown_invariants(qd):
    b = yields_and_gains(qd, ChannelParams(7.0))
    assert b.Q_mu == pytest.approx(b.Q.sum(), abs=1e-15)
    assert b.E_mu * b.Q_mu == pytest.approx(np.sum(b.e * b.Y * qd.p), abs=1e-12)


def test_exact_yield_flag(our_hbn):
    approx = yields_and_gains(our_hbn, ChannelParams(3.0, dark_yield=1e-3))
    exact = yields_and_gains(our_hbn, ChannelParams(3.0, dark_yield=1e-3, exact_yield=True))
    eta1 = approx.Y[1] - 1e-3
    assert exact.Y[1] == pytest.approx(1e-3 + eta1 - 1e-3 * eta1)


def test_clamped_to_zero_when_errors_dominate(our_hbn):
    ch = ChannelParams(0.0, 0.9, intrinsic_error=0.3)
    assert rate_proposed(our_hbn, ch) == 0.0
    assert rate_gllp(our_hbn, ch) == 0.0


def test_error_free_limit():
    d = PhotonDistribution([0.5, 0.4, 0.1, 0.0])
    ch = ChannelParams(0.0, 1.0, dark_yield=0.0, intrinsic_error=0.0)
    b = rate_breakdown(d, ch)
    assert b.R_proposed == pytest.approx(0.5 * (b.Q[1] + b.Q[2]))


def test_gllp_without_two_photon_weight():
    d = PhotonDistribution([0.5, 0.5, 0.0, 0.0])
    b = rate_breakdown(d, ChannelParams(5.0))
    assert b.omega == 1.0
    h = binary_entropy(b.E_mu)
    assert b.R_gllp == pytest.approx(0.5 * (-b.Q_mu * h * 1.22 + b.Q_mu * (1 - h)))


def test_half_sifting_factor(our_hbn):
    ch = ChannelParams(0.0, 0.9)
    b = rate_breakdown(our_hbn, ch)
    h = binary_entropy(b.E_mu)
    full = -b.Q_mu * h * 1.22 + b.Q[1] * (1 - phi(2 * b.e[1] - 1)) + b.Q[2] * (1 - phi((2 * b.e[2] - 1) ** 2))
    assert b.R_proposed == pytest.approx(full / 2)


def test_proposed_monotone_in_loss(presets):
    for d in presets.values():
        rates = [b.R_proposed for b in loss_sweep(d, np.arange(0, 50, 0.5))]
        assert all(a >= b for a, b in zip(rates, rates[1:]))


def test_channel_params():
    ch = ChannelParams.from_transmission(0.1, detector_efficiency=0.5)
    assert ch.channel_loss_db == pytest.approx(10.0)
    assert ch.eta_tot == pytest.approx(0.05)
    with pytest.raises(DomainError):
        ChannelParams(-1.0)
    with pytest.raises(DomainError):
        ChannelParams(ec_efficiency=0.9)


def test_dominance_survey(presets):
    """Proposed >= GLLP on a randomized grid; violations are logged, not asserted.

    The tested presets themselves must satisfy it.
    """
    rng = np.random.default_rng(0)
    violations = []
    for _ in range(300):
        p = rng.dirichlet([5, 3, 1, 0.3])
        d = PhotonDistribution(p)
        ch = ChannelParams(rng.uniform(0, 40), rng.uniform(0.3, 1.0), 10 ** rng.uniform(-8, -4))
        b = rate_breakdown(d, ch)
        if b.R_proposed < b.R_gllp - 1e-12:
            violations.append((p.round(4).tolist(), ch.channel_loss_db, b.R_proposed, b.R_gllp))
    for v in violations:
        log.warning("dominance violation: %s", v)
    for d in presets.values():
        for b in loss_sweep(d, np.arange(0, 41, 1.0)):
            assert b.R_proposed >= b.R_gllp - 1e-12
