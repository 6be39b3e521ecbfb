import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from g2qkd import (
    DegenerateMean,
    DomainError,
    InvalidDistribution,
    NonConvergent,
    PhotonDistribution,
    SourceParams,
    build_distribution,
    g2_exact,
    g3_exact,
    moments,
)


def test_our_hbn_matches_reference(our_hbn):
    p0, p1, p2, p3 = our_hbn.p
    assert (round(p0, 3), round(p1, 3), round(p2, 5), round(p3, 8)) == (0.963, 0.036, 0.00038, 1.57e-6)
    assert round(our_hbn.mu, 3) == 0.037


def test_qd_matches_reference(qd):
    assert [round(v, 3) for v in qd.p] == [0.203, 0.750, 0.045, 0.002]
    assert round(qd.mu, 3) == 0.845


def test_zero_efficiency_is_vacuum():
    d = build_distribution(SourceParams(0.0, 0.7, 0.3))
    assert d.p.tolist() == [1.0, 0.0, 0.0, 0.0]
    assert d.mu == 0.0


def test_moments_single_photon_and_triplet():
    assert moments(PhotonDistribution([0, 1, 0, 0])) == (1, 0, 0)
    assert moments(PhotonDistribution([0, 0, 0, 1])) == (3, 6, 6)


def test_moments_our_hbn(our_hbn):
    # 2*P2 + 6*P3 from the rounded reference probabilities
    assert moments(our_hbn)[1] == pytest.approx(7.76e-4, rel=5e-3)


def test_g2_of_single_photon_is_zero():
    assert g2_exact(PhotonDistribution([0, 1, 0, 0])) == 0.0


def test_degenerate_mean():
    vac = PhotonDistribution([1, 0, 0, 0])
    with pytest.raises(DegenerateMean):
        g2_exact(vac)
    with pytest.raises(DegenerateMean):
        g3_exact(vac)


def test_source_validation():
    with pytest.raises(DomainError):
        SourceParams(1.2, 0.5, 0.1)
    with pytest.raises(DomainError):
        SourceParams(0.5, -0.1, 0.1)
    # super-Poissonian values are allowed
    SourceParams(0.1, 1.5, 3.0)


def test_inconsistent_source_rejected():
    with pytest.raises(InvalidDistribution):
        build_distribution(SourceParams(0.9, 0.2, 0.0))


def test_runaway_iteration():
    with pytest.raises(NonConvergent):
        build_distribution(SourceParams(0.95, 1.0, 1.0))


def test_distribution_validation():
    with pytest.raises(InvalidDistribution):
        PhotonDistribution([0.5, 0.5, 0.1, 0])
    with pytest.raises(InvalidDistribution):
        PhotonDistribution([1.1, -0.1, 0, 0])
    with pytest.raises(DomainError):
        PhotonDistribution([1.0])


def test_distribution_is_immutable(our_hbn):
    with pytest.raises(ValueError):
        our_hbn.p[0] = 0.5


sources = st.builds(
    SourceParams,
    quantum_efficiency=st.floats(0.0, 0.95),
    g2=st.floats(0.0, 1.0),
    g3=st.floats(0.0, 1.0),
)


def _build(src):
    try:
        return build_distribution(src)
    except (NonConvergent, InvalidDistribution):
        assume(False)


@settings(max_examples=300, deadline=None)
@given(sources)
def test_normalised_and_self_consistent(src):
    d = _build(src)
    assert abs(d.p.sum() - 1.0) <= 1e-12
    p1, mu = src.quantum_efficiency, d.mu
    fixed = p1 + mu * mu * src.g2 + 0.5 * mu**3 * src.g3
    assert fixed == pytest.approx(mu, abs=1e-10)
    assert d.p[2] == pytest.approx(0.5 * mu * mu * src.g2, abs=1e-10)


@settings(max_examples=300, deadline=None)
@given(sources)
def test_truncation_identities(src):
    d = _build(src)
    assume(d.mu > 1e-6)
    assert g2_exact(d) == pytest.approx(src.g2 + d.mu * src.g3, rel=1e-10, abs=1e-10)
    assert g3_exact(d) == pytest.approx(src.g3, rel=1e-10, abs=1e-10)


@settings(max_examples=200, deadline=None)
@given(sources, st.floats(0.0, 0.5))
def test_p2_monotone_in_g2(src, bump):
    lo = _build(src)
    hi = _build(SourceParams(src.quantum_efficiency, src.g2 + bump, src.g3))
    assert hi.p[2] >= lo.p[2] - 1e-15


def test_equality_and_hash(our_hbn):
    again = PhotonDistribution(np.array(our_hbn.p))
    assert again == our_hbn and hash(again) == hash(our_hbn)
