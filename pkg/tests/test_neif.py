"""Unit tests for the interferometer and its coincidence rates."""

import math

import numpy as np
import pytest

from qiopa import neif
from qiopa.fock import (
    TruncationError,
    basis_state,
    make_basis,
    pair_state,
    vacuum_state,
)
from qiopa.neif import (
    DetectorMode,
    NeifConfig,
    complementary_coincidence,
    double_coincidence,
    mode_unitary,
    noise_rate_closed_form,
    rate_closed_form,
    same_beam_coincidence,
    transform_state,
    triple_coincidence_rate,
    xor_suppressed_rate,
)
from qiopa.opa import OpaParams, amplified_vacuum, evolve

BASIS = make_basis(8)
AMP = OpaParams(g=0.22, cutoff=8)


def amplified_injection(phi, g=0.22):
    return evolve(pair_state(phi, BASIS), OpaParams(g=g, cutoff=8))


def test_config_validation_and_delta():
    cfg = NeifConfig(delta1=0.9, delta2=0.2)
    assert cfg.delta == pytest.approx(0.7)
    with pytest.raises(ValueError):
        NeifConfig(bs_transmittance=1.2)
    with pytest.raises(ValueError):
        NeifConfig(bs_transmittance=-0.1)


def test_detector_axes():
    assert DetectorMode.D1H.value.beam == 1
    assert DetectorMode.D1H.value.polarization == "h"
    assert DetectorMode.D2V.value.beam == 2
    assert DetectorMode.D2V.value.polarization == "v"
    assert [d.axis for d in DetectorMode] == [d.value.value for d in DetectorMode]


def test_mode_unitary_is_unitary():
    rng = np.random.default_rng(7)
    for _ in range(5):
        cfg = NeifConfig(
            delta1=rng.uniform(-math.pi, math.pi),
            delta2=rng.uniform(-math.pi, math.pi),
            theta1=rng.uniform(-math.pi, math.pi),
            theta2=rng.uniform(-math.pi, math.pi),
            bs_transmittance=rng.uniform(0.0, 1.0),
        )
        u = mode_unitary(cfg)
        np.testing.assert_allclose(u.conj().T @ u, np.eye(4), atol=1e-12)


def test_mode_unitary_identity_configuration():
    """Undoing the built-in waveplate offset with open splitters passes light through."""
    cfg = NeifConfig(theta1=-math.pi / 4, theta2=-math.pi / 4, bs_transmittance=1.0)
    np.testing.assert_allclose(mode_unitary(cfg), np.eye(4), atol=1e-12)


def test_mode_unitary_bare_splitter_blocks():
    # rotators parked, balanced splitter: every surviving entry carries half the power
    cfg = NeifConfig(theta1=-math.pi / 4, theta2=-math.pi / 4)
    u = mode_unitary(cfg)
    power = np.abs(u) ** 2
    assert np.count_nonzero(power > 1e-12) == 8
    np.testing.assert_allclose(power[power > 1e-12], 0.5, atol=1e-12)


def test_transform_preserves_photon_number_distribution():
    # passive network: the total-occupancy histogram must survive untouched
    s = amplified_injection(0.9, 0.22)
    cfg = NeifConfig(delta1=0.4, theta1=0.3, theta2=1.1)
    out = transform_state(s, cfg, norm_tol=1e-5)
    totals = s.basis.total_occupancy()
    for n in range(2 * s.basis.cutoff + 1):
        mask = totals == n
        before = float(np.sum(np.abs(s.amps[mask]) ** 2))
        after = float(np.sum(np.abs(out.amps[mask]) ** 2))
        assert after == pytest.approx(before, abs=1e-10)


def test_transform_preserves_norm():
    out = transform_state(pair_state(0.4, BASIS), NeifConfig(delta1=0.3, theta1=0.2))
    assert out.norm() == pytest.approx(1.0, abs=1e-12)


def test_transform_unitary_even_at_the_cutoff():
    """Lifted kernels stay antihermitian under truncation, so no norm leaks.

    Amplitude that would cross the cutoff is reflected, not dropped; the
    norm gate only trips if the matrix exponential itself degrades.
    """
    edge = basis_state(make_basis(4), (4, 0, 0, 4))
    out = transform_state(edge, NeifConfig())
    assert out.norm() == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(TruncationError, match="lost"):
        transform_state(edge, NeifConfig(), norm_tol=-1.0)


def test_kernel_cache_reuse():
    cfg = NeifConfig(delta1=1.234567)
    first = transform_state(pair_state(0.0, BASIS), cfg)
    size = len(neif._KERNEL_CACHE)
    second = transform_state(pair_state(0.0, BASIS), cfg)
    assert len(neif._KERNEL_CACHE) == size
    np.testing.assert_array_equal(first.amps, second.amps)


def test_leading_order_rate_at_zero_gain():
    """Coincidences on a bare pair follow the two-photon interference law."""
    basis = make_basis(4)
    for phi in (0.0, 0.8, 2.4):
        for delta1 in (0.0, 0.5):
            for theta1 in (0.1, 0.6):
                cfg = NeifConfig(delta1=delta1, theta1=theta1, theta2=0.4)
                rate = double_coincidence(pair_state(phi, basis), cfg)
                expected = rate_closed_form(phi, cfg, 0.0)
                law = 0.25 * (1 + math.cos(cfg.delta - phi)) * math.sin(theta1 + 0.4) ** 2
                assert rate == pytest.approx(expected, abs=1e-12)
                assert rate == pytest.approx(law, abs=1e-12)


def test_parity_selectivity_of_balanced_network():
    basis = make_basis(4)
    cfg = NeifConfig()
    triplet = pair_state(0.0, basis)
    singlet = pair_state(math.pi, basis)
    assert double_coincidence(triplet, cfg) == pytest.approx(0.5, abs=1e-12)
    assert double_coincidence(singlet, cfg) == pytest.approx(0.0, abs=1e-12)
    # the same-beam pairing inverts the selection
    assert complementary_coincidence(triplet, cfg) == pytest.approx(0.0, abs=1e-12)
    assert complementary_coincidence(singlet, cfg) == pytest.approx(0.5, abs=1e-12)


def test_detector_choice_matches_named_rates():
    cfg = NeifConfig(delta1=0.3)
    s = pair_state(0.5, make_basis(4))
    assert double_coincidence(s, cfg, pair=(DetectorMode.D2V, DetectorMode.D2H)) == same_beam_coincidence(s, cfg)
    assert double_coincidence(s, cfg, pair=(DetectorMode.D1H, DetectorMode.D1V)) == complementary_coincidence(s, cfg)


def test_coincidence_rejects_same_detector():
    s = pair_state(0.5, make_basis(4))
    with pytest.raises(ValueError, match="distinct"):
        double_coincidence(s, NeifConfig(), pair=(DetectorMode.D1H, DetectorMode.D1H))


def test_closed_form_bracket_variants_differ_by_fixed_term():
    """The two bracket readings differ by S^2 cos(2 theta1) cos(2 theta2) / 2."""
    rng = np.random.default_rng(11)
    for _ in range(8):
        phi = rng.uniform(-math.pi, math.pi)
        s = rng.uniform(0.05, 0.3)
        cfg = NeifConfig(
            delta1=rng.uniform(-1.0, 1.0),
            theta1=rng.uniform(-1.0, 1.0),
            theta2=rng.uniform(-1.0, 1.0),
        )
        gap = rate_closed_form(phi, cfg, s, "squared_sum") - rate_closed_form(phi, cfg, s, "sum_of_squares")
        predicted = 0.5 * s**2 * math.cos(2 * cfg.theta1) * math.cos(2 * cfg.theta2)
        assert gap == pytest.approx(predicted, abs=1e-12)


def test_corrected_bracket_tracks_simulation():
    """Only the sum-of-squares bracket stays within the quartic error budget."""
    cfg = NeifConfig(delta1=0.4, theta1=0.15, theta2=1.35)
    g = 0.1
    s4 = math.sinh(g) ** 4
    sim = double_coincidence(amplified_injection(1.3, g), cfg, norm_tol=1e-5)
    corrected = rate_closed_form(1.3, cfg, math.sinh(g), "sum_of_squares")
    compact = rate_closed_form(1.3, cfg, math.sinh(g), "squared_sum")
    assert abs(sim - corrected) <= 20.0 * s4
    assert abs(sim - compact) >= 30.0 * s4


def test_closed_form_validation():
    with pytest.raises(ValueError, match="balanced"):
        rate_closed_form(0.0, NeifConfig(bs_transmittance=0.6), 0.1)
    with pytest.raises(ValueError, match="bracket"):
        rate_closed_form(0.0, NeifConfig(), 0.1, bracket="nope")


def test_noise_rate_floor_at_zero_detuning():
    for g in (0.1, 0.22):
        assert noise_rate_closed_form(NeifConfig(), math.sinh(g)) == pytest.approx(math.sinh(g) ** 4)
    assert noise_rate_closed_form(NeifConfig(delta1=math.pi), 0.2) == pytest.approx(0.2**2 + 0.2**4)


def test_noise_rate_matches_amplified_vacuum():
    cfg = NeifConfig(delta1=math.pi / 3, theta1=math.pi / 3, theta2=math.pi / 5)
    residuals = {}
    for g in (0.1, 0.22):
        sim = same_beam_coincidence(amplified_vacuum(OpaParams(g=g, cutoff=8)), cfg, norm_tol=1e-5)
        residuals[g] = abs(sim - noise_rate_closed_form(cfg, math.sinh(g)))
        assert residuals[g] <= 0.5 * math.sinh(g) ** 4
    # the remainder carries four powers of sinh(g)
    scale = (math.sinh(0.22) / math.sinh(0.1)) ** 4
    assert residuals[0.22] / residuals[0.1] == pytest.approx(scale, rel=0.05)


def test_xor_rate_is_vetoed_triple():
    s = pair_state(0.5, make_basis(4))
    cfg = NeifConfig(delta1=0.3)
    assert xor_suppressed_rate(s, cfg) == triple_coincidence_rate(s, cfg, vetoed=True)
    assert triple_coincidence_rate(s, cfg, vetoed=False) >= xor_suppressed_rate(s, cfg)


def test_xor_null_on_amplified_vacuum():
    cfg = NeifConfig()
    for g in (0.1, 0.22, 0.3):
        rate = xor_suppressed_rate(amplified_vacuum(OpaParams(g=g, cutoff=8)), cfg, norm_tol=1e-5)
        assert rate < 1e-10


def test_xor_null_extends_to_amplified_injection():
    # at zero detuning the vetoed triple vanishes for any amplifier output
    rate = xor_suppressed_rate(amplified_injection(math.pi), NeifConfig(), norm_tol=1e-5)
    assert rate < 1e-10


def test_xor_revives_off_null():
    cfg = NeifConfig(delta1=0.7)
    rate = xor_suppressed_rate(amplified_injection(math.pi), cfg, norm_tol=1e-5)
    assert rate == pytest.approx(4.0896e-3, rel=1e-3)
    floor = xor_suppressed_rate(amplified_vacuum(AMP), cfg, norm_tol=1e-5)
    assert 0.0 < floor < rate / 100.0
