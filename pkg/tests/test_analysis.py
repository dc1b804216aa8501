import itertools
from fractions import Fraction

import pytest

from nqka import analysis
from nqka.adversary import HONEST, Flip, InterceptResend, estimate_hop_detection
from nqka.analysis import (
    ResourceCount,
    count_resources,
    decoy_error_probability,
    detection_probability,
    efficiency,
    general_efficiency,
    guess_success_probability,
    percent,
    privacy_posterior,
    tally_resources,
    transformation_rows,
)
from nqka.protocol import ProtocolConfig, run_protocol
from nqka.qcore import BellLabel


def test_efficiency_examples():
    assert percent(efficiency(ResourceCount(2, 15, 9))) == "8.33%"
    assert percent(efficiency(ResourceCount(1, 15, 9))) == "4.17%"
    # the third comparison row: c = n, q = 15n, b = 12n
    assert efficiency(ResourceCount(1, 15, 12)) == Fraction(1, 27)
    with pytest.raises(ZeroDivisionError):
        efficiency(ResourceCount(1, 0, 0))
    with pytest.raises(ValueError):
        ResourceCount(-1, 1, 1)


def test_resource_counts():
    assert count_resources("ours", 3) == ResourceCount(2, 15, 9)
    assert count_resources("ours", 2) == ResourceCount(2, 8, 4)
    assert percent(efficiency(count_resources("ours", 2))) == "16.67%"
    assert count_resources("sap2") == ResourceCount(1, 15, 9)
    assert ResourceCount(2, 15, 9).at(4) == (8, 60, 36)
    for bad in (("sap2", 4), ("zhu", 2), ("other", 3), ("ours", 1)):
        with pytest.raises(ValueError):
            count_resources(*bad)


@pytest.mark.parametrize("parties", range(2, 11))
def test_general_efficiency_matches_counting(parties):
    assert efficiency(count_resources("ours", parties)) == general_efficiency(parties)
    run = run_protocol(ProtocolConfig(parties=parties, symbols=3, seed=parties))
    assert tally_resources(run) == count_resources("ours", parties)


def test_comparison_table_rows():
    rows = {r.protocol: r.as_dict() for r in analysis.comparison_table()}
    assert rows["sap2"]["efficiency"] == "4.17%"
    assert rows["ours"]["efficiency"] == "8.33%"
    assert rows["zhu"]["efficiency"] == "3.70%"


def test_single_photon_disturbance_enumeration():
    assert decoy_error_probability(Flip("X")) == Fraction(1, 2)
    assert decoy_error_probability(Flip("Z")) == Fraction(1, 2)
    assert decoy_error_probability(Flip("Y")) == 1
    for policy in ("z", "x", "random"):
        assert decoy_error_probability(InterceptResend(policy)) == Fraction(1, 4)


def test_bell_pair_disturbance_enumeration():
    for op in "XYZ":
        assert decoy_error_probability(Flip(op), "bell_pair") == 0
    assert decoy_error_probability(InterceptResend("z"), "bell_pair") == Fraction(1, 2)
    assert decoy_error_probability(InterceptResend("random"), "bell_pair") == Fraction(5, 8)


def test_detection_probability_examples():
    assert detection_probability(Flip("X"), "single_photon", 8) == 1 - 0.5**8
    assert detection_probability(Flip("X"), "bell_pair", 8) == 0
    assert detection_probability(InterceptResend("random"), "single_photon", 5) == pytest.approx(1 - 0.75**5)
    with pytest.raises(ValueError):
        detection_probability(HONEST, "single_photon", 8)
    with pytest.raises(ValueError):
        detection_probability(Flip("X"), "other", 8)


@pytest.mark.parametrize("attack", [Flip("X"), InterceptResend("z"), InterceptResend("random")])
def test_analytic_matches_monte_carlo(attack):
    est = estimate_hop_detection(attack, symbols=2, trials=2000, seed=1)
    p = detection_probability(attack, "single_photon", 2)
    assert abs(est.rate - p) <= 3 * est.sigma(p)


def test_privacy_posterior_examples():
    post = privacy_posterior(BellLabel.PHI_MINUS, 3)
    assert set(post) == {(0, 1), (1, 0), (2, 3), (3, 2)}
    assert set(post.values()) == {Fraction(1, 4)}
    assert all(a ^ b == 0 for a, b in privacy_posterior(BellLabel.PHI_PLUS, 3))
    for label in BellLabel:
        assert privacy_posterior(label, 2) == {(label.code,): 1}
    with pytest.raises(ValueError):
        privacy_posterior(BellLabel.PHI_PLUS, 1)


@pytest.mark.parametrize("parties", [3, 4, 5])
def test_posterior_support_size(parties):
    for label in BellLabel:
        post = privacy_posterior(label, parties)
        assert len(post) == 4 ** (parties - 2)
        assert sum(post.values()) == 1


def test_guess_probability():
    assert guess_success_probability(2) == 1
    assert guess_success_probability(3) == Fraction(1, 4)


def test_transformation_table_is_recomputed():
    rows = transformation_rows()
    assert len(rows) == 16 and all(r.ok for r in rows)
    pairs = {(r.first.name, r.second.name) for r in rows}
    assert pairs == set(itertools.product("IZXY", repeat=2))
    lookup = {(r.first.name, r.second.name): r for r in rows}
    assert lookup["I", "I"].final is BellLabel.PHI_PLUS and lookup["I", "I"].xor == "00"
    assert lookup["X", "Y"].final is BellLabel.PHI_MINUS and lookup["X", "Y"].xor == "01"
    assert lookup["Z", "X"].final is BellLabel.PSI_MINUS and lookup["Z", "X"].xor == "11"
