import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nqka.adversary import Flip, InterceptResend
from nqka.baselines import (
    Permutation,
    build_frame,
    check_bell_decoys,
    decode_stage_ops,
    demo_collusion_sap2,
    demo_flip_undetected,
    demo_privacy_leak,
    encode_stage,
    predicted_flip_mask,
    run_sap1,
    run_sap2,
)
from nqka.protocol import ProtocolFault
from nqka.qcore import BellLabel, PauliOp, apply_pauli, batch, equal_up_to_global_phase, make_bell
from nqka.rng import make_rng


@given(st.integers(1, 40), st.integers(0, 2**32 - 1))
def test_permutation_round_trip(size, seed):
    perm = Permutation.random(size, make_rng(seed))
    seq = np.arange(size) * 7
    assert np.array_equal(perm.restore(perm.apply(seq)), seq)
    other = Permutation.random(size, make_rng(seed + 1))
    assert np.array_equal(perm.then(other).apply(seq), other.apply(perm.apply(seq)))


def test_permutation_rejects_non_bijection():
    with pytest.raises(ValueError):
        Permutation([0, 0, 1])


@pytest.mark.parametrize("op", [PauliOp.X, PauliOp.Z])
def test_bell_decoys_blind_to_flip(op):
    pair = make_bell(BellLabel.PHI_PLUS)
    assert equal_up_to_global_phase(apply_pauli(op, 1, apply_pauli(op, 0, pair)), pair)


def test_bell_decoys_see_intercept():
    rng = make_rng(0)
    pairs = batch.bell_pairs(np.zeros(8, dtype=int))
    hits = 0
    for _ in range(200):
        frame, record = build_frame(pairs, rng)
        hits += not check_bell_decoys(frame.tampered(InterceptResend("z"), rng), record, 0.0, rng).passed
    # four pairs, each failing with probability 1/2
    p = 1 - 0.5**4
    assert abs(hits / 200 - p) <= 3 * np.sqrt(p * (1 - p) / 200)


def test_build_frame_needs_even_length():
    with pytest.raises(ValueError):
        build_frame(batch.bell_pairs(np.zeros(3, dtype=int)), make_rng(0))


def test_bell_decoy_record_positions_are_disjoint_pairs():
    frame, record = build_frame(batch.bell_pairs(np.zeros(6, dtype=int)), make_rng(1))
    assert record.positions.shape == (3, 2)
    assert len(set(record.positions.ravel().tolist())) == 6
    original = frame.permutation.mapping[record.positions]
    assert np.all(original >= 6)


def test_check_bell_decoys_faults():
    rng = make_rng(2)
    frame, record = build_frame(batch.bell_pairs(np.zeros(4, dtype=int)), rng, ring_id=0)
    _, other = build_frame(batch.bell_pairs(np.zeros(4, dtype=int)), rng, ring_id=1)
    with pytest.raises(ProtocolFault):
        check_bell_decoys(frame, other, 0.0, rng)


def test_encode_stage_ops():
    start = batch.bell_pairs(np.zeros(2, dtype=int))
    bits = np.array([0, 1])
    labels, _ = batch.bell_measure_pairs(encode_stage(start, bits, 1), make_rng(0))
    assert list(labels) == [BellLabel.PHI_PLUS, BellLabel.PSI_PLUS]
    labels, _ = batch.bell_measure_pairs(encode_stage(start, bits, 2), make_rng(0))
    assert list(labels) == [BellLabel.PHI_PLUS, BellLabel.PHI_MINUS]


def test_sap1_examples():
    rng = make_rng(3)
    res = run_sap1(8, rng=rng)
    assert res.agreement and np.array_equal(res.final_key, res.keys[0] ^ res.keys[1])
    key_a = [1, 0, 1, 1, 0, 0, 1, 0]
    zero_b = run_sap1(8, key_a, [0] * 8, rng=rng)
    assert list(zero_b.final_key) == key_a
    with pytest.raises(ValueError):
        run_sap1(3, rng=rng)


def test_sap1_announces_key_before_message_order():
    events = [e["event"] for e in run_sap1(4, rng=make_rng(4)).log]
    assert events.index("key") < events.index("message_order")


def test_sap2_examples():
    rng = make_rng(5)
    res = run_sap2(8, rng=rng)
    honest = res.keys[0] ^ res.keys[1] ^ res.keys[2]
    assert res.agreement and np.array_equal(res.final_key, honest)
    zeros = run_sap2(4, [[0] * 4] * 3, rng=rng)
    assert not zeros.final_key.any()


def test_sap2_initiator_reads_individual_bits():
    res = run_sap2(8, rng=make_rng(6))
    for j, view in enumerate(res.recovered):
        assert set(view) == {(j + 1) % 3, (j + 2) % 3}
        for other, bits in view.items():
            assert np.array_equal(bits, res.keys[other])


def test_decode_stage_ops_cases():
    # (K_B, K_C) -> Bell outcome is a bijection on the four cases
    outcomes = {}
    for b, c in itertools.product((0, 1), repeat=2):
        pair = batch.bell_pairs(np.zeros(1, dtype=int))
        pair = encode_stage(encode_stage(pair, np.array([b]), 1), np.array([c]), 2)
        label = int(batch.bell_measure_pairs(pair, make_rng(0))[0][0])
        outcomes[(b, c)] = label
        assert decode_stage_ops(label) == (PauliOp.X if b else PauliOp.I, PauliOp.Z if c else PauliOp.I)
    assert outcomes[(0, 0)] == BellLabel.PHI_PLUS
    assert len(set(outcomes.values())) == 4


@pytest.mark.parametrize("protocol,op", [("sap1", "X"), ("sap1", "Z"), ("sap2", "X"), ("sap2", "Z")])
def test_flip_demo_undetected(protocol, op):
    for seed in range(20):
        out = demo_flip_undetected(protocol, op, 8, make_rng(seed))
        assert not out.detected
        assert out.key_influence["matches_prediction"]


def test_flip_demo_contrast_detected():
    hits = sum(demo_flip_undetected("sap2", "X", 8, make_rng(s)).key_influence["single_photon_detected"]
               for s in range(20))
    assert hits == 20


def test_flip_prediction_shapes():
    a, b = predicted_flip_mask("sap1", PauliOp.X, 4)
    assert a.all() and not b.any()
    assert not any(m.any() for m in predicted_flip_mask("sap1", PauliOp.Z, 4))
    assert all(m.all() for m in predicted_flip_mask("sap2", PauliOp.Z, 4))
    with pytest.raises(ValueError):
        demo_flip_undetected("sap2", "Y", 4)


def test_flip_on_sap_everywhere_is_undetected():
    res = run_sap2(8, attack=Flip("X"), rng=make_rng(7))
    assert res.attacked_hops == 9 and res.detections == 0


def test_privacy_leak_always_succeeds():
    for seed in range(10):
        assert demo_privacy_leak(8, make_rng(seed)).success_rate == 1.0


def test_collusion_demo():
    for seed in range(10):
        out = demo_collusion_sap2(8, make_rng(seed))
        assert out.succeeded and not out.detected
        assert out.key_influence["independent_of_target"]


def test_without_colluders_key_depends_on_target():
    rng = make_rng(8)
    keys = [rng.integers(0, 2, 8) for _ in range(3)]
    a = run_sap2(8, keys, rng=make_rng(9))
    b = run_sap2(8, keys[:2] + [keys[2] ^ 1], rng=make_rng(9))
    assert not np.array_equal(a.final_key, b.final_key)
