import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nqka.adversary import Flip
from nqka.protocol import (
    DecoyRecord,
    EarlyMeasureRejected,
    Phase,
    ProtocolConfig,
    ProtocolFault,
    QkaSession,
    SecretKey,
    check_decoys,
    encode_key,
    expected_key,
    extract_messages,
    final_measure,
    insert_decoys,
    measurement_barrier,
    prepare_ring,
    run_hop,
    run_protocol,
    xor_keys,
)
from nqka.qcore import BellLabel, batch, identify_bell
from nqka.rng import make_rng


def key(*symbols):
    return SecretKey(list(symbols))


# -- keys ---------------------------------------------------------------------


def test_key_bits_round_trip():
    k = SecretKey.from_bits("00 01 10 11")
    assert list(k) == [0, 1, 2, 3]
    assert k.bits() == "00011011"
    assert [op.name for op in k.ops()] == ["I", "Z", "X", "Y"]


def test_key_validation():
    with pytest.raises(ValueError):
        SecretKey([])
    with pytest.raises(ValueError):
        SecretKey([4])
    with pytest.raises(ValueError):
        SecretKey.from_bits("101")
    with pytest.raises(ValueError):
        key(1, 2) ^ key(1)


def test_key_is_immutable_and_hashable():
    k = key(1, 2)
    with pytest.raises(ValueError):
        k.symbols[0] = 3
    assert {k: 1}[key(1, 2)] == 1


@given(st.lists(st.lists(st.integers(0, 3), min_size=4, max_size=4), min_size=1, max_size=6))
def test_xor_keys_is_symbolwise(rows):
    expected = [0, 0, 0, 0]
    for row in rows:
        expected = [a ^ b for a, b in zip(expected, row)]
    assert list(xor_keys([SecretKey(r) for r in rows])) == expected


# -- rings and frames -----------------------------------------------------------


def test_prepare_ring_shape_and_state():
    ring = prepare_ring(0, 4)
    assert ring.n == 4 and ring.phase is Phase.PREPARING and ring.k == 0
    assert identify_bell(prepare_ring(0, 1).pairs[0]) is BellLabel.PHI_PLUS
    with pytest.raises(ValueError):
        prepare_ring(0, 0)


def test_insert_decoys_counts_and_inverse():
    rng = make_rng(1)
    pairs = batch.bell_pairs(np.array([0, 1]))
    frame, record = insert_decoys(pairs, rng)
    assert len(frame) == 4 and len(record.positions) == 2
    assert np.array_equal(extract_messages(frame), pairs)
    assert sorted(np.flatnonzero(frame.layout < 0)) == sorted(record.positions)


def test_decoy_states_are_uniform():
    rng = make_rng(2)
    pairs = batch.bell_pairs(np.zeros(10, dtype=int))
    counts = np.zeros(4)
    for _ in range(1000):  # 10^4 decoys
        _, record = insert_decoys(pairs, rng)
        np.add.at(counts, 2 * np.asarray(record.bases) + np.asarray(record.bits), 1)
    freq = counts / counts.sum()
    sigma = np.sqrt(0.25 * 0.75 / counts.sum())
    assert np.all(np.abs(freq - 0.25) <= 3 * sigma)


def test_decoy_positions_are_uniform():
    rng = make_rng(3)
    pairs = batch.bell_pairs(np.zeros(4, dtype=int))
    hits = np.zeros(8)
    for _ in range(2000):
        _, record = insert_decoys(pairs, rng)
        hits[record.positions] += 1
    sigma = np.sqrt(2000 * 0.25)
    assert np.all(np.abs(hits - 1000) <= 4 * sigma)


def test_check_decoys_honest_and_flipped():
    rng = make_rng(4)
    pairs = batch.bell_pairs(np.zeros(8, dtype=int))
    frame, record = insert_decoys(pairs, rng)
    check = check_decoys(frame, record, 0.0, rng)
    assert check.error_rate == 0 and check.passed

    rates = []
    for _ in range(500):
        frame, record = insert_decoys(pairs, rng)
        rates.append(check_decoys(frame.tampered(Flip("X"), rng), record, 0.0, rng).error_rate)
    assert abs(np.mean(rates) - 0.5) < 3 * np.sqrt(0.25 / 4000)

    frame, record = insert_decoys(pairs, rng)
    assert check_decoys(frame.tampered(Flip("Y"), rng), record, 0.0, rng).error_rate == 1.0


def test_check_decoys_rejects_foreign_record():
    rng = make_rng(5)
    pairs = batch.bell_pairs(np.zeros(2, dtype=int))
    frame, record = insert_decoys(pairs, rng, ring_id=0)
    _, other = insert_decoys(pairs, rng, ring_id=1)
    with pytest.raises(ProtocolFault):
        check_decoys(frame, other, 0.0, rng)
    moved = DecoyRecord(0, 0, np.flatnonzero(frame.layout >= 0), record.bases, record.bits)
    with pytest.raises(ProtocolFault):
        check_decoys(frame, moved, 0.0, rng)


def test_encode_key_examples():
    start = prepare_ring(0, 1).pairs
    assert identify_bell(encode_key(start, key(0))[0]) is BellLabel.PHI_PLUS
    assert identify_bell(encode_key(start, key(1))[0]) is BellLabel.PHI_MINUS
    twice = encode_key(encode_key(start, key(2)), key(1))
    assert identify_bell(twice[0]) is BellLabel.PSI_MINUS
    with pytest.raises(ValueError):
        encode_key(start, key(1, 2))


@given(st.lists(st.integers(0, 3), min_size=1, max_size=6))
def test_bell_label_is_xor_regardless_of_order(symbols):
    for order in (symbols, symbols[::-1]):
        pairs = prepare_ring(0, 1).pairs
        for s in order:
            pairs = encode_key(pairs, key(s))
        expected = 0
        for s in symbols:
            expected ^= s
        assert identify_bell(pairs[0]) is BellLabel(expected)


def test_honest_hop_advances_k():
    config = ProtocolConfig(parties=3, symbols=4)
    ring, report = run_hop(prepare_ring(0, 4, 3), key(1, 2, 3, 0), config, make_rng(6))
    assert ring.k == 1 and ring.hop == 1 and ring.holder == 1
    assert ring.phase is Phase.IN_TRANSIT and report.error_rate == 0


def test_home_hop_does_not_encode():
    config = ProtocolConfig(parties=2, symbols=2)
    rng = make_rng(7)
    ring, _ = run_hop(prepare_ring(0, 2, 2), key(3, 1), config, rng)
    before = ring.pairs.copy()
    ring, _ = run_hop(ring, None, config, rng)
    assert ring.k == 1 and ring.phase is Phase.COMPLETE
    assert Phase.AWAITING_CHECK in ring.trace
    assert np.allclose(ring.pairs, before)
    with pytest.raises(ValueError):
        run_hop(ring, None, config, rng)


def test_failed_check_restarts_then_aborts():
    config = ProtocolConfig(parties=3, symbols=4, max_restarts=1)
    rng = make_rng(8)
    ring = prepare_ring(0, 4, 3)
    ring, report = run_hop(ring, key(0, 0, 0, 0), config, rng, Flip("Y"))
    assert report.restarted and ring.restarts == 1 and ring.k == 0 and ring.phase is Phase.PREPARING
    ring, report = run_hop(ring, key(0, 0, 0, 0), config, rng, Flip("Y"))
    assert report.aborted and ring.phase is Phase.ABORTED


def test_aborted_run_produces_no_key():
    run = run_protocol(ProtocolConfig(parties=3, symbols=4, max_restarts=2), "random", Flip("Y"))
    assert run.stats.aborted and not run.result.agreement
    assert run.result.final_key is None


# -- barrier --------------------------------------------------------------------


def _rings_after(hops):
    config = ProtocolConfig(parties=3, symbols=2)
    rng = make_rng(9)
    rings = [prepare_ring(j, 2, 3) for j in range(3)]
    for j, count in enumerate(hops):
        for _ in range(count):
            rings[j], _ = run_hop(rings[j], key(1, 1), config, rng)
    return rings


def test_barrier_examples():
    assert measurement_barrier(_rings_after([3, 3, 3])).rings == {0, 1, 2}
    partial = _rings_after([3, 1, 1])
    with pytest.raises(EarlyMeasureRejected):
        measurement_barrier(partial)
    assert measurement_barrier(partial, request=0, enforced=False).rings == {0}
    with pytest.raises(EarlyMeasureRejected):
        measurement_barrier(partial, request=1, enforced=False)


def test_final_measure_needs_permit():
    rings = _rings_after([3, 1, 1])
    permit = measurement_barrier(rings, request=0, enforced=False)
    assert len(final_measure(rings[0], permit, make_rng(0))) == 2
    with pytest.raises(EarlyMeasureRejected):
        final_measure(rings[1], permit, make_rng(0))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 2), min_size=1, max_size=12), st.integers(0, 2))
def test_barrier_sound_under_any_schedule(schedule, probe):
    session = QkaSession(ProtocolConfig(parties=3, symbols=2), [key(1, 2)] * 3, make_rng(10))
    for ring_id in schedule:
        if not session.rings[ring_id].finished:
            session.advance(ring_id)
        if not session.done:
            with pytest.raises(EarlyMeasureRejected):
                session.measure(probe)
    session.run()
    assert session.result().agreement


# -- whole protocol ---------------------------------------------------------------


def test_final_measure_examples():
    # other parties use 01 and 10 -> measured XOR 11
    keys = [key(0), key(1), key(2)]
    run = run_protocol(ProtocolConfig(parties=3, symbols=1), keys)
    assert run.result.recovered[0] == key(3)
    zeros = run_protocol(ProtocolConfig(parties=3, symbols=1), [key(2), key(0), key(0)])
    assert zeros.result.recovered[0] == key(0)
    two = run_protocol(ProtocolConfig(parties=2, symbols=3), [key(0, 0, 0), key(1, 2, 3)])
    assert two.result.recovered[0] == key(1, 2, 3)


@pytest.mark.parametrize("parties", [2, 3, 5])
def test_honest_agreement(parties):
    run = run_protocol(ProtocolConfig(parties=parties, symbols=8, seed=parties))
    assert run.result.agreement
    assert run.result.final_key == expected_key(run.keys) == xor_keys(run.keys)
    assert all(k == run.result.final_key for k in run.result.party_keys)
    assert run.stats.detections == 0 and run.stats.mean_error_rate == 0
    assert run.stats.rounds == parties


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 6), st.integers(1, 32), st.integers(0, 2**32 - 1))
def test_correctness_property(parties, symbols, seed):
    run = run_protocol(ProtocolConfig(parties=parties, symbols=symbols, seed=seed))
    assert run.result.agreement and run.result.final_key == xor_keys(run.keys)


def test_five_party_many_seeds():
    for seed in range(1000):
        run = run_protocol(ProtocolConfig(parties=5, symbols=16, seed=seed))
        assert run.result.agreement


def test_same_seed_same_run():
    config = ProtocolConfig(parties=4, symbols=6, seed=42)
    a, b = run_protocol(config), run_protocol(config)
    assert a.keys == b.keys and a.log == b.log and a.result.final_key == b.result.final_key


def test_public_log_does_not_depend_on_keys():
    config = ProtocolConfig(parties=3, symbols=6)
    rng_keys = make_rng(11)
    runs = []
    for _ in range(2):
        keys = [SecretKey.random(6, rng_keys) for _ in range(3)]
        runs.append(run_protocol(config, keys, rng=make_rng(12)))
    assert runs[0].keys != runs[1].keys
    assert runs[0].log == runs[1].log


class _OnceY:
    """Y-flip only the first transmission of ring 0 after it has been encoded once."""

    intercepts = True

    def __init__(self):
        self.fired = False
        self.inner = Flip("Y")

    def targets(self, ring_id, hop):
        if ring_id == 0 and hop == 1 and not self.fired:
            self.fired = True
            return True
        return False

    def disturb_qubits(self, amps, rng):
        return self.inner.disturb_qubits(amps, rng)

    def disturb_pair_halves(self, amps, qubit, rng):
        return self.inner.disturb_pair_halves(amps, qubit, rng)


def test_restart_leaves_no_trace_in_key():
    for seed in range(10):
        run = run_protocol(ProtocolConfig(parties=3, symbols=4, seed=seed), "random", _OnceY())
        assert run.stats.restarts == (1, 0, 0)
        assert run.result.agreement and run.result.final_key == xor_keys(run.keys)


def test_session_rejects_bad_keys():
    with pytest.raises(ValueError):
        QkaSession(ProtocolConfig(parties=3, symbols=2), [key(1, 1)] * 2, make_rng(0))
    with pytest.raises(ValueError):
        QkaSession(ProtocolConfig(parties=2, symbols=2), [key(1)] * 2, make_rng(0))


def test_config_validation():
    for bad in (dict(parties=1), dict(symbols=0), dict(error_threshold=1.5), dict(max_restarts=-1)):
        with pytest.raises(ValueError):
            ProtocolConfig(**bad)


def test_encoder_order_visits_everyone_else():
    for parties in range(2, 7):
        for j in range(parties):
            ring = prepare_ring(j, 1, parties)
            assert sorted(ring.encoder_order() + [j]) == list(range(parties))


def test_small_exhaustive_three_party():
    config = ProtocolConfig(parties=3, symbols=1)
    for combo in itertools.product(range(4), repeat=3):
        keys = [key(s) for s in combo]
        run = run_protocol(config, keys)
        assert list(run.result.final_key) == [combo[0] ^ combo[1] ^ combo[2]]
