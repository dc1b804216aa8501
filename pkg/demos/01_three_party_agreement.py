"""
Three parties agree on a key
============================

Each party sends a ring of Bell pairs around everyone else.  Every visited
party encodes its key on the traveling halves, and the initiator's final
Bell measurement yields the XOR of the other keys.
"""

import numpy as np

from nqka.protocol import ProtocolConfig, SecretKey, run_protocol, xor_keys
from nqka.qcore import BellLabel, batch

# %%
# A key is a list of 2-bit symbols; each symbol names a Pauli operation.
alice = SecretKey.from_bits("00 01 10 11")
bob = SecretKey.from_bits("11 11 00 01")
carol = SecretKey.from_bits("10 00 01 01")
print("symbols of Alice:", alice.bits(), [op.name for op in alice.ops()])

# %%
# Encoding two symbols on one pair lands on the Bell state named by their XOR.
pair = batch.bell_pairs(np.array([0]))
pair = batch.apply_pauli_pairs(pair, np.array([0b10]), qubit=1)  # X
pair = batch.apply_pauli_pairs(pair, np.array([0b01]), qubit=1)  # Z
label, _ = batch.bell_measure_pairs(pair, np.random.default_rng(0))
print("X then Z ->", BellLabel(int(label[0])).name)

# %%
# A full run.  All rings move one hop per round; nobody measures until
# every ring is home.
config = ProtocolConfig(parties=3, symbols=4, seed=2024)
run = run_protocol(config, [alice, bob, carol])
for party, (own, seen) in enumerate(zip(run.keys, run.result.recovered)):
    print(f"party {party}: own {own.bits()}  measured XOR of others {seen.bits()}")
print("agreed key:", run.result.final_key.bits())
print("expected  :", xor_keys(run.keys).bits())
print("rounds:", run.stats.rounds, "decoy checks:", run.stats.hop_checks)

# %%
# The public log holds acknowledgements, decoy positions and bases, and
# check results.  None of it depends on the keys.
for event in run.log[:3]:
    print(event)

# %%
# The same code scales to more parties.
for parties in range(2, 7):
    run = run_protocol(ProtocolConfig(parties=parties, symbols=16, seed=parties))
    print(parties, "parties agree:", run.result.agreement)
