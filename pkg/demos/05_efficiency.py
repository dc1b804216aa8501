"""
Resource efficiency
===================

Efficiency is message bits over qubits plus classical bits.
"""

from nqka import analysis
from nqka.protocol import ProtocolConfig, run_protocol

for row in analysis.comparison_table():
    d = row.as_dict()
    print(f"{d['protocol']:<5} c={d['message_bits']:<3} q={d['qubits']:<4} b={d['exchanged_bits']:<4} {d['efficiency']}")

# %%
# Counting a real run's public log agrees with 1 / (N (N + 1)).
for parties in range(2, 11):
    run = run_protocol(ProtocolConfig(parties=parties, symbols=4, seed=parties))
    counted = analysis.tally_resources(run)
    eta = analysis.efficiency(counted)
    print(f"N={parties:<2} {counted}  eta={analysis.percent(eta)}  "
          f"closed form ok: {eta == analysis.general_efficiency(parties)}")
