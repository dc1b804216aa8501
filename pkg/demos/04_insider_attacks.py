"""
Insider attacks
===============

Two colluders who may measure their ring early can learn the third key and
cancel it.  Holding every measurement until all rings are home stops this.
"""

from nqka.adversary import run_collusion
from nqka.baselines import demo_collusion_sap2, demo_privacy_leak
from nqka.protocol import ProtocolConfig, SecretKey
from nqka.rng import make_rng

rng = make_rng(7)
keys = [SecretKey.random(6, rng) for _ in range(3)]
config = ProtocolConfig(parties=3, symbols=6)
print("K_A ^ K_B       :", (keys[0] ^ keys[1]).bits())

for barrier in (True, False):
    out = run_collusion(config, keys, respect_barrier=barrier, rng=make_rng(1))
    print(f"barrier={barrier!s:<5}: target ends with {out.final_key.bits()}  "
          f"succeeded={out.succeeded} thwarted={out.thwarted}")

# %%
# The three-party baseline has no such barrier.
out = demo_collusion_sap2(8, make_rng(2))
print("baseline collusion succeeded:", out.succeeded, out.key_influence)

# %%
# Its initiators also read both other keys bit by bit.
leak = demo_privacy_leak(8, make_rng(3))
print("baseline privacy leak success rate:", leak.success_rate)
