"""
Attacks on the wire
===================

Single-photon decoys catch a flip attack with probability 1 - (1/2)^n per
transmission.  Bell-pair decoys, used by the older baselines, miss it.
"""

from nqka import analysis
from nqka.adversary import Flip, InterceptResend, estimate_hop_detection
from nqka.baselines import demo_flip_undetected
from nqka.rng import make_rng

n = 8
for attack in (Flip("X"), Flip("Z"), Flip("Y"), InterceptResend("random")):
    est = estimate_hop_detection(attack, symbols=n, trials=2000, seed=1)
    theory = analysis.detection_probability(attack, "single_photon", n)
    print(f"{attack.spec():<17} measured {est.rate:.4f}  analytic {theory:.4f}")

# %%
# The same flip against the baselines.
rng = make_rng(3)
for protocol in ("sap1", "sap2"):
    for op in ("X", "Z"):
        out = demo_flip_undetected(protocol, op, n, rng)
        flipped = [f.astype(int).tolist() for f in out.key_influence["flipped"]]
        print(f"{protocol} {op}: detected={out.detected} flipped bits per party={flipped}")
        print("   single-photon decoys would have caught it:", out.key_influence["single_photon_detected"])
