"""Wire attacks and insider collusion against the key agreement."""
from .collusion import AttackOutcome, run_collusion
from .models import (
    HONEST,
    AttackModel,
    Collusion,
    Flip,
    Honest,
    InterceptResend,
    flip_key_influence,
    intercept,
)
from .montecarlo import DetectionEstimate, estimate_hop_detection

__all__ = [
    "HONEST",
    "AttackModel",
    "AttackOutcome",
    "Collusion",
    "DetectionEstimate",
    "Flip",
    "Honest",
    "InterceptResend",
    "estimate_hop_detection",
    "flip_key_influence",
    "intercept",
    "run_collusion",
]
