"""Empirical detection rates for wire attacks on the N-party protocol."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..protocol import ProtocolConfig, run_protocol
from ..rng import trial_rng
from .models import AttackModel


@dataclass(frozen=True)
class DetectionEstimate:
    attacked_hops: int
    detected_hops: int

    @property
    def rate(self) -> float:
        return self.detected_hops / self.attacked_hops if self.attacked_hops else 0.0

    def sigma(self, p: float) -> float:
        """Binomial standard error of the rate at true probability ``p``."""
        return float(np.sqrt(p * (1 - p) / self.attacked_hops)) if self.attacked_hops else 0.0


def estimate_hop_detection(
    attack: AttackModel,
    *,
    parties: int = 3,
    symbols: int = 8,
    trials: int = 10_000,
    seed: int = 0,
    max_restarts: int = 0,
) -> DetectionEstimate:
    """Pool every attacked decoy check over ``trials`` protocol runs.

    Each check is an independent trial, so the pooled ratio estimates the
    per-hop detection probability even though runs stop at the first
    detection when ``max_restarts`` is 0.
    """
    attacked = detected = 0
    config = ProtocolConfig(parties=parties, symbols=symbols, seed=seed, max_restarts=max_restarts)
    for i in range(trials):
        run = run_protocol(config, "random", attack, rng=trial_rng(seed, i))
        attacked += run.stats.attacked_hops
        detected += run.stats.attacked_detections
    return DetectionEstimate(attacked, detected)
