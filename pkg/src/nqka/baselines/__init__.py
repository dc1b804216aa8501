"""Bell-pair-decoy baselines (two- and three-party) and their known flaws."""
from .demos import (
    PROTOCOLS,
    PrivacyLeak,
    decode_stage_ops,
    demo_collusion_sap2,
    demo_flip_undetected,
    demo_privacy_leak,
    predicted_flip_mask,
)
from .sap import (
    BellDecoyRecord,
    Permutation,
    SapFrame,
    SapResult,
    build_frame,
    check_bell_decoys,
    encode_stage,
    random_bits,
    run_sap1,
    run_sap2,
)

__all__ = [
    "PROTOCOLS",
    "BellDecoyRecord",
    "Permutation",
    "PrivacyLeak",
    "SapFrame",
    "SapResult",
    "build_frame",
    "check_bell_decoys",
    "decode_stage_ops",
    "demo_collusion_sap2",
    "demo_flip_undetected",
    "demo_privacy_leak",
    "encode_stage",
    "predicted_flip_mask",
    "random_bits",
    "run_sap1",
    "run_sap2",
]
