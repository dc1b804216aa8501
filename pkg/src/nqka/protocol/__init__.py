"""The N-party Bell-state key agreement."""
from .engine import (
    ProtocolRun,
    ProtocolStats,
    QkaSession,
    SharedKeyResult,
    expected_key,
    run_protocol,
)
from .frames import (
    DecoyCheck,
    DecoyRecord,
    Frame,
    ProtocolFault,
    check_decoys,
    extract_messages,
    insert_decoys,
)
from .keys import SecretKey, symbol_bits, symbol_to_op, xor_keys
from .ring import (
    EarlyMeasureRejected,
    HopReport,
    MeasurementPermit,
    Phase,
    ProtocolConfig,
    RingState,
    encode_key,
    final_measure,
    measurement_barrier,
    prepare_ring,
    run_hop,
)

__all__ = [
    "DecoyCheck",
    "DecoyRecord",
    "EarlyMeasureRejected",
    "Frame",
    "HopReport",
    "MeasurementPermit",
    "Phase",
    "ProtocolConfig",
    "ProtocolFault",
    "ProtocolRun",
    "ProtocolStats",
    "QkaSession",
    "RingState",
    "SecretKey",
    "SharedKeyResult",
    "check_decoys",
    "encode_key",
    "expected_key",
    "extract_messages",
    "final_measure",
    "insert_decoys",
    "measurement_barrier",
    "prepare_ring",
    "run_hop",
    "run_protocol",
    "symbol_bits",
    "symbol_to_op",
    "xor_keys",
]
