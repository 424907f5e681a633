"""Fixed-point chaotic masking link: Python bindings."""

from ._chaoslink import (
    __version__,
    Calibration,
    BitTrialResult,
    LinkConfig,
    BerPoint,
    quantize,
    dequantize,
    to_bitword,
    from_bitword,
    simulate,
    run_sync,
    settling_time,
    calibrate,
    random_bits,
    run_bits,
    sweep,
)

__all__ = [
    "__version__",
    "Calibration",
    "BitTrialResult",
    "LinkConfig",
    "BerPoint",
    "quantize",
    "dequantize",
    "to_bitword",
    "from_bitword",
    "simulate",
    "run_sync",
    "settling_time",
    "calibrate",
    "random_bits",
    "run_bits",
    "sweep",
]
