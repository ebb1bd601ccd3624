"""Multi-span WDM fiber transmission simulation."""
from .link import RxResult, bitwise_gmi, power_sweep, receiver_dsp, run_link
from .params import FiberParams, LinkConfig, dump_config, load_config
from .signal import (
    PropagationError,
    edfa,
    matched_filter,
    propagate_span,
    rrc_shape,
    rrc_taps,
    wdm_demux,
    wdm_mux,
)

__all__ = [
    "FiberParams",
    "LinkConfig",
    "RxResult",
    "PropagationError",
    "bitwise_gmi",
    "dump_config",
    "edfa",
    "load_config",
    "matched_filter",
    "power_sweep",
    "propagate_span",
    "receiver_dsp",
    "rrc_shape",
    "rrc_taps",
    "run_link",
    "wdm_demux",
    "wdm_mux",
]
