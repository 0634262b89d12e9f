"""Zak-OTFS link simulator and structured-sparse receiver.

Delay-Doppler frames are complex (M, N) numpy arrays indexed [k, l];
time signals and equalizer vectors are flat complex arrays of length M*N
in l*M + k order.
"""

from ._zakotfs import (
    ConfigError,
    DimensionError,
    DominantPath,
    EmptyChannelError,
    Equalizer,
    GridConfig,
    Modulation,
    NumericalError,
    OtfsError,
    PathSpec,
    SparseChannel,
    add_awgn,
    apply_channel,
    cga_equalize,
    dense_hdd,
    detect_paths,
    draw_veha,
    dzt,
    dzt_gemm,
    estimate_heff,
    forward_index,
    ground_truth_heff,
    hard_demod,
    idzt,
    inverse_index,
    lmmse_equalize,
    make_pilot_frame,
    modulate,
    oracle_check,
    simulate,
    throughput_mbps,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
