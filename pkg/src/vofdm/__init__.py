"""Discrete vector OFDM: modulation, spectrum analysis and spectral-null precoding."""

__version__ = "0.1.0"

from .core import (
    FrameParams,
    SpectrumFrame,
    SymbolGrid,
    TimeFrame,
    demodulate,
    dft_matrix,
    merge_spectrum,
    modulate,
    spectrum,
    spectrum_map,
    split_spectrum,
    twiddle,
    unitary_dft,
)
from .errors import (
    InfeasibleSpecError,
    SingularSystemError,
    SizeError,
    SpecError,
    UndefinedPAPRError,
    VofdmError,
)
from .precoder import (
    DftPartition,
    NullReport,
    NullSpec,
    PrecodeSolution,
    build_system,
    null_bins,
    partition,
    precode,
    precode_grid,
    verify_nulls,
)
from .simkit import MagnitudeStats, SymbolSource, averaged_magnitudes, draw_grid, papr, papr_db
