"""Vector OFDM frame construction and discrete spectrum analysis.

Conventions used throughout the package:

* A symbol grid holds ``N`` vectors ``x_k`` of length ``M`` as an ``(N, M)``
  complex array, row ``k`` being ``x_k``.
* The time frame is block interleaved, ``X[n2 * M + n1] = X_{n2}(n1)``.
* The spectrum is stride interleaved, ``y[k1 * N + k2] = y_{k2}(k1)``, so the
  components of ``y_k`` sit at flat bins ``k, k + N, ..., k + (M - 1) N``.
* Every DFT is unitary (``1/sqrt(K)`` in both directions).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import numpy as np

from .errors import SizeError

__all__ = [
    "FrameParams",
    "SymbolGrid",
    "TimeFrame",
    "SpectrumFrame",
    "unitary_dft",
    "dft_matrix",
    "twiddle",
    "modulate",
    "demodulate",
    "spectrum",
    "split_spectrum",
    "merge_spectrum",
    "spectrum_map",
]


def _as_complex(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite samples")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FrameParams:
    """Vector size ``M`` and IFFT size ``N`` of a VOFDM frame."""

    M: int
    N: int

    def __post_init__(self):
        for name in ("M", "N"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise SizeError(f"{name} must be an integer, got {value!r}")
            if value < 1:
                raise SizeError(f"{name} must be >= 1, got {value}")
            object.__setattr__(self, name, int(value))

    @property
    def length(self) -> int:
        return self.M * self.N

    def check_k(self, k: int) -> int:
        if not 0 <= k < self.N:
            raise IndexError(f"vector index k={k} outside [0, {self.N})")
        return int(k)


@dataclass(frozen=True, eq=False)
class SymbolGrid:
    """The ``N`` information symbol vectors, stored as an ``(N, M)`` array."""

    params: FrameParams
    vectors: np.ndarray

    def __post_init__(self):
        arr = _as_complex(self.vectors, "symbol grid")
        shape = (self.params.N, self.params.M)
        if arr.shape != shape:
            raise SizeError(f"symbol grid has shape {arr.shape}, expected (N, M) = {shape}")
        object.__setattr__(self, "vectors", arr)

    @classmethod
    def zeros(cls, params: FrameParams) -> "SymbolGrid":
        return cls(params, np.zeros((params.N, params.M), dtype=np.complex128))

    def vector(self, k: int) -> np.ndarray:
        return self.vectors[self.params.check_k(k)]

    def with_vector(self, k: int, x) -> "SymbolGrid":
        """Copy of the grid with row ``k`` replaced by ``x``."""
        arr = np.array(self.vectors)
        arr[self.params.check_k(k)] = x
        return SymbolGrid(self.params, arr)

    def flat(self) -> np.ndarray:
        """Vectors laid end to end, ``x_k(n)`` at flat index ``k * M + n``."""
        return self.vectors.reshape(-1)

    def energy(self) -> float:
        return float(np.vdot(self.vectors, self.vectors).real)


@dataclass(frozen=True, eq=False)
class TimeFrame:
    """Length ``M*N`` VOFDM signal in block layout."""

    params: FrameParams
    samples: np.ndarray

    def __post_init__(self):
        arr = _as_complex(self.samples, "time frame")
        if arr.shape != (self.params.length,):
            raise SizeError(
                f"time frame has shape {arr.shape}, expected ({self.params.length},) "
                f"for (M, N) = ({self.params.M}, {self.params.N})"
            )
        object.__setattr__(self, "samples", arr)

    def block(self, n: int) -> np.ndarray:
        """The length-``M`` block ``X_n``."""
        self.params.check_k(n)
        M = self.params.M
        return self.samples[n * M:(n + 1) * M]

    def energy(self) -> float:
        return float(np.vdot(self.samples, self.samples).real)


@dataclass(frozen=True, eq=False)
class SpectrumFrame:
    """Length ``M*N`` discrete spectrum in stride layout."""

    params: FrameParams
    bins: np.ndarray

    def __post_init__(self):
        arr = _as_complex(self.bins, "spectrum")
        if arr.shape != (self.params.length,):
            raise SizeError(
                f"spectrum has shape {arr.shape}, expected ({self.params.length},) "
                f"for (M, N) = ({self.params.M}, {self.params.N})"
            )
        object.__setattr__(self, "bins", arr)

    def energy(self) -> float:
        return float(np.vdot(self.bins, self.bins).real)


def unitary_dft(v, direction: Literal["forward", "inverse"] = "forward") -> np.ndarray:
    """Unitary DFT of ``v`` along its last axis.

    The forward kernel is ``exp(-2j*pi*n*k/K) / sqrt(K)`` and the inverse kernel
    its conjugate. Any length ``K >= 1`` is accepted.
    """
    arr = np.asarray(v, dtype=np.complex128)
    if arr.ndim == 0 or arr.shape[-1] == 0:
        raise SizeError("DFT input must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError("DFT input contains non-finite samples")
    if direction == "forward":
        return np.fft.fft(arr, norm="ortho")
    if direction == "inverse":
        return np.fft.ifft(arr, norm="ortho")
    raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")


@lru_cache(maxsize=64)
def dft_matrix(K: int) -> np.ndarray:
    """Unitary ``K x K`` DFT matrix, entry ``[m, n] = W_K^(m n) / sqrt(K)``.

    The result is cached and read-only.
    """
    if K < 1:
        raise SizeError(f"DFT size must be >= 1, got {K}")
    idx = np.arange(K)
    # reduce the exponent mod K before scaling to keep the phase exact
    W = np.exp(-2j * np.pi * (np.outer(idx, idx) % K) / K) / np.sqrt(K)
    W.setflags(write=False)
    return W


def twiddle(k: int, params: FrameParams) -> np.ndarray:
    """Per-entry modulation ``W_{MN}^(n k)`` for ``n = 0..M-1``."""
    n = np.arange(params.M)
    return np.exp(-2j * np.pi * ((n * k) % params.length) / params.length)


def modulate(grid: SymbolGrid) -> TimeFrame:
    """Run an ``N``-point unitary IDFT across ``k`` for every component ``m``.

    Column ``m`` of the grid is transformed independently; row ``n`` of the
    result is the block ``X_n`` and rows are concatenated in order.
    """
    if not isinstance(grid, SymbolGrid):
        raise TypeError(f"expected SymbolGrid, got {type(grid).__name__}")
    blocks = np.fft.ifft(grid.vectors, axis=0, norm="ortho")
    return TimeFrame(grid.params, blocks.reshape(-1))


def demodulate(frame: TimeFrame) -> SymbolGrid:
    """Inverse of :func:`modulate`."""
    if not isinstance(frame, TimeFrame):
        raise TypeError(f"expected TimeFrame, got {type(frame).__name__}")
    p = frame.params
    blocks = frame.samples.reshape(p.N, p.M)
    return SymbolGrid(p, np.fft.fft(blocks, axis=0, norm="ortho"))


def spectrum(frame: TimeFrame) -> SpectrumFrame:
    """Unitary ``MN``-point DFT of the whole frame."""
    if not isinstance(frame, TimeFrame):
        raise TypeError(f"expected TimeFrame, got {type(frame).__name__}")
    return SpectrumFrame(frame.params, np.fft.fft(frame.samples, norm="ortho"))


def split_spectrum(s: SpectrumFrame, k: int) -> np.ndarray:
    """Spectrum vector ``y_k``, i.e. bins ``k, k+N, ..., k+(M-1)N``."""
    k = s.params.check_k(k)
    return s.bins[k::s.params.N].copy()


def merge_spectrum(vectors, params: FrameParams) -> SpectrumFrame:
    """Interleave spectrum vectors (an ``(N, M)`` array, row ``k`` = ``y_k``)."""
    arr = np.asarray(vectors, dtype=np.complex128)
    if arr.shape != (params.N, params.M):
        raise SizeError(f"spectrum vectors have shape {arr.shape}, expected {(params.N, params.M)}")
    return SpectrumFrame(params, arr.T.reshape(-1))


def spectrum_map(x, k: int, params: FrameParams) -> np.ndarray:
    """Spectrum vector ``y_k`` computed straight from the symbol vector ``x_k``.

    ``y_k`` is the unitary ``M``-point DFT of ``x_k(n) * W_{MN}^(n k)``, so it
    needs neither the IFFT across vectors nor the full ``MN``-point FFT.
    """
    k = params.check_k(k)
    x = np.asarray(x, dtype=np.complex128)
    if x.shape != (params.M,):
        raise SizeError(f"symbol vector has shape {x.shape}, expected ({params.M},)")
    return unitary_dft(x * twiddle(k, params))
