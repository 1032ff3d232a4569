"""Seeded symbol sources, PAPR and Monte Carlo magnitude statistics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Literal, Mapping, Sequence

import numpy as np

from .core import FrameParams, SymbolGrid, TimeFrame, modulate
from .errors import SpecError, UndefinedPAPRError, VofdmError, annotate
from .precoder import NullSpec, null_bins, precode_grid, verify_nulls

__all__ = [
    "SymbolSource",
    "MagnitudeStats",
    "draw_grid",
    "papr",
    "papr_db",
    "averaged_magnitudes",
]


@dataclass(frozen=True)
class SymbolSource:
    """Deterministic symbol stream.

    ``bpsk`` draws ``+-1``, ``qpsk`` draws ``(+-1 +- 1j)/sqrt(2)``, both from
    numpy's PCG64 seeded with ``(seed, substream)``. ``explicit`` replays
    ``values`` in order and ignores the seed.
    """

    kind: Literal["bpsk", "qpsk", "explicit"] = "bpsk"
    seed: int = 0
    values: tuple = field(default=(), repr=False)

    def __post_init__(self):
        if self.kind not in ("bpsk", "qpsk", "explicit"):
            raise SpecError(f"unknown symbol source kind {self.kind!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise SpecError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        object.__setattr__(self, "values", tuple(complex(v) for v in self.values))

    def generator(self, substream: int | None = None) -> np.random.Generator:
        entropy = [int(self.seed)] if substream is None else [int(self.seed), int(substream)]
        return np.random.default_rng(np.random.SeedSequence(entropy))

    def draw(self, count: int, substream: int | None = None) -> np.ndarray:
        """First ``count`` symbols of the stream for ``substream``."""
        if self.kind == "explicit":
            if count > len(self.values):
                raise SpecError(f"explicit source holds {len(self.values)} symbols, {count} requested")
            return np.array(self.values[:count], dtype=np.complex128)
        rng = self.generator(substream)
        if self.kind == "bpsk":
            bits = rng.integers(0, 2, size=count)
            return (1.0 - 2.0 * bits).astype(np.complex128)
        bits = rng.integers(0, 2, size=(count, 2))
        return ((1.0 - 2.0 * bits[:, 0]) + 1j * (1.0 - 2.0 * bits[:, 1])) / np.sqrt(2.0)


def draw_grid(
    source: SymbolSource,
    params: FrameParams,
    zero_vectors: Iterable[int] = (),
    free_positions: Mapping[int, Sequence[int]] | None = None,
    substream: int | None = None,
) -> SymbolGrid:
    """Fill a grid from ``source``.

    Vectors in ``zero_vectors`` stay zero. A vector listed in
    ``free_positions`` gets symbols only at those positions and zeros
    elsewhere (placeholders for precoding); any other vector is filled
    completely. Symbols are consumed in ascending ``k``, then ascending ``n``.
    """
    zero = set(int(k) for k in zero_vectors)
    free_positions = {int(k): tuple(v) for k, v in (free_positions or {}).items()}
    for k in zero | set(free_positions):
        if not 0 <= k < params.N:
            raise SpecError(f"vector index {k} outside [0, {params.N})")
    slots = []
    for k in range(params.N):
        if k in zero:
            if free_positions.get(k):
                raise SpecError(f"vector {k} is both zeroed and given free positions")
            continue
        positions = free_positions.get(k, range(params.M))
        for n in sorted(set(int(n) for n in positions)):
            if not 0 <= n < params.M:
                raise SpecError(f"free position {n} of vector {k} outside [0, {params.M})")
            slots.append(k * params.M + n)
    flat = np.zeros(params.length, dtype=np.complex128)
    flat[slots] = source.draw(len(slots), substream)
    return SymbolGrid(params, flat.reshape(params.N, params.M))


def papr(frame: TimeFrame) -> float:
    """Peak power over mean power of the discrete frame (no oversampling)."""
    samples = frame.samples if isinstance(frame, TimeFrame) else np.asarray(frame, dtype=np.complex128)
    power = np.abs(samples) ** 2
    mean = float(np.mean(power)) if power.size else 0.0
    if mean == 0.0:
        raise UndefinedPAPRError("PAPR is undefined for an all-zero frame")
    return float(np.max(power)) / mean


def papr_db(frame: TimeFrame) -> float:
    return 10.0 * np.log10(papr(frame))


@dataclass(frozen=True, eq=False)
class MagnitudeStats:
    """Per-position mean of ``|x_k(n)|`` over trials and ``k_range``.

    ``max_null_magnitude`` is the largest end-to-end spectrum magnitude seen on
    any nulled bin in any trial.
    """

    per_position_mean: np.ndarray
    trials: int
    k_range: tuple[int, ...]
    max_null_magnitude: float
    mean_papr: float


def averaged_magnitudes(
    params: FrameParams,
    specs: NullSpec | Sequence[NullSpec],
    source: SymbolSource,
    trials: int,
    k_range: Iterable[int] | None = None,
    mode: Literal["exact", "min_norm"] = "exact",
) -> MagnitudeStats:
    """Monte Carlo average of precoded symbol magnitudes.

    Trial ``t`` draws a fresh grid from substream ``t`` of ``source`` with every
    position outside the precoded sets filled, precodes it, verifies the nulls
    through the full modulate/FFT path and accumulates ``|x_k(n)|`` for ``k`` in
    ``k_range`` (defaults to the vectors named by ``specs``).
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    specs = [specs] if isinstance(specs, NullSpec) else list(specs)
    ks = tuple(sorted(set(k_range))) if k_range is not None else tuple(sorted(s.k for s in specs))
    if not ks:
        raise SpecError("k_range is empty")
    for k in ks:
        params.check_k(k)
    free = {s.k: s.free_positions(params.M) for s in specs}
    bins = null_bins(specs, params)

    acc = np.zeros(params.M)
    worst = 0.0
    papr_sum = 0.0
    for t in range(trials):
        try:
            grid = draw_grid(source, params, free_positions=free, substream=t)
            grid = precode_grid(grid, specs, mode)
        except VofdmError as exc:
            raise annotate(exc, f"trial {t}", trial=t) from exc
        frame = modulate(grid)
        worst = max(worst, verify_nulls(frame, bins, 0.0).max_magnitude)
        papr_sum += papr(frame)
        acc += np.abs(grid.vectors[list(ks)]).sum(axis=0)

    means = acc / (trials * len(ks))
    return MagnitudeStats(means, trials, ks, worst, papr_sum / trials)
