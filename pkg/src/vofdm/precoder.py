"""Per-vector precoding that forces chosen spectrum components to zero.

For a vector index ``k`` the spectrum vector satisfies ``y_k = W_M @ xh`` with
``xh = x_k * W_{MN}^(n k)``. Forcing ``y_k(m) = 0`` for every ``m`` in the null
set ``Z`` while solving for the entries of ``x_k`` listed in ``P`` gives

    W_M[Z, P] @ xh[P] = -W_M[Z, F] @ xh[F],        F = complement of P,

which is solved for ``xh[P]`` and then de-twiddled back to ``x_k[P]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Literal, Mapping, Sequence

import numpy as np

from .core import (
    FrameParams,
    SymbolGrid,
    TimeFrame,
    dft_matrix,
    modulate,
    spectrum,
    spectrum_map,
    twiddle,
)
from .errors import InfeasibleSpecError, SingularSystemError, SpecError, VofdmError, annotate

__all__ = [
    "CONDITION_LIMIT",
    "NullSpec",
    "DftPartition",
    "LinearSystem",
    "PrecodeSolution",
    "NullReport",
    "partition",
    "build_system",
    "precode",
    "precode_grid",
    "null_bins",
    "verify_nulls",
]

CONDITION_LIMIT = 1e12
RESIDUAL_TOL = 1e-10


def _positions(values, name: str) -> tuple[int, ...]:
    out = tuple(int(v) for v in values)
    if any(b <= a for a, b in zip(out, out[1:])):
        raise SpecError(f"{name} must be strictly increasing, got {list(out)}")
    return out


@dataclass(frozen=True)
class NullSpec:
    """Which components of ``y_k`` are nulled and which entries of ``x_k`` are solved.

    ``precode_positions`` defaults to ``null_positions``.
    """

    k: int
    null_positions: tuple[int, ...]
    precode_positions: tuple[int, ...] | None = None

    def __post_init__(self):
        z = _positions(self.null_positions, "null_positions")
        p = z if self.precode_positions is None else _positions(self.precode_positions, "precode_positions")
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "null_positions", z)
        object.__setattr__(self, "precode_positions", p)
        if len(p) < len(z):
            raise InfeasibleSpecError(
                f"k={self.k}: {len(p)} precoded entries cannot force {len(z)} nulls"
            )

    @classmethod
    def trailing(cls, k: int, M: int, nulls: int, precoded: int | None = None) -> "NullSpec":
        """Null the last ``nulls`` components of ``y_k`` using the last ``precoded`` entries."""
        precoded = nulls if precoded is None else precoded
        if not 0 <= nulls <= M or not 0 <= precoded <= M:
            raise SpecError(f"trailing sizes ({nulls}, {precoded}) invalid for M={M}")
        return cls(k, tuple(range(M - nulls, M)), tuple(range(M - precoded, M)))

    def validate(self, params: FrameParams) -> None:
        if not 0 <= self.k < params.N:
            raise SpecError(f"k={self.k} outside [0, {params.N})")
        for name in ("null_positions", "precode_positions"):
            pos = getattr(self, name)
            if pos and (pos[0] < 0 or pos[-1] >= params.M):
                raise SpecError(f"k={self.k}: {name} {list(pos)} outside [0, {params.M})")

    def free_positions(self, M: int) -> tuple[int, ...]:
        p = set(self.precode_positions)
        return tuple(n for n in range(M) if n not in p)


@dataclass(frozen=True, eq=False)
class DftPartition:
    """Column split of ``W_M`` by the precoded set and of ``I_M`` by the null set.

    ``W2`` holds the columns of ``W_M`` in ``P`` and ``I2`` the columns of the
    identity in ``Z``; ``W1`` and ``I1`` hold the rest.
    """

    W1: np.ndarray
    W2: np.ndarray
    I1: np.ndarray
    I2: np.ndarray


def partition(spec: NullSpec, M: int) -> DftPartition:
    W = dft_matrix(M)
    eye = np.eye(M, dtype=np.complex128)
    P = list(spec.precode_positions)
    Z = list(spec.null_positions)
    F = [n for n in range(M) if n not in set(P)]
    kept = [m for m in range(M) if m not in set(Z)]
    return DftPartition(W[:, F], W[:, P], eye[:, kept], eye[:, Z])


@dataclass(frozen=True, eq=False)
class LinearSystem:
    """``A @ xh[P] = rhs_map(x[F])`` for one null spec.

    ``rhs_map`` takes the information symbols at the free positions (ascending)
    and applies the twiddle internally.
    """

    A: np.ndarray
    rhs_map: Callable[[np.ndarray], np.ndarray]
    free_positions: tuple[int, ...]
    twiddle: np.ndarray


def build_system(spec: NullSpec, params: FrameParams) -> LinearSystem:
    spec.validate(params)
    if not spec.null_positions:
        raise SpecError(f"k={spec.k}: empty null set has no system to build")
    W = dft_matrix(params.M)
    Z = list(spec.null_positions)
    P = list(spec.precode_positions)
    F = list(spec.free_positions(params.M))
    tw = twiddle(spec.k, params)
    A = W[np.ix_(Z, P)]
    B = W[np.ix_(Z, F)]
    tw_free = tw[F]

    def rhs_map(info_free) -> np.ndarray:
        info_free = np.asarray(info_free, dtype=np.complex128)
        if info_free.shape != (len(F),):
            raise SpecError(f"expected {len(F)} free symbols, got shape {info_free.shape}")
        return -(B @ (info_free * tw_free))

    return LinearSystem(A, rhs_map, tuple(F), tw)


@dataclass(frozen=True, eq=False)
class PrecodeSolution:
    """Outcome of :func:`precode`.

    Attributes:
        full_x: The complete symbol vector ``x_k``.
        predicted_y: ``y_k`` for ``full_x`` via the direct map.
        realized_y_free: ``predicted_y`` at the non-nulled positions.
        residual: Largest ``|y_k(m)|`` over the null set.
        condition_estimate: 2-norm condition number of the solved system
            (1.0 when nothing had to be solved).
        used_min_norm: Whether the minimum-norm solver produced the entries.
    """

    spec: NullSpec
    full_x: np.ndarray
    predicted_y: np.ndarray
    realized_y_free: np.ndarray
    residual: float
    condition_estimate: float
    used_min_norm: bool

    @property
    def solved(self) -> np.ndarray:
        return self.full_x[list(self.spec.precode_positions)]

    @property
    def solved_energy(self) -> float:
        s = self.solved
        return float(np.vdot(s, s).real)


def _condition(A: np.ndarray) -> float:
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[-1] == 0.0:
        return float("inf")
    return float(sv[0] / sv[-1])


def _gather_info(info, spec: NullSpec, M: int) -> np.ndarray:
    """Full-length vector with information symbols at free positions, zero elsewhere."""
    free = spec.free_positions(M)
    x = np.zeros(M, dtype=np.complex128)
    if isinstance(info, Mapping):
        keys = set(int(n) for n in info)
        if keys != set(free):
            raise SpecError(
                f"k={spec.k}: info must cover exactly positions {list(free)}, got {sorted(keys)}"
            )
        for n in free:
            x[n] = info[n]
    else:
        arr = np.asarray(info, dtype=np.complex128)
        if arr.shape != (M,):
            raise SpecError(f"k={spec.k}: info vector has shape {arr.shape}, expected ({M},)")
        x[list(free)] = arr[list(free)]
    if not np.all(np.isfinite(x)):
        raise ValueError(f"k={spec.k}: info contains non-finite symbols")
    return x


def precode(
    info,
    spec: NullSpec,
    params: FrameParams,
    mode: Literal["exact", "min_norm"] = "exact",
) -> PrecodeSolution:
    """Solve for the entries of ``x_k`` at ``spec.precode_positions``.

    Args:
        info: Either a mapping from every free position to its symbol, or a
            length-``M`` vector whose entries at precoded positions are
            placeholders and ignored.
        spec: Null and precode position sets for vector ``spec.k``.
        params: Frame parameters.
        mode: ``"exact"`` needs a square system; ``"min_norm"`` accepts more
            unknowns than nulls and returns the minimum-energy solution.

    Raises:
        InfeasibleSpecError: ``exact`` mode with ``|P| != |Z|``.
        SingularSystemError: Condition estimate above ``CONDITION_LIMIT``.
    """
    if mode not in ("exact", "min_norm"):
        raise ValueError(f"mode must be 'exact' or 'min_norm', got {mode!r}")
    spec.validate(params)
    M = params.M
    x = _gather_info(info, spec, M)
    Z = list(spec.null_positions)
    P = list(spec.precode_positions)

    if not Z:
        cond = 1.0
    else:
        if mode == "exact" and len(P) != len(Z):
            raise InfeasibleSpecError(
                f"k={spec.k}: exact mode needs |P| == |Z|, got {len(P)} and {len(Z)}"
            )
        system = build_system(spec, params)
        cond = _condition(system.A)
        if not cond <= CONDITION_LIMIT:
            raise SingularSystemError(
                f"k={spec.k}: nulling system is rank deficient (condition {cond:.3g})", cond
            )
        rhs = system.rhs_map(x[list(system.free_positions)])
        if mode == "exact":
            xh = np.linalg.solve(system.A, rhs)
        else:
            xh = np.linalg.lstsq(system.A, rhs, rcond=None)[0]
        x[P] = xh / system.twiddle[P]

    y = spectrum_map(x, spec.k, params)
    residual = float(np.max(np.abs(y[Z]))) if Z else 0.0
    bound = RESIDUAL_TOL * (1.0 + float(np.linalg.norm(x)))
    if residual > bound:
        raise VofdmError(
            f"k={spec.k}: null residual {residual:.3g} exceeds {bound:.3g} (condition {cond:.3g})"
        )
    kept = [m for m in range(M) if m not in set(Z)]
    x.setflags(write=False)
    return PrecodeSolution(
        spec=spec,
        full_x=x,
        predicted_y=y,
        realized_y_free=y[kept],
        residual=residual,
        condition_estimate=cond,
        used_min_norm=bool(Z) and mode == "min_norm",
    )


def precode_grid(
    grid: SymbolGrid,
    specs: Sequence[NullSpec],
    mode: Literal["exact", "min_norm"] = "exact",
) -> SymbolGrid:
    """Precode every vector named in ``specs``; other vectors pass through."""
    seen = set()
    for spec in specs:
        if spec.k in seen:
            raise SpecError(f"more than one null spec for k={spec.k}")
        seen.add(spec.k)
    if not specs:
        return grid
    out = np.array(grid.vectors)
    for spec in specs:
        try:
            spec.validate(grid.params)
            sol = precode(grid.vectors[spec.k], spec, grid.params, mode)
        except VofdmError as exc:
            raise annotate(exc, f"precoding vector k={spec.k}", k=spec.k) from exc
        out[spec.k] = sol.full_x
    return SymbolGrid(grid.params, out)


def null_bins(specs: Sequence[NullSpec], params: FrameParams) -> list[int]:
    """Flat spectrum indices ``m * N + k`` nulled by ``specs``, ascending."""
    return sorted(m * params.N + s.k for s in specs for m in s.null_positions)


@dataclass(frozen=True)
class NullReport:
    max_magnitude: float
    tol: float
    passed: bool
    count: int


def verify_nulls(frame: TimeFrame, flat_indices, tol: float) -> NullReport:
    """Check the spectrum of ``frame`` is at most ``tol`` at every listed bin."""
    idx = np.asarray(sorted(set(int(i) for i in flat_indices)), dtype=np.int64)
    L = frame.params.length
    if idx.size and (idx[0] < 0 or idx[-1] >= L):
        raise IndexError(f"flat indices must lie in [0, {L})")
    if idx.size == 0:
        return NullReport(0.0, tol, True, 0)
    bins = spectrum(frame).bins
    peak = float(np.max(np.abs(bins[idx])))
    return NullReport(peak, tol, peak <= tol, int(idx.size))


def precoded_frame(grid: SymbolGrid, specs: Sequence[NullSpec], mode="exact") -> TimeFrame:
    """Shorthand for ``modulate(precode_grid(grid, specs, mode))``."""
    return modulate(precode_grid(grid, specs, mode))
