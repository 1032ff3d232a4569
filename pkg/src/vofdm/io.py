"""CSV / JSON serialization of grids, frames and spectra.

CSV files have the header ``flat_index,re,im,magnitude``. JSON files wrap the
same rows in an envelope::

    {"kind": "symbols" | "time" | "spectrum",
     "params": {"M": ..., "N": ...},
     "layout": "block" | "stride",
     "data": [{"flat_index": ..., "re": ..., "im": ..., "magnitude": ...}, ...]}

Symbol grids use flat index ``k * M + n``. Floats are written with 17
significant digits so they read back bit-exact.
"""

from __future__ import annotations

import csv
import io as _io
import json
from pathlib import Path
from typing import Union

import numpy as np

from .core import FrameParams, SpectrumFrame, SymbolGrid, TimeFrame
from .errors import SizeError, VofdmError

Frame = Union[SymbolGrid, TimeFrame, SpectrumFrame]

CSV_HEADER = ["flat_index", "re", "im", "magnitude"]
LAYOUTS = {"symbols": "block", "time": "block", "spectrum": "stride"}


class ParseError(VofdmError, ValueError):
    """Malformed input file."""


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _kind_and_values(obj: Frame) -> tuple[str, np.ndarray]:
    if isinstance(obj, SymbolGrid):
        return "symbols", obj.flat()
    if isinstance(obj, TimeFrame):
        return "time", obj.samples
    if isinstance(obj, SpectrumFrame):
        return "spectrum", obj.bins
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _wrap(kind: str, params: FrameParams, values: np.ndarray) -> Frame:
    if kind == "symbols":
        return SymbolGrid(params, values.reshape(params.N, params.M))
    if kind == "time":
        return TimeFrame(params, values)
    if kind == "spectrum":
        return SpectrumFrame(params, values)
    raise ParseError(f"unknown kind {kind!r}")


def dumps_csv(values) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for i, v in enumerate(np.asarray(values, dtype=np.complex128)):
        writer.writerow([i, fmt(v.real), fmt(v.imag), fmt(abs(v))])
    return buf.getvalue()


def dumps_json(obj: Frame) -> str:
    kind, values = _kind_and_values(obj)
    doc = {
        "kind": kind,
        "params": {"M": obj.params.M, "N": obj.params.N},
        "layout": LAYOUTS[kind],
        "data": [
            {"flat_index": i, "re": float(v.real), "im": float(v.imag), "magnitude": float(abs(v))}
            for i, v in enumerate(values)
        ],
    }
    # json uses repr() for floats, which round-trips exactly
    return json.dumps(doc, indent=1) + "\n"


def guess_format(path: Path, fmt_hint: str | None = None) -> str:
    if fmt_hint:
        return fmt_hint
    return "json" if Path(path).suffix.lower() == ".json" else "csv"


def save(obj: Frame, path, fmt_hint: str | None = None) -> Path:
    path = Path(path)
    text = dumps_json(obj) if guess_format(path, fmt_hint) == "json" else dumps_csv(_kind_and_values(obj)[1])
    path.write_text(text)
    return path


def parse_csv(text: str, source: str = "<csv>") -> np.ndarray:
    """Complex values from ``flat_index,re,im[,magnitude]`` rows, ordered by index."""
    rows = list(csv.reader(_io.StringIO(text)))
    if not rows or [c.strip() for c in rows[0][:3]] != CSV_HEADER[:3]:
        raise ParseError(f"{source}:1: expected header {','.join(CSV_HEADER)}")
    values = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) < 3:
            raise ParseError(f"{source}:{lineno}: expected at least 3 columns, got {len(row)}")
        try:
            idx = int(row[0])
            val = complex(float(row[1]), float(row[2]))
        except ValueError as exc:
            raise ParseError(f"{source}:{lineno}: {exc}") from None
        if idx in values:
            raise ParseError(f"{source}:{lineno}: duplicate flat_index {idx}")
        values[idx] = val
    if sorted(values) != list(range(len(values))):
        raise ParseError(f"{source}: flat indices must cover 0..{len(values) - 1} without gaps")
    return np.array([values[i] for i in range(len(values))], dtype=np.complex128)


def resolve_params(length: int, M: int | None, N: int | None) -> FrameParams:
    if M is None and N is None:
        raise SizeError("CSV input carries no frame parameters; pass --m and/or --n")
    if M is None:
        M = length // N if N and length % N == 0 else None
    if N is None:
        N = length // M if M and length % M == 0 else None
    if M is None or N is None or M * N != length:
        raise SizeError(f"{length} values do not form a frame with (M, N) = ({M}, {N})")
    return FrameParams(M, N)


def load(path, kind: str | None = None, M: int | None = None, N: int | None = None,
         fmt_hint: str | None = None) -> Frame:
    """Read a file written by :func:`save`.

    JSON envelopes carry their own kind and parameters (``M``/``N``, when given,
    must agree). CSV needs ``kind`` and at least one of ``M``/``N``.
    """
    path = Path(path)
    text = path.read_text()
    if guess_format(path, fmt_hint) == "json":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}:{exc.lineno}: {exc.msg}") from None
        try:
            file_kind = doc["kind"]
            params = FrameParams(int(doc["params"]["M"]), int(doc["params"]["N"]))
            rows = sorted(doc["data"], key=lambda r: r["flat_index"])
            values = np.array([complex(r["re"], r["im"]) for r in rows], dtype=np.complex128)
            indices = [r["flat_index"] for r in rows]
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"{path}: malformed envelope ({exc})") from None
        if indices != list(range(len(indices))):
            raise ParseError(f"{path}: flat indices must cover 0..{len(indices) - 1}")
        if doc.get("layout") != LAYOUTS.get(file_kind):
            raise ParseError(f"{path}: layout {doc.get('layout')!r} does not match kind {file_kind!r}")
        if kind is not None and file_kind != kind:
            raise ParseError(f"{path}: expected {kind} data, file holds {file_kind}")
        if (M is not None and M != params.M) or (N is not None and N != params.N):
            raise SizeError(f"{path}: file has (M, N) = ({params.M}, {params.N}), expected ({M}, {N})")
        return _wrap(file_kind, params, values)

    if kind is None:
        raise ParseError(f"{path}: CSV input needs an explicit kind")
    values = parse_csv(text, str(path))
    return _wrap(kind, resolve_params(len(values), M, N), values)
