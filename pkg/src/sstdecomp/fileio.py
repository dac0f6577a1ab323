"""CSV, binary and JSON outputs, and the CSV signal reader."""

from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .reconstruct import Decomposition
from .synth import SampledSignal

UNIFORM_RTOL = 1e-9


class InputFormatError(ValueError):
    """Malformed or unusable input file."""


class MissingTauError(InputFormatError):
    """Single-column input without a sampling interval."""


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def write_csv(path, header: Sequence[str], columns: Sequence) -> Path:
    """Write equal-length columns with a header row; floats keep 17 significant digits."""
    cols = [np.asarray(c) for c in columns]
    if len(cols) != len(header):
        raise ValueError("header and column counts differ")
    if len({c.size for c in cols}) > 1:
        raise ValueError("columns have different lengths")
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*cols):
            w.writerow([_fmt(v) for v in row])
    return path


def read_table(path) -> tuple[list[str], np.ndarray]:
    """Header and float matrix of a CSV file; errors name the offending row."""
    path = Path(path)
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise InputFormatError(f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise InputFormatError(f"{path}: empty file") from None
        if not header or any(_is_number(h) for h in header):
            raise InputFormatError(f"{path}: row 1 must be a header row")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise InputFormatError(f"{path}: row {lineno} has {len(row)} fields, expected {len(header)}")
            try:
                rows.append([float(c) for c in row])
            except ValueError:
                raise InputFormatError(f"{path}: row {lineno} has a non-numeric field") from None
    if not rows:
        raise InputFormatError(f"{path}: no data rows")
    return header, np.array(rows, dtype=float)


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def read_signal(path, tau: float | None = None) -> SampledSignal:
    """Load a signal from ``(t, value)`` columns or a single ``value`` column.

    With a time column the spacing must be uniform to 1e-9 relative and
    ``tau`` is inferred (an explicit ``tau`` must agree). A single column
    needs ``tau``. Files written by ``synth`` (``index, t, y``) are accepted.
    """
    header, data = read_table(path)
    lower = [h.lower() for h in header]
    if len(header) == 1:
        if tau is None:
            raise MissingTauError(f"{path}: single-column input needs --tau")
        values, times = data[:, 0], None
    else:
        if "t" not in lower:
            raise InputFormatError(f"{path}: multi-column input needs a 't' column")
        tcol = lower.index("t")
        vcol = next((lower.index(k) for k in ("y", "value") if k in lower), None)
        if vcol is None:
            rest = [i for i in range(len(header)) if i != tcol and lower[i] != "index"]
            if len(rest) != 1:
                raise InputFormatError(f"{path}: cannot tell which column holds the values")
            vcol = rest[0]
        values, times = data[:, vcol], data[:, tcol]
    if values.size < 2:
        raise InputFormatError(f"{path}: need at least two samples")
    if not np.all(np.isfinite(values)):
        bad = int(np.flatnonzero(~np.isfinite(values))[0])
        raise InputFormatError(f"{path}: row {bad + 2} has a non-finite value")
    if times is None:
        return SampledSignal(values, float(tau))
    steps = np.diff(times)
    step = (times[-1] - times[0]) / (times.size - 1)
    if not step > 0:
        raise InputFormatError(f"{path}: time column must increase")
    bad = np.flatnonzero(np.abs(steps - step) > UNIFORM_RTOL * abs(step))
    if bad.size:
        raise InputFormatError(f"{path}: non-uniform time spacing at row {int(bad[0]) + 3}")
    if tau is not None and abs(tau - step) > UNIFORM_RTOL * step:
        raise InputFormatError(f"{path}: --tau {tau} disagrees with the time column spacing {step}")
    return SampledSignal(values, step, t0=float(times[0] - step))


def write_signal(path, signal: SampledSignal) -> Path:
    n = len(signal)
    return write_csv(path, ["index", "t", "y"], [np.arange(1, n + 1), signal.times, signal.values])


def decomposition_columns(dec: Decomposition, times: np.ndarray) -> tuple[list[str], list[np.ndarray]]:
    n = dec.y.size
    header = ["index", "t", "y", "trend"]
    cols = [np.arange(1, n + 1), times, dec.y, dec.trend]
    for key, attr in (("comp", "values"), ("am", "am"), ("if", "inst_freq"), ("phase", "phase")):
        for k, comp in enumerate(dec.components, start=1):
            header.append(f"{key}_{k}")
            cols.append(getattr(comp, attr))
    header.append("residual")
    cols.append(dec.residual)
    return header, cols


def write_decomposition(path, dec: Decomposition, times: np.ndarray) -> Path:
    header, cols = decomposition_columns(dec, times)
    return write_csv(path, header, cols)


def write_sst(path, dec: Decomposition) -> tuple[Path, Path]:
    """Squeezed field as little-endian complex64, time-major (N' rows of n_xi bins), plus a JSON sidecar."""
    if dec.sst is None or dec.cwt is None:
        raise ValueError("decomposition carries no SST field")
    path = Path(path)
    data = np.ascontiguousarray(dec.sst.s.T).astype("<c8")
    data.tofile(path)
    field = dec.cwt
    meta = {
        "file": path.name,
        "dtype": "complex64",
        "byte_order": "little",
        "layout": "row-major, rows = padded time, columns = frequency bin",
        "shape": [int(field.n_padded), int(dec.sst.freq.n_bins)],
        "tau": field.tau,
        "delta_xi": dec.sst.freq.delta_xi,
        "first_bin_frequency": dec.sst.freq.delta_xi,
        "gamma": dec.gamma,
        "offset": int(field.offset),
        "n_original": int(field.n_original),
        "n_voices": int(field.grid.n_voices),
        "scales": field.grid.scales.tolist(),
    }
    side = path.with_suffix(".json")
    side.write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    return path, side


def read_sst(path) -> tuple[np.ndarray, dict]:
    path = Path(path)
    meta = json.loads(path.with_suffix(".json").read_text(encoding="utf-8"))
    data = np.fromfile(path, dtype="<c8").reshape(meta["shape"])
    return data, meta


def write_ridges(path, dec: Decomposition, times: np.ndarray) -> Path:
    """One row per ridge and original sample: ridge, n, t, bin, if_estimate."""
    n = dec.y.size
    off = dec.cwt.offset if dec.cwt is not None else 0
    rid, idx, tt, bins, ifs = [], [], [], [], []
    for k, ridge in enumerate(dec.ridges, start=1):
        b = ridge.bins[off:off + n]
        rid.append(np.full(n, k))
        idx.append(np.arange(1, n + 1))
        tt.append(times)
        bins.append(b)
        ifs.append(b * dec.sst.freq.delta_xi)
    cols = [np.concatenate(c) if c else np.empty(0) for c in (rid, idx, tt, bins, ifs)]
    return write_csv(path, ["ridge", "n", "t", "bin", "if_estimate"], cols)


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def finite_or_none(obj):
    # strict JSON has no NaN/inf
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: finite_or_none(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [finite_or_none(v) for v in obj]
    return obj


def write_json(path, obj: Mapping) -> Path:
    path = Path(path)
    plain = json.loads(json.dumps(obj, default=_json_default))
    path.write_text(json.dumps(finite_or_none(plain), indent=2, allow_nan=False) + "\n",
                    encoding="utf-8")
    return path


def _json_default(x):
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not JSON serializable: {type(x).__name__}")
