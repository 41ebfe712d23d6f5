"""Touchstone v1 and CSV serialization of S-parameter data.

Reads and writes the classic text interchange format (option line
``# <unit> S <fmt> R <r>``, whitespace-separated data, two-port column order
S11 S21 S12 S22, three-port and larger row-major with line wrapping).  The
parser rejects malformed input with the offending line number; it never
silently repairs.  Comment lines are collected on read and dropped on write.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass

import numpy as np

from .errors import TouchstoneFormatError
from .network import FrequencyGrid, NetworkData

_UNITS = {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9}
_FORMATS = ("RI", "MA", "DB")

_DB_FLOOR = 1e-30  # magnitude written as -600 dB instead of -inf


@dataclass(frozen=True)
class TouchstoneOptions:
    unit: str = "GHz"
    fmt: str = "MA"
    parameter: str = "S"
    resistance: float = 50.0

    def __post_init__(self):
        if self.unit.lower() not in _UNITS:
            raise ValueError(f"unknown frequency unit {self.unit!r}")
        if self.fmt.upper() not in _FORMATS:
            raise ValueError(f"unknown format {self.fmt!r} (use RI, MA or DB)")
        if self.parameter.upper() != "S":
            raise ValueError("only S-parameters are supported")
        if self.resistance <= 0:
            raise ValueError("reference resistance must be > 0")
        object.__setattr__(self, "unit", _canonical_unit(self.unit))
        object.__setattr__(self, "fmt", self.fmt.upper())
        object.__setattr__(self, "parameter", "S")


def _canonical_unit(u: str) -> str:
    return {"hz": "Hz", "khz": "kHz", "mhz": "MHz", "ghz": "GHz"}[u.lower()]


def _parse_option_line(line: str, line_no: int) -> TouchstoneOptions:
    toks = line[1:].split()
    unit, fmt, param, res = None, None, None, None
    i = 0
    while i < len(toks):
        t = toks[i]
        tl = t.lower()
        if tl in _UNITS:
            unit = t
        elif t.upper() in _FORMATS:
            fmt = t
        elif t.upper() in ("S", "Y", "Z", "G", "H"):
            param = t
        elif t.upper() == "R":
            if i + 1 >= len(toks):
                raise TouchstoneFormatError(line_no, "R not followed by a resistance")
            try:
                res = float(toks[i + 1])
            except ValueError:
                raise TouchstoneFormatError(
                    line_no, f"bad resistance value {toks[i + 1]!r}"
                ) from None
            i += 1
        else:
            raise TouchstoneFormatError(line_no, f"unknown option token {t!r}")
        i += 1
    # Touchstone v1 defaults for omitted fields
    opts = dict(unit=unit or "GHz", fmt=fmt or "MA", parameter=param or "S",
                resistance=res if res is not None else 50.0)
    try:
        return TouchstoneOptions(**opts)
    except ValueError as exc:
        raise TouchstoneFormatError(line_no, str(exc)) from None


def _numbers(line: str, line_no: int):
    vals = []
    for tok in line.split():
        try:
            vals.append(float(tok))
        except ValueError:
            raise TouchstoneFormatError(line_no, f"bad number {tok!r}") from None
    return vals


def _infer_ports(rows) -> int:
    """Guess port count from the data-line token pattern."""
    first = len(rows[0][1])
    if first == 3:
        return 1
    if first == 7:
        return 3
    if first == 9:
        # two-port (all lines 9 wide) vs four-port (9, 8, 8, 8 blocks)
        if len(rows) > 1 and len(rows[1][1]) == 8:
            return 4
        return 2
    raise TouchstoneFormatError(
        rows[0][0], f"cannot infer port count from {first} columns"
    )


def parse_touchstone(text: str, ports: int | None = None):
    """Parse Touchstone v1 content.

    Returns ``(NetworkData, TouchstoneOptions, comments)`` where ``comments``
    are the '!' lines encountered (metadata; they are not written back).
    """
    options = None
    comments = []
    rows = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if "!" in line:
            line, _, comment = line.partition("!")
            comments.append(comment.strip())
            line = line.strip()
            if not line:
                continue
        if line.startswith("#"):
            if options is not None:
                raise TouchstoneFormatError(line_no, "duplicate option line")
            if rows:
                raise TouchstoneFormatError(line_no, "option line after data")
            options = _parse_option_line(line, line_no)
            continue
        rows.append((line_no, _numbers(line, line_no)))
    if options is None:
        raise TouchstoneFormatError(1, "missing option line ('# <unit> S <fmt> R <r>')")
    if not rows:
        raise TouchstoneFormatError(1, "no data lines")

    n = ports if ports is not None else _infer_ports(rows)
    per_freq = 2 * n * n

    freqs, matrices = [], []
    if n <= 2:
        for line_no, vals in rows:
            if len(vals) != 1 + per_freq:
                raise TouchstoneFormatError(
                    line_no, f"expected {1 + per_freq} columns for a {n}-port, got {len(vals)}"
                )
            freqs.append((line_no, vals[0]))
            matrices.append(vals[1:])
    else:
        i = 0
        while i < len(rows):
            line_no, vals = rows[i]
            block = list(vals[1:])
            freqs.append((line_no, vals[0]))
            i += 1
            while len(block) < per_freq and i < len(rows):
                block.extend(rows[i][1])
                i += 1
            if len(block) != per_freq:
                raise TouchstoneFormatError(
                    line_no, f"frequency block has {len(block)} values, expected {per_freq}"
                )
            matrices.append(block)

    scale = _UNITS[options.unit.lower()]
    f_hz = []
    for k, (line_no, f) in enumerate(freqs):
        if k and f <= freqs[k - 1][1]:
            raise TouchstoneFormatError(line_no, "non-monotonic frequency")
        f_hz.append(f * scale)

    s = np.empty((len(f_hz), n, n), dtype=complex)
    for k, block in enumerate(matrices):
        pairs = np.asarray(block).reshape(-1, 2)
        vals = _decode(pairs, options.fmt)
        if n == 2:
            # v1 two-port order: S11 S21 S12 S22 (column-major)
            s[k] = vals.reshape(2, 2).T
        else:
            s[k] = vals.reshape(n, n)
    grid = FrequencyGrid(np.asarray(f_hz))
    nd = NetworkData(grid, s, np.full(n, options.resistance))
    return nd, options, comments


def _decode(pairs: np.ndarray, fmt: str) -> np.ndarray:
    a, b = pairs[:, 0], pairs[:, 1]
    if fmt == "RI":
        return a + 1j * b
    if fmt == "MA":
        return a * np.exp(1j * np.deg2rad(b))
    return 10.0 ** (a / 20.0) * np.exp(1j * np.deg2rad(b))


def read_touchstone(text: str, ports: int | None = None) -> NetworkData:
    return parse_touchstone(text, ports)[0]


def read_touchstone_file(path) -> NetworkData:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    m = re.search(r"\.s(\d+)p$", str(path).lower())
    return read_touchstone(text, int(m.group(1)) if m else None)


def _encode(vals: np.ndarray, fmt: str) -> np.ndarray:
    if fmt == "RI":
        return np.column_stack([vals.real, vals.imag])
    mag = np.abs(vals)
    ang = np.rad2deg(np.angle(vals))
    if fmt == "MA":
        return np.column_stack([mag, ang])
    return np.column_stack([20.0 * np.log10(np.maximum(mag, _DB_FLOOR)), ang])


def write_touchstone(n: NetworkData, options: TouchstoneOptions | None = None) -> str:
    """Render a network as Touchstone v1 text.

    Touchstone v1 carries a single reference resistance, so mixed per-port
    z0 cannot be represented and raises.
    """
    if not np.all(n.z0 == n.z0[0]):
        raise ValueError("Touchstone v1 cannot represent per-port z0; renormalize first")
    if options is None:
        options = TouchstoneOptions(unit="GHz", fmt="RI", resistance=float(n.z0[0]))
    if not np.isclose(options.resistance, n.z0[0]):
        raise ValueError(
            f"options resistance {options.resistance} differs from network z0 {n.z0[0]}"
        )
    scale = _UNITS[options.unit.lower()]
    np_ = n.nports
    lines = [f"# {options.unit} S {options.fmt} R {options.resistance:g}"]
    for k, f in enumerate(n.grid.points):
        mat = n.s[k]
        if np_ == 2:
            order = mat.T.reshape(-1)  # S11 S21 S12 S22
        else:
            order = mat.reshape(-1)
        enc = _encode(order, options.fmt)
        if np_ <= 2:
            nums = " ".join(f"{v:.12e}" for v in enc.reshape(-1))
            lines.append(f"{f / scale:.12e} {nums}")
        else:
            for r in range(np_):
                row = enc[r * np_: (r + 1) * np_].reshape(-1)
                nums = " ".join(f"{v:.12e}" for v in row)
                prefix = f"{f / scale:.12e} " if r == 0 else ""
                lines.append(prefix + nums)
    return "\n".join(lines) + "\n"


def write_touchstone_file(n: NetworkData, path, options=None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(write_touchstone(n, options))


def write_response_csv(n: NetworkData, pairs=((1, 1), (2, 1)), db: bool = True,
                       phase: bool = False) -> str:
    """CSV export of selected S_ij over frequency (header row mandatory).

    ``pairs`` are 1-based (to_port, from_port) index pairs; ``db`` selects
    20 log10 magnitude columns (linear magnitude otherwise) and ``phase``
    appends unwrapped phase in degrees.
    """
    for i, j in pairs:
        if not (1 <= i <= n.nports and 1 <= j <= n.nports):
            raise ValueError(f"S{i}{j} out of range for a {n.nports}-port")
    buf = io.StringIO()
    w = csv.writer(buf)
    header = ["freq_hz"]
    cols = []
    for i, j in pairs:
        vals = n.param(i, j)
        if db:
            header.append(f"S{i}{j}_db")
            cols.append(20.0 * np.log10(np.maximum(np.abs(vals), _DB_FLOOR)))
        else:
            header.append(f"S{i}{j}_mag")
            cols.append(np.abs(vals))
        if phase:
            header.append(f"S{i}{j}_deg")
            cols.append(np.rad2deg(np.unwrap(np.angle(vals))))
    w.writerow(header)
    for k, f in enumerate(n.grid.points):
        w.writerow([f"{f:.12e}"] + [f"{c[k]:.12e}" for c in cols])
    return buf.getvalue()


def read_csv_columns(text: str):
    """Parse a toolkit CSV export back into (header, column arrays)."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise ValueError("empty CSV")
    header = rows[0]
    data = np.array([[float(v) for v in r] for r in rows[1:] if r])
    return header, data
