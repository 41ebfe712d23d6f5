"""Mutual inductance of conductor paths: filament double sum, spiral layout
generation, and grid-fit interpolation of displacement sweeps.

The mutual inductance between two discretized centerlines is the double sum

    L_mn = mu0/(4 pi) * sum_i sum_j (dx_i . dx_j) / |c_i - c_j|

over segment pairs, with segment midpoints used for the distance.  Only
mutual terms are computed; self-inductance needs a finite conductor model and
is out of scope.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from ..errors import ExtrapolationError, ToolkitError
from ..netlist import Polyline3D

MU0 = 4.0e-7 * np.pi  # H/m

SCHEMA_MUTUAL = "rflt/mutual-matrix/1"


def _canonical_orientation(path: Polyline3D):
    """(segments, midpoints, sign) with a traversal-independent ordering.

    Summation then happens in one canonical order, so reversing a path flips
    the returned sign and nothing else: negation under reversal is exact in
    floating point, not merely approximate.
    """
    v = path.vertices
    flat = v.reshape(-1)
    flat_rev = v[::-1].reshape(-1)
    for a, b in zip(flat, flat_rev):
        if a < b:
            return path.segments, path.midpoints, 1.0
        if a > b:
            rev = v[::-1]
            return np.diff(rev, axis=0), 0.5 * (rev[:-1] + rev[1:]), -1.0
    return path.segments, path.midpoints, 1.0  # palindromic path


def neumann_mutual(path_a: Polyline3D, path_b: Polyline3D,
                   min_distance: float = 1e-9) -> float:
    """Mutual inductance (H) between two filament paths.

    Sign follows the path orientations; reversing one path negates the
    result exactly.  Raises when any segment-pair midpoint distance falls
    below ``min_distance``: the filament approximation is invalid there.
    """
    da, ca, sign_a = _canonical_orientation(path_a)
    db, cb, sign_b = _canonical_orientation(path_b)
    dist = np.linalg.norm(ca[:, None, :] - cb[None, :, :], axis=2)
    if np.min(dist) < min_distance:
        raise ToolkitError(
            f"segment pair closer than {min_distance:g} m; "
            "filament approximation invalid (paths touch or intersect)"
        )
    dots = da @ db.T
    return float(sign_a * sign_b * MU0 / (4.0 * np.pi) * np.sum(dots / dist))


def spiral_path(turns: int, pitch: float, outer_size: float,
                segments_per_turn: int = 4, center=(0.0, 0.0, 0.0),
                plane: str = "xy", handedness: str = "ccw") -> Polyline3D:
    """Planar rectangular spiral centerline.

    ``outer_size`` is the outer side length; the winding moves inward by
    ``pitch`` per turn.  ``segments_per_turn`` must be a multiple of 4 (each
    side of a turn is split evenly), giving exactly turns*segments_per_turn
    segments.  ``handedness`` ("ccw"/"cw") flips the traversal direction of
    the same curve, which exactly negates every mutual inductance against a
    fixed partner path.
    """
    if turns <= 0 or pitch <= 0 or outer_size <= 0:
        raise ValueError("turns, pitch and outer_size must be > 0")
    if segments_per_turn < 4 or segments_per_turn % 4:
        raise ValueError("segments_per_turn must be a positive multiple of 4")
    if handedness not in ("ccw", "cw"):
        raise ValueError("handedness must be 'ccw' or 'cw'")
    n_sides = 4 * turns
    # side lengths: two at full size, then shrink by pitch/2 every two sides
    lengths = [outer_size - (max(k - 1, 0) // 2) * (pitch / 2.0) for k in range(n_sides)]
    if min(lengths) <= 0:
        raise ToolkitError("spiral self-intersects: pitch too large for turns")

    headings = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)]
    sub = segments_per_turn // 4
    pts = [np.zeros(2)]
    for k, length in enumerate(lengths):
        h = np.asarray(headings[k % 4])
        for _ in range(sub):
            pts.append(pts[-1] + h * (length / sub))
    xy = np.asarray(pts)
    xy = xy - xy.mean(axis=0)  # roughly center the winding
    if handedness == "cw":
        xy = xy[::-1]  # same centered curve, reversed traversal

    axes = {"xy": (0, 1), "xz": (0, 2), "yz": (1, 2)}
    if plane not in axes:
        raise ValueError("plane must be one of 'xy', 'xz', 'yz'")
    verts = np.zeros((xy.shape[0], 3))
    i, j = axes[plane]
    verts[:, i] = xy[:, 0]
    verts[:, j] = xy[:, 1]
    verts += np.asarray(center, dtype=float)
    return Polyline3D(verts)


def mutual_fit(samples):
    """Bilinear interpolant of mutual inductance over (dx, dy) displacements.

    ``samples`` is an iterable of (dx, dy, M) that must fill a complete
    rectangular grid of the unique dx and dy values.  The fit reproduces the
    samples exactly at the nodes; querying outside the sampled hull raises
    :class:`ExtrapolationError`.
    """
    pts = [(float(a), float(b), float(m)) for a, b, m in samples]
    if len(pts) < 4:
        raise ValueError("need at least 4 sample points")
    xs = np.array(sorted({p[0] for p in pts}))
    ys = np.array(sorted({p[1] for p in pts}))
    if xs.size < 2 or ys.size < 2:
        raise ValueError("sample points are collinear; need a 2-D spread")
    if xs.size * ys.size != len(pts):
        raise ValueError("samples must fill a complete rectangular (dx, dy) grid")
    m = np.full((xs.size, ys.size), np.nan)
    for a, b, v in pts:
        m[np.searchsorted(xs, a), np.searchsorted(ys, b)] = v
    if np.any(np.isnan(m)):
        raise ValueError("samples must fill a complete rectangular (dx, dy) grid")
    interp = RegularGridInterpolator((xs, ys), m, method="linear", bounds_error=True)

    def fit(dx: float, dy: float) -> float:
        try:
            return float(interp((dx, dy)))
        except ValueError as exc:
            raise ExtrapolationError(
                f"query ({dx:g}, {dy:g}) outside the fitted displacement grid"
            ) from exc

    return fit


@dataclass(frozen=True)
class MutualMatrix:
    """Symmetric matrix of pairwise mutual inductances (H) between inductors.

    The diagonal is unused (self-inductance lives on the inductor elements).
    """

    labels: tuple
    m: np.ndarray

    def __post_init__(self):
        labels = tuple(self.labels)
        m = np.asarray(self.m, dtype=float)
        if m.shape != (len(labels), len(labels)):
            raise ValueError("matrix shape must match label count")
        if not np.all(np.isfinite(m)):
            raise ValueError("mutual matrix entries must be finite")
        if not np.allclose(m, m.T, rtol=0, atol=0):
            raise ValueError("mutual matrix must be symmetric")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "m", m)

    def value(self, a: str, b: str) -> float:
        i, j = self.labels.index(a), self.labels.index(b)
        return float(self.m[i, j])

    def pairs(self, threshold: float = 0.0):
        """(label_a, label_b, M) for upper-triangle entries with |M| >= threshold."""
        out = []
        for i in range(len(self.labels)):
            for j in range(i + 1, len(self.labels)):
                if abs(self.m[i, j]) >= threshold:
                    out.append((self.labels[i], self.labels[j], float(self.m[i, j])))
        return out


def mutual_matrix_from_paths(labels, paths, min_distance: float = 1e-9) -> MutualMatrix:
    """Pairwise Neumann mutual inductances of a set of layout centerlines."""
    n = len(labels)
    if len(paths) != n:
        raise ValueError("labels and paths must align")
    m = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            m[i, j] = m[j, i] = neumann_mutual(paths[i], paths[j], min_distance)
    return MutualMatrix(tuple(labels), m)


def mutual_matrix_to_json(mm: MutualMatrix, indent: int = 2) -> str:
    return json.dumps(
        {"schema": SCHEMA_MUTUAL, "labels": list(mm.labels), "m": mm.m.tolist()},
        indent=indent,
    )


def mutual_matrix_from_json(text: str) -> MutualMatrix:
    d = json.loads(text)
    if d.get("schema") != SCHEMA_MUTUAL:
        raise ValueError(f"unsupported mutual-matrix schema: {d.get('schema')!r}")
    return MutualMatrix(tuple(d["labels"]), np.array(d["m"]))
