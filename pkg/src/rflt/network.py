"""Complex S-parameter containers and multiport network algebra.

Everything downstream (synthesis, non-ideal modeling, calibration) trades in
two value types defined here: :class:`FrequencyGrid` and :class:`NetworkData`.
Both are immutable after construction so evaluation can be parallelized per
frequency point without shared state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatchError, PortMismatchError


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class FrequencyGrid:
    """Strictly increasing evaluation frequencies in Hz, all > 0."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size == 0:
            raise ValueError("frequency grid must be a nonempty 1-D array")
        if not np.all(pts > 0.0):
            raise ValueError("all grid frequencies must be > 0 Hz")
        if not np.all(np.diff(pts) > 0.0):
            raise ValueError("grid frequencies must be strictly increasing")
        object.__setattr__(self, "points", _frozen(pts))

    @classmethod
    def linear(cls, start_hz: float, stop_hz: float, n: int) -> "FrequencyGrid":
        return cls(np.linspace(start_hz, stop_hz, n))

    @classmethod
    def log(cls, start_hz: float, stop_hz: float, n: int) -> "FrequencyGrid":
        return cls(np.geomspace(start_hz, stop_hz, n))

    @property
    def omega(self) -> np.ndarray:
        """Angular frequencies, rad/s."""
        return 2.0 * np.pi * self.points

    def __len__(self):
        return self.points.size

    def __eq__(self, other):
        if not isinstance(other, FrequencyGrid):
            return NotImplemented
        return self.points.shape == other.points.shape and np.array_equal(
            self.points, other.points
        )

    def __hash__(self):
        return hash((self.points.size, float(self.points[0]), float(self.points[-1])))


@dataclass(frozen=True)
class NetworkData:
    """Per-frequency N x N complex scattering matrices with port impedances.

    ``s`` has shape (nfreq, N, N); ``z0`` is one real impedance per port.
    """

    grid: FrequencyGrid
    s: np.ndarray
    z0: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.s, dtype=complex)
        if s.ndim != 3 or s.shape[1] != s.shape[2]:
            raise ValueError("s must have shape (nfreq, nports, nports)")
        if s.shape[0] != len(self.grid):
            raise ValueError("s frequency axis does not match grid length")
        if not np.all(np.isfinite(s)):
            raise ValueError("s contains non-finite entries")
        z0 = np.broadcast_to(np.asarray(self.z0, dtype=float), (s.shape[1],)).copy()
        if not np.all(z0 > 0.0):
            raise ValueError("reference impedances must be > 0")
        object.__setattr__(self, "s", _frozen(s))
        object.__setattr__(self, "z0", _frozen(z0))

    @property
    def nports(self) -> int:
        return self.s.shape[1]

    def param(self, i: int, j: int) -> np.ndarray:
        """S(i, j) over frequency, 1-based port indices."""
        return self.s[:, i - 1, j - 1]

    def renumbered(self, order) -> "NetworkData":
        """Reorder ports; ``order`` lists old 0-based indices in new order."""
        order = list(order)
        if sorted(order) != list(range(self.nports)):
            raise ValueError("order must be a permutation of all ports")
        idx = np.asarray(order)
        return NetworkData(self.grid, self.s[:, idx[:, None], idx[None, :]], self.z0[idx])


def ideal_thru(grid: FrequencyGrid, z0: float = 50.0) -> NetworkData:
    nf = len(grid)
    s = np.zeros((nf, 2, 2), dtype=complex)
    s[:, 0, 1] = s[:, 1, 0] = 1.0
    return NetworkData(grid, s, [z0, z0])


def matched_attenuator(grid: FrequencyGrid, loss_db: float, z0: float = 50.0) -> NetworkData:
    """Matched reciprocal two-port with |S21| = 10^(-loss_db/20)."""
    nf = len(grid)
    s = np.zeros((nf, 2, 2), dtype=complex)
    s[:, 0, 1] = s[:, 1, 0] = 10.0 ** (-loss_db / 20.0)
    return NetworkData(grid, s, [z0, z0])


def _check_common_grid(a: NetworkData, b: NetworkData):
    if a.grid != b.grid:
        raise GridMismatchError("networks do not share a common frequency grid")


def _innerconnect(s: np.ndarray, k: int, l: int) -> np.ndarray:
    """Join ports k and l of one composite S-matrix (sub-network growth).

    Returns the (N-2)-port matrix; remaining ports keep their relative order.
    """
    n = s.shape[1]
    ext = [i for i in range(n) if i not in (k, l)]

    akl = 1.0 - s[:, k, l]
    alk = 1.0 - s[:, l, k]
    akk = s[:, k, k]
    all_ = s[:, l, l]
    det = akl * alk - akk * all_
    if np.any(np.abs(det) < 1e-14):
        bad = int(np.argmin(np.abs(det)))
        raise PortMismatchError(
            f"degenerate port join (zero determinant) near frequency index {bad}"
        )

    i, j = np.meshgrid(ext, ext, indexing="ij", sparse=True)
    c = s[:, i, j].copy()
    ske = s[:, k, ext]
    sle = s[:, l, ext]
    sek = s[:, ext, k]
    sel = s[:, ext, l]

    ta = sel * (alk / det)[:, None] + sek * (all_ / det)[:, None]
    tb = sel * (akk / det)[:, None] + sek * (akl / det)[:, None]
    c += ta[:, :, None] * ske[:, None, :] + tb[:, :, None] * sle[:, None, :]
    return c


def connect_ports(a: NetworkData, port_i: int, b: NetworkData, port_j: int) -> NetworkData:
    """Join port ``port_i`` of ``a`` to port ``port_j`` of ``b`` (0-based).

    Standard port-reduction semantics; the result keeps a's remaining ports
    first, then b's.
    """
    _check_common_grid(a, b)
    if not 0 <= port_i < a.nports or not 0 <= port_j < b.nports:
        raise ValueError("port index out of range")
    if not np.isclose(a.z0[port_i], b.z0[port_j]):
        raise PortMismatchError(
            f"joined ports have different z0: {a.z0[port_i]} vs {b.z0[port_j]}"
        )
    na, nb = a.nports, b.nports
    nf = len(a.grid)
    comp = np.zeros((nf, na + nb, na + nb), dtype=complex)
    comp[:, :na, :na] = a.s
    comp[:, na:, na:] = b.s
    s = _innerconnect(comp, port_i, na + port_j)
    z0 = np.concatenate(
        [np.delete(a.z0, port_i), np.delete(b.z0, port_j)]
    )
    return NetworkData(a.grid, s, z0)


def self_connect(a: NetworkData, port_i: int, port_j: int) -> NetworkData:
    """Join two ports of the same network, producing an (N-2)-port."""
    if port_i == port_j:
        raise ValueError("cannot join a port to itself")
    if not np.isclose(a.z0[port_i], a.z0[port_j]):
        raise PortMismatchError(
            f"joined ports have different z0: {a.z0[port_i]} vs {a.z0[port_j]}"
        )
    s = _innerconnect(a.s, port_i, port_j)
    z0 = np.delete(a.z0, [port_i, port_j])
    return NetworkData(a.grid, s, z0)


def terminate_port(a: NetworkData, port_i: int, gamma) -> NetworkData:
    """Terminate one port in a per-frequency reflection coefficient."""
    gamma = np.broadcast_to(np.asarray(gamma, dtype=complex), (len(a.grid),))
    k = port_i
    ext = [i for i in range(a.nports) if i != k]
    denom = 1.0 - a.s[:, k, k] * gamma
    i, j = np.meshgrid(ext, ext, indexing="ij", sparse=True)
    c = a.s[:, i, j] + (
        a.s[:, ext, k] * (gamma / denom)[:, None]
    )[:, :, None] * a.s[:, k, ext][:, None, :]
    return NetworkData(a.grid, c, a.z0[ext])


def symmetric_two_port_from_modes(
    grid: FrequencyGrid, gamma_even, gamma_odd, z0: float = 50.0
) -> NetworkData:
    """Compose a symmetric two-port from even/odd-mode reflection coefficients.

    S11 = S22 = (Ge + Go)/2 and S21 = S12 = (Ge - Go)/2, the standard
    bisection rule; Ge = -Go gives the reflectionless case S11 = 0, S21 = Ge.
    """
    ge = np.asarray(gamma_even, dtype=complex)
    go = np.asarray(gamma_odd, dtype=complex)
    if ge.shape != (len(grid),) or go.shape != (len(grid),):
        raise ValueError("mode arrays must match the grid length")
    nf = len(grid)
    s = np.empty((nf, 2, 2), dtype=complex)
    s[:, 0, 0] = s[:, 1, 1] = 0.5 * (ge + go)
    s[:, 0, 1] = s[:, 1, 0] = 0.5 * (ge - go)
    return NetworkData(grid, s, [z0, z0])


def modes_from_symmetric_two_port(n: NetworkData):
    """Inverse of :func:`symmetric_two_port_from_modes`: (Ge, Go)."""
    if n.nports != 2:
        raise ValueError("expected a two-port")
    return n.s[:, 0, 0] + n.s[:, 1, 0], n.s[:, 0, 0] - n.s[:, 1, 0]


def passivity_margin(n: NetworkData) -> np.ndarray:
    """Minimum eigenvalue of (I - S^H S) per frequency; >= 0 means passive."""
    sh = np.conjugate(np.swapaxes(n.s, 1, 2))
    gram = np.eye(n.nports)[None, :, :] - sh @ n.s
    return np.linalg.eigvalsh(gram)[:, 0].real


def magnitude_db(x) -> np.ndarray:
    """20 log10 |x| with -inf mapped from exact zeros."""
    mag = np.abs(np.asarray(x))
    with np.errstate(divide="ignore"):
        return 20.0 * np.log10(mag)


def return_loss_db(n: NetworkData, port: int) -> np.ndarray:
    """-20 log10 |S_ii| at the given 1-based port; |S|=0 maps to +inf."""
    return -magnitude_db(n.param(port, port))


def insertion_loss_db(n: NetworkData, from_port: int, to_port: int) -> np.ndarray:
    """-20 log10 |S_ji| from ``from_port`` into ``to_port`` (1-based)."""
    return -magnitude_db(n.param(to_port, from_port))


def s_to_y(s: np.ndarray, z0: np.ndarray) -> np.ndarray:
    """Convert stacked S-matrices to Y-matrices for the given real z0 vector."""
    n = s.shape[1]
    eye = np.eye(n)
    root_y = np.diag(1.0 / np.sqrt(np.asarray(z0, dtype=float)))
    ident = np.broadcast_to(eye, s.shape)
    # Y = y0^(1/2) (I - S)(I + S)^-1 y0^(1/2)
    rhs = np.linalg.solve(np.swapaxes(ident + s, 1, 2), np.swapaxes(ident - s, 1, 2))
    return root_y @ np.swapaxes(rhs, 1, 2) @ root_y


def y_to_s(y: np.ndarray, z0: np.ndarray) -> np.ndarray:
    """Convert stacked Y-matrices to S-matrices for the given real z0 vector."""
    n = y.shape[1]
    root_z = np.diag(np.sqrt(np.asarray(z0, dtype=float)))
    g = root_z @ y @ root_z
    eye = np.broadcast_to(np.eye(n), y.shape)
    return np.linalg.solve(eye + g, eye - g)
