"""Lumped-element circuit description consumed by the nodal evaluator.

A :class:`Netlist` is a plain value object: labeled nodes (with the
distinguished ground ``"0"``), a list of elements, and an ordered list of
ports given as node pairs with reference impedances.  Synthesis routines emit
netlists; the evaluator, optimizer and CLI consume them.  The JSON form
(:func:`netlist_to_json` / :func:`netlist_from_json`) is the interchange
schema used by the CLI and the service.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .network import FrequencyGrid, NetworkData

GROUND = "0"

SCHEMA_NETLIST = "rflt/netlist/1"


@dataclass(frozen=True)
class Polyline3D:
    """Ordered 3-D points (meters) tracing a conductor centerline."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 3 or v.shape[0] < 2:
            raise ValueError("polyline needs >= 2 vertices of shape (n, 3)")
        seg = np.diff(v, axis=0)
        if np.any(np.linalg.norm(seg, axis=1) == 0.0):
            raise ValueError("consecutive polyline vertices must be distinct")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @property
    def segments(self) -> np.ndarray:
        return np.diff(self.vertices, axis=0)

    @property
    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.vertices[:-1] + self.vertices[1:])

    def reversed(self) -> "Polyline3D":
        return Polyline3D(self.vertices[::-1].copy())

    def scaled(self, factor: float) -> "Polyline3D":
        return Polyline3D(self.vertices * factor)


@dataclass(frozen=True)
class Resistor:
    name: str
    nodes: tuple
    ohms: float

    def __post_init__(self):
        if self.ohms <= 0:
            raise ValueError(f"{self.name}: resistance must be > 0")


@dataclass(frozen=True)
class Inductor:
    name: str
    nodes: tuple
    henries: float
    winding_sign: int = 1
    layout_path: Optional[Polyline3D] = None

    def __post_init__(self):
        if self.henries <= 0:
            raise ValueError(f"{self.name}: inductance must be > 0")
        if self.winding_sign not in (1, -1):
            raise ValueError(f"{self.name}: winding_sign must be +1 or -1")


@dataclass(frozen=True)
class Capacitor:
    name: str
    nodes: tuple
    farads: float

    def __post_init__(self):
        if self.farads <= 0:
            raise ValueError(f"{self.name}: capacitance must be > 0")


@dataclass(frozen=True)
class MutualCoupling:
    """Coupling k between two named inductors; M = k sqrt(L1 L2)."""

    name: str
    inductor_a: str
    inductor_b: str
    k: float

    nodes: tuple = ()

    def __post_init__(self):
        if not abs(self.k) < 1.0:
            raise ValueError(f"{self.name}: |k| must be < 1")
        if self.inductor_a == self.inductor_b:
            raise ValueError(f"{self.name}: coupling must reference two distinct inductors")


@dataclass(frozen=True)
class TransmissionLine:
    """Lossless ideal line: impedance, electrical length at a reference frequency.

    The electrical length theta (radians) scales linearly with frequency from
    its value at ``ref_hz``.
    """

    name: str
    nodes: tuple
    z_line: float
    theta_ref: float
    ref_hz: float

    def __post_init__(self):
        if self.z_line <= 0:
            raise ValueError(f"{self.name}: line impedance must be > 0")
        if self.theta_ref <= 0:
            raise ValueError(f"{self.name}: electrical length must be > 0")
        if self.ref_hz <= 0:
            raise ValueError(f"{self.name}: reference frequency must be > 0")

    def theta(self, f_hz) -> np.ndarray:
        return self.theta_ref * np.asarray(f_hz) / self.ref_hz


@dataclass(frozen=True)
class SParamBlock:
    """Measured or precomputed N-port data embedded in a netlist.

    ``port_nodes`` maps each block port to a (plus, minus) node pair; use the
    ground node for single-ended ports.
    """

    name: str
    data: NetworkData
    port_nodes: tuple

    nodes: tuple = field(init=False, default=())

    def __post_init__(self):
        if len(self.port_nodes) != self.data.nports:
            raise ValueError(f"{self.name}: port map does not match port count")
        flat = tuple(n for pair in self.port_nodes for n in pair)
        object.__setattr__(self, "nodes", flat)


@dataclass(frozen=True)
class Port:
    nodes: tuple
    z0: float = 50.0

    def __post_init__(self):
        if self.z0 <= 0:
            raise ValueError("port impedance must be > 0")
        if self.nodes[0] == self.nodes[1]:
            raise ValueError("port node pair must be distinct")


TWO_TERMINAL = (Resistor, Inductor, Capacitor, TransmissionLine)


@dataclass(frozen=True)
class Netlist:
    elements: tuple
    ports: tuple

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        object.__setattr__(self, "ports", tuple(self.ports))
        self.validate()

    # -- structure checks -------------------------------------------------

    def validate(self):
        names = [e.name for e in self.elements]
        if len(set(names)) != len(names):
            raise ValueError("element names must be unique")
        inductors = {e.name for e in self.elements if isinstance(e, Inductor)}
        for e in self.elements:
            if isinstance(e, MutualCoupling):
                for ref in (e.inductor_a, e.inductor_b):
                    if ref not in inductors:
                        raise ValueError(
                            f"{e.name}: coupling references unknown inductor {ref!r}"
                        )
        if not self.ports:
            raise ValueError("netlist needs at least one port")
        known = self.nodes()
        for p in self.ports:
            for n in p.nodes:
                if n not in known:
                    raise ValueError(f"port references unknown node {n!r}")
        self._check_connected()

    def nodes(self) -> set:
        out = {GROUND}
        for e in self.elements:
            out.update(e.nodes)
        for p in self.ports:
            out.update(p.nodes)
        return out

    def _check_connected(self):
        # union-find over element and port edges; everything must reach ground
        parent = {n: n for n in self.nodes()}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(a, b):
            parent[find(a)] = find(b)

        for e in self.elements:
            ns = [n for n in e.nodes]
            for a, b in zip(ns, ns[1:]):
                union(a, b)
        for p in self.ports:
            union(p.nodes[0], p.nodes[1])
        root = find(GROUND)
        stranded = sorted(n for n in parent if find(n) != root)
        if stranded:
            raise ValueError(f"nodes not connected to ground: {stranded}")

    # -- convenience -----------------------------------------------------

    def inductors(self) -> list:
        return [e for e in self.elements if isinstance(e, Inductor)]

    def element(self, name: str):
        for e in self.elements:
            if e.name == name:
                return e
        raise KeyError(name)

    def with_element_value(self, name: str, value: float) -> "Netlist":
        """Copy with one R/L/C value replaced."""
        new = []
        for e in self.elements:
            if e.name != name:
                new.append(e)
            elif isinstance(e, Resistor):
                new.append(replace(e, ohms=value))
            elif isinstance(e, Inductor):
                new.append(replace(e, henries=value))
            elif isinstance(e, Capacitor):
                new.append(replace(e, farads=value))
            else:
                raise ValueError(f"{name}: only R/L/C values can be replaced")
        return Netlist(tuple(new), self.ports)

    def scaled(self, l_factor: float = 1.0, c_factor: float = 1.0,
               per_element: Optional[dict] = None) -> "Netlist":
        """Copy with all inductors/capacitors scaled, plus optional per-element factors."""
        per_element = per_element or {}
        new = []
        for e in self.elements:
            extra = per_element.get(e.name, 1.0)
            if isinstance(e, Inductor):
                new.append(replace(e, henries=e.henries * l_factor * extra))
            elif isinstance(e, Capacitor):
                new.append(replace(e, farads=e.farads * c_factor * extra))
            elif isinstance(e, Resistor) and e.name in per_element:
                new.append(replace(e, ohms=e.ohms * extra))
            else:
                new.append(e)
        return Netlist(tuple(new), self.ports)


# -- JSON interchange ------------------------------------------------------


def _element_to_dict(e) -> dict:
    if isinstance(e, Resistor):
        return {"kind": "R", "name": e.name, "nodes": list(e.nodes), "ohms": e.ohms}
    if isinstance(e, Inductor):
        d = {
            "kind": "L",
            "name": e.name,
            "nodes": list(e.nodes),
            "henries": e.henries,
            "winding_sign": e.winding_sign,
        }
        if e.layout_path is not None:
            d["layout_path"] = e.layout_path.vertices.tolist()
        return d
    if isinstance(e, Capacitor):
        return {"kind": "C", "name": e.name, "nodes": list(e.nodes), "farads": e.farads}
    if isinstance(e, MutualCoupling):
        return {
            "kind": "K",
            "name": e.name,
            "inductor_a": e.inductor_a,
            "inductor_b": e.inductor_b,
            "k": e.k,
        }
    if isinstance(e, TransmissionLine):
        return {
            "kind": "TL",
            "name": e.name,
            "nodes": list(e.nodes),
            "z_line": e.z_line,
            "theta_ref": e.theta_ref,
            "ref_hz": e.ref_hz,
        }
    if isinstance(e, SParamBlock):
        return {
            "kind": "SBLOCK",
            "name": e.name,
            "port_nodes": [list(p) for p in e.port_nodes],
            "z0": e.data.z0.tolist(),
            "freq_hz": e.data.grid.points.tolist(),
            "s_real": e.data.s.real.tolist(),
            "s_imag": e.data.s.imag.tolist(),
        }
    raise TypeError(f"unknown element type: {type(e).__name__}")


def _element_from_dict(d: dict):
    kind = d["kind"]
    if kind == "R":
        return Resistor(d["name"], tuple(d["nodes"]), d["ohms"])
    if kind == "L":
        path = d.get("layout_path")
        return Inductor(
            d["name"],
            tuple(d["nodes"]),
            d["henries"],
            winding_sign=d.get("winding_sign", 1),
            layout_path=Polyline3D(np.array(path)) if path is not None else None,
        )
    if kind == "C":
        return Capacitor(d["name"], tuple(d["nodes"]), d["farads"])
    if kind == "K":
        return MutualCoupling(d["name"], d["inductor_a"], d["inductor_b"], d["k"])
    if kind == "TL":
        return TransmissionLine(
            d["name"], tuple(d["nodes"]), d["z_line"], d["theta_ref"], d["ref_hz"]
        )
    if kind == "SBLOCK":
        s = np.array(d["s_real"]) + 1j * np.array(d["s_imag"])
        data = NetworkData(FrequencyGrid(np.array(d["freq_hz"])), s, np.array(d["z0"]))
        return SParamBlock(d["name"], data, tuple(tuple(p) for p in d["port_nodes"]))
    raise ValueError(f"unknown element kind: {kind!r}")


def netlist_to_dict(nl: Netlist) -> dict:
    return {
        "schema": SCHEMA_NETLIST,
        "elements": [_element_to_dict(e) for e in nl.elements],
        "ports": [{"nodes": list(p.nodes), "z0": p.z0} for p in nl.ports],
    }


def netlist_from_dict(d: dict) -> Netlist:
    if d.get("schema") != SCHEMA_NETLIST:
        raise ValueError(f"unsupported netlist schema: {d.get('schema')!r}")
    elements = tuple(_element_from_dict(e) for e in d["elements"])
    ports = tuple(Port(tuple(p["nodes"]), p["z0"]) for p in d["ports"])
    return Netlist(elements, ports)


def netlist_to_json(nl: Netlist, indent: int = 2) -> str:
    return json.dumps(netlist_to_dict(nl), indent=indent)


def netlist_from_json(text: str) -> Netlist:
    return netlist_from_dict(json.loads(text))
