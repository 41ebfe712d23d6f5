"""rflt: reflectionless (absorptive) microwave filter toolkit.

Synthesizes reflectionless filters from transmission-zero specifications,
evaluates ideal and non-ideal responses (symmetry-plane delay, component
tolerance, mutual inductive coupling), tunes component values against
frequency-domain targets, and simulates the one-port vector calibration used
to validate such filters cryogenically.
"""

from .errors import (
    ExtrapolationError,
    GridMismatchError,
    PortMismatchError,
    SingularNetworkError,
    ToolkitError,
    TouchstoneFormatError,
)
from .mna import evaluate_netlist
from .netlist import (
    Capacitor,
    Inductor,
    MutualCoupling,
    Netlist,
    Polyline3D,
    Port,
    Resistor,
    SParamBlock,
    TransmissionLine,
    netlist_from_json,
    netlist_to_json,
)
from .network import (
    FrequencyGrid,
    NetworkData,
    connect_ports,
    insertion_loss_db,
    passivity_margin,
    return_loss_db,
    self_connect,
    symmetric_two_port_from_modes,
)
from .synth import (
    BandpassElements,
    BandpassSpec,
    LowpassElements,
    band_summary,
    build_bandpass_netlist,
    build_lowpass_netlist,
    dual_element,
    resistor_noise_transfer,
    synth_bandpass,
)

__version__ = "0.1.0"

__all__ = [
    "BandpassElements",
    "BandpassSpec",
    "Capacitor",
    "ExtrapolationError",
    "FrequencyGrid",
    "GridMismatchError",
    "Inductor",
    "LowpassElements",
    "MutualCoupling",
    "Netlist",
    "NetworkData",
    "Polyline3D",
    "Port",
    "PortMismatchError",
    "Resistor",
    "SParamBlock",
    "SingularNetworkError",
    "ToolkitError",
    "TouchstoneFormatError",
    "TransmissionLine",
    "band_summary",
    "build_bandpass_netlist",
    "build_lowpass_netlist",
    "connect_ports",
    "dual_element",
    "evaluate_netlist",
    "insertion_loss_db",
    "netlist_from_json",
    "netlist_to_json",
    "passivity_margin",
    "resistor_noise_transfer",
    "return_loss_db",
    "self_connect",
    "symmetric_two_port_from_modes",
    "synth_bandpass",
]
