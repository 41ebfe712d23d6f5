"""Non-ideal behavior of reflectionless filters: symmetry-plane delay,
component tolerance, and mutual inductive coupling."""

from .coupling import (
    apply_mutual_couplings,
    coupled_pair_count,
    coupled_tee_block,
    series_tee,
    winding_search,
)
from .delay import DelayModelInput, build_delayed_lowpass_netlist, delay_reflection
from .mutual import (
    MU0,
    MutualMatrix,
    mutual_fit,
    mutual_matrix_from_json,
    mutual_matrix_from_paths,
    mutual_matrix_to_json,
    neumann_mutual,
    spiral_path,
)
from .tolerance import ToleranceSpec, ToleranceSummary, tolerance_mc

__all__ = [
    "MU0",
    "DelayModelInput",
    "MutualMatrix",
    "ToleranceSpec",
    "ToleranceSummary",
    "apply_mutual_couplings",
    "build_delayed_lowpass_netlist",
    "coupled_pair_count",
    "coupled_tee_block",
    "delay_reflection",
    "mutual_fit",
    "mutual_matrix_from_json",
    "mutual_matrix_from_paths",
    "mutual_matrix_to_json",
    "neumann_mutual",
    "series_tee",
    "spiral_path",
    "tolerance_mc",
    "winding_search",
]
