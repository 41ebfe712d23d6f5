"""Pydantic request/response models for the design service.

Every operation of the toolkit is a pure document-in/document-out
computation, so the wire format mirrors the library's JSON schemas: netlists
and mutual matrices travel as their schema dicts, S-parameter data as
Touchstone text, tabular results as CSV text.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator


class GridSpec(BaseModel):
    start_hz: float = Field(gt=0)
    stop_hz: float = Field(gt=0)
    points: int = Field(ge=2)
    spacing: Literal["linear", "log"] = "linear"

    @model_validator(mode="after")
    def _ordered(self):
        if not self.stop_hz > self.start_hz:
            raise ValueError("stop_hz must exceed start_hz")
        return self


class BandSpec(BaseModel):
    f_lo_hz: float = Field(gt=0)
    f_hi_hz: float = Field(gt=0)

    @model_validator(mode="after")
    def _ordered(self):
        if not self.f_hi_hz > self.f_lo_hz:
            raise ValueError("f_hi_hz must exceed f_lo_hz")
        return self


class SynthRequest(BaseModel):
    topology: Literal["bandpass", "lowpass"] = "bandpass"
    fp1_hz: Optional[float] = None
    fp2_hz: Optional[float] = None
    fp_hz: Optional[float] = None
    z0: float = 50.0
    grid: Optional[GridSpec] = None  # when set, the ideal response is returned

    @model_validator(mode="after")
    def _complete(self):
        if self.topology == "bandpass":
            if self.fp1_hz is None or self.fp2_hz is None:
                raise ValueError("bandpass synthesis needs fp1_hz and fp2_hz")
        elif self.fp_hz is None:
            raise ValueError("lowpass synthesis needs fp_hz")
        return self


class SynthResponse(BaseModel):
    elements: dict
    netlist: dict
    response_csv: Optional[str] = None


class AnalyzeRequest(BaseModel):
    netlist: Optional[dict] = None
    touchstone: Optional[str] = None
    grid: Optional[GridSpec] = None
    pairs: list[tuple[int, int]] = [(1, 1), (2, 1)]
    db: bool = True
    phase: bool = False
    summary: bool = False

    @model_validator(mode="after")
    def _source(self):
        if (self.netlist is None) == (self.touchstone is None):
            raise ValueError("provide exactly one of netlist or touchstone")
        if self.netlist is not None and self.grid is None:
            raise ValueError("netlist analysis needs a grid")
        return self


class AnalyzeResponse(BaseModel):
    response_csv: str
    summary: Optional[dict] = None


class DelayRequest(BaseModel):
    fp_hz: float = Field(gt=0)
    r: float = Field(default=50.0, gt=0)
    z_line: float = Field(default=50.0, gt=0)
    theta_ref_rad: float = Field(ge=0)
    ref_hz: float = Field(gt=0)
    grid: GridSpec


class DelayResponse(BaseModel):
    csv: str
    max_reflection: float


class SpiralSpec(BaseModel):
    label: str
    turns: int = Field(gt=0)
    pitch_m: float = Field(gt=0)
    outer_size_m: float = Field(gt=0)
    segments_per_turn: int = 16
    center_m: tuple[float, float, float] = (0.0, 0.0, 0.0)
    plane: Literal["xy", "xz", "yz"] = "xy"
    handedness: Literal["ccw", "cw"] = "ccw"


class MutualRequest(BaseModel):
    spirals: list[SpiralSpec] = Field(min_length=2)


class MutualResponse(BaseModel):
    matrix: dict


class WindingsRequest(BaseModel):
    netlist: dict
    matrix: dict
    grid: GridSpec
    band: Optional[BandSpec] = None
    threshold_h: float = 0.0
    active_only: bool = False


class WindingsResponse(BaseModel):
    best_signs: list[int]
    best_objective: float
    best_objective_db: float
    table_csv: str


class ToleranceRequest(BaseModel):
    netlist: dict
    grid: GridSpec
    common_fraction: float = Field(ge=0, lt=0.5)
    per_element_fraction: float = Field(default=0.0, ge=0, lt=0.5)
    trials: int = Field(default=500, ge=1)
    seed: int = 0
    band: Optional[BandSpec] = None


class ToleranceResponse(BaseModel):
    quantile_csv: str
    worst_inband_return_loss_db: Optional[float] = None


class PathSpec(BaseModel):
    delay_s: float = Field(gt=0)
    il_db: float = Field(default=0.5, ge=0)
    rl_db: float = Field(default=20.0, gt=0)


class CalMcRequest(BaseModel):
    grid: GridSpec
    standards: list[Literal["open", "short", "load", "term2", "offset_short"]] = [
        "open",
        "short",
        "load",
    ]
    term2_rl_db: float = 6.0
    term2_phase_deg: float = 0.0
    offset_short_delay_s: float = 25e-12
    paths: list[PathSpec]
    dut_touchstone: Optional[str] = None
    dut_rl_db: float = 20.0
    dut_delay_s: float = 0.0
    trials: int = Field(default=500, ge=1)
    seed: int = 0
    vna_mag_db: float = 0.4
    phase_deg: float = 10.0
    path_rl_db: float = 10.0
    path_il_db: float = 0.5
    ref_delay_s: Optional[float] = None
    histogram_bins_db: int = Field(default=60, ge=2)

    @model_validator(mode="after")
    def _paths_align(self):
        if len(self.paths) != len(self.standards) + 1:
            raise ValueError("need one path per standard plus one for the DUT")
        return self


class CalMcResponse(BaseModel):
    quantile_csv: str
    histogram_csv: str
    crossover_hz: Optional[float] = None


class OptimizeRequest(BaseModel):
    problem: dict
    max_iterations: int = Field(default=200, ge=1)
    tolerance: float = Field(default=1e-12, gt=0)
    initial: Optional[dict] = None


class OptimizeResponse(BaseModel):
    netlist: dict
    values: dict
    cost: float
    residual_norm: float
    converged: bool
    iterations: int
    trace_csv: str
    message: str


class NoiseRequest(BaseModel):
    netlist: dict
    grid: GridSpec


class NoiseResponse(BaseModel):
    response_csv: str
    resistor_ports: list[str]
