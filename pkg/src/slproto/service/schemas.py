"""Request/response bodies for the HTTP service.

The CLI talks to these endpoints in-process; the same shapes work over
a real socket when the app is served standalone.
"""

from __future__ import annotations

from pydantic import BaseModel, Field


class FitRequest(BaseModel):
    data: str = Field(description="dataset path (.jsonl or .slpb)")
    out: str | None = Field(default=None, description="where to write the model JSON")
    shots: int | None = Field(
        default=None,
        description="subsample this many instances per class as the support set",
    )
    seed: int | None = Field(default=None, description="seed for support subsampling")
    lines: int | None = None
    epsilon: float | None = None
    algo: str | None = None
    budget: int | None = None
    k: int | None = None
    config_file: str | None = None


class LineSummary(BaseModel):
    index: int
    classes: list[str]
    assigned: list[str]
    margin: float | None
    fallback: bool


class FitResponse(BaseModel):
    m: int
    n: int
    class_order: list[str]
    lines: list[LineSummary]
    uncovered: list[str]
    warnings: list[str]
    out: str | None
    document: dict


class EvalRequest(BaseModel):
    data: str
    episodes: str = Field(description='episode file path or "sample:N,seed"')
    classifiers: list[str]
    shots: int | None = Field(
        default=None, description='per-class support size when episodes is "sample:..."'
    )
    k: int | None = None
    lines: int | None = None
    epsilon: float | None = None
    algo: str | None = None
    budget: int | None = None
    out_json: str | None = None
    out_csv: str | None = None
    config_file: str | None = None


class EvalResponse(BaseModel):
    reports: list[dict]
    csv: str
    out_json: str | None
    out_csv: str | None


class InspectRequest(BaseModel):
    path: str = Field(description="model JSON path")


class PrototypeView(BaseModel):
    index: int
    norm: float
    line_index: int | None
    distribution: dict[str, float]


class InspectResponse(BaseModel):
    schema_version: str
    m: int
    n: int
    class_order: list[str]
    prototypes: list[PrototypeView]
    lines: list[dict]
    bar_chart_csv: str


class SynthRequest(BaseModel):
    specs: list[dict] = Field(description="class blob specs: label/mean/sigma/count")
    seed: int
    out: str
    fmt: str | None = None


class SynthResponse(BaseModel):
    out: str
    instances: int
    classes: list[str]
    dimension: int
