"""HTTP service exposing fit, evaluation, inspection, and synthesis.

Business logic lives in the core package; handlers translate files and
request bodies into core calls and map the error taxonomy onto HTTP
status codes while keeping the machine-readable payload identical to
what the CLI prints on stderr.
"""

from __future__ import annotations

import csv
import io
import json

import numpy as np
from fastapi import FastAPI, Request
from fastapi.encoders import jsonable_encoder
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .. import __version__
from ..config import SlpConfig, build_config, load_config_file
from ..data import (
    atomic_write_text,
    gen_synthetic,
    load_dataset,
    load_episodes,
    sample_episodes,
    sample_support,
    save_dataset,
)
from ..errors import SlprotoError, UsageError
from ..evaluate import report_to_doc, reports_to_csv, run_task
from ..pipeline import MODEL_SCHEMA, fit_model, load_model, model_to_doc, save_model
from .schemas import (
    EvalRequest,
    EvalResponse,
    FitRequest,
    FitResponse,
    InspectRequest,
    InspectResponse,
    LineSummary,
    PrototypeView,
    SynthRequest,
    SynthResponse,
)

_HTTP_STATUS = {"usage": 400, "data": 422, "solver": 500, "internal": 500}


def _make_config(body) -> SlpConfig:
    file_values = load_config_file(body.config_file) if body.config_file else None
    return build_config(
        file_values,
        k=body.k,
        epsilon=body.epsilon,
        lines=body.lines,
        algo=body.algo,
        budget=body.budget,
    )


def _parse_episode_spec(spec: str, dataset, shots: int | None):
    """Either a file of episodes or an inline "sample:N,seed" request."""
    if not spec.startswith("sample:"):
        return load_episodes(spec)
    rest = spec[len("sample:"):]
    parts = rest.split(",")
    if len(parts) != 2:
        raise UsageError(f'episode spec must be "sample:N,seed" or a file path, got {spec!r}')
    try:
        n_episodes, seed = int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise UsageError(f"episode spec needs integer count and seed, got {spec!r}") from exc
    if shots is None:
        raise UsageError('sampling episodes with "sample:N,seed" requires --shots')
    return sample_episodes(dataset, shots=shots, n_episodes=n_episodes, seed=seed)


def create_app() -> FastAPI:
    app = FastAPI(title="slproto", version=__version__)

    @app.exception_handler(SlprotoError)
    async def handle_known(_: Request, exc: SlprotoError) -> JSONResponse:
        return JSONResponse(
            status_code=_HTTP_STATUS[exc.category], content=exc.payload()
        )

    @app.exception_handler(RequestValidationError)
    async def handle_validation(_: Request, exc: RequestValidationError) -> JSONResponse:
        wrapped = UsageError(
            "invalid request body", detail={"errors": jsonable_encoder(exc.errors())}
        )
        return JSONResponse(status_code=400, content=wrapped.payload())

    @app.get("/health")
    async def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/api/fit", response_model=FitResponse)
    async def fit(body: FitRequest) -> FitResponse:
        config = _make_config(body)
        dataset = load_dataset(body.data)
        if body.shots is not None:
            support = sample_support(
                dataset, shots=body.shots, seed=0 if body.seed is None else body.seed
            )
        else:
            support = dataset.instances
        model = fit_model(support, config)
        if body.out:
            save_model(model, body.out)
        meta = model.metadata
        return FitResponse(
            m=model.m,
            n=model.n,
            class_order=model.class_order,
            lines=[LineSummary(**line) for line in _line_rows(meta)],
            uncovered=meta["uncovered"],
            warnings=meta["warnings"],
            out=body.out,
            document=model_to_doc(model),
        )

    @app.post("/api/eval", response_model=EvalResponse)
    async def evaluate(body: EvalRequest) -> EvalResponse:
        config = _make_config(body)
        dataset = load_dataset(body.data)
        episodes = _parse_episode_spec(body.episodes, dataset, body.shots)
        reports = run_task(dataset, episodes, body.classifiers, config)
        docs = [report_to_doc(r) for r in reports]
        csv_text = reports_to_csv(reports)
        if body.out_json:
            atomic_write_text(
                body.out_json, json.dumps({"reports": docs}, indent=2) + "\n"
            )
        if body.out_csv:
            atomic_write_text(body.out_csv, csv_text)
        return EvalResponse(
            reports=docs, csv=csv_text, out_json=body.out_json, out_csv=body.out_csv
        )

    @app.post("/api/inspect", response_model=InspectResponse)
    async def inspect(body: InspectRequest) -> InspectResponse:
        model = load_model(body.path)
        views = []
        for index, proto in enumerate(model.prototypes):
            views.append(
                PrototypeView(
                    index=index,
                    norm=float(np.linalg.norm(proto.location)),
                    line_index=proto.line_index,
                    distribution={
                        cls: float(p)
                        for cls, p in zip(model.class_order, proto.soft_label)
                    },
                )
            )
        return InspectResponse(
            schema_version=MODEL_SCHEMA,
            m=model.m,
            n=model.n,
            class_order=model.class_order,
            prototypes=views,
            lines=_line_rows(model.metadata),
            bar_chart_csv=_bar_chart_csv(views),
        )

    @app.post("/api/synth", response_model=SynthResponse)
    async def synth(body: SynthRequest) -> SynthResponse:
        dataset = gen_synthetic(body.specs, seed=body.seed)
        save_dataset(dataset, body.out, fmt=body.fmt)
        return SynthResponse(
            out=body.out,
            instances=len(dataset.instances),
            classes=dataset.classes,
            dimension=dataset.dimension,
        )

    return app


def _line_rows(metadata: dict) -> list[dict]:
    rows = []
    for line in metadata.get("lines", []):
        rows.append(
            {
                "index": line["index"],
                "classes": line["classes"],
                "assigned": line["assigned"],
                "margin": line["margin"],
                "fallback": line["fallback"],
            }
        )
    return rows


def _bar_chart_csv(views: list[PrototypeView]) -> str:
    """Long-form rows ready for a grouped bar chart: one row per
    (prototype, class) with that class's probability."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["prototype", "class", "probability"])
    for view in views:
        for cls, prob in view.distribution.items():
            writer.writerow([view.index, cls, f"{prob:.6f}"])
    return buf.getvalue()
