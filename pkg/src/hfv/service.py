"""HTTP JSON service exposing the tuning pipeline to the companion UI.

Routes: GET /api/summary, POST /api/diagram, GET
/api/transient/temperature, GET /api/transient/flow, POST /api/export.
The service is read-only over the dataset directory; the project cache
(when configured) is the only writable location. Filter pipeline order
is fixed: grouping, then selection, then radiant threshold.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel, Field

from . import cache as project_cache
from .errors import DatasetValidationError, HfvError, NameLookupError
from .graph import (
    SubmodelGraph,
    aggregate_to_submodels,
    apply_grouping,
    apply_radiant_threshold,
    apply_selection,
    compute_node_flows,
    pair_flow_series,
    submodel_temperature_series,
)
from .layout import LayoutKind, compute_layout
from .model import ConductorKind
from .parser import (
    TemperatureSlice,
    load_conductors,
    load_temperatures,
    parse_node_tree_fast,
    read_sizes,
)
from .render import DiagramSpec, build_diagram, build_series_payload, render_svg

DEFAULT_SEED = 0


class ApiError(HfvError):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


class DiagramRequest(BaseModel):
    timestep: int = 0
    include: list[str] | None = None
    groups: dict[str, list[str]] | None = None
    radiant_threshold: float = 0.0
    layout: str = "circular"
    seed: int | None = None
    units: dict[str, str] = Field(default_factory=lambda: {"temp": "K", "power": "W"})
    width: int = 1000
    height: int = 700


class DatasetSession:
    """Immutable dataset state shared by all requests."""

    def __init__(self, dataset_dir: str | Path, project_dir: str | Path | None = None):
        self.dataset_dir = Path(dataset_dir)
        self.sizes = read_sizes(self.dataset_dir)
        self.index = parse_node_tree_fast(self.dataset_dir)
        self.conductors = load_conductors(self.dataset_dir)
        self.handle = (
            project_cache.init_project(project_dir, self.dataset_dir)
            if project_dir is not None
            else None
        )
        self._full: TemperatureSlice | None = None

    def full_temps(self) -> TemperatureSlice:
        if self._full is None:
            self._full = load_temperatures(self.dataset_dir, sizes=self.sizes)
        return self._full

    def temps_row(self, t: int) -> np.ndarray:
        """One timestep's node temperatures, via the project cache if bound."""
        if self.handle is not None:
            row = project_cache.load_cached(self.handle, t)
            if row is not project_cache.MISS:
                return row
        sl = load_temperatures(
            self.dataset_dir, timesteps=range(t, t + 1), sizes=self.sizes
        )
        row = sl.values[0]
        if self.handle is not None:
            project_cache.cache_timestep(self.handle, t, row)
        return row

    def build_graph(self, req: DiagramRequest) -> tuple[SubmodelGraph, float]:
        """Run group -> select -> threshold; returns the graph plus the
        pre-threshold maximum radiative edge flow (slider range hint)."""
        if not (0 <= req.timestep < self.sizes.num_timesteps):
            raise ApiError(
                "bad_timestep",
                f"timestep {req.timestep} outside [0, {self.sizes.num_timesteps})",
            )
        if req.radiant_threshold < 0:
            raise ApiError("bad_threshold", "radiant_threshold must be >= 0")
        temps_row = self.temps_row(req.timestep)
        flows = compute_node_flows(self.conductors, temps_row)
        try:
            if req.groups:
                graph = apply_grouping(
                    self.index, flows, temps_row, req.groups, timestep=req.timestep
                )
            else:
                graph = aggregate_to_submodels(
                    self.index, flows, temps_row, timestep=req.timestep
                )
            if req.include is not None:
                graph = apply_selection(graph, set(req.include))
        except NameLookupError as e:
            raise ApiError("unknown_submodel", str(e)) from e
        except DatasetValidationError as e:
            raise ApiError("overlapping_groups", str(e)) from e
        max_radiative = max(
            (e.q_watts for e in graph.edges if e.kind is ConductorKind.RADIATIVE),
            default=0.0,
        )
        graph = apply_radiant_threshold(graph, req.radiant_threshold)
        return graph, max_radiative

    def build_diagram(self, req: DiagramRequest) -> tuple[DiagramSpec, dict]:
        graph, max_radiative = self.build_graph(req)
        try:
            kind = LayoutKind(req.layout)
        except ValueError:
            raise ApiError("bad_layout", f"unknown layout {req.layout!r}") from None
        seed = req.seed if req.seed is not None else DEFAULT_SEED
        layout_result = compute_layout(graph, kind, seed=seed)
        diagram = build_diagram(graph, layout_result, req.units)
        meta = {"max_radiative_q": max_radiative}
        return diagram, meta


def create_app(
    dataset_dir: str | Path,
    project_dir: str | Path | None = None,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    session = DatasetSession(dataset_dir, project_dir)
    app = FastAPI(title="hfv")
    app.state.session = session

    @app.exception_handler(ApiError)
    async def api_error_handler(_request: Request, exc: ApiError):
        return JSONResponse(
            status_code=400, content={"error": exc.code, "message": exc.message}
        )

    @app.get("/api/summary")
    def summary():
        sizes = session.sizes
        return {
            "sizes": {
                "num_submodels": sizes.num_submodels,
                "num_nodes": sizes.num_nodes,
                "num_linear": sizes.num_linear,
                "num_radiative": sizes.num_radiative,
                "num_timesteps": sizes.num_timesteps,
            },
            "submodels": session.index.names,
            "timestamps": [float(t) for t in session.full_temps().timestamps],
        }

    @app.post("/api/diagram")
    def diagram(req: DiagramRequest):
        spec, meta = session.build_diagram(req)
        body = spec.to_dict()
        body["meta"] = meta
        return body

    @app.get("/api/transient/temperature")
    def transient_temperature(names: str, units: str = "K"):
        requested = [n for n in names.split(",") if n]
        if not requested:
            raise ApiError("unknown_submodel", "no submodel names given")
        known = set(session.index.names)
        for n in requested:
            if n not in known:
                raise ApiError("unknown_submodel", f"unknown submodel {n!r}")
        temps = session.full_temps()
        series = submodel_temperature_series(session.index, temps, requested)
        payload = build_series_payload(
            {name: (temps.timestamps, values) for name, values in series.items()},
            "temperature",
            {"temp": units, "power": "W"},
        )
        return payload

    @app.get("/api/transient/flow")
    def transient_flow(request: Request):
        frm = request.query_params.get("from", "")
        to = request.query_params.get("to", "")
        known = set(session.index.names)
        for n in (frm, to):
            if n not in known:
                raise ApiError("unknown_submodel", f"unknown submodel {n!r}")
        if frm == to:
            raise ApiError("self_pair", "flow endpoints must differ")
        series = pair_flow_series(
            session.index, session.conductors, session.full_temps(), frm, to
        )
        return build_series_payload(series, "flow")

    @app.post("/api/export")
    def export(req: DiagramRequest):
        spec, _meta = session.build_diagram(req)
        svg = render_svg(spec, req.width, req.height)
        return Response(content=svg, media_type="image/svg+xml")

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
