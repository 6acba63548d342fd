"""Interactive tuning service.

Holds colorization sessions in memory. Each session owns its inputs
(target page, hint, optional line art, strokes), a parameter set, and the
cached stage outputs; every mutation recomputes only the stages downstream
of what changed, so a UI can poll version counters to refresh previews.

Status codes: 404 unknown session or stage, 409 request valid but the
session is not in a state to honor it (no target yet, mismatched sizes),
422 values out of range (body names the field and its permissible range).
"""

from __future__ import annotations

import os
import threading
import uuid
from collections import OrderedDict
from dataclasses import replace
from typing import Optional

from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.responses import JSONResponse

from .errors import BoundsError, DimensionError, MangahueError, ParameterError
from .pipeline import (
    PARAM_BOUNDS,
    STAGES,
    PipelineInput,
    PipelineParams,
    rerun_from,
    run,
)
from .raster import encode_png, load_color, load_grey
from .segment import StrokeSet

_INT_FIELDS = frozenset({
    "blur_radius", "initial_ball", "saturation_delta", "k_colors", "seed",
    "adaptive_window", "adaptive_offset", "min_speck_area", "binarize_threshold",
})
_BOOL_FIELDS = frozenset({"enable_shading", "screentones"})
_PATCH_FIELDS = _INT_FIELDS | _BOOL_FIELDS


def default_addr() -> str:
    return os.environ.get("MANGAHUE_ADDR", "127.0.0.1:8765")


def default_max_sessions() -> int:
    raw = os.environ.get("MANGAHUE_MAX_SESSIONS", "")
    try:
        n = int(raw)
    except ValueError:
        return 16
    return n if n >= 1 else 16


class Session:
    """One tuning workspace: inputs, parameters, cached stage outputs."""

    def __init__(self, sid: str) -> None:
        self.id = sid
        self.lock = threading.Lock()
        self.params = PipelineParams()
        self.screentones = True
        self.target = None
        self.hint = None
        self.lineart = None
        self.strokes = StrokeSet()
        self.outputs = None

    @property
    def ready(self) -> bool:
        return self.target is not None and self.hint is not None

    def pipeline_input(self) -> PipelineInput:
        return PipelineInput(
            target_mono=self.target, hint=self.hint,
            target_lineart=self.lineart, strokes=self.strokes,
            screentones=self.screentones)

    def recompute(self, changed: set) -> None:
        """Re-run affected stages; callers must have validated the mutation."""
        if not self.ready:
            return
        inp = self.pipeline_input()
        self.params.validate(removal_runs=inp.removal_runs)
        if self.outputs is None:
            self.outputs = run(inp, self.params)
        else:
            self.outputs = rerun_from(self.outputs, inp, self.params, changed)

    def state(self) -> dict:
        bounds = {name: dict(entry) for name, entry in PARAM_BOUNDS.items()}
        return {
            "id": self.id,
            "params": {
                "blur_radius": self.params.blur_radius,
                "initial_ball": self.params.initial_ball,
                "saturation_delta": self.params.saturation_delta,
                "k_colors": self.params.k_colors,
                "enable_shading": self.params.enable_shading,
                "seed": self.params.seed,
                "adaptive_window": self.params.adaptive_window,
                "adaptive_offset": self.params.adaptive_offset,
                "min_speck_area": self.params.min_speck_area,
                "binarize_threshold": self.params.binarize_threshold,
                "screentones": self.screentones,
            },
            "inputs": {
                "target": None if self.target is None else
                    {"width": self.target.width, "height": self.target.height},
                "hint": None if self.hint is None else
                    {"width": self.hint.width, "height": self.hint.height},
                "lineart": None if self.lineart is None else
                    {"width": self.lineart.width, "height": self.lineart.height},
                "strokes": len(self.strokes.strokes),
            },
            "versions": dict(self.outputs.versions) if self.outputs else None,
            "stages": list(STAGES),
            "bounds": bounds,
        }


class SessionStore:
    """id -> Session map with least-recently-used eviction."""

    def __init__(self, max_sessions: int) -> None:
        self._lock = threading.Lock()
        self._sessions: "OrderedDict[str, Session]" = OrderedDict()
        self.max_sessions = max_sessions

    def create(self) -> Session:
        sess = Session(uuid.uuid4().hex)
        with self._lock:
            while len(self._sessions) >= self.max_sessions:
                self._sessions.popitem(last=False)
            self._sessions[sess.id] = sess
        return sess

    def get(self, sid: str) -> Session:
        with self._lock:
            sess = self._sessions.get(sid)
            if sess is None:
                raise HTTPException(status_code=404, detail=f"no session {sid}")
            self._sessions.move_to_end(sid)
            return sess

    def delete(self, sid: str) -> None:
        with self._lock:
            if sid not in self._sessions:
                raise HTTPException(status_code=404, detail=f"no session {sid}")
            del self._sessions[sid]

    def __len__(self) -> int:
        with self._lock:
            return len(self._sessions)


def _check_patch_types(body: dict) -> dict:
    if not isinstance(body, dict):
        raise HTTPException(status_code=422, detail="body must be a JSON object")
    for key, val in body.items():
        if key not in _PATCH_FIELDS:
            raise HTTPException(
                status_code=422,
                detail=f"unknown parameter {key!r}; known: {sorted(_PATCH_FIELDS)}")
        if key in _BOOL_FIELDS:
            if not isinstance(val, bool):
                raise HTTPException(status_code=422, detail=f"{key} must be a boolean")
        elif key == "k_colors" and val is None:
            pass
        elif not isinstance(val, int) or isinstance(val, bool):
            raise HTTPException(status_code=422, detail=f"{key} must be an integer")
    return body


def create_app(max_sessions: Optional[int] = None) -> FastAPI:
    """Build the service; sessions live for the lifetime of the app object."""
    store = SessionStore(max_sessions or default_max_sessions())
    app = FastAPI(title="mangahue tuner", version="0.1.0")
    app.state.store = store

    @app.exception_handler(ParameterError)
    async def _param_error(request: Request, exc: ParameterError):
        return JSONResponse(status_code=422, content={
            "detail": str(exc), "field": exc.field, "permissible": exc.permissible})

    @app.exception_handler(BoundsError)
    async def _bounds_error(request: Request, exc: BoundsError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(DimensionError)
    async def _dim_error(request: Request, exc: DimensionError):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.exception_handler(MangahueError)
    async def _domain_error(request: Request, exc: MangahueError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.post("/sessions", status_code=201)
    async def create_session():
        sess = store.create()
        return sess.state()

    @app.get("/sessions/{sid}/state")
    async def get_state(sid: str):
        sess = store.get(sid)
        with sess.lock:
            return sess.state()

    @app.delete("/sessions/{sid}", status_code=204)
    async def delete_session(sid: str):
        store.delete(sid)
        return Response(status_code=204)

    @app.put("/sessions/{sid}/target")
    async def put_target(sid: str, request: Request):
        sess = store.get(sid)
        data = await request.body()
        image = load_grey(data)
        with sess.lock:
            if sess.lineart is not None and (
                    (sess.lineart.width, sess.lineart.height)
                    != (image.width, image.height)):
                raise DimensionError(
                    f"target {image.width}x{image.height} does not match "
                    f"lineart {sess.lineart.width}x{sess.lineart.height}")
            for stroke in sess.strokes.strokes:
                for x, y in stroke.points:
                    if not (0 <= x < image.width and 0 <= y < image.height):
                        raise HTTPException(
                            status_code=409,
                            detail=f"existing stroke point ({x}, {y}) falls outside "
                                   f"the new target {image.width}x{image.height}; "
                                   f"clear strokes first")
            sess.target = image
            sess.recompute({"target"})
            return sess.state()

    @app.put("/sessions/{sid}/hint")
    async def put_hint(sid: str, request: Request):
        sess = store.get(sid)
        data = await request.body()
        image = load_color(data)
        with sess.lock:
            sess.hint = image
            sess.recompute({"hint"})
            return sess.state()

    @app.put("/sessions/{sid}/lineart")
    async def put_lineart(sid: str, request: Request):
        sess = store.get(sid)
        data = await request.body()
        image = load_grey(data)
        with sess.lock:
            if sess.target is not None and (
                    (sess.target.width, sess.target.height)
                    != (image.width, image.height)):
                raise DimensionError(
                    f"lineart {image.width}x{image.height} does not match "
                    f"target {sess.target.width}x{sess.target.height}")
            sess.lineart = image
            sess.recompute({"lineart"})
            return sess.state()

    @app.delete("/sessions/{sid}/lineart")
    async def delete_lineart(sid: str):
        sess = store.get(sid)
        with sess.lock:
            if sess.lineart is None:
                raise HTTPException(status_code=404, detail="no lineart uploaded")
            sess.lineart = None
            sess.recompute({"lineart"})
            return sess.state()

    @app.patch("/sessions/{sid}/params")
    async def patch_params(sid: str, request: Request):
        sess = store.get(sid)
        try:
            body = await request.json()
        except Exception:
            raise HTTPException(status_code=422, detail="body must be valid JSON")
        body = _check_patch_types(body)
        with sess.lock:
            screentones = body.get("screentones", sess.screentones)
            updates = {k: v for k, v in body.items() if k != "screentones"}
            candidate = replace(sess.params, **updates)
            removal_runs = screentones and sess.lineart is None
            candidate.validate(removal_runs=removal_runs)
            changed = {k for k, v in updates.items()
                       if getattr(sess.params, k) != v}
            if screentones != sess.screentones:
                changed.add("screentones")
            sess.params = candidate
            sess.screentones = screentones
            if changed:
                sess.recompute(changed)
            return sess.state()

    @app.post("/sessions/{sid}/strokes")
    async def post_strokes(sid: str, request: Request):
        sess = store.get(sid)
        try:
            body = await request.json()
        except Exception:
            raise HTTPException(status_code=422, detail="body must be valid JSON")
        try:
            new = StrokeSet.from_obj(body)
        except (ValueError, TypeError, KeyError, IndexError) as exc:
            raise HTTPException(status_code=422, detail=f"bad strokes: {exc}")
        with sess.lock:
            if sess.target is None:
                raise HTTPException(
                    status_code=409, detail="upload a target before adding strokes")
            w, h = sess.target.width, sess.target.height
            for stroke in new.strokes:
                for x, y in stroke.points:
                    if not (0 <= x < w and 0 <= y < h):
                        raise HTTPException(
                            status_code=422,
                            detail=f"stroke point ({x}, {y}) outside image {w}x{h}")
            if new.strokes:
                sess.strokes = StrokeSet(sess.strokes.strokes + new.strokes)
                sess.recompute({"strokes"})
            return sess.state()

    @app.delete("/sessions/{sid}/strokes")
    async def clear_strokes(sid: str):
        sess = store.get(sid)
        with sess.lock:
            if sess.strokes.strokes:
                sess.strokes = StrokeSet()
                sess.recompute({"strokes"})
            return sess.state()

    @app.get("/sessions/{sid}/stages/{name}.png")
    async def get_stage(sid: str, name: str):
        sess = store.get(sid)
        if name not in STAGES:
            raise HTTPException(
                status_code=404, detail=f"unknown stage {name!r}; known: {list(STAGES)}")
        with sess.lock:
            if sess.outputs is None:
                missing = [k for k in ("target", "hint")
                           if getattr(sess, k) is None]
                raise HTTPException(
                    status_code=409,
                    detail=f"stages not computed yet; missing inputs: {missing}")
            image = sess.outputs.stage_image(name, viz_seed=sess.params.seed)
            data = encode_png(image)
            version = sess.outputs.versions[name]
        return Response(content=data, media_type="image/png",
                        headers={"X-Stage-Version": str(version)})

    return app
