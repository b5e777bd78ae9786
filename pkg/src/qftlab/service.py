"""HTTP + JSON service backing the interactive loop-shaping UI.

Sessions hold immutable caches (plants, templates, bounds) computed eagerly
at creation; only the current controller design and its revision counter
mutate, serialized per session.  All numbers the UI displays originate
here.
"""

from __future__ import annotations

import json
import math
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import FileResponse, JSONResponse

from . import bounds as qb
from . import plant as qp
from . import roadsim as qr
from .config import RunConfig, config_from_json, default_config_path, load_config
from .lti import RationalTF, freq_eval, to_nichols
from .shaping import (
    ControllerDesign,
    compose_controller,
    design_from_json,
    design_to_json,
    load_design,
    loop_report_to_json,
    validate_design,
)

__all__ = ["create_app", "app"]

GAIN_FLOOR_DB, GAIN_CAP_DB = qb.GAIN_WINDOW_DB

# Dense display grid for the loop polyline.
DISPLAY_OMEGAS = tuple(float(w) for w in np.logspace(-2, 3, 201))


def _db_or_clamp(x: float) -> tuple[float, bool]:
    if x == -math.inf:
        return GAIN_FLOOR_DB, True
    if x == math.inf:
        return GAIN_CAP_DB, True
    return min(max(x, GAIN_FLOOR_DB), GAIN_CAP_DB), not (
        GAIN_FLOOR_DB <= x <= GAIN_CAP_DB
    )


def _interval_json(lo_db: float, hi_db: float) -> dict:
    lo, lo_trunc = _db_or_clamp(lo_db)
    hi, hi_trunc = _db_or_clamp(hi_db)
    return {"lo_db": lo, "hi_db": hi,
            "lo_truncated": lo_trunc, "hi_truncated": hi_trunc}


def _bound_curve_json(curve: qb.BoundCurve) -> dict:
    return {
        "omega": curve.omega,
        "spec_kind": curve.spec_kind,
        "phases": list(curve.phase_grid),
        "gain_sets": [
            [_interval_json(qb._to_db(lo), qb._to_db(hi)) for lo, hi in s]
            for s in curve.sets
        ],
        "empty_phases": list(curve.empty_phases),
    }


def _nichols_bound_json(nb: qb.NicholsBound) -> dict:
    return {
        "omega": nb.omega,
        "spec_kind": nb.spec_kind,
        "points": [
            {"phase_deg": phase, "intervals": [_interval_json(lo, hi)
                                               for lo, hi in ivs]}
            for phase, ivs in nb.points
        ],
    }


@dataclass
class Session:
    id: str
    config: RunConfig
    plants: list
    templates: list
    bound_curves: dict[str, list[qb.BoundCurve]]
    loop_plane: dict[str, list[qb.NicholsBound]]
    design: ControllerDesign | None = None
    revision: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    def __init__(self):
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def add(self, s: Session) -> None:
        with self._lock:
            self._sessions[s.id] = s

    def get(self, sid: str) -> Session:
        with self._lock:
            s = self._sessions.get(sid)
        if s is None:
            raise HTTPException(status_code=404, detail=f"no session {sid}")
        return s


def _build_session(cfg: RunConfig) -> Session:
    plants = qp.sample_plants(cfg.uncertainty, cfg.levels)
    templates = [qb.compute_template(plants, w) for w in cfg.grid]
    tracking = [qb.tracking_bound(t, cfg.tracking.w_st) for t in templates]
    disturbance = [qb.disturbance_bound(t, cfg.disturbance.w_sd)
                   for t in templates]
    intersection = [qb.intersect_bounds([a, b])
                    for a, b in zip(tracking, disturbance)]
    curves = {"tracking": tracking, "disturbance": disturbance,
              "intersection": intersection}
    loop_plane = {
        kind: [qb.nominal_loop_bound(c, t.nominal)
               for c, t in zip(cs, templates)]
        for kind, cs in curves.items()
    }
    return Session(
        id=uuid.uuid4().hex,
        config=cfg,
        plants=plants,
        templates=templates,
        bound_curves=curves,
        loop_plane=loop_plane,
    )


def _loop_samples(gu: RationalTF, gc: RationalTF, design_freqs) -> list[dict]:
    design_set = set(design_freqs)
    omegas = sorted(set(DISPLAY_OMEGAS) | design_set)
    out = []
    for w in omegas:
        z = freq_eval(gu, w) * freq_eval(gc, w)
        if z == 0:
            continue
        pt = to_nichols(z)
        out.append({
            "omega": w,
            "phase_deg": pt.phase_deg,
            "mag_db": pt.mag_db,
            "is_design_freq": w in design_set,
        })
    return out


def _evaluate(session: Session, design: ControllerDesign) -> dict:
    gc = compose_controller(design)
    if not gc.is_proper:
        raise HTTPException(
            status_code=422,
            detail={
                "error": "improper_controller",
                "relative_degree": gc.relative_degree,
            },
        )
    cfg = session.config
    report = validate_design(design, session.plants, cfg.tracking,
                             cfg.disturbance, cfg.grid)
    nominal = session.plants[qp.nominal_index(session.plants)]
    samples = _loop_samples(nominal.Gu, gc, cfg.grid)
    with session.lock:
        session.design = design
        session.revision += 1
        revision = session.revision
    return {
        "revision": revision,
        "design": design_to_json(design),
        "controller": {"num": list(gc.num.coeffs), "den": list(gc.den.coeffs)},
        "loop": samples,
        "report": loop_report_to_json(report),
    }


def create_app(frontend_dir: Path | None = None) -> FastAPI:
    app = FastAPI(title="qftlab service", version="0.1.0")
    store = SessionStore()

    @app.exception_handler(ValueError)
    async def value_error_handler(request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.post("/sessions")
    async def create_session(request: Request):
        body = await request.body()
        if not body:
            cfg = load_config(default_config_path())
        else:
            try:
                obj = json.loads(body)
            except json.JSONDecodeError as exc:
                raise HTTPException(status_code=400,
                                    detail=f"malformed JSON body: {exc}")
            cfg = config_from_json(obj, default_config_path().parent)
        session = _build_session(cfg)
        store.add(session)
        return {
            "id": session.id,
            "frequencies": list(cfg.grid),
            "num_plants": len(session.plants),
            "levels": cfg.levels,
            "revision": session.revision,
            "w_st": cfg.tracking.w_st,
            "w_sd": cfg.disturbance.w_sd,
            "controller_file": str(cfg.controller_file)
            if cfg.controller_file else None,
        }

    @app.get("/sessions/{sid}/templates")
    async def get_templates(sid: str):
        s = store.get(sid)
        return {
            "templates": [
                {
                    "omega": t.omega,
                    "nominal_index": t.nominal_idx,
                    "points": [
                        {
                            "re": z.real, "im": z.imag,
                            "phase_deg": to_nichols(z).phase_deg,
                            "mag_db": to_nichols(z).mag_db,
                            "is_nominal": i == t.nominal_idx,
                        }
                        for i, z in enumerate(t.points)
                    ],
                }
                for t in s.templates
            ]
        }

    @app.get("/sessions/{sid}/bounds")
    async def get_bounds(sid: str):
        s = store.get(sid)
        return {
            "controller_plane": {
                kind: [_bound_curve_json(c) for c in cs]
                for kind, cs in s.bound_curves.items()
            },
            "loop_plane": {
                kind: [_nichols_bound_json(nb) for nb in nbs]
                for kind, nbs in s.loop_plane.items()
            },
        }

    @app.put("/sessions/{sid}/controller")
    async def put_controller(sid: str, request: Request):
        s = store.get(sid)
        try:
            obj = json.loads(await request.body())
        except json.JSONDecodeError as exc:
            raise HTTPException(status_code=400,
                                detail=f"malformed JSON body: {exc}")
        if isinstance(obj, dict) and "elements" in obj:
            obj = obj["elements"]
        design = design_from_json(obj)
        return _evaluate(s, design)

    @app.get("/sessions/{sid}/report")
    async def get_report(sid: str):
        s = store.get(sid)
        with s.lock:
            design = s.design
            revision = s.revision
        if design is None:
            cfg = s.config
            if cfg.controller_file is not None:
                design = load_design(cfg.controller_file)
            else:
                raise HTTPException(status_code=404,
                                    detail="no controller submitted yet")
        cfg = s.config
        report = validate_design(design, s.plants, cfg.tracking,
                                 cfg.disturbance, cfg.grid)
        return {
            "revision": revision,
            "design": design_to_json(design),
            "report": loop_report_to_json(report),
        }

    @app.post("/sessions/{sid}/simulate")
    async def simulate(sid: str, request: Request):
        s = store.get(sid)
        try:
            obj = json.loads(await request.body() or b"{}")
        except json.JSONDecodeError as exc:
            raise HTTPException(status_code=400,
                                detail=f"malformed JSON body: {exc}")
        profile = qr.road_profile_from_json(
            obj.get("scenario", {"kind": "two_bumps", "params": {}}))
        dt = float(obj.get("dt", s.config.sim_dt))
        T = float(obj.get("T", s.config.sim_T))
        decimate = max(1, int(obj.get("decimate", 10)))
        loop_mode = obj.get("loop_mode", "both")
        with s.lock:
            design = s.design
        if design is None and s.config.controller_file is not None:
            design = load_design(s.config.controller_file)
        nominal = s.plants[qp.nominal_index(s.plants)]
        road = qr.generate_road(profile, dt, T)

        def series(r: qr.SimResult) -> dict:
            sl = slice(None, None, decimate)
            return {
                "t": r.t[sl].tolist(),
                "x_a": r.x_a[sl].tolist(),
                "x_a_ddot": r.x_a_ddot[sl].tolist(),
                "x_t": r.x_t[sl].tolist(),
                "delta_a": r.delta_a[sl].tolist(),
                "metrics": qr.response_metrics(r),
            }

        out: dict[str, Any] = {"road": road[::decimate].tolist(),
                               "dt": dt, "T": T, "decimate": decimate}
        if loop_mode in ("open", "both"):
            out["open"] = series(qr.simulate_open_loop(nominal, road, dt, T))
        if loop_mode in ("closed", "both"):
            if design is None:
                raise HTTPException(status_code=404,
                                    detail="no controller submitted yet")
            try:
                out["closed"] = series(
                    qr.simulate_closed_loop(nominal, design, road, dt, T))
            except qr.UnstableLoopError as exc:
                raise HTTPException(
                    status_code=422,
                    detail={"error": "unstable_loop", "message": str(exc)},
                )
        return out

    if frontend_dir is not None and frontend_dir.exists():
        @app.get("/")
        async def index():
            return FileResponse(frontend_dir / "index.html")

        @app.get("/dist/{path:path}")
        async def dist(path: str):
            target = (frontend_dir / "dist" / path).resolve()
            if not str(target).startswith(str((frontend_dir / "dist").resolve())):
                raise HTTPException(status_code=404, detail="not found")
            if not target.is_file():
                raise HTTPException(status_code=404, detail="not found")
            return FileResponse(target)

    return app


app = create_app()
