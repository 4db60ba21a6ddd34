"""HTTP + JSON API over the review loop, plus static hosting of the UI.

Spans travel as [start, end, "CODE"] triples everywhere. Optimistic
concurrency: writes carry the version the client saw and fail with 409
when stale. All state changes go through the event-sourced store, so a
killed server replays to the same state.
"""

from __future__ import annotations

import threading
from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .errors import ConfigError, ValidationError, VersionConflict
from .labels import MOVE_LABELS, label_colors
from .records import Span
from .review import ReviewTask
from .segment import segment_sentences
from .service import LoopService
from .stats import compute_corpus_stats, stats_to_json_dict

_FALLBACK_PAGE = """<!doctype html>
<html><head><title>movekit review</title></head>
<body><h1>movekit review service</h1>
<p>The review UI bundle is not built. The JSON API is live under
<code>/api/</code>; see the README for endpoints and for building the
frontend.</p></body></html>
"""


class AnnotationUpdate(BaseModel):
    spans: list[list]
    expected_version: int
    reviewer: str | None = None


def _record_payload(service: LoopService, task: ReviewTask) -> dict:
    rec = task.record
    try:
        sents = segment_sentences(rec.abstract.text, service.seg_cfg)
        sentences = [[s.start, s.end] for s in sents]
    except ValueError:
        sentences = []
    return {
        "abstract_id": rec.abstract.id,
        "data": rec.abstract.text,
        "label": [s.as_triple() for s in rec.annotation.spans],
        "provenance": list(rec.annotation.provenance),
        "model_version": rec.annotation.model_version,
        "status": rec.status,
        "task_status": task.status,
        "version": task.version,
        "reviewer": task.reviewer,
        "sentences": sentences,
    }


def _parse_spans(raw: list[list]) -> list[Span]:
    spans = []
    for t in raw:
        if len(t) != 3:
            raise ValidationError(f"malformed span triple {t!r}")
        spans.append(Span(int(t[0]), int(t[1]), str(t[2])))
    return spans


def create_app(service: LoopService, frontend_dist: Path | None = None) -> FastAPI:
    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        service.store.close()  # flush events and write a snapshot

    app = FastAPI(title="movekit review service", lifespan=lifespan)

    @app.get("/api/labels")
    def get_labels():
        colors = label_colors()
        return {"labels": [{"code": l.code, "name": l.name,
                            "definition": l.definition, "color": colors[l.code]}
                           for l in MOVE_LABELS]}

    @app.get("/api/tasks/next")
    def get_next_task(reviewer: str | None = Query(default=None)):
        task = service.next_task(reviewer)
        if task is None:
            return JSONResponse({"task": None}, status_code=200)
        return {"task": _record_payload(service, task)}

    @app.get("/api/abstracts/{abstract_id}")
    def get_abstract(abstract_id: str):
        try:
            task = service.store.get_task(abstract_id)
        except KeyError as e:
            raise HTTPException(status_code=404, detail=str(e)) from e
        return _record_payload(service, task)

    @app.put("/api/abstracts/{abstract_id}/annotation")
    def put_annotation(abstract_id: str, update: AnnotationUpdate):
        try:
            spans = _parse_spans(update.spans)
            version = service.submit_correction(
                abstract_id, update.expected_version, spans, update.reviewer)
        except KeyError as e:
            raise HTTPException(status_code=404, detail=str(e)) from e
        except VersionConflict as e:
            raise HTTPException(status_code=409, detail=str(e)) from e
        except ValidationError as e:
            raise HTTPException(status_code=422, detail=str(e)) from e
        return {"version": version}

    @app.post("/api/abstracts/{abstract_id}/finalize")
    def post_finalize(abstract_id: str):
        try:
            service.finalize(abstract_id)
            task = service.store.get_task(abstract_id)
        except KeyError as e:
            raise HTTPException(status_code=404, detail=str(e)) from e
        return _record_payload(service, task)

    @app.get("/api/reports/confusion")
    def get_confusion(since_ts: float | None = Query(default=None)):
        pairs = service.confusion_report(since_ts)
        return {"pairs": [{"from": o, "to": n, "count": c} for o, n, c in pairs]}

    @app.post("/api/retrain")
    def post_retrain(force: bool = Query(default=False),
                     background: bool = Query(default=False)):
        if background:
            threading.Thread(target=service.retrain, kwargs={"force": force},
                             daemon=True).start()
            return {"started": True}
        report = service.retrain(force=force)
        return {"ran": report.ran, "promoted": report.promoted,
                "reason": report.reason, "new_version": report.new_version,
                "new_dev_f1": report.new_dev_f1,
                "baseline_dev_f1": report.baseline_dev_f1}

    @app.get("/api/stats")
    def get_stats():
        records = service.store.all_records()
        payload = {"queue": service.store.queue_counts(),
                   "n_abstracts": len(records)}
        annotated = [r for r in records if r.annotation.spans]
        if annotated:
            payload["corpus"] = stats_to_json_dict(
                compute_corpus_stats(annotated, service.seg_cfg))
        active = service.registry.active_info()
        payload["active_model"] = active
        return payload

    @app.get("/api/saliency/{abstract_id}/{sentence_index}")
    def get_saliency(abstract_id: str, sentence_index: int):
        try:
            vec = service.saliency_for_sentence(abstract_id, sentence_index)
        except KeyError as e:
            raise HTTPException(status_code=404, detail=str(e)) from e
        except IndexError as e:
            raise HTTPException(status_code=404, detail=str(e)) from e
        except ConfigError as e:
            raise HTTPException(status_code=503, detail=str(e)) from e
        return {"words": list(vec.words), "values": list(vec.values),
                "label": vec.label}

    if frontend_dist is not None and (frontend_dist / "index.html").exists():
        app.mount("/", StaticFiles(directory=frontend_dist, html=True), name="ui")
    else:
        @app.get("/", response_class=HTMLResponse)
        def index():
            return _FALLBACK_PAGE

    return app
