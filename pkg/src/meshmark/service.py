"""HTTP JSON API tying the store, selection, and detectors together.

All routes live under ``/api/v1``. Requests are parsed by hand from the
raw body so every failure, including malformed JSON, is answered with
the same envelope::

    { "error": { "code": ..., "message": ..., "details": { ... } } }

The service is stateless between requests: selections are computed
server-side from a camera pose plus a gesture and returned immediately,
and every response is a pure function of the store contents. Canonical
JSON bodies (selection results, exports, heat maps) end with a newline
and are byte-identical to the equivalent command-line output.
"""

from __future__ import annotations

import json
from datetime import timedelta

import numpy as np
from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from .annotations import (
    AnnotationRecord,
    FieldSchema,
    canonical_json,
    create_annotation,
    export_collection,
    from_wadm,
    parse_timestamp,
    to_wadm,
    utcnow,
    validate_wadm,
)
from .camera import CameraPose
from .detectors import run_detector
from .errors import (
    DetectorTimeoutError,
    DetectorUnknownError,
    DetectorUnreachableError,
    EmptyRoiError,
    IdConflictError,
    InvalidPolygonError,
    InvalidStrokeError,
    MeshmarkError,
    MeshMismatchError,
    ParseError,
    ProtocolError,
    SchemaViolationError,
    SelectorUnsupportedError,
    UnknownAnnotationError,
    UnknownMeshError,
    ValidationError,
)
from .mesh import derive_vertices
from .report import render_report
from .selection import BrushStroke, LassoPolygon, SelectionSet, brush_select, lasso_select
from .store import Store

API_PREFIX = "/api/v1"
_TICK = timedelta(microseconds=1)


class BadRequestError(MeshmarkError):
    """Malformed request payload or parameters."""


_ERROR_MAP = (
    (UnknownMeshError, 404, "unknown_model"),
    (UnknownAnnotationError, 404, "unknown_annotation"),
    (DetectorUnknownError, 404, "unknown_detector"),
    (IdConflictError, 409, "id_conflict"),
    (InvalidStrokeError, 400, "invalid_gesture"),
    (InvalidPolygonError, 400, "invalid_gesture"),
    (BadRequestError, 400, "bad_request"),
    (SchemaViolationError, 422, "schema_violation"),
    (SelectorUnsupportedError, 422, "selector_unsupported"),
    (ValidationError, 422, "validation_error"),
    (ParseError, 422, "parse_error"),
    (EmptyRoiError, 422, "empty_roi"),
    (MeshMismatchError, 422, "mesh_mismatch"),
    (ProtocolError, 422, "protocol_error"),
    (DetectorUnreachableError, 502, "detector_unreachable"),
    (DetectorTimeoutError, 504, "detector_timeout"),
)


def _error_response(exc: Exception) -> JSONResponse:
    details = {}
    if isinstance(exc, ValidationError) and exc.violations:
        details["violations"] = [{"path": v.path, "rule": v.rule} for v in exc.violations]
    if isinstance(exc, SchemaViolationError) and exc.keys:
        details["keys"] = list(exc.keys)
    if isinstance(exc, DetectorUnreachableError) and exc.body is not None:
        details["body"] = exc.body
    if isinstance(exc, ParseError):
        if exc.line is not None:
            details["line"] = exc.line
        if exc.offset is not None:
            details["offset"] = exc.offset
    if getattr(exc, "documents", None):
        details["documents"] = exc.documents
    for klass, status, code in _ERROR_MAP:
        if isinstance(exc, klass):
            return JSONResponse(
                {"error": {"code": code, "message": str(exc), "details": details}},
                status_code=status,
            )
    return JSONResponse(
        {"error": {"code": "internal", "message": str(exc), "details": details}},
        status_code=500,
    )


async def _json_body(request: Request):
    try:
        return json.loads(await request.body())
    except ValueError:
        raise BadRequestError("request body is not valid JSON")


def _flag(request: Request, name: str) -> bool:
    return request.query_params.get(name, "").lower() in ("1", "true", "yes")


def parse_gesture(doc) -> tuple:
    """Parse a gesture document into (camera, mode, gesture).

    The document shape is ``{"camera": {...}, "mode": "brush"|"lasso",
    "stroke": {"samples": [[x, y], ...], "radius": r}}`` or the same
    with ``"polygon": {"vertices": [[x, y], ...]}``. Exactly one of
    stroke/polygon must be present and must match the mode.

    Raises:
        ValueError: structural problems (missing keys, bad mode, bad
            camera parameters).
        InvalidStrokeError / InvalidPolygonError: gesture payloads that
            fail their own invariants.
    """
    if not isinstance(doc, dict):
        raise ValueError("gesture document must be a JSON object")
    if "camera" not in doc or not isinstance(doc["camera"], dict):
        raise ValueError("gesture document needs a 'camera' object")
    camera = CameraPose.from_dict(doc["camera"])
    mode = doc.get("mode")
    if mode not in ("brush", "lasso"):
        raise ValueError(f"mode must be 'brush' or 'lasso', got {mode!r}")
    has_stroke = "stroke" in doc
    has_polygon = "polygon" in doc
    if has_stroke == has_polygon:
        raise ValueError("exactly one of 'stroke' or 'polygon' must be present")
    if mode == "brush":
        if not has_stroke:
            raise ValueError("mode 'brush' requires a 'stroke'")
        s = doc["stroke"]
        if not isinstance(s, dict) or "samples" not in s or "radius" not in s:
            raise ValueError("'stroke' needs 'samples' and 'radius'")
        return camera, mode, BrushStroke(samples=s["samples"], radius=s["radius"])
    if not has_polygon:
        raise ValueError("mode 'lasso' requires a 'polygon'")
    p = doc["polygon"]
    if not isinstance(p, dict) or "vertices" not in p:
        raise ValueError("'polygon' needs 'vertices'")
    return camera, mode, LassoPolygon(vertices=p["vertices"])


def selection_response_body(faces) -> str:
    """Canonical selection result; shared verbatim by the CLI."""
    return canonical_json({"faces": [int(f) for f in faces]}) + "\n"


def heatmap_response_body(name: str, values: np.ndarray) -> str:
    """Canonical heat-map result; shared verbatim by the CLI."""
    vals = [float(v) for v in values]
    payload = {
        "detector": name,
        "values": vals,
        "min": min(vals),
        "max": max(vals),
        "mean": float(np.mean(vals)),
    }
    return canonical_json(payload) + "\n"


def _parse_color(value):
    if (not isinstance(value, (list, tuple)) or len(value) != 3
            or any(not isinstance(c, int) or isinstance(c, bool) for c in value)):
        raise BadRequestError("'color' must be three integers 0..255")
    return tuple(value)


def _parse_faces(value):
    if not isinstance(value, list) or any(
            not isinstance(f, int) or isinstance(f, bool) for f in value):
        raise BadRequestError("'faces' must be a list of integers")
    return value


def _parse_fields(value):
    if isinstance(value, dict):
        return list(value.items())
    if isinstance(value, list) and all(
            isinstance(p, (list, tuple)) and len(p) == 2 for p in value):
        return [(p[0], p[1]) for p in value]
    raise BadRequestError("'fields' must be an object or a list of [key, value] pairs")


def _resolve_schema(store: Store, ref) -> FieldSchema | None:
    """Schema reference from a payload: a registered name or an inline
    definition (registered on first use, must match on re-use)."""
    if ref is None:
        return None
    if isinstance(ref, str):
        schema = store.schemas().get(ref)
        if schema is None:
            raise SchemaViolationError(f"unknown schema {ref!r}")
        return schema
    if isinstance(ref, dict):
        try:
            schema = FieldSchema.from_dict(ref)
        except (KeyError, TypeError, ValueError) as exc:
            raise BadRequestError(f"invalid inline schema: {exc}")
        store.save_schema(schema)
        return schema
    raise BadRequestError("'schema' must be a name or a schema object")


def record_from_payload(store: Store, model_id: str, doc,
                        base: AnnotationRecord | None = None) -> AnnotationRecord:
    """Create or update an annotation record from a request payload.

    The payload carries any of title, color, faces, description,
    creator, fields, schema (a registered name or an inline
    definition), and created (RFC 3339, creation only). With ``base``
    set this is an update: id and created_at are preserved, missing
    keys keep their old values, and modified_at is bumped strictly
    above its previous value.
    """
    if not isinstance(doc, dict):
        raise BadRequestError("annotation payload must be a JSON object")
    mesh = store.get_mesh(model_id)

    if base is None and "title" not in doc:
        raise BadRequestError("'title' is required")
    title = doc.get("title", base.title if base else "")
    color = _parse_color(doc["color"]) if "color" in doc else (
        base.color if base else (255, 0, 0))
    description = doc.get("description", base.description if base else "")
    creator = doc.get("creator", base.creator if base else "")
    if not all(isinstance(v, str) for v in (title, description, creator)):
        raise BadRequestError("'title', 'description', and 'creator' must be strings")

    if "schema" in doc:
        schema = _resolve_schema(store, doc["schema"])
    elif base is not None and base.schema_name:
        schema = store.schemas().get(base.schema_name)
    else:
        schema = None
    if "fields" in doc:
        fields = _parse_fields(doc["fields"])
    else:
        fields = list(base.fields) if base else []

    if "faces" in doc:
        roi = SelectionSet(model_id, frozenset(_parse_faces(doc["faces"])))
    elif base is not None:
        roi = base.roi
    else:
        raise BadRequestError("'faces' is required")

    created = None
    if "created" in doc:
        try:
            created = parse_timestamp(doc["created"])
        except ValueError as exc:
            raise BadRequestError(str(exc))

    try:
        fresh = create_annotation(
            mesh, roi, title, color,
            description=description, fields=fields, schema=schema,
            creator=creator, created_at=created,
        )
    except ValueError as exc:
        raise BadRequestError(str(exc))
    if base is None:
        return fresh
    bump = max(utcnow(), base.modified_at + _TICK)
    return AnnotationRecord(
        id=base.id,
        mesh_id=base.mesh_id,
        title=fresh.title,
        color=fresh.color,
        roi=fresh.roi,
        derived_vertices=fresh.derived_vertices,
        description=fresh.description,
        schema_name=fresh.schema_name,
        schema_version=fresh.schema_version,
        fields=fresh.fields,
        created_at=base.created_at,
        modified_at=bump,
        creator=fresh.creator,
        extensions=base.extensions,
    )


def create_app(store: Store, detector_timeout: float | None = None) -> FastAPI:
    """Build the service around an open store.

    Args:
        store: persistence root; shared, thread-safe.
        detector_timeout: overrides every detector's own timeout when
            set (seconds).
    """
    app = FastAPI(title="meshmark", docs_url=None, redoc_url=None, openapi_url=None)

    @app.exception_handler(MeshmarkError)
    async def _meshmark_error(request: Request, exc: MeshmarkError):
        return _error_response(exc)

    @app.exception_handler(Exception)
    async def _internal_error(request: Request, exc: Exception):
        return _error_response(exc)

    # -- models ------------------------------------------------------

    @app.post(API_PREFIX + "/models")
    async def upload_model(request: Request):
        data = await request.body()
        fmt = request.query_params.get("format") or None
        if fmt is not None and fmt not in ("obj", "ply"):
            raise BadRequestError(f"format must be 'obj' or 'ply', got {fmt!r}")
        name = request.query_params.get("name", "")
        entry = store.upload_model(data, fmt=fmt, name=name)
        return JSONResponse(entry.to_dict(), status_code=200)

    @app.get(API_PREFIX + "/models")
    async def list_models():
        return [e.to_dict() for e in store.list_models()]

    @app.get(API_PREFIX + "/models/{model_id}")
    async def get_model(model_id: str):
        return store.get_entry(model_id).to_dict()

    @app.get(API_PREFIX + "/models/{model_id}/mesh")
    async def get_mesh_bytes(model_id: str):
        data, fmt = store.get_raw(model_id)
        return Response(
            content=data,
            media_type="application/octet-stream",
            headers={"Content-Disposition": f'attachment; filename="mesh.{fmt}"'},
        )

    # -- selection ---------------------------------------------------

    @app.post(API_PREFIX + "/models/{model_id}/select/{mode}")
    async def select(model_id: str, mode: str, request: Request):
        if mode not in ("brush", "lasso"):
            raise BadRequestError(f"selection mode must be 'brush' or 'lasso', got {mode!r}")
        mesh = store.get_mesh(model_id)
        doc = await _json_body(request)
        if isinstance(doc, dict):
            doc = dict(doc)
            doc.setdefault("mode", mode)
        try:
            camera, doc_mode, gesture = parse_gesture(doc)
        except ValueError as exc:
            raise BadRequestError(f"invalid gesture: {exc}")
        if doc_mode != mode:
            raise BadRequestError(
                f"gesture mode {doc_mode!r} does not match endpoint mode {mode!r}"
            )
        bvh = store.get_bvh(model_id)
        if mode == "brush":
            sel = brush_select(mesh, bvh, camera, gesture, mesh_id=model_id)
        else:
            sel = lasso_select(mesh, bvh, camera, gesture, mesh_id=model_id)
        return Response(
            content=selection_response_body(sel.sorted_faces()),
            media_type="application/json",
        )

    # -- annotations ---------------------------------------------------

    @app.post(API_PREFIX + "/models/{model_id}/annotations")
    async def create_annotation_endpoint(model_id: str, request: Request):
        doc = await _json_body(request)
        record = record_from_payload(store, model_id, doc, base=None)
        store.save_annotation(model_id, record, overwrite=False)
        return JSONResponse(to_wadm(record), status_code=201)

    @app.get(API_PREFIX + "/models/{model_id}/annotations")
    async def list_annotations(model_id: str):
        return [to_wadm(r) for r in store.list_annotations(model_id)]

    @app.get(API_PREFIX + "/models/{model_id}/annotations/export")
    async def export_annotations(model_id: str):
        docs = [to_wadm(r) for r in store.list_annotations(model_id)]
        return Response(content=export_collection(docs), media_type="application/json")

    @app.post(API_PREFIX + "/models/{model_id}/annotations/import")
    async def import_annotations(model_id: str, request: Request):
        docs = await _json_body(request)
        overwrite = _flag(request, "overwrite")
        if not isinstance(docs, list):
            raise BadRequestError("import payload must be a JSON array of documents")
        mesh = store.get_mesh(model_id)
        schemas = store.schemas()

        records = []
        problems = []
        for i, doc in enumerate(docs):
            violations = validate_wadm(doc)
            if violations:
                problems.append({
                    "index": i,
                    "violations": [{"path": v.path, "rule": v.rule} for v in violations],
                })
                continue
            try:
                record = from_wadm(doc, schemas)
            except MeshmarkError as exc:
                problems.append({"index": i, "violations": [
                    {"path": "$", "rule": str(exc)}]})
                continue
            faces = sorted(record.roi.faces)
            if faces[-1] >= mesh.face_count:
                problems.append({"index": i, "violations": [{
                    "path": "$.target.selector.faces",
                    "rule": f"face index {faces[-1]} out of range for a mesh "
                            f"with {mesh.face_count} faces",
                }]})
                continue
            if record.mesh_id != model_id:
                problems.append({"index": i, "violations": [{
                    "path": "$.target.source",
                    "rule": f"document targets mesh {record.mesh_id!r}, not {model_id!r}",
                }]})
                continue
            expect = tuple(sorted(derive_vertices(mesh, faces)))
            if record.derived_vertices != expect:
                problems.append({"index": i, "violations": [{
                    "path": "$.target.selector.vertices",
                    "rule": "vertices do not match those derived from the faces",
                }]})
                continue
            records.append(record)
        if problems:
            exc = ValidationError(f"{len(problems)} of {len(docs)} documents failed validation")
            exc.documents = problems
            raise exc

        with store.lock(model_id):
            if not overwrite:
                clashes = [r.id for r in records if store.annotation_exists(model_id, r.id)]
                if clashes:
                    exc = IdConflictError(
                        f"{len(clashes)} annotation ids already exist; "
                        "pass overwrite=true to replace them"
                    )
                    exc.documents = [{"id": i} for i in clashes]
                    raise exc
            for record in records:
                store.save_annotation(model_id, record, overwrite=True)
        return {"imported": len(records)}

    @app.get(API_PREFIX + "/models/{model_id}/annotations/{ann_id}")
    async def get_annotation(model_id: str, ann_id: str):
        return to_wadm(store.load_annotation(model_id, ann_id))

    @app.put(API_PREFIX + "/models/{model_id}/annotations/{ann_id}")
    async def update_annotation(model_id: str, ann_id: str, request: Request):
        doc = await _json_body(request)
        with store.lock(model_id):
            base = store.load_annotation(model_id, ann_id)
            record = record_from_payload(store, model_id, doc, base=base)
            store.save_annotation(model_id, record, overwrite=True)
        return to_wadm(record)

    @app.delete(API_PREFIX + "/models/{model_id}/annotations/{ann_id}")
    async def delete_annotation(model_id: str, ann_id: str):
        store.get_entry(model_id)
        return {"deleted": store.delete_annotation(model_id, ann_id)}

    # -- detectors -----------------------------------------------------

    @app.get(API_PREFIX + "/detectors")
    async def list_detectors():
        registry = store.detectors()
        return [registry[k].to_dict() for k in sorted(registry)]

    @app.post(API_PREFIX + "/models/{model_id}/detect/{name}")
    async def detect(model_id: str, name: str, request: Request):
        mesh = store.get_mesh(model_id)
        registry = store.detectors()
        if name not in registry:
            raise DetectorUnknownError(f"unknown detector {name!r}")
        if not _flag(request, "force"):
            cached = store.cached_heatmap(model_id, name)
            if cached is not None:
                return Response(content=cached, media_type="application/json",
                                headers={"X-Cache": "hit"})
        hm = run_detector(registry, name, mesh, model_id=model_id,
                          timeout=detector_timeout)
        body = heatmap_response_body(name, hm.values)
        store.store_heatmap(model_id, name, body.encode("utf-8"))
        return Response(content=body, media_type="application/json",
                        headers={"X-Cache": "miss"})

    # -- report --------------------------------------------------------

    @app.get(API_PREFIX + "/models/{model_id}/report")
    async def report(model_id: str, request: Request):
        fmt = request.query_params.get("format", "html")
        if fmt != "html":
            raise BadRequestError(f"only format=html is supported, got {fmt!r}")
        stamp = request.query_params.get("timestamp")
        generated = None
        if stamp:
            try:
                generated = parse_timestamp(stamp)
            except ValueError as exc:
                raise BadRequestError(str(exc))
        entry = store.get_entry(model_id)
        html_text = render_report(
            entry, store.get_mesh(model_id), store.list_annotations(model_id),
            generated_at=generated,
        )
        return Response(content=html_text, media_type="text/html; charset=utf-8")

    return app
