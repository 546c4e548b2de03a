"""Content-addressed persistence for models, annotations, and caches.

Layout under the store root:

    models/<id>/mesh.obj | mesh.ply   original uploaded bytes
    models/<id>/meta.json             ModelEntry
    models/<id>/annotations/<uuid>.jsonld
    models/<id>/heatmaps/<detector>.json
    schemas/<name>.json
    detectors.json

Model ids are the hex SHA-256 of the uploaded bytes, so identical
content maps to one stored copy. Every write goes through a temp file
and an atomic rename; an interrupted write never leaves a partial
document behind. Meshes and BVHs are immutable, cached in memory, and
built at most once per model (single-flight under a per-model lock).
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import uuid
from dataclasses import dataclass
from pathlib import Path

from .annotations import (
    AnnotationRecord,
    FieldSchema,
    canonical_json,
    format_timestamp,
    from_wadm,
    to_wadm,
    utcnow,
)
from .bvh import BVH, build_bvh
from .detectors import DetectorDescriptor, builtin_detectors
from .errors import (
    IdConflictError,
    MeshMismatchError,
    UnknownAnnotationError,
    UnknownMeshError,
)
from .formats import load_mesh
from .mesh import TriangleMesh, bounding_box


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.parent / f".{path.name}.{os.getpid()}.{uuid.uuid4().hex[:8]}.tmp"
    try:
        tmp.write_bytes(data)
        os.replace(tmp, path)
    finally:
        tmp.unlink(missing_ok=True)


def _write_json(path: Path, obj) -> None:
    _atomic_write(path, (canonical_json(obj, indent=2) + "\n").encode("utf-8"))


@dataclass(frozen=True)
class ModelEntry:
    """Stored model metadata; model_id is the SHA-256 of the bytes."""

    model_id: str
    name: str
    format: str
    vertex_count: int
    face_count: int
    bbox_min: tuple
    bbox_max: tuple
    texture_ref: str
    uploaded_at: str

    def to_dict(self) -> dict:
        return {
            "model_id": self.model_id,
            "name": self.name,
            "format": self.format,
            "vertex_count": self.vertex_count,
            "face_count": self.face_count,
            "bbox": {"min": list(self.bbox_min), "max": list(self.bbox_max)},
            "texture_ref": self.texture_ref,
            "uploaded_at": self.uploaded_at,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelEntry":
        return cls(
            model_id=d["model_id"],
            name=d["name"],
            format=d["format"],
            vertex_count=int(d["vertex_count"]),
            face_count=int(d["face_count"]),
            bbox_min=tuple(d["bbox"]["min"]),
            bbox_max=tuple(d["bbox"]["max"]),
            texture_ref=d.get("texture_ref", ""),
            uploaded_at=d["uploaded_at"],
        )


class Store:
    """Filesystem store rooted at one directory. Thread-safe."""

    def __init__(self, root):
        self.root = Path(root)
        (self.root / "models").mkdir(parents=True, exist_ok=True)
        (self.root / "schemas").mkdir(exist_ok=True)
        self._meshes: dict[str, TriangleMesh] = {}
        self._bvhs: dict[str, BVH] = {}
        self._locks: dict[str, threading.RLock] = {}
        self._master = threading.Lock()

    def lock(self, model_id: str) -> threading.RLock:
        """Per-model lock; serializes annotation writes and BVH builds."""
        with self._master:
            lk = self._locks.get(model_id)
            if lk is None:
                lk = self._locks[model_id] = threading.RLock()
            return lk

    def _model_dir(self, model_id: str) -> Path:
        return self.root / "models" / model_id

    def _require(self, model_id: str) -> Path:
        d = self._model_dir(model_id)
        if not (d / "meta.json").is_file():
            raise UnknownMeshError(f"no model {model_id!r} in store")
        return d

    # -- models --------------------------------------------------------

    def upload_model(self, data: bytes, fmt: str | None = None, name: str = "",
                     uploaded_at=None) -> ModelEntry:
        """Parse and persist a mesh; idempotent for identical bytes.

        Raises ParseError when the bytes do not parse; nothing is
        written in that case.
        """
        if fmt is None:
            fmt = "ply" if data[:3] == b"ply" else "obj"
        mesh = load_mesh(data, fmt=fmt, name=name)
        model_id = hashlib.sha256(data).hexdigest()
        with self.lock(model_id):
            d = self._model_dir(model_id)
            meta = d / "meta.json"
            if meta.is_file():
                return ModelEntry.from_dict(json.loads(meta.read_text("utf-8")))
            d.mkdir(parents=True, exist_ok=True)
            (d / "annotations").mkdir(exist_ok=True)
            (d / "heatmaps").mkdir(exist_ok=True)
            box = bounding_box(mesh)
            entry = ModelEntry(
                model_id=model_id,
                name=name,
                format=fmt,
                vertex_count=mesh.vertex_count,
                face_count=mesh.face_count,
                bbox_min=tuple(float(v) for v in box.lo),
                bbox_max=tuple(float(v) for v in box.hi),
                texture_ref=mesh.texture_ref or "",
                uploaded_at=format_timestamp(uploaded_at) if uploaded_at else format_timestamp(utcnow()),
            )
            _atomic_write(d / f"mesh.{fmt}", data)
            _write_json(meta, entry.to_dict())
            self._meshes[model_id] = mesh
            return entry

    def get_entry(self, model_id: str) -> ModelEntry:
        d = self._require(model_id)
        return ModelEntry.from_dict(json.loads((d / "meta.json").read_text("utf-8")))

    def list_models(self) -> list:
        out = []
        models = self.root / "models"
        for meta in sorted(models.glob("*/meta.json")):
            out.append(ModelEntry.from_dict(json.loads(meta.read_text("utf-8"))))
        out.sort(key=lambda e: (e.uploaded_at, e.model_id))
        return out

    def get_raw(self, model_id: str) -> tuple:
        """Original uploaded bytes plus their format."""
        d = self._require(model_id)
        entry = self.get_entry(model_id)
        return (d / f"mesh.{entry.format}").read_bytes(), entry.format

    def get_mesh(self, model_id: str) -> TriangleMesh:
        mesh = self._meshes.get(model_id)
        if mesh is not None:
            return mesh
        with self.lock(model_id):
            mesh = self._meshes.get(model_id)
            if mesh is None:
                data, fmt = self.get_raw(model_id)
                entry = self.get_entry(model_id)
                mesh = load_mesh(data, fmt=fmt, name=entry.name)
                self._meshes[model_id] = mesh
        return mesh

    def get_bvh(self, model_id: str) -> BVH:
        bvh = self._bvhs.get(model_id)
        if bvh is not None:
            return bvh
        mesh = self.get_mesh(model_id)
        with self.lock(model_id):
            bvh = self._bvhs.get(model_id)
            if bvh is None:
                bvh = self._bvhs[model_id] = build_bvh(mesh)
        return bvh

    # -- annotations ---------------------------------------------------

    def _ann_path(self, model_id: str, ann_id: str) -> Path:
        try:
            uid = str(uuid.UUID(ann_id))
        except (ValueError, AttributeError, TypeError):
            raise UnknownAnnotationError(f"not an annotation id: {ann_id!r}")
        return self._require(model_id) / "annotations" / f"{uid}.jsonld"

    def save_annotation(self, model_id: str, record: AnnotationRecord,
                        overwrite: bool = True) -> None:
        if record.mesh_id != model_id:
            raise MeshMismatchError(
                f"annotation targets mesh {record.mesh_id!r}, store model is {model_id!r}"
            )
        path = self._ann_path(model_id, record.id)
        with self.lock(model_id):
            if not overwrite and path.exists():
                raise IdConflictError(f"annotation {record.id} already exists")
            _write_json(path, to_wadm(record))

    def load_annotation(self, model_id: str, ann_id: str) -> AnnotationRecord:
        path = self._ann_path(model_id, ann_id)
        if not path.is_file():
            raise UnknownAnnotationError(f"no annotation {ann_id!r} on model {model_id!r}")
        doc = json.loads(path.read_text("utf-8"))
        return from_wadm(doc, self.schemas())

    def annotation_exists(self, model_id: str, ann_id: str) -> bool:
        return self._ann_path(model_id, ann_id).is_file()

    def list_annotations(self, model_id: str) -> list:
        d = self._require(model_id) / "annotations"
        schemas = self.schemas()
        records = []
        for path in d.glob("*.jsonld"):
            doc = json.loads(path.read_text("utf-8"))
            records.append(from_wadm(doc, schemas))
        records.sort(key=lambda r: (r.created_at, r.id))
        return records

    def delete_annotation(self, model_id: str, ann_id: str) -> bool:
        """Idempotent; returns whether the annotation existed."""
        path = self._ann_path(model_id, ann_id)
        with self.lock(model_id):
            if path.is_file():
                path.unlink()
                return True
            return False

    def wipe_annotations(self, model_id: str) -> int:
        d = self._require(model_id) / "annotations"
        n = 0
        with self.lock(model_id):
            for path in d.glob("*.jsonld"):
                path.unlink()
                n += 1
        return n

    # -- schemas -------------------------------------------------------

    def save_schema(self, schema: FieldSchema, overwrite: bool = False) -> None:
        path = self.root / "schemas" / f"{schema.name}.json"
        if "/" in schema.name or schema.name in (".", ".."):
            raise ValueError(f"schema name {schema.name!r} is not a valid file name")
        if path.exists() and not overwrite:
            existing = FieldSchema.from_dict(json.loads(path.read_text("utf-8")))
            if existing == schema:
                return
            raise IdConflictError(f"schema {schema.name!r} already exists with different content")
        _write_json(path, schema.to_dict())

    def schemas(self) -> dict:
        out = {}
        for path in sorted((self.root / "schemas").glob("*.json")):
            schema = FieldSchema.from_dict(json.loads(path.read_text("utf-8")))
            out[schema.name] = schema
        return out

    # -- detectors -----------------------------------------------------

    def detectors(self) -> dict:
        """Registry: builtins plus entries from detectors.json.

        File entries shadowing a builtin name are ignored.
        """
        registry = builtin_detectors()
        path = self.root / "detectors.json"
        if path.is_file():
            for d in json.loads(path.read_text("utf-8")):
                desc = DetectorDescriptor.from_dict(d)
                if desc.name not in registry:
                    registry[desc.name] = desc
        return registry

    def register_detector(self, desc: DetectorDescriptor,
                          overwrite: bool = False) -> None:
        if desc.name in builtin_detectors():
            raise IdConflictError(f"cannot shadow builtin detector {desc.name!r}")
        path = self.root / "detectors.json"
        with self._master:
            entries = []
            if path.is_file():
                entries = [DetectorDescriptor.from_dict(d)
                           for d in json.loads(path.read_text("utf-8"))]
            by_name = {e.name: e for e in entries}
            if desc.name in by_name and not overwrite and by_name[desc.name] != desc:
                raise IdConflictError(f"detector {desc.name!r} already registered")
            by_name[desc.name] = desc
            _write_json(path, [by_name[k].to_dict() for k in sorted(by_name)])

    # -- heat-map response cache ----------------------------------------

    def _heatmap_path(self, model_id: str, detector: str) -> Path:
        # registry names are restricted to filename-safe characters
        return self._require(model_id) / "heatmaps" / f"{detector}.json"

    def cached_heatmap(self, model_id: str, detector: str) -> bytes | None:
        path = self._heatmap_path(model_id, detector)
        return path.read_bytes() if path.is_file() else None

    def store_heatmap(self, model_id: str, detector: str, payload: bytes) -> None:
        _atomic_write(self._heatmap_path(model_id, detector), payload)

    # -- maintenance -----------------------------------------------------

    def scan(self) -> list:
        """Store-wide invariant check; returns human-readable problems.

        Verifies that model ids re-hash to their content and that every
        annotation file passes WADM validation.
        """
        from .annotations import validate_wadm

        problems = []
        for entry in self.list_models():
            data, _ = self.get_raw(entry.model_id)
            digest = hashlib.sha256(data).hexdigest()
            if digest != entry.model_id:
                problems.append(
                    f"model {entry.model_id}: content hashes to {digest}"
                )
            ann_dir = self._model_dir(entry.model_id) / "annotations"
            for path in sorted(ann_dir.glob("*.jsonld")):
                try:
                    doc = json.loads(path.read_text("utf-8"))
                except ValueError as exc:
                    problems.append(f"{path.name}: not JSON ({exc})")
                    continue
                for v in validate_wadm(doc):
                    problems.append(f"{path.name}: {v}")
        return problems
