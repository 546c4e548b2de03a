"""Annotation records and their W3C Web Annotation (JSON-LD) form.

An AnnotationRecord couples an ROI (a SelectionSet) with display
metadata (title, RGB color), free text, and an ordered map of typed
fields governed by a FieldSchema. Serialization produces one JSON-LD
document per record:

* the body is a single TextualBody whose value is an XML fragment
  ``<artemis-body version="1">`` carrying title, color, description,
  schema reference, and fields in order;
* the target uses a custom ``MeshFaceSelector`` with strictly
  increasing face and vertex index lists, the source being
  ``urn:mesh:<mesh_id>``;
* top-level keys are emitted in a fixed order (@context, id, type,
  created, modified, creator, body, target, then any preserved
  extension members), making output deterministic byte-for-byte.

Timestamps are RFC 3339 UTC with a Z suffix and microsecond precision.
Text destined for the XML body must not contain control characters
other than tab and newline: XML 1.0 cannot carry the rest, and a
carriage return would not survive parser line-ending normalization.
"""

from __future__ import annotations

import json
import re
import uuid
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .errors import (
    EmptyRoiError,
    FaceIndexError,
    SchemaViolationError,
    SelectorUnsupportedError,
    ValidationError,
)
from .mesh import TriangleMesh, derive_vertices
from .selection import SelectionSet

ANNO_CONTEXT = "http://www.w3.org/ns/anno.jsonld"
SELECTOR_TYPE = "MeshFaceSelector"
MESH_URI_PREFIX = "urn:mesh:"
UUID_URI_PREFIX = "urn:uuid:"
FIELD_KINDS = ("text", "number", "enum", "date")

_WADM_KEYS = ("@context", "id", "type", "created", "modified", "creator", "body", "target")

# XML 1.0 cannot represent C0 controls (except \t \n \r), parsers
# normalize a literal \r in text content to \n (breaking round-trips),
# and lone surrogates cannot be encoded at all
_BAD_TEXT = re.compile("[\x00-\x08\x0b-\x1f\ud800-\udfff]")


def _check_text(value: str, what: str) -> str:
    if not isinstance(value, str):
        raise ValueError(f"{what} must be text, got {type(value).__name__}")
    if _BAD_TEXT.search(value):
        raise ValueError(f"{what} contains characters not representable in XML")
    return value


def format_timestamp(dt: datetime) -> str:
    """RFC 3339 UTC with Z suffix, always microsecond precision."""
    dt = dt.astimezone(timezone.utc)
    return f"{dt.year:04d}-{dt.month:02d}-{dt.day:02d}T{dt.hour:02d}:{dt.minute:02d}:{dt.second:02d}.{dt.microsecond:06d}Z"


def parse_timestamp(s: str) -> datetime:
    """Parse RFC 3339; offsets are normalized to UTC."""
    if not isinstance(s, str):
        raise ValueError(f"timestamp must be a string, got {type(s).__name__}")
    txt = s[:-1] + "+00:00" if s.endswith("Z") else s
    try:
        dt = datetime.fromisoformat(txt)
    except ValueError:
        raise ValueError(f"invalid RFC 3339 timestamp {s!r}")
    if dt.tzinfo is None:
        raise ValueError(f"timestamp {s!r} lacks a UTC offset")
    return dt.astimezone(timezone.utc)


def utcnow() -> datetime:
    return datetime.now(timezone.utc)


def canonical_json(obj, indent: int | None = None) -> str:
    """Deterministic JSON text: insertion-ordered keys, no ASCII escaping."""
    if indent is None:
        return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))
    return json.dumps(obj, ensure_ascii=False, indent=indent, separators=(",", ": "))


@dataclass(frozen=True)
class FieldDef:
    """One schema entry: a key plus its kind; enum kinds carry the
    allowed values."""

    key: str
    kind: str
    values: tuple = ()

    def __post_init__(self):
        _check_text(self.key, "field key")
        if not self.key:
            raise ValueError("field key must be non-empty")
        if self.kind not in FIELD_KINDS:
            raise ValueError(f"unknown field kind {self.kind!r}")
        vals = tuple(self.values)
        if self.kind == "enum":
            if not vals:
                raise ValueError(f"enum field {self.key!r} needs at least one value")
            for v in vals:
                _check_text(v, f"enum value of {self.key!r}")
        elif vals:
            raise ValueError(f"only enum fields carry values, {self.key!r} is {self.kind}")
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class FieldSchema:
    """Named, versioned sequence of field definitions."""

    name: str
    entries: tuple
    version: int = 1

    def __post_init__(self):
        _check_text(self.name, "schema name")
        if not self.name:
            raise ValueError("schema name must be non-empty")
        if not (isinstance(self.version, int) and self.version >= 1):
            raise ValueError(f"schema version must be an integer >= 1, got {self.version!r}")
        entries = tuple(
            e if isinstance(e, FieldDef) else FieldDef(*e) for e in self.entries
        )
        keys = [e.key for e in entries]
        if len(set(keys)) != len(keys):
            raise ValueError(f"duplicate keys in schema {self.name!r}")
        object.__setattr__(self, "entries", entries)

    def entry(self, key: str) -> FieldDef | None:
        for e in self.entries:
            if e.key == key:
                return e
        return None

    def to_dict(self) -> dict:
        entries = []
        for e in self.entries:
            d = {"key": e.key, "kind": e.kind}
            if e.kind == "enum":
                d["values"] = list(e.values)
            entries.append(d)
        return {"name": self.name, "version": self.version, "entries": entries}

    @classmethod
    def from_dict(cls, d: dict) -> "FieldSchema":
        entries = tuple(
            FieldDef(e["key"], e["kind"], tuple(e.get("values", ())))
            for e in d.get("entries", ())
        )
        return cls(name=d["name"], entries=entries, version=int(d.get("version", 1)))


def validate_fields(fields, schema: FieldSchema | None) -> list[str]:
    """Check an ordered field map against a schema.

    Values are text; kinds constrain their content (number parses as a
    float, date as an ISO calendar date, enum by membership). Returns
    the offending keys, empty when everything conforms. Fields are a
    subset of the schema: schema keys may be absent, unknown keys may
    not.
    """
    bad = []
    pairs = list(fields.items()) if isinstance(fields, dict) else list(fields)
    seen = set()
    for key, value in pairs:
        if key in seen:
            bad.append(key)
            continue
        seen.add(key)
        entry = schema.entry(key) if schema is not None else None
        if entry is None:
            bad.append(key)
            continue
        if not isinstance(value, str):
            bad.append(key)
            continue
        if entry.kind == "number":
            try:
                float(value)
            except ValueError:
                bad.append(key)
        elif entry.kind == "date":
            try:
                datetime.strptime(value, "%Y-%m-%d")
            except ValueError:
                bad.append(key)
        elif entry.kind == "enum":
            if value not in entry.values:
                bad.append(key)
    return bad


@dataclass(frozen=True)
class AnnotationRecord:
    """Immutable annotation: ROI plus metadata and ordered fields.

    ``fields`` is stored as a tuple of (key, value) pairs so equality is
    order-sensitive, matching the serialized form. ``extensions`` holds
    unknown top-level JSON-LD members from foreign documents, re-emitted
    verbatim on serialization.
    """

    id: str
    mesh_id: str
    title: str
    color: tuple
    roi: SelectionSet
    derived_vertices: tuple
    description: str
    schema_name: str
    schema_version: int
    fields: tuple
    created_at: datetime
    modified_at: datetime
    creator: str
    extensions: tuple = ()

    def __post_init__(self):
        try:
            uuid.UUID(self.id)
        except (ValueError, AttributeError, TypeError):
            raise ValueError(f"annotation id must be a UUID, got {self.id!r}")
        _check_text(self.mesh_id, "mesh_id")
        _check_text(self.title, "title")
        _check_text(self.description, "description")
        _check_text(self.creator, "creator")
        _check_text(self.schema_name, "schema name")
        if not (isinstance(self.schema_version, int) and self.schema_version >= 0):
            raise ValueError(f"schema version must be an integer >= 0, got {self.schema_version!r}")
        color = tuple(int(c) for c in self.color)
        if len(color) != 3 or any(c < 0 or c > 255 for c in color):
            raise ValueError(f"color must be three channels in 0..255, got {self.color!r}")
        if not self.roi.faces:
            raise EmptyRoiError("annotation ROI is empty")
        dv = tuple(int(v) for v in self.derived_vertices)
        if list(dv) != sorted(set(dv)):
            raise ValueError("derived_vertices must be strictly increasing")
        pairs = tuple(
            (str(k), str(v)) for k, v in
            (self.fields.items() if isinstance(self.fields, dict) else self.fields)
        )
        for k, v in pairs:
            _check_text(k, "field key")
            _check_text(v, f"field {k!r} value")
        if len({k for k, _ in pairs}) != len(pairs):
            raise ValueError("duplicate field keys")
        if self.created_at.tzinfo is None or self.modified_at.tzinfo is None:
            raise ValueError("timestamps must be timezone-aware")
        if self.modified_at < self.created_at:
            raise ValueError("modified_at precedes created_at")
        object.__setattr__(self, "color", color)
        object.__setattr__(self, "derived_vertices", dv)
        object.__setattr__(self, "fields", pairs)
        object.__setattr__(self, "extensions", tuple((k, v) for k, v in self.extensions))
        object.__setattr__(self, "created_at", self.created_at.astimezone(timezone.utc))
        object.__setattr__(self, "modified_at", self.modified_at.astimezone(timezone.utc))

    @property
    def fields_map(self) -> dict:
        return dict(self.fields)


def create_annotation(mesh: TriangleMesh, roi: SelectionSet, title: str,
                      color, description: str = "", fields=(),
                      schema: FieldSchema | None = None, creator: str = "",
                      created_at: datetime | None = None) -> AnnotationRecord:
    """Build a new record with a fresh UUID and derived vertices.

    Args:
        mesh: the mesh the ROI lives on (for vertex derivation).
        roi: non-empty face selection; its mesh_id is adopted.
        title: display title.
        color: RGB triple, channels 0..255.
        description: free text.
        fields: ordered (key, value) pairs or dict; values are text.
        schema: governing FieldSchema; None permits no fields.
        creator: attribution text.
        created_at: timestamp override, defaults to now (UTC).

    Raises:
        EmptyRoiError: the ROI has no faces.
        SchemaViolationError: fields do not conform; names the keys.
        FaceIndexError: ROI references a face outside the mesh.
    """
    if not roi.faces:
        raise EmptyRoiError("cannot annotate an empty ROI")
    faces = sorted(roi.faces)
    if faces[0] < 0 or faces[-1] >= mesh.face_count:
        raise FaceIndexError(
            f"ROI face {faces[-1] if faces[-1] >= mesh.face_count else faces[0]} "
            f"outside mesh with {mesh.face_count} faces"
        )
    bad = validate_fields(fields, schema)
    if bad:
        raise SchemaViolationError(
            f"fields do not conform to schema "
            f"{schema.name if schema else '<none>'}: {', '.join(sorted(bad))}",
            keys=tuple(sorted(bad)),
        )
    now = created_at.astimezone(timezone.utc) if created_at else utcnow()
    return AnnotationRecord(
        id=str(uuid.uuid4()),
        mesh_id=roi.mesh_id,
        title=title,
        color=tuple(color),
        roi=roi,
        derived_vertices=tuple(sorted(derive_vertices(mesh, faces))),
        description=description,
        schema_name=schema.name if schema else "",
        schema_version=schema.version if schema else 0,
        fields=fields,
        created_at=now,
        modified_at=now,
        creator=creator,
    )


def _body_xml(record: AnnotationRecord) -> str:
    root = ET.Element("artemis-body", {"version": "1"})
    ET.SubElement(root, "title").text = record.title
    r, g, b = record.color
    ET.SubElement(root, "color", {"r": str(r), "g": str(g), "b": str(b)})
    ET.SubElement(root, "description").text = record.description
    ET.SubElement(
        root, "schema",
        {"name": record.schema_name, "version": str(record.schema_version)},
    )
    for k, v in record.fields:
        el = ET.SubElement(root, "field", {"key": k})
        el.text = v
    return ET.tostring(root, encoding="unicode")


def _parse_body_xml(xml_text: str):
    """Returns (title, color, description, schema_name, schema_version,
    field pairs) or raises ValueError with a reason."""
    try:
        root = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        raise ValueError(f"body is not well-formed XML: {exc}")
    if root.tag != "artemis-body":
        raise ValueError(f"body root must be artemis-body, got {root.tag!r}")
    if root.get("version") != "1":
        raise ValueError(f"unsupported body version {root.get('version')!r}")

    title_el = root.find("title")
    color_el = root.find("color")
    desc_el = root.find("description")
    schema_el = root.find("schema")
    if title_el is None or color_el is None or desc_el is None or schema_el is None:
        raise ValueError("body must contain title, color, description, and schema")
    try:
        color = tuple(int(color_el.get(ch, "")) for ch in ("r", "g", "b"))
    except ValueError:
        raise ValueError("color attributes r, g, b must be integers")
    if any(c < 0 or c > 255 for c in color):
        raise ValueError("color channels must lie in 0..255")
    name = schema_el.get("name")
    version_text = schema_el.get("version", "")
    if name is None:
        raise ValueError("schema element needs a name attribute")
    try:
        version = int(version_text)
    except ValueError:
        raise ValueError(f"schema version must be an integer, got {version_text!r}")
    pairs = []
    for el in root.findall("field"):
        key = el.get("key")
        if key is None:
            raise ValueError("field element needs a key attribute")
        pairs.append((key, el.text or ""))
    if len({k for k, _ in pairs}) != len(pairs):
        raise ValueError("duplicate field keys in body")
    return (title_el.text or "", color, desc_el.text or "", name, version, tuple(pairs))


def to_wadm(record: AnnotationRecord) -> dict:
    """Serialize a record to its JSON-LD document (insertion-ordered)."""
    doc = {
        "@context": ANNO_CONTEXT,
        "id": UUID_URI_PREFIX + record.id,
        "type": "Annotation",
        "created": format_timestamp(record.created_at),
        "modified": format_timestamp(record.modified_at),
        "creator": record.creator,
        "body": {
            "type": "TextualBody",
            "format": "application/xml",
            "value": _body_xml(record),
        },
        "target": {
            "source": MESH_URI_PREFIX + record.mesh_id,
            "selector": {
                "type": SELECTOR_TYPE,
                "faces": sorted(record.roi.faces),
                "vertices": list(record.derived_vertices),
            },
        },
    }
    for k, v in record.extensions:
        doc[k] = v
    return doc


@dataclass(frozen=True)
class Violation:
    """One failed WADM rule, locating the offending JSON path."""

    path: str
    rule: str

    def __str__(self) -> str:
        return f"{self.path}: {self.rule}"


def _check_index_list(value, path: str, what: str) -> list[Violation]:
    if not isinstance(value, list):
        return [Violation(path, f"{what} must be a list")]
    out = []
    prev = -1
    for i, v in enumerate(value):
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            out.append(Violation(path, f"{what}[{i}] must be a non-negative integer"))
            return out
        if v <= prev:
            out.append(Violation(path, f"{what} must be strictly increasing (no duplicates)"))
            return out
        prev = v
    return out


def validate_wadm(doc) -> list[Violation]:
    """Structural validation; an empty list means the document conforms.

    Foreign selector types pass validation (their shape is unknown);
    only MeshFaceSelector shapes are checked in detail.
    """
    if not isinstance(doc, dict):
        return [Violation("$", "document must be a JSON object")]
    out = []

    ctx = doc.get("@context")
    ctx_ok = ctx == ANNO_CONTEXT or (isinstance(ctx, list) and ANNO_CONTEXT in ctx)
    if not ctx_ok:
        out.append(Violation("$.@context", f"must include {ANNO_CONTEXT}"))
    if doc.get("type") != "Annotation":
        out.append(Violation("$.type", "must be 'Annotation'"))
    if not isinstance(doc.get("id"), str) or not doc.get("id"):
        out.append(Violation("$.id", "required non-empty string id"))

    created = None
    if "created" not in doc:
        out.append(Violation("$.created", "required RFC 3339 timestamp"))
    else:
        try:
            created = parse_timestamp(doc["created"])
        except ValueError as exc:
            out.append(Violation("$.created", str(exc)))
    if "modified" in doc:
        try:
            modified = parse_timestamp(doc["modified"])
            if created is not None and modified < created:
                out.append(Violation("$.modified", "must not precede created"))
        except ValueError as exc:
            out.append(Violation("$.modified", str(exc)))
    if "creator" in doc and not isinstance(doc["creator"], str):
        out.append(Violation("$.creator", "must be a string"))

    body = doc.get("body")
    if not isinstance(body, dict):
        out.append(Violation("$.body", "exactly one body object is required"))
    else:
        if body.get("type") != "TextualBody":
            out.append(Violation("$.body.type", "must be 'TextualBody'"))
        if body.get("format") != "application/xml":
            out.append(Violation("$.body.format", "must be 'application/xml'"))
        value = body.get("value")
        if not isinstance(value, str):
            out.append(Violation("$.body.value", "must be an XML string"))
        else:
            try:
                _parse_body_xml(value)
            except ValueError as exc:
                out.append(Violation("$.body.value", str(exc)))

    target = doc.get("target")
    if not isinstance(target, dict):
        out.append(Violation("$.target", "exactly one target object is required"))
    else:
        if not isinstance(target.get("source"), str) or not target.get("source"):
            out.append(Violation("$.target.source", "required non-empty string"))
        selector = target.get("selector")
        if not isinstance(selector, dict):
            out.append(Violation("$.target.selector", "selector object is required"))
        else:
            stype = selector.get("type")
            if not isinstance(stype, str) or not stype:
                out.append(Violation("$.target.selector.type", "required string"))
            elif stype == SELECTOR_TYPE:
                faces = selector.get("faces")
                out.extend(_check_index_list(faces, "$.target.selector.faces", "faces"))
                if isinstance(faces, list) and not faces:
                    out.append(Violation("$.target.selector.faces", "must be non-empty"))
                out.extend(
                    _check_index_list(selector.get("vertices"), "$.target.selector.vertices", "vertices")
                )
    return out


def from_wadm(doc: dict, schemas) -> AnnotationRecord:
    """Parse a JSON-LD document back into an AnnotationRecord.

    Args:
        doc: parsed JSON object.
        schemas: mapping of schema name to FieldSchema, used to validate
            the carried fields.

    Raises:
        ValidationError: structural problems (carries the violations).
        SelectorUnsupportedError: selector type is not MeshFaceSelector.
        SchemaViolationError: unknown schema, version mismatch, or
            non-conforming fields.
    """
    violations = validate_wadm(doc)
    if violations:
        raise ValidationError(
            "document failed WADM validation: " + "; ".join(str(v) for v in violations),
            violations=tuple(violations),
        )
    selector = doc["target"]["selector"]
    if selector["type"] != SELECTOR_TYPE:
        raise SelectorUnsupportedError(
            f"unsupported selector type {selector['type']!r}, expected {SELECTOR_TYPE}"
        )

    raw_id = doc["id"]
    uid = raw_id[len(UUID_URI_PREFIX):] if raw_id.startswith(UUID_URI_PREFIX) else raw_id
    try:
        uuid.UUID(uid)
    except ValueError:
        raise ValidationError(
            f"id must be a urn:uuid IRI, got {raw_id!r}",
            violations=(Violation("$.id", "must be an urn:uuid:<uuid> IRI"),),
        )

    title, color, description, schema_name, schema_version, pairs = _parse_body_xml(
        doc["body"]["value"]
    )

    if schema_name == "" and schema_version == 0:
        schema = None
        if pairs:
            raise SchemaViolationError(
                "fields present but the body references no schema",
                keys=tuple(sorted(k for k, _ in pairs)),
            )
    else:
        schema = schemas.get(schema_name) if hasattr(schemas, "get") else None
        if schema is None:
            raise SchemaViolationError(f"unknown schema {schema_name!r}")
        if schema.version != schema_version:
            raise SchemaViolationError(
                f"schema {schema_name!r} version mismatch: "
                f"document has {schema_version}, registry has {schema.version}"
            )
        bad = validate_fields(pairs, schema)
        if bad:
            raise SchemaViolationError(
                f"fields do not conform to schema {schema_name!r}: {', '.join(sorted(bad))}",
                keys=tuple(sorted(bad)),
            )

    source = doc["target"]["source"]
    mesh_id = source[len(MESH_URI_PREFIX):] if source.startswith(MESH_URI_PREFIX) else source

    created = parse_timestamp(doc["created"])
    modified = parse_timestamp(doc["modified"]) if "modified" in doc else created

    return AnnotationRecord(
        id=uid,
        mesh_id=mesh_id,
        title=title,
        color=color,
        roi=SelectionSet(mesh_id, frozenset(selector["faces"])),
        derived_vertices=tuple(selector["vertices"]),
        description=description,
        schema_name=schema_name,
        schema_version=schema_version,
        fields=pairs,
        created_at=created,
        modified_at=modified,
        creator=doc.get("creator", ""),
        extensions=tuple((k, v) for k, v in doc.items() if k not in _WADM_KEYS),
    )


def export_collection(docs: list[dict]) -> str:
    """Canonical text for a collection export: a JSON array of documents
    pretty-printed with two-space indentation and a trailing newline."""
    return canonical_json(docs, indent=2) + "\n"
