"""Command-line driver for batch and scripted use.

Commands mirror the HTTP service semantics against a local store
directory, so selection, export, and heat-map outputs are byte-for-byte
identical between the two surfaces. Gesture files carry the camera and
the gesture as JSON::

    { "camera": { "eye": [...], "look_dir": [...], "up": [...],
                  "vfov": ..., "aspect": ..., "near": ..., "far": ... },
      "mode": "brush",
      "stroke": { "samples": [[x, y], ...], "radius": r } }

(or ``"mode": "lasso"`` with ``"polygon": {"vertices": [[x, y], ...]}``).
Screen coordinates are NDC in [-1, 1] on both axes.

Exit codes: 0 success, 1 validation or parse failure, 2 I/O failure.

Store-addressed commands (annotate, export, report, detect with
--store) accept either a mesh file path, which is uploaded to the store
first (idempotent, content-addressed), or the 64-hex id of a model
already in it.
"""

from __future__ import annotations

import functools
import hashlib
import json
import os
import re
from pathlib import Path

import click

from .annotations import canonical_json, export_collection, parse_timestamp, to_wadm
from .bvh import build_bvh
from .detectors import builtin_detectors, run_detector
from .errors import MeshmarkError, UnknownMeshError
from .formats import load_mesh
from .mesh import bounding_box, total_surface_area
from .report import render_report
from .selection import brush_select, lasso_select
from .service import (
    create_app,
    heatmap_response_body,
    parse_gesture,
    record_from_payload,
    selection_response_body,
)
from .store import Store


class _Fail(click.ClickException):
    def __init__(self, message: str, exit_code: int):
        super().__init__(message)
        self.exit_code = exit_code


def _guarded(f):
    """Map library errors to the documented exit codes."""

    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except (MeshmarkError, ValueError) as exc:
            raise _Fail(str(exc), 1)
        except OSError as exc:
            raise _Fail(str(exc), 2)

    return wrapper


def _read_bytes(path: str) -> bytes:
    return Path(path).read_bytes()


def _load_mesh_file(path: str):
    return load_mesh(_read_bytes(path), name=os.path.basename(path))


def _resolve_model(store: Store, ref: str) -> str:
    """A model reference: an id already in the store, or a mesh path."""
    if re.fullmatch(r"[0-9a-f]{64}", ref):
        try:
            store.get_entry(ref)
            return ref
        except UnknownMeshError:
            pass
    data = _read_bytes(ref)
    return store.upload_model(data, name=os.path.basename(ref)).model_id


_store_option = click.option(
    "--store", "store_dir", required=True, metavar="DIR",
    type=click.Path(file_okay=False),
    help="Store directory (created if missing).",
)


@click.group()
def cli():
    """Annotate triangle meshes from the command line."""


@cli.command()
@click.argument("mesh_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--json", "as_json", is_flag=True, help="Machine-readable summary.")
@_guarded
def info(mesh_path: str, as_json: bool):
    """Summarize a mesh file: counts, bounds, area, attributes."""
    mesh = _load_mesh_file(mesh_path)
    box = bounding_box(mesh)
    area = total_surface_area(mesh)
    if as_json:
        doc = {
            "name": mesh.name,
            "vertex_count": mesh.vertex_count,
            "face_count": mesh.face_count,
            "bbox": {"min": [float(v) for v in box.lo],
                     "max": [float(v) for v in box.hi]},
            "total_area": float(area),
            "has_normals": mesh.normals is not None,
            "has_uvs": mesh.uvs is not None,
            "texture_ref": mesh.texture_ref or "",
        }
        click.echo(canonical_json(doc, indent=2))
        return
    click.echo(f"faces: {mesh.face_count}, vertices: {mesh.vertex_count}")
    lo = ", ".join(f"{v:.9g}" for v in box.lo)
    hi = ", ".join(f"{v:.9g}" for v in box.hi)
    click.echo(f"bounding box: ({lo}) to ({hi})")
    click.echo(f"total area: {area:.9g}")
    click.echo(
        f"normals: {'yes' if mesh.normals is not None else 'no'}, "
        f"uvs: {'yes' if mesh.uvs is not None else 'no'}, "
        f"texture: {mesh.texture_ref or 'none'}"
    )


@cli.command()
@click.argument("mesh_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("gesture_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--json", "as_json", is_flag=True, help="JSON face list instead of lines.")
@_guarded
def select(mesh_path: str, gesture_path: str, as_json: bool):
    """Run a gesture file against a mesh; print the selected faces."""
    mesh = _load_mesh_file(mesh_path)
    gesture_doc = json.loads(_read_bytes(gesture_path))
    camera, mode, gesture = parse_gesture(gesture_doc)
    bvh = build_bvh(mesh)
    if mode == "brush":
        sel = brush_select(mesh, bvh, camera, gesture)
    else:
        sel = lasso_select(mesh, bvh, camera, gesture)
    faces = sel.sorted_faces()
    if as_json:
        click.echo(selection_response_body(faces), nl=False)
    else:
        for face in faces:
            click.echo(face)


@cli.command()
@click.argument("detector")
@click.argument("mesh_ref", metavar="MESH")
@click.option("--store", "store_dir", default=None, metavar="DIR",
              type=click.Path(file_okay=False),
              help="Cache results in this store (same semantics as the service).")
@click.option("--force", is_flag=True, help="Recompute even when cached.")
@click.option("--timeout", type=float, default=None,
              help="Override the detector timeout (seconds).")
@_guarded
def detect(detector: str, mesh_ref: str, store_dir, force: bool, timeout):
    """Run a detector over a mesh; print the heat-map JSON."""
    if store_dir is not None:
        store = Store(store_dir)
        model_id = _resolve_model(store, mesh_ref)
        if not force:
            cached = store.cached_heatmap(model_id, detector)
            if cached is not None:
                click.echo(cached.decode("utf-8"), nl=False)
                return
        registry = store.detectors()
        mesh = store.get_mesh(model_id)
        hm = run_detector(registry, detector, mesh, model_id=model_id, timeout=timeout)
        body = heatmap_response_body(detector, hm.values)
        store.store_heatmap(model_id, detector, body.encode("utf-8"))
        click.echo(body, nl=False)
        return
    mesh = _load_mesh_file(mesh_ref)
    model_id = hashlib.sha256(_read_bytes(mesh_ref)).hexdigest()
    hm = run_detector(builtin_detectors(), detector, mesh, model_id=model_id,
                      timeout=timeout)
    click.echo(heatmap_response_body(detector, hm.values), nl=False)


@cli.command()
@click.argument("mesh_ref", metavar="MESH")
@click.argument("payload_path", type=click.Path(exists=True, dir_okay=False))
@_store_option
@click.option("--timestamp", default=None, metavar="RFC3339",
              help="Fix the creation timestamp (for reproducible output).")
@click.option("--json", "as_json", is_flag=True,
              help="Print the stored document instead of a summary line.")
@_guarded
def annotate(mesh_ref: str, payload_path: str, store_dir, timestamp, as_json: bool):
    """Create an annotation in the store from a JSON payload file.

    The payload carries title, color, faces, and optionally
    description, creator, fields, and schema (a registered name or an
    inline definition).
    """
    store = Store(store_dir)
    model_id = _resolve_model(store, mesh_ref)
    payload = json.loads(_read_bytes(payload_path))
    if timestamp is not None:
        if not isinstance(payload, dict):
            raise _Fail("annotation payload must be a JSON object", 1)
        payload = dict(payload)
        payload["created"] = timestamp
    record = record_from_payload(store, model_id, payload)
    store.save_annotation(model_id, record, overwrite=False)
    if as_json:
        click.echo(canonical_json(to_wadm(record), indent=2))
    else:
        click.echo(f"created annotation {record.id} on model {model_id}")


@cli.command()
@click.argument("mesh_ref", metavar="MESH")
@_store_option
@_guarded
def export(mesh_ref: str, store_dir):
    """Print the model's annotations as a JSON-LD array."""
    store = Store(store_dir)
    model_id = _resolve_model(store, mesh_ref)
    docs = [to_wadm(r) for r in store.list_annotations(model_id)]
    click.echo(export_collection(docs), nl=False)


@cli.command()
@click.argument("mesh_ref", metavar="MESH")
@_store_option
@click.option("--timestamp", default=None, metavar="RFC3339",
              help="Fix the generation timestamp (for reproducible output).")
@_guarded
def report(mesh_ref: str, store_dir, timestamp):
    """Print the model's annotation report as HTML."""
    store = Store(store_dir)
    model_id = _resolve_model(store, mesh_ref)
    generated = parse_timestamp(timestamp) if timestamp else None
    html_text = render_report(
        store.get_entry(model_id),
        store.get_mesh(model_id),
        store.list_annotations(model_id),
        generated_at=generated,
    )
    click.echo(html_text, nl=False)


@cli.command()
@_store_option
@click.option("--listen", default="127.0.0.1:8750", metavar="HOST:PORT",
              show_default=True, help="Bind address.")
@click.option("--detector-timeout", type=float, default=None,
              help="Override every detector's timeout (seconds).")
@_guarded
def serve(store_dir, listen: str, detector_timeout):
    """Run the HTTP service over a store directory."""
    import uvicorn

    host, sep, port_text = listen.rpartition(":")
    if not sep or not host:
        raise _Fail(f"--listen must be HOST:PORT, got {listen!r}", 1)
    try:
        port = int(port_text)
    except ValueError:
        raise _Fail(f"--listen port must be an integer, got {port_text!r}", 1)
    app = create_app(Store(store_dir), detector_timeout=detector_timeout)
    uvicorn.run(app, host=host, port=port, log_level="warning")


def main():
    cli(prog_name="meshmark")


if __name__ == "__main__":
    main()
