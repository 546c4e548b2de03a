"""Print-oriented HTML reports of a model's annotations.

The output is a single self-contained page (inline CSS, no external
assets) suitable for feeding to any HTML-to-PDF pipeline. Output is
deterministic for a fixed model, annotation list, and generation
timestamp.
"""

from __future__ import annotations

import html
from datetime import datetime

import numpy as np

from .annotations import format_timestamp, utcnow
from .mesh import TriangleMesh, face_areas, total_surface_area
from .store import ModelEntry

_STYLE = """
  body { font-family: Georgia, 'Times New Roman', serif; margin: 2.5em auto;
         max-width: 52em; color: #1a1a1a; line-height: 1.45; }
  h1 { font-size: 1.6em; border-bottom: 2px solid #444; padding-bottom: 0.2em; }
  h2 { font-size: 1.2em; margin-top: 1.6em; }
  table { border-collapse: collapse; margin: 0.6em 0; }
  th, td { border: 1px solid #999; padding: 0.25em 0.7em; text-align: left;
           vertical-align: top; }
  th { background: #eee; font-weight: bold; }
  .swatch { display: inline-block; width: 0.9em; height: 0.9em;
            border: 1px solid #333; margin-right: 0.45em;
            vertical-align: -0.1em; }
  .meta { color: #444; font-size: 0.92em; }
  .ann { page-break-inside: avoid; border-top: 1px solid #bbb;
         padding-top: 0.8em; }
  .none { font-style: italic; color: #555; }
  footer { margin-top: 2.5em; font-size: 0.85em; color: #666;
           border-top: 1px solid #bbb; padding-top: 0.5em; }
  @media print { body { margin: 0.5in; max-width: none; } }
"""


def _num(x: float) -> str:
    return f"{float(x):.9g}"


def _esc(text: str) -> str:
    return html.escape(str(text), quote=True)


def render_report(entry: ModelEntry, mesh: TriangleMesh, records,
                  generated_at: datetime | None = None) -> str:
    """Render the annotation report for one model.

    Args:
        entry: stored model metadata.
        mesh: the model geometry (for surface areas).
        records: AnnotationRecords, rendered in the given order.
        generated_at: timestamp shown in the footer; injectable so the
            output is reproducible. Defaults to now.

    Returns:
        Complete HTML document text.
    """
    areas = face_areas(mesh)
    stamp = format_timestamp(generated_at) if generated_at else format_timestamp(utcnow())
    title = entry.name or entry.model_id[:12]

    out = []
    out.append("<!DOCTYPE html>")
    out.append('<html lang="en">')
    out.append("<head>")
    out.append('<meta charset="utf-8">')
    out.append(f"<title>Annotation report: {_esc(title)}</title>")
    out.append(f"<style>{_STYLE}</style>")
    out.append("</head>")
    out.append("<body>")
    out.append(f"<h1>Annotation report: {_esc(title)}</h1>")

    out.append("<h2>Model</h2>")
    out.append("<table>")
    out.append(f"<tr><th>Name</th><td>{_esc(entry.name) or '&mdash;'}</td></tr>")
    out.append(f'<tr><th>Model id</th><td class="model-id">{_esc(entry.model_id)}</td></tr>')
    out.append(f"<tr><th>Format</th><td>{_esc(entry.format)}</td></tr>")
    out.append(f'<tr><th>Vertices</th><td class="vertex-count">{entry.vertex_count}</td></tr>')
    out.append(f'<tr><th>Faces</th><td class="face-count">{entry.face_count}</td></tr>')
    lo = ", ".join(_num(v) for v in entry.bbox_min)
    hi = ", ".join(_num(v) for v in entry.bbox_max)
    out.append(f"<tr><th>Bounding box</th><td>({lo}) &ndash; ({hi})</td></tr>")
    out.append(
        f'<tr><th>Total surface area</th><td class="total-area">'
        f"{_num(total_surface_area(mesh))}</td></tr>"
    )
    out.append(f'<tr><th>Uploaded</th><td>{_esc(entry.uploaded_at)}</td></tr>')
    out.append("</table>")

    out.append(f"<h2>Annotations ({len(records)})</h2>")
    if not records:
        out.append('<p class="none">No annotations have been created for this model.</p>')
    for rec in records:
        r, g, b = rec.color
        faces = sorted(rec.roi.faces)
        region = float(areas[np.asarray(faces, dtype=np.int64)].sum())
        out.append(f'<section class="ann" id="ann-{_esc(rec.id)}">')
        out.append(
            f'<h3><span class="swatch" style="background: rgb({r},{g},{b})"></span>'
            f"{_esc(rec.title) or '(untitled)'}</h3>"
        )
        out.append('<p class="meta">')
        out.append(f'id <code class="ann-id">{_esc(rec.id)}</code><br>')
        creator = _esc(rec.creator) if rec.creator else "&mdash;"
        out.append(f"creator {creator}<br>")
        out.append(
            f"created {format_timestamp(rec.created_at)}, "
            f"modified {format_timestamp(rec.modified_at)}"
        )
        out.append("</p>")
        if rec.description:
            out.append(f'<p class="description">{_esc(rec.description)}</p>')
        out.append("<table>")
        out.append(
            f'<tr><th>Selected faces</th><td class="roi-face-count">{len(faces)}</td></tr>'
        )
        out.append(
            f'<tr><th>Region surface area</th><td class="region-area">{_num(region)}</td></tr>'
        )
        if rec.schema_name:
            out.append(
                f"<tr><th>Schema</th><td>{_esc(rec.schema_name)} "
                f"v{rec.schema_version}</td></tr>"
            )
        out.append("</table>")
        if rec.fields:
            out.append('<table class="fields">')
            out.append("<tr><th>Field</th><th>Value</th></tr>")
            for k, v in rec.fields:
                out.append(f"<tr><td>{_esc(k)}</td><td>{_esc(v) or '&mdash;'}</td></tr>")
            out.append("</table>")
        out.append("</section>")

    out.append(f"<footer>Generated {stamp}</footer>")
    out.append("</body>")
    out.append("</html>")
    return "\n".join(out) + "\n"
