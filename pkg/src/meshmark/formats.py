"""OBJ and PLY loading, plus OBJ export.

Supported subsets:

* OBJ: ``v``, ``vn``, ``vt``, ``f`` (all ``/`` index forms, negative
  indices resolved relative to the current counts), ``mtllib``/``usemtl``
  captured verbatim as a texture reference hint. Polygons with more than
  three corners are fan-triangulated from the first corner. Per-corner
  UV/normal indices are resolved by corner splitting: a position is
  duplicated whenever two corners disagree on its attributes.
* PLY: ``ascii`` and ``binary_little_endian`` 1.0; ``vertex`` element
  with x/y/z and optional nx/ny/nz/u/v properties, ``face`` element with
  a vertex index list. Other elements are skipped with a warning.

Export writes OBJ ``v``/``f`` records only, 9 significant digits.
"""

from __future__ import annotations

import struct
import warnings

import numpy as np

from .errors import EmptyMeshError, FaceIndexError, ParseError
from .mesh import TriangleMesh

_PLY_TYPES = {
    "char": "i1", "int8": "i1",
    "uchar": "u1", "uint8": "u1",
    "short": "i2", "int16": "i2",
    "ushort": "u2", "uint16": "u2",
    "int": "i4", "int32": "i4",
    "uint": "u4", "uint32": "u4",
    "float": "f4", "float32": "f4",
    "double": "f8", "float64": "f8",
}


def load_mesh(data: bytes, fmt: str | None = None, name: str = "") -> TriangleMesh:
    """Parse mesh bytes in the given format ("obj" or "ply").

    When ``fmt`` is omitted it is inferred: a leading ``ply`` magic means
    PLY, anything else is treated as OBJ text.
    """
    if not data:
        raise ParseError("empty input")
    if fmt is None:
        fmt = "ply" if data[:3] == b"ply" else "obj"
    fmt = fmt.lower().lstrip(".")
    if fmt == "obj":
        return load_obj(data, name=name)
    if fmt == "ply":
        return load_ply(data, name=name)
    raise ParseError(f"unsupported format {fmt!r}")


def _fan(corners: list, line_no: int) -> list:
    if len(corners) < 3:
        raise ParseError("face needs at least 3 vertices", line=line_no)
    return [(corners[0], corners[i], corners[i + 1]) for i in range(1, len(corners) - 1)]


def _resolve(idx: int, count: int, line_no: int) -> int:
    # OBJ indices are 1-based; negative counts back from the end
    if idx > 0:
        r = idx - 1
    elif idx < 0:
        r = count + idx
    else:
        raise ParseError("index 0 is invalid in OBJ", line=line_no)
    if r < 0 or r >= count:
        raise FaceIndexError(f"index {idx} outside 1..{count}", line=line_no)
    return r


def load_obj(data: bytes, name: str = "") -> TriangleMesh:
    try:
        text = data.decode("utf-8", errors="replace")
    except Exception as exc:  # pragma: no cover - decode with replace is total
        raise ParseError(f"undecodable input: {exc}")

    positions: list = []
    normals: list = []
    uvs: list = []
    tri_corners: list = []  # triples of (vi, ti, ni)
    hints: list[str] = []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        tag = parts[0]
        try:
            if tag == "v":
                if len(parts) < 4:
                    raise ParseError("v needs 3 coordinates", line=line_no)
                positions.append((float(parts[1]), float(parts[2]), float(parts[3])))
            elif tag == "vn":
                if len(parts) < 4:
                    raise ParseError("vn needs 3 coordinates", line=line_no)
                normals.append((float(parts[1]), float(parts[2]), float(parts[3])))
            elif tag == "vt":
                if len(parts) < 3:
                    raise ParseError("vt needs 2 coordinates", line=line_no)
                uvs.append((float(parts[1]), float(parts[2])))
            elif tag == "f":
                corners = []
                for corner in parts[1:]:
                    fields = corner.split("/")
                    vi = _resolve(int(fields[0]), len(positions), line_no)
                    ti = ni = None
                    if len(fields) > 1 and fields[1]:
                        ti = _resolve(int(fields[1]), len(uvs), line_no)
                    if len(fields) > 2 and fields[2]:
                        ni = _resolve(int(fields[2]), len(normals), line_no)
                    corners.append((vi, ti, ni))
                tri_corners.extend(_fan(corners, line_no))
            elif tag in ("mtllib", "usemtl"):
                hints.append(line)
            # everything else (o, g, s, l, p, ...) is ignored
        except ValueError as exc:
            raise ParseError(str(exc), line=line_no)

    if not tri_corners:
        raise EmptyMeshError("OBJ contains no faces")

    texture_ref = ";".join(hints) if hints else None
    has_attrs = any(t is not None or n is not None for tri in tri_corners for (_, t, n) in tri)

    if not has_attrs:
        faces = np.array([[a[0], b[0], c[0]] for a, b, c in tri_corners], dtype=np.int64)
        return TriangleMesh(
            positions=np.array(positions, dtype=np.float64).reshape(-1, 3),
            faces=faces,
            texture_ref=texture_ref,
            name=name,
        )

    # corner splitting: one output vertex per distinct (v, vt, vn) triple,
    # numbered in first-use order
    remap: dict = {}
    out_pos: list = []
    out_uv: list = []
    out_nrm: list = []
    faces_out = np.empty((len(tri_corners), 3), dtype=np.int64)
    for f_idx, tri in enumerate(tri_corners):
        for c_idx, corner in enumerate(tri):
            new_id = remap.get(corner)
            if new_id is None:
                new_id = len(out_pos)
                remap[corner] = new_id
                vi, ti, ni = corner
                out_pos.append(positions[vi])
                out_uv.append(uvs[ti] if ti is not None else (0.0, 0.0))
                out_nrm.append(normals[ni] if ni is not None else None)
            faces_out[f_idx, c_idx] = new_id

    nrm_arr = None
    if any(n is not None for n in out_nrm):
        nrm_arr = np.array(
            [n if n is not None else (0.0, 0.0, 1.0) for n in out_nrm], dtype=np.float64
        )
        lengths = np.linalg.norm(nrm_arr, axis=1)
        ok = lengths > 1e-12
        nrm_arr[ok] /= lengths[ok, None]
        nrm_arr[~ok] = (0.0, 0.0, 1.0)
    uv_arr = np.array(out_uv, dtype=np.float64) if uvs else None
    return TriangleMesh(
        positions=np.array(out_pos, dtype=np.float64).reshape(-1, 3),
        faces=faces_out,
        normals=nrm_arr,
        uvs=uv_arr,
        texture_ref=texture_ref,
        name=name,
    )


def export_obj(mesh: TriangleMesh) -> bytes:
    """Serialize positions and faces as OBJ text, 9 significant digits."""
    out = []
    for x, y, z in mesh.positions:
        out.append(f"v {x:.9g} {y:.9g} {z:.9g}")
    for a, b, c in mesh.faces:
        out.append(f"f {a + 1} {b + 1} {c + 1}")
    out.append("")
    return "\n".join(out).encode("utf-8")


class _PlyElement:
    def __init__(self, name, count):
        self.name = name
        self.count = count
        self.properties = []  # (name, dtype) or ("list", count_dtype, item_dtype, name)


def _parse_ply_header(data: bytes):
    end = data.find(b"end_header\n")
    if end < 0:
        raise ParseError("PLY header not terminated")
    header = data[:end].decode("ascii", errors="replace")
    body = data[end + len(b"end_header\n"):]
    lines = [ln.strip() for ln in header.splitlines() if ln.strip()]
    if not lines or lines[0] != "ply":
        raise ParseError("missing ply magic", line=1)
    fmt = None
    elements: list[_PlyElement] = []
    for line_no, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if parts[0] == "comment":
            continue
        if parts[0] == "format":
            if len(parts) < 3 or parts[1] not in ("ascii", "binary_little_endian"):
                raise ParseError(f"unsupported PLY format {line!r}", line=line_no)
            fmt = parts[1]
        elif parts[0] == "element":
            if len(parts) != 3:
                raise ParseError("malformed element line", line=line_no)
            try:
                elements.append(_PlyElement(parts[1], int(parts[2])))
            except ValueError:
                raise ParseError("element count must be an integer", line=line_no)
        elif parts[0] == "property":
            if not elements:
                raise ParseError("property before any element", line=line_no)
            if parts[1] == "list":
                if len(parts) != 5:
                    raise ParseError("malformed list property", line=line_no)
                cd, it = _PLY_TYPES.get(parts[2]), _PLY_TYPES.get(parts[3])
                if cd is None or it is None:
                    raise ParseError(f"unknown PLY type in {line!r}", line=line_no)
                elements[-1].properties.append(("list", cd, it, parts[4]))
            else:
                if len(parts) != 3:
                    raise ParseError("malformed property line", line=line_no)
                dt = _PLY_TYPES.get(parts[1])
                if dt is None:
                    raise ParseError(f"unknown PLY type {parts[1]!r}", line=line_no)
                elements[-1].properties.append((parts[2], dt))
        else:
            raise ParseError(f"unknown header keyword {parts[0]!r}", line=line_no)
    if fmt is None:
        raise ParseError("PLY header missing format line")
    return fmt, elements, body


def _vertex_arrays(names, columns):
    for req in ("x", "y", "z"):
        if req not in names:
            raise ParseError(f"vertex element missing property {req!r}")
    pos = np.column_stack([columns["x"], columns["y"], columns["z"]]).astype(np.float64)
    nrm = uv = None
    if all(k in names for k in ("nx", "ny", "nz")):
        nrm = np.column_stack([columns["nx"], columns["ny"], columns["nz"]]).astype(np.float64)
        lengths = np.linalg.norm(nrm, axis=1)
        ok = lengths > 1e-12
        nrm[ok] /= lengths[ok, None]
        nrm[~ok] = (0.0, 0.0, 1.0)
    if all(k in names for k in ("u", "v")):
        uv = np.column_stack([columns["u"], columns["v"]]).astype(np.float64)
    return pos, nrm, uv


def load_ply(data: bytes, name: str = "") -> TriangleMesh:
    fmt, elements, body = _parse_ply_header(data)
    pos = nrm = uv = None
    face_lists: list | None = None

    if fmt == "ascii":
        tokens = body.decode("ascii", errors="replace").split()
        cursor = 0
        for elem in elements:
            is_vertex = elem.name == "vertex"
            is_face = elem.name == "face"
            if not is_vertex and not is_face:
                warnings.warn(f"ignoring PLY element {elem.name!r}")
            columns = {p[0]: [] for p in elem.properties if p[0] != "list"}
            rows = []
            for _ in range(elem.count):
                row_lists = []
                for prop in elem.properties:
                    try:
                        if prop[0] == "list":
                            n = int(tokens[cursor]); cursor += 1
                            row_lists.append([int(float(tokens[cursor + k])) for k in range(n)])
                            cursor += n
                        else:
                            columns[prop[0]].append(float(tokens[cursor])); cursor += 1
                    except (IndexError, ValueError):
                        raise ParseError(f"truncated or malformed {elem.name} data", offset=cursor)
                rows.append(row_lists)
            if is_vertex:
                pos, nrm, uv = _vertex_arrays(set(columns), {k: np.array(v) for k, v in columns.items()})
            elif is_face:
                face_lists = [r[0] for r in rows if r]
    else:
        offset = 0
        for elem in elements:
            is_vertex = elem.name == "vertex"
            is_face = elem.name == "face"
            if not is_vertex and not is_face:
                warnings.warn(f"ignoring PLY element {elem.name!r}")
            has_list = any(p[0] == "list" for p in elem.properties)
            if not has_list:
                dtype = np.dtype([(p[0], "<" + p[1]) for p in elem.properties])
                nbytes = dtype.itemsize * elem.count
                if offset + nbytes > len(body):
                    raise ParseError(f"truncated {elem.name} data", offset=offset)
                table = np.frombuffer(body, dtype=dtype, count=elem.count, offset=offset)
                offset += nbytes
                if is_vertex:
                    cols = {p[0]: table[p[0]] for p in elem.properties}
                    pos, nrm, uv = _vertex_arrays(set(cols), cols)
            else:
                rows = []
                for _ in range(elem.count):
                    row_lists = []
                    for prop in elem.properties:
                        if prop[0] == "list":
                            cd = np.dtype("<" + prop[1])
                            it = np.dtype("<" + prop[2])
                            if offset + cd.itemsize > len(body):
                                raise ParseError("truncated list count", offset=offset)
                            n = int(np.frombuffer(body, dtype=cd, count=1, offset=offset)[0])
                            offset += cd.itemsize
                            nbytes = it.itemsize * n
                            if offset + nbytes > len(body):
                                raise ParseError("truncated list data", offset=offset)
                            row_lists.append(
                                np.frombuffer(body, dtype=it, count=n, offset=offset).tolist()
                            )
                            offset += nbytes
                        else:
                            dt = np.dtype("<" + prop[1])
                            if offset + dt.itemsize > len(body):
                                raise ParseError("truncated scalar data", offset=offset)
                            offset += dt.itemsize  # non-list props of list elements are skipped
                    rows.append(row_lists)
                if is_face:
                    face_lists = [r[0] for r in rows if r]

    if pos is None:
        raise ParseError("PLY has no vertex element")
    if not face_lists:
        raise EmptyMeshError("PLY contains no faces")

    tris = []
    for li, lst in enumerate(face_lists):
        if len(lst) < 3:
            raise ParseError(f"face {li} has fewer than 3 indices")
        for k in range(1, len(lst) - 1):
            tris.append((lst[0], lst[k], lst[k + 1]))
    faces = np.array(tris, dtype=np.int64)
    if faces.min() < 0 or faces.max() >= pos.shape[0]:
        raise FaceIndexError(f"face index outside [0, {pos.shape[0]})")
    return TriangleMesh(positions=pos, faces=faces, normals=nrm, uvs=uv, name=name)
