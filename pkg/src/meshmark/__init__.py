"""Surface annotation for triangle meshes.

Load OBJ/PLY geometry, select regions of interest through screen-space
brush and lasso gestures resolved against a BVH, attach typed metadata
as W3C Web Annotation documents, detect salient or defective regions as
per-vertex heat maps, and serve the whole workflow over HTTP or drive
it from the command line.
"""

from .annotations import (
    ANNO_CONTEXT,
    AnnotationRecord,
    FieldDef,
    FieldSchema,
    Violation,
    canonical_json,
    create_annotation,
    export_collection,
    format_timestamp,
    from_wadm,
    parse_timestamp,
    to_wadm,
    utcnow,
    validate_fields,
    validate_wadm,
)
from .bvh import (
    BVH,
    Hit,
    Ray,
    build_bvh,
    ray_triangle_intersect,
    raycast_all,
    raycast_nearest,
    raycast_nearest_batch,
)
from .camera import CameraPose, ScreenPoint, pick_ray, project_point, project_points
from .detectors import (
    DetectorDescriptor,
    HeatMap,
    builtin_detectors,
    defect_map,
    heatmap_to_selection,
    mean_curvature,
    run_detector,
    saliency_map,
)
from .errors import (
    DegenerateMeshError,
    DetectorError,
    DetectorTimeoutError,
    DetectorUnknownError,
    DetectorUnreachableError,
    EmptyMeshError,
    EmptyRoiError,
    FaceIndexError,
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
from .formats import export_obj, load_mesh, load_obj, load_ply
from .mesh import (
    AABB,
    TriangleMesh,
    bounding_box,
    compute_vertex_normals,
    derive_vertices,
    face_areas,
    face_centroids,
    face_normals,
    total_surface_area,
)
from .report import render_report
from .selection import (
    BrushStroke,
    LassoPolygon,
    SelectionSet,
    brush_select,
    densify_stroke,
    face_visible,
    lasso_select,
    point_in_polygon,
    selection_difference,
    selection_intersect,
    selection_union,
    visible_mask,
)
from .service import create_app
from .store import ModelEntry, Store

__version__ = "0.1.0"

__all__ = [
    "AABB",
    "ANNO_CONTEXT",
    "AnnotationRecord",
    "BVH",
    "BrushStroke",
    "CameraPose",
    "DegenerateMeshError",
    "DetectorDescriptor",
    "DetectorError",
    "DetectorTimeoutError",
    "DetectorUnknownError",
    "DetectorUnreachableError",
    "EmptyMeshError",
    "EmptyRoiError",
    "FaceIndexError",
    "FieldDef",
    "FieldSchema",
    "HeatMap",
    "Hit",
    "IdConflictError",
    "InvalidPolygonError",
    "InvalidStrokeError",
    "LassoPolygon",
    "MeshMismatchError",
    "MeshmarkError",
    "ModelEntry",
    "ParseError",
    "ProtocolError",
    "Ray",
    "SchemaViolationError",
    "ScreenPoint",
    "SelectionSet",
    "SelectorUnsupportedError",
    "Store",
    "TriangleMesh",
    "UnknownAnnotationError",
    "UnknownMeshError",
    "ValidationError",
    "Violation",
    "bounding_box",
    "brush_select",
    "build_bvh",
    "builtin_detectors",
    "canonical_json",
    "compute_vertex_normals",
    "create_annotation",
    "create_app",
    "defect_map",
    "densify_stroke",
    "derive_vertices",
    "export_collection",
    "export_obj",
    "face_areas",
    "face_centroids",
    "face_normals",
    "face_visible",
    "format_timestamp",
    "from_wadm",
    "heatmap_to_selection",
    "lasso_select",
    "load_mesh",
    "load_obj",
    "load_ply",
    "mean_curvature",
    "parse_timestamp",
    "pick_ray",
    "point_in_polygon",
    "project_point",
    "project_points",
    "ray_triangle_intersect",
    "raycast_all",
    "raycast_nearest",
    "raycast_nearest_batch",
    "render_report",
    "run_detector",
    "saliency_map",
    "selection_difference",
    "selection_intersect",
    "selection_union",
    "to_wadm",
    "total_surface_area",
    "utcnow",
    "validate_fields",
    "validate_wadm",
    "visible_mask",
]
