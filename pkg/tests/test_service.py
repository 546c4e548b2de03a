"""HTTP service tests covering every endpoint and the error envelope."""

import json

import pytest
from fastapi.testclient import TestClient

from meshmark import Store, create_app, export_obj, procgen
from meshmark.service import API_PREFIX

CUBE_OBJ = export_obj(procgen.unit_cube())

FRONT_CAMERA = {
    "eye": [0.5, 0.5, 4.0], "look_dir": [0.0, 0.0, -1.0], "up": [0.0, 1.0, 0.0],
    "vfov": 0.9, "aspect": 1.0, "near": 0.01, "far": 100.0,
}
FULL_LASSO = {
    "camera": FRONT_CAMERA,
    "polygon": {"vertices": [[-1, -1], [1, -1], [1, 1], [-1, 1]]},
}


@pytest.fixture
def client(tmp_path):
    store = Store(tmp_path / "svc")
    app = create_app(store)
    with TestClient(app, raise_server_exceptions=False) as c:
        c.store = store
        yield c


@pytest.fixture
def model_id(client):
    r = client.post(f"{API_PREFIX}/models", content=CUBE_OBJ,
                    params={"format": "obj", "name": "cube"})
    assert r.status_code == 200
    return r.json()["model_id"]


def select_all(client, model_id):
    r = client.post(f"{API_PREFIX}/models/{model_id}/select/lasso",
                    json=FULL_LASSO)
    assert r.status_code == 200
    return r.json()["faces"]


def create_annotation(client, model_id, **payload):
    body = {"title": "front", "faces": select_all(client, model_id),
            "color": [12, 200, 50]}
    body.update(payload)
    r = client.post(f"{API_PREFIX}/models/{model_id}/annotations", json=body)
    assert r.status_code == 201, r.text
    return r.json()


def error_of(response):
    doc = response.json()
    assert set(doc) == {"error"}
    assert set(doc["error"]) == {"code", "message", "details"}
    return doc["error"]


class TestModels:
    def test_upload_and_entry(self, client, model_id):
        r = client.get(f"{API_PREFIX}/models/{model_id}")
        entry = r.json()
        assert entry["face_count"] == 12
        assert entry["name"] == "cube"
        assert entry["bbox"] == {"min": [0, 0, 0], "max": [1, 1, 1]}

    def test_upload_idempotent(self, client, model_id):
        r = client.post(f"{API_PREFIX}/models", content=CUBE_OBJ)
        assert r.status_code == 200
        assert r.json()["model_id"] == model_id
        assert len(client.get(f"{API_PREFIX}/models").json()) == 1

    def test_upload_bad_format_param(self, client):
        r = client.post(f"{API_PREFIX}/models", content=CUBE_OBJ,
                        params={"format": "stl"})
        assert r.status_code == 400
        assert error_of(r)["code"] == "bad_request"

    def test_upload_unparseable(self, client):
        r = client.post(f"{API_PREFIX}/models", content=b"garbage")
        assert r.status_code == 422
        assert error_of(r)["code"] == "parse_error"

    def test_unknown_model_404(self, client):
        r = client.get(f"{API_PREFIX}/models/{'0' * 64}")
        assert r.status_code == 404
        assert error_of(r)["code"] == "unknown_model"

    def test_mesh_bytes_round_trip(self, client, model_id):
        r = client.get(f"{API_PREFIX}/models/{model_id}/mesh")
        assert r.status_code == 200
        assert r.content == CUBE_OBJ
        assert r.headers["content-type"] == "application/octet-stream"
        assert 'filename="mesh.obj"' in r.headers["content-disposition"]


class TestSelect:
    def test_lasso_front_faces(self, client, model_id):
        faces = select_all(client, model_id)
        assert len(faces) == 2
        assert faces == sorted(faces)

    def test_brush(self, client, model_id):
        r = client.post(
            f"{API_PREFIX}/models/{model_id}/select/brush",
            json={"camera": FRONT_CAMERA,
                  "stroke": {"samples": [[0.0, 0.0]], "radius": 0.3}},
        )
        assert r.status_code == 200
        assert r.json()["faces"]

    def test_mode_defaults_from_path(self, client, model_id):
        # payload without "mode": the endpoint fills it in
        r = client.post(f"{API_PREFIX}/models/{model_id}/select/lasso",
                        json=dict(FULL_LASSO))
        assert r.status_code == 200

    def test_mode_mismatch(self, client, model_id):
        r = client.post(f"{API_PREFIX}/models/{model_id}/select/brush",
                        json={**FULL_LASSO, "mode": "lasso"})
        assert r.status_code == 400

    def test_invalid_mode_path(self, client, model_id):
        r = client.post(f"{API_PREFIX}/models/{model_id}/select/paint",
                        json=FULL_LASSO)
        assert r.status_code == 400

    def test_gesture_validation_codes(self, client, model_id):
        # structural problem: bad_request
        r = client.post(f"{API_PREFIX}/models/{model_id}/select/lasso",
                        json={"camera": FRONT_CAMERA})
        assert r.status_code == 400
        assert error_of(r)["code"] == "bad_request"
        # well-formed but invalid gesture: invalid_gesture
        r = client.post(
            f"{API_PREFIX}/models/{model_id}/select/lasso",
            json={"camera": FRONT_CAMERA,
                  "polygon": {"vertices": [[0, 0], [1, 1]]}},
        )
        assert r.status_code == 400
        assert error_of(r)["code"] == "invalid_gesture"

    def test_body_not_json(self, client, model_id):
        r = client.post(f"{API_PREFIX}/models/{model_id}/select/lasso",
                        content=b"not json")
        assert r.status_code == 400

    def test_response_body_bytes(self, client, model_id):
        r = client.post(f"{API_PREFIX}/models/{model_id}/select/lasso",
                        json=FULL_LASSO)
        body = r.content.decode()
        assert body.endswith("\n")
        assert body == json.dumps({"faces": r.json()["faces"]},
                                  separators=(",", ":")) + "\n"


class TestAnnotations:
    def test_create_and_get(self, client, model_id):
        doc = create_annotation(client, model_id, description="front wall")
        ann_id = doc["id"].removeprefix("urn:uuid:")
        got = client.get(
            f"{API_PREFIX}/models/{model_id}/annotations/{ann_id}"
        ).json()
        assert got == doc

    def test_create_requires_title(self, client, model_id):
        r = client.post(f"{API_PREFIX}/models/{model_id}/annotations",
                        json={"faces": [0]})
        assert r.status_code == 400

    def test_create_empty_roi(self, client, model_id):
        r = client.post(f"{API_PREFIX}/models/{model_id}/annotations",
                        json={"title": "x", "faces": []})
        assert r.status_code == 422
        assert error_of(r)["code"] == "empty_roi"

    def test_create_with_inline_schema(self, client, model_id):
        doc = create_annotation(
            client, model_id,
            schema={"name": "survey", "version": 1,
                    "entries": [{"key": "grade", "kind": "enum",
                                 "values": ["a", "b"]}]},
            fields={"grade": "a"},
        )
        assert "survey" in doc["body"]["value"]
        # schema landed in the registry
        schemas = client.store.schemas()
        assert "survey" in schemas

    def test_schema_violation_code(self, client, model_id):
        r = client.post(
            f"{API_PREFIX}/models/{model_id}/annotations",
            json={"title": "x", "faces": [0], "schema": "nope",
                  "fields": {"grade": "a"}},
        )
        assert r.status_code == 422
        assert error_of(r)["code"] == "schema_violation"

    def test_list_sorted_by_creation(self, client, model_id):
        first = create_annotation(client, model_id, title="one",
                                  created="2024-01-01T00:00:00.000000Z")
        second = create_annotation(client, model_id, title="two",
                                   created="2024-01-02T00:00:00.000000Z")
        listed = client.get(f"{API_PREFIX}/models/{model_id}/annotations").json()
        assert [d["id"] for d in listed] == [first["id"], second["id"]]

    def test_update_bumps_modified(self, client, model_id):
        doc = create_annotation(client, model_id)
        ann_id = doc["id"].removeprefix("urn:uuid:")
        r = client.put(
            f"{API_PREFIX}/models/{model_id}/annotations/{ann_id}",
            json={"title": "renamed"},
        )
        assert r.status_code == 200
        updated = r.json()
        assert updated["id"] == doc["id"]
        assert updated["created"] == doc["created"]
        assert updated["modified"] > doc["modified"]
        assert "<title>renamed</title>" in updated["body"]["value"]
        # untouched keys survive
        assert updated["target"] == doc["target"]

    def test_update_unknown_annotation(self, client, model_id):
        r = client.put(
            f"{API_PREFIX}/models/{model_id}/annotations/"
            "3c9f0460-9e2b-4b6e-9f46-0a7d3b1f2c11",
            json={"title": "x"},
        )
        assert r.status_code == 404
        assert error_of(r)["code"] == "unknown_annotation"

    def test_delete(self, client, model_id):
        doc = create_annotation(client, model_id)
        ann_id = doc["id"].removeprefix("urn:uuid:")
        r = client.delete(f"{API_PREFIX}/models/{model_id}/annotations/{ann_id}")
        assert r.json() == {"deleted": True}
        r = client.delete(f"{API_PREFIX}/models/{model_id}/annotations/{ann_id}")
        assert r.json() == {"deleted": False}


class TestImportExport:
    def export(self, client, model_id):
        r = client.get(f"{API_PREFIX}/models/{model_id}/annotations/export")
        assert r.status_code == 200
        return r.content

    def test_round_trip_byte_identical(self, client, model_id):
        create_annotation(client, model_id, title="one")
        create_annotation(client, model_id, title="two", creator="bob")
        exported = self.export(client, model_id)

        for rec in client.store.list_annotations(model_id):
            client.store.delete_annotation(model_id, rec.id)
        assert self.export(client, model_id) == b"[]\n"

        r = client.post(f"{API_PREFIX}/models/{model_id}/annotations/import",
                        json=json.loads(exported))
        assert r.status_code == 200
        assert r.json() == {"imported": 2}
        assert self.export(client, model_id) == exported

    def test_import_conflict_needs_overwrite(self, client, model_id):
        create_annotation(client, model_id)
        docs = json.loads(self.export(client, model_id))
        r = client.post(f"{API_PREFIX}/models/{model_id}/annotations/import",
                        json=docs)
        assert r.status_code == 409
        err = error_of(r)
        assert err["code"] == "id_conflict"
        assert err["details"]["documents"] == [{"id": docs[0]["id"].removeprefix("urn:uuid:")}]
        r = client.post(
            f"{API_PREFIX}/models/{model_id}/annotations/import",
            params={"overwrite": "true"}, json=docs,
        )
        assert r.status_code == 200

    def test_import_validation_reports_indexes(self, client, model_id):
        create_annotation(client, model_id)
        docs = json.loads(self.export(client, model_id))
        bad = json.loads(json.dumps(docs[0]))
        bad["type"] = "Wrong"
        out_of_range = json.loads(json.dumps(docs[0]))
        out_of_range["target"]["selector"]["faces"] = [0, 99]
        r = client.post(
            f"{API_PREFIX}/models/{model_id}/annotations/import",
            params={"overwrite": "true"},
            json=[docs[0], bad, out_of_range],
        )
        assert r.status_code == 422
        err = error_of(r)
        assert err["code"] == "validation_error"
        idx = {p["index"] for p in err["details"]["documents"]}
        assert idx == {1, 2}
        # atomic: the valid document was not imported either
        assert client.store.list_annotations(model_id)[0].title != "ghost"

    def test_import_vertices_must_match(self, client, model_id):
        create_annotation(client, model_id)
        docs = json.loads(self.export(client, model_id))
        docs[0]["target"]["selector"]["vertices"] = [0, 1]
        r = client.post(
            f"{API_PREFIX}/models/{model_id}/annotations/import",
            params={"overwrite": "true"}, json=docs,
        )
        assert r.status_code == 422
        paths = [v["path"] for p in error_of(r)["details"]["documents"]
                 for v in p["violations"]]
        assert "$.target.selector.vertices" in paths

    def test_import_rejects_non_array(self, client, model_id):
        r = client.post(f"{API_PREFIX}/models/{model_id}/annotations/import",
                        json={"not": "array"})
        assert r.status_code == 400


class TestDetectors:
    def test_listing(self, client):
        r = client.get(f"{API_PREFIX}/detectors")
        names = [d["name"] for d in r.json()]
        assert names == sorted(names)
        assert "builtin:defect" in names

    def test_detect_cache_cycle(self, client, model_id):
        url = f"{API_PREFIX}/models/{model_id}/detect/builtin:defect"
        r1 = client.post(url)
        assert r1.status_code == 200
        assert r1.headers["x-cache"] == "miss"
        doc = r1.json()
        assert doc["detector"] == "builtin:defect"
        assert len(doc["values"]) == 8
        assert 0.0 <= doc["min"] <= doc["mean"] <= doc["max"] <= 1.0

        r2 = client.post(url)
        assert r2.headers["x-cache"] == "hit"
        assert r2.content == r1.content

        r3 = client.post(url, params={"force": "1"})
        assert r3.headers["x-cache"] == "miss"
        assert r3.content == r1.content

    def test_unknown_detector(self, client, model_id):
        r = client.post(f"{API_PREFIX}/models/{model_id}/detect/builtin:nope")
        assert r.status_code == 404
        assert error_of(r)["code"] == "unknown_detector"

    def test_unreachable_remote(self, client, model_id):
        from meshmark import DetectorDescriptor

        client.store.register_detector(
            DetectorDescriptor(name="lab:gone", endpoint="http://127.0.0.1:9/x",
                               timeout=1.0)
        )
        r = client.post(f"{API_PREFIX}/models/{model_id}/detect/lab:gone")
        assert r.status_code == 502
        assert error_of(r)["code"] == "detector_unreachable"


class TestReport:
    def test_html_deterministic(self, client, model_id):
        create_annotation(client, model_id, description="the front")
        url = f"{API_PREFIX}/models/{model_id}/report"
        params = {"timestamp": "2024-06-01T12:00:00.000000Z"}
        r1 = client.get(url, params=params)
        r2 = client.get(url, params=params)
        assert r1.status_code == 200
        assert r1.headers["content-type"].startswith("text/html")
        assert r1.content == r2.content
        assert b"the front" in r1.content

    def test_bad_timestamp(self, client, model_id):
        r = client.get(f"{API_PREFIX}/models/{model_id}/report",
                       params={"timestamp": "eleven"})
        assert r.status_code == 400

    def test_only_html(self, client, model_id):
        r = client.get(f"{API_PREFIX}/models/{model_id}/report",
                       params={"format": "pdf"})
        assert r.status_code == 400


class TestErrorEnvelope:
    def test_unhandled_exception_wrapped(self, client, model_id, monkeypatch):
        def boom(*a, **k):
            raise RuntimeError("surprise")

        monkeypatch.setattr(client.store, "list_annotations", boom)
        r = client.get(f"{API_PREFIX}/models/{model_id}/annotations")
        assert r.status_code == 500
        assert error_of(r)["code"] == "internal"
