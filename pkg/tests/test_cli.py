"""Command-line interface tests via click's runner."""

import json

import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from meshmark import Store, create_app, export_obj, procgen
from meshmark.cli import cli
from meshmark.service import API_PREFIX

CUBE_OBJ = export_obj(procgen.unit_cube())

GESTURE = {
    "camera": {
        "eye": [0.5, 0.5, 4.0], "look_dir": [0.0, 0.0, -1.0],
        "up": [0.0, 1.0, 0.0], "vfov": 0.9, "aspect": 1.0,
        "near": 0.01, "far": 100.0,
    },
    "mode": "lasso",
    "polygon": {"vertices": [[-1, -1], [1, -1], [1, 1], [-1, 1]]},
}

ANNOTATION = {"title": "front", "faces": [10, 11], "color": [12, 200, 50],
              "description": "front wall"}


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def workdir(tmp_path):
    (tmp_path / "cube.obj").write_bytes(CUBE_OBJ)
    (tmp_path / "gesture.json").write_text(json.dumps(GESTURE))
    (tmp_path / "payload.json").write_text(json.dumps(ANNOTATION))
    return tmp_path


def run_ok(runner, args):
    result = runner.invoke(cli, args, catch_exceptions=False)
    assert result.exit_code == 0, result.output
    return result.output


class TestInfo:
    def test_human_output(self, runner, workdir):
        out = run_ok(runner, ["info", str(workdir / "cube.obj")])
        lines = out.splitlines()
        assert lines[0] == "faces: 12, vertices: 8"
        assert lines[1] == "bounding box: (0, 0, 0) to (1, 1, 1)"
        assert lines[2] == "total area: 6"
        assert lines[3] == "normals: no, uvs: no, texture: none"

    def test_json_output(self, runner, workdir):
        out = run_ok(runner, ["info", str(workdir / "cube.obj"), "--json"])
        doc = json.loads(out)
        assert doc["face_count"] == 12
        assert doc["total_area"] == 6.0
        assert doc["name"] == "cube.obj"

    def test_missing_file(self, runner, workdir):
        result = runner.invoke(cli, ["info", str(workdir / "nope.obj")])
        assert result.exit_code == 2  # click's usage error for bad path

    def test_unparseable_is_exit_1(self, runner, workdir):
        bad = workdir / "bad.obj"
        bad.write_text("v 0 0\n")
        result = runner.invoke(cli, ["info", str(bad)])
        assert result.exit_code == 1
        assert "line 1" in result.output


class TestSelect:
    def test_lines(self, runner, workdir):
        out = run_ok(runner, ["select", str(workdir / "cube.obj"),
                              str(workdir / "gesture.json")])
        faces = [int(x) for x in out.split()]
        assert faces == sorted(faces)
        assert len(faces) == 2

    def test_json_matches_service_bytes(self, runner, workdir, tmp_path):
        out = run_ok(runner, ["select", str(workdir / "cube.obj"),
                              str(workdir / "gesture.json"), "--json"])
        store = Store(tmp_path / "svc")
        with TestClient(create_app(store)) as client:
            model_id = client.post(f"{API_PREFIX}/models",
                                   content=CUBE_OBJ).json()["model_id"]
            resp = client.post(
                f"{API_PREFIX}/models/{model_id}/select/lasso",
                json={k: v for k, v in GESTURE.items() if k != "mode"},
            )
        assert out.encode() == resp.content

    def test_bad_gesture_exit_1(self, runner, workdir):
        bad = workdir / "bad_gesture.json"
        bad.write_text(json.dumps({"camera": GESTURE["camera"]}))
        result = runner.invoke(cli, ["select", str(workdir / "cube.obj"), str(bad)])
        assert result.exit_code == 1


class TestDetect:
    def test_storeless_builtin(self, runner, workdir):
        out = run_ok(runner, ["detect", "builtin:defect", str(workdir / "cube.obj")])
        doc = json.loads(out)
        assert doc["detector"] == "builtin:defect"
        assert len(doc["values"]) == 8

    def test_store_cache_round_trip(self, runner, workdir, tmp_path):
        store_dir = str(tmp_path / "store")
        args = ["detect", "builtin:defect", str(workdir / "cube.obj"),
                "--store", store_dir]
        first = run_ok(runner, args)
        second = run_ok(runner, args)  # replayed from cache
        assert first == second
        forced = run_ok(runner, args + ["--force"])
        assert forced == first

    def test_unknown_detector_exit_1(self, runner, workdir):
        result = runner.invoke(
            cli, ["detect", "builtin:nope", str(workdir / "cube.obj")]
        )
        assert result.exit_code == 1

    def test_matches_service_bytes(self, runner, workdir, tmp_path):
        out = run_ok(runner, ["detect", "builtin:defect", str(workdir / "cube.obj")])
        store = Store(tmp_path / "svc")
        with TestClient(create_app(store)) as client:
            model_id = client.post(f"{API_PREFIX}/models",
                                   content=CUBE_OBJ).json()["model_id"]
            resp = client.post(f"{API_PREFIX}/models/{model_id}/detect/builtin:defect")
        assert out.encode() == resp.content


class TestAnnotateExport:
    def test_create_and_export(self, runner, workdir, tmp_path):
        store_dir = str(tmp_path / "store")
        out = run_ok(runner, [
            "annotate", str(workdir / "cube.obj"), str(workdir / "payload.json"),
            "--store", store_dir,
            "--timestamp", "2024-06-01T00:00:00.000000Z",
        ])
        assert out.startswith("created annotation ")

        exported = run_ok(runner, ["export", str(workdir / "cube.obj"),
                                   "--store", store_dir])
        docs = json.loads(exported)
        assert len(docs) == 1
        assert docs[0]["created"] == "2024-06-01T00:00:00.000000Z"
        assert docs[0]["target"]["selector"]["faces"] == [10, 11]

    def test_json_flag_prints_document(self, runner, workdir, tmp_path):
        out = run_ok(runner, [
            "annotate", str(workdir / "cube.obj"), str(workdir / "payload.json"),
            "--store", str(tmp_path / "store"), "--json",
        ])
        doc = json.loads(out)
        assert doc["type"] == "Annotation"

    def test_model_id_reference(self, runner, workdir, tmp_path):
        import hashlib

        store_dir = str(tmp_path / "store")
        run_ok(runner, ["annotate", str(workdir / "cube.obj"),
                        str(workdir / "payload.json"), "--store", store_dir])
        model_id = hashlib.sha256(CUBE_OBJ).hexdigest()
        exported = run_ok(runner, ["export", model_id, "--store", store_dir])
        assert len(json.loads(exported)) == 1

    def test_matches_service_export_bytes(self, runner, workdir, tmp_path):
        store_dir = tmp_path / "store"
        run_ok(runner, [
            "annotate", str(workdir / "cube.obj"), str(workdir / "payload.json"),
            "--store", str(store_dir),
            "--timestamp", "2024-06-01T00:00:00.000000Z",
        ])
        exported = run_ok(runner, ["export", str(workdir / "cube.obj"),
                                   "--store", str(store_dir)])
        with TestClient(create_app(Store(store_dir))) as client:
            model_id = client.get(f"{API_PREFIX}/models").json()[0]["model_id"]
            resp = client.get(
                f"{API_PREFIX}/models/{model_id}/annotations/export"
            )
        assert exported.encode() == resp.content

    def test_bad_payload_faces_exit_1(self, runner, workdir, tmp_path):
        bad = workdir / "bad_payload.json"
        bad.write_text(json.dumps({"title": "x", "faces": [999]}))
        result = runner.invoke(cli, [
            "annotate", str(workdir / "cube.obj"), str(bad),
            "--store", str(tmp_path / "store"),
        ])
        assert result.exit_code == 1


class TestReport:
    def test_deterministic_html(self, runner, workdir, tmp_path):
        store_dir = str(tmp_path / "store")
        run_ok(runner, ["annotate", str(workdir / "cube.obj"),
                        str(workdir / "payload.json"), "--store", store_dir,
                        "--timestamp", "2024-06-01T00:00:00.000000Z"])
        args = ["report", str(workdir / "cube.obj"), "--store", store_dir,
                "--timestamp", "2024-06-02T00:00:00.000000Z"]
        first = run_ok(runner, args)
        assert first == run_ok(runner, args)
        assert first.startswith("<!DOCTYPE html>")
        assert "front wall" in first

    def test_bad_timestamp_exit_1(self, runner, workdir, tmp_path):
        result = runner.invoke(cli, [
            "report", str(workdir / "cube.obj"),
            "--store", str(tmp_path / "store"), "--timestamp", "noon",
        ])
        assert result.exit_code == 1


class TestServe:
    def test_bad_listen_exit_1(self, runner, tmp_path):
        for listen in ("8750", ":8750", "127.0.0.1:http"):
            result = runner.invoke(cli, ["serve", "--store", str(tmp_path / "s"),
                                         "--listen", listen])
            assert result.exit_code == 1, listen
