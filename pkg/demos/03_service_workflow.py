"""
The annotation service over HTTP
================================

A full client session against a live server: upload a model, select
faces, annotate, run a detector, and fetch the HTML report.
"""

import socket
import tempfile
import threading
import time

import requests
import uvicorn

from meshmark import Store, create_app, export_obj, procgen

# The service is an ASGI app around a store directory. Any ASGI server
# works; uvicorn runs here on a free local port, in a thread so the
# script can talk to it.
probe = socket.socket()
probe.bind(("127.0.0.1", 0))
port = probe.getsockname()[1]
probe.close()

store_dir = tempfile.mkdtemp(prefix="meshmark-demo-")
server = uvicorn.Server(uvicorn.Config(
    create_app(Store(store_dir)), host="127.0.0.1", port=port,
    log_level="warning",
))
threading.Thread(target=server.run, daemon=True).start()
while not server.started:
    time.sleep(0.05)

base = f"http://127.0.0.1:{port}/api/v1"
print(f"serving {store_dir} at {base}")

# Models are content-addressed: the id is the SHA-256 of the uploaded
# bytes, so re-uploading the same file is a no-op.
cube_bytes = export_obj(procgen.unit_cube())
entry = requests.post(f"{base}/models", data=cube_bytes,
                      params={"name": "cube.obj"}).json()
model_id = entry["model_id"]
print(f"uploaded {entry['name']}: {entry['face_count']} faces, id {model_id[:12]}…")

# Selection is computed server-side from the camera pose plus the
# gesture, both in the request body.
gesture = {
    "camera": {"eye": [0.5, 0.5, 4.0], "look_dir": [0.0, 0.0, -1.0],
               "up": [0.0, 1.0, 0.0], "vfov": 0.9, "aspect": 1.0,
               "near": 0.01, "far": 100.0},
    "polygon": {"vertices": [[-1, -1], [1, -1], [1, 1], [-1, 1]]},
}
faces = requests.post(f"{base}/models/{model_id}/select/lasso",
                      json=gesture).json()["faces"]
print(f"lasso over the viewport: faces {faces}")

# Annotations are created from the selected faces; the response is the
# stored JSON-LD document.
doc = requests.post(f"{base}/models/{model_id}/annotations", json={
    "title": "Front wall",
    "faces": faces,
    "color": [220, 60, 40],
    "description": "visible from the default camera",
}).json()
print(f"created {doc['id']}")

# Detector runs are cached by (model, detector); the X-Cache header
# tells which path served the request.
first = requests.post(f"{base}/models/{model_id}/detect/builtin:defect")
again = requests.post(f"{base}/models/{model_id}/detect/builtin:defect")
scores = first.json()
print(f"detect builtin:defect: {first.headers['X-Cache']} then "
      f"{again.headers['X-Cache']}, mean score {scores['mean']:.3f}")

# The report is deterministic HTML, ready for printing or conversion.
report = requests.get(f"{base}/models/{model_id}/report",
                      params={"timestamp": "2024-06-01T12:00:00Z"})
head = report.text[:report.text.index("</title>") + 8]
print(f"report: {len(report.text)} characters, starts {head!r}")

server.should_exit = True
print("done")
