"""Drive the HTTP API end to end against an in-process server.

The same sequence works against `tempopc serve --port 8080` over the wire;
the browser client in frontend/ speaks exactly this contract.
"""

from fastapi.testclient import TestClient

from tempopc.server import create_app

client = TestClient(create_app(data_dir=None))

generated = client.post("/scans/generate", json={"seed": 0})
scan_id = generated.json()["scan_id"]
print(f"POST /scans/generate            -> {generated.status_code} {generated.json()}")

scan = client.get(f"/scans/{scan_id}")
print(f"GET  /scans/{scan_id}            -> {scan.status_code}, {len(scan.json()['runs'])} runs")

clustered = client.post(f"/scans/{scan_id}/cluster", json={"k": 3, "restarts": 2, "seed": 0})
sizes = {obs: c["sizes"] for obs, c in clustered.json()["observables"].items()}
print(f"POST /scans/{scan_id}/cluster    -> {clustered.status_code}, sizes {sizes['bCat_nuc']}")

layout = client.post(f"/scans/{scan_id}/layout", json={})
print(f"POST /scans/{scan_id}/layout     -> {layout.status_code}, {len(layout.json()['boxes'])} boxes")

selection = {"selection": {"brushes": {"nLRP6_lr": [1.0, 1.0]}}}
evaluated = client.post(f"/scans/{scan_id}/selection/evaluate", json=selection)
body = evaluated.json()
print(
    f"POST .../selection/evaluate      -> {evaluated.status_code}, "
    f"{len(body['active'])} active, footprint keys {sorted(body['footprint'])}"
)

rendered = client.post(f"/scans/{scan_id}/render", json=selection)
print(f"POST /scans/{scan_id}/render     -> {rendered.status_code}, {len(rendered.content)} SVG bytes")

refined = client.post(
    f"/scans/{scan_id}/cluster/refine",
    json={"op": "merge", "observable": "lrp6Dim", "cluster_ids": [0, 1]},
)
print(f"POST .../cluster/refine (merge)  -> {refined.status_code}, "
      f"lrp6Dim now {len(refined.json()['observables']['lrp6Dim']['sizes'])} clusters")
