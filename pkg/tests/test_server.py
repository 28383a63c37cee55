import pytest
from fastapi.testclient import TestClient

from tempopc import emit_scan
from tempopc.server import create_app

SMALL_GRID = {
    "nWnt": [120.0, 300.0],
    "nLRP6_lr": [0.0, 1.0],
    "kRaftInternal": [0.002, 0.25],
    "kLrpEndo": [0.001, 0.1],
}
CLUSTER_BODY = {"k": 2, "restarts": 2, "seed": 5}


@pytest.fixture
def client():
    return TestClient(create_app(data_dir=None))


def generate_small(client) -> str:
    response = client.post("/scans/generate", json={"seed": 11, "grid": SMALL_GRID})
    assert response.status_code == 201
    return response.json()["scan_id"]


def clustered_scan(client) -> str:
    scan_id = generate_small(client)
    assert client.post(f"/scans/{scan_id}/cluster", json=CLUSTER_BODY).status_code == 200
    return scan_id


def test_generate_and_get_scan(client):
    scan_id = generate_small(client)
    assert scan_id == "scan-0001"
    response = client.get(f"/scans/{scan_id}")
    assert response.status_code == 200
    obj = response.json()
    assert len(obj["runs"]) == 16
    assert obj["time_grid"] == [0, 10, 20, 30, 60, 120, 360]


def test_upload_scan_round_trip(client, tiny_scan):
    data = emit_scan(tiny_scan, "long-csv")
    response = client.post("/scans?format=long-csv", content=data)
    assert response.status_code == 201
    scan_id = response.json()["scan_id"]
    got = client.get(f"/scans/{scan_id}").json()
    assert [r["run_id"] for r in got["runs"]] == ["r1", "r2", "r3"]


def test_upload_malformed_scan_gives_diagnostics(client):
    response = client.post("/scans?format=long-csv", content=b"run_id,p,observable,t,value\nr,NaN,y,0,1\n")
    assert response.status_code == 400
    body = response.json()
    assert body["code"] == "parse_error"
    assert "row 2" in body["message"]


def test_unknown_scan_is_404(client):
    response = client.get("/scans/nope")
    assert response.status_code == 404
    assert response.json()["code"] == "unknown_scan"


def test_cluster_k_too_large_is_409(client):
    scan_id = generate_small(client)
    response = client.post(f"/scans/{scan_id}/cluster", json={"k": 99})
    assert response.status_code == 409
    assert response.json()["code"] == "k_too_large"


def test_cluster_is_deterministic_bytes(client):
    scan_id = generate_small(client)
    a = client.post(f"/scans/{scan_id}/cluster", json=CLUSTER_BODY)
    b = client.post(f"/scans/{scan_id}/cluster", json=CLUSTER_BODY)
    assert a.status_code == b.status_code == 200
    assert a.content == b.content


def test_refine_move_and_merge_and_split(client):
    scan_id = clustered_scan(client)
    model = client.post(f"/scans/{scan_id}/cluster", json=CLUSTER_BODY).json()
    obs = "bCat_nuc"
    clusters = model["observables"][obs]["sizes"]
    assert len(clusters) == 2

    some_run = next(iter(model["observables"][obs]["assignment"]))
    moved = client.post(
        f"/scans/{scan_id}/cluster/refine",
        json={"op": "move", "observable": obs, "run_ids": [some_run], "target_cluster": 5},
    )
    assert moved.status_code == 200
    assert moved.json()["observables"][obs]["assignment"][some_run] == 5

    merged = client.post(
        f"/scans/{scan_id}/cluster/refine",
        json={"op": "merge", "observable": obs, "cluster_ids": [0, 1, 5]},
    )
    assert merged.status_code == 200
    assert list(merged.json()["observables"][obs]["sizes"]) == ["0"]

    split = client.post(
        f"/scans/{scan_id}/cluster/refine",
        json={"op": "split", "observable": obs, "cluster_id": 0, "k2": 2},
    )
    assert split.status_code == 200
    assert len(split.json()["observables"][obs]["sizes"]) == 2


def test_refine_bad_request(client):
    scan_id = clustered_scan(client)
    response = client.post(
        f"/scans/{scan_id}/cluster/refine",
        json={"op": "split", "observable": "bCat_nuc", "cluster_id": 77, "k2": 2},
    )
    assert response.status_code == 400
    response = client.post(f"/scans/{scan_id}/cluster/refine", json={"op": "explode"})
    assert response.status_code == 400
    assert response.json()["code"] == "unknown_op"


def test_layout_endpoint(client):
    scan_id = clustered_scan(client)
    response = client.post(f"/scans/{scan_id}/layout", json={})
    assert response.status_code == 200
    layout = response.json()
    assert [a["id"] for a in layout["axes"]] == [
        "nWnt", "nLRP6_lr", "kRaftInternal", "kLrpEndo",
        "lrp6Dim", "lrp6Int", "lrp6Phos", "bCat_nuc",
    ]
    reordered = client.post(
        f"/scans/{scan_id}/layout",
        json={"axis_order": ["lrp6Int", "nWnt", "kLrpEndo"]},
    )
    assert reordered.status_code == 200
    assert [a["id"] for a in reordered.json()["axes"]] == ["lrp6Int", "nWnt", "kLrpEndo"]


def test_layout_requires_clustering(client):
    scan_id = generate_small(client)
    response = client.post(f"/scans/{scan_id}/layout", json={})
    assert response.status_code == 409
    assert response.json()["code"] == "not_clustered"


def test_evaluate_empty_selection_all_active(client):
    scan_id = clustered_scan(client)
    response = client.post(f"/scans/{scan_id}/selection/evaluate", json={})
    assert response.status_code == 200
    body = response.json()
    assert len(body["active"]) == 16
    assert body["inactive"] == []
    assert set(body["footprint"]) == {"nWnt", "nLRP6_lr", "kRaftInternal", "kLrpEndo"}


def test_evaluate_brush_filters(client):
    scan_id = clustered_scan(client)
    response = client.post(
        f"/scans/{scan_id}/selection/evaluate",
        json={"selection": {"brushes": {"nLRP6_lr": [1.0, 1.0]}}},
    )
    body = response.json()
    assert len(body["active"]) == 8
    assert body["footprint"]["nLRP6_lr"] == {"min": 1.0, "max": 1.0, "values": [1.0]}


def test_evaluate_stale_pick_is_409(client):
    scan_id = clustered_scan(client)
    response = client.post(
        f"/scans/{scan_id}/selection/evaluate",
        json={"selection": {"cluster_picks": {"bCat_nuc": [42]}}},
    )
    assert response.status_code == 409
    body = response.json()
    assert body["code"] == "stale_cluster_pick"
    assert body["detail"] == [{"axis": "bCat_nuc", "cluster": 42}]


def test_render_endpoint_svg(client):
    scan_id = clustered_scan(client)
    body = {"selection": {"brushes": {"nWnt": [120.0, 120.0]}}, "render": {"width": 800, "height": 500}}
    a = client.post(f"/scans/{scan_id}/render", json=body)
    b = client.post(f"/scans/{scan_id}/render", json=body)
    assert a.status_code == 200
    assert a.headers["content-type"].startswith("image/svg+xml")
    assert a.content.startswith(b"<svg")
    assert a.content == b.content


def test_payload_cap(client_factory=None):
    app = create_app(data_dir=None, max_body_bytes=100)
    client = TestClient(app)
    response = client.post("/scans?format=json", content=b"x" * 200)
    assert response.status_code == 413
    assert response.json()["code"] == "payload_too_large"


def test_replay_from_fresh_store_is_byte_identical():
    def run_sequence(client):
        outputs = []
        scan_id = generate_small(client)
        outputs.append(client.get(f"/scans/{scan_id}").content)
        outputs.append(client.post(f"/scans/{scan_id}/cluster", json=CLUSTER_BODY).content)
        outputs.append(client.post(f"/scans/{scan_id}/layout", json={}).content)
        outputs.append(
            client.post(
                f"/scans/{scan_id}/selection/evaluate",
                json={"selection": {"brushes": {"nWnt": [100.0, 200.0]}}},
            ).content
        )
        outputs.append(client.post(f"/scans/{scan_id}/render", json={}).content)
        return outputs

    first = run_sequence(TestClient(create_app(data_dir=None)))
    second = run_sequence(TestClient(create_app(data_dir=None)))
    assert first == second


def test_persistence_write_through_and_reload(tmp_path):
    data_dir = str(tmp_path / "store")
    client = TestClient(create_app(data_dir=data_dir))
    scan_id = generate_small(client)
    client.post(f"/scans/{scan_id}/cluster", json=CLUSTER_BODY)
    files = sorted(p.name for p in (tmp_path / "store").iterdir())
    assert files == [f"{scan_id}.clusters.json", f"{scan_id}.scan.json"]

    reloaded = TestClient(create_app(data_dir=data_dir))
    got = reloaded.get(f"/scans/{scan_id}")
    assert got.status_code == 200
    evaluated = reloaded.post(f"/scans/{scan_id}/selection/evaluate", json={})
    assert evaluated.status_code == 200
    # New ids continue after the persisted counter.
    response = reloaded.post("/scans/generate", json={"seed": 1, "grid": SMALL_GRID})
    assert response.json()["scan_id"] == "scan-0002"
