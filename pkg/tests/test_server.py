import pytest
from fastapi.testclient import TestClient

from movekit.server import create_app
from test_service import make_service, unlabeled


@pytest.fixture()
def client(tmp_path, keyword_model):
    service = make_service(tmp_path, keyword_model)
    service.enqueue([unlabeled(i) for i in range(3)])
    app = create_app(service)
    with TestClient(app) as c:
        c.service = service
        yield c


class TestLabelsAndStats:
    def test_labels_payload(self, client):
        body = client.get("/api/labels").json()
        codes = [l["code"] for l in body["labels"]]
        assert codes == ["BAC", "GAP", "PUR", "MTD", "RST", "CLN", "IMP", "CTN"]
        colors = {l["color"] for l in body["labels"]}
        assert len(colors) == 8  # all distinct

    def test_stats_endpoint(self, client):
        body = client.get("/api/stats").json()
        assert body["n_abstracts"] == 3
        assert body["queue"]["pending"] == 3
        assert body["corpus"]["frequency"]["total"] >= 9

    def test_fallback_index_page(self, client):
        page = client.get("/")
        assert page.status_code == 200
        assert "review" in page.text


class TestTaskFlow:
    def test_next_task_and_payload_shape(self, client):
        body = client.get("/api/tasks/next", params={"reviewer": "alice"}).json()
        task = body["task"]
        assert task["abstract_id"] == 0
        assert task["task_status"] == "in_review"
        assert task["version"] == 1
        assert len(task["label"]) >= 3
        assert len(task["provenance"]) == len(task["label"])
        assert task["sentences"]  # offsets for the UI renderer

    def test_empty_queue_gives_null_task(self, tmp_path, keyword_model):
        service = make_service(tmp_path / "empty", keyword_model)
        with TestClient(create_app(service)) as c:
            assert c.get("/api/tasks/next").json() == {"task": None}

    def test_get_abstract_404(self, client):
        assert client.get("/api/abstracts/999").status_code == 404

    def test_put_annotation_and_conflict(self, client):
        task = client.get("/api/tasks/next").json()["task"]
        spans = task["label"]
        spans[0] = [spans[0][0], spans[0][1], "PUR"]
        ok = client.put(f"/api/abstracts/{task['abstract_id']}/annotation",
                        json={"spans": spans, "expected_version": task["version"],
                              "reviewer": "alice"})
        assert ok.status_code == 200
        assert ok.json()["version"] == task["version"] + 1
        stale = client.put(f"/api/abstracts/{task['abstract_id']}/annotation",
                           json={"spans": spans, "expected_version": task["version"],
                                 "reviewer": "alice"})
        assert stale.status_code == 409

    def test_put_invalid_spans_422(self, client):
        task = client.get("/api/tasks/next").json()["task"]
        bad = [[0, 10**7, "PUR"]]
        r = client.put(f"/api/abstracts/{task['abstract_id']}/annotation",
                       json={"spans": bad, "expected_version": task["version"]})
        assert r.status_code == 422

    def test_finalize_flow(self, client):
        task = client.get("/api/tasks/next").json()["task"]
        done = client.post(f"/api/abstracts/{task['abstract_id']}/finalize").json()
        assert done["status"] == "reviewed"
        assert done["task_status"] == "done"
        assert set(done["provenance"]) == {"corrected"}


class TestReportsAndSaliency:
    def test_confusion_pairs(self, client):
        task = client.get("/api/tasks/next").json()["task"]
        spans = task["label"]
        spans[0] = [spans[0][0], spans[0][1], "CTN"]
        client.put(f"/api/abstracts/{task['abstract_id']}/annotation",
                   json={"spans": spans, "expected_version": task["version"]})
        pairs = client.get("/api/reports/confusion").json()["pairs"]
        assert any(p["to"] == "CTN" and p["count"] == 1 for p in pairs)

    def test_saliency_payload(self, client):
        body = client.get("/api/saliency/0/2").json()
        assert set(body) == {"words", "values", "label"}
        assert len(body["words"]) == len(body["values"])

    def test_saliency_out_of_range_404(self, client):
        assert client.get("/api/saliency/0/99").status_code == 404

    def test_retrain_endpoint_threshold(self, client):
        body = client.post("/api/retrain").json()
        assert body["ran"] is False
        assert "threshold" in body["reason"]


class TestShutdownFlush:
    def test_close_writes_snapshot(self, tmp_path, keyword_model):
        service = make_service(tmp_path / "flush", keyword_model)
        service.enqueue([unlabeled(7)])
        with TestClient(create_app(service)) as c:
            c.get("/api/tasks/next")
        assert service.store.snapshot_path.exists()
