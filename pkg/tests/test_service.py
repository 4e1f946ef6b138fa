import time

import pytest
from fastapi.testclient import TestClient

from optbench.optimizers import SCENARIO_RULE_DOC
from optbench.service import ApiSession, create_app
from optbench.suite import QUERY_IDS


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app(ApiSession(scale=0.1)))


def scenario_upload_doc(name="user-scenario"):
    doc = dict(SCENARIO_RULE_DOC)
    doc["name"] = name
    return doc


class TestReads:
    def test_queries_listed(self, client):
        r = client.get("/queries")
        assert r.status_code == 200
        assert [q["id"] for q in r.json()] == list(QUERY_IDS)

    def test_nine_builtin_actions(self, client):
        r = client.get("/actions")
        assert r.status_code == 200
        builtin = [a for a in r.json() if a["builtin"]]
        assert len(builtin) == 9

    def test_optimizers(self, client):
        r = client.get("/optimizers")
        names = [o["name"] for o in r.json()]
        assert {"no-op", "heuristic-filter-pushdown", "rule-sparse-pushdown", "DP-CostOpt"} <= set(names)

    def test_plan_with_path_ids(self, client):
        r = client.get("/queries/Q_Credit/plan")
        assert r.status_code == 200
        doc = r.json()
        root = doc["plan"]["root"]
        assert root["path"] == "root"
        assert root["child"]["path"] == "0"
        assert root["child"]["child"]["path"] == "0.0"
        assert doc["stats"]["nodes"]

    def test_plan_with_optimizer_includes_trace(self, client):
        r = client.get("/queries/Q_Credit/plan", params={"optimizer": "rule-sparse-pushdown"})
        assert r.status_code == 200
        assert r.json()["trace"] is not None

    def test_stats_endpoint(self, client):
        r = client.get("/stats/Q_Credit")
        assert r.status_code == 200
        assert "root" in r.json()["stats"]["nodes"]

    def test_unknown_query_404_shape(self, client):
        r = client.get("/queries/Q_Missing/plan")
        assert r.status_code == 404
        body = r.json()
        assert body["code"] == "UnknownQuery" and "message" in body

    def test_reads_are_stateless(self, client):
        a = client.get("/queries/Q_Credit/plan").json()["plan_hash"]
        b = client.get("/queries/Q_Credit/plan").json()["plan_hash"]
        assert a == b


class TestUploads:
    def test_optimizer_upload_round_trip(self, client):
        r = client.post("/optimizers", json=scenario_upload_doc("rt-check"))
        assert r.status_code == 201
        names = [o["name"] for o in client.get("/optimizers").json()]
        assert "rt-check" in names
        # uploaded profile produces the same trace as the built-in fixture
        left = client.get("/queries/Q_UC10/plan", params={"optimizer": "rt-check"}).json()
        right = client.get("/queries/Q_UC10/plan", params={"optimizer": "rule-sparse-pushdown"}).json()
        assert left["plan_hash"] == right["plan_hash"]
        lt, rt = left["trace"], right["trace"]
        assert lt["applied_actions"] == rt["applied_actions"]
        assert [e for e in lt["events"]] == [e for e in rt["events"]]

    def test_duplicate_optimizer_rejected(self, client):
        assert client.post("/optimizers", json=scenario_upload_doc("dup")).status_code == 201
        r = client.post("/optimizers", json=scenario_upload_doc("dup"))
        assert r.status_code == 400
        assert r.json()["code"] == "DuplicateName"

    def test_invalid_statistic_rejected(self, client):
        doc = scenario_upload_doc("bad-stat")
        doc["rules"] = [{"name": "r", "predicate": {"stat": "bogus", "op": ">", "value": 1},
                        "actions": ["MatMulDense2Sparse"]}]
        r = client.post("/optimizers", json=doc)
        assert r.status_code == 400 and r.json()["code"] == "UnknownStatistic"

    def test_action_template_upload(self, client):
        doc = {"format": "optbench-action/1", "name": "eager-sparse",
               "template": "MatMulDense2Sparse", "params": {"sparsity_threshold": 0.5, "min_rows": 10}}
        r = client.post("/actions", json=doc)
        assert r.status_code == 201
        assert r.json()["name"] == "user/eager-sparse"
        listed = [a["name"] for a in client.get("/actions").json()]
        assert "user/eager-sparse" in listed

    def test_action_unknown_template(self, client):
        doc = {"format": "optbench-action/1", "name": "x", "template": "NoSuchTemplate"}
        r = client.post("/actions", json=doc)
        assert r.status_code == 404 or r.status_code == 400

    def test_uploaded_action_usable_in_optimizer(self, client):
        action_doc = {"format": "optbench-action/1", "name": "sparse-low",
                      "template": "MatMulDense2Sparse", "params": {"min_rows": 10}}
        client.post("/actions", json=action_doc)
        opt_doc = {
            "format": "optbench-optimizer/1", "name": "uses-uploaded", "kind": "rule-based",
            "rules": [{"name": "r", "predicate": {"stat": "sparsity", "op": ">", "value": 0.7},
                       "actions": ["user/sparse-low"]}],
        }
        assert client.post("/optimizers", json=opt_doc).status_code == 201
        r = client.get("/queries/Q_UC10/plan", params={"optimizer": "uses-uploaded"})
        assert r.status_code == 200


class TestBenchJobs:
    def test_job_lifecycle(self, client):
        r = client.post("/bench", json={"queries": ["Q_Credit"],
                                        "optimizers": ["no-op", "heuristic-filter-pushdown"],
                                        "repetitions": 2})
        assert r.status_code == 202
        job_id = r.json()["job_id"]
        deadline = time.time() + 120
        status = None
        while time.time() < deadline:
            status = client.get(f"/bench/{job_id}").json()
            if status["status"] in ("done", "failed"):
                break
            time.sleep(0.2)
        assert status["status"] == "done", status.get("error")
        assert len(status["report"]["runs"]) == 2

    def test_unknown_job_404(self, client):
        assert client.get("/bench/doesnotexist").status_code == 404

    def test_bad_bench_request(self, client):
        r = client.post("/bench", json={"queries": ["Q_Missing"], "optimizers": ["no-op"]})
        assert r.status_code == 404


class TestDiffEndpoint:
    def test_diff_nonempty_for_scenario(self, client):
        r = client.get("/plans/diff", params={"query": "Q_UC10", "left": "no-op",
                                              "right": "rule-sparse-pushdown"})
        assert r.status_code == 200
        body = r.json()
        assert body["left_hash"] != body["right_hash"]
        assert not body["diff"]["empty"]
        assert all("path" in e and "change" in e for e in body["diff"]["entries"])

    def test_diff_same_optimizer_empty(self, client):
        r = client.get("/plans/diff", params={"query": "Q_Credit", "left": "no-op", "right": "no-op"})
        assert r.status_code == 200
        assert r.json()["diff"]["empty"]
