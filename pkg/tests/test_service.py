import pytest
from fastapi.testclient import TestClient

from mmbayes.service import create_app


@pytest.fixture
def client(tmp_path):
    app = create_app(tmp_path, fsync=False)
    with TestClient(app) as c:
        yield c


def make_locked(client, alpha=2, beta=9):
    sid = client.post("/sessions").json()["id"]
    client.put(f"/sessions/{sid}/prior", json={"alpha": alpha, "beta": beta})
    client.post(f"/sessions/{sid}/prior/lock")
    return sid


class TestRoutes:
    def test_create_session(self, client):
        r = client.post("/sessions")
        assert r.status_code == 201
        body = r.json()
        assert body["prior"] is None
        assert body["sequence"] == 0

    def test_unknown_session_404(self, client):
        r = client.get("/sessions/missing")
        assert r.status_code == 404
        assert r.json() == {"code": "not_found", "rule": None,
                            "message": "no session 'missing'"}

    def test_prior_lifecycle(self, client):
        sid = client.post("/sessions").json()["id"]
        r = client.put(f"/sessions/{sid}/prior", json={"alpha": 2, "beta": 9})
        assert r.status_code == 200
        assert r.json()["prior"] == {"alpha": 2.0, "beta": 9.0}
        r = client.post(f"/sessions/{sid}/prior/lock")
        assert r.json()["prior_locked"] is True
        r = client.put(f"/sessions/{sid}/prior", json={"alpha": 1, "beta": 1})
        assert r.status_code == 409
        assert r.json()["rule"] == "prior_locked"

    def test_invalid_prior_422(self, client):
        sid = client.post("/sessions").json()["id"]
        r = client.put(f"/sessions/{sid}/prior", json={"alpha": -2, "beta": 9})
        assert r.status_code == 422
        assert r.json()["code"] == "invalid"

    def test_bag_before_lock_409(self, client):
        sid = client.post("/sessions").json()["id"]
        client.put(f"/sessions/{sid}/prior", json={"alpha": 2, "beta": 9})
        r = client.post(f"/sessions/{sid}/bags",
                        json={"bag_id": "b1", "blue": 3, "total": 10})
        assert r.status_code == 409
        assert r.json()["rule"] == "prior_not_locked"

    def test_bag_submission_shapes(self, client):
        sid = make_locked(client)
        r = client.post(f"/sessions/{sid}/bags",
                        json={"bag_id": "b1", "blue": 3, "total": 10})
        assert r.status_code == 201
        counts = {"blue": 2, "orange": 1, "green": 0, "yellow": 4, "red": 0, "brown": 1}
        r = client.post(f"/sessions/{sid}/bags",
                        json={"bag_id": "b2", "counts": counts})
        assert r.status_code == 201
        body = r.json()
        assert body["bags"][1]["total"] == 8

    def test_duplicate_bag_conflict(self, client):
        sid = make_locked(client)
        client.post(f"/sessions/{sid}/bags", json={"bag_id": "b1", "blue": 1, "total": 2})
        r = client.post(f"/sessions/{sid}/bags", json={"bag_id": "b1", "blue": 1, "total": 2})
        assert r.status_code == 409
        assert r.json()["rule"] == "duplicate_bag_id"

    def test_posterior_fixture(self, client):
        sid = make_locked(client, 2, 9)
        client.post(f"/sessions/{sid}/bags", json={"bag_id": "b1", "blue": 25, "total": 100})
        r = client.get(f"/sessions/{sid}/posterior", params={"scope": "class"})
        body = r.json()
        assert body["posterior"] == {"alpha": 27.0, "beta": 84.0}
        assert body["summary"]["mean"] == pytest.approx(27 / 111, abs=1e-12)
        assert len(body["grid"]["theta"]) == 512
        assert len(body["grid"]["density"]) == 512
        # created=0, prior_set=1, prior_locked=2, bag_added=3
        assert body["sequence"] == 3

    def test_posterior_grid_param(self, client):
        sid = make_locked(client)
        r = client.get(f"/sessions/{sid}/posterior", params={"grid": 16})
        assert len(r.json()["grid"]["theta"]) == 16

    def test_posterior_without_prior_409(self, client):
        sid = client.post("/sessions").json()["id"]
        r = client.get(f"/sessions/{sid}/posterior")
        assert r.status_code == 409
        assert r.json()["rule"] == "prior_not_set"

    def test_reveal_flow(self, client):
        sid = make_locked(client)
        client.post(f"/sessions/{sid}/bags",
                    json={"bag_id": "b1", "blue": 25, "total": 100,
                          "lot_code": "LOT HKP 1"})
        r = client.post(f"/sessions/{sid}/reveal")
        assert r.status_code == 200
        body = r.json()
        assert body["factories"][0]["name"] == "New Jersey"
        assert body["factories"][0]["probability"] == pytest.approx(0.631, abs=5e-4)
        assert body["lot_codes"][0]["factory"] == "New Jersey"
        # idempotent: clients may re-fetch the report
        again = client.post(f"/sessions/{sid}/reveal")
        assert again.status_code == 200
        assert again.json()["sequence"] == body["sequence"]

    def test_reveal_without_bags_409(self, client):
        sid = make_locked(client)
        r = client.post(f"/sessions/{sid}/reveal")
        assert r.status_code == 409
        assert r.json()["rule"] == "no_bags"

    def test_export_csv(self, client):
        sid = make_locked(client)
        counts = {"blue": 5, "orange": 4, "green": 3, "yellow": 2, "red": 1, "brown": 6}
        client.post(f"/sessions/{sid}/bags", json={"bag_id": "b1", "counts": counts})
        r = client.get(f"/sessions/{sid}/export.csv")
        assert r.headers["content-type"].startswith("text/csv")
        assert r.text.splitlines()[0] == "bag_id,blue,orange,green,yellow,red,brown"
        assert r.text.splitlines()[1] == "b1,5,4,3,2,1,6"

    def test_preview_route(self, client):
        r = client.get("/preview", params={"alpha": 1, "beta": 1, "grid": 8})
        body = r.json()
        assert body["grid"]["density"] == pytest.approx([1.0] * 8, abs=1e-12)

    def test_preview_validation(self, client):
        assert client.get("/preview", params={"alpha": 0, "beta": 1}).status_code == 422

    def test_sequence_echoed_and_monotone(self, client):
        sid = make_locked(client)
        seqs = [client.get(f"/sessions/{sid}").json()["sequence"]]
        client.post(f"/sessions/{sid}/bags", json={"bag_id": "b1", "blue": 1, "total": 3})
        seqs.append(client.get(f"/sessions/{sid}").json()["sequence"])
        assert seqs[1] == seqs[0] + 1


class TestPersistenceAcrossApps:
    def test_state_survives_restart(self, tmp_path):
        app1 = create_app(tmp_path, fsync=True)
        with TestClient(app1) as c1:
            sid = make_locked(c1)
            c1.post(f"/sessions/{sid}/bags", json={"bag_id": "b1", "blue": 2, "total": 8})
        app2 = create_app(tmp_path, fsync=True)
        with TestClient(app2) as c2:
            body = c2.get(f"/sessions/{sid}").json()
            assert body["prior"] == {"alpha": 2.0, "beta": 9.0}
            assert body["bags"][0]["counts"] == {"blue": 2, "other": 6}
