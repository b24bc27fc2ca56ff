import asyncio
import math

import httpx
import pytest

from absorbtime.service.app import create_app


@pytest.fixture(scope="module")
def client():
    app = create_app()

    class Client:
        def call(self, method, path, **kw):
            async def go():
                transport = httpx.ASGITransport(app=app)
                async with httpx.AsyncClient(transport=transport, timeout=None,
                                             base_url="http://svc") as c:
                    return await c.request(method, path, **kw)

            return asyncio.run(go())

    return Client()


class TestEndpoints:
    def test_health(self, client):
        out = client.call("GET", "/health")
        assert out.status_code == 200
        assert out.json()["status"] == "ok"

    def test_models_registry(self, client):
        out = client.call("GET", "/models").json()
        names = {m["name"] for m in out["models"]}
        assert {"simple_chain", "beta_coalescent", "bernoulli_sieve",
                "barrier_walk", "barrier_zero_jumps", "renewal_walk"} <= names

    def test_dist_discrete(self, client):
        body = {"f": {"atoms": [0.0, 2.0], "masses": [0.5, 0.5]},
                "g": {"atoms": [1.0], "masses": [1.0]}, "p": 1}
        out = client.call("POST", "/dist", json=body).json()
        assert out["value"] == pytest.approx(1.0)
        assert out["method"] == "quantile-exact"

    def test_dist_vs_limits(self, client):
        body = {"f": {"atoms": [0.0], "masses": [1.0]},
                "limit": {"kind": "normal"}, "p": 1}
        out = client.call("POST", "/dist", json=body).json()
        assert out["value"] == pytest.approx(math.sqrt(2 / math.pi), abs=1e-9)
        body["limit"] = {"kind": "stable", "alpha": 1.5}
        out = client.call("POST", "/dist", json=body).json()
        assert out["value"] > 0

    def test_dist_affine(self, client):
        body = {"f": {"atoms": [10.0], "masses": [1.0]},
                "limit": {"kind": "normal"}, "p": 2,
                "affine": {"shift": 10.0, "scale": 1.0}}
        out = client.call("POST", "/dist", json=body).json()
        assert out["value"] == pytest.approx(1.0, abs=1e-9)

    def test_dist_validation_422(self, client):
        body = {"f": {"atoms": [0.0], "masses": [1.0]}, "p": 1}
        assert client.call("POST", "/dist", json=body).status_code == 422

    def test_converge(self, client):
        cfg = {"model": "barrier_walk", "params": {"zeta": {"uniform": [1, 3]}},
               "grid": [80, 200], "clause": "A"}
        out = client.call("POST", "/converge", json=cfg)
        assert out.status_code == 200
        body = out.json()
        assert len(body["rows"]) == 2
        assert body["summary"]["strictly_decreasing"]

    def test_converge_config_error(self, client):
        cfg = {"model": "barrier_walk", "grid": [5, 4]}
        assert client.call("POST", "/converge", json=cfg).status_code == 422

    def test_converge_numeric_error_kind(self, client):
        cfg = {"model": "barrier_walk", "params": {"zeta": {"uniform": [1, 3]}},
               "grid": [50], "clause": "C"}
        out = client.call("POST", "/converge", json=cfg)
        assert out.status_code == 500
        assert out.json()["kind"] == "numeric"

    def test_mc(self, client):
        cfg = {"target": "absorption", "model": "simple_chain", "n": 30,
               "samples": 1000, "seed": 8}
        out = client.call("POST", "/mc", json=cfg).json()
        assert out["count"] == 1000

    def test_bounds(self, client):
        cfg = {"kind": "model", "model": "barrier_walk",
               "params": {"zeta": {"uniform": [1, 3]}}, "n_max": 100}
        out = client.call("POST", "/bounds", json=cfg).json()
        assert out["bounded"] is True

    def test_cache_roundtrip(self, client, tmp_path):
        cfg = {"model": "barrier_walk", "params": {"zeta": {"uniform": [1, 3]}},
               "grid": [40], "clause": "A", "use_cache": True,
               "cache_dir": str(tmp_path)}
        client.call("POST", "/converge", json=cfg)
        out = client.call("GET", "/cache", params={"dir": str(tmp_path)}).json()
        assert len(out["entries"]) >= 1
        cleaned = client.call("DELETE", "/cache", params={"dir": str(tmp_path)}).json()
        assert cleaned["removed"] == len(out["entries"])
