from __future__ import annotations

import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from subaudit.ingest import load_tables
from subaudit.metrics import PipelineConfig, build_dataset
from subaudit.priority import PriorityConfig
from subaudit.service import build_store, create_app
from subaudit.system import build_bundled_system

FIXTURE_DIR = str(Path(__file__).resolve().parent.parent / "fixtures" / "synthetic")
MATCH_ID = 500001


@pytest.fixture(scope="module")
def client():
    tables = load_tables(FIXTURE_DIR)
    dataset = build_dataset(tables, PipelineConfig())
    store = build_store(dataset, tables.matches, build_bundled_system(), PriorityConfig())
    return TestClient(create_app(store))


class TestReads:
    def test_health(self, client):
        response = client.get("/health")
        assert response.status_code == 200
        assert response.json() == {"status": "ok", "matches": 1}

    def test_matches_listing(self, client):
        response = client.get("/matches")
        assert response.status_code == 200
        listing = response.json()
        assert listing[0]["match_id"] == MATCH_ID
        assert listing[0]["teams"] == [100, 200]
        assert listing[0]["n_slices"] == 18

    def test_timeline_shape(self, client):
        response = client.get(f"/matches/{MATCH_ID}/timeline")
        assert response.status_code == 200
        payload = response.json()
        assert len(payload["slices"]) == 18
        first = payload["slices"][0]
        assert first["label"] == 5
        ranks = [entry["rank"] for entry in first["entries"]]
        assert ranks == sorted(ranks)
        assert payload["critical_threshold"] == 90.0
        assert len(payload["substitutions"]) == 4

    def test_unknown_match_404(self, client):
        assert client.get("/matches/42/timeline").status_code == 404

    def test_player_series_with_traces(self, client):
        response = client.get(f"/matches/{MATCH_ID}/players/111")
        assert response.status_code == 200
        payload = response.json()
        series = payload["series"]
        assert [point["slice_label"] for point in series] == list(range(5, 65, 5))
        trace = series[0]["trace"]
        assert len(trace["activations"]) == 18  # every rule, zeros included

    def test_unknown_player_404(self, client):
        assert client.get(f"/matches/{MATCH_ID}/players/424242").status_code == 404

    def test_goalkeeper_not_served(self, client):
        assert client.get(f"/matches/{MATCH_ID}/players/101").status_code == 404


class TestWhatIf:
    def test_empty_overrides_equals_stored(self, client):
        body = {"slice": 30, "player": 105, "overrides": {}}
        response = client.post(f"/matches/{MATCH_ID}/whatif", json=body)
        assert response.status_code == 200
        payload = response.json()
        assert payload["result"]["p_final"] == pytest.approx(payload["stored"]["p_final"])
        assert payload["result"]["rank"] == payload["stored"]["rank"]

    def test_yellow_card_on_defender_increases(self, client):
        body = {"slice": 30, "player": 105, "overrides": {"Card_Y": 1.0}}
        response = client.post(f"/matches/{MATCH_ID}/whatif", json=body)
        assert response.status_code == 200
        payload = response.json()
        assert payload["result"]["p_final"] > payload["stored"]["p_final"]
        assert payload["result"]["trace"]["overridden"] == ["Card_Y"]

    def test_out_of_range_override_422_names_field(self, client):
        body = {"slice": 30, "player": 105, "overrides": {"P_cum": 1.2}}
        response = client.post(f"/matches/{MATCH_ID}/whatif", json=body)
        assert response.status_code == 422
        assert response.json()["field"] == "P_cum"

    def test_unknown_override_422(self, client):
        body = {"slice": 30, "player": 105, "overrides": {"Stamina": 1.0}}
        response = client.post(f"/matches/{MATCH_ID}/whatif", json=body)
        assert response.status_code == 422

    def test_malformed_json_400(self, client):
        response = client.post(
            f"/matches/{MATCH_ID}/whatif",
            content=b"{not json",
            headers={"Content-Type": "application/json"},
        )
        assert response.status_code == 400

    def test_missing_fields_400(self, client):
        response = client.post(f"/matches/{MATCH_ID}/whatif", json={"slice": 30})
        assert response.status_code == 400

    def test_unknown_slice_404(self, client):
        body = {"slice": 500, "player": 105, "overrides": {}}
        assert client.post(f"/matches/{MATCH_ID}/whatif", json=body).status_code == 404

    def test_whatif_is_read_only(self, client):
        before = client.get(f"/matches/{MATCH_ID}/timeline").json()
        client.post(
            f"/matches/{MATCH_ID}/whatif",
            json={"slice": 30, "player": 105, "overrides": {"Card_Y": 1.0}},
        )
        after = client.get(f"/matches/{MATCH_ID}/timeline").json()
        assert before == after


class TestPrecision:
    def test_numbers_round_trip(self, client):
        payload = client.get(f"/matches/{MATCH_ID}/timeline").json()
        reparsed = json.loads(json.dumps(payload))
        for s1, s2 in zip(payload["slices"], reparsed["slices"]):
            for e1, e2 in zip(s1["entries"], s2["entries"]):
                assert abs(e1["p_final"] - e2["p_final"]) < 1e-9
