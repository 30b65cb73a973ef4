import numpy as np
import pytest
from fastapi.testclient import TestClient

from feedopt.config import load_config
from feedopt.service import app


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


@pytest.fixture(scope="module")
def printer_dict():
    return load_config("printer_circle").model_dump(mode="json")


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json() == {"status": "ok"}


def test_run_tap(client, printer_dict):
    response = client.post("/run", json={"config": printer_dict, "algorithm": "tap"})
    assert response.status_code == 200
    payload = response.json()
    summary = payload["summary"]
    assert summary["algorithm"] == "tap"
    assert summary["cycle_time_s"] == pytest.approx(0.6353, abs=1e-3)
    traj = payload["trajectory"]
    lengths = {len(traj[k]) for k in ("t", "s", "x_d", "y_d", "x_dm", "y_dm",
                                      "feedrate", "ax", "ay", "jx", "jy")}
    assert len(lengths) == 1
    assert traj["x_d"][0] == pytest.approx(5.0)
    assert traj["s"][-1] == pytest.approx(1.0, abs=1e-9)
    # summary maxima match the emitted series
    ce = payload["contour"]
    assert summary["max_ce_estimated_um"] == pytest.approx(
        max(abs(v) for v in ce["ce_estimated_um"]), rel=1e-12)
    assert summary["max_ce_simulated_um"] == pytest.approx(
        max(abs(v) for v in ce["ce_exact_um"]), rel=1e-12)


def test_run_rejects_bad_config(client, printer_dict):
    broken = dict(printer_dict)
    broken["sample_time_s"] = -1.0
    response = client.post("/run", json={"config": broken})
    assert response.status_code == 422  # schema-level rejection


def test_run_infeasible_maps_to_code_3(client, printer_dict):
    cfg = dict(printer_dict)
    cfg["run"] = dict(cfg["run"], algorithm="fo-time", ce_limit_um=0.5)
    response = client.post("/run", json={"config": cfg})
    assert response.status_code == 400
    detail = response.json()["detail"]
    assert detail["code"] == 3
    assert "contour" in detail["reason"]


def test_unknown_suite_is_config_error(client, printer_dict):
    response = client.post("/compare", json={"config": printer_dict, "suite": "table9"})
    assert response.status_code == 400
    assert response.json()["detail"]["code"] == 2


def test_info(client, printer_dict):
    response = client.post("/info", json={"config": printer_dict})
    assert response.status_code == 200
    payload = response.json()
    assert payload["models"]["x"]["dc_gain_raw"] == pytest.approx(1.4, rel=1e-6)
    assert payload["models"]["y"]["dc_gain_raw"] == pytest.approx(0.2, rel=1e-6)
    assert payload["models"]["x"]["stable_raw"] is False
    assert payload["models"]["x"]["stable"] is True
    assert payload["models"]["x"]["fbs_condition_number"] < 100


def test_simulate_round_trip(client, printer_dict):
    run_resp = client.post("/run", json={"config": printer_dict, "algorithm": "tap"})
    traj = run_resp.json()["trajectory"]
    sim_resp = client.post("/simulate", json={
        "config": printer_dict,
        "x_d": traj["x_d"], "y_d": traj["y_d"],
        "x_dm": traj["x_dm"], "y_dm": traj["y_dm"],
        "s": traj["s"],
    })
    assert sim_resp.status_code == 200
    payload = sim_resp.json()
    # same commands, same models: the contour error matches the run
    run_max = run_resp.json()["summary"]["max_ce_estimated_um"]
    assert payload["summary"]["max_ce_estimated_um"] == pytest.approx(run_max, rel=0.05)


def test_compare_table2_shape(client, printer_dict):
    response = client.post("/compare", json={"config": printer_dict, "suite": "table2"})
    assert response.status_code == 200
    rows = response.json()["rows"]
    assert [row["case"] for row in rows] == ["FO", "FO+SEP"]
    fo, fo_sep = rows
    assert fo_sep["cycle_time_s"] < fo["cycle_time_s"]
