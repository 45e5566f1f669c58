import json
import math
import os
import pathlib
import subprocess

import jsonschema
import pytest
from referencing import Registry, Resource

import calibrax

SCHEMA_DIR = pathlib.Path(os.environ.get(
    "CALIBRAX_SCHEMA_DIR", pathlib.Path(__file__).resolve().parents[2] / "schemas"))


def validate(instance, name):
    resources = []
    for path in SCHEMA_DIR.glob("*.schema.json"):
        doc = json.loads(path.read_text())
        resources.append((path.name, Resource.from_contents(doc)))
        resources.append((doc["$id"], Resource.from_contents(doc)))
    registry = Registry().with_resources(resources)
    schema = json.loads((SCHEMA_DIR / name).read_text())
    jsonschema.Draft202012Validator(schema, registry=registry).validate(instance)


def test_prior_curve_values():
    assert calibrax.g_eval(calibrax.PriorCurveParams(1, 1, 0), 0.3) == pytest.approx(0.3)
    assert calibrax.g_eval(calibrax.PriorCurveParams(2, 1, 0), 0.5) == pytest.approx(1 / 3)
    assert calibrax.PriorCurveParams()(0.7) == pytest.approx(0.7)
    assert calibrax.beta_pdf(calibrax.BetaParams(2, 2), 0.5) == pytest.approx(1.5)
    fit = calibrax.beta_moment_fit([0.7, 0.9])
    assert (fit.a1, fit.a2) == (pytest.approx(12), pytest.approx(3))
    assert calibrax.link_eval("D1", 0.9) == pytest.approx(0.5490022137539321)
    assert calibrax.builtin_spec_names() == ["D1", "D2", "D3", "D4", "D5"]


def test_errors_surface_as_calibration_error():
    with pytest.raises(calibrax.CalibrationError, match="moment fit degenerate"):
        calibrax.beta_moment_fit([0.7, 0.7, 0.7])
    with pytest.raises(calibrax.CalibrationError):
        calibrax.g_eval(calibrax.PriorCurveParams(), 1.5)


def test_simulate_estimate_and_metrics():
    data = calibrax.simulate("D1", 3000, 7)
    assert len(data) == 3000
    assert data.to_csv() == calibrax.simulate("D1", 3000, 7).to_csv()
    fit = calibrax.estimate_curve(data)
    assert fit.params.alpha >= 0 and fit.params.beta >= 0
    assert fit.objective >= 1
    tce = calibrax.tce_bpm(data)
    assert abs(tce - calibrax.tce_exact("D1")) <= 0.03
    for value in (calibrax.ece_bin(data), calibrax.ece_debiased(data),
                  calibrax.ece_sweep(data), calibrax.ks_error(data)):
        assert 0 <= value <= 1


def test_small_dataset_metrics():
    d = calibrax.Dataset([0.6, 0.7, 0.8, 0.9], [0, 1, 1, 1])
    assert calibrax.ece_bin(d, bins=2) == pytest.approx(0.15)
    assert calibrax.ks_error(calibrax.Dataset([0.2, 0.8], [0, 1])) == pytest.approx(0.1)
    assert calibrax.ingest_logits([[2, 1, 0]], [0]).confidences[0] == pytest.approx(
        math.exp(2) / (math.exp(2) + math.exp(1) + 1))


def test_maps_round_trip():
    d = calibrax.Dataset([0.6, 0.7, 0.8, 0.9], [0, 1, 1, 1])
    hb = calibrax.fit_map("hb", d, bins=2)
    validate(hb, "map.schema.json")
    assert calibrax.apply_map(hb, [0.65, 0.95]) == [0.5, 1.0]
    iso = calibrax.fit_map("isotonic", calibrax.Dataset([0.2, 0.4], [1, 0]))
    validate(iso, "map.schema.json")
    assert calibrax.apply_map(iso, [0.2, 0.4]) == [0.5, 0.5]


def test_wilcoxon():
    r = calibrax.wilcoxon_signed_rank([1.8, 2.9, 0.4, 3.3, 1.1, 2.0],
                                      [1.0, 1.2, 0.9, 0.1, 1.4, 0.6])
    assert r.exact and r.n == 6 and 0 < r.p_value <= 1


def test_benchmark_report_schema():
    report = calibrax.benchmark("metrics", ["D3"], [400], runs=2, seed=1,
                                metrics=["ece", "ks"], threads=1)
    validate(report, "benchmark_report.schema.json")
    assert len(report["cells"]) == 2
    ead = calibrax.benchmark("ead", ["D1"], [500], runs=2, seed=1, threads=1)
    validate(ead, "benchmark_report.schema.json")
    assert ead["cells"][0]["p_flag"] == "insufficient n"


@pytest.fixture
def cli():
    exe = os.environ.get("CALIBRAX_CLI")
    if not exe:
        pytest.skip("CALIBRAX_CLI not set")
    return exe


def test_cli_reports_validate(cli, tmp_path):
    pairs = tmp_path / "d.csv"
    subprocess.run([cli, "--seed", "5", "simulate", "--dist", "D3", "--n", "800",
                    "--out", str(pairs)], check=True, capture_output=True)
    metrics = subprocess.run([cli, "metrics", "--in", str(pairs)], check=True,
                             capture_output=True, text=True)
    validate(json.loads(metrics.stdout), "metrics_report.schema.json")
    curve = subprocess.run([cli, "estimate", "--in", str(pairs)], check=True,
                           capture_output=True, text=True)
    validate(json.loads(curve.stdout), "curve.schema.json")
    bench = subprocess.run([cli, "--quiet", "benchmark", "--kind", "ead", "--dists", "D1",
                            "--sizes", "400", "--runs", "5"], check=True,
                           capture_output=True, text=True)
    validate(json.loads(bench.stdout), "benchmark_report.schema.json")
    missing = subprocess.run([cli, "estimate", "--in", str(tmp_path / "nope.csv")],
                             capture_output=True, text=True)
    assert missing.returncode == 1
    assert missing.stderr.startswith("error E_IO:")
