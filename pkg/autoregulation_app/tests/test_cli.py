import json
import re
import numpy as np
import pandas as pd
import pytest
from config import get_settings
from main import cli
from utilities import read_subject_file
from analysis.datagen import synth_subject
from analysis.fir_simpson import coefficients_from_json
from analysis.graybox import gb_init, gb_train, model_to_json
from analysis.pipeline import estimate_ari, pressure_change, velocity_change
from analysis.signal import save_subject_csv
from mock_data import reference_pairs
from schemas.datagen_schema import SynthSpec
from schemas.graybox_schema import GrayBoxConfig
from schemas.pipeline_schema import FirEstimator
from schemas.signal_schema import CapnicState, SampledSignal, SubjectRecord

ROW = re.compile(r"(S\d+)\s+(\d+)\s+(\d+)")

def write_record(path, record: SubjectRecord):
    with open(path, "w", encoding="utf-8", newline="") as f:
        save_subject_csv(record, f)
    return path

def flat_record(n: int = 100) -> SubjectRecord:
    return SubjectRecord(
        id="flat", state=CapnicState.NORMOCAPNIA,
        abp=SampledSignal(samples=np.full(n, 90.0), fs=10.0),
        cbfv=SampledSignal(samples=np.full(n, 50.0), fs=10.0)
    )

def invoke(runner, args):
    result = runner.invoke(cli, [str(a) for a in args])
    assert result.exit_code == 0, result.output
    return result

#################
### TEMPLATES ###
#################

def test_templates_default(runner, tmp_path):
    out = tmp_path / "templates.csv"
    invoke(runner, ["templates", "--out", out])
    frame = pd.read_csv(out)
    assert frame.shape == (600, 11)
    assert list(frame.columns) == ["time"] + [f"ARI{k}" for k in range(10)]
    assert frame["time"].iloc[1] == pytest.approx(0.1)
    # Rest level before the step
    assert np.all(frame.iloc[:50, 1:].to_numpy() == 1.0)

def test_templates_of_constant_pressure(runner, tmp_path):
    subject = write_record(tmp_path / "flat.csv", flat_record())
    out = tmp_path / "templates.csv"
    invoke(runner, ["templates", subject, "--out", out])
    frame = pd.read_csv(out)
    assert len(frame) == 100
    assert np.all(frame.iloc[:, 1:].to_numpy() == 1.0)

def test_templates_json(runner, tmp_path):
    out = tmp_path / "templates.json"
    invoke(runner, ["templates", "--format", "json", "--duration", "10", "--out", out])
    data = json.loads(out.read_text())
    assert list(data) == ["time"] + [f"ARI{k}" for k in range(10)]
    assert all(len(column) == 100 for column in data.values())

def test_templates_classify_back(runner, tmp_path):
    out = tmp_path / "templates.csv"
    invoke(runner, ["templates", "--out", out])
    frame = pd.read_csv(out)
    abp = np.where(frame["time"].to_numpy() < 5.0, 100.0, 80.0)
    for k in range(10):
        record = SubjectRecord(
            id=f"T{k}", state=CapnicState.NORMOCAPNIA,
            abp=SampledSignal(samples=abp, fs=10.0),
            cbfv=SampledSignal(samples=60.0 * frame[f"ARI{k}"].to_numpy(), fs=10.0)
        )
        subject = write_record(tmp_path / f"T{k}.csv", record)
        result = invoke(runner, ["classify", subject])
        assert json.loads(result.output)["ari"] == k

################
### CLASSIFY ###
################

def test_synth_then_classify(runner, tmp_path):
    subject = tmp_path / "s.csv"
    invoke(runner, ["synth", "--ari", "7", "--out", subject])
    result = invoke(runner, ["classify", subject])
    estimate = json.loads(result.output)
    assert estimate["ari"] == 7
    assert estimate["metric"] == "mse"
    assert len(estimate["per_template_scores"]) == 10

def test_classify_text_and_csv(runner, tmp_path):
    subject = tmp_path / "s.csv"
    invoke(runner, ["synth", "--ari", "3", "--out", subject])
    assert invoke(runner, ["classify", subject, "--format", "table"]).output.startswith("ARI 3 (mse ")
    lines = invoke(runner, ["classify", subject, "--format", "csv"]).output.splitlines()
    assert lines[0].startswith("ari,score,metric,score_ARI0")
    assert lines[1].split(",")[0] == "3"

def test_classify_missing_file(runner, tmp_path):
    result = runner.invoke(cli, ["classify", str(tmp_path / "missing.csv")])
    assert result.exit_code == 2

def test_classify_undefined_correlation(runner, tmp_path):
    subject = write_record(tmp_path / "flat.csv", flat_record())
    result = runner.invoke(cli, ["classify", str(subject), "--metric", "correlation"])
    assert result.exit_code == 1
    assert "undefined correlation" in result.output

def test_classify_bad_csv(runner, tmp_path):
    subject = tmp_path / "bad.csv"
    subject.write_text("time,abp,cbfv\n0.0,100,60\n0.1,abc,60\n")
    result = runner.invoke(cli, ["classify", str(subject)])
    assert result.exit_code == 1
    assert "bad.csv" in result.output

def test_graybox_needs_model(runner, tmp_path):
    subject = tmp_path / "s.csv"
    invoke(runner, ["synth", "--out", subject])
    result = runner.invoke(cli, ["classify", str(subject), "--estimator", "graybox"])
    assert result.exit_code == 2

#################################
### LIBRARY / CLI EQUIVALENCE ###
#################################

def test_fit_fir_then_classify(runner, tmp_path):
    subject = tmp_path / "s.csv"
    taps = tmp_path / "h.json"
    invoke(runner, ["synth", "--ari", "0", "--noise-sigma", "0.01", "--seed", "3", "--out", subject])
    invoke(runner, ["fit-fir", subject, "--out", taps])
    result = invoke(runner, ["classify", subject, "--estimator", "fir", "--coefficients", taps])

    record = read_subject_file(subject, CapnicState.NORMOCAPNIA)
    h = coefficients_from_json(taps.read_text())
    assert result.output == estimate_ari(record, FirEstimator(h=h)).model_dump_json(indent=2) + "\n"

def test_fit_fir_csv(runner, tmp_path):
    subject = tmp_path / "s.csv"
    invoke(runner, ["synth", "--ari", "0", "--out", subject])
    lines = invoke(runner, ["fit-fir", subject, "--format", "csv"]).output.splitlines()
    assert lines[0] == "h0,h1,h2,h3,h4,h5,h6"
    assert np.allclose([float(x) for x in lines[1].split(",")], [0, 1, 0, 0, 0, 0, 0], atol=1e-9)

def test_train_without_epochs(runner, tmp_path):
    subject = tmp_path / "s.csv"
    trace = tmp_path / "trace.csv"
    invoke(runner, ["synth", "--ari", "5", "--out", subject])
    result = invoke(runner, ["train", subject, "--epochs", "0", "--seed", "0", "--trace", trace])

    record = read_subject_file(subject, CapnicState.NORMOCAPNIA)
    dP, target = pressure_change(record), velocity_change(record)
    config = GrayBoxConfig(hidden_width=8, learning_rate=0.01, epochs=0, seed=0)
    model, _ = gb_train(gb_init(config, dP), dP, target, config)
    assert result.output == model_to_json(model) + "\n"
    assert pd.read_csv(trace).empty

def test_train_then_classify(runner, tmp_path):
    subject = tmp_path / "s.csv"
    model = tmp_path / "model.json"
    trace = tmp_path / "trace.csv"
    invoke(runner, ["synth", "--ari", "0", "--out", subject])
    invoke(runner, ["train", subject, "--epochs", "50", "--out", model, "--trace", trace])
    losses = pd.read_csv(trace)
    assert list(losses.columns) == ["epoch", "loss"]
    assert len(losses) == 50
    result = invoke(runner, ["classify", subject, "--estimator", "graybox", "--model", model])
    assert 0 <= json.loads(result.output)["ari"] <= 9

##############
### COHORT ###
##############

def test_reference_cohort_table(runner):
    result = invoke(runner, ["cohort", "--reference"])
    found = sorted(
        ((m.group(1), int(m.group(2)), int(m.group(3))) for m in ROW.finditer(result.output)),
        key=lambda row: int(row[0][1:])
    )
    assert [(normo, hyper) for _, normo, hyper in found] == reference_pairs
    assert "Anomalous increase: 1 (S14)" in result.output

def test_cohort_json(runner):
    report = json.loads(invoke(runner, ["cohort", "--subjects", "4", "--anomaly-index", "2", "--format", "json"]).output)
    assert report["summary"]["subjects"] == 4
    assert [row["subject_id"] for row in report["rows"] if row["anomalous_increase"]] == ["S03"]

def test_synth_cohort_directory(runner, tmp_path):
    directory = tmp_path / "cohort"
    invoke(runner, ["synth", "--cohort", "3", "--anomaly-index", "0", "--out", directory])
    assert (directory / "manifest.json").exists()
    assert len(list(directory.glob("*.csv"))) == 6
    report = json.loads(invoke(runner, ["cohort", "--manifest", directory / "manifest.json", "--format", "json"]).output)
    assert report["rows"][0]["anomalous_increase"]

def test_cohort_needs_one_source(runner):
    assert runner.invoke(cli, ["cohort"]).exit_code == 2
    assert runner.invoke(cli, ["cohort", "--reference", "--subjects", "3"]).exit_code == 2

def test_cohort_bad_anomaly_index(runner):
    result = runner.invoke(cli, ["cohort", "--subjects", "3", "--anomaly-index", "7"])
    assert result.exit_code == 1
    assert "out of range" in result.output

#####################
### GLOBAL FLAGS ###
#####################

def test_runs_are_deterministic(runner):
    args = ["synth", "--ari", "4", "--noise-sigma", "0.02", "--seed", "11"]
    assert invoke(runner, args).output == invoke(runner, args).output

def test_seed_from_environment(runner, monkeypatch):
    args = ["synth", "--noise-sigma", "0.01"]
    with_flag = invoke(runner, args + ["--seed", "5"]).output
    other = invoke(runner, args + ["--seed", "6"]).output
    monkeypatch.setenv("AUTOREG_SEED", "5")
    get_settings.cache_clear()
    assert invoke(runner, args).output == with_flag
    assert with_flag != other

def test_version(runner):
    result = invoke(runner, ["--version"])
    assert "0.1.0" in result.output

@pytest.mark.parametrize("window, code", [("abc", 2), ("1:2:3", 2), ("5:1", 1), ("0", 1)])
def test_bad_baseline_window(runner, tmp_path, window, code):
    subject = write_record(tmp_path / "s.csv", synth_subject(SynthSpec(true_ari=6)))
    result = runner.invoke(cli, ["classify", str(subject), "--baseline-window", window])
    assert result.exit_code == code

def test_baseline_window_flag(runner, tmp_path):
    subject = write_record(tmp_path / "s.csv", synth_subject(SynthSpec(true_ari=6)))
    assert json.loads(invoke(runner, ["classify", subject, "--baseline-window", "1:4"]).output)["ari"] == 6

def test_reruns_match_for_every_command(runner, tmp_path):
    subject = tmp_path / "s.csv"
    invoke(runner, ["synth", "--ari", "6", "--noise-sigma", "0.01", "--seed", "2", "--out", subject])

    invoke(runner, ["templates", subject, "--out", tmp_path / "t1.csv"])
    invoke(runner, ["templates", subject, "--out", tmp_path / "t2.csv"])
    assert (tmp_path / "t1.csv").read_bytes() == (tmp_path / "t2.csv").read_bytes()

    classify = ["classify", subject, "--metric", "correlation"]
    assert invoke(runner, classify).output == invoke(runner, classify).output

    fit = ["fit-fir", subject, "--ridge", "0.001"]
    assert invoke(runner, fit).output == invoke(runner, fit).output

    for run in ("1", "2"):
        invoke(runner, ["train", subject, "--epochs", "20", "--seed", "4",
                        "--out", tmp_path / f"model{run}.json", "--trace", tmp_path / f"trace{run}.csv"])
    assert (tmp_path / "model1.json").read_bytes() == (tmp_path / "model2.json").read_bytes()
    assert (tmp_path / "trace1.csv").read_bytes() == (tmp_path / "trace2.csv").read_bytes()

    reference = ["cohort", "--reference"]
    assert invoke(runner, reference).output == invoke(runner, reference).output
    planned = ["cohort", "--subjects", "4", "--seed", "9", "--format", "json"]
    assert invoke(runner, planned).output == invoke(runner, planned).output

##############
### ERRORS ###
##############

def failed(runner, args, message):
    result = runner.invoke(cli, [str(a) for a in args])
    assert result.exit_code == 1, result.output
    assert "Error:" in result.output
    assert message in result.output
    assert isinstance(result.exception, SystemExit)

@pytest.mark.parametrize("text, message", [
    ("not json", "not valid JSON"),
    ('{"x": 1}', "\"h\" array"),
])
def test_classify_malformed_coefficients(runner, tmp_path, text, message):
    subject = write_record(tmp_path / "s.csv", synth_subject(SynthSpec(true_ari=2)))
    taps = tmp_path / "h.json"
    taps.write_text(text)
    failed(runner, ["classify", subject, "--estimator", "fir", "--coefficients", taps], message)

def test_classify_malformed_model(runner, tmp_path):
    subject = write_record(tmp_path / "s.csv", synth_subject(SynthSpec(true_ari=2)))
    model = tmp_path / "model.json"
    model.write_text("{model")
    failed(runner, ["classify", subject, "--estimator", "graybox", "--model", model], "not valid JSON")

def test_fit_fir_negative_ridge(runner, tmp_path):
    subject = write_record(tmp_path / "s.csv", synth_subject(SynthSpec(true_ari=2)))
    failed(runner, ["fit-fir", subject, "--ridge", "-1"], "Ridge must be non-negative")

def test_classify_diverging_templates(runner, tmp_path):
    subject = write_record(tmp_path / "s.csv", synth_subject(SynthSpec(true_ari=2)))
    failed(runner, ["classify", subject, "--fs", "0.001"], "diverged")

def test_cohort_malformed_manifest(runner, tmp_path):
    manifest = tmp_path / "manifest.json"
    manifest.write_text("seed: 1")
    failed(runner, ["cohort", "--manifest", manifest], "not valid JSON")
