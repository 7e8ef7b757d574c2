import numpy as np
import pytest
from pydantic import ValidationError
from errors import ClassificationError
from analysis.aaslid_tiecks import generate_templates
from analysis.ari_classifier import classify, compare_states
from schemas.classifier_schema import AriEstimate, FitMetric, StateChangeReport
from schemas.signal_schema import SampledSignal

def estimate(ari: int) -> AriEstimate:
    scores = tuple(0.0 if k == ari else 1.0 for k in range(10))
    return AriEstimate(ari=ari, score=0.0, per_template_scores=scores, metric=FitMetric.MSE)

def test_self_match(step_templates):
    result = classify(step_templates[5], step_templates)
    assert result.ari == 5
    assert result.score == 0.0
    assert result.metric == FitMetric.MSE
    assert len(result.per_template_scores) == 10

@pytest.mark.parametrize("metric", list(FitMetric))
def test_round_trip_every_template(step_templates, metric):
    for k in range(10):
        assert classify(step_templates[k], step_templates, metric).ari == k

def test_noisy_templates_are_recovered(step_templates):
    rng = np.random.default_rng(7)
    for k, template in enumerate(step_templates):
        noisy = template.derive(template.samples + rng.normal(0.0, 0.01, len(template)))
        assert classify(noisy, step_templates).ari == k

def test_flat_input_ties_to_ari0():
    dP = SampledSignal(samples=np.zeros(60), fs=10.0)
    templates = generate_templates(dP)
    v = SampledSignal(samples=np.ones(60), fs=10.0)
    result = classify(v, templates, FitMetric.MSE)
    assert result.ari == 0
    assert result.per_template_scores == (0.0,) * 10

def test_flat_input_has_no_correlation():
    dP = SampledSignal(samples=np.zeros(60), fs=10.0)
    templates = generate_templates(dP)
    v = SampledSignal(samples=np.ones(60), fs=10.0)
    with pytest.raises(ClassificationError, match="undefined correlation"):
        classify(v, templates, FitMetric.CORRELATION)

def test_flat_template_has_no_correlation(step_templates):
    templates = list(step_templates)
    templates[3] = templates[3].derive(np.ones(len(templates[3])))
    with pytest.raises(ClassificationError, match="undefined correlation"):
        classify(step_templates[4], templates, FitMetric.CORRELATION)

def test_offset_and_scale_invariance(step_templates):
    rng = np.random.default_rng(11)
    v = step_templates[6].derive(step_templates[6].samples + rng.normal(0.0, 0.02, len(step_templates[6])))
    base_mse = classify(v, step_templates, FitMetric.MSE).ari
    base_corr = classify(v, step_templates, FitMetric.CORRELATION).ari

    shifted = [t.derive(t.samples + 3.0) for t in step_templates]
    assert classify(v.derive(v.samples + 3.0), shifted, FitMetric.MSE).ari == base_mse

    scaled = [t.derive(t.samples * 2.0) for t in step_templates]
    assert classify(v.derive(v.samples * 2.0), scaled, FitMetric.MSE).ari == base_mse
    assert classify(v.derive(v.samples * 2.0), scaled, FitMetric.CORRELATION).ari == base_corr

def test_trim_window(step_templates):
    # Before the step all templates coincide, so a comparison there is a tie
    early = classify(step_templates[8], step_templates, trim=(0.0, 4.0))
    assert early.ari == 0
    late = classify(step_templates[8], step_templates, trim=(5.0, 60.0))
    assert late.ari == 8

def test_trim_window_too_small(step_templates):
    with pytest.raises(ClassificationError):
        classify(step_templates[0], step_templates, trim=(10.0, 10.05))

def test_template_count(step_templates):
    with pytest.raises(ClassificationError):
        classify(step_templates[0], step_templates[:9])

def test_length_mismatch(step_templates):
    short = step_templates[0].derive(step_templates[0].samples[:-1])
    with pytest.raises(ClassificationError):
        classify(short, step_templates)

def test_fs_mismatch(step_templates):
    other = SampledSignal(samples=step_templates[0].samples, fs=20.0)
    with pytest.raises(ClassificationError):
        classify(other, step_templates)

def test_single_sample_is_rejected():
    signal = SampledSignal(samples=[1.0], fs=10.0)
    with pytest.raises(ClassificationError):
        classify(signal, [signal] * 10)

def test_estimate_must_point_at_best_score():
    with pytest.raises(ValidationError):
        AriEstimate(ari=3, score=0.0, per_template_scores=(0.0,) * 10, metric=FitMetric.MSE)
    with pytest.raises(ValidationError):
        AriEstimate(ari=0, score=0.0, per_template_scores=(0.0,) * 9, metric=FitMetric.MSE)

def test_unchanged_subject():
    report = compare_states(estimate(8), estimate(8), "1")
    assert report.delta == 0
    assert not report.exceeds_limit
    assert not report.anomalous_increase

def test_increase_is_anomalous():
    report = compare_states(estimate(6), estimate(7), "14")
    assert report.delta == 1
    assert report.anomalous_increase
    assert not report.exceeds_limit

def test_large_drop_exceeds_limit():
    report = compare_states(estimate(9), estimate(5), "x")
    assert report.delta == -4
    assert report.exceeds_limit
    assert not report.anomalous_increase

def test_limit_is_strict():
    assert not compare_states(estimate(9), estimate(7), "x").exceeds_limit
    assert compare_states(estimate(9), estimate(6), "x").exceeds_limit

def test_report_flags_are_checked():
    with pytest.raises(ValidationError):
        StateChangeReport(subject_id="x", ari_normo=8, ari_hyper=6, delta=-2, exceeds_limit=True, anomalous_increase=False)
