import numpy as np
import pytest

from evtrack.errors import ValidationError
from evtrack.fusion import Rule
from evtrack.simulation import (
    CARGO,
    DEFAULT_FRAME,
    FIGHTER,
    build_scenario,
    default_scenario,
    make_rng,
    run_latencies,
    run_monte_carlo,
    run_seed,
    run_single,
    sample_declaration,
    switch_latency,
)
from evtrack.tracker import ConfusionMatrix, classifier_c1, classifier_c2

IDENTITY = ConfusionMatrix(DEFAULT_FRAME, ((1.0, 0.0), (0.0, 1.0)))


def test_default_scenario():
    sc = default_scenario()
    assert sc.k_max == 120
    assert sc.segments[0][0] == CARGO
    assert [d for t, d in sc.segments if t == FIGHTER] == [20, 10, 5]
    assert [s.scan for s in sc.switches()] == [21, 41, 71, 81, 106, 111]


def test_build_scenario_validation():
    const = build_scenario(DEFAULT_FRAME, [("Cargo", 120)])
    assert (const.truth() == CARGO).all() and not const.switches()
    with pytest.raises(ValidationError):
        build_scenario(DEFAULT_FRAME, [("Cargo", 60), ("Fighter", 59)], k_max=120)
    with pytest.raises(ValidationError):
        build_scenario(DEFAULT_FRAME, [("Cargo", 60), ("Fighter", 0)])
    with pytest.raises(ValidationError):
        build_scenario(DEFAULT_FRAME, [("Cargo", 60), ("Cargo", 60)])


def test_sample_declaration_identity():
    rng = make_rng(0)
    assert all(sample_declaration(t, IDENTITY, rng).index == t for t in [0, 1] * 500)


@pytest.mark.parametrize("cm, truth, expected", [
    (classifier_c1(DEFAULT_FRAME), FIGHTER, 0.95),
    (classifier_c2(DEFAULT_FRAME), CARGO, 0.75),
])
def test_sample_declaration_frequencies(cm, truth, expected):
    rng = make_rng(123)
    hits = sum(sample_declaration(truth, cm, rng).index == truth for _ in range(100_000))
    assert abs(hits / 100_000 - expected) <= 0.01


def test_run_single_identity_constant_truth():
    sc = build_scenario(DEFAULT_FRAME, [("Fighter", 40)])
    res = run_single(sc, IDENTITY, seed=5)
    for rule in Rule:
        assert res.correct(rule).all()


def test_run_single_deterministic():
    sc, cm = default_scenario(), classifier_c2(DEFAULT_FRAME)
    a, b = run_single(sc, cm, seed=run_seed(9, 3)), run_single(sc, cm, seed=run_seed(9, 3))
    assert np.array_equal(a.declared, b.declared)
    for rule in Rule:
        assert np.array_equal(a.traces[rule].masses, b.traces[rule].masses)
        assert np.array_equal(a.traces[rule].decisions, b.traces[rule].decisions)


def test_rules_share_declarations_and_masses_normalized():
    res = run_single(default_scenario(), classifier_c1(DEFAULT_FRAME), seed=11)
    for rule in Rule:
        assert np.allclose(res.traces[rule].masses.sum(axis=1), 1.0, atol=1e-9)
    single = run_single(default_scenario(), classifier_c1(DEFAULT_FRAME), rules=["pcr5"], seed=11)
    assert np.array_equal(single.declared, res.declared)
    assert np.array_equal(single.traces[Rule.PCR5].masses, res.traces[Rule.PCR5].masses)


def test_dempster_failure_recorded_other_rule_continues():
    sc = build_scenario(DEFAULT_FRAME, [("Cargo", 5), ("Fighter", 5)])
    res = run_single(sc, IDENTITY, seed=0)
    assert res.traces[Rule.DEMPSTER].failed_at == 6
    assert not res.traces[Rule.PCR5].failed
    assert res.correct(Rule.PCR5)[:5].all()
    summary = run_monte_carlo(sc, IDENTITY, n_runs=3, master_seed=1)
    assert summary.rules[Rule.DEMPSTER].n_failed == 3
    assert not summary.rules[Rule.DEMPSTER].usable
    assert summary.rules[Rule.PCR5].usable


def test_requires_rule():
    with pytest.raises(ValidationError):
        run_single(default_scenario(), IDENTITY, rules=[])


def test_latency_examples():
    sc = default_scenario()
    lat, cens = run_latencies(sc.truth(), sc)
    assert (lat == 0).all() and not cens.any()
    decisions = sc.truth().copy()
    decisions[105:110] = CARGO  # miss the 5-scan Fighter segment entirely
    lat, cens = run_latencies(decisions, sc)
    assert lat[4] == 5 and cens[4]
    decisions = sc.truth().copy()
    decisions[20:23] = CARGO
    assert run_latencies(decisions, sc)[0][0] == 3


def test_single_run_summary_equals_run():
    sc, cm = default_scenario(), classifier_c2(DEFAULT_FRAME)
    summary = run_monte_carlo(sc, cm, n_runs=1, master_seed=77)
    res = run_single(sc, cm, seed=run_seed(77, 0))
    for rule in Rule:
        assert np.array_equal(summary.rules[rule].mean_masses, res.traces[rule].masses)
        assert np.array_equal(summary.rules[rule].accuracy, res.correct(rule).astype(float))
        lat, cens = run_latencies(res.traces[rule].decisions, sc)
        assert np.array_equal(summary.rules[rule].latencies[0], lat)
        assert np.array_equal(summary.rules[rule].censored[0], cens)
        one = switch_latency(res, sc)[rule]
        many = switch_latency(summary, sc)[rule]
        assert [s.censor_rate for s in one] == [s.censor_rate for s in many]


def test_monte_carlo_determinism_and_workers():
    sc, cm = default_scenario(), classifier_c1(DEFAULT_FRAME)
    a = run_monte_carlo(sc, cm, n_runs=24, master_seed=5)
    b = run_monte_carlo(sc, cm, n_runs=24, master_seed=5)
    c = run_monte_carlo(sc, cm, n_runs=24, master_seed=5, workers=3)
    for rule in Rule:
        for other in (b, c):
            assert np.array_equal(a.rules[rule].mean_masses, other.rules[rule].mean_masses)
            assert np.array_equal(a.rules[rule].latencies, other.rules[rule].latencies)
        assert np.allclose(a.rules[rule].mean_masses.sum(axis=1), 1.0, atol=1e-9)


def test_pcr5_never_fails_c1(mc_c1):
    summary, _ = mc_c1
    assert summary.rules[Rule.PCR5].n_failed == 0
    assert summary.rules[Rule.DEMPSTER].n_failed == 0


def test_dempster_fighter_belief_low_in_short_segments(mc_c1):
    summary, _ = mc_c1
    belief = summary.mean_belief(Rule.DEMPSTER, FIGHTER)
    for start, length in ((70, 10), (105, 5)):
        assert np.mean(belief[start:start + length] < 0.5) > 0.5


def test_dempster_change_peaks_with_c2(mc_c1, mc_c2):
    s1, s2 = mc_c1[0], mc_c2[0]
    for seg in (1, 3, 5):
        dempster_c2 = s2.segment_mean_belief(Rule.DEMPSTER, seg)
        assert dempster_c2 > s1.segment_mean_belief(Rule.DEMPSTER, seg)
        assert dempster_c2 < s2.segment_mean_belief(Rule.PCR5, seg)


def test_better_classifier_not_slower_for_pcr5(mc_c1, mc_c2, scenario):
    l1 = switch_latency(mc_c1[0], scenario)[Rule.PCR5][0]
    l2 = switch_latency(mc_c2[0], scenario)[Rule.PCR5][0]
    assert l1.mean <= l2.mean


def test_dempster_censors_short_segment_more(mc_c1, scenario):
    stats = switch_latency(mc_c1[0], scenario)
    assert stats[Rule.DEMPSTER][4].censor_rate > stats[Rule.PCR5][4].censor_rate
