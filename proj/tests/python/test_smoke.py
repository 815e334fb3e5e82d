"""End-to-end smoke tests for the python bindings.

Everything here is deterministic: fixed seeds, exact expectations where the
model admits them, and structural checks elsewhere.
"""

import math

import numpy as np
import pytest

import dbmatch as dm


def test_capacity_memoryless_case():
    params = dm.validate_params(0.0, [0.5, 0.5])
    res = dm.matching_capacity(params, 0.3)
    assert res.capacity_bits == pytest.approx(0.7, abs=1e-9)
    assert res.closed_form_bits == pytest.approx(0.7, abs=1e-9)
    assert res.tail_bound_bits <= 1e-10
    assert res.terms_used >= 1
    assert dm.iid_capacity([0.5, 0.5], 0.3) == pytest.approx(0.7, abs=1e-9)


def test_capacity_endpoints_and_table():
    params = dm.validate_params(0.25, [0.4, 0.3, 0.3])
    rows = dm.capacity_table(params, [0.0, 0.5, 1.0])
    assert [r.delta for r in rows] == [0.0, 0.5, 1.0]
    assert all(r.cross_check_ok for r in rows)
    assert rows[0].result.capacity_bits == pytest.approx(
        dm.conditional_entropy_rate(params, 0), abs=1e-12
    )
    assert rows[2].result.capacity_bits == 0.0
    # capacity decreases with delta
    caps = [r.result.capacity_bits for r in rows]
    assert caps[0] > caps[1] > caps[2]


def test_transition_power_is_stochastic():
    params = dm.validate_params(0.5, [0.25, 0.25, 0.25, 0.25])
    p3 = dm.transition_power(params, 3)
    assert p3.shape == (4, 4)
    assert np.allclose(p3.sum(axis=1), 1.0, atol=1e-12)
    g3 = 0.5**3
    assert p3[0, 0] == pytest.approx(g3 + (1 - g3) * 0.25, abs=1e-12)
    assert p3[0, 1] == pytest.approx((1 - g3) * 0.25, abs=1e-12)


def test_validation_errors_surface_as_python_exceptions():
    with pytest.raises(dm.GammaOutOfRange):
        dm.validate_params(1.0, [0.5, 0.5])
    with pytest.raises(dm.InvalidDistribution):
        dm.validate_params(0.0, [0.5])
    with pytest.raises(dm.ParseError):
        dm.parse_config("this is not json")
    with pytest.raises(dm.ValidationError, match="growth_rates"):
        dm.config_from_dict(
            {
                "markov": {"gamma": 0.0, "u": [0.5, 0.5]},
                "repetition": {"probs": [0.5, 0.5]},
                "n": 8,
                "trials": 1,
                "master_seed": 1,
                "matcher": {"method": "consistency"},
            }
        )
    assert issubclass(dm.GammaOutOfRange, dm.Error)
    assert issubclass(dm.ValidationError, dm.Error)


def test_database_numpy_round_trip(tmp_path):
    params = dm.validate_params(0.5, [0.25, 0.25, 0.25, 0.25])
    db = dm.generate_database(params, 64, 16, seed=7)
    arr = db.to_numpy()
    assert arr.shape == (64, 16)
    assert arr.dtype == np.uint8
    assert arr.min() >= 1 and arr.max() <= 4

    rebuilt = dm.database_from_array(arr, alphabet_size=4)
    assert rebuilt == db

    path = tmp_path / "db.bin"
    dm.save_database(db, path)
    assert dm.load_database(path) == db

    with pytest.raises(dm.SymbolOutOfRange):
        dm.database_from_array(np.zeros((2, 2), dtype=np.uint8), alphabet_size=4)


def test_pattern_json_round_trip():
    dist = dm.validate_repetition([0.2, 0.5, 0.3])
    assert dist.delta == pytest.approx(0.2)
    assert dist.s_max == 2
    pattern = dm.sample_pattern(dist, 20, seed=11)
    text = dm.pattern_to_json(pattern)
    assert dm.pattern_from_json(text) == pattern
    assert pattern.total_width == sum(pattern.s)


def test_manual_pipeline_with_oracle_pattern_matches_perfectly():
    params = dm.validate_params(0.25, [0.25, 0.25, 0.25, 0.25])
    db1 = dm.generate_database(params, 64, 16, seed=123)
    truth = dm.sample_permutation(64, seed=456)
    shuffled = dm.apply_permutation(db1, truth)
    dist = dm.validate_repetition([0.2, 0.5, 0.3])
    pattern = dm.sample_pattern(dist, 16, seed=789)
    repeated = dm.apply_repetitions(shuffled, pattern)
    assert repeated.cols == pattern.total_width

    oracle = dm.DetectedPattern(list(pattern.s), dm.DetectionStatus.RECOVERED)
    reduced = dm.reduce(repeated, oracle)
    assert reduced.cols == 16

    result = dm.match_consistency(db1, reduced)
    assert dm.evaluate(result, truth) == 0.0
    assert dm.evaluate_errors(result, truth) == 0
    inv = truth.inverse()
    assignment = result.assignment
    assert assignment.dtype == np.uint32
    assert [assignment[i] for i in range(64)] == list(inv.map)

    # a huge typicality window reproduces the consistency matcher
    cfg = dm.MatcherConfig(dm.MatchMethod.TYPICALITY, epsilon=1e6,
                           delta_for_typicality=dist.delta)
    typ = dm.match_typicality(db1, reduced, params, cfg)
    assert list(typ.assignment) == list(assignment)
    with pytest.raises(dm.InvalidEpsilon):
        dm.match_typicality(db1, reduced, params,
                            dm.MatcherConfig(dm.MatchMethod.TYPICALITY, epsilon=0.0))


def test_histogram_detection_agrees_with_duplicate_criterion():
    # Recovery succeeds exactly when the source histogram is duplicate-free.
    params = dm.validate_params(0.0, [0.5, 0.5])
    dist = dm.validate_repetition([0.25, 0.5, 0.25])
    for seed in range(10):
        db1 = dm.generate_database(params, 256, 6, seed=dm.derive_seed(99, seed))
        pattern = dm.sample_pattern(dist, 6, seed=dm.derive_seed(77, seed))
        repeated = dm.apply_repetitions(db1, pattern)
        h1 = dm.column_histograms(dm.collapse(db1, 1))
        h2 = dm.column_histograms(dm.collapse(repeated, 1))
        detected = dm.detect_pattern(h1, h2)
        if dm.has_duplicate_counts(h1):
            assert detected.status == dm.DetectionStatus.DETECTION_ERROR
        else:
            assert detected.status == dm.DetectionStatus.RECOVERED
            assert list(detected.s_hat) == list(pattern.s)


def test_run_experiment_from_dict_is_deterministic():
    config = dm.config_from_dict(
        {
            "markov": {"gamma": 0.5, "u": [0.5, 0.5]},
            "repetition": {"probs": [0.25, 0.5, 0.25]},
            "n": 8,
            "m_list": [16, 64],
            "trials": 5,
            "master_seed": 7,
            "matcher": {"method": "consistency"},
            "pattern_source": "oracle",
        }
    )
    assert config.cell_sizes() == [16, 64]
    assert config.pattern_source == dm.PatternSource.ORACLE

    res1 = dm.run_experiment(config, workers=1)
    res2 = dm.run_experiment(config, workers=2)
    assert dm.summary_csv_text(res1) == dm.summary_csv_text(res2)

    assert len(res1.cells) == 2
    cell = res1.cells[0]
    assert cell.n == 8 and cell.m == 16
    assert cell.r_realized == pytest.approx(math.log2(16) / 8)
    assert cell.delta == pytest.approx(0.25)
    assert 0.0 <= cell.row_error_rate_mean <= 1.0
    assert cell.row_error_rate_ci_lo <= cell.row_error_rate_mean <= cell.row_error_rate_ci_hi
    assert cell.capacity_bits > 0.0

    header = dm.summary_csv_text(res1).splitlines()[0]
    assert header == (
        "n,m,R_realized,delta,gamma,capacity_bits,trials,"
        "detection_error_rate,row_error_rate_mean,row_error_rate_ci_lo,row_error_rate_ci_hi"
    )

    records = res1.trials[0]
    assert len(records) == 5
    assert [r.trial_index for r in records] == list(range(5))
    seeds = {r.seed_database for r in records}
    assert len(seeds) == 5  # one independent stream per trial
    for r in records:
        assert r.m == 16
        assert len(r.true_s) == 8
        assert r.seed_database != r.seed_permutation != r.seed_pattern
        assert r.row_error_rate == pytest.approx(r.row_errors / r.m)

    lines = dm.trials_jsonl_text(res1).splitlines()
    assert len(lines) == 10


def test_write_outputs(tmp_path):
    config = dm.config_from_dict(
        {
            "markov": {"gamma": 0.0, "u": [0.5, 0.5]},
            "repetition": {"probs": [0.5, 0.5]},
            "n": 8,
            "m_list": [16],
            "trials": 2,
            "master_seed": 3,
            "matcher": {"method": "consistency"},
            "pattern_source": "oracle",
        }
    )
    res = dm.run_experiment(config)
    out_dir = tmp_path / "out"
    dm.write_outputs(res, config, str(out_dir))
    assert (out_dir / "summary.csv").read_text() == dm.summary_csv_text(res)
    assert (out_dir / "trials.jsonl").exists()


def test_wilson_interval_endpoints():
    w = dm.wilson_interval(0, 100)
    assert w.lo == 0.0 and 0.0 < w.hi < 0.05
    w = dm.wilson_interval(100, 100)
    assert w.hi == 1.0 and 0.95 < w.lo < 1.0
    w = dm.wilson_interval(0, 0)
    assert w.lo == 0.0 and w.hi == 1.0


def test_collision_probe_shape_and_corner():
    params = dm.validate_params(0.5, [0.5, 0.5])
    cells = dm.collision_probe(params, [1, 4], [8], trials=20, seed=5)
    assert [(c.n, c.m) for c in cells] == [(1, 8), (4, 8)]
    assert cells[0].mu_hat == 0.0  # a single column cannot collide
    assert 0.0 <= cells[1].mu_hat <= 1.0


def test_permutation_construction_and_validation():
    perm = dm.Permutation([2, 0, 1])
    assert list(perm.inverse().map) == [1, 2, 0]
    assert len(perm) == 3
    with pytest.raises(dm.ValidationError):
        dm.Permutation([0, 0, 1])
