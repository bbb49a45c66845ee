"""Experiment orchestration: structure, determinism, checks, registry."""

import numpy as np
import pytest

import fracdim as fd
from fracdim.errors import DomainError
from fracdim.experiments import (
    ExperimentConfig,
    ExperimentReport,
    check_constancy,
    check_corollary_bound,
    check_example_74,
    check_graph_equality_continuous,
    check_graph_inequality,
    check_image_inequality,
    parse_drift_string,
    parse_set_string,
    run_example_experiment,
    run_experiment,
)
from fracdim.metrics import (
    PointCloud,
    drift_graph_cloud,
    graph_cloud,
    neighbor_collision_counts,
    packing_indices,
    packing_number,
)


def small_config(**kw):
    base = dict(
        name="t", drift=fd.DriftSpec.zero(1), drift_config="zero",
        set_kind="uniform", set_params=(), d=1, seeds=(1,),
        points=2**9 + 1, scales=(3, 7), methods=("box",),
    )
    base.update(kw)
    return ExperimentConfig(**base)


def synthetic_report(slopes_by_obj, seeds=8, drift="zero", set_kind="uniform", d=1):
    per_seed = []
    n = max(len(v) for v in slopes_by_obj.values())
    aggregates = {}
    for obj, slopes in slopes_by_obj.items():
        aggregates[obj] = {"box": {
            "median": float(np.median(slopes)),
            "iqr": float(np.percentile(slopes, 75) - np.percentile(slopes, 25)),
        }}
    config = {
        "name": "synthetic", "drift": drift, "set": {"kind": set_kind}, "d": d,
        "seeds": list(range(n)), "points": 2**9 + 1, "scales": [3, 7],
        "methods": ["box"], "refine": 4, "target": None,
    }
    return ExperimentReport(config, tuple(per_seed), aggregates, ())


# ---------------------------------------------------------------------------
# structure and determinism


def test_zero_drift_report_has_only_noise_objects():
    report = run_experiment(small_config())
    assert report.objects == ["graph_bm", "image_bm"]
    assert len(report.per_seed) == 1


def test_nonzero_drift_report_has_six_objects():
    cfg = small_config(drift=fd.DriftSpec.psi_n(16), drift_config="psi_n:16")
    report = run_experiment(cfg)
    assert report.objects == [
        "graph_bm", "graph_drift", "graph_sum", "image_bm", "image_drift", "image_sum",
    ]


def test_report_byte_identical_reruns():
    cfg = small_config(drift=fd.DriftSpec.linear([2.0]), drift_config="linear:2.0",
                       seeds=(3, 4))
    a = run_experiment(cfg).to_json()
    b = run_experiment(cfg).to_json()
    assert a == b


def test_per_seed_blocks_match_single_seed_runs():
    cfg2 = small_config(seeds=(5, 9))
    both = run_experiment(cfg2)
    one = run_experiment(small_config(seeds=(5,)))
    other = run_experiment(small_config(seeds=(9,)))
    assert both.per_seed[0] == one.per_seed[0]
    assert both.per_seed[1] == other.per_seed[0]


def test_seed_order_independence():
    fwd = run_experiment(small_config(seeds=(1, 2, 3)))
    rev = run_experiment(small_config(seeds=(3, 2, 1)))
    by_seed_f = {b["seed"]: b for b in fwd.per_seed}
    by_seed_r = {b["seed"]: b for b in rev.per_seed}
    assert by_seed_f == by_seed_r
    assert fwd.aggregates == rev.aggregates


def test_config_validation():
    with pytest.raises(ValueError):
        small_config(seeds=())
    with pytest.raises(ValueError):
        small_config(points=2**8)  # under-resolves j_max=7
    with pytest.raises(ValueError):
        small_config(methods=("magic",))


def test_oscillation_method_runs_on_uniform_graphs():
    cfg = small_config(methods=("box", "oscillation"))
    report = run_experiment(cfg)
    assert set(report.aggregates["graph_bm"]) == {"box", "oscillation"}
    assert set(report.aggregates["image_bm"]) == {"box"}


# ---------------------------------------------------------------------------
# checks on synthetic reports


def test_check_constancy_duplicated_seed_passes():
    rep = synthetic_report({"graph_bm": [1.3] * 8})
    v = check_constancy(rep, 0.05)
    assert v["pass"] and v["margin"] == 0.0


def test_check_constancy_split_slopes_fails():
    rep = synthetic_report({"graph_bm": [1.0] * 4 + [1.5] * 4})
    v = check_constancy(rep, 0.05)
    assert not v["pass"]
    assert abs(v["margin"] - 0.5) < 1e-12


def test_check_constancy_needs_eight_seeds():
    rep = synthetic_report({"graph_bm": [1.0] * 4})
    with pytest.raises(DomainError) as ei:
        check_constancy(rep, 0.05)
    assert ei.value.code == "insufficient-seeds"


def test_check_inequalities_zero_drift_trivial():
    rep = synthetic_report({"image_bm": [1.0] * 8, "graph_bm": [1.5] * 8})
    assert check_image_inequality(rep, 0.1)["pass"]
    assert check_graph_inequality(rep, 0.1)["pass"]


def test_check_inequality_detects_violation():
    rep = synthetic_report({
        "image_bm": [1.0] * 8, "image_drift": [0.6] * 8, "image_sum": [0.8] * 8,
        "graph_bm": [1.5] * 8, "graph_drift": [1.0] * 8, "graph_sum": [1.3] * 8,
    })
    v = check_image_inequality(rep, 0.1)
    assert not v["pass"] and abs(v["margin"] + 0.2) < 1e-12
    v2 = check_graph_inequality(rep, 0.1)
    assert not v2["pass"] and abs(v2["margin"] + 0.2) < 1e-12
    # widening the tolerance never flips pass -> fail
    assert check_image_inequality(rep, 0.25)["pass"]
    assert check_graph_inequality(rep, 0.21)["pass"]


def test_check_equality_guards_discontinuous_drift():
    rep = synthetic_report(
        {"graph_bm": [1.5] * 8, "graph_drift": [1.0] * 8, "graph_sum": [1.5] * 8},
        drift="psi_n:16",
    )
    with pytest.raises(DomainError) as ei:
        check_graph_equality_continuous(rep, 0.1)
    assert ei.value.code == "drift-not-continuous"


def test_check_equality_continuous_passes():
    rep = synthetic_report(
        {"graph_bm": [1.5] * 8, "graph_drift": [1.0] * 8, "graph_sum": [1.52] * 8},
        drift="linear:5.0",
    )
    v = check_graph_equality_continuous(rep, 0.1)
    assert v["pass"] and abs(v["margin"] - 0.02) < 1e-12


def test_check_equality_zero_drift_trivial():
    rep = synthetic_report({"graph_bm": [1.5] * 8})
    v = check_graph_equality_continuous(rep, 0.1)
    assert v["pass"] and v["margin"] == 0.0


def test_run_claim_thm16_equality_default_passes():
    report = fd.run_claim("thm16-equality")
    verdict = report.verdicts[0]
    assert verdict["claim"] == "thm16-equality"
    assert verdict["pass"]


def test_check_corollary_guards():
    rep = synthetic_report({"image_bm": [0.65] * 8}, set_kind="power_set", d=2)
    with pytest.raises(DomainError) as ei:
        check_corollary_bound(rep, 1.0, 0.1, 0.15)
    assert ei.value.code == "corollary-needs-d1"
    rep2 = synthetic_report({"image_bm": [0.65] * 8}, set_kind="uniform", d=1)
    with pytest.raises(DomainError) as ei2:
        check_corollary_bound(rep2, 1.0, 0.1, 0.15)
    assert ei2.value.code == "not-power-grid"


def test_check_corollary_window():
    rep = synthetic_report({"image_bm": [0.64] * 8}, set_kind="power_set", d=1)
    v = check_corollary_bound(rep, 1.0, 0.1, 0.15)
    assert v["pass"]
    rep_low = synthetic_report({"image_bm": [0.40] * 8}, set_kind="power_set", d=1)
    assert not check_corollary_bound(rep_low, 1.0, 0.1, 0.15)["pass"]


# ---------------------------------------------------------------------------
# the lacunary example experiment


def test_example_experiment_rejects_paper_schedule():
    with pytest.raises(DomainError) as ei:
        run_example_experiment(
            fd.LacunarySchedule.paper(), 3, (1,), (3, 7), 2**9 + 1, (1.0, 0.2), 0.03
        )
    assert ei.value.code == "schedule-not-simulable"


def test_example_experiment_zero_truncation():
    # truncation 0 means no drift terms: graph(drift) is a flat segment
    report = run_example_experiment(
        fd.LacunarySchedule.desk(), 0, (1, 2), (4, 10), 2**14 + 1, (1.0, 0.2), 0.03
    )
    med_drift = report.median("graph_drift", "box")
    med_sum = report.median("graph_sum", "box")
    assert abs(med_drift - 1.0) < 0.1
    assert med_sum > med_drift + 0.03
    by_claim = {v["claim"]: v for v in report.verdicts}
    assert by_claim["example-53"]["pass"]
    assert by_claim["example-74-directional"]["pass"]
    assert report.config["tail_bound"] == fd.lacunary_tail_bound(fd.LacunarySchedule.desk(), 0)


def test_example_74_margin_monotone():
    rep = synthetic_report({"graph_drift": [1.1] * 8, "graph_sum": [1.15] * 8})
    assert check_example_74(rep, 0.03)["pass"]
    assert not check_example_74(rep, 0.10)["pass"]


def test_thinning_packing_transfer_in_experiment_flow():
    # a packing of the drift graph thins to a packing of the noisy graph of
    # guaranteed size, and never beats the greedy packing of the same cloud
    grid = fd.TimeGrid.uniform(2**13 + 1)
    drift = fd.LacunarySchedule.desk().drift(3)
    eps = 2.0**-8
    for seed in (1, 2, 3, 4):
        path = fd.apply_drift(fd.generate_bm(grid, 1, seed), drift)
        centers = packing_indices(drift_graph_cloud(path), eps)
        noisy = graph_cloud(path).points[centers]
        threshold = 2.0 * np.log(1 / eps) ** (noisy.shape[1] + 1)
        counts = neighbor_collision_counts(noisy, eps)
        selected = fd.good_point_thinning(noisy, eps)
        n_good = int((counts < threshold).sum())
        assert selected.size >= n_good / (threshold + 1)
        assert selected.size <= packing_number(PointCloud.from_points(noisy), eps)


# ---------------------------------------------------------------------------
# registry


def test_run_claim_unknown_id():
    with pytest.raises(KeyError) as ei:
        fd.run_claim("bogus")
    msg = str(ei.value)
    for cid in fd.CLAIM_IDS:
        assert cid in msg


def test_parse_drift_string_round_trip():
    assert parse_drift_string("zero", 2).dim == 2
    assert np.array_equal(parse_drift_string("linear:1.5,-2", 2).mu, [1.5, -2.0])
    assert parse_drift_string("psi_n:64", 1).n == 64
    spec = parse_drift_string("lacunary:desk:2", 1)
    assert spec.schedule == (64, 256)
    with pytest.raises(ValueError):
        parse_drift_string("wobble:3", 1)
    with pytest.raises(ValueError):
        parse_drift_string("linear:abc", 1)


def test_parse_set_string():
    assert parse_set_string("uniform") == ("uniform", {})
    assert parse_set_string("power:1.5") == ("power_set", {"beta": 1.5})
    assert parse_set_string("dyadic:4") == ("dyadic", {"level": 4})
    with pytest.raises(ValueError):
        parse_set_string("grid:9")
