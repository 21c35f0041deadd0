"""Monte Carlo evaluation, sensitivity sweeps, baseline comparisons."""

import dataclasses

import pytest

from uavplan.evaluate import (
    EvaluationReport,
    SWEEP_PARAMETERS,
    compare,
    evaluate_plan,
    offload_price_comparison,
    sweep,
)
from uavplan.planner import PlanningError, exact_expected_cost, solve_phase2
from uavplan.scenario import (
    DemandScenario,
    ScenarioTree,
    ShortfallScenario,
    WeatherScenario,
)

from conftest import make_costs, small_instance, tree_z2


def z3_tree(p_loss: float = 0.5, mag: int = 2) -> ScenarioTree:
    stage = (
        ShortfallScenario(flags=(1,), magnitudes=(mag,), probability=p_loss),
        ShortfallScenario(flags=(0,), magnitudes=(0,), probability=1.0 - p_loss),
    )
    return ScenarioTree(
        weather=(WeatherScenario(strong_wind=(0,), probability=1.0),),
        demand=(DemandScenario(dims=(240,), probability=1.0),),
        shortfall_stages=(stage,),
    )


class TestEvaluatePlan:
    def test_degenerate_tree_has_zero_error(self):
        inst = small_instance(tree_z2(1, [(240,)], [1.0]))
        plan = solve_phase2(inst, "sip")
        report = evaluate_plan(plan, inst, n_samples=500, seed=1)
        assert report.mean_cost == pytest.approx(plan.expected_cost, abs=1e-12)
        assert report.std_error == 0.0

    def test_same_seed_same_report(self):
        inst = small_instance(z3_tree())
        plan = solve_phase2(inst, "sip")
        a = evaluate_plan(plan, inst, n_samples=2000, seed=42)
        b = evaluate_plan(plan, inst, n_samples=2000, seed=42)
        assert a == b

    def test_mean_converges_to_exact_expectation(self):
        inst = small_instance(z3_tree())
        plan = solve_phase2(inst, "sip")
        exact = exact_expected_cost(inst, plan)
        report = evaluate_plan(plan, inst, n_samples=20_000, seed=0)
        if report.std_error > 0:
            assert abs(report.mean_cost - exact) <= 4.0 * report.std_error
        else:
            assert report.mean_cost == pytest.approx(exact, abs=1e-9)

    def test_breakdown_labels_and_sum(self):
        inst = small_instance(z3_tree())
        plan = solve_phase2(inst, "sip")
        report = evaluate_plan(plan, inst, n_samples=1000, seed=5)
        assert report.stages == ("stage1", "stage2", "stage3", "terminal")
        assert sum(report.breakdown) == pytest.approx(report.mean_cost, abs=1e-9)
        d = report.to_dict()
        assert d["n_samples"] == 1000 and d["seed"] == 5
        assert set(d["breakdown"]) == set(report.stages)

    def test_rejects_empty_sample(self):
        inst = small_instance(z3_tree())
        plan = solve_phase2(inst, "sip")
        with pytest.raises(ValueError, match="n_samples"):
            evaluate_plan(plan, inst, n_samples=0)

    def test_plan_from_other_tree_rejected(self):
        flat = small_instance(tree_z2(1, [(240,)], [1.0]))
        plan = solve_phase2(flat, "sip")
        lossy = small_instance(z3_tree())
        with pytest.raises(PlanningError, match="stage-3"):
            evaluate_plan(plan, lossy)
        wide = small_instance(tree_z2(1, [(240,), (480,)], [0.5, 0.5]))
        with pytest.raises(PlanningError, match="stage-2"):
            evaluate_plan(plan, wide)

    def test_report_invariants_enforced(self):
        with pytest.raises(ValueError, match="negative"):
            EvaluationReport(1.0, -0.1, 10, ("stage1",), (1.0,), 0)
        with pytest.raises(ValueError, match="lengths"):
            EvaluationReport(1.0, 0.0, 10, ("stage1", "stage2"), (1.0,), 0)
        with pytest.raises(ValueError, match="sum"):
            EvaluationReport(1.0, 0.0, 10, ("stage1",), (2.0,), 0)


class TestSweep:
    def test_unknown_parameter(self):
        inst = small_instance(tree_z2(1, [(240,)], [1.0]))
        with pytest.raises(ValueError, match="unknown sweep parameter"):
            sweep(inst, {"parameter": "battery", "grid": [1.0]})

    def test_empty_grid(self):
        inst = small_instance(tree_z2(1, [(240,)], [1.0]))
        with pytest.raises(ValueError, match="empty"):
            sweep(inst, {"parameter": "penalty_C_p", "grid": []})

    def test_unsorted_grid(self):
        inst = small_instance(tree_z2(1, [(240,)], [1.0]))
        with pytest.raises(ValueError, match="strictly increasing"):
            sweep(inst, {"parameter": "penalty_C_p", "grid": [2.0, 1.0]})

    def test_penalty_sweep_crosses_reservation_flip(self):
        inst = small_instance(tree_z2(1, [(240,)], [1.0], p_strong=0.3))
        res = sweep(inst, {"parameter": "penalty_C_p", "grid": [1.60, 1.65]})
        assert res.objectives[0] < res.objectives[1]
        assert "type 1" in res.summaries[0]
        assert "type 3" in res.summaries[1]

    def test_weather_sweep_needs_mixed_scenarios(self):
        calm_only = ScenarioTree(
            weather=(
                WeatherScenario(strong_wind=(0,), probability=0.4),
                WeatherScenario(strong_wind=(0,), probability=0.6),
            ),
            demand=(DemandScenario(dims=(240,), probability=1.0),),
        )
        inst = small_instance(calm_only)
        with pytest.raises(ValueError, match="strong-wind"):
            sweep(inst, {"parameter": "weather_prob", "grid": [0.5]})

    def test_weather_prob_outside_unit_interval(self):
        inst = small_instance(tree_z2(1, [(240,)], [1.0]))
        with pytest.raises(ValueError, match=r"\[0, 1\]"):
            sweep(inst, {"parameter": "weather_prob", "grid": [1.5]})

    def test_shortfall_sweep_needs_recourse_stage(self):
        inst = small_instance(tree_z2(1, [(240,)], [1.0]))
        with pytest.raises(ValueError, match="recourse stage"):
            sweep(inst, {"parameter": "shortfall_prob", "grid": [0.5]})

    def test_uav_type_sweep_validates_ids(self):
        inst = small_instance(tree_z2(1, [(240,)], [1.0]))
        with pytest.raises(ValueError, match="known type id"):
            sweep(inst, {"parameter": "uav_type", "grid": [7]})

    def test_z_sweep_grows_stages(self):
        inst = small_instance(tree_z2(1, [(240,)], [1.0]))
        res = sweep(
            inst,
            {"parameter": "z", "grid": [2, 3], "shortfall_magnitudes": [2]},
        )
        assert len(res.objectives) == 2
        # a guaranteed loss can only cost more than no recourse stage
        assert res.objectives[1] >= res.objectives[0] - 1e-9
        rows = res.rows()
        assert rows[0]["parameter"] == "z" and rows[0]["value"] == 2.0
        assert list(rows[0])[-1] == "summary"

    def test_split_sweep_reports_threshold(self):
        inst = small_instance(tree_z2(1, [(240,)], [1.0]))
        res = sweep(
            inst, {"parameter": "split_s", "grid": [1, 2], "split_m": 4}
        )
        assert res.breakdowns[0]["k"] == 16
        assert res.breakdowns[1]["k"] == 12

    def test_sweep_is_deterministic(self):
        inst = small_instance(z3_tree())
        spec = {"parameter": "shortfall_prob", "grid": [0.2, 0.8]}
        assert sweep(inst, spec).rows() == sweep(inst, spec).rows()

    def test_parameter_catalog_is_exposed(self):
        assert "penalty_C_p" in SWEEP_PARAMETERS
        assert len(SWEEP_PARAMETERS) == 7


class TestCompare:
    def test_orders_baselines(self):
        inst = small_instance(tree_z2(1, [(240,), (480,)], [0.5, 0.5]))
        result = compare(inst)
        assert set(result) == {"sip_cost", "evf_cost", "random_cost"}
        assert result["sip_cost"] <= result["evf_cost"] + 1e-9
        assert result["sip_cost"] <= result["random_cost"] + 1e-9

    def test_degenerate_tree_equates_sip_and_evf(self):
        inst = small_instance(tree_z2(1, [(240,)], [1.0]))
        result = compare(inst)
        assert result["sip_cost"] == pytest.approx(result["evf_cost"], abs=1e-9)

    def test_rejects_thin_seed_list(self):
        inst = small_instance(tree_z2(1, [(240,)], [1.0]))
        with pytest.raises(ValueError, match="30 seeds"):
            compare(inst, seeds=range(5))


class TestPriceComparison:
    def test_rejects_bad_multipliers(self):
        inst = small_instance(tree_z2(1, [(240,)], [1.0]))
        with pytest.raises(ValueError, match="at least one"):
            offload_price_comparison(inst, multipliers=())
        with pytest.raises(ValueError, match="strictly increasing"):
            offload_price_comparison(inst, multipliers=(2.0, 1.0))

    def test_rows_keep_dominance(self):
        inst = small_instance(tree_z2(1, [(240,)], [1.0]))
        rows = offload_price_comparison(inst, multipliers=(0.5, 2.0))
        assert [r["multiplier"] for r in rows] == [0.5, 2.0]
        for r in rows:
            assert r["sip_cost"] <= r["evf_cost"] + 1e-9
            assert r["sip_cost"] <= r["random_cost"] + 1e-9
