"""Scenario trees, path accounting, demand histograms, size formulas."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uavplan.scenario import (
    DemandScenario,
    ScenarioTree,
    ShortfallScenario,
    WeatherScenario,
    demand_hist_from_csv,
    enumerate_terminal_paths,
    flag_product_exposure,
    loss_prefixes,
    max_total_exposure,
    model_size_phase1,
    model_size_phase2,
    validate_tree,
)

from conftest import guaranteed_stage, tree_z2, zero_stage


def z4_tree():
    """One station, two demand outcomes, two recourse stages with a
    hit-or-miss loss at each."""
    stage = (
        ShortfallScenario(flags=(1,), magnitudes=(2,), probability=0.4),
        ShortfallScenario(flags=(0,), magnitudes=(0,), probability=0.6),
    )
    return ScenarioTree(
        weather=(
            WeatherScenario(strong_wind=(1,), probability=0.3),
            WeatherScenario(strong_wind=(0,), probability=0.7),
        ),
        demand=(
            DemandScenario(dims=(240,), probability=0.5),
            DemandScenario(dims=(480,), probability=0.5),
        ),
        shortfall_stages=(stage, stage),
    )


class TestValidateTree:
    def test_clean_tree(self):
        assert validate_tree(z4_tree()) == []
        assert validate_tree(tree_z2(2, [(240, 240)], [1.0])) == []

    def test_empty_tree(self):
        msgs = validate_tree(ScenarioTree(weather=(), demand=()))
        assert msgs and "no weather" in msgs[0]

    def test_probability_sum_checked_per_stage(self):
        tree = tree_z2(1, [(240,)], [0.9])
        msgs = validate_tree(tree)
        assert any("demand" in m and "sum" in m for m in msgs)

    def test_length_mismatch_reported(self):
        tree = ScenarioTree(
            weather=(WeatherScenario(strong_wind=(0, 0), probability=1.0),),
            demand=(DemandScenario(dims=(240,), probability=1.0),),
        )
        assert any("length" in m for m in validate_tree(tree))

    def test_nonbinary_flag_reported(self):
        tree = ScenarioTree(
            weather=(WeatherScenario(strong_wind=(2,), probability=1.0),),
            demand=(DemandScenario(dims=(240,), probability=1.0),),
        )
        assert any("not binary" in m for m in validate_tree(tree))

    def test_magnitude_without_flag_reported(self):
        bad = (
            ShortfallScenario(flags=(0,), magnitudes=(3,), probability=1.0),
        )
        tree = ScenarioTree(
            weather=(WeatherScenario(strong_wind=(0,), probability=1.0),),
            demand=(DemandScenario(dims=(240,), probability=1.0),),
            shortfall_stages=(bad,),
        )
        assert any("magnitude 3 with flag 0" in m for m in validate_tree(tree))

    def test_nonpositive_dim_reported(self):
        tree = tree_z2(1, [(0,)], [1.0])
        assert any("positive integer" in m for m in validate_tree(tree))


class TestPaths:
    def test_z_property(self):
        assert tree_z2(1, [(240,)], [1.0]).z == 2
        assert z4_tree().z == 4

    def test_loss_prefix_counts(self):
        tree = z4_tree()
        assert loss_prefixes(tree, 2) == [()]
        assert len(loss_prefixes(tree, 3)) == 2
        assert len(loss_prefixes(tree, 4)) == 4
        with pytest.raises(ValueError, match="stage"):
            loss_prefixes(tree, 5)

    def test_terminal_probabilities_sum_to_one(self):
        for tree in (z4_tree(), tree_z2(2, [(240, 360), (480, 240)], [0.25, 0.75])):
            paths = enumerate_terminal_paths(tree)
            assert sum(p.probability for p in paths) == pytest.approx(1.0, abs=1e-12)

    def test_path_count(self):
        assert len(enumerate_terminal_paths(z4_tree())) == 2 * 2 * 2

    def test_exposure_accumulates_while_flags_hold(self):
        tree = z4_tree()
        assert flag_product_exposure(tree, (0, 0), 0) == 4
        assert flag_product_exposure(tree, (0, 1), 0) == 2
        # a calm stage kills every later stage's contribution
        assert flag_product_exposure(tree, (1, 0), 0) == 0
        assert flag_product_exposure(tree, (1, 1), 0) == 0

    def test_max_total_exposure(self):
        assert max_total_exposure(z4_tree()) == 4
        assert max_total_exposure(tree_z2(1, [(240,)], [1.0])) == 0
        mixed = ScenarioTree(
            weather=(WeatherScenario(strong_wind=(0,), probability=1.0),),
            demand=(DemandScenario(dims=(240,), probability=1.0),),
            shortfall_stages=(guaranteed_stage(1, 5), zero_stage(1)),
        )
        assert max_total_exposure(mixed) == 5


class TestDemandHistogram:
    def test_counts_and_exact_probabilities(self):
        hist = demand_hist_from_csv([(240, 240), (360, 360), (240, 240)])
        assert hist.values == (240, 360)
        assert hist.counts == (2, 1)
        assert hist.total == 3
        assert sum(hist.probabilities) == 1.0
        assert hist.probabilities[0] == pytest.approx(2.0 / 3.0, rel=1e-15)

    def test_rejects_non_square(self):
        with pytest.raises(ValueError, match="entry 2"):
            demand_hist_from_csv([(240, 240), (240, 360)])

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError, match="positive integer"):
            demand_hist_from_csv([(0, 0)])

    def test_rejects_empty(self):
        with pytest.raises(ValueError, match="no demand"):
            demand_hist_from_csv([])

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.integers(1, 50), min_size=1, max_size=200))
    def test_probabilities_always_sum_to_one(self, dims):
        # exact as rationals; float conversion can shave an ulp
        hist = demand_hist_from_csv([(d, d) for d in dims])
        assert sum(hist.probabilities) == pytest.approx(1.0, abs=1e-12)
        assert hist.total == len(dims)


class TestSizeFormulas:
    def test_phase1_documented_shape(self):
        assert model_size_phase1(6, 6, 3, 10) == (468, 864)

    def test_phase1_rejects_nonpositive(self):
        with pytest.raises(ValueError, match="n_types"):
            model_size_phase1(1, 1, 0, 1)

    def test_phase2_small_shape(self):
        assert model_size_phase2(1, 2, 1, 2, 2) == (10, 64)

    def test_phase2_no_recourse_stage(self):
        n_vars, n_cons = model_size_phase2(1, 2, 1, 2)
        assert n_vars == 2 + 1 * 2 * 1 * 2
        assert n_cons == 2 * 1 * 2 * 2 + 1 * 1 * 2 * 2 + 2 * 1 * 1 * 2 * 2

    def test_phase2_rejects_bad_loss_count(self):
        with pytest.raises(ValueError, match="stage 3"):
            model_size_phase2(1, 2, 1, 2, 0)

    @settings(max_examples=30, deadline=None)
    @given(
        st.integers(1, 4),
        st.integers(1, 4),
        st.integers(1, 4),
        st.integers(1, 4),
    )
    def test_phase1_formula_structure(self, t, y, x, w):
        n_vars, n_cons = model_size_phase1(t, y, x, w)
        assert n_vars == t * y * (x + w)
        assert n_cons == t * y * (1 + 2 * w + x)
