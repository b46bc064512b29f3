import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wsnguard import (Action, RuleTable, ThresholdConfig, TrustCategory,
                      TrustState, classify_trust, update_trust)
from wsnguard.errors import ConfigurationError


def trace_single_channel(errors, eps, k):
    """Brute-force transcription of the per-channel pseudocode loop.

    Independent of update_trust: explicit counter handling, one channel.
    Returns the trust indicator after feeding all errors.
    """
    b = 0
    countdown = 0
    for e in errors:
        if abs(e) > eps and countdown == 0:
            b += 1
            countdown = k
        elif countdown > 0:
            countdown -= 1
    return b


def run_update_trust(errors, eps, k, reset_window=10_000):
    cfg = ThresholdConfig(eps_ar=eps, eps_nn=1e9, transitory_len=k,
                          reset_window=reset_window)
    state = TrustState()
    for e in errors:
        update_trust(state, e, 0.0, cfg)
    return state.b_ar


class TestClassification:
    def test_zero(self):
        assert classify_trust(0, 3, 5) is TrustCategory.ZERO

    def test_at_alpha(self):
        assert classify_trust(3, 3, 5) is TrustCategory.AT_ALPHA

    def test_saturation_above_beta(self):
        assert classify_trust(7, 3, 5) is TrustCategory.AT_OR_ABOVE_BETA

    @pytest.mark.parametrize("b,expected", [
        (0, TrustCategory.ZERO), (1, TrustCategory.BELOW_ALPHA),
        (2, TrustCategory.BELOW_ALPHA), (3, TrustCategory.AT_ALPHA),
        (4, TrustCategory.BETWEEN_ALPHA_BETA), (5, TrustCategory.AT_OR_ABOVE_BETA),
    ])
    def test_case_study_bins(self, b, expected):
        assert classify_trust(b, 3, 5) is expected

    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, 100), st.integers(1, 20), st.integers(2, 40))
    def test_partition_totality(self, b, alpha, extra):
        beta = alpha + extra
        category = classify_trust(b, alpha, beta)
        # exactly one bin matches
        matches = [b == 0, 0 < b < alpha, b == alpha, alpha < b < beta, b >= beta]
        assert matches.count(True) == 1
        assert matches.index(True) == int(category)

    def test_invalid_alpha_beta(self):
        with pytest.raises(ConfigurationError):
            classify_trust(1, 5, 3)


class TestTrustUpdate:
    def test_increment_sets_transitory(self):
        cfg = ThresholdConfig(eps_ar=1.0, transitory_len=3)
        state = TrustState()
        changed = update_trust(state, 1.5, 0.0, cfg)
        assert changed == (True, False)
        assert state.b_ar == 1 and state.transitory_ar == 3

    def test_below_threshold_no_change(self):
        cfg = ThresholdConfig(eps_ar=1.0)
        state = TrustState()
        assert update_trust(state, 0.5, 0.0, cfg) == (False, False)
        assert state.b_ar == 0 and state.b_nn == 0

    def test_negative_error_uses_magnitude(self):
        cfg = ThresholdConfig(eps_ar=1.0)
        state = TrustState()
        update_trust(state, -2.5, 0.0, cfg)
        assert state.b_ar == 1

    def test_two_consecutive_breaches_one_increment(self):
        assert run_update_trust([2.0, 2.0], eps=1.0, k=3) == 1
        assert trace_single_channel([2.0, 2.0], eps=1.0, k=3) == 1

    def test_channels_independent(self):
        cfg = ThresholdConfig(eps_ar=1.0, eps_nn=2.0)
        state = TrustState()
        update_trust(state, 0.2, 5.0, cfg)
        assert (state.b_ar, state.b_nn) == (0, 1)

    def test_none_error_skips_channel(self):
        cfg = ThresholdConfig(eps_ar=1.0, eps_nn=2.0)
        state = TrustState()
        update_trust(state, None, 5.0, cfg)
        assert (state.b_ar, state.b_nn) == (0, 1)

    @settings(max_examples=150, deadline=None)
    @given(st.lists(st.sampled_from([0.0, 2.0]), min_size=1, max_size=40),
           st.integers(1, 6))
    def test_matches_pseudocode_trace(self, pattern, k):
        assert run_update_trust(pattern, eps=1.0, k=k) == \
            trace_single_channel(pattern, eps=1.0, k=k)

    @pytest.mark.parametrize("burst", [1, 2, 3, 4, 5])
    def test_transitory_suppression(self, burst):
        k = 4
        got = run_update_trust([2.0] * burst, eps=1.0, k=k)
        assert got == (1 if burst <= k + 1 else 2)

    def test_window_reset_to_zero(self):
        cfg = ThresholdConfig(eps_ar=1.0, transitory_len=2, reset_window=10)
        state = TrustState()
        update_trust(state, 3.0, 0.0, cfg)
        update_trust(state, 0.0, 3.0, cfg)
        assert state.b_ar == 1 and state.b_nn == 1
        for _ in range(9):
            update_trust(state, 0.0, 0.0, cfg)
        assert state.b_ar == 1  # window not yet elapsed
        update_trust(state, 0.0, 0.0, cfg)
        assert (state.b_ar, state.b_nn) == (0, 0)

    def test_reset_window_restarts_on_increment(self):
        cfg = ThresholdConfig(eps_ar=1.0, transitory_len=1, reset_window=5)
        state = TrustState()
        update_trust(state, 3.0, 0.0, cfg)
        for _ in range(3):
            update_trust(state, 0.0, 0.0, cfg)
        update_trust(state, 3.0, 0.0, cfg)  # restarts the quiet window
        for _ in range(4):
            update_trust(state, 0.0, 0.0, cfg)
        assert state.b_ar == 2  # still within the restarted window
        update_trust(state, 0.0, 0.0, cfg)
        assert state.b_ar == 0


class TestRuleTable:
    def test_both_at_alpha_fires(self):
        table = RuleTable.default()
        assert table.lookup(TrustCategory.AT_ALPHA,
                            TrustCategory.AT_ALPHA) is Action.SELF_DESTRUCT

    def test_at_alpha_with_nn_zero_does_nothing(self):
        table = RuleTable.default()
        assert table.lookup(TrustCategory.AT_ALPHA,
                            TrustCategory.ZERO) is Action.DO_NOTHING

    def test_fully_reliable_pair(self):
        table = RuleTable.default()
        assert table.lookup(TrustCategory.ZERO,
                            TrustCategory.ZERO) is Action.DO_NOTHING

    def test_saturated_pair_fires(self):
        table = RuleTable.default()
        assert table.lookup(TrustCategory.AT_OR_ABOVE_BETA,
                            TrustCategory.AT_OR_ABOVE_BETA) is Action.SELF_DESTRUCT

    def test_default_table_monotone(self):
        table = RuleTable.default()
        for (a, n), action in table.items():
            if action is Action.SELF_DESTRUCT:
                for a2 in TrustCategory:
                    for n2 in TrustCategory:
                        if a2 >= a and n2 >= n:
                            assert table.lookup(a2, n2) is Action.SELF_DESTRUCT

    def test_ar_only_table(self):
        table = RuleTable.ar_only()
        assert table.lookup(TrustCategory.AT_ALPHA,
                            TrustCategory.ZERO) is Action.SELF_DESTRUCT
        assert table.lookup(TrustCategory.BELOW_ALPHA,
                            TrustCategory.AT_OR_ABOVE_BETA) is Action.DO_NOTHING

    def test_partial_table_rejected(self):
        mapping = RuleTable.default().to_mapping()
        mapping.pop("zero,zero")
        with pytest.raises(ConfigurationError):
            RuleTable.from_mapping(mapping)

    def test_bad_entry_rejected(self):
        mapping = RuleTable.default().to_mapping()
        mapping["zero,zero"] = "explode"
        with pytest.raises(ConfigurationError):
            RuleTable.from_mapping(mapping)

    def test_mapping_round_trip(self):
        table = RuleTable.default()
        clone = RuleTable.from_mapping(table.to_mapping())
        for (a, n), action in table.items():
            assert clone.lookup(a, n) is action

    def test_from_file(self, tmp_path):
        import json
        path = tmp_path / "rules.json"
        path.write_text(json.dumps(RuleTable.ar_only().to_mapping()))
        table = RuleTable.from_file(path)
        assert table.lookup(TrustCategory.AT_ALPHA,
                            TrustCategory.ZERO) is Action.SELF_DESTRUCT

    def test_from_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            RuleTable.from_file(tmp_path / "nope.json")


class TestThresholdConfig:
    def test_defaults_valid(self):
        assert ThresholdConfig().validate() == []

    def test_alpha_beta_ordering(self):
        problems = ThresholdConfig(alpha=5, beta=3).validate()
        assert any("0 < alpha < beta" in p for p in problems)
