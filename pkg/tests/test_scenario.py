import json

import pytest

from wsnguard import (Action, Scenario, TrustCategory, load_scenario,
                      parse_scenario)
from wsnguard.errors import ConfigurationError
from wsnguard.scenario import BUILTIN_SCENARIOS


class TestBuiltins:
    @pytest.mark.parametrize("name", BUILTIN_SCENARIOS)
    def test_loads_and_validates(self, name):
        sc = load_scenario(name)
        assert sc.name == name
        assert sc.validate() == []

    def test_case1_shape(self):
        sc = load_scenario("case1")
        assert (sc.node_count, sc.grid_columns) == (16, 4)
        assert sc.target_node == 5
        assert sc.neighbor_count == 8 and sc.nn_window == 3
        assert sc.hidden_sizes == (48, 24)
        assert [ev.kind for ev in sc.environment.events] == ["local_lamp"]
        assert sc.environment.events[0].target_node == 5
        assert sc.environment.events[0].start_steps == (15, 20, 27)

    def test_case2_uses_global_wave(self):
        sc = load_scenario("case2")
        assert [ev.kind for ev in sc.environment.events] == ["global_wave"]

    def test_case2_ar_only_rule_table(self):
        sc = load_scenario("case2_ar_only")
        table = sc.rules()
        assert table.lookup(TrustCategory.AT_ALPHA,
                            TrustCategory.ZERO) is Action.SELF_DESTRUCT


class TestParsing:
    def test_defaults_from_empty_object(self):
        sc = parse_scenario({})
        assert sc.node_count == 16 and sc.validate() == []

    def test_unknown_top_level_key(self):
        with pytest.raises(ConfigurationError, match="unknown key"):
            parse_scenario({"node_cuont": 16})

    def test_unknown_nested_key(self):
        with pytest.raises(ConfigurationError, match="thresholds"):
            parse_scenario({"thresholds": {"epsilon": 1.0}})

    def test_unknown_drift_key(self):
        with pytest.raises(ConfigurationError, match="drift"):
            parse_scenario({"environment": {"drift": {"wavelength": 3}}})

    def test_non_object_rejected(self):
        with pytest.raises(ConfigurationError):
            parse_scenario([1, 2, 3])

    def test_rule_table_and_file_are_exclusive(self):
        with pytest.raises(ConfigurationError, match="not both"):
            parse_scenario({"rule_table": {}, "rule_table_file": "x.json"})

    def test_inline_rule_table(self):
        from wsnguard import RuleTable
        sc = parse_scenario({"rule_table": RuleTable.ar_only().to_mapping()})
        assert sc.rules().lookup(TrustCategory.AT_ALPHA,
                                 TrustCategory.ZERO) is Action.SELF_DESTRUCT

    def test_rule_table_file_relative_to_scenario(self, tmp_path):
        from wsnguard import RuleTable
        (tmp_path / "rules.json").write_text(
            json.dumps(RuleTable.ar_only().to_mapping()))
        (tmp_path / "sc.json").write_text(
            json.dumps({"rule_table_file": "rules.json"}))
        sc = load_scenario(str(tmp_path / "sc.json"))
        assert sc.rules().lookup(TrustCategory.AT_ALPHA,
                                 TrustCategory.ZERO) is Action.SELF_DESTRUCT


class TestLoading:
    def test_missing_file(self):
        with pytest.raises(ConfigurationError, match="cannot read"):
            load_scenario("/no/such/file.json")

    def test_parse_error_reports_location(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{\n  "node_count": 16,\n}\n')
        with pytest.raises(ConfigurationError, match=r"line 3"):
            load_scenario(str(path))

    def test_name_from_file_stem(self, tmp_path):
        path = tmp_path / "mytest.json"
        path.write_text("{}")
        assert load_scenario(str(path)).name == "mytest"


class TestValidation:
    def test_default_scenario_valid(self):
        assert Scenario().validate() == []

    @pytest.mark.parametrize("field,value,fragment", [
        ("target_node", 99, "target_node"),
        ("ar_order", 0, "ar.order"),
        ("ar_forgetting", 1.5, "forgetting"),
        ("nn_window", 0, "nn.window"),
        ("neighbor_count", 16, "neighbor_count"),
        ("trust_warmup", -1, "trust_warmup"),
        ("total_steps", -1, "total_steps"),
    ])
    def test_violation_messages(self, field, value, fragment):
        sc = Scenario()
        setattr(sc, field, value)
        problems = sc.validate()
        assert any(fragment in p for p in problems)

    def test_local_lamp_requires_target(self):
        from wsnguard import EnvironmentModel, HeatEvent
        sc = Scenario()
        sc.environment = EnvironmentModel(events=(
            HeatEvent(kind="local_lamp", start_steps=(5,), magnitude=3.0),))
        assert any("target_node" in p for p in sc.validate())

    def test_unknown_event_kind(self):
        from wsnguard import EnvironmentModel, HeatEvent
        sc = Scenario()
        sc.environment = EnvironmentModel(events=(
            HeatEvent(kind="meteor", start_steps=(5,), magnitude=3.0),))
        assert any("event kind" in p for p in sc.validate())
