"""Scenario files: nested JSON configuration for a full simulation run.

Unknown keys are rejected at every nesting level so typos fail loudly.
Built-in scenarios (case1, case2, case2_ar_only) ship inside the package.
"""

import json
from dataclasses import dataclass, field
from importlib import resources

from .destruct import FailureModel
from .errors import ConfigurationError
from .trust import RuleTable, ThresholdConfig

BUILTIN_SCENARIOS = ("case1", "case2", "case2_ar_only")


@dataclass
class Drift:
    """Deterministic common temperature signal shared by every node."""

    sinusoids: tuple = ()        # (amplitude degC, period steps) pairs
    slope: float = 0.0           # degC per step
    pulse_rate: float = 0.0      # per-step probability of a decaying step pulse
    pulse_magnitude: tuple = (2.0, 6.0)
    pulse_decay: float = 0.5
    # single-node pulses (same shape, drawn independently per node); used by
    # the training generator to expose lone-neighbor deviations
    local_pulse_rate: float = 0.0
    local_pulse_magnitude: tuple = (2.0, 6.0)
    local_pulse_decay: float = 0.5


@dataclass
class HeatEvent:
    kind: str                    # "local_lamp" or "global_wave"
    start_steps: tuple
    magnitude: float
    decay: float = 0.5
    target_node: int = None

    def offset(self, step):
        return sum(self.magnitude * self.decay ** (step - s)
                   for s in self.start_steps if step >= s)


@dataclass
class EnvironmentModel:
    ambient: float = 22.0
    noise_sigma: float = 0.1
    drift: Drift = None
    events: tuple = ()


@dataclass
class TrainingSpec:
    """Attack-free data-generation settings for the offline NN training."""

    samples: int = 500
    seed: int = 7
    max_epochs: int = 80
    drift: Drift = field(default_factory=lambda: Drift(
        sinusoids=((5.0, 97), (2.0, 13)), pulse_rate=0.08,
        pulse_magnitude=(2.0, 6.0), pulse_decay=0.4,
        local_pulse_rate=0.04, local_pulse_magnitude=(2.0, 6.0),
        local_pulse_decay=0.4))


@dataclass
class Scenario:
    name: str = "scenario"
    node_count: int = 16
    grid_columns: int = 4
    grid_spacing: float = 1.0
    target_node: int = 5
    ar_order: int = 3
    ar_forgetting: float = 0.98
    ar_init_scale: float = 1e-3
    ar_intercept: bool = True
    nn_window: int = 3
    neighbor_count: int = 8
    hidden_sizes: tuple = (48, 24)
    thresholds: ThresholdConfig = field(default_factory=ThresholdConfig)
    trust_warmup: int = 10
    rule_table: RuleTable = None  # None -> RuleTable.default()
    failure_model: FailureModel = field(default_factory=FailureModel)
    environment: EnvironmentModel = field(default_factory=EnvironmentModel)
    training: TrainingSpec = field(default_factory=TrainingSpec)
    seed: int = 42
    total_steps: int = 40

    @property
    def nn_input_size(self):
        return self.neighbor_count * self.nn_window

    def rules(self):
        return self.rule_table if self.rule_table is not None else RuleTable.default()

    def validate(self):
        """Collect every invariant violation as a human-readable string."""
        problems = []
        if self.node_count < 2:
            problems.append("node_count must be at least 2")
        if self.grid_columns < 1 or self.grid_spacing <= 0:
            problems.append("grid must have positive columns and spacing")
        if not 0 <= self.target_node < self.node_count:
            problems.append("target_node out of range")
        if self.ar_order < 1:
            problems.append("ar.order must be >= 1")
        if not 0 < self.ar_forgetting <= 1:
            problems.append("ar.forgetting must be in (0, 1]")
        if self.ar_init_scale <= 0:
            problems.append("ar.init_scale must be positive")
        if self.nn_window < 1:
            problems.append("nn.window must be >= 1")
        if not 0 < self.neighbor_count < self.node_count:
            problems.append("neighbor_count must satisfy 0 < m < node_count")
        problems.extend(self.thresholds.validate())
        if self.trust_warmup < 0:
            problems.append("trust_warmup must be nonnegative")
        problems.extend(self.failure_model.validate())
        if self.environment.noise_sigma < 0:
            problems.append("environment.noise_sigma must be nonnegative")
        for ev in self.environment.events:
            if ev.kind not in ("local_lamp", "global_wave"):
                problems.append(f"unknown event kind {ev.kind!r}")
            if ev.kind == "local_lamp" and ev.target_node is None:
                problems.append("local_lamp event requires target_node")
            if not 0 < ev.decay <= 1:
                problems.append("event decay must be in (0, 1]")
            if any(s < 0 for s in ev.start_steps):
                problems.append("event start_steps must be nonnegative")
        if self.training.samples < 1:
            problems.append("training.samples must be positive")
        if self.total_steps < 0:
            problems.append("total_steps must be nonnegative")
        return problems


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def _check_keys(section, data, allowed):
    unknown = set(data) - set(allowed)
    if unknown:
        raise ConfigurationError(
            f"unknown key(s) in {section}: {', '.join(sorted(unknown))}")


def _parse_drift(data):
    if data is None:
        return None
    _check_keys("drift", data, {"sinusoids", "slope", "pulse_rate",
                                "pulse_magnitude", "pulse_decay",
                                "local_pulse_rate", "local_pulse_magnitude",
                                "local_pulse_decay"})
    return Drift(
        sinusoids=tuple((float(a), float(p)) for a, p in data.get("sinusoids", [])),
        slope=float(data.get("slope", 0.0)),
        pulse_rate=float(data.get("pulse_rate", 0.0)),
        pulse_magnitude=tuple(data.get("pulse_magnitude", (2.0, 6.0))),
        pulse_decay=float(data.get("pulse_decay", 0.5)),
        local_pulse_rate=float(data.get("local_pulse_rate", 0.0)),
        local_pulse_magnitude=tuple(data.get("local_pulse_magnitude", (2.0, 6.0))),
        local_pulse_decay=float(data.get("local_pulse_decay", 0.5)),
    )


def _parse_event(data):
    _check_keys("event", data, {"kind", "start_steps", "magnitude", "decay",
                                "target_node"})
    return HeatEvent(
        kind=data["kind"],
        start_steps=tuple(int(s) for s in data["start_steps"]),
        magnitude=float(data["magnitude"]),
        decay=float(data.get("decay", 0.5)),
        target_node=data.get("target_node"),
    )


def parse_scenario(data, name="scenario", base_dir=None):
    """Build a Scenario from a decoded JSON object, rejecting unknown keys."""
    if not isinstance(data, dict):
        raise ConfigurationError("scenario file must hold a JSON object")
    _check_keys("scenario", data, {
        "name", "node_count", "grid", "target_node", "ar", "nn", "thresholds",
        "trust_warmup", "rule_table", "rule_table_file", "failure_model",
        "environment", "training", "seed", "total_steps"})
    sc = Scenario(name=data.get("name", name))

    sc.node_count = int(data.get("node_count", sc.node_count))
    grid = data.get("grid", {})
    _check_keys("grid", grid, {"columns", "spacing"})
    sc.grid_columns = int(grid.get("columns", sc.grid_columns))
    sc.grid_spacing = float(grid.get("spacing", sc.grid_spacing))
    sc.target_node = int(data.get("target_node", sc.target_node))

    ar = data.get("ar", {})
    _check_keys("ar", ar, {"order", "forgetting", "init_scale", "include_intercept"})
    sc.ar_order = int(ar.get("order", sc.ar_order))
    sc.ar_forgetting = float(ar.get("forgetting", sc.ar_forgetting))
    sc.ar_init_scale = float(ar.get("init_scale", sc.ar_init_scale))
    sc.ar_intercept = bool(ar.get("include_intercept", sc.ar_intercept))

    nn = data.get("nn", {})
    _check_keys("nn", nn, {"window", "neighbor_count", "hidden_sizes"})
    sc.nn_window = int(nn.get("window", sc.nn_window))
    sc.neighbor_count = int(nn.get("neighbor_count", sc.neighbor_count))
    sc.hidden_sizes = tuple(int(h) for h in nn.get("hidden_sizes", sc.hidden_sizes))

    th = data.get("thresholds", {})
    _check_keys("thresholds", th, {"eps_ar", "eps_nn", "alpha", "beta",
                                   "transitory_len", "reset_window"})
    defaults = ThresholdConfig()
    sc.thresholds = ThresholdConfig(
        eps_ar=float(th.get("eps_ar", defaults.eps_ar)),
        eps_nn=float(th.get("eps_nn", defaults.eps_nn)),
        alpha=int(th.get("alpha", defaults.alpha)),
        beta=int(th.get("beta", defaults.beta)),
        transitory_len=int(th.get("transitory_len", defaults.transitory_len)),
        reset_window=int(th.get("reset_window", defaults.reset_window)),
    )
    sc.trust_warmup = int(data.get("trust_warmup", sc.trust_warmup))

    if "rule_table" in data and "rule_table_file" in data:
        raise ConfigurationError("give either rule_table or rule_table_file, not both")
    if data.get("rule_table") is not None:
        sc.rule_table = RuleTable.from_mapping(data["rule_table"])
    elif data.get("rule_table_file") is not None:
        path = data["rule_table_file"]
        if base_dir is not None:
            import os
            path = os.path.join(base_dir, path)
        sc.rule_table = RuleTable.from_file(path)

    fm = data.get("failure_model", {})
    _check_keys("failure_model", fm, {"p_incompatible_routine",
                                      "p_ignores_messages", "battery_floor"})
    fdef = FailureModel()
    sc.failure_model = FailureModel(
        p_incompatible_routine=float(fm.get("p_incompatible_routine",
                                            fdef.p_incompatible_routine)),
        p_ignores_messages=float(fm.get("p_ignores_messages",
                                        fdef.p_ignores_messages)),
        battery_floor=float(fm.get("battery_floor", fdef.battery_floor)),
    )

    env = data.get("environment", {})
    _check_keys("environment", env, {"ambient", "noise_sigma", "drift", "events"})
    sc.environment = EnvironmentModel(
        ambient=float(env.get("ambient", 22.0)),
        noise_sigma=float(env.get("noise_sigma", 0.1)),
        drift=_parse_drift(env.get("drift")),
        events=tuple(_parse_event(e) for e in env.get("events", [])),
    )

    tr = data.get("training", {})
    _check_keys("training", tr, {"samples", "seed", "max_epochs", "drift"})
    tdef = TrainingSpec()
    sc.training = TrainingSpec(
        samples=int(tr.get("samples", tdef.samples)),
        seed=int(tr.get("seed", tdef.seed)),
        max_epochs=int(tr.get("max_epochs", tdef.max_epochs)),
        drift=_parse_drift(tr["drift"]) if tr.get("drift") is not None else tdef.drift,
    )

    sc.seed = int(data.get("seed", sc.seed))
    sc.total_steps = int(data.get("total_steps", sc.total_steps))
    return sc


def load_scenario(path_or_name):
    """Load a scenario from a file path or a built-in name."""
    import os
    if path_or_name in BUILTIN_SCENARIOS:
        text = (resources.files("wsnguard") / "scenarios"
                / f"{path_or_name}.json").read_text()
        base_dir = None
        name = path_or_name
    else:
        try:
            with open(path_or_name) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigurationError(f"cannot read scenario {path_or_name}: {exc}") from exc
        base_dir = os.path.dirname(os.path.abspath(path_or_name))
        name = os.path.splitext(os.path.basename(path_or_name))[0]
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(
            f"scenario parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}")
    return parse_scenario(data, name=name, base_dir=base_dir)
