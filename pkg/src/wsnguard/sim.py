"""Discrete-time simulation of the star-topology sensor field.

One step equals one second. Every transmitting node is sampled first, then
the base-station pipeline runs per node in ascending id order: AR step,
neighbor-window NN prediction, trust update, rule evaluation, and finally
any self-destructions are applied serially at the end of the step. All
randomness comes from per-node substreams so results are independent of
node iteration order.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .ar import ArPredictor
from .destruct import initiate_self_destruction
from .errors import ConfigurationError, TopologyError
from .nn import NeighborWindow, NeuralNetPredictor, absolute_error
from .node import NodeState, NodeStatus, Registry
from .trust import Action, TrustState, classify_trust, update_trust

# Battery cost of one transmission (charge fraction per step).
TX_COST = 1e-4

# Per-node streams are derived from (scenario seed, node id); the pulse
# schedule of a drift signal uses its own fixed lane.
_PULSE_LANE = 0x9E3779B9


# ---------------------------------------------------------------------------
# topology
# ---------------------------------------------------------------------------

def grid_positions(node_count, columns, spacing):
    return [((i % columns) * spacing, (i // columns) * spacing)
            for i in range(node_count)]


def build_network(scenario):
    """Place nodes on the grid and compute per-node nearest-neighbor lists.

    Returns (nodes dict, adjacency dict, registry). Neighbors are the m
    closest nodes by Euclidean distance, ties broken by lower id.
    """
    m = scenario.neighbor_count
    if scenario.node_count < m + 1:
        raise ConfigurationError(
            f"need at least {m + 1} nodes for {m} neighbors, have {scenario.node_count}")
    positions = grid_positions(scenario.node_count, scenario.grid_columns,
                               scenario.grid_spacing)
    nodes = {i: NodeState(id=i, position=pos) for i, pos in enumerate(positions)}
    adjacency = {}
    for i, (xi, yi) in enumerate(positions):
        ranked = sorted(
            (math.hypot(xj - xi, yj - yi), j)
            for j, (xj, yj) in enumerate(positions) if j != i)
        adjacency[i] = tuple(j for _, j in ranked[:m])
    registry = Registry()
    for node in nodes.values():
        registry.register(node)
    return nodes, adjacency, registry


# ---------------------------------------------------------------------------
# environment
# ---------------------------------------------------------------------------

def _decaying_pulses(n_steps, rate, magnitude_range, decay, seed_keys):
    offsets = np.zeros(max(n_steps, 0))
    if rate <= 0.0:
        return offsets
    rng = np.random.default_rng(seed_keys)
    lo, hi = magnitude_range
    decay = float(np.clip(decay, 0.0, 1.0))
    for step in range(n_steps):
        if rng.random() < rate:
            magnitude = rng.uniform(lo, hi)
            for t in range(step, n_steps):
                contribution = magnitude * decay ** (t - step)
                if contribution < 1e-6:
                    break
                offsets[t] += contribution
    return offsets


def pulse_series(drift, n_steps, seed):
    """Deterministic decaying-pulse offset series shared by every node."""
    if drift is None:
        return np.zeros(max(n_steps, 0))
    return _decaying_pulses(n_steps, drift.pulse_rate, drift.pulse_magnitude,
                            drift.pulse_decay, [int(seed), _PULSE_LANE])


def local_pulse_series(drift, n_steps, seed, node_id):
    """Per-node decaying-pulse offsets, independent across nodes."""
    if drift is None:
        return np.zeros(max(n_steps, 0))
    return _decaying_pulses(n_steps, drift.local_pulse_rate,
                            drift.local_pulse_magnitude,
                            drift.local_pulse_decay,
                            [int(seed), _PULSE_LANE, int(node_id) + 1])


def smooth_drift(drift, step):
    if drift is None:
        return 0.0
    value = drift.slope * step
    for amplitude, period in drift.sinusoids:
        value += amplitude * math.sin(2.0 * math.pi * step / period)
    return value


def environment_temperature(env, node_id, step, rng, common_offset=0.0):
    """Ambient + drift + active event offsets + Gaussian sensor noise."""
    value = env.ambient + common_offset
    for ev in env.events:
        if ev.kind == "global_wave" or ev.target_node == node_id:
            value += ev.offset(step)
    if env.noise_sigma > 0.0:
        value += rng.normal(0.0, env.noise_sigma)
    return value


# ---------------------------------------------------------------------------
# run artifacts
# ---------------------------------------------------------------------------

@dataclass
class RunReport:
    scenario_name: str
    rows: list = field(default_factory=list)      # dicts keyed by CSV columns
    events: list = field(default_factory=list)    # structured log records
    summary: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# world
# ---------------------------------------------------------------------------

class World:
    """Mutable state of one simulation run."""

    def __init__(self, scenario, net):
        problems = scenario.validate()
        if problems:
            raise ConfigurationError("; ".join(problems))
        self._check_net(scenario, net)
        self.scenario = scenario
        self.net = net
        self.nodes, self.adjacency, self.registry = build_network(scenario)
        self.rules = scenario.rules()
        self.filters = {
            i: ArPredictor(order=scenario.ar_order,
                           forgetting=scenario.ar_forgetting,
                           init_scale=scenario.ar_init_scale,
                           include_intercept=scenario.ar_intercept).reset()
            for i in self.nodes}
        self.trust = {i: TrustState() for i in self.nodes}
        self.rngs = {i: np.random.default_rng([scenario.seed, i]) for i in self.nodes}
        self.histories = {i: [] for i in self.nodes}   # newest first, len <= window
        self.last_accepted = {}
        self.pulses = pulse_series(scenario.environment.drift,
                                   scenario.total_steps, scenario.seed)
        self.step_idx = 0
        self.rows = []
        self.events = []

    @staticmethod
    def _check_net(scenario, net):
        if net.layer_sizes_[0] != scenario.nn_input_size:
            raise ConfigurationError(
                f"net input layer ({net.layer_sizes_[0]}) does not match "
                f"scenario m*window = {scenario.nn_input_size}")
        shape = getattr(net, "window_shape_", None)
        if shape is not None and shape != (scenario.neighbor_count, scenario.nn_window):
            raise ConfigurationError(
                f"net window shape {shape} does not match scenario "
                f"({scenario.neighbor_count}, {scenario.nn_window})")

    def _log(self, kind, node_id, **details):
        self.events.append({"step": self.step_idx, "node_id": node_id,
                            "type": kind, **details})

    def _window_for(self, node_id):
        n = self.scenario.nn_window
        values = np.empty((self.scenario.neighbor_count, n))
        for row, nbr in enumerate(self.adjacency[node_id]):
            hist = self.histories[nbr]
            if len(hist) < n:
                return None
            values[row, :] = hist[:n]
        ids = (self.adjacency[node_id]
               if node_id == self.scenario.target_node else None)
        return NeighborWindow(values=values, neighbor_ids=ids)

    def step_once(self):
        sc = self.scenario
        env = sc.environment
        common = self.pulses[self.step_idx] if self.step_idx < len(self.pulses) else 0.0
        common += smooth_drift(env.drift, self.step_idx)

        # phase 1: sample every transmitting node
        readings = {}
        for i in sorted(self.nodes):
            node = self.nodes[i]
            if node.transmits():
                readings[i] = environment_temperature(env, i, self.step_idx,
                                                      self.rngs[i], common)
                node.battery = max(0.0, node.battery - TX_COST)

        # phase 2: fold accepted readings into neighbor histories (held
        # values for silenced or quarantined nodes)
        for i in sorted(self.nodes):
            if i in readings and self.registry.accepts_readings(i):
                self.last_accepted[i] = readings[i]
            if i in self.last_accepted:
                hist = self.histories[i]
                hist.insert(0, self.last_accepted[i])
                del hist[sc.nn_window:]

        # phase 3: per-node detection pipeline
        to_destroy = []
        for i in sorted(self.nodes):
            node = self.nodes[i]
            if i not in readings or not self.registry.accepts_readings(i):
                continue
            x = readings[i]
            ar_result = self.filters[i].step(x)
            window = self._window_for(i)
            nn_pred = self.net.predict_window(window) if window is not None else None

            pred_ar = ar_result.predicted if ar_result is not None else None
            err_ar = ar_result.error if ar_result is not None else None
            err_nn = absolute_error(x, nn_pred) if nn_pred is not None else None

            state = self.trust[i]
            warm = self.step_idx >= sc.trust_warmup
            inc_ar, inc_nn = update_trust(
                state, err_ar if warm else None, err_nn if warm else None,
                sc.thresholds)
            if inc_ar:
                self._log("trust_increment", i, channel="ar", b=state.b_ar)
            if inc_nn:
                self._log("trust_increment", i, channel="nn", b=state.b_nn)
            if (state.b_ar or state.b_nn) and node.status == NodeStatus.ALIVE:
                node.status = NodeStatus.SUSPICIOUS
                self._log("status_change", i, status=node.status.value)

            action = self.rules.lookup(
                classify_trust(state.b_ar, sc.thresholds.alpha, sc.thresholds.beta),
                classify_trust(state.b_nn, sc.thresholds.alpha, sc.thresholds.beta))
            if action is Action.SELF_DESTRUCT:
                to_destroy.append(i)

            self.rows.append({
                "step": self.step_idx, "node_id": i, "reading": x,
                "pred_ar": pred_ar, "pred_nn": nn_pred,
                "err_ar": err_ar, "err_nn": err_nn,
                "b_ar": state.b_ar, "b_nn": state.b_nn,
                "status": node.status.value,
            })

        # phase 4: registry mutations applied serially after all pipelines
        for i in to_destroy:
            node = self.nodes[i]
            if node.destruction_outcome is not None:
                continue
            outcome = initiate_self_destruction(node, self.registry,
                                                sc.failure_model, self.rngs[i])
            self._log("destruction", i,
                      actions=[a.value for a in outcome.actions_completed],
                      outcome=outcome.status.value, reason=outcome.reason)

        self.step_idx += 1

    def run(self):
        for _ in range(self.scenario.total_steps):
            self.step_once()
        return self.report()

    def report(self):
        attacked = sorted({ev.target_node for ev in self.scenario.environment.events
                           if ev.kind == "local_lamp"})
        destructions = [e for e in self.events if e["type"] == "destruction"]
        destroyed = [(e["node_id"], e["step"]) for e in destructions
                     if e["outcome"] == NodeStatus.DESTROYED.value]
        expelled_ids = {e["node_id"] for e in destructions}
        summary = {
            "steps": self.step_idx,
            "attacked_nodes": attacked,
            "nodes_destroyed": destroyed,
            "false_expulsions": sorted(expelled_ids - set(attacked)),
            "detection_step": {e["node_id"]: e["step"] for e in destructions
                               if e["node_id"] in attacked},
        }
        return RunReport(scenario_name=self.scenario.name, rows=list(self.rows),
                         events=list(self.events), summary=summary)


def run_simulation(scenario, net):
    """Execute a full scenario with a trained net; deterministic given seed."""
    return World(scenario, net).run()


# ---------------------------------------------------------------------------
# offline training data
# ---------------------------------------------------------------------------

def generate_training_set(scenario):
    """Attack-free neighbor windows and targets for the scenario's target node.

    Runs the environment with the scenario's training drift (no heat events,
    every node alive) and records one flattened window + target per step once
    the window is full. Returns (X, y, neighbor_ids).
    """
    _, adjacency, _ = build_network(scenario)
    tr = scenario.training
    env_run = scenario.environment
    neighbors = adjacency[scenario.target_node]
    n = scenario.nn_window
    steps = tr.samples + n - 1
    rngs = {i: np.random.default_rng([tr.seed, i])
            for i in range(scenario.node_count)}
    pulses = pulse_series(tr.drift, steps, tr.seed)
    # lone-node excursions teach the net to discount any single neighbor;
    # the target stays clean so its reading remains learnable
    local = {i: (np.zeros(steps) if i == scenario.target_node else
                 local_pulse_series(tr.drift, steps, tr.seed, i))
             for i in range(scenario.node_count)}
    histories = {i: [] for i in range(scenario.node_count)}

    X, y = [], []
    quiet_env = type(env_run)(ambient=env_run.ambient,
                              noise_sigma=env_run.noise_sigma,
                              drift=None, events=())
    for step in range(steps):
        common = pulses[step] + smooth_drift(tr.drift, step)
        values = {i: environment_temperature(quiet_env, i, step, rngs[i],
                                             common + local[i][step])
                  for i in range(scenario.node_count)}
        for i, hist in histories.items():
            hist.insert(0, values[i])
            del hist[n:]
        if step >= n - 1:
            window = np.array([histories[nbr][:n] for nbr in neighbors])
            X.append(window.reshape(-1))
            y.append(values[scenario.target_node])
    return np.array(X), np.array(y), neighbors


def train_network(scenario, max_epochs=None, mu_init=None, seed=None):
    """Generate training data and fit the scenario's neural predictor."""
    X, y, neighbor_ids = generate_training_set(scenario)
    net = NeuralNetPredictor(
        hidden_sizes=scenario.hidden_sizes,
        max_epochs=scenario.training.max_epochs if max_epochs is None else max_epochs,
        mu_init=1e-3 if mu_init is None else mu_init,
        seed=scenario.training.seed if seed is None else seed)
    net.fit(X, y, neighbor_ids=neighbor_ids,
            window_shape=(scenario.neighbor_count, scenario.nn_window))
    return net
