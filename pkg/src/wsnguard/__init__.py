"""Star-topology wireless sensor network simulator with dual-predictor
malicious node detection and modeled node self-destruction."""

from .ar import ArPredictor, ArStepResult
from .destruct import (CANONICAL_ORDER, DestructionAction, DestructionOutcome,
                       FailureModel, initiate_self_destruction,
                       reintroduction_attempt)
from .errors import (ConfigurationError, DimensionError, FormatError,
                     NumericInputError, TopologyError, TrainingError,
                     WsnGuardError)
from .nn import (NeighborWindow, NeuralNetPredictor, Normalization,
                 TrainingReport, absolute_error, lm_fit)
from .node import NodeState, NodeStatus, Registry
from .scenario import (Drift, EnvironmentModel, HeatEvent, Scenario,
                       TrainingSpec, load_scenario, parse_scenario)
from .sim import (RunReport, World, build_network, environment_temperature,
                  generate_training_set, grid_positions, run_simulation,
                  train_network)
from .trust import (Action, RuleTable, ThresholdConfig, TrustCategory,
                    TrustState, classify_trust, update_trust)

__version__ = "0.1.0"
