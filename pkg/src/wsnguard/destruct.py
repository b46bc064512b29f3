"""Modeled self-destruction of a node judged malicious.

The routine is an ordered action list (memory erase, battery drain, radio
destruction, identifier deletion, sensor-type masking) with battery drain
started concurrently with the erase. Three failure events can leave the node
partially or fully alive; all draws come from the node's own seeded stream.
"""

from dataclasses import dataclass
from enum import Enum

from .node import NodeStatus


class DestructionAction(Enum):
    ERASE_MEMORY = "erase_memory"
    DRAIN_BATTERY = "drain_battery"
    DESTROY_RADIO = "destroy_radio"
    DELETE_IDENTIFIER = "delete_identifier"
    MASK_SENSOR_TYPE = "mask_sensor_type"


CANONICAL_ORDER = (
    DestructionAction.ERASE_MEMORY,
    DestructionAction.DRAIN_BATTERY,
    DestructionAction.DESTROY_RADIO,
    DestructionAction.DELETE_IDENTIFIER,
    DestructionAction.MASK_SENSOR_TYPE,
)


@dataclass
class FailureModel:
    p_incompatible_routine: float = 0.0
    p_ignores_messages: float = 0.0
    battery_floor: float = 0.05

    def validate(self):
        problems = []
        if not 0.0 <= self.p_incompatible_routine <= 1.0:
            problems.append("p_incompatible_routine must be in [0, 1]")
        if not 0.0 <= self.p_ignores_messages <= 1.0:
            problems.append("p_ignores_messages must be in [0, 1]")
        if self.battery_floor < 0.0:
            problems.append("battery_floor must be nonnegative")
        return problems


@dataclass
class DestructionOutcome:
    status: NodeStatus
    actions_completed: tuple
    reason: str = None


def initiate_self_destruction(node, registry, model, rng):
    """Run the destruction routine on one node; idempotent per node.

    Failure draws, in order: the node may ignore base-station messages
    entirely (stays fully alive, gets quarantined); the routine may be
    incompatible with the node hardware (only the radio-flood battery drain
    works); an exhausted battery prevents the memory erase.
    """
    if node.destruction_outcome is not None:
        return node.destruction_outcome

    node.status = NodeStatus.DESTROYING

    if rng.random() < model.p_ignores_messages:
        outcome = DestructionOutcome(NodeStatus.FULLY_ALIVE_MALICIOUS, (),
                                     reason="ignores_messages")
        registry.quarantine(node.id)
    elif rng.random() < model.p_incompatible_routine:
        # base-station-driven radio flood still works without node cooperation
        node.battery = 0.0
        outcome = DestructionOutcome(NodeStatus.PARTIALLY_ALIVE,
                                     (DestructionAction.DRAIN_BATTERY,),
                                     reason="incompatible_routine")
    else:
        actions = []
        battery_exhausted = node.battery < model.battery_floor
        if not battery_exhausted:
            node.has_memory = False
            node.has_keys = False
            actions.append(DestructionAction.ERASE_MEMORY)
        node.battery = 0.0
        actions.append(DestructionAction.DRAIN_BATTERY)
        node.radio_ok = False
        actions.append(DestructionAction.DESTROY_RADIO)
        registry.delete_identifier(node.id)
        actions.append(DestructionAction.DELETE_IDENTIFIER)
        actions.append(DestructionAction.MASK_SENSOR_TYPE)
        if battery_exhausted:
            outcome = DestructionOutcome(NodeStatus.PARTIALLY_ALIVE,
                                         tuple(actions),
                                         reason="battery_exhausted")
        else:
            outcome = DestructionOutcome(NodeStatus.DESTROYED, tuple(actions))

    node.status = outcome.status
    node.destruction_outcome = outcome
    return outcome


def reintroduction_attempt(registry, node_id):
    """Authentication check for a node trying to (re)join the network.

    Only identifiers still registered and alive are accepted; anything whose
    identifier was deleted during self-destruction is rejected.
    """
    node = registry.get(node_id)
    return node is not None and node.status == NodeStatus.ALIVE
