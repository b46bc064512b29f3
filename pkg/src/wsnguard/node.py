"""Node lifecycle state and the base-station identifier registry."""

from dataclasses import dataclass, field
from enum import Enum


class NodeStatus(Enum):
    ALIVE = "alive"
    SUSPICIOUS = "suspicious"
    DESTROYING = "destroying"
    DESTROYED = "destroyed"
    PARTIALLY_ALIVE = "partially_alive"
    FULLY_ALIVE_MALICIOUS = "fully_alive_malicious"


@dataclass
class NodeState:
    id: int
    position: tuple
    battery: float = 1.0
    has_keys: bool = True
    has_memory: bool = True
    radio_ok: bool = True
    status: NodeStatus = NodeStatus.ALIVE
    sensor_kind: str = "temperature"
    destruction_outcome: object = None

    def transmits(self):
        """A node emits readings only with a working radio and charge left."""
        return self.radio_ok and self.battery > 0.0 and self.status not in (
            NodeStatus.DESTROYED, NodeStatus.DESTROYING)


class Registry:
    """Base-station view of the network: registered ids and quarantine set.

    Mutated only from the simulator's sequential event loop.
    """

    def __init__(self):
        self._nodes = {}
        self.quarantined = set()

    def register(self, node):
        self._nodes[node.id] = node

    def is_registered(self, node_id):
        return node_id in self._nodes

    def get(self, node_id):
        return self._nodes.get(node_id)

    def ids(self):
        return sorted(self._nodes)

    def delete_identifier(self, node_id):
        self._nodes.pop(node_id, None)

    def quarantine(self, node_id):
        """Keep the id registered but drop its readings from any aggregate."""
        self.quarantined.add(node_id)

    def accepts_readings(self, node_id):
        return node_id in self._nodes and node_id not in self.quarantined
