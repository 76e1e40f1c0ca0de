"""
Deficit Round Robin egress scheduler

One scheduler per face, one FIFO flow queue per content class, tail-drop at
a fixed packet capacity.
"""
import logging

from collections import deque
from typing import Dict, Hashable, Optional, Tuple

from .consts import ACCEPTED, DROPPED, DEFAULT_QUANTUM, QUEUE_CAPACITY
from .errors import UsageError
from .packet import Packet

LOGGER = logging.getLogger(__name__)


class FlowQueue:
    """FIFO of packets for one flow with its quantum and deficit counter."""

    def __init__(
        self,
        *,
        flow_id: Hashable,
        quantum: int = DEFAULT_QUANTUM,
        capacity: int = QUEUE_CAPACITY,
    ):
        if quantum <= 0:
            raise UsageError(f"quantum must be positive, got {quantum}")

        if capacity < 0:
            raise UsageError(f"capacity must be non-negative, got {capacity}")

        self.flow_id = flow_id
        self.quantum = quantum
        self.capacity = capacity
        self.deficit = 0
        self.packets = deque()
        self.max_packet_size = 0

    def __repr__(self) -> str:
        """Return the representation."""
        result = f"<FlowQueue {self.flow_id}: quantum={self.quantum} "
        result += f"deficit={self.deficit} backlog={len(self.packets)}>"

        return result

    def __len__(self) -> int:
        return len(self.packets)

    @property
    def full(self) -> bool:
        """
        True when another packet would be tail-dropped
        """
        return len(self.packets) >= self.capacity


class DrrScheduler:
    """
    Deficit Round Robin over registered flows.

    active ring holds exactly the flows with a non-empty queue, in
    rotation order.
    """

    def __init__(
        self,
        *,
        quantum: int = DEFAULT_QUANTUM,
        capacity: int = QUEUE_CAPACITY,
        quanta: Optional[Dict[Hashable, int]] = None,
    ):
        self.default_quantum = quantum
        self.default_capacity = capacity
        self.flows: Dict[Hashable, FlowQueue] = {}
        self._active = deque()

        self.total_enqueued = 0
        self.total_served = 0
        self.total_dropped = 0
        self.bytes_served: Dict[Hashable, int] = {}

        for flow_id, flow_quantum in (quanta or {}).items():
            self.register_flow(flow_id, quantum=flow_quantum)

    def __repr__(self) -> str:
        """Return the representation."""
        result = f"<DrrScheduler flows={len(self.flows)} backlog={self.backlog} "
        result += f"dropped={self.total_dropped}>"

        return result

    def register_flow(
        self, flow_id: Hashable, *, quantum: Optional[int] = None
    ) -> FlowQueue:
        """
        Register a flow, a no-op for known flows
        """
        if flow_id in self.flows:
            return self.flows[flow_id]

        flow = FlowQueue(
            flow_id=flow_id,
            quantum=quantum or self.default_quantum,
            capacity=self.default_capacity,
        )
        self.flows[flow_id] = flow
        self.bytes_served[flow_id] = 0

        return flow

    def has_flow(self, flow_id: Hashable) -> bool:
        """
        True when flow_id is registered
        """
        return flow_id in self.flows

    @property
    def active_ring(self) -> Tuple[Hashable, ...]:
        """
        Getter for the rotation order of backlogged flows
        """
        return tuple(self._active)

    @property
    def backlog(self) -> int:
        """
        Packets queued over all flows
        """
        return sum(len(flow) for flow in self.flows.values())

    def enqueue(self, flow_id: Hashable, pkt: Packet) -> str:
        """
        Append pkt to its flow queue, tail-drop when the queue is full
        """
        if flow_id not in self.flows:
            raise UsageError(f"enqueue to unregistered flow {flow_id!r}")

        flow = self.flows[flow_id]
        self.total_enqueued += 1

        if flow.full:
            self.total_dropped += 1

            dbg_msg = f"enqueue tail-drop flow: {flow_id} "
            dbg_msg += f"capacity: {flow.capacity} packet: {pkt}"
            LOGGER.debug(dbg_msg)

            return DROPPED

        if not flow.packets:
            self._active.append(flow_id)

        flow.packets.append(pkt)
        flow.max_packet_size = max(flow.max_packet_size, pkt.size)

        return ACCEPTED

    def next_packet(self) -> Optional[Tuple[Hashable, Packet]]:
        """
        Serve the next packet in DRR order, None when every queue is empty.

        The flow at the head of the ring is served while its deficit covers
        the head packet. Otherwise it is credited one quantum and moved to
        the tail of the ring.
        """
        while self._active:
            flow_id = self._active[0]
            flow = self.flows[flow_id]
            head = flow.packets[0]

            if flow.deficit >= head.size:
                flow.packets.popleft()
                flow.deficit -= head.size
                self.total_served += 1
                self.bytes_served[flow_id] += head.size

                if not flow.packets:
                    # Idle flows hold no credit
                    flow.deficit = 0
                    self._active.popleft()

                return flow_id, head

            flow.deficit += flow.quantum
            self._active.rotate(-1)

        return None
