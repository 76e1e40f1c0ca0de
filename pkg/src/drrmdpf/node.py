"""
Per-router NDN forwarding pipeline

Handlers never touch the clock or other nodes, they return effects that
the simulation applies: packets waiting on a face, packets for the local
application, PIT timers and drops.
"""
import logging

from collections import deque, Counter
from dataclasses import dataclass
from typing import Hashable, List, Optional, Sequence

import numpy as np

from .consts import (
    ACCEPTED,
    APP_FACE,
    BANDWIDTH_WINDOW,
    DATA_SIZE,
    DEFAULT_QUANTUM,
    DROP_MALFORMED,
    DROP_NO_ROUTE,
    DROP_QUEUE_FULL,
    PIT_TIMEOUT,
    QUEUE_CAPACITY,
    ROLE_ROUTER,
    ROLES,
)
from .errors import UsageError, MalformedName
from .packet import Packet, content_class_of, is_prefix, make_data
from .scheduler import DrrScheduler
from .strategy import InterfaceState
from .tables import ContentStore, Fib, Pit, PitEntry

LOGGER = logging.getLogger(__name__)


@dataclass
class FaceBacklog:
    """A packet is waiting in the DRR scheduler of face."""

    face: int


@dataclass
class DeliverToApp:
    """Data for the application attached to this node."""

    packet: Packet


@dataclass
class AppTimeout:
    """A PIT entry requested by the local application expired."""

    name: str


@dataclass
class ScheduleTimeout:
    """Arm the PIT expiry timer for name."""

    name: str
    at: float


@dataclass
class Dropped:
    """Packet discarded by this node."""

    packet: Packet
    face: int
    reason: str


@dataclass
class NodeCounters:
    """Per-node counters feeding the metrics report."""

    interests_received: int = 0
    interests_forwarded: int = 0
    cache_hits: int = 0
    aggregated: int = 0
    data_received: int = 0
    data_produced: int = 0
    unsolicited_data: int = 0
    timeouts: int = 0
    drops: int = 0


class Face:
    """One end of a link, with its egress scheduler."""

    def __init__(
        self,
        *,
        face_id: int,
        neighbor: Hashable,
        bandwidth: float,
        delay: float,
        quantum: int = DEFAULT_QUANTUM,
        capacity: int = QUEUE_CAPACITY,
    ):
        self.face_id = face_id
        self.neighbor = neighbor
        self.bandwidth = bandwidth
        self.delay = delay
        self.peer_face: Optional[int] = None
        self.scheduler = DrrScheduler(quantum=quantum, capacity=capacity)
        self.busy = False
        self.up = True
        self._tx_log = deque()
        self._tx_bits = 0

    def __repr__(self) -> str:
        """Return the representation."""
        result = f"<Face {self.face_id} -> {self.neighbor}: bandwidth={self.bandwidth} "
        result += f"delay={self.delay} up={self.up} busy={self.busy}>"

        return result

    def _prune(self, now: float) -> None:
        while self._tx_log and self._tx_log[0][0] <= now - BANDWIDTH_WINDOW:
            _, bits = self._tx_log.popleft()
            self._tx_bits -= bits

    def record_tx(self, now: float, bits: int) -> None:
        """
        Remember a transmission start for the bandwidth estimate
        """
        self._prune(now)
        self._tx_log.append((now, bits))
        self._tx_bits += bits

    def available_bandwidth(self, now: float) -> float:
        """
        Capacity minus the rate serialized over the last window, in bits/s
        """
        self._prune(now)
        return max(0.0, self.bandwidth - self._tx_bits / BANDWIDTH_WINDOW)


class NdnNode:
    """Represents a forwarder: Content Store, PIT, FIB, faces and strategy."""

    def __init__(
        self,
        *,
        node_id: Hashable,
        strategy,
        role: str = ROLE_ROUTER,
        cs_capacity: int = 0,
        pit_timeout: float = PIT_TIMEOUT,
        rng: Optional[np.random.Generator] = None,
        producer_prefix: Optional[str] = None,
        data_size: int = DATA_SIZE,
        quantum: int = DEFAULT_QUANTUM,
        queue_capacity: int = QUEUE_CAPACITY,
    ):
        if role not in ROLES:
            raise UsageError(f"unknown node role {role!r}")

        if pit_timeout <= 0:
            raise UsageError(f"pit_timeout must be positive, got {pit_timeout}")

        self.node_id = node_id
        self.role = role
        self.strategy = strategy
        self.cs = ContentStore(capacity=cs_capacity)
        self.pit = Pit()
        self.fib = Fib()
        self.faces: List[Face] = []
        self.pit_timeout = pit_timeout
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self.producer_prefix = producer_prefix
        self.data_size = data_size
        self.quantum = quantum
        self.queue_capacity = queue_capacity

        self.unsatisfied: Counter = Counter()
        self.counters = NodeCounters()

    def __repr__(self) -> str:
        """Return the representation."""
        result = f"<NdnNode {self.node_id}: role={self.role} faces={len(self.faces)} "
        result += f"pit={len(self.pit)} cs={len(self.cs)}>"

        return result

    def add_face(self, *, neighbor: Hashable, bandwidth: float, delay: float) -> Face:
        """
        Attach a new face, ids are assigned in order
        """
        face = Face(
            face_id=len(self.faces),
            neighbor=neighbor,
            bandwidth=bandwidth,
            delay=delay,
            quantum=self.quantum,
            capacity=self.queue_capacity,
        )
        self.faces.append(face)

        return face

    def face(self, face_id: int) -> Face:
        """
        Getter for a face
        """
        if not 0 <= face_id < len(self.faces):
            raise UsageError(f"node {self.node_id} has no face {face_id}")

        return self.faces[face_id]

    def serves(self, name: str) -> bool:
        """
        True when the local producer answers name
        """
        return self.producer_prefix is not None and is_prefix(self.producer_prefix, name)

    def interface_states(
        self, content_class: Hashable, faces: Sequence[int], now: float
    ) -> List[InterfaceState]:
        """
        Observation triple for each face in faces
        """
        return [
            InterfaceState(
                bandwidth_avail=self.faces[face].available_bandwidth(now),
                unsatisfied=self.unsatisfied[(face, content_class)],
                delay=self.strategy.delay(content_class, face),
            )
            for face in faces
        ]

    def emit(self, face: int, pkt: Packet, content_class: Hashable) -> list:
        """
        Hand pkt to the application or to the DRR queue of face
        """
        if face == APP_FACE:
            return [DeliverToApp(pkt)]

        scheduler = self.face(face).scheduler
        scheduler.register_flow(content_class)

        if scheduler.enqueue(content_class, pkt) == ACCEPTED:
            return [FaceBacklog(face)]

        self.counters.drops += 1

        return [Dropped(pkt, face, DROP_QUEUE_FULL)]

    def handle_interest(self, in_face: int, pkt: Packet, now: float) -> list:
        """
        Content Store, producer, PIT, FIB + strategy, in that order
        """
        if not pkt.is_interest:
            raise UsageError(f"handle_interest got {pkt}")

        try:
            content_class = content_class_of(pkt.name)
        except MalformedName as err:
            self.counters.drops += 1
            LOGGER.debug(f"node {self.node_id} dropping malformed Interest: {err}")

            return [Dropped(pkt, in_face, DROP_MALFORMED)]

        self.counters.interests_received += 1

        data = self.cs.lookup(pkt.name)
        if data is not None:
            self.counters.cache_hits += 1
            return self.emit(in_face, data, content_class)

        if self.serves(pkt.name):
            self.counters.data_produced += 1
            data = make_data(pkt.name, size=self.data_size, now=now)
            return self.emit(in_face, data, content_class)

        entry = self.pit.get(pkt.name)
        if entry is not None:
            entry.in_faces.add(in_face)
            self.counters.aggregated += 1
            return []

        fib_entry = self.fib.longest_prefix_match(pkt.name)
        candidates = []
        if fib_entry is not None:
            candidates = [face for face in fib_entry.candidate_faces if face != in_face]

        if not candidates:
            self.counters.drops += 1

            dbg_msg = f"node {self.node_id} has no route for {pkt.name} "
            dbg_msg += f"in_face: {in_face}"
            LOGGER.debug(dbg_msg)

            return [Dropped(pkt, in_face, DROP_NO_ROUTE)]

        out_face = self.strategy.choose(
            content_class=content_class,
            candidates=candidates,
            states=self.interface_states(content_class, candidates, now),
            rng=self.rng,
        )

        expiry = now + self.pit_timeout
        self.pit.insert(
            PitEntry(
                name=pkt.name,
                in_faces={in_face},
                out_face=out_face,
                content_class=content_class,
                expiry=expiry,
                created_at=now,
            )
        )
        self.unsatisfied[(out_face, content_class)] += 1
        self.counters.interests_forwarded += 1

        return [ScheduleTimeout(pkt.name, expiry)] + self.emit(out_face, pkt, content_class)

    def handle_data(self, in_face: int, pkt: Packet, now: float) -> list:
        """
        Consume the PIT entry, cache, reinforce and fan out
        """
        if pkt.is_interest:
            raise UsageError(f"handle_data got {pkt}")

        entry = self.pit.satisfy(pkt.name)
        if entry is None:
            self.counters.unsolicited_data += 1
            LOGGER.debug(f"node {self.node_id} discarding unsolicited {pkt}")

            return []

        self.counters.data_received += 1
        self.cs.insert(pkt)
        self.unsatisfied[(entry.out_face, entry.content_class)] -= 1

        self.strategy.on_data(entry.content_class, entry.out_face, now - entry.created_at)

        effects = []
        for face in sorted(entry.in_faces):
            effects.extend(self.emit(face, pkt, entry.content_class))

        return effects

    def handle_timeout(self, name: str, now: float) -> list:
        """
        Expire a PIT entry, a no-op for stale timers
        """
        entry = self.pit.expire(name, now)
        if entry is None:
            LOGGER.debug(f"node {self.node_id} ignoring stale timer for {name}")
            return []

        self.unsatisfied[(entry.out_face, entry.content_class)] -= 1
        self.counters.timeouts += 1
        self.strategy.on_timeout(entry.content_class, entry.out_face)

        if APP_FACE in entry.in_faces:
            return [AppTimeout(name)]

        return []

    def check_invariants(self) -> None:
        """
        c_lk must equal the live PIT entries per (face, class)
        """
        live = Counter(
            (entry.out_face, entry.content_class) for entry in self.pit
        )

        for key in set(live) | set(self.unsatisfied):
            if live[key] != self.unsatisfied[key]:
                err_msg = f"node {self.node_id} unsatisfied count {key}: "
                err_msg += f"{self.unsatisfied[key]} but {live[key]} live PIT entries"
                raise AssertionError(err_msg)

        for face in (entry.out_face for entry in self.pit):
            if not 0 <= face < len(self.faces):
                raise AssertionError(f"node {self.node_id} PIT references face {face}")

        if len(self.cs) > self.cs.capacity:
            raise AssertionError(f"node {self.node_id} content store over capacity")
