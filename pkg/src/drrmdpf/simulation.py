"""
Scenario execution

Builds one NdnNode per topology node, wires faces pairwise over the links,
fills the FIBs with loop-free next hops towards the nearest producer and
drives everything from a single Engine. Consumer applications sit on
APP_FACE of their node, producers answer every name under '/'.
"""
import logging

from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

import networkx as nx
import numpy as np

from .baselines import BASELINE_BY_STRATEGY, BaselineStrategy
from .consts import (
    APP_FACE,
    ARRIVAL_CONSTANT,
    DROP_LINK_DOWN,
    EVENT_APP_TICK,
    EVENT_LINK_DOWN,
    EVENT_PACKET_ARRIVAL,
    EVENT_TIMER_FIRE,
    EVENT_TX_DONE,
    PATTERN_SEQUENTIAL,
    ROLE_CONSUMER,
    ROLE_PRODUCER,
    ROLE_ROUTER,
    STRATEGY_DRR_MDPF,
)
from .engine import Engine, SimEvent
from .errors import ConfigurationError, SimulationError
from .metrics import MetricsReport, RunCounters, finalize_report
from .node import (
    AppTimeout,
    DeliverToApp,
    Dropped,
    Face,
    FaceBacklog,
    NdnNode,
    ScheduleTimeout,
)
from .packet import make_interest
from .scenario import Scenario
from .strategy import StrategyTable
from .topology import Topology, resolve_topology

LOGGER = logging.getLogger(__name__)

PRODUCER_PREFIX = "/"


def content_name(rank: int, content_classes: int) -> str:
    """
    Catalog object rank -> /c<k>/o<rank>
    """
    return f"/c{rank % content_classes}/o{rank}"


@dataclass
class PendingRequest:
    """One outstanding consumer Interest."""

    first_sent: float
    attempts: int = 0


class ConsumerApp:
    """Interest source attached to a consumer node."""

    def __init__(
        self,
        *,
        node_id: str,
        rng: np.random.Generator,
        scenario: Scenario,
        offset: int = 0,
    ):
        self.node_id = node_id
        self.rng = rng
        self.rate = scenario.interest_rate
        self.arrival_process = scenario.arrival_process
        self.request_pattern = scenario.request_pattern
        self.catalog_size = scenario.catalog_size
        self.content_classes = scenario.content_classes
        self.interest_size = scenario.interest_size
        self.retries = scenario.consumer_retries
        self.pending: Dict[str, List[PendingRequest]] = defaultdict(list)
        self._sequence = offset

        ranks = np.arange(1, self.catalog_size + 1, dtype=float)
        weights = ranks ** -scenario.popularity
        self._cdf = np.cumsum(weights / weights.sum())

    def __repr__(self) -> str:
        """Return the representation."""
        result = f"<ConsumerApp {self.node_id}: rate={self.rate} "
        result += f"pattern={self.request_pattern} pending={self.pending_count}>"

        return result

    @property
    def pending_count(self) -> int:
        """
        Outstanding Interests
        """
        return sum(len(requests) for requests in self.pending.values())

    def next_gap(self) -> float:
        """
        Time to the next Interest
        """
        if self.arrival_process == ARRIVAL_CONSTANT:
            return 1.0 / self.rate

        return float(self.rng.exponential(1.0 / self.rate))

    def next_name(self) -> str:
        """
        Draw the next requested name
        """
        if self.request_pattern == PATTERN_SEQUENTIAL:
            rank = self._sequence % self.catalog_size
            self._sequence += 1
        else:
            rank = int(np.searchsorted(self._cdf, self.rng.random(), side="right"))
            rank = min(rank, self.catalog_size - 1)

        return content_name(rank, self.content_classes)


class Simulation:
    """One run of a scenario on a topology."""

    def __init__(self, scenario: Scenario, topology: Topology, *, strict: bool = False):
        self.scenario = scenario
        self.strict = strict
        self.topology = topology
        self.engine = Engine(event_cap=scenario.event_cap)
        self.counters = RunCounters()
        self.nodes: Dict[str, NdnNode] = {}
        self.consumers: Dict[str, ConsumerApp] = {}

        self._validate()

        traffic_seq, node_seq = np.random.SeedSequence(scenario.seed).spawn(2)
        node_rngs = [np.random.default_rng(seq) for seq in node_seq.spawn(len(topology.nodes))]
        consumer_ids = topology.with_role(ROLE_CONSUMER)
        consumer_rngs = [
            np.random.default_rng(seq) for seq in traffic_seq.spawn(len(consumer_ids))
        ]

        self._build_nodes(node_rngs)
        self._build_faces()
        self._build_fibs()

        for index, node_id in enumerate(consumer_ids):
            self.consumers[node_id] = ConsumerApp(
                node_id=node_id,
                rng=consumer_rngs[index],
                scenario=scenario,
                offset=index * scenario.catalog_size // len(consumer_ids),
            )

        self.engine.on(EVENT_PACKET_ARRIVAL, self._on_packet_arrival)
        self.engine.on(EVENT_TIMER_FIRE, self._on_timer_fire)
        self.engine.on(EVENT_TX_DONE, self._on_tx_done)
        self.engine.on(EVENT_APP_TICK, self._on_app_tick)
        self.engine.on(EVENT_LINK_DOWN, self._on_link_down)

    def __repr__(self) -> str:
        """Return the representation."""
        result = f"<Simulation {self.scenario.name}: strategy={self.scenario.strategy} "
        result += f"seed={self.scenario.seed} {self.topology}>"

        return result

    def _validate(self) -> None:
        topology = self.topology

        if not topology.with_role(ROLE_CONSUMER):
            raise ConfigurationError("topology has no consumer node")

        if not topology.with_role(ROLE_PRODUCER):
            raise ConfigurationError("topology has no producer node")

        if not topology.is_connected():
            raise ConfigurationError("topology is not connected")

        links = {frozenset((link.a, link.b)) for link in topology.links}
        for a, b, _ in self.scenario.link_down:
            if frozenset((a, b)) not in links:
                raise ConfigurationError(f"link_down names unknown link {a}:{b}")

    def _make_strategy(self, face_count: int):
        scenario = self.scenario

        if scenario.strategy == STRATEGY_DRR_MDPF:
            return StrategyTable(
                face_count=face_count,
                lambda_r=scenario.lambda_r,
                lambda_smooth=scenario.lambda_smooth,
                reward_mode=scenario.reward_mode,
                selection_mode=scenario.selection_mode,
            )

        try:
            kind = BASELINE_BY_STRATEGY[scenario.strategy]
        except KeyError:
            raise ConfigurationError(f"unknown strategy {scenario.strategy!r}") from None

        return BaselineStrategy(kind=kind, face_count=face_count)

    def _build_nodes(self, rngs: List[np.random.Generator]) -> None:
        scenario = self.scenario

        for spec, rng in zip(self.topology.nodes, rngs):
            is_producer = spec.role == ROLE_PRODUCER
            self.nodes[spec.node_id] = NdnNode(
                node_id=spec.node_id,
                strategy=self._make_strategy(len(self.topology.faces(spec.node_id))),
                role=spec.role,
                cs_capacity=0 if is_producer else scenario.cs_capacity,
                pit_timeout=scenario.pit_timeout,
                rng=rng,
                producer_prefix=PRODUCER_PREFIX if is_producer else None,
                data_size=scenario.data_size,
                quantum=scenario.quantum,
                queue_capacity=scenario.queue_capacity,
            )

    def _build_faces(self) -> None:
        for link in self.topology.links:
            face_a = self.nodes[link.a].add_face(
                neighbor=link.b, bandwidth=link.bandwidth, delay=link.delay
            )
            face_b = self.nodes[link.b].add_face(
                neighbor=link.a, bandwidth=link.bandwidth, delay=link.delay
            )
            face_a.peer_face = face_b.face_id
            face_b.peer_face = face_a.face_id

    def _build_fibs(self) -> None:
        """
        Next hops are the neighbors strictly closer to a producer
        """
        distance = nx.multi_source_dijkstra_path_length(
            self.topology.graph(), set(self.topology.with_role(ROLE_PRODUCER))
        )

        for node_id, node in self.nodes.items():
            hops = {face.face_id: distance[face.neighbor] + 1 for face in node.faces}

            if isinstance(node.strategy, BaselineStrategy):
                for face_id, count in hops.items():
                    node.strategy.set_hops(face_id, count)
                node.strategy.set_neighbor_load(self._neighbor_load(node))

            if node.role == ROLE_PRODUCER:
                continue

            closer = sorted(
                (hops[face.face_id], face.face_id)
                for face in node.faces
                if distance[face.neighbor] < distance[node_id]
            )
            node.fib.add(
                PRODUCER_PREFIX,
                [face_id for _, face_id in closer],
                [cost for cost, _ in closer],
            )

            dbg_msg = f"node {node_id} distance: {distance[node_id]} "
            dbg_msg += f"next hops: {[face_id for _, face_id in closer]}"
            LOGGER.debug(dbg_msg)

    def _neighbor_load(self, node: NdnNode) -> Callable[[int], int]:
        def load(face_id: int) -> int:
            return self.nodes[node.face(face_id).neighbor].counters.interests_forwarded

        return load

    def _apply(self, node: NdnNode, effects: list) -> None:
        for effect in effects:
            if isinstance(effect, FaceBacklog):
                self._pump(node, node.face(effect.face))
            elif isinstance(effect, ScheduleTimeout):
                self.engine.schedule_timer(effect.at, (node.node_id, effect.name))
            elif isinstance(effect, DeliverToApp):
                self._deliver(node.node_id, effect.packet.name)
            elif isinstance(effect, AppTimeout):
                self._app_timeout(node.node_id, effect.name)
            elif isinstance(effect, Dropped):
                self._dropped(node.node_id, effect)
            else:
                raise SimulationError(f"unknown effect {effect!r}")

        if self.strict:
            self._check_node(node)

    def _pump(self, node: NdnNode, face: Face) -> None:
        """
        Start serializing the next DRR packet if the link is idle
        """
        if face.busy:
            return

        while True:
            item = face.scheduler.next_packet()
            if item is None:
                return

            _, pkt = item
            if face.up:
                break

            node.counters.drops += 1
            self._dropped(node.node_id, Dropped(pkt, face.face_id, DROP_LINK_DOWN))

        now = self.engine.now
        serialization = pkt.bits / face.bandwidth

        face.busy = True
        face.record_tx(now, pkt.bits)

        self.engine.schedule(now + serialization, EVENT_TX_DONE, (node.node_id, face.face_id))
        self.engine.schedule(
            now + serialization + face.delay,
            EVENT_PACKET_ARRIVAL,
            (face.neighbor, face.peer_face, pkt),
        )

    def _send(self, app: ConsumerApp, name: str, request: PendingRequest) -> None:
        now = self.engine.now
        node = self.nodes[app.node_id]

        self.counters.interests_sent += 1
        app.pending[name].append(request)

        pkt = make_interest(name, size=app.interest_size, now=now)
        self._apply(node, node.handle_interest(APP_FACE, pkt, now))

    def _deliver(self, node_id: str, name: str) -> None:
        app = self.consumers.get(node_id)
        requests = app.pending.pop(name, []) if app is not None else []

        if not requests:
            LOGGER.debug(f"node {node_id} got Data {name} nobody waits for")
            return

        for request in requests:
            self.counters.record_retrieval(self.engine.now - request.first_sent)

    def _app_timeout(self, node_id: str, name: str) -> None:
        app = self.consumers[node_id]

        for request in app.pending.pop(name, []):
            self.counters.timed_out += 1

            if request.attempts < app.retries:
                request.attempts += 1
                self.counters.retransmissions += 1
                self._send(app, name, request)

    def _dropped(self, node_id: str, effect: Dropped) -> None:
        self.counters.network_drops += 1

        if effect.face == APP_FACE and effect.packet.is_interest:
            app = self.consumers[node_id]
            requests = app.pending.get(effect.packet.name)
            if requests:
                requests.pop()
                if not requests:
                    del app.pending[effect.packet.name]
                self.counters.dropped += 1

    def _on_packet_arrival(self, event: SimEvent) -> None:
        node_id, face_id, pkt = event.payload
        node = self.nodes[node_id]

        if pkt.is_interest:
            effects = node.handle_interest(face_id, pkt, self.engine.now)
        else:
            effects = node.handle_data(face_id, pkt, self.engine.now)

        self._apply(node, effects)

    def _on_timer_fire(self, event: SimEvent) -> None:
        node_id, name = event.payload
        node = self.nodes[node_id]
        self._apply(node, node.handle_timeout(name, self.engine.now))

    def _on_tx_done(self, event: SimEvent) -> None:
        node_id, face_id = event.payload
        node = self.nodes[node_id]
        face = node.face(face_id)
        face.busy = False
        self._pump(node, face)

    def _on_app_tick(self, event: SimEvent) -> None:
        app = self.consumers[event.payload]

        self._send(app, app.next_name(), PendingRequest(first_sent=self.engine.now))

        at = self.engine.now + app.next_gap()
        if at < self.scenario.duration:
            self.engine.schedule(at, EVENT_APP_TICK, app.node_id)

    def _on_link_down(self, event: SimEvent) -> None:
        a, b = event.payload

        for node_id, neighbor in ((a, b), (b, a)):
            for face in self.nodes[node_id].faces:
                if face.neighbor == neighbor:
                    face.up = False

        LOGGER.info(f"link {a} - {b} down at t={self.engine.now}")

    def _audit(self) -> None:
        self.counters.pending_at_end = sum(app.pending_count for app in self.consumers.values())

        if not self.counters.reconciles():
            counters = self.counters
            err_msg = f"conservation violated: sent {counters.interests_sent} != "
            err_msg += f"satisfied {counters.satisfied} + timed out {counters.timed_out} + "
            err_msg += f"dropped {counters.dropped} + pending {counters.pending_at_end}"
            LOGGER.error(err_msg)
            raise SimulationError(err_msg)

        for node in self.nodes.values():
            self._check_node(node)

    def _check_node(self, node: NdnNode) -> None:
        try:
            node.check_invariants()
        except AssertionError as err:
            LOGGER.error(f"t={self.engine.now} {err}")
            raise SimulationError(f"{err}") from err

    def run(self) -> MetricsReport:
        """
        Execute until the last event and build the report
        """
        scenario = self.scenario

        LOGGER.info(f"Starting {self}")

        for app in self.consumers.values():
            first = 0.0 if scenario.arrival_process == ARRIVAL_CONSTANT else app.next_gap()
            if first < scenario.duration:
                self.engine.schedule(first, EVENT_APP_TICK, app.node_id)

        for a, b, at in scenario.link_down:
            if at < scenario.duration:
                self.engine.schedule(at, EVENT_LINK_DOWN, (a, b))

        self.engine.run()
        self._audit()

        for node in self.nodes.values():
            self.counters.cache_hits += node.counters.cache_hits
            if node.role == ROLE_ROUTER:
                self.counters.node_requests[node.node_id] = node.counters.interests_forwarded

        report = finalize_report(
            self.counters,
            scenario.duration,
            scenario=scenario.name,
            strategy=scenario.strategy,
            seed=scenario.seed,
            rate=scenario.interest_rate,
            cache_frac=scenario.cache_fraction,
        )

        info_msg = f"Finished {scenario.name} strategy: {scenario.strategy} "
        info_msg += f"seed: {scenario.seed} events: {self.engine.events_processed} "
        info_msg += f"isr: {report.isr:.4f} throughput: {report.throughput:.1f}"
        LOGGER.info(info_msg)

        return report


def run_scenario(
    scenario: Scenario,
    topology: Optional[Topology] = None,
    *,
    base_dir: Optional[str] = None,
    strict: bool = False,
) -> MetricsReport:
    """
    Run scenario, resolving its topology unless one is given

    strict re-checks the node tables after every handled event.
    """
    if topology is None:
        topology = resolve_topology(
            scenario.topology,
            base_dir=base_dir,
            seed=scenario.seed,
            bandwidth=scenario.link_bandwidth,
            delay=scenario.link_delay,
        )

    return Simulation(scenario, topology, strict=strict).run()
