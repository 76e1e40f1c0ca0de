"""Tests for the per-node forwarding pipeline"""
import numpy as np
import pytest

from drrmdpf.consts import APP_FACE, DROP_MALFORMED, DROP_NO_ROUTE, DROP_QUEUE_FULL, ROLE_PRODUCER
from drrmdpf.node import (
    AppTimeout,
    DeliverToApp,
    Dropped,
    FaceBacklog,
    NdnNode,
    ScheduleTimeout,
)
from drrmdpf.packet import make_data, make_interest
from drrmdpf.strategy import StrategyTable


def router(faces=3, cs_capacity=10, queue_capacity=100):
    node = NdnNode(
        node_id="r0",
        strategy=StrategyTable(face_count=faces),
        cs_capacity=cs_capacity,
        pit_timeout=2.0,
        rng=np.random.default_rng(0),
        queue_capacity=queue_capacity,
    )
    for index in range(faces):
        node.add_face(neighbor=f"n{index}", bandwidth=10e6, delay=0.01)
    node.fib.add("/", [1, 2])

    return node


def interest(name="/c0/o1", now=0.0):
    return make_interest(name, size=64, now=now)


def test_forward_creates_pit_entry_and_timer():
    node = router()

    effects = node.handle_interest(0, interest(), 0.5)

    assert isinstance(effects[0], ScheduleTimeout)
    assert effects[0].at == pytest.approx(2.5)
    assert isinstance(effects[1], FaceBacklog)

    entry = node.pit.get("/c0/o1")
    assert entry.in_faces == {0}
    assert entry.out_face in (1, 2)
    assert node.unsatisfied[(entry.out_face, "c0")] == 1
    assert node.faces[entry.out_face].scheduler.backlog == 1
    node.check_invariants()


def test_in_face_is_excluded_from_candidates():
    node = router()

    node.handle_interest(1, interest(), 0.0)

    assert node.pit.get("/c0/o1").out_face == 2


def test_duplicate_interest_is_aggregated():
    node = router()
    node.handle_interest(0, interest(), 0.0)

    assert node.handle_interest(1, interest(), 0.1) == []
    assert node.pit.get("/c0/o1").in_faces == {0, 1}
    assert node.counters.aggregated == 1


def test_data_satisfies_reinforces_and_fans_out():
    node = router()
    node.handle_interest(0, interest(), 0.0)
    node.handle_interest(APP_FACE, interest(), 0.0)
    out_face = node.pit.get("/c0/o1").out_face
    before = node.strategy.probabilities("c0")[out_face]

    effects = node.handle_data(out_face, make_data("/c0/o1", size=1024, now=0.0), 0.05)

    assert isinstance(effects[0], DeliverToApp)
    assert isinstance(effects[1], FaceBacklog) and effects[1].face == 0
    assert "/c0/o1" in node.cs
    assert "/c0/o1" not in node.pit
    assert node.unsatisfied[(out_face, "c0")] == 0
    assert node.strategy.probabilities("c0")[out_face] > before
    assert node.strategy.delay("c0", out_face) == pytest.approx(0.05)
    node.check_invariants()


def test_content_store_hit_answers_on_in_face():
    node = router()
    node.cs.insert(make_data("/c0/o1", size=1024, now=0.0))

    effects = node.handle_interest(0, interest(), 1.0)

    assert effects == [FaceBacklog(0)]
    assert len(node.pit) == 0
    assert node.counters.cache_hits == 1


def test_unsolicited_data_is_ignored():
    node = router()

    assert node.handle_data(1, make_data("/c0/o9", size=1024, now=0.0), 0.0) == []
    assert node.counters.unsolicited_data == 1
    assert "/c0/o9" not in node.cs


def test_timeout_expires_entry_without_touching_probabilities():
    node = router()
    node.handle_interest(APP_FACE, interest(), 0.0)
    probs = node.strategy.probabilities("c0")

    assert node.handle_timeout("/c0/o1", 1.0) == []
    effects = node.handle_timeout("/c0/o1", 2.0)

    assert effects == [AppTimeout("/c0/o1")]
    assert len(node.pit) == 0
    assert np.allclose(node.strategy.probabilities("c0"), probs)
    node.check_invariants()


def test_no_route_is_dropped():
    node = router()
    node.fib.remove("/")

    effects = node.handle_interest(0, interest(), 0.0)

    assert effects == [Dropped(effects[0].packet, 0, DROP_NO_ROUTE)]
    assert len(node.pit) == 0


def test_malformed_name_is_dropped():
    node = router()

    effects = node.handle_interest(0, interest("/c0//o1"), 0.0)

    assert effects[0].reason == DROP_MALFORMED


def test_full_queue_drops():
    node = router(faces=2, queue_capacity=1)
    node.fib.add("/", [1])

    node.handle_interest(0, interest("/c0/o1"), 0.0)
    effects = node.handle_interest(0, interest("/c0/o2"), 0.0)

    assert effects[-1].reason == DROP_QUEUE_FULL
    assert node.counters.drops == 1


def test_producer_answers_directly():
    node = NdnNode(
        node_id="p0",
        strategy=StrategyTable(face_count=1),
        role=ROLE_PRODUCER,
        producer_prefix="/",
        data_size=1024,
    )
    node.add_face(neighbor="r0", bandwidth=10e6, delay=0.01)

    effects = node.handle_interest(0, interest(), 0.0)

    assert effects == [FaceBacklog(0)]
    _, data = node.faces[0].scheduler.next_packet()
    assert data.size == 1024 and not data.is_interest
    assert node.counters.data_produced == 1


def test_available_bandwidth_window():
    node = router()
    face = node.faces[0]

    assert face.available_bandwidth(0.0) == pytest.approx(10e6)

    face.record_tx(0.0, 100_000)

    assert face.available_bandwidth(0.05) == pytest.approx(10e6 - 1e6)
    assert face.available_bandwidth(0.2) == pytest.approx(10e6)


def test_same_instant_data_still_reinforces():
    node = router()
    node.handle_interest(0, interest(now=1.0), 1.0)
    out_face = node.pit.get("/c0/o1").out_face
    before = node.strategy.probabilities("c0")[out_face]

    node.handle_data(out_face, make_data("/c0/o1", size=1024, now=1.0), 1.0)

    assert node.strategy.probabilities("c0")[out_face] > before
    assert node.strategy.delay("c0", out_face) == 0.0
    node.check_invariants()
