"""Tests for Content Store, PIT and FIB"""
import pytest

from drrmdpf.errors import MalformedName, UsageError
from drrmdpf.packet import make_data
from drrmdpf.tables import ContentStore, Fib, Pit, PitEntry


def data(name):
    return make_data(name, size=1024, now=0.0)


def test_content_store_lru_eviction():
    cs = ContentStore(capacity=2)
    cs.insert(data("/c0/o1"))
    cs.insert(data("/c0/o2"))

    assert cs.lookup("/c0/o1") is not None

    evicted = cs.insert(data("/c0/o3"))

    assert evicted == "/c0/o2"
    assert cs.names() == ["/c0/o1", "/c0/o3"]
    assert cs.evictions == 1


def test_content_store_zero_capacity_caches_nothing():
    cs = ContentStore(capacity=0)

    assert cs.insert(data("/c0/o1")) is None
    assert cs.lookup("/c0/o1") is None
    assert len(cs) == 0


def test_content_store_hit_ratio():
    cs = ContentStore(capacity=4)
    cs.insert(data("/c0/o1"))
    cs.lookup("/c0/o1")
    cs.lookup("/c0/o9")

    assert cs.hit_ratio == pytest.approx(0.5)


def test_pit_lifecycle():
    pit = Pit()
    pit.insert(PitEntry("/c0/o1", {0}, 1, "c0", expiry=2.0, created_at=0.0))

    with pytest.raises(UsageError):
        pit.insert(PitEntry("/c0/o1", {2}, 1, "c0", expiry=2.0, created_at=0.0))

    assert pit.expire("/c0/o1", 1.0) is None
    assert pit.satisfy("/c0/o1").out_face == 1
    assert pit.satisfy("/c0/o1") is None
    assert (pit.created, pit.satisfied, pit.expired) == (1, 1, 0)


def test_pit_expiry():
    pit = Pit()
    pit.insert(PitEntry("/c0/o1", {0}, 1, "c0", expiry=2.0, created_at=0.0))

    assert pit.expire("/c0/o1", 2.0) is not None
    assert len(pit) == 0
    assert pit.expired == 1


def test_pit_entry_validation():
    with pytest.raises(UsageError):
        PitEntry("/c0/o1", set(), 1, "c0", expiry=2.0, created_at=0.0)

    with pytest.raises(UsageError):
        PitEntry("/c0/o1", {0}, 1, "c0", expiry=1.0, created_at=1.0)


def test_fib_longest_prefix_match():
    fib = Fib()
    fib.add("/", [0, 1])
    fib.add("/c1", [2], [5])

    assert fib.longest_prefix_match("/c1/o4").candidate_faces == (2,)
    assert fib.longest_prefix_match("/c2/o4").candidate_faces == (0, 1)
    assert fib.longest_prefix_match("/c1/o4").costs == (5,)

    fib.remove("/")

    assert fib.longest_prefix_match("/c2/o4") is None


def test_fib_validation():
    fib = Fib()

    with pytest.raises(UsageError):
        fib.add("/", [])

    with pytest.raises(UsageError):
        fib.add("/", [1, 1])

    with pytest.raises(MalformedName):
        fib.add("c1", [0])
