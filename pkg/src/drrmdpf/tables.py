"""Content Store, Pending Interest Table and Forwarding Information Base"""

import logging

from collections import OrderedDict
from dataclasses import dataclass
from typing import Dict, Hashable, Iterator, List, Optional, Sequence, Set, Tuple

from .errors import UsageError
from .packet import Packet, parse_name

LOGGER = logging.getLogger(__name__)


class ContentStore:
    """LRU cache of Data packets keyed by name."""

    def __init__(self, *, capacity: int):
        if capacity < 0:
            raise UsageError(f"content store capacity must be >= 0, got {capacity}")

        self.capacity = capacity
        self._entries: "OrderedDict[str, Packet]" = OrderedDict()
        self.hits = 0
        self.misses = 0
        self.evictions = 0

    def __repr__(self) -> str:
        """Return the representation."""
        return f"<ContentStore {len(self._entries)}/{self.capacity} hits={self.hits}>"

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, name: str) -> bool:
        return name in self._entries

    def names(self) -> List[str]:
        """
        Cached names, least recently used first
        """
        return list(self._entries)

    def lookup(self, name: str) -> Optional[Packet]:
        """
        Return the cached Data and refresh its recency
        """
        data = self._entries.get(name)

        if data is None:
            self.misses += 1
            return None

        self._entries.move_to_end(name)
        self.hits += 1

        return data

    def insert(self, data: Packet) -> Optional[str]:
        """
        Cache data, returns the evicted name if any
        """
        if self.capacity == 0:
            return None

        if data.name in self._entries:
            self._entries.move_to_end(data.name)
            self._entries[data.name] = data
            return None

        evicted = None
        if len(self._entries) >= self.capacity:
            evicted, _ = self._entries.popitem(last=False)
            self.evictions += 1

        self._entries[data.name] = data

        return evicted

    @property
    def hit_ratio(self) -> float:
        """
        Hits over lookups, 0 before any lookup
        """
        lookups = self.hits + self.misses
        return self.hits / lookups if lookups else 0.0


@dataclass
class PitEntry:
    """Pending Interest, remembers where the Data has to go."""

    name: str
    in_faces: Set[int]
    out_face: int
    content_class: Hashable
    expiry: float
    created_at: float

    def __post_init__(self):
        if self.expiry <= self.created_at:
            raise UsageError(f"PIT entry expiry {self.expiry} not after {self.created_at}")

        if not self.in_faces:
            raise UsageError("PIT entry needs at least one in face")


class Pit:
    """Pending Interest Table keyed by exact name."""

    def __init__(self):
        self._entries: Dict[str, PitEntry] = {}
        self.created = 0
        self.satisfied = 0
        self.expired = 0

    def __repr__(self) -> str:
        """Return the representation."""
        return f"<Pit live={len(self._entries)} created={self.created}>"

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, name: str) -> bool:
        return name in self._entries

    def __iter__(self) -> Iterator[PitEntry]:
        return iter(list(self._entries.values()))

    def get(self, name: str) -> Optional[PitEntry]:
        """
        Getter for an entry
        """
        return self._entries.get(name)

    def insert(self, entry: PitEntry) -> None:
        """
        Add a new pending entry
        """
        if entry.name in self._entries:
            raise UsageError(f"PIT already holds an entry for {entry.name}")

        self._entries[entry.name] = entry
        self.created += 1

    def satisfy(self, name: str) -> Optional[PitEntry]:
        """
        Remove the entry consumed by a Data packet
        """
        entry = self._entries.pop(name, None)
        if entry is not None:
            self.satisfied += 1

        return entry

    def expire(self, name: str, now: float) -> Optional[PitEntry]:
        """
        Remove the entry if its lifetime is over, None for stale timers
        """
        entry = self._entries.get(name)
        if entry is None or entry.expiry > now:
            return None

        del self._entries[name]
        self.expired += 1

        return entry


@dataclass
class FibEntry:
    """Name prefix with its candidate faces, best first."""

    prefix: str
    candidate_faces: Tuple[int, ...]
    costs: Tuple[int, ...] = ()

    def __post_init__(self):
        parse_name(self.prefix)
        self.candidate_faces = tuple(self.candidate_faces)

        if not self.candidate_faces:
            raise UsageError(f"FIB entry {self.prefix} needs at least one face")

        if len(set(self.candidate_faces)) != len(self.candidate_faces):
            raise UsageError(f"FIB entry {self.prefix} has duplicate faces")

        if not self.costs:
            self.costs = tuple(0 for _ in self.candidate_faces)
        self.costs = tuple(self.costs)

        if len(self.costs) != len(self.candidate_faces):
            raise UsageError(f"FIB entry {self.prefix} costs do not match faces")


class Fib:
    """Longest-prefix-match table."""

    def __init__(self):
        self._entries: Dict[Tuple[str, ...], FibEntry] = {}

    def __repr__(self) -> str:
        """Return the representation."""
        return f"<Fib entries={len(self._entries)}>"

    def __len__(self) -> int:
        return len(self._entries)

    def entries(self) -> List[FibEntry]:
        """
        Getter for all entries
        """
        return list(self._entries.values())

    def add(self, prefix: str, faces: Sequence[int], costs: Sequence[int] = ()) -> FibEntry:
        """
        Insert or replace the entry for prefix
        """
        entry = FibEntry(prefix=prefix, candidate_faces=tuple(faces), costs=tuple(costs))
        self._entries[parse_name(prefix)] = entry

        return entry

    def remove(self, prefix: str) -> None:
        """
        Drop the entry for prefix
        """
        self._entries.pop(parse_name(prefix), None)

    def longest_prefix_match(self, name: str) -> Optional[FibEntry]:
        """
        Entry with the longest prefix of name, None without a match
        """
        components = parse_name(name)

        for length in range(len(components), -1, -1):
            entry = self._entries.get(components[:length])
            if entry is not None:
                return entry

        return None
