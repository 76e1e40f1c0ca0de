"""Interest and Data packets and hierarchical content names"""

import logging

from dataclasses import dataclass
from typing import Tuple

from .consts import INTEREST, DATA
from .errors import UsageError, MalformedName

LOGGER = logging.getLogger(__name__)


def parse_name(name: str) -> Tuple[str, ...]:
    """
    Split "/a/b/c" into its components
    """
    if not isinstance(name, str) or not name.startswith("/"):
        raise MalformedName(f"name must start with '/', got {name!r}")

    if name == "/":
        return ()

    components = tuple(name[1:].split("/"))
    if any(component == "" for component in components):
        raise MalformedName(f"name has an empty component: {name!r}")

    return components


def content_class_of(name: str) -> str:
    """
    Content class k is the first name component
    """
    components = parse_name(name)

    if not components:
        raise MalformedName("the root name carries no content class")

    return components[0]


def is_prefix(prefix: str, name: str) -> bool:
    """
    Component-wise prefix test, "/" is a prefix of everything
    """
    prefix_components = parse_name(prefix)
    name_components = parse_name(name)

    return name_components[: len(prefix_components)] == prefix_components


@dataclass
class Packet:
    """Represents an Interest or a Data packet in flight."""

    name: str
    kind: str
    size: int
    created_at: float = 0.0

    def __post_init__(self):
        if not self.name:
            raise UsageError("packet name must be non-empty")

        if self.kind not in (INTEREST, DATA):
            raise UsageError(f"unknown packet kind {self.kind!r}")

        if self.size <= 0:
            raise UsageError(f"packet size must be positive, got {self.size}")

    def __repr__(self) -> str:
        """Return the representation."""
        return f"<Packet {self.kind} {self.name} size={self.size} created_at={self.created_at}>"

    @property
    def content_class(self) -> str:
        """
        Getter for content class, raises MalformedName
        """
        return content_class_of(self.name)

    @property
    def is_interest(self) -> bool:
        """
        True for Interest packets
        """
        return self.kind == INTEREST

    @property
    def bits(self) -> int:
        """
        Size on the wire in bits
        """
        return self.size * 8


def make_interest(name: str, *, size: int, now: float) -> Packet:
    """
    Build an Interest packet
    """
    return Packet(name=name, kind=INTEREST, size=size, created_at=now)


def make_data(name: str, *, size: int, now: float) -> Packet:
    """
    Build a Data packet
    """
    return Packet(name=name, kind=DATA, size=size, created_at=now)
