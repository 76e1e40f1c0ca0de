"""
Simplified comparison strategies

These are labelled stand-ins, not reimplementations of the published
algorithms: best-route, uniform random (smdpf-like), even load spread
(rfa-like) and stochastic adaptive (saf-like, la-mdpf-like).
"""
import logging

from dataclasses import dataclass
from typing import Callable, Dict, Hashable, Mapping, Optional, Sequence

import numpy as np

from .consts import (
    RTT_ALPHA,
    SAF_DECAY,
    SAF_RECOVERY,
    STRATEGY_BEST_ROUTE,
    STRATEGY_RANDOM,
    STRATEGY_RFA_LIKE,
    STRATEGY_SAF_LIKE,
    STRATEGY_SMDPF_LIKE,
    STRATEGY_LA_MDPF_LIKE,
)
from .errors import UsageError
from .prob import normalize, sample_index

LOGGER = logging.getLogger(__name__)

BEST_ROUTE = "BestRoute"
UNIFORM_RANDOM = "UniformRandom"
UNIFORM_MULTIPATH_RANK = "UniformMultipathRank"
STOCHASTIC_ADAPTIVE = "StochasticAdaptive"

BASELINE_KINDS = (BEST_ROUTE, UNIFORM_RANDOM, UNIFORM_MULTIPATH_RANK, STOCHASTIC_ADAPTIVE)

BASELINE_BY_STRATEGY = {
    STRATEGY_BEST_ROUTE: BEST_ROUTE,
    STRATEGY_RANDOM: UNIFORM_RANDOM,
    STRATEGY_SMDPF_LIKE: UNIFORM_RANDOM,
    STRATEGY_RFA_LIKE: UNIFORM_MULTIPATH_RANK,
    STRATEGY_SAF_LIKE: STOCHASTIC_ADAPTIVE,
    STRATEGY_LA_MDPF_LIKE: STOCHASTIC_ADAPTIVE,
}


@dataclass
class FaceStats:
    """What a baseline remembers about one face."""

    hops: int = 0
    forwards: int = 0
    successes: int = 0
    failures: int = 0
    rtt: Optional[float] = None
    weight: float = 1.0

    def record_success(self, rtt: float) -> None:
        """
        Data came back on this face
        """
        self.successes += 1

        if rtt > 0:
            if self.rtt is None:
                self.rtt = rtt
            else:
                self.rtt = (1.0 - RTT_ALPHA) * self.rtt + RTT_ALPHA * rtt

        self.weight += (1.0 - self.weight) * SAF_RECOVERY

    def record_failure(self) -> None:
        """
        Interest forwarded on this face timed out
        """
        self.failures += 1
        self.weight *= SAF_DECAY


def baseline_select(
    kind: str,
    candidates: Sequence[int],
    stats: Mapping[int, FaceStats],
    rng: Optional[np.random.Generator] = None,
    loads: Optional[Mapping[int, float]] = None,
) -> int:
    """
    Pick a face among the FIB candidates

    loads, when given, is the forwarding load behind each face; the rank
    baseline prefers the least loaded neighbor and falls back to its own
    per-face forward counts.
    """
    if len(candidates) == 0:
        raise UsageError("baseline_select needs at least one candidate face")

    faces = sorted(candidates)

    if len(faces) == 1:
        return faces[0]

    def face_stats(face: int) -> FaceStats:
        return stats.get(face) or FaceStats()

    if kind == BEST_ROUTE:
        sampled = [face for face in faces if face_stats(face).rtt is not None]
        if sampled:
            return min(sampled, key=lambda face: (face_stats(face).rtt, face))
        return min(faces, key=lambda face: (face_stats(face).hops, face))

    if kind == UNIFORM_MULTIPATH_RANK:
        return min(
            faces,
            key=lambda face: ((loads or {}).get(face, 0), face_stats(face).forwards, face),
        )

    if rng is None:
        raise UsageError(f"{kind} needs a random stream")

    if kind == UNIFORM_RANDOM:
        return faces[int(rng.integers(len(faces)))]

    if kind == STOCHASTIC_ADAPTIVE:
        weights = normalize([face_stats(face).weight for face in faces])
        return faces[sample_index(weights, rng)]

    raise UsageError(f"unknown baseline kind {kind!r}")


class BaselineStrategy:
    """
    Per-node state for a baseline, same hooks as StrategyTable
    """

    def __init__(self, *, kind: str, face_count: int, hops: Optional[Mapping[int, int]] = None):
        if kind not in BASELINE_KINDS:
            raise UsageError(f"unknown baseline kind {kind!r}")

        self.kind = kind
        self.face_count = face_count
        self.stats: Dict[int, FaceStats] = {
            face: FaceStats(hops=(hops or {}).get(face, 0)) for face in range(face_count)
        }
        self.neighbor_load: Optional[Callable[[int], float]] = None

    def __repr__(self) -> str:
        """Return the representation."""
        return f"<BaselineStrategy {self.kind} faces={self.face_count}>"

    def set_hops(self, face: int, hops: int) -> None:
        """
        Setter for the static hop count towards the producer
        """
        self.stats[face].hops = hops

    def set_neighbor_load(self, load: Callable[[int], float]) -> None:
        """
        Setter for the callback reporting the load behind a face
        """
        self.neighbor_load = load

    def ensure_class(self, content_class: Hashable) -> None:
        """
        Baselines keep per-face state only
        """

    def delay(self, content_class: Hashable, face: int) -> float:
        """
        Smoothed RTT of face, 0 before the first sample
        """
        rtt = self.stats[face].rtt
        return 0.0 if rtt is None else rtt

    def choose(self, *, content_class: Hashable, candidates: Sequence[int], states, rng) -> int:
        """
        Forwarding pipeline entry point
        """
        loads = None
        if self.kind == UNIFORM_MULTIPATH_RANK and self.neighbor_load is not None:
            loads = {face: self.neighbor_load(face) for face in candidates}

        face = baseline_select(self.kind, candidates, self.stats, rng, loads)
        self.stats[face].forwards += 1

        return face

    def on_data(self, content_class: Hashable, face: int, rtt: float) -> None:
        """
        Forwarding pipeline hook for a satisfied Interest
        """
        self.stats[face].record_success(rtt)

    def on_timeout(self, content_class: Hashable, face: int) -> None:
        """
        Forwarding pipeline hook for an expired Interest
        """
        self.stats[face].record_failure()
