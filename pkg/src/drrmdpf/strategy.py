"""
DRR-MDPF interface selection

Per content class the table keeps a probability vector over the node's
faces. Interest arrivals blend it towards reward-weighted probabilities
and pick a face, Data arrivals reinforce the face that delivered
(linear reward-inaction), timeouts leave it untouched.
"""
import logging

from dataclasses import dataclass
from typing import Dict, Hashable, Iterable, Optional, Sequence, Tuple

import numpy as np

from .consts import (
    LAMBDA_R,
    LAMBDA_SMOOTH,
    RTT_ALPHA,
    POSITIVE,
    NEGATIVE,
    REWARD_AS_WRITTEN,
    REWARD_QUALITATIVE,
    REWARD_MODES,
    SELECT_ARGMAX,
    SELECT_SAMPLE,
    SELECTION_MODES,
)
from .errors import UsageError
from .prob import normalize, sample_index, check_probability_vector

LOGGER = logging.getLogger(__name__)


@dataclass
class InterfaceState:
    """Observation of one face for one content class."""

    bandwidth_avail: float
    unsatisfied: int
    delay: float

    def __post_init__(self):
        if self.bandwidth_avail < 0 or self.unsatisfied < 0 or self.delay < 0:
            raise UsageError(f"interface state fields must be non-negative: {self}")


@dataclass
class NormalizedState:
    """Per-face normalized bandwidth, unsatisfied count and delay."""

    beta: np.ndarray
    theta: np.ndarray
    delta: np.ndarray

    @property
    def face_count(self) -> int:
        """
        Getter for number of faces
        """
        return len(self.beta)


@dataclass
class Feedback:
    """Binary environment response for one forwarded Interest."""

    content_class: Hashable
    face: int
    outcome: str
    rtt_sample: Optional[float] = None

    def __post_init__(self):
        if self.outcome == POSITIVE:
            if self.rtt_sample is None or self.rtt_sample <= 0:
                raise UsageError("positive feedback needs a positive rtt_sample")
        elif self.outcome == NEGATIVE:
            if self.rtt_sample is not None:
                raise UsageError("negative feedback carries no rtt_sample")
        else:
            raise UsageError(f"unknown feedback outcome {self.outcome!r}")


def normalized_state(raw: Sequence[InterfaceState]) -> NormalizedState:
    """
    Normalize each observation column over the faces
    """
    if len(raw) == 0:
        raise UsageError("normalized_state needs at least one face")

    return NormalizedState(
        beta=normalize([state.bandwidth_avail for state in raw]),
        theta=normalize([state.unsatisfied for state in raw]),
        delta=normalize([state.delay for state in raw]),
    )


def interface_rewards(norm: NormalizedState, mode: str = REWARD_AS_WRITTEN) -> np.ndarray:
    """
    Per-face reward.

    as-written: R = delta + beta * theta
    qualitative: R = beta + (1 - delta) + (1 - theta), rescaled onto the
    simplex, favouring free bandwidth, low delay and few pending Interests.
    """
    if mode == REWARD_AS_WRITTEN:
        return norm.delta + norm.beta * norm.theta

    if mode == REWARD_QUALITATIVE:
        return normalize(norm.beta + (1.0 - norm.delta) + (1.0 - norm.theta))

    raise UsageError(f"unknown reward mode {mode!r}")


def weighted_probabilities(rewards: Sequence[float], probs: Sequence[float]) -> np.ndarray:
    """
    wpro_l = R_l * p_l / sum_j R_j * p_j, uniform when every product is 0
    """
    rewards = np.asarray(rewards, dtype=float)
    probs = np.asarray(probs, dtype=float)

    if rewards.shape != probs.shape:
        err_msg = f"weighted_probabilities length mismatch: {rewards.size} rewards "
        err_msg += f"for {probs.size} probabilities"
        raise UsageError(err_msg)

    if np.any(rewards < 0.0):
        raise UsageError(f"rewards must be non-negative: {rewards}")

    return normalize(rewards * probs)


def reward_inaction(probs: Sequence[float], face: int, lambda_r: float) -> np.ndarray:
    """
    Linear reward-inaction step towards face.

    p_j <- lambda_r * p_j for j != face, p_face <- 1 - sum of the others
    """
    probs = np.asarray(probs, dtype=float)

    if not 0 <= face < probs.size:
        raise UsageError(f"face {face} out of range [0, {probs.size})")

    updated = lambda_r * probs
    others = np.delete(updated, face)
    updated[face] = 1.0 - others.sum()

    return updated


class StrategyTable:
    """
    Per content class probability vectors over L faces plus RTT estimates.
    """

    def __init__(
        self,
        *,
        face_count: int,
        classes: Iterable[Hashable] = (),
        lambda_r: float = LAMBDA_R,
        lambda_smooth: float = LAMBDA_SMOOTH,
        reward_mode: str = REWARD_AS_WRITTEN,
        selection_mode: str = SELECT_ARGMAX,
    ):
        if face_count < 1:
            raise UsageError(f"face_count must be >= 1, got {face_count}")

        if not 0.0 < lambda_r < 1.0:
            raise UsageError(f"lambda_r must be in (0, 1), got {lambda_r}")

        if not 0.0 <= lambda_smooth <= 1.0:
            raise UsageError(f"lambda_smooth must be in [0, 1], got {lambda_smooth}")

        if reward_mode not in REWARD_MODES:
            raise UsageError(f"unknown reward mode {reward_mode!r}")

        if selection_mode not in SELECTION_MODES:
            raise UsageError(f"unknown selection mode {selection_mode!r}")

        self.face_count = face_count
        self.lambda_r = lambda_r
        self.lambda_smooth = lambda_smooth
        self.reward_mode = reward_mode
        self.selection_mode = selection_mode

        self._probs: Dict[Hashable, np.ndarray] = {}
        self._delays: Dict[Tuple[Hashable, int], float] = {}

        for content_class in classes:
            self.add_class(content_class)

    def __repr__(self) -> str:
        """Return the representation."""
        result = f"<StrategyTable faces={self.face_count} classes={len(self._probs)} "
        result += f"lambda_r={self.lambda_r} lambda_smooth={self.lambda_smooth} "
        result += f"reward_mode={self.reward_mode} selection_mode={self.selection_mode}>"

        return result

    @property
    def classes(self) -> Tuple[Hashable, ...]:
        """
        Getter for known content classes
        """
        return tuple(self._probs)

    def add_class(self, content_class: Hashable) -> None:
        """
        Cold start: every face equally likely
        """
        if content_class not in self._probs:
            self._probs[content_class] = np.full(self.face_count, 1.0 / self.face_count)

    def ensure_class(self, content_class: Hashable) -> None:
        """
        Alias used by the forwarding pipeline
        """
        self.add_class(content_class)

    def _class_probs(self, content_class: Hashable) -> np.ndarray:
        try:
            return self._probs[content_class]
        except KeyError:
            raise UsageError(f"unknown content class {content_class!r}") from None

    def probabilities(self, content_class: Hashable) -> np.ndarray:
        """
        Copy of the probability vector of a class
        """
        return self._class_probs(content_class).copy()

    def set_probabilities(self, content_class: Hashable, probs: Sequence[float]) -> None:
        """
        Replace the probability vector of a class
        """
        probs = check_probability_vector(probs)

        if probs.size != self.face_count:
            raise UsageError(f"expected {self.face_count} probabilities, got {probs.size}")

        self._probs[content_class] = probs.copy()

    def select_interface(
        self,
        content_class: Hashable,
        norm: NormalizedState,
        rng: Optional[np.random.Generator] = None,
        candidates: Optional[Sequence[int]] = None,
    ) -> int:
        """
        Reward the faces, blend and pick one.

        norm is aligned with candidates (all faces when candidates is None).
        """
        rewards = interface_rewards(norm, self.reward_mode)

        return self.select_from_rewards(content_class, rewards, rng, candidates)

    def select_from_rewards(
        self,
        content_class: Hashable,
        rewards: Sequence[float],
        rng: Optional[np.random.Generator] = None,
        candidates: Optional[Sequence[int]] = None,
    ) -> int:
        """
        Reward weighting and smoothing on the candidate faces, then
        argmax (lowest face wins ties) or a draw from the blended vector.
        """
        probs = self._class_probs(content_class)

        if candidates is None:
            faces = np.arange(self.face_count)
        else:
            faces = np.asarray(sorted(candidates), dtype=int)
            if len(candidates) != len(set(candidates)):
                raise UsageError(f"duplicate candidate faces {candidates}")

        if faces.size == 0:
            raise UsageError("select_interface needs at least one candidate face")

        rewards = np.asarray(rewards, dtype=float)
        if candidates is not None:
            # rewards come aligned with the caller's candidate order
            order = np.argsort(np.asarray(candidates), kind="stable")
            rewards = rewards[order]

        local = probs[faces]
        mass = float(local.sum())
        local = normalize(local)

        wpro = weighted_probabilities(rewards, local)
        blended = (1.0 - self.lambda_smooth) * local + self.lambda_smooth * wpro

        if faces.size == self.face_count:
            probs[faces] = blended
        else:
            probs[faces] = blended * mass

        total = probs.sum()
        if total > 0.0:
            probs /= total

        if self.selection_mode == SELECT_SAMPLE:
            if rng is None:
                raise UsageError("sample selection needs a random stream")
            chosen = int(faces[sample_index(normalize(blended), rng)])
        else:
            chosen = int(faces[int(np.argmax(blended))])

        return chosen

    def positive_feedback(self, content_class: Hashable, face: int) -> None:
        """
        Data arrived on face: reinforce it
        """
        probs = self._class_probs(content_class)
        self._probs[content_class] = reward_inaction(probs, face, self.lambda_r)

    def negative_feedback(self, content_class: Hashable, face: int) -> None:
        """
        Timeout on face: maintain previous probabilities
        """
        self._class_probs(content_class)

    def record_rtt(self, content_class: Hashable, face: int, sample: float) -> None:
        """
        EWMA of the round trip time per (class, face)
        """
        if sample <= 0:
            raise UsageError(f"rtt sample must be positive, got {sample}")

        key = (content_class, face)
        if key in self._delays:
            self._delays[key] = (1.0 - RTT_ALPHA) * self._delays[key] + RTT_ALPHA * sample
        else:
            self._delays[key] = sample

    def delay(self, content_class: Hashable, face: int) -> float:
        """
        Smoothed RTT, 0 before the first sample
        """
        return self._delays.get((content_class, face), 0.0)

    def apply_feedback(self, feedback: Feedback) -> None:
        """
        Dispatch a Feedback record
        """
        if feedback.outcome == POSITIVE:
            self.record_rtt(feedback.content_class, feedback.face, feedback.rtt_sample)
            self.positive_feedback(feedback.content_class, feedback.face)
        else:
            self.negative_feedback(feedback.content_class, feedback.face)

    def choose(
        self,
        *,
        content_class: Hashable,
        candidates: Sequence[int],
        states: Sequence[InterfaceState],
        rng: np.random.Generator,
    ) -> int:
        """
        Forwarding pipeline entry point
        """
        self.ensure_class(content_class)

        return self.select_interface(
            content_class, normalized_state(states), rng, candidates
        )

    def on_data(self, content_class: Hashable, face: int, rtt: float) -> None:
        """
        Forwarding pipeline hook for a satisfied Interest
        """
        self.ensure_class(content_class)

        # zero rtt still reinforces, only the delay estimate skips it
        if rtt <= 0:
            self.positive_feedback(content_class, face)
            return

        self.apply_feedback(
            Feedback(content_class=content_class, face=face, outcome=POSITIVE, rtt_sample=rtt)
        )

    def on_timeout(self, content_class: Hashable, face: int) -> None:
        """
        Forwarding pipeline hook for an expired Interest
        """
        self.ensure_class(content_class)
        self.apply_feedback(Feedback(content_class=content_class, face=face, outcome=NEGATIVE))
