"""
Probability-simplex and finite MDP primitives

Shared by the strategy engine and used as oracles in the tests.
"""
import logging

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .consts import SIMPLEX_TOL, VALUE_ITERATION_TOL, VALUE_ITERATION_MAX_ITER
from .errors import UsageError, ConvergenceError

LOGGER = logging.getLogger(__name__)


def check_probability_vector(pv: Sequence[float], *, tol: float = SIMPLEX_TOL) -> np.ndarray:
    """
    Validate a probability vector and return it as a float array
    """
    result = np.asarray(pv, dtype=float)

    if result.ndim != 1 or result.size == 0:
        raise UsageError(f"probability vector must be 1-d and non-empty, got {pv!r}")

    if np.any(result < 0.0) or np.any(result > 1.0):
        raise UsageError(f"probability vector entries outside [0, 1]: {pv!r}")

    total = float(result.sum())
    if abs(total - 1.0) > tol:
        raise UsageError(f"probability vector sums to {total!r}, not 1")

    return result


def normalize(weights: Sequence[float]) -> np.ndarray:
    """
    Scale non-negative weights onto the probability simplex.

    An all-zero vector maps to the uniform distribution.
    """
    result = np.asarray(weights, dtype=float)

    if result.ndim != 1 or result.size == 0:
        raise UsageError("normalize needs a non-empty 1-d weight vector")

    if not np.all(np.isfinite(result)):
        raise UsageError(f"normalize got non-finite weights: {weights!r}")

    if np.any(result < 0.0):
        raise UsageError(f"normalize got negative weights: {weights!r}")

    total = result.sum()
    if total == 0.0:
        return np.full(result.size, 1.0 / result.size)

    return result / total


def sample_index(pv: Sequence[float], rng: np.random.Generator) -> int:
    """
    Draw index i with probability pv[i]
    """
    probs = check_probability_vector(pv)

    if probs.size == 1:
        return 0

    cumulative = np.cumsum(probs)
    index = int(np.searchsorted(cumulative, rng.random(), side="right"))

    # Rounding can leave cumulative[-1] a hair under 1
    last_with_mass = int(np.flatnonzero(probs)[-1])

    return min(index, last_with_mass)


@dataclass
class FiniteMdp:
    """Finite MDP with tensors indexed [s][a][s']."""

    transition: np.ndarray
    reward: np.ndarray
    discount: float

    def __post_init__(self):
        self.transition = np.asarray(self.transition, dtype=float)
        self.reward = np.asarray(self.reward, dtype=float)

        if self.transition.ndim != 3:
            raise UsageError("transition must be a [s][a][s'] tensor")

        states, actions, next_states = self.transition.shape
        if states == 0 or actions == 0 or states != next_states:
            raise UsageError(f"bad transition shape {self.transition.shape}")

        if self.reward.shape != self.transition.shape:
            err_msg = f"reward shape {self.reward.shape} does not match "
            err_msg += f"transition shape {self.transition.shape}"
            raise UsageError(err_msg)

        if np.any(self.transition < 0.0) or np.any(self.transition > 1.0):
            raise UsageError("transition entries must lie in [0, 1]")

        sums = self.transition.sum(axis=2)
        if np.any(np.abs(sums - 1.0) > SIMPLEX_TOL):
            raise UsageError("every transition row P[s][a] must sum to 1")

        if not 0.0 <= self.discount < 1.0:
            raise UsageError(f"discount must be in [0, 1), got {self.discount}")

    @property
    def state_count(self) -> int:
        """
        Getter for state count
        """
        return self.transition.shape[0]

    @property
    def action_count(self) -> int:
        """
        Getter for action count
        """
        return self.transition.shape[1]

    def expected_rewards(self) -> np.ndarray:
        """
        Expected one-step reward for every (s, a)
        """
        return np.einsum("ijk,ijk->ij", self.reward, self.transition)


def expected_reward(mdp: FiniteMdp, s: int, a: int) -> float:
    """
    Sum over s' of R[s][a][s'] * P[s][a][s']
    """
    if not 0 <= s < mdp.state_count:
        raise UsageError(f"state {s} out of range [0, {mdp.state_count})")

    if not 0 <= a < mdp.action_count:
        raise UsageError(f"action {a} out of range [0, {mdp.action_count})")

    return float(np.dot(mdp.reward[s, a], mdp.transition[s, a]))


def bellman_backup(mdp: FiniteMdp, values: Sequence[float]) -> np.ndarray:
    """
    One application of the Bellman optimality operator
    """
    values = np.asarray(values, dtype=float)

    if values.shape != (mdp.state_count,):
        raise UsageError(f"values must have {mdp.state_count} entries")

    q_values = mdp.expected_rewards() + mdp.discount * (mdp.transition @ values)

    return q_values.max(axis=1)


def value_iteration(
    mdp: FiniteMdp,
    tol: float = VALUE_ITERATION_TOL,
    max_iter: int = VALUE_ITERATION_MAX_ITER,
) -> Tuple[np.ndarray, int]:
    """
    Solve for the optimal state values by repeated Bellman backups.

    Returns the values together with the number of backups performed.
    """
    if tol <= 0.0:
        raise UsageError(f"tol must be positive, got {tol}")

    values = np.zeros(mdp.state_count)
    residual = float("inf")

    for iteration in range(1, max_iter + 1):
        updated = bellman_backup(mdp, values)
        residual = float(np.max(np.abs(updated - values)))
        values = updated

        if residual < tol:
            dbg_msg = f"value_iteration converged after {iteration} iterations "
            dbg_msg += f"residual: {residual}"
            LOGGER.debug(dbg_msg)

            return values, iteration

    err_msg = f"value_iteration did not converge in {max_iter} iterations, "
    err_msg += f"last residual: {residual}"
    LOGGER.error(err_msg)

    raise ConvergenceError(err_msg, residual=residual)
