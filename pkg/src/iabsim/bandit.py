"""Risk-averse bandit primitives: running latency means, tail-risk (CVaR)
estimation, combined action values and epsilon-greedy selection.

Rewards are latency-flavoured costs in milliseconds, so "best" always means
minimum value.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "LearnerConfig",
    "LinkEstimate",
    "update_mean",
    "estimate_cvar",
    "cvar_reference",
    "q_value",
    "epsilon_greedy",
]

# recompute the incremental tail sum from scratch this often to kill fp drift
_TAIL_RESYNC_EVERY = 4096


@dataclass
class LearnerConfig:
    """Parameters of the risk-averse learner.

    alpha: risk level in (0, 1]; the tail fraction averaged by the CVaR
        estimator (1.0 recovers the plain sample mean).
    eta: weight of the CVaR term in the action value, in [0, 1].
    epsilon0 / epsilon_decay: initial exploration rate and its per-step
        multiplicative decay.
    history_cap: maximum rewards retained per arm; beyond it a uniform
        reservoir keeps an unbiased subsample.
    """

    alpha: float = 0.1
    eta: float = 1.0
    epsilon0: float = 0.1
    epsilon_decay: float = 0.9995
    history_cap: int = 100_000

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must be in [0, 1], got {self.eta}")
        if not 0.0 <= self.epsilon0 <= 1.0:
            raise ValueError(f"epsilon0 must be in [0, 1], got {self.epsilon0}")
        if not 0.0 < self.epsilon_decay <= 1.0:
            raise ValueError(f"epsilon_decay must be in (0, 1], got {self.epsilon_decay}")
        if self.history_cap < 1:
            raise ValueError(f"history_cap must be >= 1, got {self.history_cap}")


@dataclass
class LinkEstimate:
    """Learned per-arm state: pull count, running mean, reward history kept in
    descending order, and the derived CVaR / Q values."""

    pulls: int = 0
    mean_latency: float = 0.0
    cvar: float = 0.0
    q: float = 0.0
    _store: list = field(default_factory=list, repr=False)  # descending rewards
    _tail_m: int = field(default=0, repr=False)
    _tail_sum: float = field(default=0.0, repr=False)
    _since_resync: int = field(default=0, repr=False)

    @property
    def rewards_sorted(self):
        """Observed rewards, largest first (capped at history_cap)."""
        return tuple(self._store)

    def observe(self, reward, config, rng):
        """Fold one observed reward into mean, CVaR and Q."""
        update_mean(self, reward, history_cap=config.history_cap, rng=rng)
        self.cvar = self._tail_mean(config.alpha)
        self.q = q_value(self.mean_latency, self.cvar, config.eta)
        return self

    def _tail_mean(self, alpha):
        n = len(self._store)
        m = math.ceil(alpha * n)
        if m != self._tail_m or self._since_resync >= _TAIL_RESYNC_EVERY:
            # coverage changed in a way the insert bookkeeping did not track
            self._tail_m = m
            self._tail_sum = math.fsum(self._store[:m])
            self._since_resync = 0
        return self._tail_sum / m

    def _insert(self, reward, alpha_hint=None):
        """Insert into the descending store, keeping the top-m running sum
        consistent for the current tail size."""
        s = self._store
        k = len(s)
        m = self._tail_m
        p = bisect.bisect_left(s, -reward, key=lambda v: -v)
        s.insert(p, reward)
        self._since_resync += 1
        if m == 0:
            return
        # the tail either keeps its size or grows by one; both transitions can
        # be patched from the insertion point alone
        m_new = self._tail_m = min(m + 1, k + 1) if p <= m else m
        if p < m:
            if m_new == m:
                self._tail_sum += reward - s[m]  # s[m] was s_old[m-1]
            else:
                self._tail_sum += reward
        elif m_new > m:
            self._tail_sum += s[m]

    def _remove_at(self, index):
        del self._store[index]
        # removals are rare (reservoir only); recompute instead of patching
        self._tail_m = 0
        self._tail_sum = 0.0


def update_mean(estimate, reward, history_cap=None, rng=None):
    """Running-average update: mean <- (K*mean + r) / (K+1), pulls += 1, and
    the reward is filed into the descending history (reservoir-capped)."""
    r = float(reward)
    if not math.isfinite(r):
        raise ValueError(f"reward must be finite, got {reward!r}")
    k = estimate.pulls
    estimate.mean_latency = (k * estimate.mean_latency + r) / (k + 1)
    estimate.pulls = k + 1
    if history_cap is not None and len(estimate._store) >= history_cap:
        # uniform reservoir: keep each past reward with probability cap/pulls
        j = int(rng.integers(0, estimate.pulls))
        if j < history_cap:
            estimate._remove_at(int(rng.integers(0, len(estimate._store))))
            estimate._insert(r)
        return estimate
    estimate._insert(r)
    return estimate


def estimate_cvar(rewards_sorted, alpha):
    """Mean of the largest ceil(alpha*K) rewards.

    `rewards_sorted` must already be in descending order.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    n = len(rewards_sorted)
    if n == 0:
        raise ValueError("CVaR estimate undefined for an empty reward history")
    m = math.ceil(alpha * n)
    top = rewards_sorted[:m]
    if isinstance(top, np.ndarray):
        return float(top.mean())
    return math.fsum(top) / m


def cvar_reference(samples, alpha, q_grid=0):
    """Independent CVaR oracle: empirical minimisation of
    q + E[max(s - q, 0)] / alpha over the sample range.

    The objective is piecewise linear with breakpoints at the samples, so
    evaluating at every sample is exact; `q_grid` adds evenly spaced extra
    candidates for good measure.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    s = np.sort(np.asarray(samples, dtype=float))
    n = s.size
    if n == 0:
        raise ValueError("CVaR reference undefined for an empty sample set")
    qs = s
    if q_grid:
        qs = np.concatenate([s, np.linspace(s[0], s[-1], q_grid)])
    suffix = np.concatenate([np.cumsum(s[::-1])[::-1], [0.0]])
    idx = np.searchsorted(s, qs, side="right")
    objective = qs + (suffix[idx] - qs * (n - idx)) / (alpha * n)
    return float(objective.min())


def q_value(mean, cvar, eta):
    """Combined action value: mean + eta * CVaR."""
    return mean + eta * cvar


def epsilon_greedy(q_by_arm, available, epsilon, rng):
    """With probability epsilon pick uniformly among `available`, otherwise
    the available arm with minimum Q (ties broken uniformly via `rng`).

    `available` is an ordered collection; its order fixes the uniform draws,
    so callers should pass a canonical ordering for reproducibility.
    """
    arms = list(available)
    if not arms:
        raise ValueError("no available arms to select from")
    if epsilon > 0.0 and rng.random() < epsilon:
        return arms[int(rng.integers(len(arms)))]
    best = min(q_by_arm[a] for a in arms)
    ties = [a for a in arms if q_by_arm[a] == best]
    if len(ties) == 1:
        return ties[0]
    return ties[int(rng.integers(len(ties)))]
