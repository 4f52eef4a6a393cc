"""Iterative spectral-filter mean estimator.

Each round computes the survivor mean and covariance, measures how far the
covariance sticks out above the identity, and either stops (certificate of
robustness: the excess is below C * gamma * ln(1/gamma)) or projects onto
the top direction and removes the most extreme tail. A survivor floor of
ceil((1 - 2 gamma) n) rows guarantees adversarial inputs cannot drive the
estimator to an empty set.
"""

from __future__ import annotations

import math
import warnings
from collections import Counter
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .linalg import (
    as_dataset,
    as_vector,
    empirical_covariance,
    empirical_mean,
    spectral_deviation_pair,
)
from .sensitivity import RobustConfig


class SampleSizeWarning(UserWarning):
    """Raised when n falls below the d / gamma^2 guideline for the filter."""


class Termination(str, Enum):
    CERTIFICATE = "certificate"
    FALLBACK_EXHAUSTED = "fallback_exhausted"
    MAX_ITERATIONS = "max_iterations"


@dataclass(frozen=True)
class FilterDiagnostics:
    iterations: int
    removed_indices: list[int]
    final_spectral_deviation: float
    threshold: float
    terminated_by: Termination


@dataclass(frozen=True)
class FilterOutcome:
    """Survivor mean, the surviving rows, and how filtering ended."""

    mean: np.ndarray
    surviving: np.ndarray
    diagnostics: FilterDiagnostics


def thresh(gamma: float, c_thresh: float) -> float:
    """Certificate threshold C * gamma * ln(1/gamma)."""
    if not 0.0 < gamma < 0.5:
        raise ValueError("gamma must lie in (0, 0.5)")
    if c_thresh <= 0.0:
        raise ValueError("c_thresh must be positive")
    return c_thresh * gamma * math.log(1.0 / gamma)


def _tail_slack(
    t: np.ndarray,
    gamma: float,
    slack_coefficient: float,
    tau_dependent: bool,
    tau: float,
    d: int,
) -> np.ndarray:
    if not tau_dependent:
        return np.full_like(t, slack_coefficient * gamma)
    # T-dependent alternative: slack_coefficient * gamma / (T^2 ln(d ln(d/(gamma tau)))).
    inner = d * math.log(d / (gamma * tau))
    denom_log = math.log(inner) if inner > 1.0 else float("inf")
    with np.errstate(divide="ignore"):
        out = slack_coefficient * gamma / (np.square(t) * denom_log)
    out[t <= 0.0] = float("inf")
    return out


def filter_step(
    data,
    mu,
    v,
    gamma: float,
    *,
    tail_coefficient: float = 8.0,
    tail_slack_coefficient: float = 8.0,
    tau_dependent: bool = False,
    tau: float = 0.05,
) -> list[int]:
    """Indices to remove after projecting data onto the direction v.

    Projections are p_i = |v . (x_i - mu)|. The removal threshold T is the
    smallest projection value whose strict tail is heavier than a good
    Gaussian sample allows, i.e. |{i : p_i > T}| / n exceeds
    tail_coefficient * exp(-T^2 / 2) + slack, where slack is the flat
    tail_slack_coefficient * gamma by default. All indices with p_i > T are
    removed. When no projection value qualifies, the single index with the
    largest projection is returned so the caller always makes progress;
    ties resolve to the lowest index.
    """
    arr = as_dataset(data)
    n, d = arr.shape
    mu_vec = as_vector(mu, dim=d)
    v_vec = as_vector(v, dim=d)
    v_norm = np.linalg.norm(v_vec)
    if abs(v_norm - 1.0) > 1e-9:
        raise ValueError("projection direction must be a unit vector")
    if not 0.0 <= gamma < 0.5:
        raise ValueError("gamma must lie in [0, 0.5)")

    proj = np.abs((arr - mu_vec) @ v_vec)
    order = np.argsort(proj, kind="stable")
    sorted_proj = proj[order]
    # Strict-tail count for candidate T = sorted_proj[k]: everything to the
    # right of the last occurrence of that value.
    tail_counts = n - np.searchsorted(sorted_proj, sorted_proj, side="right")
    allowed = tail_coefficient * np.exp(-0.5 * np.square(sorted_proj)) + _tail_slack(
        sorted_proj, gamma, tail_slack_coefficient, tau_dependent, tau, d
    )
    hits = np.flatnonzero(tail_counts / n > allowed)
    if hits.size:
        t = sorted_proj[hits[0]]
        return [int(i) for i in np.flatnonzero(proj > t)]
    return [int(np.argmax(proj))]


def filter_gaussian_unknown_mean(data, cfg: RobustConfig) -> FilterOutcome:
    """Run the filter until the covariance certificate holds.

    Loop: mean, covariance, spectral deviation lambda* of (cov - I); stop
    with CERTIFICATE once lambda* <= thresh(gamma, C), with MAX_ITERATIONS
    after n removal rounds, or with FALLBACK_EXHAUSTED when the next
    removal would leave fewer than max(2, ceil((1 - 2 gamma) n)) rows.
    The mean of the surviving rows is returned in every case.
    """
    arr = as_dataset(data)
    n, d = arr.shape
    if n < 2:
        raise ValueError("filtering requires at least 2 rows")

    guideline = d / cfg.gamma**2
    if n < guideline:
        warnings.warn(
            f"n={n} is below the d/gamma^2 = {guideline:.0f} sample-size guideline; "
            "the certificate may not be reachable",
            SampleSizeWarning,
            stacklevel=2,
        )

    threshold = thresh(cfg.gamma, cfg.c_thresh)
    floor = max(2, math.ceil((1.0 - 2.0 * cfg.gamma) * n))

    alive = np.arange(n)
    removed: list[int] = []
    iterations = 0
    while True:
        subset = arr[alive]
        mu = empirical_mean(subset)
        sigma = empirical_covariance(subset, mu)
        deviation, direction = spectral_deviation_pair(sigma)

        if deviation <= threshold:
            term = Termination.CERTIFICATE
            break
        if iterations >= n:
            term = Termination.MAX_ITERATIONS
            break

        local = filter_step(
            subset,
            mu,
            direction,
            cfg.gamma,
            tail_coefficient=cfg.tail_coefficient,
            tail_slack_coefficient=cfg.tail_slack_coefficient,
            tau_dependent=cfg.tau_dependent_tail,
            tau=cfg.tau,
        )
        if alive.size - len(local) < floor:
            term = Termination.FALLBACK_EXHAUSTED
            break

        removed.extend(int(i) for i in alive[local])
        keep = np.ones(alive.size, dtype=bool)
        keep[local] = False
        alive = alive[keep]
        iterations += 1

    diagnostics = FilterDiagnostics(
        iterations=iterations,
        removed_indices=removed,
        final_spectral_deviation=deviation,
        threshold=threshold,
        terminated_by=term,
    )
    return FilterOutcome(mean=mu, surviving=arr[alive], diagnostics=diagnostics)


def symmetric_difference_ratio(original, surviving) -> float:
    """Multiset symmetric difference between row sets, divided by |original|.

    Rows are compared exactly (bit-level), which is the right notion here:
    surviving rows are copies of original rows, and any injected row will
    differ. For a pure row-subset this reduces to the removed fraction.
    """
    orig = as_dataset(original)
    surv = as_dataset(surviving)
    if orig.shape[1] != surv.shape[1]:
        raise ValueError("dimension mismatch between datasets")
    counts: Counter[bytes] = Counter(row.tobytes() for row in orig)
    counts.subtract(row.tobytes() for row in surv)
    diff = sum(abs(c) for c in counts.values())
    return diff / orig.shape[0]
