"""Synthetic data: identity-covariance Gaussian samples, corruption
adversaries, and the goodness diagnostic for uncorrupted samples.

The corruption model replaces (or, for the subtractive adversary, removes)
m' ~ Binomial(n, gamma) rows chosen uniformly without replacement. A
fixed-count mode replaces the binomial draw with round(gamma * n) for
deterministic experiments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .linalg import (
    as_dataset,
    as_vector,
    empirical_covariance,
    empirical_mean,
    max_eigenpair,
)


@dataclass(frozen=True)
class ConstantCluster:
    """Replace corrupted rows with the single point mu_true + offset.

    offset may be a scalar (meaning offset * e_1) or a length-d vector.
    """

    offset: float | tuple[float, ...] = 10.0

    name = "constant_cluster"


@dataclass(frozen=True)
class DirectionalSpread:
    """Replace corrupted rows with mu_true + magnitude * direction + jitter.

    direction defaults to e_1; jitter is i.i.d. N(0, jitter^2 I) per row so
    the planted points are spread rather than coincident.
    """

    magnitude: float = 10.0
    direction: tuple[float, ...] | None = None
    jitter: float = 0.1

    name = "directional_spread"


@dataclass(frozen=True)
class SubtractiveOnly:
    """Remove the m' rows with the largest first coordinate (no replacement).

    Models the removal half of the corruption model; the output has
    n - m' rows.
    """

    name = "subtractive_only"


Adversary = ConstantCluster | DirectionalSpread | SubtractiveOnly

ADVERSARY_NAMES = ("constant_cluster", "directional_spread", "subtractive_only")


@dataclass(frozen=True)
class CorruptionPlan:
    gamma: float
    adversary: Adversary | None
    replaced_indices: list[int] = field(default_factory=list)
    m_prime: int = 0


@dataclass(frozen=True)
class GoodnessReport:
    """Per-condition diagnostics for a sample against its generating Gaussian."""

    cond1_max_norm: float
    cond1_pass: bool
    cond2_worst_gap: float
    cond2_pass: bool
    cond3_mean_error: float
    cond3_pass: bool
    cond4_cov_deviation: float
    cond4_pass: bool

    def all_pass(self) -> bool:
        return self.cond1_pass and self.cond2_pass and self.cond3_pass and self.cond4_pass


def sample_gaussian(n: int, d: int, mu=0.0, seed: int = 0) -> np.ndarray:
    """n i.i.d. draws from N(mu, I_d), deterministic per seed."""
    if n < 1 or d < 1:
        raise ValueError("n and d must be at least 1")
    center = np.broadcast_to(np.asarray(mu, dtype=float), (d,)) if np.ndim(mu) == 0 else as_vector(mu, dim=d)
    rng = np.random.default_rng(seed)
    return rng.standard_normal((n, d)) + center


def _resolve_point(spec, d: int) -> np.ndarray:
    if np.ndim(spec) == 0:
        out = np.zeros(d)
        out[0] = float(spec)
        return out
    return as_vector(spec, dim=d)


def corrupt(
    data,
    gamma: float,
    adversary: Adversary | None,
    seed: int = 0,
    *,
    mu_true=0.0,
    fixed_count: bool = False,
) -> tuple[np.ndarray, CorruptionPlan]:
    """Apply a corruption adversary to a copy of data.

    Draws m' ~ Binomial(n, gamma) (or round(gamma n) in fixed-count mode),
    picks m' row indices uniformly without replacement, and rewrites them
    per the adversary. gamma = 0 or adversary None returns an unchanged
    copy with an empty plan.
    """
    arr = as_dataset(data)
    n, d = arr.shape
    if not 0.0 <= gamma < 0.5:
        raise ValueError("gamma must lie in [0, 0.5)")
    if adversary is None or gamma == 0.0:
        return arr.copy(), CorruptionPlan(gamma=gamma, adversary=adversary)

    rng = np.random.default_rng(seed)
    m_prime = int(round(gamma * n)) if fixed_count else int(rng.binomial(n, gamma))
    if m_prime == 0:
        return arr.copy(), CorruptionPlan(gamma=gamma, adversary=adversary)

    center = np.broadcast_to(np.asarray(mu_true, dtype=float), (d,)).astype(float)
    out = arr.copy()

    if isinstance(adversary, SubtractiveOnly):
        indices = np.argsort(out[:, 0], kind="stable")[-m_prime:]
        keep = np.ones(n, dtype=bool)
        keep[indices] = False
        plan = CorruptionPlan(
            gamma=gamma,
            adversary=adversary,
            replaced_indices=sorted(int(i) for i in indices),
            m_prime=m_prime,
        )
        return out[keep], plan

    indices = rng.choice(n, size=m_prime, replace=False)
    if isinstance(adversary, ConstantCluster):
        point = center + _resolve_point(adversary.offset, d)
        out[indices] = point
    elif isinstance(adversary, DirectionalSpread):
        direction = (
            _resolve_point(1.0, d)
            if adversary.direction is None
            else as_vector(adversary.direction, dim=d)
        )
        direction = direction / np.linalg.norm(direction)
        base = center + adversary.magnitude * direction
        out[indices] = base + adversary.jitter * rng.standard_normal((m_prime, d))
    else:
        raise ValueError(f"unknown adversary {adversary!r}")

    plan = CorruptionPlan(
        gamma=gamma,
        adversary=adversary,
        replaced_indices=sorted(int(i) for i in indices),
        m_prime=m_prime,
    )
    return out, plan


def _gaussian_upper_tail(t: np.ndarray) -> np.ndarray:
    # P[N(0,1) >= t] via the complementary error function.
    return 0.5 * np.array([math.erfc(x / math.sqrt(2.0)) for x in np.atleast_1d(t)])


def goodness_check(
    data,
    mu_true,
    gamma: float,
    tau: float,
    n_directions: int = 200,
    seed: int = 0,
    *,
    c1: float = 3.0,
    t_grid=None,
) -> GoodnessReport:
    """Diagnostic: does an (uncorrupted) sample concentrate like its Gaussian?

    Condition 1: max_x ||x - mu|| <= c1 sqrt(d ln(n/tau)).
    Condition 2: for sampled unit directions v and a grid of T values, the
        empirical tail P[v.(x - mu) >= T] stays within
        gamma / (T^2 ln(d ln(d/(gamma tau)))) of the Gaussian tail. This
        quantifier is spot-checked over n_directions random directions, so
        a pass is evidence, not proof.
    Condition 3: ||mean(S) - mu|| <= gamma.
    Condition 4: ||M_S - I||_2 <= gamma, with M_S the second moment about mu.
    """
    arr = as_dataset(data)
    n, d = arr.shape
    mu = np.broadcast_to(np.asarray(mu_true, dtype=float), (d,)).astype(float)
    if not 0.0 < gamma < 0.5:
        raise ValueError("gamma must lie in (0, 0.5)")
    if not 0.0 < tau < 1.0:
        raise ValueError("tau must lie in (0, 1)")

    centered = arr - mu

    norms = np.linalg.norm(centered, axis=1)
    cond1_max = float(norms.max())
    cond1_limit = c1 * math.sqrt(d * math.log(n / tau))
    cond1_pass = cond1_max <= cond1_limit

    if t_grid is None:
        t_grid = np.linspace(0.5, 4.0, 8)
    t_grid = np.asarray(t_grid, dtype=float)
    inner = d * math.log(d / (gamma * tau))
    denom_log = math.log(inner) if inner > 1.0 else float("-inf")
    rng = np.random.default_rng(seed)
    directions = rng.standard_normal((n_directions, d))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    proj = centered @ directions.T  # (n, n_directions)
    theory = _gaussian_upper_tail(t_grid)
    worst_gap = 0.0
    cond2_pass = True
    for j, t in enumerate(t_grid):
        emp = (proj >= t).mean(axis=0)
        gaps = np.abs(emp - theory[j])
        worst_gap = max(worst_gap, float(gaps.max()))
        if denom_log > 0.0:
            bound = gamma / (t * t * denom_log)
            if (gaps > bound).any():
                cond2_pass = False
        # Nonpositive denominator makes the bound vacuous; condition 2 is
        # then reported on the gap value alone.

    cond3_err = float(np.linalg.norm(empirical_mean(arr) - mu))
    cond3_pass = cond3_err <= gamma

    moment = empirical_covariance(arr, mu)
    dev = moment - np.eye(d)
    hi = max_eigenpair(dev).value
    lo = max_eigenpair(-dev).value
    cond4_dev = max(hi, lo, 0.0)
    cond4_pass = cond4_dev <= gamma

    return GoodnessReport(
        cond1_max_norm=cond1_max,
        cond1_pass=cond1_pass,
        cond2_worst_gap=worst_gap,
        cond2_pass=cond2_pass,
        cond3_mean_error=cond3_err,
        cond3_pass=cond3_pass,
        cond4_cov_deviation=cond4_dev,
        cond4_pass=cond4_pass,
    )


def save_dataset_csv(data, path) -> None:
    """Write an (n, d) dataset as headerless CSV with round-trip decimals."""
    arr = as_dataset(data)
    with open(path, "w", encoding="ascii") as fh:
        for row in arr:
            fh.write(",".join(repr(float(x)) for x in row))
            fh.write("\n")


def load_dataset_csv(path) -> np.ndarray:
    """Read a headerless CSV dataset written by save_dataset_csv."""
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"dataset file not found: {p}")
    arr = np.loadtxt(p, delimiter=",", ndmin=2)
    return as_dataset(arr)
