"""Traversability risk: CVaR over per-cell terrain cost distributions.

Each cell's traversal cost is modeled as a capped lognormal-style draw with
mean mu: cost = min(mu * exp(sigma * z - sigma^2 / 2), cap_factor * mu) for
z ~ N(0, 1). The heavy tail makes the CVaR meaningfully exceed the mean; a
degenerate cell (sigma = 0) costs exactly mu.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .world import WorldModel, bresenham_line

Cell = tuple[int, int]

COST_CAP_FACTOR = 20.0


@dataclass
class RiskField:
    """Immutable per-cell cost distribution plus CVaR evaluation settings."""

    mu: np.ndarray
    sigma: np.ndarray
    alpha: float = 0.9
    sample_count: int = 64
    seed: int = 0
    cost_cap_factor: float = COST_CAP_FACTOR
    _edge_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha < 1.0):
            raise ValueError("alpha must be in (0, 1)")
        if self.sample_count < 1:
            raise ValueError("sample_count must be >= 1")
        if self.mu.shape != self.sigma.shape:
            raise ValueError("mu and sigma shapes differ")

    @classmethod
    def for_world(
        cls,
        world: WorldModel,
        alpha: float = 0.9,
        sample_count: int = 64,
        seed: int | None = None,
    ) -> "RiskField":
        return cls(
            mu=world.risk_mu,
            sigma=world.risk_sigma,
            alpha=alpha,
            sample_count=sample_count,
            seed=world.rng_seed if seed is None else seed,
        )

    def in_bounds(self, r: int, c: int) -> bool:
        return 0 <= r < self.mu.shape[0] and 0 <= c < self.mu.shape[1]


def cvar(samples, alpha: float) -> float:
    """Empirical CVaR: mean of the worst ceil((1 - alpha) * n) samples.

    Sorts descending and averages the top tail. The small epsilon guards the
    ceil against float slop in (1 - alpha) * n.
    """
    arr = np.asarray(samples, dtype=np.float64).ravel()
    if arr.size == 0:
        raise ValueError("cvar of empty sample set")
    if not (0.0 < alpha < 1.0):
        raise ValueError("alpha must be in (0, 1)")
    k = max(1, math.ceil((1.0 - alpha) * arr.size - 1e-9))
    tail = np.sort(arr)[::-1][:k]
    return float(tail.mean())


def sample_cell_costs(field: RiskField, cells: list[Cell], rng: np.random.Generator) -> np.ndarray:
    """Draw (len(cells), sample_count) cost samples from the cell distributions."""
    mu = np.array([field.mu[r, c] for r, c in cells], dtype=np.float64)[:, None]
    sigma = np.array([field.sigma[r, c] for r, c in cells], dtype=np.float64)[:, None]
    z = rng.standard_normal((len(cells), field.sample_count))
    costs = mu * np.exp(sigma * z - 0.5 * sigma * sigma)
    return np.minimum(costs, field.cost_cap_factor * mu)


def edge_risk(field: RiskField, from_cell: Cell, to_cell: Cell) -> float:
    """CVaR traversal risk for the segment between two cells.

    Per-draw segment cost is the sum of simultaneous per-cell draws along the
    Bresenham segment (both endpoints for a unit edge); the CVaR is then
    scaled to the segment's Euclidean length. Deterministic given the field
    seed and the (unordered) cell pair, so repeated planning cycles see
    identical edge risks.
    """
    a = (int(from_cell[0]), int(from_cell[1]))
    b = (int(to_cell[0]), int(to_cell[1]))
    if not field.in_bounds(*a) or not field.in_bounds(*b):
        raise ValueError(f"edge endpoints out of bounds: {a} -> {b}")
    if a == b:
        return 0.0
    key = (a, b) if a <= b else (b, a)
    cached = field._edge_cache.get(key)
    if cached is not None:
        return cached
    cells = bresenham_line(key[0][0], key[0][1], key[1][0], key[1][1])
    if all(field.mu[r, c] == 0.0 for r, c in cells):
        rho = 0.0
    else:
        seq = np.random.SeedSequence(
            [field.seed & 0xFFFFFFFFFFFFFFFF, key[0][0], key[0][1], key[1][0], key[1][1]]
        )
        rng = np.random.default_rng(seq)
        segment = sample_cell_costs(field, cells, rng).sum(axis=0)
        euclid = math.hypot(b[0] - a[0], b[1] - a[1])
        rho = cvar(segment, field.alpha) * euclid / (len(cells) - 1)
    field._edge_cache[key] = rho
    return rho


def policy_risk(policy, graph) -> float:
    """Accumulated risk of a policy: sum of its edge risks in order."""
    total = 0.0
    for u, v in policy.edge_sequence:
        edge = graph.get_edge(u, v)
        if edge is None:
            raise ValueError(f"policy references missing edge ({u}, {v})")
        total += edge.risk
    return total
