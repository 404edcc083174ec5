"""Risk-aware switching between the local and global coverage policies.

Each planning cycle scores every available candidate policy by an
unnormalized execution-success factor times its discounted utility:

    score = found_count / (max(risk, eps) * max(discrepancy, eps)) * utility

where found_count is how many recent cycles produced a policy for that scope,
risk is the policy's accumulated edge risk, and discrepancy is the gap between
its reference path and the turn-rate-limited path. The argmax wins, except
that a winner whose risk or discrepancy exceeds its threshold is overridden
in favor of the opposite scope.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .motion import PathPair
from .planners import Policy
from .risk import RiskField, edge_risk
from .roadmap import GLOBAL, LOCAL
from .world import WorldModel

SCOPES = (LOCAL, GLOBAL)

OVERRIDE_NONE = "none"
OVERRIDE_RISK = "J_exceeded"
OVERRIDE_DISCREPANCY = "D_exceeded"


class NoPolicyError(RuntimeError):
    """Neither a local nor a global candidate exists this cycle."""


@dataclass
class SwitchConfig:
    j_max: float = 1.0
    d_max: float = 2.0
    window: int = 10
    epsilon_j: float = 1e-3
    epsilon_d: float = 1e-3

    def __post_init__(self) -> None:
        for name in ("j_max", "d_max", "window", "epsilon_j", "epsilon_d"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")


class HistoryWindow:
    """Per-scope ring buffers of plan outcomes over the trailing W cycles."""

    def __init__(self, window: int = 10):
        if window < 1:
            raise ValueError("window must be >= 1")
        self.window = window
        self._buffers: dict[str, deque[bool]] = {
            scope: deque(maxlen=window) for scope in SCOPES
        }

    def record(self, scope: str, found: bool) -> None:
        self._buffers[scope].append(bool(found))

    def found_count(self, scope: str) -> int:
        return sum(self._buffers[scope])

    def as_dict(self) -> dict:
        return {scope: [int(v) for v in buf] for scope, buf in self._buffers.items()}


def record_plan_outcome(window: HistoryWindow, scope: str, found: bool) -> HistoryWindow:
    """Push one plan outcome, evicting beyond the window length."""
    window.record(scope, found)
    return window


def execution_score(
    found_count: int,
    risk: float,
    discrepancy: float,
    config: SwitchConfig,
) -> float:
    """Unnormalized probability-of-execution factor: h / (J * D) with epsilon
    floors so riskless straight-line candidates stay finite."""
    if found_count < 0 or risk < 0 or discrepancy < 0:
        raise ValueError("execution score inputs must be nonnegative")
    return found_count / (
        max(risk, config.epsilon_j) * max(discrepancy, config.epsilon_d)
    )


@dataclass
class Candidate:
    """One scope's policy plus the reference/executed path pair used for its
    discrepancy factor."""

    policy: Policy
    path_pair: PathPair

    @property
    def scope(self) -> str:
        return self.policy.scope

    @property
    def utility(self) -> float:
        return self.policy.utility

    @property
    def risk(self) -> float:
        return self.policy.risk

    @property
    def discrepancy(self) -> float:
        return self.path_pair.discrepancy


@dataclass
class SwitchDecision:
    cycle: int
    chosen: str
    candidates: dict[str, dict] = field(default_factory=dict)
    override_fired: bool = False
    override_reason: str = OVERRIDE_NONE


def decide(
    local_candidate: Candidate | None,
    global_candidate: Candidate | None,
    window: HistoryWindow,
    config: SwitchConfig,
    cycle: int = 0,
) -> SwitchDecision:
    """Select the policy scope for this cycle.

    Scores every present candidate, takes the argmax (ties prefer local),
    then applies the threshold overrides: a winner whose risk exceeds j_max or
    whose discrepancy exceeds d_max is swapped for the opposite scope. When
    the opposite scope has no candidate the violating winner is kept but
    flagged, since halting exploration is worse than executing a flagged
    policy.
    """
    if local_candidate is None and global_candidate is None:
        raise NoPolicyError("no candidate policy in either scope")

    entries: dict[str, dict] = {}
    for cand in (local_candidate, global_candidate):
        if cand is None:
            continue
        h = window.found_count(cand.scope)
        p = execution_score(h, cand.risk, cand.discrepancy, config)
        entries[cand.scope] = {
            "utility": cand.utility,
            "found_count": h,
            "risk": cand.risk,
            "discrepancy": cand.discrepancy,
            "execution_score": p,
            "score": p * cand.utility,
        }

    def score_of(scope: str) -> float:
        return entries[scope]["score"] if scope in entries else -math.inf

    selected = LOCAL if score_of(LOCAL) >= score_of(GLOBAL) else GLOBAL
    chosen = selected
    fired = False
    reason = OVERRIDE_NONE
    info = entries[selected]
    if info["risk"] > config.j_max or info["discrepancy"] > config.d_max:
        fired = True
        reason = OVERRIDE_RISK if info["risk"] > config.j_max else OVERRIDE_DISCREPANCY
        opposite = GLOBAL if selected == LOCAL else LOCAL
        if opposite in entries:
            chosen = opposite
    return SwitchDecision(
        cycle=cycle,
        chosen=chosen,
        candidates=entries,
        override_fired=fired,
        override_reason=reason,
    )


def explain(decision: SwitchDecision) -> dict:
    """Full factor breakdown as a JSON-ready record."""
    return {
        "cycle": decision.cycle,
        "chosen": decision.chosen,
        "candidates": {
            scope: dict(info) for scope, info in sorted(decision.candidates.items())
        },
        "override_fired": decision.override_fired,
        "override_reason": decision.override_reason,
    }


def calibrate_j_max(
    world: WorldModel,
    risk_field: RiskField,
    horizon: int = 10,
    n_samples: int = 200,
    percentile: float = 95.0,
    seed: int = 0,
) -> float:
    """Risk threshold from the world itself: the given percentile of edge-risk
    sums over random straight horizon-length paths, floored away from zero.
    Run once per episode so the threshold matches the field's risk scale."""
    rng = np.random.default_rng(np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, 0x4A]))
    h, w = world.height, world.width
    sums = []
    dirs = ((0, 1), (1, 0), (0, -1), (-1, 0))
    for _ in range(n_samples):
        r = int(rng.integers(0, h))
        c = int(rng.integers(0, w))
        dr, dc = dirs[int(rng.integers(0, 4))]
        total = 0.0
        cur = (r, c)
        for _step in range(max(horizon - 1, 1)):
            nxt = (cur[0] + dr, cur[1] + dc)
            if not (0 <= nxt[0] < h and 0 <= nxt[1] < w):
                break
            total += edge_risk(risk_field, cur, nxt)
            cur = nxt
        sums.append(total)
    value = float(np.percentile(np.asarray(sums), percentile)) if sums else 0.0
    return max(value, 1e-3)
