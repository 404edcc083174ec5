"""Coverage policy search: local receding-horizon walks, global frontier
selection, and the NBV / HFE baselines.

A policy is a walk over a roadmap graph. Rewards are collected per move:
coverage_weight times the entered node's info gain (zeroed on revisits within
the walk) minus distance_cost times the edge length, discounted by the scope's
gamma with the first move undiscounted.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .motion import astar, path_length
from .risk import RiskField, edge_risk, policy_risk
from .roadmap import FRONTIER, GLOBAL, LOCAL, ROBOT, RoadmapGraph, RoadmapNode
from .world import BeliefGrid, SensorSpec, visible_unknown_count

Cell = tuple[int, int]


@dataclass
class RewardModel:
    gamma_local: float = 0.95
    gamma_global: float = 0.9
    coverage_weight: float = 1.0
    distance_cost: float = 0.05  # per meter traveled

    def __post_init__(self) -> None:
        for g in (self.gamma_local, self.gamma_global):
            if not (0.0 < g <= 1.0):
                raise ValueError("discount factors must be in (0, 1]")

    def gamma_for(self, scope: str) -> float:
        return self.gamma_local if scope == LOCAL else self.gamma_global


@dataclass
class Policy:
    scope: str
    node_sequence: list[int]
    edge_sequence: list[tuple[int, int]]
    utility: float
    risk: float
    created_at: int = 0
    step_rewards: list[float] = field(default_factory=list)
    goal_pose: Cell | None = None
    path_cells: list[Cell] | None = None

    def to_dict(self) -> dict:
        return {
            "scope": self.scope,
            "nodes": list(self.node_sequence),
            "edges": [list(e) for e in self.edge_sequence],
            "utility": self.utility,
            "risk": self.risk,
            "created_at": self.created_at,
            "step_rewards": list(self.step_rewards),
            "goal_pose": list(self.goal_pose) if self.goal_pose else None,
        }


def step_reward(
    node: RoadmapNode,
    accumulated_visited: set[int],
    reward_model: RewardModel,
    edge_in,
) -> float:
    """Reward for stepping onto node: its gain (zeroed if already visited in
    this rollout) minus the travel cost of the incoming edge. Marks the node
    visited in the accumulator."""
    gain = 0.0 if node.id in accumulated_visited else node.info_gain
    accumulated_visited.add(node.id)
    length = edge_in.length if edge_in is not None else 0.0
    return reward_model.coverage_weight * gain - reward_model.distance_cost * length


def discounted_utility(step_rewards, gamma: float) -> float:
    """Discounted sum of per-step rewards; the first step carries gamma^0."""
    return float(sum(r * gamma ** t for t, r in enumerate(step_rewards)))


def rollout_walk(
    graph: RoadmapGraph,
    node_ids: list[int],
    reward_model: RewardModel,
    scope: str,
) -> tuple[float, list[float]]:
    """Utility and per-move rewards of a concrete walk (first node is free)."""
    visited = {node_ids[0]}
    rewards = []
    for u, v in zip(node_ids, node_ids[1:]):
        edge = graph.get_edge(u, v)
        if edge is None:
            raise ValueError(f"walk uses missing edge ({u}, {v})")
        rewards.append(step_reward(graph.nodes[v], visited, reward_model, edge))
    return discounted_utility(rewards, reward_model.gamma_for(scope)), rewards


def plan_local(
    local_graph: RoadmapGraph,
    reward_model: RewardModel,
    horizon: int = 10,
    budget: int = 20000,
    created_at: int = 0,
) -> Policy | None:
    """Best-utility walk of at most `horizon` nodes from the robot node.

    Bounded best-first search over walks with revisit gain zeroing. The
    search is exhaustive whenever the walk space fits within the expansion
    budget; an optimistic remaining-gain bound prunes hopeless branches
    without affecting exactness. Returns None when no walk with at least one
    move has positive utility (nothing locally worth covering)."""
    robot = local_graph.robot_node()
    if robot is None:
        raise ValueError("local graph has no robot node")
    gamma = reward_model.gamma_for(LOCAL)
    w = reward_model.coverage_weight
    total_gain = local_graph.total_info_gain()

    best_utility = 0.0
    best_walk: list[int] | None = None
    # heap entries: (-utility, walk, utility, remaining_gain, visited)
    root_rem = total_gain - robot.info_gain
    heap: list[tuple[float, tuple[int, ...], float, float, frozenset[int]]] = [
        (0.0, (robot.id,), 0.0, root_rem, frozenset([robot.id]))
    ]
    expansions = 0
    while heap and expansions < budget:
        neg_u, walk, utility, rem_gain, visited = heapq.heappop(heap)
        expansions += 1
        if len(walk) > 1 and utility > best_utility:
            best_utility = utility
            best_walk = list(walk)
        if len(walk) >= horizon:
            continue
        if utility + w * rem_gain <= best_utility:
            continue
        depth = len(walk) - 1  # moves taken so far
        cur = walk[-1]
        for nb in local_graph.neighbors(cur):
            edge = local_graph.get_edge(cur, nb)
            node = local_graph.nodes[nb]
            first_visit = nb not in visited
            gain = node.info_gain if first_visit else 0.0
            reward = w * gain - reward_model.distance_cost * edge.length
            new_u = utility + (gamma ** depth) * reward
            new_rem = rem_gain - gain
            if new_u + w * new_rem <= best_utility:
                continue
            heapq.heappush(heap, (
                -new_u,
                walk + (nb,),
                new_u,
                new_rem,
                visited | {nb} if first_visit else visited,
            ))

    if best_walk is None or best_utility <= 0.0:
        return None
    edges = list(zip(best_walk, best_walk[1:]))
    utility, rewards = rollout_walk(local_graph, best_walk, reward_model, LOCAL)
    policy = Policy(
        scope=LOCAL,
        node_sequence=best_walk,
        edge_sequence=edges,
        utility=utility,
        risk=policy_risk_over(local_graph, edges),
        created_at=created_at,
        step_rewards=rewards,
        goal_pose=local_graph.nodes[best_walk[-1]].pose,
        path_cells=[local_graph.nodes[i].pose for i in best_walk],
    )
    return policy


def policy_risk_over(graph: RoadmapGraph, edges: list[tuple[int, int]]) -> float:
    total = 0.0
    for u, v in edges:
        e = graph.get_edge(u, v)
        if e is None:
            raise ValueError(f"missing edge ({u}, {v})")
        total += e.risk
    return total


def _shortest_paths(graph: RoadmapGraph, source: int):
    """Dijkstra by metric length plus BFS hop counts from source."""
    dist = {source: 0.0}
    parent: dict[int, int] = {}
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist.get(u, math.inf):
            continue
        for v in graph.neighbors(u):
            edge = graph.get_edge(u, v)
            nd = d + edge.length
            if nd < dist.get(v, math.inf):
                dist[v] = nd
                parent[v] = u
                heapq.heappush(heap, (nd, v))
    hops = {source: 0}
    from collections import deque

    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in graph.neighbors(u):
            if v not in hops:
                hops[v] = hops[u] + 1
                queue.append(v)
    return dist, parent, hops


def _path_from_parents(parent: dict[int, int], source: int, target: int) -> list[int]:
    path = [target]
    while path[-1] != source:
        path.append(parent[path[-1]])
    return path[::-1]


def plan_global(
    global_graph: RoadmapGraph,
    reward_model: RewardModel,
    robot_node: int,
    horizon: int = 20,
    created_at: int = 0,
) -> Policy | None:
    """Pick the best frontier by discounted gain minus travel cost.

    Each frontier scores gamma_global^hops * coverage_weight * gain minus
    distance_cost times its shortest-path distance; hops beyond the horizon
    disqualify a frontier and disconnected frontiers are skipped. Returns the
    shortest-path policy to the argmax frontier (ties to the lowest node id),
    or None when no frontier qualifies."""
    if robot_node not in global_graph.nodes:
        raise ValueError(f"robot node {robot_node} not in global graph")
    frontiers = global_graph.nodes_of_kind(FRONTIER)
    if not frontiers:
        return None
    dist, parent, hops = _shortest_paths(global_graph, robot_node)
    gamma = reward_model.gamma_for(GLOBAL)
    best: tuple[float, int] | None = None
    for node in frontiers:
        if node.id not in dist or node.id == robot_node:
            continue
        if hops[node.id] > horizon:
            continue
        utility = (
            gamma ** hops[node.id] * reward_model.coverage_weight * node.info_gain
            - reward_model.distance_cost * dist[node.id]
        )
        if best is None or utility > best[0]:
            best = (utility, node.id)
    if best is None:
        return None
    utility, target = best
    nodes = _path_from_parents(parent, robot_node, target)
    edges = list(zip(nodes, nodes[1:]))
    return Policy(
        scope=GLOBAL,
        node_sequence=nodes,
        edge_sequence=edges,
        utility=utility,
        risk=policy_risk_over(global_graph, edges),
        created_at=created_at,
        step_rewards=[],
        goal_pose=global_graph.nodes[target].pose,
    )


def plan_nbv(
    belief: BeliefGrid,
    risk_field: RiskField,
    robot_pose: Cell,
    samples: int = 10,
    rng: np.random.Generator | None = None,
    radius: float = 8.0,
    sensor: SensorSpec | None = None,
    reward_model: RewardModel | None = None,
    risk_weight: float = 1.0,
    created_at: int = 0,
) -> Policy | None:
    """Next-best-view baseline: sample viewpoints near the robot, plan an A*
    path to each, score by gain minus travel cost, keep the argmax. Returns
    None when no reachable viewpoint scores positive."""
    sensor = sensor or SensorSpec()
    reward_model = reward_model or RewardModel()
    rng = rng or np.random.default_rng(0)
    robot_pose = (int(robot_pose[0]), int(robot_pose[1]))
    radius_cells = radius / belief.cell_size
    free = np.argwhere(belief.state == 1)  # KNOWN_FREE
    if len(free) == 0:
        return None
    d = np.hypot(free[:, 0] - robot_pose[0], free[:, 1] - robot_pose[1])
    pool = free[(d <= radius_cells) & (d > 0)]
    if len(pool) == 0:
        return None
    pool = pool[np.lexsort((pool[:, 1], pool[:, 0]))]
    count = min(samples, len(pool))
    picks = rng.choice(len(pool), size=count, replace=False)
    cell_area = belief.cell_size * belief.cell_size

    best_score = 0.0
    best: tuple[list[Cell], Cell] | None = None
    for idx in sorted(picks):
        vp = (int(pool[idx][0]), int(pool[idx][1]))
        path = astar(belief, risk_field, robot_pose, vp, risk_weight)
        if path is None:
            continue
        gain = visible_unknown_count(belief, vp, sensor) * cell_area
        score = (
            reward_model.coverage_weight * gain
            - reward_model.distance_cost * path_length(path, belief.cell_size)
        )
        if score > best_score:
            best_score = score
            best = (path, vp)
    if best is None:
        return None
    path, vp = best
    nodes = list(range(len(path)))
    edges = list(zip(nodes, nodes[1:]))
    total_risk = sum(edge_risk(risk_field, a, b) for a, b in zip(path, path[1:]))
    return Policy(
        scope=LOCAL,
        node_sequence=nodes,
        edge_sequence=edges,
        utility=best_score,
        risk=total_risk,
        created_at=created_at,
        step_rewards=[],
        goal_pose=vp,
        path_cells=path,
    )


def plan_hfe(
    global_graph: RoadmapGraph,
    reward_model: RewardModel,
    robot_node: int,
    created_at: int = 0,
) -> Policy | None:
    """Greedy frontier baseline: one-step look-ahead score gain minus travel
    cost, no discounting and no switching logic."""
    if robot_node not in global_graph.nodes:
        raise ValueError(f"robot node {robot_node} not in global graph")
    frontiers = global_graph.nodes_of_kind(FRONTIER)
    if not frontiers:
        return None
    dist, parent, _hops = _shortest_paths(global_graph, robot_node)
    best: tuple[float, int] | None = None
    for node in frontiers:
        if node.id not in dist or node.id == robot_node:
            continue
        score = (
            reward_model.coverage_weight * node.info_gain
            - reward_model.distance_cost * dist[node.id]
        )
        if best is None or score > best[0]:
            best = (score, node.id)
    if best is None:
        return None
    score, target = best
    nodes = _path_from_parents(parent, robot_node, target)
    edges = list(zip(nodes, nodes[1:]))
    return Policy(
        scope=GLOBAL,
        node_sequence=nodes,
        edge_sequence=edges,
        utility=score,
        risk=policy_risk_over(global_graph, edges),
        created_at=created_at,
        step_rewards=[],
        goal_pose=global_graph.nodes[target].pose,
    )
