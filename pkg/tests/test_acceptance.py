"""Acceptance suite: every criterion runs end-to-end at its stated tolerance
and prints one PASS line (visible with pytest -s; implied by a green run)."""
import heapq
import itertools
import math
import time

import numpy as np
import pytest

from gridexplore import world as gw
from gridexplore.harness import (
    RunConfig, SwitchSettings, WorldSpec, events_to_ndjson, run_episode,
)
from gridexplore.motion import PathPair, astar, path_cost
from gridexplore.planners import Policy, RewardModel, plan_local
from gridexplore.risk import RiskField, edge_risk
from gridexplore.roadmap import GLOBAL, LOCAL
from gridexplore.scenarios import scenario_regressions
from gridexplore.switching import (
    Candidate, HistoryWindow, SwitchConfig, decide, execution_score,
)
from gridexplore.world import BeliefGrid

SQRT2 = math.sqrt(2.0)


def batch_config(gen, params, planner, seed, budget=600):
    return RunConfig(
        world=WorldSpec(generator=gen, seed=seed, params=params),
        planner=planner, step_budget=budget, nbv_samples=20,
        min_frontier_cluster=1, horizon_global=40,
    )


def report(line):
    print(f"\n[ACCEPTANCE] {line}")


# -- 1. ordering reproduction: maze ------------------------------------------------

def test_criterion_1_maze_ordering():
    params = {"width": 51, "height": 51, "deadend_fraction": 1.0}
    seeds = range(20)
    coverage = {p: [] for p in ("MLDM", "HCP", "NBV")}
    t_total = time.perf_counter()
    slowest = 0.0
    for seed in seeds:
        for planner in coverage:
            t0 = time.perf_counter()
            rec = run_episode(batch_config("maze", params, planner, seed))
            slowest = max(slowest, time.perf_counter() - t0)
            coverage[planner].append(rec.final_coverage_m2)
    total = time.perf_counter() - t_total

    wins = sum(1 for m, h in zip(coverage["MLDM"], coverage["HCP"]) if m >= h)
    mean_mldm = float(np.mean(coverage["MLDM"]))
    mean_nbv = float(np.mean(coverage["NBV"]))
    ratio = mean_mldm / mean_nbv
    assert wins >= 0.7 * len(list(seeds)), f"MLDM >= HCP in only {wins}/20 seeds"
    assert ratio >= 1.5, f"MLDM/NBV coverage ratio {ratio:.2f} < 1.5"
    assert slowest < 60.0, f"slowest episode {slowest:.1f}s"
    assert total < 30 * 60, f"total batch time {total:.0f}s"
    report(f"criterion 1 maze ordering: PASS "
           f"(MLDM>=HCP {wins}/20, MLDM/NBV={ratio:.2f}, "
           f"slowest episode {slowest:.1f}s, total {total:.0f}s)")


# -- 2. ordering reproduction: subway ----------------------------------------------

def test_criterion_2_subway_ordering():
    params = {"rooms": 5}
    coverage = {p: [] for p in ("MLDM", "HCP", "NBV")}
    for seed in range(20):
        for planner in coverage:
            rec = run_episode(batch_config("subway", params, planner, seed))
            coverage[planner].append(rec.final_coverage_m2)
    mean_mldm = float(np.mean(coverage["MLDM"]))
    mean_hcp = float(np.mean(coverage["HCP"]))
    mean_nbv = float(np.mean(coverage["NBV"]))
    gap = abs(mean_mldm - mean_hcp) / max(mean_mldm, mean_hcp)
    assert gap <= 0.10, f"MLDM/HCP mean coverage gap {gap:.1%} > 10%"
    assert mean_mldm >= mean_nbv and mean_hcp >= mean_nbv
    report(f"criterion 2 subway ordering: PASS "
           f"(MLDM={mean_mldm:.0f}, HCP={mean_hcp:.0f}, NBV={mean_nbv:.0f}, "
           f"gap={gap:.1%})")


# -- 3. A* oracle equivalence --------------------------------------------------------

def _oracle_dijkstra(belief, mu, start, goal, risk_weight, cs):
    h, w = belief.state.shape

    def is_free(r, c):
        return 0 <= r < h and 0 <= c < w and belief.state[r, c] == gw.KNOWN_FREE

    best = {start: 0.0}
    parent = {}
    heap = [(0.0, start)]
    while heap:
        d, cell = heapq.heappop(heap)
        if d > best.get(cell, math.inf):
            continue
        if cell == goal:
            path = [cell]
            while path[-1] != start:
                path.append(parent[path[-1]])
            return path[::-1]
        r, c = cell
        moves = [((r + dr, c + dc), 1.0)
                 for dr, dc in ((1, 0), (-1, 0), (0, 1), (0, -1))]
        for dr, dc in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
            if is_free(r + dr, c) and is_free(r, c + dc):
                moves.append(((r + dr, c + dc), SQRT2))
        for nb, steps in moves:
            if not is_free(*nb):
                continue
            nd = d + steps * cs + risk_weight * mu[nb]
            if nd < best.get(nb, math.inf):
                best[nb] = nd
                parent[nb] = cell
                heapq.heappush(heap, (nd, nb))
    return None


def _oracle_cost(path, mu, risk_weight, cs):
    straight = sum(1 for a, b in zip(path, path[1:]) if a[0] == b[0] or a[1] == b[1])
    diag = len(path) - 1 - straight
    return (straight * cs + diag * (cs * SQRT2)
            + risk_weight * math.fsum(mu[b] for b in path[1:]))


def test_criterion_3_astar_equals_dijkstra():
    rng = np.random.default_rng(2024)
    cs = 0.5
    t0 = time.perf_counter()
    solved = 0
    for trial in range(100):
        occ = (rng.random((20, 20)) < 0.3).astype(np.uint8)
        occ[0, 0] = occ[19, 19] = gw.FREE
        state = np.where(occ == gw.OBSTACLE, gw.KNOWN_OBSTACLE,
                         gw.KNOWN_FREE).astype(np.uint8)
        belief = BeliefGrid(state=state, covered=np.zeros((20, 20), dtype=bool),
                            cell_size=cs)
        risk_weight = float(rng.choice([0.0, 1.0]))
        mu = rng.uniform(0, 1, size=(20, 20)) if risk_weight else np.zeros((20, 20))
        field = RiskField(mu=mu, sigma=np.zeros((20, 20)))
        got = astar(belief, field, (0, 0), (19, 19), risk_weight)
        want = _oracle_dijkstra(belief, mu, (0, 0), (19, 19), risk_weight, cs)
        if want is None:
            assert got is None
            continue
        solved += 1
        got_cost = path_cost(got, field, cs, risk_weight)
        want_cost = _oracle_cost(want, mu, risk_weight, cs)
        assert got_cost == want_cost, f"trial {trial}: {got_cost!r} != {want_cost!r}"
    elapsed = time.perf_counter() - t0
    assert elapsed < 5.0, f"A* suite took {elapsed:.2f}s"
    report(f"criterion 3 A* oracle: PASS "
           f"(100 grids, {solved} solvable, exact cost match, {elapsed:.2f}s)")


# -- 4. utility oracle equivalence ----------------------------------------------------

def _enumerate_best(graph, rm, horizon):
    robot = graph.robot_node()
    best = 0.0

    def walk_utility(walk):
        gamma = rm.gamma_local
        seen = {walk[0]}
        total = 0.0
        for t, (u, v) in enumerate(zip(walk, walk[1:])):
            edge = graph.get_edge(u, v)
            gain = graph.nodes[v].info_gain if v not in seen else 0.0
            seen.add(v)
            total += gamma ** t * (rm.coverage_weight * gain
                                   - rm.distance_cost * edge.length)
        return total

    def recurse(walk):
        nonlocal best
        if len(walk) > 1:
            best = max(best, walk_utility(walk))
        if len(walk) >= horizon:
            return
        for nb in graph.neighbors(walk[-1]):
            recurse(walk + [nb])

    recurse([robot.id])
    return best


def test_criterion_4_plan_local_matches_enumeration():
    from gridexplore.roadmap import RoadmapGraph, RoadmapNode, ROBOT, LATTICE

    rng = np.random.default_rng(99)
    rm = RewardModel()
    worst = 0.0
    for trial in range(50):
        n = int(rng.integers(3, 9))
        g = RoadmapGraph(scope=LOCAL, horizon=4)
        g.add_node(RoadmapNode(id=0, pose=(0, 0), kind=ROBOT, info_gain=0.0))
        for i in range(1, n):
            g.add_node(RoadmapNode(id=i, pose=(0, i), kind=LATTICE,
                                   info_gain=float(rng.uniform(0, 3))))
        for i in range(1, n):
            g.add_edge(i - 1, i, length=float(rng.uniform(0.3, 1.5)), risk=0.0)
        for _ in range(n):
            u, v = sorted(rng.integers(0, n, size=2))
            if u != v and g.get_edge(int(u), int(v)) is None:
                g.add_edge(int(u), int(v), length=float(rng.uniform(0.3, 1.5)), risk=0.0)
        horizon = int(rng.integers(2, 5))
        policy = plan_local(g, rm, horizon=horizon, budget=10_000_000)
        best = _enumerate_best(g, rm, horizon)
        got = policy.utility if policy is not None else 0.0
        if policy is None:
            assert best <= 1e-12
        else:
            worst = max(worst, abs(got - best))
            assert abs(got - best) <= 1e-9, f"trial {trial}: {got} vs {best}"
    report(f"criterion 4 utility oracle: PASS (50 graphs, max |dU|={worst:.2e})")


# -- 5. decision table vs straight-line reference --------------------------------------

def _reference_algorithm(local, glob, j_max, d_max, eps_j, eps_d):
    """Line-by-line transcription of the switching rule used as an oracle."""
    scores = {}
    for name, cand in (("local", local), ("global", glob)):
        if cand is None:
            continue
        p_hat = cand["h"] / (max(cand["J"], eps_j) * max(cand["D"], eps_d))
        scores[name] = p_hat * cand["U"]
    if "local" in scores and scores["local"] >= scores.get("global", -math.inf):
        selected = "local"
    else:
        selected = "global"
    chosen_cand = local if selected == "local" else glob
    if chosen_cand["J"] > j_max or chosen_cand["D"] > d_max:
        reason = "J_exceeded" if chosen_cand["J"] > j_max else "D_exceeded"
        opposite = "global" if selected == "local" else "local"
        opposite_cand = glob if selected == "local" else local
        chosen = opposite if opposite_cand is not None else selected
        return chosen, True, reason
    return selected, False, "none"


def _candidate(scope, utility, risk, disc):
    policy = Policy(scope=scope, node_sequence=[0], edge_sequence=[],
                    utility=utility, risk=risk)
    ref = np.zeros((2, 2))
    return Candidate(policy=policy,
                     path_pair=PathPair(ref, ref.copy(), disc))


def _window(h_local, h_global, width=10):
    w = HistoryWindow(width)
    for i in range(width):
        w.record(LOCAL, i < h_local)
        w.record(GLOBAL, i < h_global)
    return w


def _run_decide(h_l, j_l, d_l, u_l, h_g, j_g, d_g, u_g, cfg):
    w = _window(h_l, h_g)
    local = _candidate(LOCAL, u_l, j_l, d_l)
    glob = _candidate(GLOBAL, u_g, j_g, d_g)
    d = decide(local, glob, w, cfg)
    ref = _reference_algorithm(
        {"h": h_l, "J": j_l, "D": d_l, "U": u_l},
        {"h": h_g, "J": j_g, "D": d_g, "U": u_g},
        cfg.j_max, cfg.d_max, cfg.epsilon_j, cfg.epsilon_d,
    )
    assert (d.chosen, d.override_fired, d.override_reason) == ref, (
        f"inputs {(h_l, j_l, d_l, u_l, h_g, j_g, d_g, u_g)}: "
        f"{(d.chosen, d.override_fired, d.override_reason)} != {ref}"
    )


def test_criterion_5_decision_table():
    cfg = SwitchConfig(j_max=2.0, d_max=2.0)

    # the four documented examples
    # 1: local score 5, global 3, both clean -> local without override
    w = _window(5, 1)
    d = decide(_candidate(LOCAL, 1.0, 1.0, 1.0), _candidate(GLOBAL, 3.0, 1.0, 1.0),
               w, SwitchConfig(j_max=10, d_max=10))
    assert (d.chosen, d.override_fired) == (LOCAL, False)
    # 2: local wins argmax but violates J -> global with J_exceeded
    d = decide(_candidate(LOCAL, 10.0, 5.0, 1.0), _candidate(GLOBAL, -0.5, 0.1, 1.0),
               _window(5, 5), SwitchConfig(j_max=2.0, d_max=10.0))
    assert (d.chosen, d.override_fired, d.override_reason) == (GLOBAL, True, "J_exceeded")
    # 3: only a global candidate, clean -> global
    d = decide(None, _candidate(GLOBAL, 2.0, 0.5, 0.5), _window(0, 3),
               SwitchConfig(j_max=10, d_max=10))
    assert (d.chosen, d.override_fired) == (GLOBAL, False)
    # 4: equal scores -> local by tie-break
    d = decide(_candidate(LOCAL, 2.0, 1.0, 1.0), _candidate(GLOBAL, 2.0, 1.0, 1.0),
               _window(5, 5), SwitchConfig(j_max=10, d_max=10))
    assert d.chosen == LOCAL

    # exhaustive low/mid/high grid per factor and scope
    h_vals = (0, 3, 8)
    j_vals = (0.1, 1.0, 5.0)
    d_vals = (0.05, 1.0, 4.0)
    count = 0
    for h_l, j_l, d_l, h_g, j_g, d_g in itertools.product(
            h_vals, j_vals, d_vals, h_vals, j_vals, d_vals):
        _run_decide(h_l, j_l, d_l, 4.0, h_g, j_g, d_g, 5.0, cfg)
        count += 1
    assert count == 729
    report(f"criterion 5 decision table: PASS (4 examples + {count}-cell grid)")


# -- 6. monotonicity and scale invariance ----------------------------------------------

def test_criterion_6_monotonicity_and_scale():
    rng = np.random.default_rng(6)
    cfg = SwitchConfig(j_max=1e12, d_max=1e12)
    violations = 0
    for _ in range(1000):
        h = int(rng.integers(0, 11))
        j = float(rng.uniform(0, 6))
        d = float(rng.uniform(0, 6))
        u = float(rng.uniform(0, 10))
        score = execution_score(h, j, d, cfg) * u
        j_up = execution_score(h, j + float(rng.uniform(0.01, 3)), d, cfg) * u
        d_up = execution_score(h, j, d + float(rng.uniform(0.01, 3)), cfg) * u
        h_up = execution_score(h + 1, j, d, cfg) * u
        if j_up > score + 1e-12 or d_up > score + 1e-12 or h_up < score - 1e-12:
            violations += 1

        # argmax scale invariance on a random candidate pair
        u_l, u_g = (float(x) for x in rng.uniform(-5, 10, size=2))
        w = _window(int(rng.integers(1, 10)), int(rng.integers(1, 10)))
        l1 = _candidate(LOCAL, u_l, j, d)
        g1 = _candidate(GLOBAL, u_g, float(rng.uniform(0, 6)), float(rng.uniform(0, 6)))
        k = float(rng.uniform(0.05, 50))
        l2 = _candidate(LOCAL, u_l * k, l1.risk, l1.discrepancy)
        g2 = _candidate(GLOBAL, u_g * k, g1.risk, g1.discrepancy)
        if decide(l1, g1, w, cfg).chosen != decide(l2, g2, w, cfg).chosen:
            violations += 1
    assert violations == 0, f"{violations} violations in 1000 perturbation pairs"
    report("criterion 6 monotonicity suite: PASS (1000 pairs, 0 violations)")


# -- 7. CVaR oracle ----------------------------------------------------------------------

def test_criterion_7_edge_risk_vs_brute_force():
    rng = np.random.default_rng(7)
    worst_rel = 0.0
    for trial in range(50):
        mu_a, mu_b = (float(x) for x in rng.uniform(0.2, 2.0, size=2))
        sg_a, sg_b = (float(x) for x in rng.uniform(0.05, 0.8, size=2))
        mu = np.zeros((1, 2))
        sigma = np.zeros((1, 2))
        mu[0, 0], mu[0, 1] = mu_a, mu_b
        sigma[0, 0], sigma[0, 1] = sg_a, sg_b
        field = RiskField(mu=mu, sigma=sigma, alpha=0.9,
                          sample_count=200_000, seed=trial)
        value = edge_risk(field, (0, 0), (0, 1))

        z = rng.standard_normal((2, 1_000_000))
        costs = (np.minimum(mu_a * np.exp(sg_a * z[0] - sg_a**2 / 2), 20 * mu_a)
                 + np.minimum(mu_b * np.exp(sg_b * z[1] - sg_b**2 / 2), 20 * mu_b))
        ordered = np.sort(costs)[::-1]
        k = max(1, math.ceil(0.1 * len(ordered) - 1e-9))
        oracle = float(ordered[:k].mean())
        rel = abs(value - oracle) / oracle
        worst_rel = max(worst_rel, rel)
        assert rel <= 0.02, f"trial {trial}: rel error {rel:.3%}"
    report(f"criterion 7 CVaR oracle: PASS (50 cells, worst rel err {worst_rel:.3%})")


# -- 8. scenario regressions ----------------------------------------------------------------

def test_criterion_8_scenario_regressions():
    results = scenario_regressions()
    for res in results:
        assert res.passed, f"{res.name}: {res.details}"
    a, b = results
    assert a.details["mldm_early_local_switches"] >= 1
    assert a.details["hcp_early_local_switches"] == 0
    assert b.details["mldm_risk_overrides"] >= 1
    assert b.details["hcp_overrides"] == 0
    report("criterion 8 scenario regressions: PASS "
           f"(switchback {a.details['mldm_early_local_switches']} switches, "
           f"riskpocket {b.details['mldm_risk_overrides']} overrides)")


# -- 9. determinism ----------------------------------------------------------------------

def test_criterion_9_byte_identical_event_logs(tmp_path):
    cfg = batch_config("maze", {"width": 31, "height": 31}, "MLDM", seed=5,
                       budget=200)
    rec1 = run_episode(cfg, out_dir=str(tmp_path / "a"))
    rec2 = run_episode(cfg, out_dir=str(tmp_path / "b"))
    bytes_a = (tmp_path / "a" / "events.ndjson").read_bytes()
    bytes_b = (tmp_path / "b" / "events.ndjson").read_bytes()
    assert bytes_a == bytes_b
    assert events_to_ndjson(rec1.events) == events_to_ndjson(rec2.events)

    cave = batch_config("cave", {"width": 41, "height": 41, "risk_intensity": 0.8},
                        "MLDM", seed=3, budget=150)
    r1 = run_episode(cave)
    r2 = run_episode(cave)
    assert events_to_ndjson(r1.events) == events_to_ndjson(r2.events)
    report("criterion 9 determinism: PASS (byte-identical event logs, 2 configs)")
