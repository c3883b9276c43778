"""Shared generators and independent reference oracles for the test suite."""

from __future__ import annotations

import itertools
import random

import networkx as nx

from divmatch.instance import (CostModel, Feature, FeatureSchema, Instance,
                               Team, TradeoffWeights)
from divmatch.negcycle import SimpleDigraph


def random_small_instance(seed, max_n=10, max_t=3, max_features=3,
                          max_columns=4, max_cost=9,
                          lambda_choices=(1, 1, 2, 3), max_lambda0=2,
                          worker_fraction=0.25):
    """Random instance within the small-scale envelope: n workers drawn from
    at most ``max_columns`` distinct feature combinations, up to ``max_t``
    teams with demands summing to at most n."""
    rng = random.Random(seed)
    nf = rng.randint(1, max_features)
    sizes = [rng.randint(1, 3) for _ in range(nf)]
    schema = FeatureSchema(tuple(
        Feature(f"f{k}", tuple(f"v{k}_{i}" for i in range(sizes[k])))
        for k in range(nf)))
    combos = list(itertools.product(*[range(s) for s in sizes]))
    rng.shuffle(combos)
    pool = combos[:min(len(combos), rng.randint(1, max_columns))]
    n = rng.randint(max(1, len(pool)), max_n)
    workers = tuple(rng.choice(pool) for _ in range(n))
    t = rng.randint(1, max_t)
    demands = []
    left = n
    for _ in range(t):
        d = rng.randint(0, left)
        demands.append(d)
        left -= d
    if rng.random() < 0.4 and left:
        demands[-1] += left
    teams = tuple(Team(f"team{i}", d) for i, d in enumerate(demands))
    mode = "worker" if rng.random() < worker_fraction else "class"
    width = sizes[0] if mode == "class" else n
    table = tuple(tuple(rng.randint(0, max_cost) for _ in range(width))
                  for _ in range(t))
    lambdas = tuple(rng.choice(lambda_choices) for _ in range(nf))
    weights = TradeoffWeights(rng.randint(1, max_lambda0), lambdas)
    return Instance(schema, workers, teams, CostModel(mode, table), weights)


def random_feasible_matrix(inst, index, rng):
    """Uniform-ish feasible assignment matrix with correct margins."""
    caps = [inst.demand(i) for i in range(inst.t + 1)]
    w = [[0] * index.num_columns for _ in range(inst.t + 1)]
    for j, m in enumerate(index.multiplicities):
        for _ in range(m):
            i = rng.choice([i for i in range(inst.t + 1) if caps[i] > 0])
            caps[i] -= 1
            w[i][j] += 1
    return w


def random_feasible_assignment(inst, rng):
    caps = [inst.demand(i) for i in range(inst.t + 1)]
    assign = [0] * inst.n
    for x in range(inst.n):
        i = rng.choice([i for i in range(inst.t + 1) if caps[i] > 0])
        caps[i] -= 1
        assign[x] = i
    return assign


def random_switch_simple_moves(graph, rng, max_len=4, tries=60):
    """Random applicable closed move walk visiting distinct switches, or
    None when the state admits none of the attempted shapes."""
    teams = list(range(graph.num_switches))
    for _ in range(tries):
        length = rng.randint(2, min(max_len, len(teams)))
        picked = rng.sample(teams, length)
        moves = []
        ok = True
        for p, team in enumerate(picked):
            keys = [key for key in range(graph.num_keys)
                    if graph._available(team, key)]
            if not keys:
                ok = False
                break
            moves.append((rng.choice(keys), team,
                          picked[(p + 1) % length]))
        if ok:
            return moves
    return None


def random_digraph(rng, max_nodes=50, weight_lo=-10, weight_hi=10,
                   density=0.3):
    n = rng.randint(2, max_nodes)
    g = SimpleDigraph(n)
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < density:
                g.add_edge(u, v, rng.randint(weight_lo, weight_hi))
    return g


def has_negative_cycle_exhaustive(g: SimpleDigraph) -> bool:
    """Independent ground truth via full simple-cycle enumeration."""
    dg = nx.DiGraph()
    dg.add_nodes_from(range(g.node_count))
    for e in g.edges:
        if e.enabled:
            dg.add_edge(e.src, e.dst, weight=e.weight)
    for cycle in nx.simple_cycles(dg):
        total = sum(dg[u][v]["weight"]
                    for u, v in zip(cycle, cycle[1:] + cycle[:1]))
        if total < 0:
            return True
    return False
