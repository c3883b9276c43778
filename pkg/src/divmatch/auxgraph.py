"""Auxiliary switch-graph whose negative cycles are beneficial exchanges.

Every team (including the dummy team 0) is a switch with one input and one
output port per mover key. A key is a feature combination (class cost mode)
or an individual worker (worker cost mode). Ports are graph nodes:

* intra edges run input -> output inside one switch and carry the correction
  ``-2 * lambdas[k]`` for every feature k on which the two keys agree (zero
  inside the dummy switch, which never contributes to the objective),
* inter edges run from the output port of one team to the same key's input
  port of another team and carry the exact objective change of moving one
  such worker between the two teams, given the current counts.

For a cycle that visits each switch at most once, the edge-weight sum equals
the true objective change of performing all its moves: the inter edges price
each move against the untouched counters and the intra correction cancels
the double count that appears when the worker entering a switch shares a
feature value with the worker leaving it.

The graph keeps live assignment counters and supports incremental reweighting
after an exchange is applied; only inter edges incident to a touched
(team, feature-value) counter are recomputed.
"""

from __future__ import annotations

from .instance import CombinationIndex, CostModel, Instance, TradeoffWeights
from .negcycle import ExchangeCycle
from .objective import check_assignment_matrix, check_worker_assignment, \
    count_tensor

__all__ = [
    "AuxEdge",
    "AuxGraph",
    "CycleApplicationError",
    "intra_weight",
    "inter_weight",
    "build_aux_graph",
    "apply_and_update",
    "cycle_from_moves",
    "dump_edges",
]

INPUT, OUTPUT = 0, 1


class CycleApplicationError(RuntimeError):
    """A cycle could not be applied to the current assignment."""


class AuxEdge:
    """One directed edge. For intra edges ``team_from == team_to`` and the
    keys are the entering/leaving movers; for inter edges the keys coincide
    and the teams are the move's endpoints."""

    __slots__ = ("src", "dst", "weight", "kind", "enabled",
                 "team_from", "team_to", "key_from", "key_to")

    def __init__(self, src, dst, weight, kind, enabled,
                 team_from, team_to, key_from, key_to):
        self.src = src
        self.dst = dst
        self.weight = weight
        self.kind = kind
        self.enabled = enabled
        self.team_from = team_from
        self.team_to = team_to
        self.key_from = key_from
        self.key_to = key_to

    def __repr__(self):
        state = "on" if self.enabled else "off"
        return (f"AuxEdge({self.kind} {self.team_from}:{self.key_from} -> "
                f"{self.team_to}:{self.key_to} w={self.weight} {state})")


def _shared_value_correction(v_a, v_b, weights: TradeoffWeights) -> int:
    return -2 * sum(lam for lam, a, b in zip(weights.lambdas, v_a, v_b)
                    if a == b)


def intra_weight(v_a, v_b, team: int, weights: TradeoffWeights) -> int:
    """Correction for a worker with combination ``v_a`` entering and one with
    ``v_b`` leaving team ``team``: -2*lambda_k per shared feature value.
    Zero inside the dummy switch."""
    if team == 0:
        return 0
    return _shared_value_correction(v_a, v_b, weights)


def _move_diversity_delta(values, i1: int, i2: int, c,
                          weights: TradeoffWeights) -> int:
    # (x-1)^2 - x^2 = 1 - 2x on the leaving side, (x+1)^2 - x^2 = 2x + 1 on
    # the entering side; the dummy team carries no diversity.
    delta = 0
    for k, v in enumerate(values):
        lam = weights.lambdas[k]
        if i1 != 0:
            delta += lam * (1 - 2 * c[i1][k][v])
        if i2 != 0:
            delta += lam * (2 * c[i2][k][v] + 1)
    return delta


def inter_weight(v_j, from_team: int, to_team: int, c, costs: CostModel,
                 weights: TradeoffWeights) -> int:
    """Objective change of moving one worker with combination ``v_j`` from
    ``from_team`` to ``to_team``, given current counts ``c`` (class costs)."""
    if from_team == to_team:
        raise ValueError("inter edge endpoints must be distinct teams")
    cost_from = 0 if from_team == 0 else costs.table[from_team - 1][v_j[0]]
    cost_to = 0 if to_team == 0 else costs.table[to_team - 1][v_j[0]]
    return (weights.lambda0 * (cost_to - cost_from)
            + _move_diversity_delta(v_j, from_team, to_team, c, weights))


class AuxGraph:
    """Live switch-graph over the current assignment.

    Exposes ``node_count`` and ``succ`` (adjacency lists of AuxEdge) for the
    cycle detectors. Single-writer: detection never overlaps mutation.
    """

    def __init__(self, inst: Instance, state, index: CombinationIndex | None):
        self.inst = inst
        self.mode = inst.costs.mode
        self.index = index
        if self.mode == "class":
            self.keys = index.columns
            self.w = [list(row) for row in state]
            self.assign = None
        else:
            self.keys = inst.workers
            self.w = None
            self.assign = list(state)
        self.num_keys = len(self.keys)
        self.num_switches = inst.t + 1
        self.node_count = 2 * self.num_keys * self.num_switches
        self.c = count_tensor(inst, state, index)
        self.edges: list[AuxEdge] = []
        self.succ: list[list[AuxEdge]] = [[] for _ in range(self.node_count)]
        self._inter_incident: list[list[AuxEdge]] = [
            [] for _ in range(self.num_switches)]
        self._edge_by_ports: dict[tuple[int, int], AuxEdge] = {}
        self._build()

    # -- node ids -----------------------------------------------------------

    def port_id(self, team: int, side: int, key: int) -> int:
        return (team * 2 + side) * self.num_keys + key

    def port_repr(self, node: int) -> str:
        team, rest = divmod(node, 2 * self.num_keys)
        side, key = divmod(rest, self.num_keys)
        return f"{team}:{'in' if side == INPUT else 'out'}:{key}"

    # -- weights ------------------------------------------------------------

    def _cost(self, team: int, key: int) -> int:
        if team == 0:
            return 0
        if self.mode == "class":
            return self.inst.costs.table[team - 1][self.keys[key][0]]
        return self.inst.costs.table[team - 1][key]

    def _inter_weight(self, key: int, i1: int, i2: int) -> int:
        return (self.inst.weights.lambda0 * (self._cost(i2, key)
                                             - self._cost(i1, key))
                + _move_diversity_delta(self.keys[key], i1, i2, self.c,
                                        self.inst.weights))

    def _available(self, team: int, key: int) -> bool:
        if self.mode == "class":
            return self.w[team][key] >= 1
        return self.assign[key] == team

    # -- construction -------------------------------------------------------

    def _build(self):
        weights = self.inst.weights
        for team in range(self.num_switches):
            for kin in range(self.num_keys):
                src = self.port_id(team, INPUT, kin)
                for kout in range(self.num_keys):
                    dst = self.port_id(team, OUTPUT, kout)
                    wgt = intra_weight(self.keys[kin], self.keys[kout],
                                       team, weights)
                    self._add(AuxEdge(src, dst, wgt, "intra", True,
                                      team, team, kin, kout))
        for i1 in range(self.num_switches):
            for i2 in range(self.num_switches):
                if i1 == i2:
                    continue
                for key in range(self.num_keys):
                    src = self.port_id(i1, OUTPUT, key)
                    dst = self.port_id(i2, INPUT, key)
                    edge = AuxEdge(src, dst, self._inter_weight(key, i1, i2),
                                   "inter", self._available(i1, key),
                                   i1, i2, key, key)
                    self._add(edge)
                    self._inter_incident[i1].append(edge)
                    self._inter_incident[i2].append(edge)

    def _add(self, edge: AuxEdge):
        self.edges.append(edge)
        self.succ[edge.src].append(edge)
        self._edge_by_ports[(edge.src, edge.dst)] = edge

    # -- lookups ------------------------------------------------------------

    def find_inter_edge(self, key: int, i1: int, i2: int) -> AuxEdge:
        return self._edge_by_ports[(self.port_id(i1, OUTPUT, key),
                                    self.port_id(i2, INPUT, key))]

    def find_intra_edge(self, team: int, key_in: int, key_out: int) -> AuxEdge:
        return self._edge_by_ports[(self.port_id(team, INPUT, key_in),
                                    self.port_id(team, OUTPUT, key_out))]

    def current_state(self):
        """Copy of the live assignment (matrix or worker -> team map)."""
        if self.mode == "class":
            return [list(row) for row in self.w]
        return list(self.assign)

    # -- mutation -----------------------------------------------------------

    def apply_moves(self, moves) -> None:
        """Apply moves ``(key, from_team, to_team)`` and reweight locally."""
        for key, i1, i2 in moves:
            if self.mode == "class":
                if self.w[i1][key] <= 0:
                    raise CycleApplicationError(
                        f"counter underflow: no key {key} worker in team {i1}")
                self.w[i1][key] -= 1
                self.w[i2][key] += 1
            else:
                if self.assign[key] != i1:
                    raise CycleApplicationError(
                        f"worker {key} is not in team {i1}")
                self.assign[key] = i2
            for k, v in enumerate(self.keys[key]):
                if self.c[i1][k][v] <= 0:
                    raise CycleApplicationError("count tensor underflow")
                self.c[i1][k][v] -= 1
                self.c[i2][k][v] += 1
        self._reweight_after(moves)

    def _reweight_after(self, moves) -> None:
        touched = set()
        moved = []
        for key, i1, i2 in moves:
            touched.add(i1)
            touched.add(i2)
            moved.append(self.keys[key])
        seen = set()
        for team in sorted(touched):
            for edge in self._inter_incident[team]:
                if id(edge) in seen:
                    continue
                seen.add(id(edge))
                values = self.keys[edge.key_from]
                if any(any(a == b for a, b in zip(values, mv))
                       for mv in moved):
                    edge.weight = self._inter_weight(
                        edge.key_from, edge.team_from, edge.team_to)
        for key, i1, i2 in moves:
            for team in (i1, i2):
                src = self.port_id(team, OUTPUT, key)
                for edge in self.succ[src]:
                    edge.enabled = self._available(team, key)


def build_aux_graph(inst: Instance, state,
                    index: CombinationIndex | None = None) -> AuxGraph:
    """Construct the switch-graph for a valid assignment."""
    if inst.costs.mode == "class":
        index = check_assignment_matrix(inst, state, index)
    else:
        check_worker_assignment(inst, state)
        index = None
    return AuxGraph(inst, state, index)


def moves_of(cycle: ExchangeCycle):
    """Extract the move list ``(key, from_team, to_team)`` of a cycle's
    inter edges, in traversal order."""
    return [(e.key_from, e.team_from, e.team_to)
            for e in cycle.edges if e.kind == "inter"]


def apply_and_update(g: AuxGraph, cycle: ExchangeCycle):
    """Perform the cycle's exchange on the live graph.

    Every inter edge moves one worker of its key from its source team to its
    target team; counters and affected edge weights/flags are updated in
    place. Returns the applied move list.
    """
    edges = cycle.edges
    for e, nxt in zip(edges, edges[1:] + edges[:1]):
        if e.dst != nxt.src:
            raise CycleApplicationError("cycle edges do not form a closed walk")
        if not e.enabled:
            raise CycleApplicationError(f"cycle uses a disabled edge: {e!r}")
    moves = moves_of(cycle)
    if not moves:
        raise CycleApplicationError("cycle contains no inter edges")
    g.apply_moves(moves)
    return moves


def cycle_from_moves(g: AuxGraph, moves) -> ExchangeCycle:
    """Assemble the edge walk realizing a closed move sequence.

    ``moves[p]`` must end at the team where ``moves[p+1]`` starts (cyclically);
    the connecting intra edge inside that team pairs the arriving key with the
    departing one.
    """
    edges = []
    for p, (key, i1, i2) in enumerate(moves):
        nxt = moves[(p + 1) % len(moves)]
        if i2 != nxt[1]:
            raise ValueError("moves do not form a closed walk")
        edges.append(g.find_inter_edge(key, i1, i2))
        edges.append(g.find_intra_edge(i2, key, nxt[0]))
    return ExchangeCycle(edges, sum(e.weight for e in edges))


def dump_edges(g: AuxGraph) -> str:
    """Edge list as text, one line per edge, for golden-file comparisons."""
    lines = []
    for e in g.edges:
        lines.append(f"{g.port_repr(e.src)} -> {g.port_repr(e.dst)} "
                     f"{e.weight} {e.kind} {'true' if e.enabled else 'false'}")
    return "\n".join(lines) + "\n"
