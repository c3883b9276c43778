"""Exact objective evaluation: cost plus squared-concentration penalties.

The objective of an assignment is

    lambda0 * TU + sum_k lambdas[k] * D_k

where TU is the summed assignment cost over real teams and D_k is the sum,
over real teams and values of feature k, of the squared member counts (a
Herfindahl-style concentration measure; lower means more diverse teams).
The dummy team contributes zero to both parts. Everything here is pure
integer arithmetic on immutable inputs.

Two assignment representations are supported, matching the two cost modes:

* class mode: a matrix ``w`` of t+1 rows (row 0 = dummy team) whose column j
  counts the workers of feature combination j held by each team,
* worker mode: a flat list mapping each worker to its team (0 = unassigned).
"""

from __future__ import annotations

from dataclasses import dataclass

from .instance import CombinationIndex, Instance, build_combination_index

__all__ = [
    "ObjectiveBreakdown",
    "check_assignment_matrix",
    "check_worker_assignment",
    "count_tensor",
    "diversity_k",
    "total_utility",
    "objective",
    "embed",
    "exchange_gain",
    "assignment_from_matrix",
    "matrix_from_assignment",
]

Matrix = list[list[int]]
WorkerAssignment = list[int]


@dataclass(frozen=True)
class ObjectiveBreakdown:
    tu: int
    diversity: tuple[int, ...]  # one D_k per feature
    objective: int

    def recompose(self, lambda0: int, lambdas: tuple[int, ...]) -> int:
        return lambda0 * self.tu + sum(
            lam * d for lam, d in zip(lambdas, self.diversity))


def check_assignment_matrix(inst: Instance, w: Matrix,
                            index: CombinationIndex | None = None) -> CombinationIndex:
    """Validate row/column sums of a class-mode assignment matrix."""
    if index is None:
        index = build_combination_index(inst)
    if len(w) != inst.t + 1:
        raise ValueError(f"matrix has {len(w)} rows, expected {inst.t + 1}")
    for i, row in enumerate(w):
        if len(row) != index.num_columns:
            raise ValueError(f"row {i} has {len(row)} columns, "
                             f"expected {index.num_columns}")
        if any(x < 0 for x in row):
            raise ValueError(f"negative entry in row {i}")
        if sum(row) != inst.demand(i):
            raise ValueError(f"row {i} sums to {sum(row)}, "
                             f"expected {inst.demand(i)}")
    for j in range(index.num_columns):
        col = sum(w[i][j] for i in range(inst.t + 1))
        if col != index.multiplicities[j]:
            raise ValueError(f"column {j} sums to {col}, "
                             f"expected {index.multiplicities[j]}")
    return index


def check_worker_assignment(inst: Instance, assign: WorkerAssignment) -> None:
    """Validate a worker -> team map against demands."""
    if len(assign) != inst.n:
        raise ValueError(f"assignment covers {len(assign)} workers, "
                         f"expected {inst.n}")
    held = [0] * (inst.t + 1)
    for x, i in enumerate(assign):
        if not 0 <= i <= inst.t:
            raise ValueError(f"worker {x} assigned to unknown team {i}")
        held[i] += 1
    for i in range(1, inst.t + 1):
        if held[i] != inst.demand(i):
            raise ValueError(f"team {i} holds {held[i]} workers, "
                             f"demand is {inst.demand(i)}")


def count_tensor(inst: Instance, w, index: CombinationIndex | None = None):
    """Per-team, per-feature value counts ``c[i][k][v]`` for teams 0..t.

    Row 0 tracks the dummy team for bookkeeping; diversity and utility skip it.
    """
    nf = inst.schema.num_features
    c = [[[0] * inst.schema.value_count(k) for k in range(nf)]
         for _ in range(inst.t + 1)]
    if inst.costs.mode == "worker":
        for x, i in enumerate(w):
            for k, v in enumerate(inst.workers[x]):
                c[i][k][v] += 1
    else:
        if index is None:
            index = build_combination_index(inst)
        for i in range(inst.t + 1):
            for j, combo in enumerate(index.columns):
                cnt = w[i][j]
                if cnt:
                    for k, v in enumerate(combo):
                        c[i][k][v] += cnt
    return c


def diversity_k(c, k: int) -> int:
    """Sum of squared value counts of feature ``k`` over real teams."""
    if not 0 <= k < len(c[0]):
        raise IndexError(f"feature index {k} out of range")
    return sum(x * x for row in c[1:] for x in row[k])


def total_utility(inst: Instance, w, index: CombinationIndex | None = None) -> int:
    """Summed assignment cost over real teams; the dummy team is free."""
    if inst.costs.mode == "worker":
        if not _is_worker_assignment(w):
            raise ValueError("worker cost mode expects a worker -> team map")
        return sum(inst.cost(i, x) for x, i in enumerate(w) if i > 0)
    if _is_worker_assignment(w):
        raise ValueError("class cost mode expects an assignment matrix")
    if index is None:
        index = build_combination_index(inst)
    tu = 0
    for i in range(1, inst.t + 1):
        for j, combo in enumerate(index.columns):
            if w[i][j]:
                tu += inst.cost(i, combo[0]) * w[i][j]
    return tu


def _is_worker_assignment(w) -> bool:
    return bool(w) and isinstance(w[0], int)


def objective(inst: Instance, w,
              index: CombinationIndex | None = None) -> ObjectiveBreakdown:
    """Evaluate an assignment. The representation must match the cost mode."""
    if inst.costs.mode == "worker":
        if not _is_worker_assignment(w):
            raise ValueError("worker cost mode expects a worker -> team map")
        check_worker_assignment(inst, w)
    else:
        if _is_worker_assignment(w):
            raise ValueError("class cost mode expects an assignment matrix")
        index = check_assignment_matrix(inst, w, index)
    c = count_tensor(inst, w, index)
    tu = total_utility(inst, w, index)
    div = tuple(diversity_k(c, k) for k in range(inst.schema.num_features))
    lam = inst.weights
    f = lam.lambda0 * tu + sum(l * d for l, d in zip(lam.lambdas, div))
    return ObjectiveBreakdown(tu, div, f)


def embed(inst: Instance, w: Matrix, k: int,
          index: CombinationIndex | None = None) -> Matrix:
    """Project the assignment matrix onto feature ``k``: columns sharing the
    same value of feature ``k`` are merged. Rows cover teams 0..t."""
    if index is None:
        index = build_combination_index(inst)
    if not 0 <= k < inst.schema.num_features:
        raise IndexError(f"feature index {k} out of range")
    width = inst.schema.value_count(k)
    m = [[0] * width for _ in range(inst.t + 1)]
    for j, combo in enumerate(index.columns):
        v = combo[k]
        for i in range(inst.t + 1):
            m[i][v] += w[i][j]
    return m


def exchange_gain(inst: Instance, w_before, w_after,
                  index: CombinationIndex | None = None) -> int:
    """Objective difference caused by a local exchange (after minus before).

    Negative means the exchange is beneficial. Both assignments must be valid
    for the instance, which forces identical row and column sums.
    """
    before = objective(inst, w_before, index)
    after = objective(inst, w_after, index)
    return after.objective - before.objective


def assignment_from_matrix(inst: Instance, w: Matrix,
                           index: CombinationIndex | None = None) -> list[int]:
    """Deterministic worker -> team map realizing a count matrix: within each
    combination, workers in index order fill teams 0..t in row order."""
    if index is None:
        index = build_combination_index(inst)
    members: list[list[int]] = [[] for _ in range(index.num_columns)]
    for x, j in enumerate(index.worker_to_column):
        members[j].append(x)
    assign = [0] * inst.n
    for j, pool in enumerate(members):
        pos = 0
        for i in range(inst.t + 1):
            for _ in range(w[i][j]):
                assign[pool[pos]] = i
                pos += 1
    return assign


def matrix_from_assignment(inst: Instance, assign: WorkerAssignment,
                           index: CombinationIndex | None = None) -> Matrix:
    """Count matrix over combination columns induced by a worker -> team map."""
    if index is None:
        index = build_combination_index(inst)
    w = [[0] * index.num_columns for _ in range(inst.t + 1)]
    for x, i in enumerate(assign):
        w[i][index.worker_to_column[x]] += 1
    return w
