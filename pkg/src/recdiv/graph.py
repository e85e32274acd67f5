"""Domain model: candidate graphs, groupings, thresholds and solutions.

Users and items are identified internally by dense ordinal indices; the
opaque string ids only matter at the I/O boundary.  All structures except
Solution are immutable after construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import CapacityError, DuplicateEdgeError, GraphError, GroupingError

USER_SIDE = "user"
ITEM_SIDE = "item"


@dataclass(frozen=True)
class Edge:
    user: int
    item: int
    relevance: float
    index: int


class RecGraph:
    """Weighted bipartite candidate graph with per-user display constraints."""

    def __init__(
        self,
        user_ids: list[str],
        display_constraints: list[int],
        item_ids: list[str],
        edges: list[tuple[int, int, float]],
    ):
        if len(user_ids) != len(display_constraints):
            raise GraphError("one display constraint per user required")
        for c in display_constraints:
            if c < 1:
                raise GraphError(f"display constraint must be >= 1, got {c}")
        self.user_ids = list(user_ids)
        self.item_ids = list(item_ids)
        self.display_constraints = list(display_constraints)
        self.edges: list[Edge] = []
        self.user_edges: list[list[int]] = [[] for _ in user_ids]
        self.item_edges: list[list[int]] = [[] for _ in item_ids]
        seen: set[tuple[int, int]] = set()
        for u, v, rel in edges:
            if not (0 <= u < len(user_ids)) or not (0 <= v < len(item_ids)):
                raise GraphError(f"edge ({u},{v}) references unknown endpoint")
            if (u, v) in seen:
                raise DuplicateEdgeError(f"duplicate candidate edge ({u},{v})")
            if not math.isfinite(rel) or rel < 0:
                raise GraphError(f"relevance must be finite and >= 0, got {rel}")
            seen.add((u, v))
            e = Edge(u, v, float(rel), len(self.edges))
            self.edges.append(e)
            self.user_edges[u].append(e.index)
            self.item_edges[v].append(e.index)

    @property
    def num_users(self) -> int:
        return len(self.user_ids)

    @property
    def num_items(self) -> int:
        return len(self.item_ids)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def __repr__(self) -> str:
        return (
            f"RecGraph({self.num_users} users, {self.num_items} items, "
            f"{self.num_edges} edges)"
        )


class Grouping:
    """Membership structure: user-side types or item-side categories.

    ``membership[i]`` lists the group indices entity ``i`` belongs to.
    The grouping is disjoint when no entity has more than one group.
    """

    def __init__(self, side: str, group_ids: list[str], membership: list[list[int]]):
        if side not in (USER_SIDE, ITEM_SIDE):
            raise GroupingError(f"side must be 'user' or 'item', got {side!r}")
        self.side = side
        self.group_ids = list(group_ids)
        self.membership: list[list[int]] = []
        self.members: list[list[int]] = [[] for _ in group_ids]
        for ent, groups in enumerate(membership):
            if len(set(groups)) != len(groups):
                raise GroupingError(f"entity {ent} listed twice in a group")
            for g in groups:
                if not (0 <= g < len(group_ids)):
                    raise GroupingError(f"entity {ent} references unknown group {g}")
                self.members[g].append(ent)
            self.membership.append(sorted(groups))
        self.disjoint = all(len(m) <= 1 for m in self.membership)

    @property
    def num_groups(self) -> int:
        return len(self.group_ids)

    def groups_of(self, entity: int) -> list[int]:
        if entity >= len(self.membership):
            return []
        return self.membership[entity]

    def single_group_of(self, entity: int) -> int | None:
        """The unique group of an entity; requires a disjoint grouping."""
        if not self.disjoint:
            raise GroupingError("grouping is not disjoint")
        m = self.groups_of(entity)
        return m[0] if m else None

    @classmethod
    def empty(cls, side: str, num_entities: int) -> "Grouping":
        return cls(side, [], [[] for _ in range(num_entities)])


class ThresholdTable:
    """Sparse nonnegative integer thresholds per (user, category) and
    (item, type) pair; missing entries are 0."""

    def __init__(
        self,
        user_category: dict[tuple[int, int], int] | None = None,
        item_type: dict[tuple[int, int], int] | None = None,
    ):
        self.user_category = dict(user_category or {})
        self.item_type = dict(item_type or {})
        for table, name in ((self.user_category, "user"), (self.item_type, "item")):
            for key, val in table.items():
                if val < 0:
                    raise GraphError(f"{name} threshold {key} is negative: {val}")

    def rho(self, user: int, category: int) -> int:
        return self.user_category.get((user, category), 0)

    def lam(self, item: int, type_: int) -> int:
        return self.item_type.get((item, type_), 0)

    @classmethod
    def uniform(
        cls,
        graph: RecGraph,
        user_types: Grouping,
        item_cats: Grouping,
        rho: int = 1,
        lam: int = 1,
    ) -> "ThresholdTable":
        """Constant thresholds on every (entity, group) pair incident to a
        candidate edge.  Non-incident pairs can never accrue degree, so
        restricting to incident pairs leaves every objective unchanged."""
        uc: dict[tuple[int, int], int] = {}
        it: dict[tuple[int, int], int] = {}
        for e in graph.edges:
            for a in item_cats.groups_of(e.item):
                uc[(e.user, a)] = rho
            for b in user_types.groups_of(e.user):
                it[(e.item, b)] = lam
        return cls(uc, it)


@dataclass(frozen=True)
class DivParams:
    """Trade-off weights for the two diversity terms."""

    beta: float = 1.0
    mu: float = 1.0

    def __post_init__(self):
        for name, v in (("beta", self.beta), ("mu", self.mu)):
            if not math.isfinite(v) or v < 0:
                raise GraphError(f"{name} must be finite and >= 0, got {v}")


@dataclass
class Solution:
    """A selected subgraph with incremental group-degree accounting.

    ``user_group_degree[(i, a)]`` counts user i's selected items in category
    a; ``item_group_degree[(j, b)]`` counts item j's selected users of type b.
    """

    graph: RecGraph
    user_types: Grouping
    item_cats: Grouping
    selected: list[list[int]] = field(default_factory=list)
    user_group_degree: dict[tuple[int, int], int] = field(default_factory=dict)
    item_group_degree: dict[tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.selected:
            self.selected = [[] for _ in range(self.graph.num_users)]
        self._selected_set: set[int] = {e for lst in self.selected for e in lst}

    def is_selected(self, edge_index: int) -> bool:
        return edge_index in self._selected_set

    def add_edge(self, edge_index: int) -> None:
        graph = self.graph
        e = graph.edges[edge_index]
        if edge_index in self._selected_set:
            raise DuplicateEdgeError(f"edge {edge_index} already selected")
        if len(self.selected[e.user]) >= graph.display_constraints[e.user]:
            raise CapacityError(
                f"user {e.user} is at its display constraint "
                f"({graph.display_constraints[e.user]})"
            )
        lst = self.selected[e.user]
        lst.append(edge_index)
        lst.sort()
        self._selected_set.add(edge_index)
        ugd = self.user_group_degree
        for a in self.item_cats.groups_of(e.item):
            ugd[(e.user, a)] = ugd.get((e.user, a), 0) + 1
        igd = self.item_group_degree
        for b in self.user_types.groups_of(e.user):
            igd[(e.item, b)] = igd.get((e.item, b), 0) + 1

    def edge_indices(self) -> list[int]:
        return sorted(self._selected_set)

    def relevance(self) -> float:
        return sum(self.graph.edges[e].relevance for e in self._selected_set)

    def num_selected(self) -> int:
        return len(self._selected_set)

    def ranked_lists(self, k: int | None = None) -> list[list[int]]:
        """Per-user item lists ranked by relevance descending (ties by edge
        index), truncated to k.  Used to apply rank cutoffs to the otherwise
        unordered selection."""
        out = []
        for u in range(self.graph.num_users):
            es = sorted(
                self.selected[u], key=lambda e: (-self.graph.edges[e].relevance, e)
            )
            if k is not None:
                es = es[:k]
            out.append([self.graph.edges[e].item for e in es])
        return out


def new_solution(
    graph: RecGraph,
    user_types: Grouping | None = None,
    item_cats: Grouping | None = None,
) -> Solution:
    """Empty solution on ``graph``; ungrouped sides default to the empty
    grouping (which contributes zero diversity)."""
    if user_types is None:
        user_types = Grouping.empty(USER_SIDE, graph.num_users)
    if item_cats is None:
        item_cats = Grouping.empty(ITEM_SIDE, graph.num_items)
    return Solution(graph, user_types, item_cats)


def eval_objective(sol: Solution, thresholds: ThresholdTable, params: DivParams) -> float:
    """beta*TUDiv(H) + mu*TIDiv(H) + rel(H), from the solution's incremental
    degree maps.  The metrics module recomputes the same quantity from
    scratch; agreement between the two is checked by the property tests."""
    tu = sum(
        min(thresholds.rho(u, a), d) for (u, a), d in sol.user_group_degree.items()
    )
    ti = sum(
        min(thresholds.lam(j, b), d) for (j, b), d in sol.item_group_degree.items()
    )
    return params.beta * tu + params.mu * ti + sol.relevance()
