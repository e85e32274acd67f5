"""Evaluation metrics: thresholded/unthresholded diversity objectives,
intent-aware list metrics, and sales-diversity / accuracy measures.

Conventions documented here because the literature varies:

* Item-item distance is 1 - cosine similarity of binary category
  membership vectors, so identical items have distance 0.  Distance to an
  item with no categories is defined as 1.
* The Gini value reported is 1 minus the classical Gini index of the item
  recommendation-degree distribution (zero-degree catalog items included,
  degrees sorted ascending).  LARGER values mean MORE equitable.  An
  all-zero degree distribution yields 0.
* ILD sums over ordered pairs, matching its c(c-1) normalizer; the
  distance is symmetric so this is a factor-of-two wash.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, asdict

from .errors import GraphError, GroupingError
from .graph import DivParams, Grouping, Solution, ThresholdTable

Lists = list[list[int]]


# ---------------------------------------------------------------------------
# Diversity objectives on solutions

def tudiv(sol: Solution, item_cats: Grouping, thresholds: ThresholdTable) -> float:
    """Sum over users and categories of min(threshold, selected degree)."""
    counts: dict[tuple[int, int], int] = {}
    for u, lst in enumerate(sol.selected):
        for eidx in lst:
            item = sol.graph.edges[eidx].item
            for a in item_cats.groups_of(item):
                counts[(u, a)] = counts.get((u, a), 0) + 1
    return float(sum(min(thresholds.rho(u, a), d) for (u, a), d in counts.items()))


def tidiv(sol: Solution, user_types: Grouping, thresholds: ThresholdTable) -> float:
    """Sum over items and types of min(threshold, selected degree)."""
    counts: dict[tuple[int, int], int] = {}
    for u, lst in enumerate(sol.selected):
        for eidx in lst:
            item = sol.graph.edges[eidx].item
            for b in user_types.groups_of(u):
                counts[(item, b)] = counts.get((item, b), 0) + 1
    return float(sum(min(thresholds.lam(j, b), d) for (j, b), d in counts.items()))


def userdiv(sol: Solution, item_cats: Grouping) -> float:
    """Number of distinct categories each user's selection hits, summed."""
    total = 0
    for u, lst in enumerate(sol.selected):
        hit: set[int] = set()
        for eidx in lst:
            hit.update(item_cats.groups_of(sol.graph.edges[eidx].item))
        total += len(hit)
    return float(total)


def itemdiv(sol: Solution, user_types: Grouping) -> float:
    """Number of distinct user types each item is shown to, summed."""
    hit: dict[int, set[int]] = {}
    for u, lst in enumerate(sol.selected):
        for eidx in lst:
            item = sol.graph.edges[eidx].item
            hit.setdefault(item, set()).update(user_types.groups_of(u))
    return float(sum(len(s) for s in hit.values()))


def div_edgewise(
    sol: Solution, user_types: Grouping, item_cats: Grouping, params: DivParams
) -> float:
    """Edge-weight form of the unthresholded objective: each selected edge
    contributes beta over the user's in-category degree plus mu over the
    item's in-type degree.  Requires disjoint groupings."""
    if not (user_types.disjoint and item_cats.disjoint):
        raise GroupingError("edge-wise diversity requires disjoint groupings")
    user_cat: dict[tuple[int, int], int] = {}
    item_type: dict[tuple[int, int], int] = {}
    for u, lst in enumerate(sol.selected):
        for eidx in lst:
            item = sol.graph.edges[eidx].item
            a = item_cats.single_group_of(item)
            b = user_types.single_group_of(u)
            if a is not None:
                user_cat[(u, a)] = user_cat.get((u, a), 0) + 1
            if b is not None:
                item_type[(item, b)] = item_type.get((item, b), 0) + 1
    total = 0.0
    for u, lst in enumerate(sol.selected):
        for eidx in lst:
            item = sol.graph.edges[eidx].item
            a = item_cats.single_group_of(item)
            b = user_types.single_group_of(u)
            if a is not None:
                total += params.beta / user_cat[(u, a)]
            if b is not None:
                total += params.mu / item_type[(item, b)]
    return total


def relevance_sum(sol: Solution) -> float:
    return sol.relevance()


# ---------------------------------------------------------------------------
# Intent-aware list metrics

def _cosine_distance(cats1: list[int], cats2: list[int]) -> float:
    if not cats1 or not cats2:
        return 1.0
    inter = len(set(cats1) & set(cats2))
    return 1.0 - inter / math.sqrt(len(cats1) * len(cats2))


def ild(lists: Lists, item_cats: Grouping, k: int | None = None) -> float:
    """Mean over users of the average pairwise category distance within the
    user's (truncated) list.  Users with fewer than two items contribute 0."""
    if not lists:
        return 0.0
    total = 0.0
    for items in lists:
        if k is not None:
            items = items[:k]
        c = len(items)
        if c < 2:
            continue
        pair_sum = 0.0
        for x in range(c):
            for y in range(c):
                if x != y:
                    pair_sum += _cosine_distance(
                        item_cats.groups_of(items[x]), item_cats.groups_of(items[y])
                    )
        total += pair_sum / (c * (c - 1))
    return total / len(lists)


@dataclass
class IntentProfile:
    """Per-user category probabilities and normalized [0,1] relevances.

    ``category_probs[u]`` maps category index -> p(category);
    ``norm_rel[u]`` maps item index -> normalized relevance.
    """

    category_probs: list[dict[int, float]]
    norm_rel: list[dict[int, float]]

    def __post_init__(self):
        for u, probs in enumerate(self.category_probs):
            if probs:
                s = sum(probs.values())
                if abs(s - 1.0) > 1e-9:
                    raise GraphError(f"user {u} intent probabilities sum to {s}")
        for u, rels in enumerate(self.norm_rel):
            for item, r in rels.items():
                if not (0.0 <= r <= 1.0):
                    raise GraphError(
                        f"user {u} normalized relevance for item {item} is {r}"
                    )

    @classmethod
    def from_graph(
        cls,
        graph,
        item_cats: Grouping,
        training_items: list[list[int]] | None = None,
    ) -> "IntentProfile":
        """Category probabilities from each user's (training) item category
        frequencies; relevances min-max normalized over the whole candidate
        set.  Without training data the candidate items stand in."""
        rels = [graph.edges[e].relevance for e in range(graph.num_edges)]
        lo = min(rels) if rels else 0.0
        hi = max(rels) if rels else 1.0
        span = hi - lo
        norm_rel: list[dict[int, float]] = []
        probs: list[dict[int, float]] = []
        for u in range(graph.num_users):
            nr = {}
            for eidx in graph.user_edges[u]:
                e = graph.edges[eidx]
                nr[e.item] = (e.relevance - lo) / span if span > 0 else 1.0
            norm_rel.append(nr)
            basis = (
                training_items[u]
                if training_items is not None
                else [graph.edges[eidx].item for eidx in graph.user_edges[u]]
            )
            counts: dict[int, int] = {}
            for item in basis:
                for a in item_cats.groups_of(item):
                    counts[a] = counts.get(a, 0) + 1
            total = sum(counts.values())
            probs.append(
                {a: c / total for a, c in counts.items()} if total else {}
            )
        return cls(probs, norm_rel)


def err_ia(
    lists: Lists, intent: IntentProfile, item_cats: Grouping, k: int | None = None
) -> float:
    """Intent-aware expected reciprocal rank, averaged over users.  The
    per-category relevance of an item is its normalized relevance masked by
    category membership."""
    if not lists:
        return 0.0
    total = 0.0
    for u, items in enumerate(lists):
        if k is not None:
            items = items[:k]
        probs = intent.category_probs[u]
        rels = intent.norm_rel[u]
        user_score = 0.0
        for a, p in probs.items():
            remaining = 1.0
            for rank, item in enumerate(items, start=1):
                if a in item_cats.groups_of(item):
                    r = rels.get(item, 0.0)
                    user_score += p * remaining * r / rank
                    remaining *= 1.0 - r
        total += user_score
    return total / len(lists)


# ---------------------------------------------------------------------------
# Sales diversity and accuracy

def gini_index(degrees: list[int]) -> float:
    """One minus the classical Gini index of a degree distribution.  The
    input is sorted ascending internally; all-zero degrees yield 0."""
    r = len(degrees)
    if r == 0:
        return 0.0
    d = sorted(degrees)
    total = sum(d)
    if total == 0:
        return 0.0
    weighted = sum((r + 1 - i) * di for i, di in enumerate(d, start=1))
    return 1.0 - (r + 1 - 2.0 * weighted / total) / r


def _item_degrees(lists: Lists, catalog_size: int, k: int | None) -> list[int]:
    degrees = [0] * catalog_size
    for items in lists:
        if k is not None:
            items = items[:k]
        for item in items:
            degrees[item] += 1
    return degrees


def gini(lists: Lists, catalog_size: int, k: int | None = None) -> float:
    return gini_index(_item_degrees(lists, catalog_size, k))


def aggregate_diversity(lists: Lists, catalog_size: int, k: int | None = None) -> float:
    """Fraction of catalog items recommended to at least one user."""
    if catalog_size == 0:
        return 0.0
    seen: set[int] = set()
    for items in lists:
        if k is not None:
            items = items[:k]
        seen.update(items)
    return len(seen) / catalog_size


def precision(
    lists: Lists,
    relevant: dict[int, set[int]],
    constraints: list[int],
    k: int | None = None,
) -> float:
    """Mean over test users of |list ∩ relevant| / c_i; test users are the
    keys of ``relevant``."""
    if not relevant:
        raise GraphError("precision requires at least one test user")
    total = 0.0
    for u, t_set in relevant.items():
        items = lists[u][:k] if k is not None else lists[u]
        total += len(set(items) & t_set) / constraints[u]
    return total / len(relevant)


# ---------------------------------------------------------------------------
# Aggregated report

REPORT_FIELDS = [
    "precision",
    "err_ia",
    "ild",
    "tudiv",
    "tidiv",
    "userdiv",
    "itemdiv",
    "div",
    "aggregate_diversity",
    "gini",
    "relevance_sum",
]


@dataclass
class MetricsReport:
    """Flat named metric values at a common cutoff; absent metrics are None."""

    cutoff: int
    precision: float | None = None
    err_ia: float | None = None
    ild: float | None = None
    tudiv: float | None = None
    tidiv: float | None = None
    userdiv: float | None = None
    itemdiv: float | None = None
    div: float | None = None
    aggregate_diversity: float | None = None
    gini: float | None = None
    relevance_sum: float | None = None
    extra: dict = field(default_factory=dict)

    def to_json(self) -> str:
        payload = asdict(self)
        payload.update(payload.pop("extra"))
        return json.dumps(payload, indent=2, sort_keys=True)

    def csv_header(self) -> list[str]:
        return ["cutoff"] + REPORT_FIELDS + sorted(self.extra)

    def to_csv_row(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        row = [self.cutoff] + [getattr(self, f) for f in REPORT_FIELDS]
        row += [self.extra[key] for key in sorted(self.extra)]
        writer.writerow(["" if v is None else v for v in row])
        return buf.getvalue().strip("\r\n")
