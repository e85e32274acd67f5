"""File ingestion, train/test splitting and threshold derivation.

Formats (UTF-8, LF):

* Ratings: MovieLens ``user::item::rating[::timestamp]`` or CSV/TSV with
  columns user,item,rating (header detected); extra columns are discarded.
* Groupings: TSV ``entity_id<TAB>Group1|Group2|...``.
* Candidates: TSV ``user_id<TAB>item_id<TAB>relevance``.
* Thresholds: TSV ``side<TAB>entity_id<TAB>group_id<TAB>value`` with side
  in {user, item}.
* Solutions: TSV ``user_id<TAB>item_id<TAB>relevance<TAB>method``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path

from .errors import DataFormatError, GraphError
from .graph import Grouping, RecGraph, Solution, ThresholdTable


@dataclass
class RatingsDataset:
    """(user, item, rating) triples with no duplicate pairs."""

    triples: list[tuple[str, str, float]]

    def __len__(self) -> int:
        return len(self.triples)

    def by_user(self) -> dict[str, list[tuple[str, float]]]:
        out: dict[str, list[tuple[str, float]]] = {}
        for user, item, rating in self.triples:
            out.setdefault(user, []).append((item, rating))
        return out


@dataclass
class SplitSpec:
    folds: int = 5
    min_ratings: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.folds < 2:
            raise DataFormatError(f"folds must be >= 2, got {self.folds}")
        if self.min_ratings < 1:
            raise DataFormatError(f"min_ratings must be >= 1, got {self.min_ratings}")


def _split_line(line: str) -> list[str]:
    if "::" in line:
        return line.split("::")
    if "\t" in line:
        return line.split("\t")
    return line.split(",")


def load_ratings(path: str | Path) -> RatingsDataset:
    """Parse a ratings file; '::', tab and comma delimiters are accepted and
    a leading header row is skipped when the rating column is not numeric."""
    triples: list[tuple[str, str, float]] = []
    seen: set[tuple[str, str]] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line:
                continue
            parts = _split_line(line)
            if len(parts) < 3:
                raise DataFormatError(f"{path}:{lineno}: expected >= 3 fields")
            user, item, rating_text = parts[0], parts[1], parts[2]
            try:
                rating = float(rating_text)
            except ValueError:
                if lineno == 1:
                    continue  # header row
                raise DataFormatError(
                    f"{path}:{lineno}: rating {rating_text!r} is not a number"
                ) from None
            if (user, item) in seen:
                raise DataFormatError(f"{path}:{lineno}: duplicate pair ({user},{item})")
            seen.add((user, item))
            triples.append((user, item, rating))
    return RatingsDataset(triples)


def save_ratings(dataset: RatingsDataset, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for user, item, rating in dataset.triples:
            fh.write(f"{user}\t{item}\t{rating:g}\n")


def load_grouping(
    path: str | Path, side: str, entity_ids: list[str]
) -> tuple[Grouping, int]:
    """Grouping over ``entity_ids``; rows naming unknown entities are
    skipped and counted.  Returns (grouping, skipped_row_count)."""
    index_of = {eid: i for i, eid in enumerate(entity_ids)}
    group_index: dict[str, int] = {}
    group_ids: list[str] = []
    membership: list[list[int]] = [[] for _ in entity_ids]
    skipped = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise DataFormatError(f"{path}:{lineno}: expected 2 tab-separated fields")
            eid, group_list = parts
            if eid not in index_of:
                skipped += 1
                continue
            groups = [g for g in group_list.split("|") if g]
            for g in groups:
                if g not in group_index:
                    group_index[g] = len(group_ids)
                    group_ids.append(g)
                gi = group_index[g]
                if gi not in membership[index_of[eid]]:
                    membership[index_of[eid]].append(gi)
    return Grouping(side, group_ids, membership), skipped


def save_grouping(grouping: Grouping, entity_ids: list[str], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for i, eid in enumerate(entity_ids):
            groups = "|".join(grouping.group_ids[g] for g in grouping.groups_of(i))
            fh.write(f"{eid}\t{groups}\n")


def split_folds(
    ratings: RatingsDataset, spec: SplitSpec
) -> list[tuple[RatingsDataset, RatingsDataset]]:
    """Per-user random partition into ``folds`` buckets; fold f's test set is
    bucket f restricted to users with more than ``min_ratings`` ratings."""
    rng = random.Random(spec.seed)
    buckets: dict[tuple[str, str], int] = {}
    per_user = ratings.by_user()
    for user in sorted(per_user):
        entries = sorted(per_user[user])
        indices = list(range(len(entries)))
        rng.shuffle(indices)
        for pos, idx in enumerate(indices):
            buckets[(user, entries[idx][0])] = pos % spec.folds
    eligible = {u for u, entries in per_user.items() if len(entries) > spec.min_ratings}
    out = []
    for fold in range(spec.folds):
        train, test = [], []
        for user, item, rating in ratings.triples:
            if buckets[(user, item)] == fold and user in eligible:
                test.append((user, item, rating))
            else:
                train.append((user, item, rating))
        out.append((RatingsDataset(train), RatingsDataset(test)))
    return out


def load_candidates(
    path: str | Path,
    display_constraint: int | dict[str, int],
    top_n: int = 250,
) -> tuple[RecGraph, int]:
    """Assemble a RecGraph from a candidate file, keeping each user's top_n
    candidates by relevance.  ``display_constraint`` is either a uniform
    value or a per-user-id map.  Returns (graph, skipped_row_count) where
    skipped counts users missing from a per-user constraint map."""
    rows: list[tuple[str, str, float]] = []
    seen: set[tuple[str, str]] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line:
                continue
            parts = line.split("\t") if "\t" in line else line.split(",")
            if len(parts) < 3:
                raise DataFormatError(f"{path}:{lineno}: expected >= 3 fields")
            user, item = parts[0], parts[1]
            try:
                rel = float(parts[2])
            except ValueError:
                if lineno == 1:
                    continue
                raise DataFormatError(
                    f"{path}:{lineno}: relevance {parts[2]!r} is not a number"
                ) from None
            if rel < 0:
                raise GraphError(f"{path}:{lineno}: negative relevance {rel}")
            if (user, item) in seen:
                raise DataFormatError(f"{path}:{lineno}: duplicate pair ({user},{item})")
            seen.add((user, item))
            rows.append((user, item, rel))

    per_user: dict[str, list[tuple[str, float]]] = {}
    for user, item, rel in rows:
        per_user.setdefault(user, []).append((item, rel))

    skipped = 0
    user_ids: list[str] = []
    constraints: list[int] = []
    for user in per_user:
        if isinstance(display_constraint, dict):
            if user not in display_constraint:
                skipped += 1
                continue
            c = display_constraint[user]
        else:
            c = display_constraint
        user_ids.append(user)
        constraints.append(c)

    item_index: dict[str, int] = {}
    item_ids: list[str] = []
    edges: list[tuple[int, int, float]] = []
    for u, user in enumerate(user_ids):
        kept = sorted(per_user[user], key=lambda t: (-t[1], t[0]))[:top_n]
        for item, rel in sorted(kept):
            if item not in item_index:
                item_index[item] = len(item_ids)
                item_ids.append(item)
            edges.append((u, item_index[item], rel))
    return RecGraph(user_ids, constraints, item_ids, edges), skipped


# ---------------------------------------------------------------------------
# Threshold derivation

def largest_remainder(counts: dict[int, float], target: int) -> dict[int, int]:
    """Integer apportionment of ``target`` units proportionally to counts,
    preserving the target sum exactly.  Remainder ties break toward the
    larger raw count, then the lower group index."""
    total = sum(counts.values())
    if total <= 0 or target <= 0:
        return {g: 0 for g in counts}
    quotas = {g: target * c / total for g, c in counts.items()}
    floors = {g: int(q) for g, q in quotas.items()}
    leftover = target - sum(floors.values())
    order = sorted(
        counts,
        key=lambda g: (-(quotas[g] - floors[g]), -counts[g], g),
    )
    out = dict(floors)
    for g in order[:leftover]:
        out[g] += 1
    return out


def derive_user_thresholds(
    train: RatingsDataset,
    item_cats: Grouping,
    item_ids: list[str],
    user_ids: list[str],
    display_constraints: list[int],
    overlapping: bool = False,
) -> ThresholdTable:
    """Per-user category thresholds proportional to training-set category
    frequencies.  The per-user target sum is c_i for disjoint categories, or
    c_i times the global average number of categories per training item for
    overlapping ones.  Users with no categorized training items get all-zero
    thresholds."""
    item_index = {iid: i for i, iid in enumerate(item_ids)}
    user_index = {uid: u for u, uid in enumerate(user_ids)}
    per_user_counts: dict[int, dict[int, int]] = {}
    cat_total = 0
    item_total = 0
    for user, item, _rating in train.triples:
        ii = item_index.get(item)
        if ii is None:
            continue
        cats = item_cats.groups_of(ii)
        item_total += 1
        cat_total += len(cats)
        u = user_index.get(user)
        if u is None:
            continue
        counts = per_user_counts.setdefault(u, {})
        for a in cats:
            counts[a] = counts.get(a, 0) + 1
    avg_cats = cat_total / item_total if item_total else 0.0

    table: dict[tuple[int, int], int] = {}
    for u, counts in per_user_counts.items():
        target = display_constraints[u]
        if overlapping:
            target = round(target * avg_cats)
        for a, rho in largest_remainder(counts, target).items():
            if rho > 0:
                table[(u, a)] = rho
    return ThresholdTable(user_category=table)


def derive_item_thresholds(
    train: RatingsDataset,
    user_types: Grouping,
    user_ids: list[str],
    item_ids: list[str],
    display_constraints: list[int],
    budget_fraction: float = 0.2,
) -> ThresholdTable:
    """Per-item type thresholds proportional to training-interaction type
    frequencies, summing to ``budget_fraction`` of the equal-promotion share
    round(f * sum(c_i) / |catalog|).  Items with no training interactions
    get all-zero thresholds."""
    user_index = {uid: u for u, uid in enumerate(user_ids)}
    item_index = {iid: i for i, iid in enumerate(item_ids)}
    budget = round(budget_fraction * sum(display_constraints) / len(item_ids)) if item_ids else 0
    per_item_counts: dict[int, dict[int, int]] = {}
    for user, item, _rating in train.triples:
        u = user_index.get(user)
        j = item_index.get(item)
        if u is None or j is None:
            continue
        counts = per_item_counts.setdefault(j, {})
        for b in user_types.groups_of(u):
            counts[b] = counts.get(b, 0) + 1
    table: dict[tuple[int, int], int] = {}
    if budget > 0:
        for j, counts in per_item_counts.items():
            for b, lam in largest_remainder(counts, budget).items():
                if lam > 0:
                    table[(j, b)] = lam
    return ThresholdTable(item_type=table)


# ---------------------------------------------------------------------------
# Threshold and solution round-trip I/O

def save_thresholds(
    table: ThresholdTable,
    path: str | Path,
    user_ids: list[str],
    item_ids: list[str],
    user_group_ids: list[str],
    item_group_ids: list[str],
) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for (u, a), v in sorted(table.user_category.items()):
            fh.write(f"user\t{user_ids[u]}\t{item_group_ids[a]}\t{v}\n")
        for (j, b), v in sorted(table.item_type.items()):
            fh.write(f"item\t{item_ids[j]}\t{user_group_ids[b]}\t{v}\n")


def load_thresholds(
    path: str | Path,
    user_ids: list[str],
    item_ids: list[str],
    user_group_ids: list[str],
    item_group_ids: list[str],
) -> ThresholdTable:
    uidx = {x: i for i, x in enumerate(user_ids)}
    iidx = {x: i for i, x in enumerate(item_ids)}
    ugidx = {x: i for i, x in enumerate(user_group_ids)}
    igidx = {x: i for i, x in enumerate(item_group_ids)}
    uc: dict[tuple[int, int], int] = {}
    it: dict[tuple[int, int], int] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise DataFormatError(f"{path}:{lineno}: expected 4 fields")
            side, eid, gid, value = parts
            if side == "user":
                if eid in uidx and gid in igidx:
                    uc[(uidx[eid], igidx[gid])] = int(value)
            elif side == "item":
                if eid in iidx and gid in ugidx:
                    it[(iidx[eid], ugidx[gid])] = int(value)
            else:
                raise DataFormatError(f"{path}:{lineno}: unknown side {side!r}")
    return ThresholdTable(uc, it)


def save_solution(sol: Solution, path: str | Path, method: str) -> None:
    graph = sol.graph
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for u in range(graph.num_users):
            for eidx in sol.selected[u]:
                e = graph.edges[eidx]
                fh.write(
                    f"{graph.user_ids[u]}\t{graph.item_ids[e.item]}\t"
                    f"{e.relevance:.10g}\t{method}\n"
                )


def load_solution_lists(path: str | Path) -> dict[str, list[tuple[str, float]]]:
    """Solution rows grouped per user id, in file order."""
    out: dict[str, list[tuple[str, float]]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise DataFormatError(f"{path}:{lineno}: expected 4 fields")
            user, item, rel, _method = parts
            out.setdefault(user, []).append((item, float(rel)))
    return out
