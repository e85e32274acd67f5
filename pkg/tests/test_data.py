import pytest

from recdiv.data import (
    RatingsDataset,
    SplitSpec,
    derive_item_thresholds,
    derive_user_thresholds,
    largest_remainder,
    load_candidates,
    load_grouping,
    load_ratings,
    load_solution_lists,
    load_thresholds,
    save_grouping,
    save_ratings,
    save_solution,
    save_thresholds,
    split_folds,
)
from recdiv.errors import DataFormatError, GraphError
from recdiv.graph import Grouping, RecGraph, Solution, ThresholdTable


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


# ---------------------------------------------------------------------------
# ratings

def test_load_ratings_double_colon(tmp_path):
    p = _write(tmp_path, "r.dat", "1::1193::5::978300760\n2::661::3::978302109\n")
    ds = load_ratings(p)
    assert ds.triples == [("1", "1193", 5.0), ("2", "661", 3.0)]


def test_load_ratings_tsv_and_csv(tmp_path):
    tsv = _write(tmp_path, "r.tsv", "u1\tv1\t4.0\n")
    assert load_ratings(tsv).triples == [("u1", "v1", 4.0)]
    csvf = _write(tmp_path, "r.csv", "user,item,rating\nu1,v1,4.5\n")
    assert load_ratings(csvf).triples == [("u1", "v1", 4.5)]


def test_load_ratings_errors(tmp_path):
    bad = _write(tmp_path, "bad.tsv", "u1\tv1\t4.0\nu1\tv1\n")
    with pytest.raises(DataFormatError, match=":2"):
        load_ratings(bad)
    nonnum = _write(tmp_path, "nn.tsv", "u1\tv1\t4.0\nu2\tv2\thigh\n")
    with pytest.raises(DataFormatError, match=":2"):
        load_ratings(nonnum)
    dup = _write(tmp_path, "dup.tsv", "u1\tv1\t4.0\nu1\tv1\t3.0\n")
    with pytest.raises(DataFormatError, match="duplicate"):
        load_ratings(dup)


def test_ratings_round_trip(tmp_path):
    ds = RatingsDataset([("u1", "v1", 4.0), ("u2", "v9", 2.5)])
    p = tmp_path / "out.tsv"
    save_ratings(ds, p)
    assert load_ratings(p).triples == ds.triples


# ---------------------------------------------------------------------------
# groupings

def test_load_grouping_overlapping(tmp_path):
    p = _write(tmp_path, "g.tsv", "v1\tComedy|Romance\nv2\tComedy\n")
    g, skipped = load_grouping(p, "item", ["v1", "v2"])
    assert skipped == 0
    assert not g.disjoint
    assert g.group_ids == ["Comedy", "Romance"]
    assert g.groups_of(0) == [0, 1]


def test_load_grouping_skips_unknown_and_allows_empty(tmp_path):
    p = _write(tmp_path, "g.tsv", "u1\tF\nu9\tM\nu2\t\n")
    g, skipped = load_grouping(p, "user", ["u1", "u2"])
    assert skipped == 1
    assert g.disjoint
    assert g.groups_of(1) == []


def test_load_grouping_empty_file(tmp_path):
    p = _write(tmp_path, "g.tsv", "")
    g, skipped = load_grouping(p, "user", ["u1"])
    assert g.disjoint and g.group_ids == [] and skipped == 0


def test_grouping_round_trip(tmp_path):
    g = Grouping("item", ["A", "B"], [[0, 1], [1]])
    p = tmp_path / "g.tsv"
    save_grouping(g, ["v1", "v2"], p)
    back, _ = load_grouping(p, "item", ["v1", "v2"])
    assert back.group_ids == g.group_ids
    assert back.membership == g.membership


# ---------------------------------------------------------------------------
# splitting

def test_split_spec_validation():
    with pytest.raises(DataFormatError):
        SplitSpec(folds=1)
    with pytest.raises(DataFormatError):
        SplitSpec(min_ratings=0)


def test_split_partitions_each_user_evenly():
    triples = [("u1", f"v{j}", 3.0) for j in range(5)]
    ds = RatingsDataset(triples)
    folds = split_folds(ds, SplitSpec(folds=5, min_ratings=1, seed=3))
    assert len(folds) == 5
    for train, test in folds:
        assert len(test) == 1
        assert len(train) == 4
        assert set(train.triples) | set(test.triples) == set(triples)


def test_split_eligibility_rule():
    triples = [("u1", f"v{j}", 3.0) for j in range(10)]
    ds = RatingsDataset(triples)
    for _train, test in split_folds(ds, SplitSpec(folds=5, min_ratings=50, seed=0)):
        assert len(test) == 0  # 10 ratings never exceeds the minimum of 50


def test_split_deterministic():
    triples = [(f"u{i}", f"v{j}", 3.0) for i in range(4) for j in range(12)]
    ds = RatingsDataset(triples)
    a = split_folds(ds, SplitSpec(folds=3, min_ratings=10, seed=42))
    b = split_folds(ds, SplitSpec(folds=3, min_ratings=10, seed=42))
    assert [(t.triples, s.triples) for t, s in a] == [
        (t.triples, s.triples) for t, s in b
    ]
    c = split_folds(ds, SplitSpec(folds=3, min_ratings=10, seed=43))
    assert any(
        x[1].triples != y[1].triples for x, y in zip(a, c)
    )


# ---------------------------------------------------------------------------
# candidates

def test_load_candidates_top_n(tmp_path):
    rows = "".join(f"u1\tv{j}\t{j / 10}\n" for j in range(6))
    p = _write(tmp_path, "c.tsv", rows)
    graph, skipped = load_candidates(p, display_constraint=2, top_n=3)
    assert skipped == 0
    assert graph.num_edges == 3
    kept = {graph.item_ids[e.item] for e in graph.edges}
    assert kept == {"v3", "v4", "v5"}


def test_load_candidates_per_user_constraints(tmp_path):
    p = _write(tmp_path, "c.tsv", "u1\tv1\t0.5\nu2\tv1\t0.4\n")
    graph, skipped = load_candidates(p, {"u1": 3})
    assert skipped == 1
    assert graph.user_ids == ["u1"]
    assert graph.display_constraints == [3]


def test_load_candidates_errors(tmp_path):
    neg = _write(tmp_path, "neg.tsv", "u1\tv1\t-0.5\n")
    with pytest.raises(GraphError):
        load_candidates(neg, 2)
    dup = _write(tmp_path, "dup.tsv", "u1\tv1\t0.5\nu1\tv1\t0.6\n")
    with pytest.raises(DataFormatError):
        load_candidates(dup, 2)


# ---------------------------------------------------------------------------
# threshold derivation

def test_largest_remainder_integral_proportions():
    assert largest_remainder({0: 3, 1: 1}, 4) == {0: 3, 1: 1}


def test_largest_remainder_tie_breaks_to_larger_count():
    # quotas (1.5, 0.5): one leftover unit; remainders tie at 0.5 and the
    # larger raw count wins
    assert largest_remainder({0: 3, 1: 1}, 2) == {0: 2, 1: 0}


def test_largest_remainder_preserves_target(rng):
    for _ in range(200):
        counts = {g: rng.randint(0, 9) for g in range(rng.randint(1, 6))}
        target = rng.randint(0, 12)
        out = largest_remainder(counts, target)
        if sum(counts.values()) > 0 and target > 0:
            assert sum(out.values()) == target
        else:
            assert sum(out.values()) == 0
        assert all(v >= 0 for v in out.values())


def test_derive_user_thresholds_disjoint():
    # u1 trained on categories {A:3, B:1}, c=4 -> rho(A)=3, rho(B)=1
    train = RatingsDataset(
        [("u1", "v1", 4), ("u1", "v2", 4), ("u1", "v3", 4), ("u1", "v4", 4)]
    )
    ic = Grouping("item", ["A", "B"], [[0], [0], [0], [1]])
    th = derive_user_thresholds(train, ic, ["v1", "v2", "v3", "v4"], ["u1"], [4])
    assert th.user_category == {(0, 0): 3, (0, 1): 1}
    th2 = derive_user_thresholds(train, ic, ["v1", "v2", "v3", "v4"], ["u1"], [2])
    assert th2.user_category == {(0, 0): 2}


def test_derive_user_thresholds_overlapping_scales_target():
    # every item in both categories: avg cats/item = 2, so target = 2*c
    train = RatingsDataset([("u1", "v1", 4), ("u1", "v2", 4)])
    ic = Grouping("item", ["A", "B"], [[0, 1], [0, 1]])
    th = derive_user_thresholds(
        train, ic, ["v1", "v2"], ["u1"], [2], overlapping=True
    )
    assert th.rho(0, 0) + th.rho(0, 1) == 4


def test_derive_user_thresholds_no_training_items():
    train = RatingsDataset([])
    ic = Grouping("item", ["A"], [[0]])
    th = derive_user_thresholds(train, ic, ["v1"], ["u1"], [3])
    assert th.user_category == {}


def test_derive_item_thresholds_budget_trace():
    # sum(c)=10 over 2 items: equal share 5, budget = round(0.2*5) = 1;
    # v1's history types {X:3, Y:1} -> lam(X)=1, lam(Y)=0
    train = RatingsDataset(
        [("u1", "v1", 4), ("u2", "v1", 4), ("u3", "v1", 4), ("u4", "v1", 4)]
    )
    ut = Grouping("user", ["X", "Y"], [[0], [0], [0], [1]])
    th = derive_item_thresholds(
        train, ut, ["u1", "u2", "u3", "u4"], ["v1", "v2"], [3, 3, 2, 2]
    )
    assert th.item_type == {(0, 0): 1}


# ---------------------------------------------------------------------------
# threshold and solution round trips

def test_threshold_round_trip(tmp_path):
    th = ThresholdTable({(0, 1): 2}, {(1, 0): 3})
    p = tmp_path / "th.tsv"
    save_thresholds(th, p, ["u1", "u2"], ["v1", "v2"], ["X", "Y"], ["A", "B"])
    back = load_thresholds(p, ["u1", "u2"], ["v1", "v2"], ["X", "Y"], ["A", "B"])
    assert back.user_category == th.user_category
    assert back.item_type == th.item_type


def test_load_thresholds_rejects_bad_side(tmp_path):
    p = _write(tmp_path, "th.tsv", "edge\tu1\tA\t1\n")
    with pytest.raises(DataFormatError):
        load_thresholds(p, ["u1"], ["v1"], ["X"], ["A"])


def test_solution_round_trip(tmp_path):
    graph = RecGraph(["u1"], [2], ["v1", "v2"], [(0, 0, 0.9), (0, 1, 0.25)])
    ut = Grouping("user", ["X"], [[0]])
    ic = Grouping("item", ["A"], [[0], [0]])
    sol = Solution(graph, ut, ic)
    sol.add_edge(0)
    sol.add_edge(1)
    p = tmp_path / "sol.tsv"
    save_solution(sol, p, "greedy")
    lists = load_solution_lists(p)
    assert lists == {"u1": [("v1", 0.9), ("v2", 0.25)]}
