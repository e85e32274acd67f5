"""Synthetic instance generators for tests and demos.

Small random instances exercise the solvers against brute force; the
MovieLens-shaped generator produces a skewed, popularity-biased candidate
graph whose top-relevance lists are deliberately un-diverse, so that
diversification has visible room to act.
"""

from __future__ import annotations

import random

import numpy as np

from .graph import DivParams, Grouping, RecGraph, ThresholdTable


def random_instance(
    rng: random.Random,
    max_users: int = 5,
    max_items: int = 7,
    max_constraint: int = 3,
    max_threshold: int = 2,
    overlapping: bool = False,
    beta_mu_choices: tuple[float, ...] = (0.0, 0.5, 1.0, 4.0),
) -> tuple[RecGraph, Grouping, Grouping, ThresholdTable, DivParams]:
    """Small random instance with full group membership on both sides."""
    nu = rng.randint(1, max_users)
    ni = rng.randint(1, max_items)
    ncat = rng.randint(1, 3)
    ntype = rng.randint(1, 3)
    edges = []
    for u in range(nu):
        for v in range(ni):
            if rng.random() < 0.6:
                edges.append((u, v, round(rng.random(), 6)))
    if not edges:
        edges.append((0, 0, round(rng.random(), 6)))
    graph = RecGraph(
        [f"u{i}" for i in range(nu)],
        [rng.randint(1, max_constraint) for _ in range(nu)],
        [f"v{j}" for j in range(ni)],
        edges,
    )

    def memberships(n: int, ngroups: int) -> list[list[int]]:
        out = []
        for _ in range(n):
            if overlapping:
                size = rng.randint(1, ngroups)
                out.append(sorted(rng.sample(range(ngroups), size)))
            else:
                out.append([rng.randrange(ngroups)])
        return out

    user_types = Grouping("user", [f"T{b}" for b in range(ntype)], memberships(nu, ntype))
    item_cats = Grouping("item", [f"C{a}" for a in range(ncat)], memberships(ni, ncat))
    uc = {
        (u, a): rng.randint(0, max_threshold)
        for u in range(nu)
        for a in range(ncat)
    }
    it = {
        (j, b): rng.randint(0, max_threshold)
        for j in range(ni)
        for b in range(ntype)
    }
    params = DivParams(rng.choice(beta_mu_choices), rng.choice(beta_mu_choices))
    return graph, user_types, item_cats, ThresholdTable(uc, it), params


def movielens_shaped(
    num_users: int = 2000,
    num_items: int = 1500,
    candidates_per_user: int = 250,
    num_cats: int = 18,
    num_types: int = 7,
    constraint: int = 20,
    overlapping_cats: bool = True,
    seed: int = 7,
) -> tuple[RecGraph, Grouping, Grouping]:
    """Popularity-skewed candidate graph: a Zipf-like item popularity drives
    both candidate selection and relevance, and each user's taste leans
    toward two categories, so pure relevance ranking concentrates on few
    popular items and categories."""
    rng = np.random.default_rng(seed)
    # flat-ish decay keeps popularity differences meaningful across the whole
    # candidate range, so pure relevance ranking concentrates on the head
    popularity = 1.0 / np.arange(1, num_items + 1) ** 0.5
    popularity /= popularity.sum()

    item_cat_membership: list[list[int]] = []
    primary_cat = rng.integers(0, num_cats, size=num_items)
    for j in range(num_items):
        cats = {int(primary_cat[j])}
        if overlapping_cats:
            extra = rng.random()
            if extra < 0.4:
                cats.add(int(rng.integers(0, num_cats)))
        item_cat_membership.append(sorted(cats))
    user_type_membership = [[int(t)] for t in rng.integers(0, num_types, size=num_users)]

    taste = rng.integers(0, num_cats, size=(num_users, 2))
    edges: list[tuple[int, int, float]] = []
    for u in range(num_users):
        chosen = rng.choice(
            num_items, size=min(candidates_per_user, num_items), replace=False,
            p=popularity,
        )
        noise = rng.random(len(chosen))
        for j, eps in zip(chosen, noise):
            j = int(j)
            bonus = 0.05 if primary_cat[j] in taste[u] else 0.0
            rel = 0.8 * popularity[j] / popularity[0] + bonus + 0.05 * eps
            edges.append((u, j, round(float(rel), 6)))

    graph = RecGraph(
        [f"u{u}" for u in range(num_users)],
        [constraint] * num_users,
        [f"v{j}" for j in range(num_items)],
        edges,
    )
    user_types = Grouping("user", [f"T{b}" for b in range(num_types)], user_type_membership)
    item_cats = Grouping("item", [f"C{a}" for a in range(num_cats)], item_cat_membership)
    return graph, user_types, item_cats
