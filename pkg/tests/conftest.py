"""Shared helpers: brute-force reference oracles and instance builders."""

from __future__ import annotations

import random

import pytest

from ultrahom.graphs import GraphKind, GraphSession


def chase_pairs(pairs, x, k):
    """Pointwise power chase through an explicit pair list."""
    fwd = {a: b for a, b in pairs}
    bwd = {b: a for a, b in pairs}
    v = x
    for _ in range(abs(k)):
        v = (fwd if k > 0 else bwd).get(v)
        if v is None:
            return None
    return v


def brute_compose(p1, p2):
    """Reference composition: apply p1 then p2, pointwise."""
    out = []
    d2 = {a: b for a, b in p2}
    for a, b in p1:
        if b in d2:
            out.append((a, d2[b]))
    return sorted(out)


def brute_components(pairs):
    """Partition of the support into chains/cycles by pointwise chasing."""
    fwd = {a: b for a, b in pairs}
    bwd = {b: a for a, b in pairs}
    support = sorted(set(fwd) | set(bwd))
    seen = set()
    comps = []
    for v in support:
        if v in seen:
            continue
        head = v
        cyclic = False
        for _ in range(len(support) + 1):
            if head not in bwd:
                break
            head = bwd[head]
            if head == v:
                cyclic = True
                break
        chain = [head]
        cur = head
        while cur in fwd and fwd[cur] != head:
            cur = fwd[cur]
            chain.append(cur)
        seen.update(chain)
        comps.append((tuple(chain), cyclic))
    return sorted(comps)


def random_injection_in_clique(session: GraphSession, rng: random.Random,
                               size: int, spread: int = 12):
    """Random partial bijection inside one complete component of n K_omega.

    Any injection within a clique preserves adjacency, which makes these
    ideal raw material for algebra property tests.
    """
    pts = rng.sample(range(spread), min(spread, 2 * size))
    dom = pts[:size]
    ran = pts[size:2 * size]
    return [(session.vertex(1, a), session.vertex(1, b)) for a, b in zip(dom, ran)]


@pytest.fixture
def nk2():
    return GraphSession(GraphKind.nk_omega(2))


@pytest.fixture
def nk3():
    return GraphSession(GraphKind.nk_omega(3))


@pytest.fixture
def ok2():
    return GraphSession(GraphKind.omega_kn(2))


@pytest.fixture
def h3():
    return GraphSession(GraphKind.henson(3))
