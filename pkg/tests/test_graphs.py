import random
from itertools import combinations

import pytest

from ultrahom.errors import GraphError
from ultrahom.graphs import GraphKind, GraphSession, triangle_witness


def test_kind_parameter_ranges():
    with pytest.raises(GraphError):
        GraphKind.henson(2)
    with pytest.raises(GraphError):
        GraphKind.nk_omega(1)
    with pytest.raises(GraphError):
        GraphKind.omega_kn(0)
    assert GraphKind.henson(3).is_lazy
    assert GraphKind.omega_kn(1).is_component


def test_component_encoding_round_trips():
    s = GraphSession(GraphKind.omega_kn(3))
    for c in range(-5, 6):
        for p in range(3):
            v = s.vertex(c, p)
            assert (s.component_of(v), s.position_of(v)) == (c, p)
    t = GraphSession(GraphKind.nk_omega(4))
    for c in range(1, 5):
        for p in range(6):
            v = t.vertex(c, p)
            assert (t.component_of(v), t.position_of(v)) == (c, p)


def test_component_adjacency():
    s = GraphSession(GraphKind.nk_omega(2))
    assert s.adjacent(s.vertex(1, 0), s.vertex(1, 7))
    assert not s.adjacent(s.vertex(1, 0), s.vertex(2, 0))
    assert not s.adjacent(s.vertex(1, 3), s.vertex(1, 3))


def test_adjacency_symmetric_irreflexive_lazy(h3):
    rng = random.Random(0)
    for _ in range(30):
        realized = h3.realized()
        U = [v for v in realized if rng.random() < 0.3]
        if not h3.kn_free_check(U, 2):
            U = U[:1]
        h3.alice_witness(U, set(realized) - set(U))
        assert h3.check_witness_contract()
    for u in h3.realized():
        assert not h3.adjacent(u, u)
        for v in h3.realized():
            assert h3.adjacent(u, v) == h3.adjacent(v, u)


def test_witness_contract_and_errors(h3):
    a = h3.alice_witness((), ())
    b = h3.alice_witness((a,), ())
    w = h3.alice_witness((a,), (b,), forbidden=(a, b))
    assert h3.adjacent(w, a) and not h3.adjacent(w, b)
    with pytest.raises(GraphError):
        h3.alice_witness((a,), (a,))  # overlap
    with pytest.raises(GraphError, match="forbidden clique"):
        h3.alice_witness((a, b), ())  # a ~ b is a K_2 inside U
    with pytest.raises(GraphError, match="unknown vertex"):
        h3.adjacent(0, 10 ** 6)


def test_witness_empty_constraints_is_isolated(h3):
    a = h3.alice_witness((), ())
    b = h3.alice_witness((), ())
    assert not h3.adjacent(a, b)
    assert h3.neighbors_within(b, h3.realized()) == set()


def test_random_graph_allows_cliques():
    s = GraphSession(GraphKind.random())
    a, b, c = triangle_witness(s)
    assert s.adjacent(a, b) and s.adjacent(b, c) and s.adjacent(a, c)
    assert not s.kn_free_check([a, b, c], 3)


def test_neighbors_within(ok2):
    x = ok2.vertex(0, 0)
    S = set(ok2.component_vertices(0)) | {ok2.vertex(1, 0)}
    assert ok2.neighbors_within(x, S) == set(ok2.component_vertices(0)) - {x}
    assert ok2.neighbors_within(x, ()) == set()


def test_kn_free_check_matches_exhaustive(h3):
    rng = random.Random(1)
    for _ in range(60):
        realized = h3.realized()
        U = [v for v in realized if rng.random() < 0.25]
        if not h3.kn_free_check(U, 2):
            U = []
        h3.alice_witness(U, ())
    verts = h3.realized()
    for k in (2, 3, 4):
        naive = not any(all(h3.adjacent(u, v) for u, v in combinations(S, 2))
                        for S in combinations(verts, k))
        assert h3.kn_free_check(verts, k) == naive
    with pytest.raises(GraphError):
        h3.kn_free_check(verts, 1)


def test_henson_stays_kn_free_after_campaign():
    s = GraphSession(GraphKind.henson(3))
    rng = random.Random(2)
    for _ in range(1000):
        realized = s.realized()
        U = [v for v in realized if rng.random() < 0.15]
        if not s.kn_free_check(U, 2):
            U = U[:1]
        s.alice_witness(U, (), forbidden=[v for v in realized if rng.random() < 0.05])
        assert s.check_witness_contract()
    assert s.kn_free_check(s.realized(), 3)


def test_transcript_replay_determinism(h3):
    rng = random.Random(3)
    for _ in range(25):
        realized = h3.realized()
        U = [v for v in realized if rng.random() < 0.3]
        if not h3.kn_free_check(U, 2):
            U = U[:1]
        h3.alice_witness(U, set(realized) - set(U))
    clone = GraphSession.replay(h3.kind, h3.transcript())
    assert clone.realized() == h3.realized()
    for u in h3.realized():
        for v in h3.realized():
            assert clone.adjacent(u, v) == h3.adjacent(u, v)
    textual = GraphSession.replay_text(h3.kind, h3.transcript_text())
    assert textual.transcript() == h3.transcript()


def test_snapshot_is_read_only(h3):
    h3.alice_witness((), ())
    snap = h3.snapshot()
    with pytest.raises(GraphError, match="read-only"):
        snap.alice_witness((), ())
    h3.alice_witness((), ())  # original still grows
    assert len(snap.realized()) + 1 == len(h3.realized())


def test_fresh_in_component_deterministic(nk2):
    got = nk2.fresh_in_component(1, avoid={nk2.vertex(1, 0), nk2.vertex(1, 1)})
    assert got == nk2.vertex(1, 2)
    s = GraphSession(GraphKind.omega_kn(2))
    assert s.fresh_component({0, 1, -1}) == -2  # zig-zag order on Z
