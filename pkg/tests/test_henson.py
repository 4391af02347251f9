import random

import pytest

from ultrahom.campaigns import henson_trial
from ultrahom.certs import verify
from ultrahom.errors import HypothesisError
from ultrahom.graphs import GraphKind, GraphSession
from ultrahom.henson import (SeparatedIso, build_conjugator, chain_link,
                             density_witness_henson, neigh_extend,
                             one_point_extend, pad_components, split_separated)
from ultrahom.oracles import LazyOracle
from ultrahom.partial_iso import (compose, cycle_free, empty, from_pairs,
                                  power)


def fresh(s, U=(), V_all=True):
    return s.alice_witness(U, set(s.realized()) - set(U) if V_all else ())


def test_neigh_extend_success_and_failure(h3):
    a, b = fresh(h3), fresh(h3)
    q = neigh_extend(empty(h3), a, b)
    assert q.pairs() == ((a, b),)
    # y adjacent to an image whose preimage is not a neighbour of x
    c = fresh(h3)
    d = fresh(h3, U=(b,))
    with pytest.raises(HypothesisError, match="neighbourhood-match"):
        neigh_extend(q, c, d)
    with pytest.raises(HypothesisError, match="x-free"):
        neigh_extend(q, a, c)


def test_one_point_extend_contract(h3):
    a = fresh(h3)
    b = fresh(h3, U=(a,))
    q = from_pairs(h3, [(a, b)])
    avoid = set(q.ran())
    q2, y = one_point_extend(q, b, avoid)
    assert y not in avoid and y != b
    assert q2.extends(q) and cycle_free(q2)
    # witness postcondition: the new image mirrors the source neighbourhood
    assert h3.neighbors_within(y, q.ran()) == {q.apply(u) for u in
                                               h3.neighbors_within(b, q.dom())}


def test_one_point_extend_keeps_class(h3):
    rng = random.Random(20)
    q = empty(h3)
    start = fresh(h3)
    q, _ = one_point_extend(q, start)
    for _ in range(6):
        tail = sorted(q.ran() - q.dom())[0]
        q, _ = one_point_extend(q, tail)
        assert cycle_free(q)


def test_pad_components_uniform(h3):
    q = empty(h3)
    a = fresh(h3)
    q, _ = one_point_extend(q, a)
    b = fresh(h3)
    q, y = one_point_extend(q, b)
    q, _ = one_point_extend(q, y)
    padded, m = pad_components(q)
    assert m == 3
    assert {len(c) for c in padded.components().components} == {3}
    assert padded.extends(q)


def test_chain_link_degenerate(h3):
    x, y = fresh(h3), fresh(h3)
    out = chain_link(empty(h3), set(), set(), x, y, m=1, sigma1=set(), sigma2=set())
    assert out.chase(x, 2) == y
    assert cycle_free(out)
    interior = out.support() - {x, y}
    assert len(interior) == 1


def test_chain_link_hypothesis_errors(h3):
    x, y = fresh(h3), fresh(h3)
    q = from_pairs(h3, [(x, y)])
    with pytest.raises(HypothesisError):
        chain_link(q, set(), {x, y}, x, y, 1, set(), set())  # endpoints not free
    z = fresh(h3)
    with pytest.raises(HypothesisError, match="gamma-length"):
        chain_link(q, set(), {x, y}, z, fresh(h3), 3, set(), set())


def test_build_conjugator_single_pair(h3):
    a, b = fresh(h3), fresh(h3)
    p = SeparatedIso(from_pairs(h3, [(a, b)]))
    h, m = build_conjugator(empty(h3), p)
    assert power(h, 2 * m).extends(p.iso)
    assert cycle_free(h)


def test_build_conjugator_two_pairs_with_edges(h3):
    a = fresh(h3)
    b = fresh(h3, U=(a,))
    c = fresh(h3)
    d = fresh(h3, U=(c,))
    p = SeparatedIso(from_pairs(h3, [(a, c), (b, d)]))
    q = empty(h3)
    start = fresh(h3)
    q, _ = one_point_extend(q, start, avoid=p.iso.support())
    h, m = build_conjugator(q, p)
    assert power(h, 2 * m).extends(p.iso)
    assert h.extends(q)


def test_build_conjugator_rejects_shared_support(h3):
    a, b = fresh(h3), fresh(h3)
    p = SeparatedIso(from_pairs(h3, [(a, b)]))
    q = from_pairs(h3, [(a, fresh(h3))])
    with pytest.raises(HypothesisError, match="supports-disjoint"):
        build_conjugator(q, p)


def test_separated_class_rejects_edges(h3):
    a = fresh(h3)
    b = fresh(h3, U=(a,))
    with pytest.raises(HypothesisError, match="separated"):
        SeparatedIso(from_pairs(h3, [(a, b)]))
    with pytest.raises(HypothesisError, match="separated"):
        SeparatedIso(from_pairs(h3, [(a, a)]))


def test_split_separated(h3):
    a = fresh(h3)
    b = fresh(h3, U=(a,))
    c = fresh(h3)
    d = fresh(h3, U=(c,))
    q = from_pairs(h3, [(a, c), (b, d)])
    p1, p2 = split_separated(q)
    assert compose(p1.iso, p2.iso).extends(q)
    assert split_separated(empty(h3))[0].iso.pairs() == ()


def test_density_witness_trivial_target(h3):
    f = LazyOracle(h3)
    cert = density_witness_henson(f, empty(h3), SeparatedIso(empty(h3)))
    assert verify(cert).ok


def test_density_witness_shifted_oracle(h3):
    f = LazyOracle(h3)
    a, b = fresh(h3), fresh(h3)
    f.image(a)  # pre-populate a shift-like cache
    p = SeparatedIso(from_pairs(h3, [(a, b)]))
    cert = density_witness_henson(f, empty(h3), p)
    assert verify(cert).ok
    assert cert.data["m"] >= 1 and cert.data["l"] >= 1


def test_density_witness_randomized_small():
    for seed in range(8):
        cert = henson_trial(3, random.Random(seed))
        report = verify(cert)
        assert report.ok, str(report)


def test_density_witness_henson_n4():
    cert = henson_trial(4, random.Random(77))
    assert verify(cert).ok
