"""Density-witness constructions for countably many disjoint copies of K_n.

Components are indexed by the integers.  Partial isomorphisms whose
domain is a union of components are handled through their induced index
map; orbit-representative bookkeeping rides on the one-hit-per-chain
invariant.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .certs import OMEGA_CLAIM, WitnessCertificate
from .errors import GraphError, HypothesisError, internal_check
from .graphs import GraphSession, _unzigzag, _zigzag
from .oracles import OmegaShiftOracle
from .partial_iso import (PartialIso, orbit_rep_profile, validate)


@dataclass(frozen=True)
class SigmaPlacement:
    """A finite orbit-representative candidate set, summarized per component."""

    vertices: tuple[int, ...]
    counts: dict[int, int]

    @staticmethod
    def of(session: GraphSession, sigma) -> "SigmaPlacement":
        counts: dict[int, int] = {}
        for v in sigma:
            counts[session.component_of(v)] = counts.get(session.component_of(v), 0) + 1
        return SigmaPlacement(tuple(sorted(set(sigma))), counts)

    @staticmethod
    def from_counts(session: GraphSession, counts: dict[int, int]) -> "SigmaPlacement":
        verts = []
        for c, k in sorted(counts.items()):
            if not 0 <= k <= session.kind.n:
                raise GraphError(f"count {k} impossible in a K_{session.kind.n} component")
            verts.extend(session.vertex(c, p) for p in range(k))
        return SigmaPlacement(tuple(verts), {c: k for c, k in counts.items() if k})

    def size(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class WholeComponentIso:
    """Map between disjoint unions of whole components, cycle-free on indices."""

    iso: PartialIso

    def __post_init__(self):
        iso = self.iso
        s = iso.session
        if iso.dom() & iso.ran():
            raise HypothesisError("whole-disjoint", "domain meets range")
        imap = iso.index_map()
        for c in imap:
            if not set(s.component_vertices(c)) <= iso.dom():
                raise HypothesisError("whole-dom", f"component {c} only partly in the domain")
        for c in imap.values():
            if not set(s.component_vertices(c)) <= iso.ran():
                raise HypothesisError("whole-ran", f"component {c} only partly in the range")
        if _index_cycles(imap):
            raise HypothesisError("index-cycle-free", "induced index map has a cycle")


def _index_cycles(imap: dict[int, int]) -> bool:
    for start in imap:
        cur = start
        while cur in imap:
            cur = imap[cur]
            if cur == start:
                return True
    return False


def _index_chains(imap: dict[int, int]) -> list[list[int]]:
    """Chains of the (injective, acyclic) index map, heads first, sorted."""
    sources = set(imap)
    targets = set(imap.values())
    chains = []
    for head in sorted(sources - targets, key=_zigzag):
        chain = [head]
        while chain[-1] in imap:
            chain.append(imap[chain[-1]])
        chains.append(chain)
    return chains


def in_orbit_rep_class(q: PartialIso, sigma) -> bool:
    """Can q grow to an automorphism with no finite orbit and sigma as orbit reps?

    Requires dom(q) to be a union of components with sigma inside it
    hitting every component of q exactly once; the answer is then read
    off the induced index map: no cycles.
    """
    s = q.session
    sigma = set(sigma)
    for c in {s.component_of(v) for v in q.dom()}:
        missing = set(s.component_vertices(c)) - q.dom()
        if missing:
            raise HypothesisError("dom-union-of-components",
                                  f"component {c} missing vertex {min(missing)}")
    if not sigma <= q.dom():
        raise HypothesisError("sigma-in-dom", f"vertex {min(sigma - q.dom())} outside dom(q)")
    profile = orbit_rep_profile(q, sigma)
    for head, k in profile.items():
        if k != 1:
            raise HypothesisError("sigma-one-per-component",
                                  f"component of {head} has {k} representatives")
    return not _index_cycles(q.index_map())


@dataclass(frozen=True)
class OrbitPartition:
    """Partition of the component indices into r infinite parts.

    Only the finitely many representative-carrying indices are explicit;
    every other index joins the parts round-robin in zig-zag order.
    """

    n: int
    parts: tuple[tuple[int, ...], ...]

    @property
    def r(self) -> int:
        return len(self.parts)

    def tail_stream(self):
        carriers = {c for part in self.parts for c in part}
        u = 0
        while True:
            c = _unzigzag(u)
            if c not in carriers:
                yield c
            u += 1

    def part_members(self, i: int, count: int) -> list[int]:
        """First ``count`` members of part i: explicit carriers then its tail share."""
        out = list(self.parts[i])
        gen = self.tail_stream()
        k = 0
        while len(out) < count:
            c = next(gen)
            if k % self.r == i:
                out.append(c)
            k += 1
        return out[:count]


def feasible_partition(n: int, placement: SigmaPlacement) -> OrbitPartition | None:
    """Partition decision for orbit representatives: blocks of weight exactly n.

    None when the class is empty: size not a positive multiple of n, or
    the per-component counts cannot be grouped into blocks summing to n.
    """
    total = placement.size()
    if total == 0 or total % n != 0:
        return None
    r = total // n
    carriers = sorted(placement.counts.items(), key=lambda kv: _zigzag(kv[0]))
    loads = [0] * r
    blocks: list[list[int]] = [[] for _ in range(r)]

    def assign(i: int) -> bool:
        if i == len(carriers):
            return all(load == n for load in loads)
        comp, weight = carriers[i]
        tried = set()
        for j in range(r):
            if loads[j] in tried or loads[j] + weight > n:
                continue
            tried.add(loads[j])  # parts with equal load are symmetric
            loads[j] += weight
            blocks[j].append(comp)
            if assign(i + 1):
                return True
            loads[j] -= weight
            blocks[j].pop()
        return False

    if not assign(0):
        return None
    return OrbitPartition(n, tuple(tuple(b) for b in blocks))


def build_from_partition(session: GraphSession, placement: SigmaPlacement,
                         partition: OrbitPartition, depth: int) -> PartialIso:
    """Interleaved truncation of the automorphism the partition promises.

    Per part: stage 1 is a bijection between the part's first two
    components; even stages extend on the left, odd stages on the right,
    always routing representative vertices onto chains that carry none
    yet.  ``depth`` counts bijection stages per part; stages are
    monotone, so deepening never rewrites earlier pairs.
    """
    n = session.kind.n
    sigma = set(placement.vertices)
    pairs: list[tuple[int, int]] = []
    for i in range(partition.r):
        members = partition.part_members(i, depth + 2)
        stream = iter(members)
        chains: list[dict] = []  # per vertex chain: head, tail, hit

        def seed(a: int, b: int):
            av = sorted(session.component_vertices(a))
            bv = sorted(session.component_vertices(b))
            a_hot = [v for v in av if v in sigma]
            a_cold = [v for v in av if v not in sigma]
            b_hot = [v for v in bv if v in sigma]
            b_cold = [v for v in bv if v not in sigma]
            if len(a_hot) + len(b_hot) > n:
                raise HypothesisError("partition-weight",
                                      f"components {a},{b} overload their part")
            targets = b_cold[:len(a_hot)] + b_hot + b_cold[len(a_hot):]
            for v, w in zip(a_hot + a_cold, targets):
                pairs.append((v, w))
                chains.append({"head": v, "tail": w, "hit": v in sigma or w in sigma})

        def extend_left(comp: int):
            src = sorted(session.component_vertices(comp))
            hot = [v for v in src if v in sigma]
            cold = [v for v in src if v not in sigma]
            free = sorted(c["head"] for c in chains if not c["hit"])
            used = sorted(c["head"] for c in chains if c["hit"])
            if len(hot) > len(free):
                raise HypothesisError("partition-weight",
                                      f"component {comp} overloads its part")
            heads = free[:len(hot)] + used + free[len(hot):]
            by_head = {c["head"]: c for c in chains}
            for v, head in zip(hot + cold, heads):
                pairs.append((v, head))
                c = by_head[head]
                c["head"] = v
                c["hit"] = c["hit"] or v in sigma

        def extend_right(comp: int):
            dst = sorted(session.component_vertices(comp))
            hot = [v for v in dst if v in sigma]
            cold = [v for v in dst if v not in sigma]
            free = sorted(c["tail"] for c in chains if not c["hit"])
            used = sorted(c["tail"] for c in chains if c["hit"])
            if len(hot) > len(free):
                raise HypothesisError("partition-weight",
                                      f"component {comp} overloads its part")
            tails = free[:len(hot)] + used + free[len(hot):]
            by_tail = {c["tail"]: c for c in chains}
            for v, tail in zip(hot + cold, tails):
                pairs.append((tail, v))
                c = by_tail[tail]
                c["tail"] = v
                c["hit"] = c["hit"] or v in sigma

        if depth >= 1:
            seed(next(stream), next(stream))
        for stage in range(2, depth + 1):
            if stage % 2 == 0:
                extend_left(next(stream))
            else:
                extend_right(next(stream))

    out = validate(session, pairs)
    profile = orbit_rep_profile(out, sigma)
    internal_check(all(k <= 1 for k in profile.values()), "one-hit-per-chain")
    return out


def _component_bijection(session: GraphSession, src: int, dst: int,
                         fixed: dict[int, int] | None = None) -> list[tuple[int, int]]:
    """Bijection L_src -> L_dst extending ``fixed`` pairs, position-sorted."""
    fixed = fixed or {}
    sv = [v for v in sorted(session.component_vertices(src)) if v not in fixed]
    dv = [v for v in sorted(session.component_vertices(dst))
          if v not in set(fixed.values())]
    return sorted(fixed.items()) + list(zip(sv, dv))


def round_up_to_components(q: PartialIso) -> PartialIso:
    """Extend q so its domain and range are unions of whole components."""
    s = q.session
    pairs = dict(q.pairs())
    imap = q.index_map()
    for c, d in sorted(imap.items(), key=lambda cd: _zigzag(cd[0])):
        fixed = {x: y for x, y in pairs.items() if s.component_of(x) == c}
        for x, y in _component_bijection(s, c, d, fixed):
            pairs[x] = y
    return validate(s, sorted(pairs.items()))


def split_whole_components(q: PartialIso) -> tuple[WholeComponentIso, WholeComponentIso]:
    """Factor (the component-rounding of) q through fresh components."""
    s = q.session
    r = round_up_to_components(q)
    imap = r.index_map()
    used = set(imap) | set(imap.values())
    fresh: dict[int, int] = {}
    for c in sorted(imap, key=_zigzag):
        nc = s.fresh_component(used)
        used.add(nc)
        fresh[c] = nc
    p1_pairs = []
    for c, nc in fresh.items():
        p1_pairs.extend(_component_bijection(s, c, nc))
    p1 = validate(s, p1_pairs)
    from .partial_iso import compose, invert

    p2 = compose(invert(p1), r)
    internal_check(compose(p1, p2).extends(r), "factorization-extends")
    return WholeComponentIso(p1), WholeComponentIso(p2)


def density_witness_omega(f: OmegaShiftOracle, q: PartialIso,
                          p: WholeComponentIso, sigma) -> WitnessCertificate:
    """Build h extending q with (h^m f) h (h^m f)^{-1} extending p.

    Stages: absorb the components of p into the chains of q and equalize
    chain lengths to m components; march every chain m components
    further through indices moved by f and clear of everything seen so
    far; conjugate p by r^m f into a whole-component map u away from r;
    close up with one bridging bijection per gap so the chain count
    stays exactly |sigma|.
    """
    s = q.session
    sigma = sorted(set(sigma))
    if not sigma:
        raise HypothesisError("class-nonempty", "no orbit representatives given")
    if not in_orbit_rep_class(q, sigma):
        raise HypothesisError("class-membership", "index map of q has a cycle")
    q_in = q
    piso = p.iso

    # -- stage 0: absorb p's components, then equalize chain lengths ---------
    imap = q.index_map()
    chains = _index_chains(imap)
    internal_check(len(chains) * s.kind.n == len(sigma), "chain-count")
    pairs = dict(q.pairs())

    def current_chains():
        return _index_chains(validate(s, sorted(pairs.items())).index_map())

    p_comps = sorted({s.component_of(v) for v in piso.support()}, key=_zigzag)
    for c in p_comps:
        covered = {s.component_of(x) for x in pairs}
        ran_only = {s.component_of(y) for y in pairs.values()} - covered
        if c in covered:
            continue
        if c in ran_only:
            # tail component: push the chain one fresh component further
            used = covered | ran_only | set(p_comps)
            nc = s.fresh_component(used)
            for x, y in _component_bijection(s, c, nc):
                pairs[x] = y
        else:
            # fresh component: make it the new head of the first chain
            head = current_chains()[0][0]
            for x, y in _component_bijection(s, c, head):
                pairs[x] = y

    chains = current_chains()
    m = max(len(ch) for ch in chains)
    for ch in chains:
        while len(ch) < m:
            covered = {s.component_of(x) for x in pairs}
            ran_only = {s.component_of(y) for y in pairs.values()} - covered
            nc = s.fresh_component(covered | ran_only | set(p_comps))
            for x, y in _component_bijection(s, ch[-1], nc):
                pairs[x] = y
            ch.append(nc)
    q = validate(s, sorted(pairs.items()))
    internal_check(in_orbit_rep_class(q, sigma), "padded-class-membership")

    # -- stage 1: march each chain m components through moving indices -------
    r_pairs = dict(q.pairs())
    comps_seen = {s.component_of(v) for v in q.support()} | set(p_comps)
    tails = [ch[-1] for ch in _index_chains(q.index_map())]
    marched: list[list[int]] = []
    for tail in tails:
        row = [tail]
        for _ in range(m):
            avoid = comps_seen | {f.index_image(c) for c in comps_seen} \
                | {f.index_preimage(c) for c in comps_seen}
            nc = s.fresh_component(avoid)
            internal_check(f.index_image(nc) != nc, "march-component-moves")
            for x, y in _component_bijection(s, row[-1], nc):
                r_pairs[x] = y
            comps_seen.add(nc)
            row.append(nc)
        marched.append(row)
    r = validate(s, sorted(r_pairs.items()))

    r_comps = {s.component_of(v) for v in r.support()}
    for row in marched:
        for j, c in enumerate(row[1:], start=1):
            internal_check(f.index_image(c) not in r_comps, "march-escapes-forward")
            internal_check(f.index_preimage(c) not in r_comps, "march-escapes-backward")
    for x in sorted(q.dom()):
        for j in range(1, m + 1):
            v = r.chase(x, j)
            internal_check(v is not None, "march-depth")

    # -- stage 2: conjugate p through r^m f and close up ----------------------
    u_pairs = []
    for z in sorted(piso.dom()):
        left = f.image(r.chase(z, m))
        right = f.image(r.chase(piso.apply(z), m))
        u_pairs.append((left, right))
    u = validate(s, u_pairs)
    internal_check(not u.support() & r.support(), "conjugate-avoids-r")
    internal_check(not _index_cycles(u.index_map()), "conjugate-cycle-free")

    h_pairs = dict(r.pairs())
    u_chains = _index_chains(u.index_map())
    if u_chains:
        for left, right in zip(u_chains, u_chains[1:]):
            for x, y in _component_bijection(s, left[-1], right[0]):
                h_pairs[x] = y
        last_tail = marched[-1][-1]
        for x, y in _component_bijection(s, last_tail, u_chains[0][0]):
            h_pairs[x] = y
        for x, y in u.pairs():
            h_pairs[x] = y
    h = validate(s, sorted(h_pairs.items()))

    comps = h.components()
    internal_check(len(comps.incomplete_components()) == len(sigma)
                   and not comps.complete_components(), "chain-count-final")
    internal_check(in_orbit_rep_class(h, sigma), "h-class-membership")
    internal_check(h.extends(q_in), "h-extends-q")

    for x in sorted(piso.dom()):
        v = h.chase(x, m)
        v = f.image(v)
        v = h.apply(v)
        v = f.preimage(v)
        v = h.chase(v, -m)
        internal_check(v == piso.apply(x), "product-extends-target", f"at {x}")

    return WitnessCertificate(
        family=s.kind,
        claim=OMEGA_CLAIM,
        transcript=[],
        oracle=f.description(),
        q=[list(t) for t in q_in.pairs()],
        p=[list(t) for t in piso.pairs()],
        h=[list(t) for t in h.pairs()],
        data={"m": m, "sigma": sigma},
    )
