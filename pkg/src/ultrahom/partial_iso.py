"""Finite partial isomorphism algebra.

A partial isomorphism is a finite injective adjacency-preserving vertex
map, composed left to right: ``(x)(f * g) = ((x)f)g`` on the domain
``{x in dom(f) : (x)f in dom(g)}``.  Values are immutable; every
extension returns a new value so construction chains keep all their
intermediate stages.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import IsoError
from .graphs import GraphSession


@dataclass(frozen=True)
class PartialIso:
    session: GraphSession
    _fwd: dict[int, int] = field(repr=False)
    _bwd: dict[int, int] = field(repr=False)

    # -- queries ---------------------------------------------------------------

    def pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self._fwd.items()))

    def dom(self) -> set[int]:
        return set(self._fwd)

    def ran(self) -> set[int]:
        return set(self._bwd)

    def support(self) -> set[int]:
        return set(self._fwd) | set(self._bwd)

    def apply(self, x: int) -> int | None:
        return self._fwd.get(x)

    def unapply(self, y: int) -> int | None:
        return self._bwd.get(y)

    def chase(self, x: int, k: int) -> int | None:
        """(x)f^k with the empty product at k=0; None when undefined."""
        v = x
        step = self._fwd if k >= 0 else self._bwd
        for _ in range(abs(k)):
            v = step.get(v)
            if v is None:
                return None
        return v

    def __len__(self) -> int:
        return len(self._fwd)

    def __eq__(self, other) -> bool:
        return isinstance(other, PartialIso) and self._fwd == other._fwd

    def __hash__(self):
        return hash(self.pairs())

    def __repr__(self) -> str:
        return f"PartialIso({dict(sorted(self._fwd.items()))})"

    def extends(self, other: "PartialIso") -> bool:
        return all(self._fwd.get(x) == y for x, y in other._fwd.items())

    # -- structure ---------------------------------------------------------------

    def components(self) -> "ComponentView":
        return ComponentView.of(self)

    def index_map(self) -> dict[int, int]:
        """Induced partial map on graph-component indices (component families).

        Well defined and injective for every valid partial isomorphism,
        because adjacency inside components is complete.
        """
        s = self.session
        out: dict[int, int] = {}
        for x, y in self._fwd.items():
            out[s.component_of(x)] = s.component_of(y)
        return out


def validate(session: GraphSession, pairs: Iterable[tuple[int, int]]) -> PartialIso:
    """Check injectivity and adjacency preservation; raise IsoError otherwise."""
    if session.kind.is_component:
        return _validate_component(session, pairs)
    fwd: dict[int, int] = {}
    bwd: dict[int, int] = {}
    items: list[tuple[int, int]] = []
    for x, y in pairs:
        session._require((x, y))
        prev = fwd.get(x)
        if prev is not None:
            if prev != y:
                raise IsoError("not-injective", [(x, prev), (x, y)], "two images for one point")
            continue
        if y in bwd:
            raise IsoError("not-injective", [(bwd[y], y), (x, y)], "two preimages for one point")
        for x2, y2 in items:
            if session.adjacent(x, x2) != session.adjacent(y, y2):
                _raise_adjacency(session, (x, y), (x2, y2))
        fwd[x] = y
        bwd[y] = x
        items.append((x, y))
    return PartialIso(session, fwd, bwd)


def _validate_component(session: GraphSession, pairs) -> PartialIso:
    """Component graphs: adjacency preservation is exactly a well-defined,
    injective induced index map, checkable pair by pair."""
    fwd: dict[int, int] = {}
    bwd: dict[int, int] = {}
    cmap: dict[int, tuple[int, tuple[int, int]]] = {}
    cinv: dict[int, tuple[int, tuple[int, int]]] = {}
    comp = session.component_of
    for x, y in pairs:
        prev = fwd.get(x)
        if prev is not None:
            if prev != y:
                raise IsoError("not-injective", [(x, prev), (x, y)], "two images for one point")
            continue
        if y in bwd:
            raise IsoError("not-injective", [(bwd[y], y), (x, y)], "two preimages for one point")
        cx, cy = comp(x), comp(y)
        seen = cmap.get(cx)
        if seen is not None and seen[0] != cy:
            raise IsoError("component-split", [seen[1], (x, y)],
                           f"component {cx} mapped into both {seen[0]} and {cy};"
                           " induced index map ill-defined")
        hit = cinv.get(cy)
        if hit is not None and hit[0] != cx:
            raise IsoError("component-collision", [hit[1], (x, y)],
                           f"components {hit[0]} and {cx} both mapped into {cy};"
                           " induced index map not injective")
        cmap[cx] = (cy, (x, y))
        cinv[cy] = (cx, (x, y))
        fwd[x] = y
        bwd[y] = x
    return PartialIso(session, fwd, bwd)


def _raise_adjacency(session, p1, p2):
    if session.kind.is_component:
        c1, c2 = session.component_of(p1[0]), session.component_of(p2[0])
        d1, d2 = session.component_of(p1[1]), session.component_of(p2[1])
        if c1 == c2 and d1 != d2:
            raise IsoError("component-split", [p1, p2],
                           f"component {c1} mapped into both {d1} and {d2};"
                           " induced index map ill-defined")
        if c1 != c2 and d1 == d2:
            raise IsoError("component-collision", [p1, p2],
                           f"components {c1} and {c2} both mapped into {d1};"
                           " induced index map not injective")
    raise IsoError("adjacency-mismatch", [p1, p2])


def empty(session: GraphSession) -> PartialIso:
    return PartialIso(session, {}, {})


def from_pairs(session: GraphSession, pairs: Iterable[tuple[int, int]]) -> PartialIso:
    return validate(session, pairs)


def identity_on(session: GraphSession, S: Iterable[int]) -> PartialIso:
    return PartialIso(session, {v: v for v in S}, {v: v for v in S})


def extend(f: PartialIso, x: int, y: int) -> PartialIso:
    """f u {(x, y)}, checking only the new pair (f is already valid)."""
    if f.apply(x) is not None:
        if f.apply(x) == y:
            return f
        raise IsoError("not-injective", [(x, f.apply(x)), (x, y)])
    if f.unapply(y) is not None:
        raise IsoError("not-injective", [(f.unapply(y), y), (x, y)])
    s = f.session
    if s.kind.is_component:
        comp = s.component_of
        cx, cy = comp(x), comp(y)
        for x2, y2 in f._fwd.items():
            if (comp(x2) == cx) != (comp(y2) == cy):
                _raise_adjacency(s, (x, y), (x2, y2))
    else:
        s._require((x, y))
        for x2, y2 in f._fwd.items():
            if s.adjacent(x, x2) != s.adjacent(y, y2):
                _raise_adjacency(s, (x, y), (x2, y2))
    fwd = dict(f._fwd)
    bwd = dict(f._bwd)
    fwd[x] = y
    bwd[y] = x
    return PartialIso(f.session, fwd, bwd)


def union_extend(f: PartialIso, pairs: Iterable[tuple[int, int]]) -> PartialIso:
    """Validated union; the first conflicting pair is named in the rejection."""
    g = f
    for x, y in pairs:
        g = extend(g, x, y)
    return g


def compose(f: PartialIso, g: PartialIso, *rest: PartialIso) -> PartialIso:
    """Apply f first, then g: domain {x in dom(f) : (x)f in dom(g)}."""
    if f.session is not g.session:
        raise IsoError("session-mismatch", [], "operands belong to different sessions")
    fwd = {}
    for x, y in f._fwd.items():
        z = g.apply(y)
        if z is not None:
            fwd[x] = z
    out = PartialIso(f.session, fwd, {z: x for x, z in fwd.items()})
    for r in rest:
        out = compose(out, r)
    return out


def invert(f: PartialIso) -> PartialIso:
    return PartialIso(f.session, dict(f._bwd), dict(f._fwd))


def power(f: PartialIso, k: int) -> PartialIso:
    """f^k by iterated composition; f^0 is the identity on dom(f)."""
    if k == 0:
        return identity_on(f.session, f.dom())
    step = f._fwd if k > 0 else f._bwd
    fwd = {}
    for x in (f._fwd if k > 0 else f._bwd):
        v = x
        for _ in range(abs(k)):
            v = step.get(v)
            if v is None:
                break
        if v is not None:
            fwd[x] = v
    return PartialIso(f.session, fwd, {y: x for x, y in fwd.items()})


@dataclass(frozen=True)
class Component:
    """One forward-orbit block of a partial bijection.

    ``vertices`` follow the map order; a complete component is a cycle
    (the last vertex maps back to the first), an incomplete one is a
    chain whose head is outside ran and tail outside dom.  Length is
    counted in vertices.
    """

    vertices: tuple[int, ...]
    complete: bool

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def head(self) -> int:
        return self.vertices[0]

    @property
    def tail(self) -> int:
        return self.vertices[-1]


@dataclass(frozen=True)
class ComponentView:
    components: tuple[Component, ...]

    @staticmethod
    def of(f: PartialIso) -> "ComponentView":
        seen: set[int] = set()
        comps: list[Component] = []
        for v in sorted(f.support()):
            if v in seen:
                continue
            start = v
            complete = False
            while True:
                prev = f.unapply(start)
                if prev is None:
                    break
                if prev == v:
                    complete = True  # walked a full cycle
                    start = v
                    break
                start = prev
            chain = [start]
            cur = start
            while True:
                nxt = f.apply(cur)
                if nxt is None or nxt == start:
                    break
                chain.append(nxt)
                cur = nxt
            seen.update(chain)
            comps.append(Component(tuple(chain), complete))
        return ComponentView(tuple(comps))

    def find(self, v: int) -> Component:
        for c in self.components:
            if v in c.vertices:
                return c
        raise KeyError(v)

    def complete_components(self) -> list[Component]:
        return [c for c in self.components if c.complete]

    def incomplete_components(self) -> list[Component]:
        return [c for c in self.components if not c.complete]


def cycle_free(f: PartialIso) -> bool:
    """True iff f has no complete component (so f extends to a map with no finite orbit)."""
    return not f.components().complete_components()


def orbit_rep_profile(f: PartialIso, sigma: Iterable[int]) -> dict[int, int]:
    """Per-component count of hits by sigma, keyed by the component's head vertex."""
    sig = set(sigma)
    out = {}
    for c in f.components().components:
        out[c.head] = len(sig & set(c.vertices))
    return out


def profile_at_most_one(f: PartialIso, sigma: Iterable[int]) -> bool:
    return all(k <= 1 for k in orbit_rep_profile(f, sigma).values())


def profile_complete_exactly_one(f: PartialIso, sigma: Iterable[int]) -> bool:
    sig = set(sigma)
    return all(len(sig & set(c.vertices)) == 1
               for c in f.components().complete_components())


def index_perm_of(f: PartialIso, n: int):
    """Total induced index permutation for an n K_omega map, or None if partial."""
    from .perms import IndexPerm

    imap = f.index_map()
    if set(imap) != set(range(1, n + 1)):
        return None
    return IndexPerm(tuple(imap[i] for i in range(1, n + 1)))
