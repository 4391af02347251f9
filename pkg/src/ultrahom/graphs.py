"""Lazily realized countable ultrahomogeneous graphs.

Four families are supported: the random graph, the universal K_n-free
graphs (n >= 3), countably many disjoint copies of K_n, and n disjoint
copies of the countably infinite complete graph.  A session is the sole
source of adjacency truth.  For the first two families vertices are
created on demand by extension-property witnesses; the component
families have closed-form adjacency and need no growth.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .errors import GraphError

RANDOM = "random"
HENSON = "henson_free"
OMEGA_KN = "omega_kn"
NK_OMEGA = "nk_omega"


@dataclass(frozen=True)
class GraphKind:
    """One of the four countable ultrahomogeneous graph families."""

    tag: str
    n: int | None = None

    @staticmethod
    def random() -> "GraphKind":
        return GraphKind(RANDOM)

    @staticmethod
    def henson(n: int) -> "GraphKind":
        if n < 3:
            raise GraphError(f"K_n-free family needs n >= 3, got {n}")
        return GraphKind(HENSON, n)

    @staticmethod
    def omega_kn(n: int) -> "GraphKind":
        if n < 1:
            raise GraphError(f"omega K_n needs n >= 1, got {n}")
        return GraphKind(OMEGA_KN, n)

    @staticmethod
    def nk_omega(n: int) -> "GraphKind":
        if n < 2:
            raise GraphError(f"n K_omega needs n >= 2, got {n}")
        return GraphKind(NK_OMEGA, n)

    @property
    def is_lazy(self) -> bool:
        return self.tag in (RANDOM, HENSON)

    @property
    def is_component(self) -> bool:
        return self.tag in (OMEGA_KN, NK_OMEGA)

    def to_dict(self) -> dict:
        return {"tag": self.tag, "n": self.n}

    @staticmethod
    def from_dict(d: dict) -> "GraphKind":
        tag, n = d["tag"], d.get("n")
        if tag == RANDOM:
            return GraphKind.random()
        if tag == HENSON:
            return GraphKind.henson(n)
        if tag == OMEGA_KN:
            return GraphKind.omega_kn(n)
        if tag == NK_OMEGA:
            return GraphKind.nk_omega(n)
        raise GraphError(f"unknown graph family tag {tag!r}")


def _zigzag(c: int) -> int:
    """Signed integer -> natural number, bijectively."""
    return 2 * c if c >= 0 else -2 * c - 1


def _unzigzag(u: int) -> int:
    return u // 2 if u % 2 == 0 else -(u + 1) // 2


class GraphSession:
    """A finite, monotonically growing realization of one graph.

    Random / K_n-free: vertices carry ids 0,1,2,... in creation order and
    a new vertex's adjacencies to all earlier vertices are fixed at
    creation (edges exactly to the requested U set), so replaying a
    transcript reproduces ids and adjacency answers bit for bit.

    Component families: vertex ids encode (component, position) through a
    pairing function and adjacency is computed from the encoding; there
    is nothing to grow.
    """

    def __init__(self, kind: GraphKind):
        self.kind = kind
        self._adj: dict[int, set[int]] = {}
        self._transcript: list[tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...], int]] = []
        self._frozen = False

    # -- vertex bookkeeping -------------------------------------------------

    def realized(self) -> list[int]:
        if not self.kind.is_lazy:
            raise GraphError("component graphs do not track realized vertices")
        return sorted(self._adj)

    def is_realized(self, v: int) -> bool:
        if self.kind.is_lazy:
            return v in self._adj
        return v >= 0

    def _require(self, vs: Iterable[int]) -> None:
        for v in vs:
            if not self.is_realized(v):
                raise GraphError(f"unknown vertex {v}")

    # -- component encoding (omega K_n / n K_omega) --------------------------

    def vertex(self, component: int, position: int) -> int:
        """Encode (component, position) as a vertex id."""
        n = self.kind.n
        if self.kind.tag == OMEGA_KN:
            if not 0 <= position < n:
                raise GraphError(f"position {position} out of range for K_{n} component")
            return _zigzag(component) * n + position
        if self.kind.tag == NK_OMEGA:
            if not 1 <= component <= n:
                raise GraphError(f"component {component} out of range 1..{n}")
            if position < 0:
                raise GraphError("position must be a natural number")
            return position * n + (component - 1)
        raise GraphError(f"{self.kind.tag} vertices are not component-encoded")

    def component_of(self, v: int) -> int:
        n = self.kind.n
        if self.kind.tag == OMEGA_KN:
            return _unzigzag(v // n)
        if self.kind.tag == NK_OMEGA:
            return v % n + 1
        raise GraphError(f"{self.kind.tag} vertices are not component-encoded")

    def position_of(self, v: int) -> int:
        n = self.kind.n
        if self.kind.tag == OMEGA_KN:
            return v % n
        if self.kind.tag == NK_OMEGA:
            return v // n
        raise GraphError(f"{self.kind.tag} vertices are not component-encoded")

    def component_vertices(self, component: int) -> list[int]:
        """All vertices of one component (finite families only)."""
        if self.kind.tag != OMEGA_KN:
            raise GraphError("only omega K_n components are finite")
        return [self.vertex(component, p) for p in range(self.kind.n)]

    def fresh_in_component(self, component: int, avoid: Iterable[int] = ()) -> int:
        """Lowest-position vertex of the component outside ``avoid``."""
        avoid = set(avoid)
        n = self.kind.n
        limit = n if self.kind.tag == OMEGA_KN else len(avoid) + 1
        for p in range(limit):
            v = self.vertex(component, p)
            if v not in avoid:
                return v
        raise GraphError(f"component {component} exhausted")

    def fresh_component(self, avoid_components: Iterable[int] = ()) -> int:
        """Lowest unused component index (omega K_n), zig-zag order on Z."""
        if self.kind.tag != OMEGA_KN:
            raise GraphError("fresh components exist only for omega K_n")
        avoid = set(avoid_components)
        u = 0
        while _unzigzag(u) in avoid:
            u += 1
        return _unzigzag(u)

    # -- adjacency ------------------------------------------------------------

    def adjacent(self, u: int, v: int) -> bool:
        if u == v:
            return False
        if self.kind.is_component:
            return self.component_of(u) == self.component_of(v)
        self._require((u, v))
        return v in self._adj[u]

    def neighbors_within(self, x: int, S: Iterable[int]) -> set[int]:
        return {v for v in S if self.adjacent(x, v)}

    def kn_free_check(self, S: Iterable[int], k: int) -> bool:
        """True iff no k-subset of S induces a complete graph.

        Exhaustive over subsets, with neighbour-intersection pruning so
        sparse sessions stay cheap.
        """
        if k < 2:
            raise GraphError(f"clique size must be >= 2, got {k}")
        verts = sorted(set(S))
        self._require(verts)

        def grow(last: int, cands: list[int], depth: int) -> bool:
            if depth == k:
                return True
            for i, v in enumerate(cands):
                nxt = [w for w in cands[i + 1:] if self.adjacent(v, w)]
                if len(nxt) >= k - depth - 1 and grow(v, nxt, depth + 1):
                    return True
            return False

        return not grow(-1, verts, 0)

    # -- extension-property witnesses -----------------------------------------

    def alice_witness(self, U: Iterable[int], V: Iterable[int],
                      forbidden: Iterable[int] = ()) -> int:
        """Create a fresh vertex adjacent to every vertex of U and nothing else.

        The new vertex w satisfies N(w) = U within the realized session, in
        particular N(w) cap (U u V u forbidden) = U.  For the K_n-free
        family U must not contain a (n-1)-clique.
        """
        if self._frozen:
            raise GraphError("session snapshot is read-only")
        if not self.kind.is_lazy:
            raise GraphError("witnesses exist only for the random / K_n-free families")
        U = sorted(set(U))
        V = sorted(set(V))
        forbidden = sorted(set(forbidden))
        if set(U) & set(V):
            raise GraphError(f"U and V overlap: {sorted(set(U) & set(V))}")
        self._require(U + V + forbidden)
        if self.kind.tag == HENSON and not self.kn_free_check(U, self.kind.n - 1):
            raise GraphError("forbidden clique in U")
        w = len(self._adj)
        self._adj[w] = set(U)
        for u in U:
            self._adj[u].add(w)
        self._transcript.append((tuple(U), tuple(V), tuple(forbidden), w))
        return w

    def check_witness_contract(self, entry_index: int = -1) -> bool:
        """Re-verify one transcript entry's postcondition against the session."""
        U, V, forb, w = self._transcript[entry_index]
        mentioned = set(U) | set(V) | set(forb)
        if w in mentioned:
            return False
        return {v for v in mentioned if self.adjacent(w, v)} == set(U)

    # -- transcripts ------------------------------------------------------------

    def transcript(self) -> list[tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...], int]]:
        return list(self._transcript)

    def transcript_text(self) -> str:
        """One line per witness call: ``<id>: U=.. V=.. F=..`` (ids comma separated)."""
        lines = []
        for U, V, F, w in self._transcript:
            lines.append(
                f"{w}: U={','.join(map(str, U))} V={','.join(map(str, V))}"
                f" F={','.join(map(str, F))}"
            )
        return "\n".join(lines)

    @staticmethod
    def replay(kind: GraphKind,
               entries: Sequence[Sequence[Sequence[int] | int]]) -> "GraphSession":
        """Rebuild a session from transcript entries, checking resulting ids."""
        s = GraphSession(kind)
        for U, V, F, w in entries:
            got = s.alice_witness(U, V, F)
            if got != w:
                raise GraphError(f"transcript replay diverged: expected id {w}, got {got}")
        return s

    @staticmethod
    def replay_text(kind: GraphKind, text: str) -> "GraphSession":
        entries = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            head, rest = line.split(":", 1)
            sets = {}
            for field in rest.split():
                key, _, val = field.partition("=")
                sets[key] = tuple(int(x) for x in val.split(",") if x)
            entries.append((sets["U"], sets["V"], sets["F"], int(head)))
        return GraphSession.replay(kind, entries)

    def snapshot(self) -> "GraphSession":
        """Read-only copy sharing no mutable state; safe to query from other threads."""
        s = GraphSession(self.kind)
        s._adj = {v: set(nb) for v, nb in self._adj.items()}
        s._transcript = list(self._transcript)
        s._frozen = True
        return s

    def __repr__(self) -> str:
        size = len(self._adj) if self.kind.is_lazy else "closed-form"
        return f"GraphSession({self.kind.tag}, n={self.kind.n}, realized={size})"


def triangle_witness(s: GraphSession) -> tuple[int, int, int]:
    """Build a triangle in a random-graph session (used as a K_3 oracle)."""
    a = s.alice_witness((), ())
    b = s.alice_witness((a,), ())
    c = s.alice_witness((a, b), ())
    return a, b, c
