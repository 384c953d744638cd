"""Brauer diagrams, link states and the combinatorics of their products.

Vertices are 0-based throughout the Python API.  A diagram on ``n`` strands
has left vertices ``0..n-1`` and right (primed) vertices stored as
``n..2n-1``.  The text notation used by the CLI and fixtures is 1-based:

    link state:  ``n=3; [1 3] 2``            (bare numbers are defects)
    diagram:     ``n=2; [1 2'] [2 1']``      (primes mark right vertices)
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

FAMILIES = ("brauer", "planar", "annular")

Permutation = tuple  # images of 0..t-1; (sigma o tau)(i) = sigma[tau[i]]


# ---------------------------------------------------------------------------
# permutations


def identity_perm(t: int) -> Permutation:
    return tuple(range(t))


def compose(a: Permutation, b: Permutation) -> Permutation:
    """``a o b``: apply ``b`` first."""
    return tuple(a[x] for x in b)


def inverse(a: Permutation) -> Permutation:
    out = [0] * len(a)
    for i, x in enumerate(a):
        out[x] = i
    return tuple(out)


def cyclic_group(t: int) -> list[Permutation]:
    """Rotations ``i -> i + k (mod t)``, identity first; C_0 is trivial."""
    if t == 0:
        return [()]
    return [tuple((i + k) % t for i in range(t)) for k in range(t)]


def symmetric_group(t: int) -> list[Permutation]:
    return list(itertools.permutations(range(t)))


# ---------------------------------------------------------------------------
# link states


@dataclass(frozen=True, order=True)
class LinkState:
    """Partition of ``{0..n-1}`` into connections and defects.

    ``partner[i] == j != i`` means ``i`` and ``j`` are connected,
    ``partner[i] == i`` means ``i`` is a defect.
    """

    partner: tuple[int, ...]

    def __post_init__(self):
        n = len(self.partner)
        for i, j in enumerate(self.partner):
            if not 0 <= j < n or self.partner[j] != i:
                raise ValueError(f"partner map is not an involution: {self.partner}")

    @classmethod
    def from_connections(cls, n: int, connections: Sequence[tuple[int, int]]) -> "LinkState":
        partner = list(range(n))
        for i, j in connections:
            if i == j or partner[i] != i or partner[j] != j:
                raise ValueError(f"bad connection {(i, j)}")
            partner[i], partner[j] = j, i
        return cls(tuple(partner))

    @classmethod
    def all_defects(cls, n: int) -> "LinkState":
        return cls(tuple(range(n)))

    @property
    def n(self) -> int:
        return len(self.partner)

    @cached_property
    def defects(self) -> tuple[int, ...]:
        return tuple(i for i, j in enumerate(self.partner) if i == j)

    @property
    def t(self) -> int:
        return len(self.defects)

    @cached_property
    def connections(self) -> tuple[tuple[int, int], ...]:
        return tuple((i, j) for i, j in enumerate(self.partner) if i < j)

    def is_defect(self, i: int) -> bool:
        return self.partner[i] == i

    # text notation
    def __str__(self):
        parts = []
        for i, j in enumerate(self.partner):
            if i == j:
                parts.append(str(i + 1))
            elif i < j:
                parts.append(f"[{i + 1} {j + 1}]")
        return f"n={self.n}; " + " ".join(parts) if parts else f"n={self.n};"

    @classmethod
    def parse(cls, text: str) -> "LinkState":
        head, _, body = text.partition(";")
        n = int(head.strip().removeprefix("n=").strip())
        conns = [(int(a) - 1, int(b) - 1) for a, b in re.findall(r"\[\s*(\d+)\s+(\d+)\s*\]", body)]
        rest = re.sub(r"\[[^\]]*\]", " ", body).split()
        state = cls.from_connections(n, conns)
        declared = sorted(int(x) - 1 for x in rest)
        if rest and declared != list(state.defects):
            raise ValueError(f"declared defects {declared} disagree with connections")
        return state


def is_planar(s: LinkState) -> bool:
    """No defect or outside connection inside any closed interval [i, j] spanned by a connection."""
    for i, j in s.connections:
        for k in range(i, j + 1):
            m = s.partner[k]
            if m == k or not i <= m <= j:
                return False
    return True


def _cyclic_open(i: int, j: int, n: int) -> list[int]:
    out = []
    k = (i + 1) % n
    while k != j:
        out.append(k)
        k = (k + 1) % n
    return out


def is_annular(s: LinkState) -> bool:
    """Both cyclic arcs cut out by each connection are unions of parts, and
    all defects sit on one side."""
    n = s.n
    defects = set(s.defects)
    for i, j in s.connections:
        arc1 = _cyclic_open(i, j, n)
        arc2 = _cyclic_open(j, i, n)
        for arc in (arc1, arc2):
            members = set(arc)
            if any(s.partner[k] not in members for k in arc):
                return False
        if not (defects <= set(arc1) or defects <= set(arc2)):
            return False
    return True


_FAMILY_FILTER = {"brauer": lambda s: True, "planar": is_planar, "annular": is_annular}


def _involutions(n: int, t: int) -> Iterator[list[int]]:
    partner = [-1] * n

    def rec(free: list[int], defects_left: int):
        if not free:
            if defects_left == 0:
                yield list(partner)
            return
        i = free[0]
        rest = free[1:]
        if defects_left > 0:
            partner[i] = i
            yield from rec(rest, defects_left - 1)
        for idx, j in enumerate(rest):
            partner[i], partner[j] = j, i
            yield from rec(rest[:idx] + rest[idx + 1 :], defects_left)
        partner[i] = -1

    yield from rec(list(range(n)), t)


def enumerate_link_states(n: int, t: int, family: str = "brauer") -> list[LinkState]:
    """All link states of the family with exactly ``t`` defects, sorted by partner map."""
    if family not in _FAMILY_FILTER:
        raise ValueError(f"unknown link state family {family!r}")
    if t < 0 or t > n or (n - t) % 2:
        return []
    keep = _FAMILY_FILTER[family]
    states = [LinkState(tuple(p)) for p in _involutions(n, t)]
    return sorted(s for s in states if keep(s))


def rotate(q: LinkState) -> LinkState:
    """Shift every vertex by one place cyclically (annular states only)."""
    if not is_annular(q):
        raise ValueError(f"rotate needs an annular link state, got {q}")
    n = q.n
    partner = [0] * n
    for i, j in enumerate(q.partner):
        partner[(i + 1) % n] = (j + 1) % n
    return LinkState(tuple(partner))


FAMILY_STATES = {"brauer": "brauer", "tl": "planar", "jones": "annular"}


def family_datum(family: str, n: int) -> tuple[list[int], dict[int, list[Permutation]], dict[int, list[LinkState]]]:
    """Levels, groups and link states of the diagram basis of a family.

    ``brauer`` uses all link states and the symmetric groups, ``jones``
    annular states and cyclic groups, ``tl`` planar states and trivial groups.
    """
    if family not in FAMILY_STATES:
        raise ValueError(f"unknown diagram family {family!r}")
    levels = [t for t in range(n + 1) if (n - t) % 2 == 0]
    groups: dict[int, list[Permutation]] = {}
    states: dict[int, list[LinkState]] = {}
    for t in levels:
        if family == "brauer":
            groups[t] = symmetric_group(t)
        elif family == "jones":
            groups[t] = cyclic_group(t)
        else:
            groups[t] = [identity_perm(t)]
        states[t] = enumerate_link_states(n, t, FAMILY_STATES[family])
    return levels, groups, states


# ---------------------------------------------------------------------------
# diagrams


@dataclass(frozen=True, order=True)
class BrauerDiagram:
    """Perfect matching on ``2n`` vertices; right vertex ``i'`` is stored as ``n + i``."""

    matching: tuple[int, ...]

    def __post_init__(self):
        m = self.matching
        if len(m) % 2:
            raise ValueError("a diagram needs an even number of vertices")
        for v, w in enumerate(m):
            if not 0 <= w < len(m) or w == v or m[w] != v:
                raise ValueError(f"not a fixed-point-free involution: {m}")

    @property
    def n(self) -> int:
        return len(self.matching) // 2

    @classmethod
    def identity(cls, n: int) -> "BrauerDiagram":
        return cls(tuple(list(range(n, 2 * n)) + list(range(n))))

    @classmethod
    def from_pairs(cls, n: int, pairs: Sequence[tuple[int, int]]) -> "BrauerDiagram":
        m = [-1] * (2 * n)
        for a, b in pairs:
            if m[a] != -1 or m[b] != -1:
                raise ValueError(f"vertex reused in {pairs}")
            m[a], m[b] = b, a
        if -1 in m:
            raise ValueError("pairs do not cover every vertex")
        return cls(tuple(m))

    @property
    def through_count(self) -> int:
        n = self.n
        return sum(1 for v in range(n) if self.matching[v] >= n)

    def pairs(self) -> list[tuple[int, int]]:
        return [(v, w) for v, w in enumerate(self.matching) if v < w]

    def __str__(self):
        n = self.n

        def lab(v):
            return f"{v + 1}" if v < n else f"{v - n + 1}'"

        return f"n={n}; " + " ".join(f"[{lab(a)} {lab(b)}]" for a, b in self.pairs()) if n else "n=0;"

    @classmethod
    def parse(cls, text: str) -> "BrauerDiagram":
        head, _, body = text.partition(";")
        n = int(head.strip().removeprefix("n=").strip())

        def vertex(tok: str) -> int:
            if tok.endswith("'"):
                return n + int(tok[:-1]) - 1
            return int(tok) - 1

        pairs = [(vertex(a), vertex(b)) for a, b in re.findall(r"\[\s*(\d+'?)\s+(\d+'?)\s*\]", body)]
        return cls.from_pairs(n, pairs)


def all_matchings(n: int) -> list[BrauerDiagram]:
    """Every Brauer diagram on ``n`` strands, by direct matching enumeration."""
    out = []
    for partner in _involutions(2 * n, 0):
        out.append(BrauerDiagram(tuple(partner)))
    return sorted(out)


def assemble(p: LinkState, sigma: Permutation, q: LinkState) -> BrauerDiagram:
    """The diagram with left state ``p``, right state ``q`` and the ``i``-th
    defect of ``q`` joined to the ``sigma[i]``-th defect of ``p``."""
    n = p.n
    if q.n != n:
        raise ValueError("link states have different sizes")
    if p.t != q.t or len(sigma) != p.t:
        raise ValueError(f"defect counts {p.t}, {q.t} and permutation degree {len(sigma)} disagree")
    m = [0] * (2 * n)
    for i, j in p.connections:
        m[i], m[j] = j, i
    for i, j in q.connections:
        m[n + i], m[n + j] = n + j, n + i
    dp, dq = p.defects, q.defects
    for i, s in enumerate(sigma):
        a, b = n + dq[i], dp[s]
        m[a], m[b] = b, a
    return BrauerDiagram(tuple(m))


def decompose(d: BrauerDiagram) -> tuple[LinkState, Permutation, LinkState]:
    n = d.n
    m = d.matching
    p = LinkState(tuple(m[i] if m[i] < n else i for i in range(n)))
    q = LinkState(tuple(m[n + i] - n if m[n + i] >= n else i for i in range(n)))
    pos = {v: k for k, v in enumerate(p.defects)}
    sigma = tuple(pos[m[n + j]] for j in q.defects)
    return p, sigma, q


def star(d: BrauerDiagram) -> BrauerDiagram:
    """Mirror a diagram, swapping left and right vertices."""
    n = d.n

    def swap(v):
        return v + n if v < n else v - n

    m = [0] * (2 * n)
    for v, w in enumerate(d.matching):
        m[swap(v)] = swap(w)
    return BrauerDiagram(tuple(m))


def concat_product(d1: BrauerDiagram, d2: BrauerDiagram) -> tuple[int, BrauerDiagram]:
    """Stack ``d1`` to the left of ``d2``; returns (closed loops, outer diagram)."""
    n = d1.n
    if d2.n != n:
        raise ValueError("diagrams have different sizes")
    m1, m2 = d1.matching, d2.matching
    out = [-1] * (2 * n)
    seen = [False] * n

    def run_from_d1_side(k: int) -> int:
        # at middle node k, having arrived along an edge of d1
        while True:
            seen[k] = True
            w = m2[k]
            if w >= n:
                return w
            seen[w] = True
            v = m1[n + w]
            if v < n:
                return v
            k = v - n

    for i in range(n):
        if out[i] != -1:
            continue
        v = m1[i]
        end = v if v < n else run_from_d1_side(v - n)
        out[i], out[end] = end, i
    for j in range(n, 2 * n):
        if out[j] != -1:
            continue
        w = m2[j]
        if w >= n:
            end = w
        else:
            seen[w] = True
            v = m1[n + w]
            end = v if v < n else run_from_d1_side(v - n)
        out[j], out[end] = end, j

    loops = 0
    for k in range(n):
        if seen[k]:
            continue
        loops += 1
        cur = k
        while not seen[cur]:
            seen[cur] = True
            w = m2[cur]
            seen[w] = True
            cur = m1[n + w] - n
    return loops, BrauerDiagram(tuple(out))


# ---------------------------------------------------------------------------
# pair graphs


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


@dataclass(frozen=True)
class PairGraph:
    n: int
    left_edges: tuple[tuple[int, int], ...]
    right_edges: tuple[tuple[int, int], ...]
    components: tuple[tuple[int, ...], ...]
    loop_count: int
    pair_set_size: int


def pair_graph(q: LinkState, p: LinkState) -> PairGraph:
    """Overlay the connections of ``q`` (left) and ``p`` (right) on ``{0..n-1}``."""
    n = q.n
    if p.n != n:
        raise ValueError("link states have different sizes")
    uf = _UnionFind(n)
    for i, j in q.connections:
        uf.union(i, j)
    for i, j in p.connections:
        uf.union(i, j)
    comps: dict[int, list[int]] = {}
    for v in range(n):
        comps.setdefault(uf.find(v), []).append(v)
    loops = 0
    pairs = 0
    for verts in comps.values():
        has_q = any(q.is_defect(v) for v in verts)
        has_p = any(p.is_defect(v) for v in verts)
        if not has_q and not has_p:
            loops += 1
        elif has_q and has_p:
            pairs += 1
    return PairGraph(
        n=n,
        left_edges=q.connections,
        right_edges=p.connections,
        components=tuple(sorted(tuple(c) for c in comps.values())),
        loop_count=loops,
        pair_set_size=pairs,
    )


def greedy_partner(q: LinkState) -> LinkState:
    """A planar partner ``p`` for planar ``q`` with a loop-free pair graph whose
    pair set has size ``t``.

    Live vertices start as the defects of ``q``; the smallest live vertex is
    joined to the nearest reachable end of an unused ``q`` edge (smaller
    index on ties), whose far end becomes live.  A live vertex with nothing
    reachable becomes a defect.
    """
    if q.t == 0:
        raise ValueError("greedy_partner needs at least one defect")
    if not is_planar(q):
        raise ValueError(f"greedy_partner needs a planar link state, got {q}")
    live = set(q.defects)
    available = set(q.connections)
    partner = list(range(q.n))
    while live:
        i = min(live)
        best = None
        for e in available:
            for j, k in (e, e[::-1]):
                lo, hi = min(i, j), max(i, j)
                if any(lo < v < hi for v in live):
                    continue
                key = (abs(i - j), j)
                if best is None or key < best[0]:
                    best = (key, j, k, e)
        live.remove(i)
        if best is None:
            continue
        _, j, k, e = best
        partner[i], partner[j] = j, i
        live.add(k)
        available.remove(e)
    return LinkState(tuple(partner))
