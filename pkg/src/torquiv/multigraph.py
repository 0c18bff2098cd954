"""Undirected multigraphs and canonical labeling.

Loops and parallel edges are first-class.  A multigraph is stored as a
vertex tuple plus a tuple of normalized edge pairs (u, v) with u <= v;
parallel edges appear as repeated pairs and a loop is (v, v).

Canonical forms: vertices are first partitioned by iterated degree
refinement (an isomorphism invariant), then the adjacency encoding is
minimized by brute force over the orderings compatible with the partition.
The search is restricted to refinement-compatible orderings for speed; the
result is still a canonical form (isomorphic graphs agree, others differ)
and the test suite checks it against a brute-force isomorphism oracle.
"""

from __future__ import annotations


class Multigraph:
    def __init__(self, vertices, edges):
        self.vertices = tuple(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex")
        norm = []
        vset = set(self.vertices)
        for u, v in edges:
            if u not in vset or v not in vset:
                raise ValueError(f"edge ({u!r},{v!r}) off the vertex set")
            norm.append((u, v) if u <= v else (v, u))
        self.edges = tuple(sorted(norm))

    def degree(self, v) -> int:
        d = 0
        for u, w in self.edges:
            if u == v:
                d += 1
            if w == v:
                d += 1
        return d

    def multiplicity(self, u, v) -> int:
        key = (u, v) if u <= v else (v, u)
        return sum(1 for e in self.edges if e == key)

    def loop_count(self, v) -> int:
        return self.multiplicity(v, v)

    def is_loopless(self) -> bool:
        return all(u != v for u, v in self.edges)

    def num_components(self) -> int:
        parent = {v: v for v in self.vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in self.edges:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
        return len({find(v) for v in self.vertices})

    def is_connected(self) -> bool:
        return len(self.vertices) <= 1 or self.num_components() == 1

    def euler_characteristic(self) -> int:
        return len(self.edges) - len(self.vertices) + self.num_components()

    def is_two_connected(self) -> bool:
        """Connected, at least two vertices, and no cut vertex.

        Parallel edges make two adjacent vertices 2-connected even without
        a third vertex, which is exactly the convention needed here."""
        n = len(self.vertices)
        if n < 2 or not self.is_connected():
            return False
        if not self.is_loopless():
            return False
        for v in self.vertices:
            rest = [u for u in self.vertices if u != v]
            sub = Multigraph(rest, [e for e in self.edges if v not in e])
            if len(rest) > 0 and not sub.is_connected():
                return False
        return True

    def contract_edge(self, index: int) -> "Multigraph":
        """Merge the endpoints of edge #index; other copies of the same
        pair become loops, which are dropped (this operation is used in the
        loopless-graph order where loops are discarded)."""
        u, v = self.edges[index]
        if u == v:
            raise ValueError("cannot contract a loop")
        merged = u
        verts = [w for w in self.vertices if w != v]
        edges = []
        for i, (a, b) in enumerate(self.edges):
            if i == index:
                continue
            a2 = merged if a == v else a
            b2 = merged if b == v else b
            if a2 == b2:
                continue  # arising loop: dropped
            edges.append((a2, b2))
        return Multigraph(verts, edges)

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices), "edges": [list(e) for e in self.edges]}

    def __eq__(self, other):
        return (
            isinstance(other, Multigraph)
            and self.vertices == other.vertices
            and self.edges == other.edges
        )

    def __hash__(self):
        return hash((self.vertices, self.edges))

    def __repr__(self):  # pragma: no cover
        return f"Multigraph({len(self.vertices)}v, {len(self.edges)}e)"


def _refine_colors(n: int, colors: list, neighbor_data) -> list:
    """Iterated color refinement; neighbor_data(i, colors) must return a
    hashable, permutation-invariant signature of vertex i."""
    while True:
        sigs = [(colors[i], neighbor_data(i, colors)) for i in range(n)]
        order = sorted(set(sigs))
        new = [order.index(s) for s in sigs]
        if new == colors:
            return colors
        colors = new


def _min_encoding(n: int, colors: list, extend) -> tuple:
    """Minimum concatenated encoding over the orderings that list the color
    classes in increasing color order.

    extend(prefix, v) must return the encoding entries contributed by
    appending vertex v after the vertices in prefix; the encoding of a full
    ordering is the concatenation of its contributions.  Because prefixes of
    the ordering determine prefixes of the encoding, the search can discard
    any branch whose partial encoding already exceeds the incumbent."""
    classes: dict = {}
    for i, c in enumerate(colors):
        classes.setdefault(c, []).append(i)
    slots: list = []
    for c in sorted(classes):
        slots.extend([classes[c]] * len(classes[c]))
    best = None
    order: list = []
    used: set = set()

    def rec(enc: tuple):
        nonlocal best
        if best is not None and enc > best[: len(enc)]:
            return
        k = len(order)
        if k == n:
            if best is None or enc < best:
                best = enc
            return
        for v in slots[k]:
            if v in used:
                continue
            used.add(v)
            order.append(v)
            rec(enc + extend(order[:-1], v))
            order.pop()
            used.discard(v)

    rec(())
    return best


def canonical_key(graph: Multigraph) -> tuple:
    """Canonical form of a multigraph: (n,) followed by the minimized
    adjacency encoding, where vertex k contributes its multiplicities
    towards the previously listed vertices and then its loop count."""
    n = len(graph.vertices)
    verts = list(graph.vertices)
    mult = [[0] * n for _ in range(n)]
    index = {v: i for i, v in enumerate(verts)}
    for u, v in graph.edges:
        i, j = index[u], index[v]
        mult[i][j] += 1
        if i != j:
            mult[j][i] += 1

    colors = _refine_colors(
        n,
        [0] * n,
        lambda i, cols: (
            sum(mult[i]),
            mult[i][i],
            tuple(sorted((cols[j], mult[i][j]) for j in range(n) if j != i and mult[i][j])),
        ),
    )

    def extend(prefix: list, v: int) -> tuple:
        return tuple(mult[v][u] for u in prefix) + (mult[v][v],)

    if n == 0:
        return (0,)
    return (n,) + _min_encoding(n, colors, extend)


def from_canonical_key(key: tuple) -> Multigraph:
    """Rebuild a multigraph (on vertices "0".."n-1") from a canonical key."""
    n = key[0]
    flat = key[1:]
    verts = [str(i) for i in range(n)]
    edges = []
    pos = 0
    for k in range(n):
        for i in range(k):
            edges.extend([(verts[i], verts[k])] * flat[pos])
            pos += 1
        edges.extend([(verts[k], verts[k])] * flat[pos])
        pos += 1
    return Multigraph(verts, edges)


def are_isomorphic(g1: Multigraph, g2: Multigraph) -> bool:
    return canonical_key(g1) == canonical_key(g2)


def directed_canonical_key(vertices, arcs) -> tuple:
    """Canonical form of a directed multigraph, given as a vertex list and
    (tail, head) pairs; loops are diagonal entries and parallel arcs are
    repeated pairs.  Two directed multigraphs are isomorphic exactly when
    their keys agree; arc labels play no role.

    The encoding lists, for each vertex in the minimizing order, its arc
    multiplicities towards the previously listed vertices, then from them,
    then its loop count."""
    verts = list(vertices)
    n = len(verts)
    if len(set(verts)) != n:
        raise ValueError("duplicate vertex")
    if n == 0:
        return (0,)
    index = {v: i for i, v in enumerate(verts)}
    mult = [[0] * n for _ in range(n)]
    for tail, head in arcs:
        if tail not in index or head not in index:
            raise ValueError(f"arc ({tail!r},{head!r}) off the vertex set")
        mult[index[tail]][index[head]] += 1

    colors = _refine_colors(
        n,
        [0] * n,
        lambda i, cols: (
            sum(mult[i]),
            sum(row[i] for row in mult),
            mult[i][i],
            tuple(sorted((cols[j], mult[i][j]) for j in range(n) if j != i and mult[i][j])),
            tuple(sorted((cols[j], mult[j][i]) for j in range(n) if j != i and mult[j][i])),
        ),
    )

    def extend(prefix: list, v: int) -> tuple:
        return (
            tuple(mult[v][u] for u in prefix)
            + tuple(mult[u][v] for u in prefix)
            + (mult[v][v],)
        )

    return (n,) + _min_encoding(n, colors, extend)
