"""Finite classification machinery.

Four interlocking pieces:

* enumeration of the loopless 2-vertex-connected multigraphs with all
  valencies >= 3 and a given cycle rank, and of the contraction-maximal
  (equivalently 3-regular) ones among them;
* enumeration of the acyclic quivers built on those graphs by orienting
  edges or subdividing them with sinks, and of the strongly connected
  quivers that stay strongly connected after deleting any single arrow
  (the zero-weight side), both up to quiver isomorphism;
* the normal fan of a 2-dimensional pair in spanning-forest coordinates,
  and the identification of its toric surface by ray count, double-checked
  by a lattice-automorphism match against hard-coded reference fans;
* a hub-splitting realization that moves any tight normal-form pair onto a
  quiver with 3-regular skeleton while preserving the polytope's lattice
  counts in every dilation degree.

Everything is exact integer arithmetic; enumerations are capped at cycle
rank 5, where the search spaces are still desk-sized.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cmp_to_key
from itertools import combinations, product
from math import gcd

from .errors import (
    EmptyPolyhedron,
    InputError,
    NotInRd,
    NotTight,
    UnsupportedCase,
    WrongDimension,
)
from .multigraph import (
    Multigraph,
    canonical_key,
    directed_canonical_key,
    from_canonical_key,
)
from .polytope import DEFAULT_MAX_NODES, dimension, vertices
from .quiver import (
    Arrow,
    Quiver,
    check_weight,
    components,
    euler_characteristic,
    is_acyclic,
    is_strongly_connected,
    is_theta_stable,
)
from .reductions import in_rd_form, is_prime, is_tight, skeleton, tighten

MAX_RANK = 5


def _check_rank(d, low: int) -> None:
    if not isinstance(d, int) or isinstance(d, bool):
        raise InputError("the cycle rank d must be an integer")
    if d < low or d > MAX_RANK:
        raise InputError(f"the cycle rank d must lie between {low} and {MAX_RANK}")


# -- skeleton graph lists ------------------------------------------------------


def _degree_sequences(total: int, parts: int, ceiling: int):
    """Non-increasing tuples of the given length with entries >= 3 summing
    to total."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    hi = min(ceiling, total - 3 * (parts - 1))
    for first in range(hi, 2, -1):
        for rest in _degree_sequences(total - first, parts - 1, first):
            yield (first,) + rest


def _labeled_graphs_with_degrees(degrees: tuple):
    """Loopless labeled multigraphs on 0..n-1 realizing the degree sequence,
    yielded as {(i, j): multiplicity} over pairs i < j.

    Pairs are filled in lexicographic order; the pair (i, n-1) is the last
    one touching vertex i, so its multiplicity is forced, which prunes the
    search hard."""
    n = len(degrees)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    rem = list(degrees)
    chosen: dict = {}

    def rec(p: int):
        if p == len(pairs):
            if rem[n - 1] == 0:
                yield dict(chosen)
            return
        i, j = pairs[p]
        if j == n - 1 and i < n - 1:
            options = (rem[i],) if rem[i] <= rem[j] else ()
        else:
            options = range(min(rem[i], rem[j]) + 1)
        for m in options:
            if m:
                chosen[(i, j)] = m
                rem[i] -= m
                rem[j] -= m
            yield from rec(p + 1)
            if m:
                rem[i] += m
                rem[j] += m
                del chosen[(i, j)]

    yield from rec(0)


def _graph_from_multiplicities(n: int, chosen: dict) -> Multigraph:
    verts = [str(i) for i in range(n)]
    edges = []
    for (i, j), m in sorted(chosen.items()):
        edges.extend([(verts[i], verts[j])] * m)
    return Multigraph(verts, edges)


def enumerate_skeletons(d: int) -> list[Multigraph]:
    """All loopless 2-vertex-connected multigraphs with every valency >= 3
    and cycle rank d, one representative per isomorphism class, sorted by
    canonical key.  Such a graph has at most 2d-2 vertices and 3d-3 edges;
    supported for 2 <= d <= 5."""
    _check_rank(d, 2)
    keys: set = set()
    for n in range(2, 2 * d - 1):
        e = n + d - 1
        for degrees in _degree_sequences(2 * e, n, 2 * e):
            if degrees[0] > 2 * e - degrees[0]:
                continue  # the top vertex could not avoid loops
            for chosen in _labeled_graphs_with_degrees(degrees):
                g = _graph_from_multiplicities(n, chosen)
                if g.is_two_connected():
                    keys.add(canonical_key(g))
    return [from_canonical_key(k) for k in sorted(keys)]


def enumerate_maximal_skeletons(d: int) -> list[Multigraph]:
    """The members of enumerate_skeletons(d) that no other member contracts
    onto.  Only contracting a multiplicity-1 edge can stay inside the list
    (other contractions drop loops and lower the cycle rank), so one-step
    predecessors decide maximality.  The result is cross-checked against
    the 3-regular members; the two characterizations must agree."""
    _check_rank(d, 2)
    base = enumerate_skeletons(d)
    keys = {canonical_key(g) for g in base}
    dominated: set = set()
    for g in base:
        done_pairs: set = set()
        for idx, (u, v) in enumerate(g.edges):
            if (u, v) in done_pairs:
                continue
            done_pairs.add((u, v))
            if g.multiplicity(u, v) != 1:
                continue
            ck = canonical_key(g.contract_edge(idx))
            if ck in keys:
                dominated.add(ck)
    maximal = sorted(keys - dominated)
    regular = sorted(
        canonical_key(g) for g in base if all(g.degree(v) == 3 for v in g.vertices)
    )
    if maximal != regular:
        raise AssertionError(
            "internal inconsistency: contraction-maximality and 3-regularity "
            "give different skeleton lists"
        )
    return [from_canonical_key(k) for k in maximal]


# -- quivers on skeletons ------------------------------------------------------


def kronecker_quiver() -> Quiver:
    """Two vertices joined by two parallel arrows."""
    return Quiver(["u", "v"], [Arrow("a0", "u", "v"), Arrow("a1", "u", "v")])


def loop_quiver() -> Quiver:
    """One vertex carrying one loop."""
    return Quiver(["u"], [Arrow("a0", "u", "u")])


def quiver_key(quiver: Quiver) -> tuple:
    """Isomorphism-invariant canonical key of a quiver (arrow ids ignored)."""
    return directed_canonical_key(
        quiver.sorted_vertices(), [(a.tail, a.head) for a in quiver.arrows]
    )


def build_Rd_quiver(graph: Multigraph, choices) -> Quiver:
    """Turn each edge of the graph into an arrow or into a 2-path through a
    fresh sink.  choices[k] applies to graph.edges[k]: "forward" orients the
    normalized pair (u, v) as u -> v, "backward" as v -> u, and "sink"
    replaces the edge by u -> s_k <- v.  The outcome must be acyclic."""
    choices = tuple(choices)
    if len(choices) != len(graph.edges):
        raise InputError(
            f"need one choice per edge ({len(graph.edges)}), got {len(choices)}"
        )
    bad = [c for c in choices if c not in ("forward", "backward", "sink")]
    if bad:
        raise InputError(f"unknown edge choice {bad[0]!r}")
    verts = [str(v) for v in graph.vertices]
    if len(set(verts)) != len(verts):
        raise InputError("vertex ids must stay distinct as strings")
    taken = set(verts)
    new_vertices = list(verts)
    arrows = []
    for k, ((u, v), choice) in enumerate(zip(graph.edges, choices)):
        if u == v:
            raise InputError("loops cannot be oriented or subdivided")
        su, sv = str(u), str(v)
        if choice == "forward":
            arrows.append(Arrow(f"a{k}", su, sv))
        elif choice == "backward":
            arrows.append(Arrow(f"a{k}", sv, su))
        else:
            sink = f"s{k}"
            while sink in taken:
                sink += "'"
            taken.add(sink)
            new_vertices.append(sink)
            arrows.append(Arrow(f"a{k}", su, sink))
            arrows.append(Arrow(f"b{k}", sv, sink))
    built = Quiver(new_vertices, arrows)
    if not is_acyclic(built):
        raise UnsupportedCase("the chosen orientations close an oriented cycle")
    return built


def enumerate_Rd(d: int) -> list[Quiver]:
    """Acyclic quivers built on the cycle-rank-d skeletons by per-edge
    orientation/sink choices, one representative per isomorphism class,
    sorted by canonical key.  d = 1 is the special one-element case of the
    two-arrow quiver."""
    _check_rank(d, 1)
    if d == 1:
        return [kronecker_quiver()]
    found: dict = {}
    for graph in enumerate_skeletons(d):
        for choices in product(("forward", "backward", "sink"), repeat=len(graph.edges)):
            try:
                built = build_Rd_quiver(graph, choices)
            except UnsupportedCase:
                continue
            key = quiver_key(built)
            if key not in found:
                found[key] = built
    out = [found[k] for k in sorted(found)]
    if __debug__:
        for q in out:
            assert is_prime(q) and in_rd_form(q) and euler_characteristic(q) == d
    return out


# -- the zero-weight lists -----------------------------------------------------


def _all_components_strong(quiver: Quiver) -> bool:
    for comp in components(quiver):
        sub = quiver.induced_on_vertices(comp)
        strong = is_strongly_connected(sub)
        if __debug__:
            assert strong == is_theta_stable(sub, {v: 0 for v in sub.vertices})
        if not strong:
            return False
    return True


def _strong_everywhere(quiver: Quiver) -> bool:
    """Every component of the quiver, and of the quiver minus any single
    arrow, is strongly connected."""
    if not _all_components_strong(quiver):
        return False
    return all(
        _all_components_strong(quiver.without_arrow(aid))
        for aid in quiver.sorted_arrow_ids()
    )


def enumerate_affine_Rdd(d: int) -> list[Quiver]:
    """Prime quivers of cycle rank d such that every component of the
    quiver and of every single-arrow deletion is strongly connected, one
    representative per isomorphism class, sorted by canonical key.  Such a
    quiver has every in- and outdegree >= 2 and at most d-1 vertices;
    supported for 1 <= d <= 5."""
    _check_rank(d, 1)
    if d == 1:
        return [loop_quiver()]
    found: dict = {}
    for n in range(2, d):
        e = n + d - 1
        pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
        counts = [0] * len(pairs)

        def spread(p: int, left: int):
            if p == len(pairs):
                if left == 0:
                    yield tuple(counts)
                return
            for m in range(left + 1):
                counts[p] = m
                yield from spread(p + 1, left - m)
            counts[p] = 0

        for assignment in spread(0, e):
            outdeg = [0] * n
            indeg = [0] * n
            for (i, j), m in zip(pairs, assignment):
                outdeg[i] += m
                indeg[j] += m
            if any(x < 2 for x in outdeg) or any(x < 2 for x in indeg):
                continue
            verts = [f"v{i}" for i in range(n)]
            arrows = []
            for (i, j), m in zip(pairs, assignment):
                for c in range(m):
                    arrows.append(Arrow(f"a{i}_{j}_{c}", verts[i], verts[j]))
            candidate = Quiver(verts, arrows)
            if not is_prime(candidate):
                continue
            if not _strong_everywhere(candidate):
                continue
            key = quiver_key(candidate)
            if key not in found:
                found[key] = candidate
    return [found[k] for k in sorted(found)]


# -- normal fans of 2-dimensional pairs ----------------------------------------


@dataclass(frozen=True)
class Fan2D:
    """A complete fan in the plane, held by its primitive ray vectors in
    counterclockwise order starting from the positive-x half-plane."""

    rays: tuple


REFERENCE_FANS = {
    "P2": ((1, 0), (0, 1), (-1, -1)),
    "P1xP1": ((1, 0), (0, 1), (-1, 0), (0, -1)),
    "Bl1P2": ((1, 0), (0, 1), (1, 1), (-1, -1)),
    "Bl2P2": ((1, 0), (-1, 0), (0, 1), (1, 1), (-1, -1)),
    "Bl3P2": ((1, 0), (0, 1), (1, 1), (-1, 0), (0, -1), (-1, -1)),
}


def _ccw_sorted(rays) -> tuple:
    def half(v) -> int:
        x, y = v
        return 0 if y > 0 or (y == 0 and x > 0) else 1

    def compare(a, b) -> int:
        ha, hb = half(a), half(b)
        if ha != hb:
            return ha - hb
        cross = a[0] * b[1] - a[1] * b[0]
        if cross > 0:
            return -1
        if cross < 0:
            return 1
        return 0

    return tuple(sorted(rays, key=cmp_to_key(compare)))


def _convex_hull(points) -> list:
    """Counterclockwise hull of integer points, collinear points dropped."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def turn(o, a, b) -> int:
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for p in pts:
        while len(lower) >= 2 and turn(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and turn(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _lex_min_forest(quiver: Quiver) -> set:
    """Arrow ids of the spanning forest that is lexicographically smallest
    as an id set (greedy over sorted ids; loops never qualify)."""
    parent = {v: v for v in quiver.vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    forest: set = set()
    for aid in quiver.sorted_arrow_ids():
        a = quiver.arrow(aid)
        if a.is_loop():
            continue
        ru, rv = find(a.tail), find(a.head)
        if ru != rv:
            parent[ru] = rv
            forest.add(aid)
    return forest


def normal_fan_2d(
    quiver: Quiver, weight: dict, max_nodes: int = DEFAULT_MAX_NODES
) -> Fan2D:
    """Outward primitive edge normals of the polygon the pair cuts out.

    The pair is tightened first; the two coordinates left free by the
    lexicographically smallest spanning forest then give an isomorphism of
    the polytope's affine lattice onto the plane's standard lattice, so the
    resulting ray set is well-defined up to a determinant +-1 change of
    basis.  Requires the tightened polytope to be 2-dimensional."""
    check_weight(quiver, weight)
    if not vertices(quiver, weight, max_nodes):
        raise EmptyPolyhedron("the pair cuts out an empty polyhedron")
    tq, tw, _ = tighten(quiver, weight, max_nodes)
    if not is_acyclic(tq):
        raise UnsupportedCase(
            "the tightened quiver keeps an oriented cycle; only bounded "
            "polyhedra have a complete normal fan"
        )
    dim = dimension(tq, tw)
    if dim != 2:
        raise WrongDimension(
            f"the tightened polytope has dimension {dim}, need 2", dimension=dim
        )
    free = [aid for aid in tq.sorted_arrow_ids() if aid not in _lex_min_forest(tq)]
    assert len(free) == 2, "a tight 2-dimensional pair leaves two free coordinates"
    f1, f2 = free
    hull = _convex_hull((x[f1], x[f2]) for x in vertices(tq, tw, max_nodes))
    assert len(hull) >= 3, "a 2-dimensional polytope has at least three corners"
    rays = []
    for i, p in enumerate(hull):
        q = hull[(i + 1) % len(hull)]
        dx, dy = q[0] - p[0], q[1] - p[1]
        g = gcd(abs(dx), abs(dy))
        rays.append((dy // g, -dx // g))
    return Fan2D(rays=_ccw_sorted(rays))


def _lattice_equivalent(rays_a, rays_b) -> bool:
    """Does an integer 2x2 matrix of determinant +-1 carry one ray set onto
    the other?"""
    set_a, set_b = set(rays_a), set(rays_b)
    if len(set_a) != len(set_b):
        return False
    ordered = sorted(set_a)
    a1 = ordered[0]
    a2 = next(
        (c for c in ordered if a1[0] * c[1] - a1[1] * c[0] != 0),
        None,
    )
    if a2 is None:
        return False
    det_a = a1[0] * a2[1] - a1[1] * a2[0]
    for b1, b2 in product(set_b, repeat=2):
        if b1 == b2:
            continue
        m00 = b1[0] * a2[1] - b2[0] * a1[1]
        m01 = -b1[0] * a2[0] + b2[0] * a1[0]
        m10 = b1[1] * a2[1] - b2[1] * a1[1]
        m11 = -b1[1] * a2[0] + b2[1] * a1[0]
        if any(x % det_a for x in (m00, m01, m10, m11)):
            continue
        m00, m01, m10, m11 = (x // det_a for x in (m00, m01, m10, m11))
        if abs(m00 * m11 - m01 * m10) != 1:
            continue
        if {(m00 * x + m01 * y, m10 * x + m11 * y) for x, y in set_a} == set_b:
            return True
    return False


def classify_2d(
    quiver: Quiver, weight: dict, max_nodes: int = DEFAULT_MAX_NODES
) -> str:
    """Name the toric surface of a 2-dimensional pair: "P2", "Bl1P2",
    "Bl2P2", "Bl3P2" (the plane blown up in 1 to 3 points) or "P1xP1".

    Decides by the ray count of the tightened normal fan (4 rays split by
    central symmetry), then insists on a lattice automorphism carrying the
    rays onto the chosen reference fan; a mismatch between the two routes
    raises AssertionError."""
    fan = normal_fan_2d(quiver, weight, max_nodes)
    n = len(fan.rays)
    if n == 3:
        name = "P2"
    elif n == 4:
        ray_set = set(fan.rays)
        symmetric = all((-x, -y) in ray_set for x, y in ray_set)
        name = "P1xP1" if symmetric else "Bl1P2"
    elif n == 5:
        name = "Bl2P2"
    elif n == 6:
        name = "Bl3P2"
    else:
        raise AssertionError(
            f"internal inconsistency: a 2-dimensional pair produced {n} facet "
            "normals; only 3 to 6 can occur"
        )
    if not _lattice_equivalent(fan.rays, REFERENCE_FANS[name]):
        raise AssertionError(
            "internal inconsistency: the ray-count classification does not "
            "match the reference fan"
        )
    return name


# -- realization on 3-regular skeletons ----------------------------------------


def _fresh_name(base: str, taken: set) -> str:
    out = base
    while out in taken:
        out += "'"
    taken.add(out)
    return out


def _net_inflow(quiver: Quiver, arrow_ids, hub: str, flow: dict) -> int:
    total = 0
    for aid in arrow_ids:
        a = quiver.arrow(aid)
        if a.head == hub:
            total += flow[aid]
        if a.tail == hub:
            total -= flow[aid]
    return total


def _split_hub(quiver: Quiver, weight: dict, hub: str, max_nodes: int):
    """Split the valency->=4 vertex hub into two vertices joined through a
    fresh sink.  Each part keeps >= 2 of the incident arrows; the parts'
    weights are the minima of their net inflows over the polytope corners,
    which forces the two new flow values and makes the correspondence of
    lattice points a bijection in every dilation degree.  Partitions are
    scanned in a fixed order and the first prime outcome wins."""
    incident = sorted(
        a.id for a in quiver.arrows if a.tail == hub or a.head == hub
    )
    k = len(incident)
    corners = vertices(quiver, weight, max_nodes)
    assert corners, "a tight pair has corners"
    first, rest = incident[0], incident[1:]
    for size1 in range(2, k - 1):
        for extra in combinations(rest, size1 - 1):
            part1 = {first, *extra}
            part2 = [aid for aid in incident if aid not in part1]
            theta1 = min(_net_inflow(quiver, part1, hub, x) for x in corners)
            theta2 = min(_net_inflow(quiver, part2, hub, x) for x in corners)
            taken_v = set(quiver.vertices)
            v2 = _fresh_name(hub + "'", taken_v)
            sink = _fresh_name(hub + "*", taken_v)
            taken_a = {a.id for a in quiver.arrows}
            n1 = _fresh_name("n_" + hub, taken_a)
            n2 = _fresh_name("n_" + v2, taken_a)
            part2_set = set(part2)
            arrows = []
            for a in quiver.arrows:
                if a.id in part2_set:
                    arrows.append(
                        Arrow(
                            a.id,
                            v2 if a.tail == hub else a.tail,
                            v2 if a.head == hub else a.head,
                        )
                    )
                else:
                    arrows.append(a)
            arrows.append(Arrow(n1, hub, sink))
            arrows.append(Arrow(n2, v2, sink))
            split = Quiver(list(quiver.vertices) + [v2, sink], arrows)
            if not is_prime(split):
                continue
            new_weight = dict(weight)
            new_weight[hub] = theta1
            new_weight[v2] = theta2
            new_weight[sink] = weight[hub] - theta1 - theta2
            assert new_weight[sink] >= 0
            return split, new_weight
    raise UnsupportedCase(f"no split of vertex {hub!r} keeps the quiver prime")


def realize_Rprime(
    quiver: Quiver, weight: dict, max_nodes: int = DEFAULT_MAX_NODES
) -> tuple[Quiver, dict]:
    """Drive a tight normal-form pair onto a quiver whose skeleton is
    3-regular, without changing the polytope's lattice point counts in any
    dilation degree (hence neither its dimension nor facet count after
    tightening).

    Inputs must be prime, acyclic, in normal form (valency-2 vertices are
    sinks, never adjacent) and tight; a cycle-rank-1 input must be the
    two-arrow quiver and is returned unchanged.  Each round splits the
    first skeleton vertex of valency >= 4, so the total excess valency
    drops and the loop terminates."""
    check_weight(quiver, weight)
    if euler_characteristic(quiver) < 2:
        if quiver_key(quiver) != quiver_key(kronecker_quiver()):
            raise NotInRd(
                "below cycle rank 2 only the two-arrow quiver on two vertices "
                "is admissible"
            )
        if not is_tight(quiver, weight, max_nodes):
            raise NotTight("realization needs a tight input pair")
        return quiver, dict(weight)
    if not (is_prime(quiver) and is_acyclic(quiver) and in_rd_form(quiver)):
        raise NotInRd("realization needs a prime acyclic quiver in normal form")
    if not is_tight(quiver, weight, max_nodes):
        raise NotTight("realization needs a tight input pair")
    current, current_weight = quiver, dict(weight)
    while True:
        graph = skeleton(current)
        hub = next(
            (v for v in sorted(graph.vertices) if graph.degree(v) >= 4), None
        )
        if hub is None:
            return current, current_weight
        current, current_weight = _split_hub(
            current, current_weight, hub, max_nodes
        )
