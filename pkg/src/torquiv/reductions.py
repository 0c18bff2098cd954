"""Polyhedron-preserving transformations of weighted quivers.

Removal and contraction of arrows, tightening, reflections at valency-2
sinks/sources, prime (block) decomposition, skeleton extraction, the
normal form on sink-subdivided skeletons, doubling, and localization at a
polyhedron vertex.  Every transformation is an integral-affine equivalence
on the polyhedron side, so lattice point counts in every degree are
preserved move by move; traces carry (quiver, weight) snapshots so tests
can verify exactly that.

Optimization subproblems (is an arrow's coordinate maximized at 0? is the
relaxed minimum non-negative?) are solved exactly by enumerating extreme
points and recession generators, never by floating-point LP.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

from .errors import (
    EmptyPolyhedron,
    EmptyWeight,
    InputError,
    LoopArrow,
    NotAVertex,
    NotPrime,
    NotTight,
    UnsupportedCase,
    ValencyTooLow,
    WrongValencyPattern,
)
from .multigraph import Multigraph
from .polytope import DEFAULT_MAX_NODES, lattice_points
from .polytope import vertices as polytope_vertices
from .quiver import (
    Arrow,
    Quiver,
    check_weight,
    components,
    euler_characteristic,
    is_theta_stable,
    primitive_cycles,
    topological_order,
)


@dataclass(frozen=True)
class Move:
    kind: str  # "remove" | "contract" | "reflect"
    target: str  # arrow id for remove/contract, vertex id for reflect
    quiver: Quiver  # snapshot after the move
    weight: dict


@dataclass
class ReductionTrace:
    moves: list = field(default_factory=list)

    def to_json(self) -> list:
        return [
            {
                "move": m.kind,
                "target": m.target,
                "state": m.quiver.to_dict(m.weight),
            }
            for m in self.moves
        ]


def _extreme_points(quiver: Quiver, weight: dict, max_nodes: int) -> list[dict]:
    """A finite point set containing all optima of linear functionals that
    are bounded on the polyhedron: all degree-1 lattice points (acyclic
    case, where the polyhedron is their convex hull) or all vertices."""
    if sum(weight[v] for v in quiver.vertices) != 0:
        return []
    if topological_order(quiver) is not None:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", EmptyWeight)
            return lattice_points(quiver, weight, 1, max_nodes)
    return polytope_vertices(quiver, weight, max_nodes)


# -- removal and contraction ---------------------------------------------


def is_removable(
    quiver: Quiver, weight: dict, arrow_id: str, max_nodes: int = DEFAULT_MAX_NODES
) -> bool:
    """Does x(a) vanish identically on the polyhedron?  (Then deleting the
    arrow changes nothing.)  The maximum of x(a) is +infinity when an
    oriented cycle runs through a, and is otherwise attained on the extreme
    point set."""
    quiver.arrow(arrow_id)
    pts = _extreme_points(quiver, weight, max_nodes)
    if not pts:
        raise EmptyPolyhedron("cannot test removability on an empty polyhedron")
    if any(arrow_id in c.arrow_ids for c in primitive_cycles(quiver)):
        return False
    return all(p[arrow_id] == 0 for p in pts)


def contract(quiver: Quiver, weight: dict, arrow_id: str) -> tuple[Quiver, dict]:
    """Glue the endpoints of a non-loop arrow into one vertex (named by
    joining the two ids' '+'-separated parts in sorted order), delete the
    arrow, keep any parallels/loops that arise, and add the two endpoint
    weights."""
    a = quiver.arrow(arrow_id)
    if a.is_loop():
        raise LoopArrow(f"arrow {arrow_id!r} is a loop")
    check_weight(quiver, weight)
    parts = sorted(set(a.tail.split("+")) | set(a.head.split("+")))
    merged = "+".join(parts)
    taken = {v for v in quiver.vertices if v not in (a.tail, a.head)}
    while merged in taken:
        merged += "'"

    def rename(v: str) -> str:
        return merged if v in (a.tail, a.head) else v

    new_vertices = []
    for v in quiver.vertices:
        nv = rename(v)
        if nv not in new_vertices:
            new_vertices.append(nv)
    new_arrows = [
        Arrow(b.id, rename(b.tail), rename(b.head))
        for b in quiver.arrows
        if b.id != arrow_id
    ]
    new_weight = {rename(v): 0 for v in quiver.vertices}
    for v in quiver.vertices:
        new_weight[rename(v)] += weight[v]
    return Quiver(new_vertices, new_arrows), new_weight


def is_contractible(
    quiver: Quiver, weight: dict, arrow_id: str, max_nodes: int = DEFAULT_MAX_NODES
) -> bool:
    """May x(a) go negative once its sign constraint is dropped (all other
    coordinates still >= 0, divergence fixed)?  If not, contracting a is an
    equivalence.

    Dropping x(a) >= 0 and eliminating x(a) identifies the relaxed region
    with the polyhedron of the contracted pair; on it x(a) becomes the
    affine form  theta(head(a)) - sum_b c_b y(b)  with c_b = [head(b) =
    head(a)] - [tail(b) = head(a)] over the remaining arrows b.  The test
    is: form bounded below along every recession generator, and minimum
    over the extreme points >= 0.  An empty relaxed region passes
    trivially."""
    a = quiver.arrow(arrow_id)
    if a.is_loop():
        raise LoopArrow(f"arrow {arrow_id!r} is a loop")
    qhat, what = contract(quiver, weight, arrow_id)
    coeffs = {}
    for b in quiver.arrows:
        if b.id == arrow_id:
            continue
        coeffs[b.id] = (1 if b.head == a.head else 0) - (1 if b.tail == a.head else 0)
    pts = _extreme_points(qhat, what, max_nodes)
    if not pts:
        return True
    for c in primitive_cycles(qhat):
        if sum(coeffs[bid] for bid in c.arrow_ids) > 0:
            return False  # the form decreases along this recession ray
    const = weight[a.head]
    return all(
        const - sum(coeffs[bid] * p[bid] for bid in coeffs) >= 0 for p in pts
    )


# -- tightening ------------------------------------------------------------


def _first_removable(
    quiver: Quiver, weight: dict, max_nodes: int
) -> str | None:
    pts = _extreme_points(quiver, weight, max_nodes)
    if not pts:
        raise EmptyPolyhedron("cannot tighten an empty polyhedron")
    cyc_arrows = set()
    for c in primitive_cycles(quiver):
        cyc_arrows.update(c.arrow_ids)
    for aid in quiver.sorted_arrow_ids():
        if aid in cyc_arrows:
            continue
        if all(p[aid] == 0 for p in pts):
            return aid
    return None


def _first_contractible(
    quiver: Quiver, weight: dict, max_nodes: int
) -> str | None:
    for aid in quiver.sorted_arrow_ids():
        if quiver.arrow(aid).is_loop():
            continue
        if is_contractible(quiver, weight, aid, max_nodes):
            return aid
    return None


def tighten(
    quiver: Quiver, weight: dict, max_nodes: int = DEFAULT_MAX_NODES
) -> tuple[Quiver, dict, ReductionTrace]:
    """Remove/contract until no arrow is removable or contractible.

    Deterministic move order: scan arrows in id order, removals before
    contractions, restart after every move.  The result is a tight pair
    with the same polyhedron up to integral-affine equivalence."""
    check_weight(quiver, weight)
    trace = ReductionTrace()
    while True:
        aid = _first_removable(quiver, weight, max_nodes)
        if aid is not None:
            quiver = quiver.without_arrow(aid)
            trace.moves.append(Move("remove", aid, quiver, dict(weight)))
            continue
        aid = _first_contractible(quiver, weight, max_nodes)
        if aid is not None:
            quiver, weight = contract(quiver, weight, aid)
            trace.moves.append(Move("contract", aid, quiver, dict(weight)))
            continue
        return quiver, weight, trace


def _combinatorially_tight(quiver: Quiver, weight: dict) -> bool:
    """Every connected component of Q, and of Q minus any single arrow, is
    stable for the restricted weight."""

    def all_components_stable(q: Quiver) -> bool:
        for comp in components(q):
            sub = q.induced_on_vertices(comp)
            if not is_theta_stable(sub, {v: weight[v] for v in comp}):
                return False
        return True

    if not all_components_stable(quiver):
        return False
    for aid in quiver.sorted_arrow_ids():
        if not all_components_stable(quiver.without_arrow(aid)):
            return False
    return True


def is_tight(
    quiver: Quiver, weight: dict, max_nodes: int = DEFAULT_MAX_NODES
) -> bool:
    """No removable and no contractible arrow.  Runs both the optimization
    route and the combinatorial stability criterion and insists they
    agree."""
    if not _extreme_points(quiver, weight, max_nodes):
        raise EmptyPolyhedron("tightness undefined for an empty polyhedron")
    by_moves = (
        _first_removable(quiver, weight, max_nodes) is None
        and _first_contractible(quiver, weight, max_nodes) is None
    )
    by_stability = _combinatorially_tight(quiver, weight)
    if by_moves != by_stability:
        raise AssertionError(
            "internal inconsistency: optimization-based and combinatorial "
            f"tightness disagree ({by_moves} vs {by_stability})"
        )
    return by_moves


# -- reflection --------------------------------------------------------------


def reflect(quiver: Quiver, weight: dict, vertex_id: str) -> tuple[Quiver, dict]:
    """Reverse the two arrows at a valency-2 sink or source.

    The weight moves with it: the reflected vertex gets -theta(v) and each
    reversed arrow adds theta(v) at its other endpoint (twice if both
    arrows lead to the same neighbor).  Arrow ids are kept, making the
    reflection an involution on the nose; flows correspond by swapping the
    two reversed coordinates."""
    if not quiver.has_vertex(vertex_id):
        raise InputError(f"unknown vertex id {vertex_id!r}")
    check_weight(quiver, weight)
    ins = quiver.in_arrows(vertex_id)
    outs = quiver.out_arrows(vertex_id)
    if len(ins) == 2 and len(outs) == 0:
        pair = ins
    elif len(outs) == 2 and len(ins) == 0:
        pair = outs
    else:
        raise WrongValencyPattern(
            f"vertex {vertex_id!r} is not a valency-2 sink or source",
            in_arrows=len(ins),
            out_arrows=len(outs),
        )
    flip = {a.id for a in pair}
    new_arrows = [
        Arrow(a.id, a.head, a.tail) if a.id in flip else a for a in quiver.arrows
    ]
    new_weight = dict(weight)
    for a in pair:
        other = a.tail if a.head == vertex_id else a.head
        new_weight[other] += weight[vertex_id]
    new_weight[vertex_id] = -weight[vertex_id]
    return Quiver(quiver.vertices, new_arrows), new_weight


# -- prime decomposition -----------------------------------------------------


def _blocks(quiver: Quiver) -> list[tuple[frozenset, list[Arrow]]]:
    """Blocks of the underlying multigraph: maximal 2-vertex-connected
    pieces, bridges as 2-vertex blocks, and each loop as its own block."""
    blocks: list[tuple[frozenset, list[Arrow]]] = []
    for a in quiver.arrows:
        if a.is_loop():
            blocks.append((frozenset([a.tail]), [a]))
    plain = [a for a in quiver.arrows if not a.is_loop()]

    disc: dict = {}
    low: dict = {}
    stack: list[Arrow] = []
    counter = [0]

    import sys

    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 4 * len(quiver.vertices) + 100))

    incident: dict = {v: [] for v in quiver.vertices}
    for a in plain:
        incident[a.tail].append(a)
        incident[a.head].append(a)

    def dfs(v: str, parent_edge: str | None) -> None:
        disc[v] = low[v] = counter[0]
        counter[0] += 1
        for a in incident[v]:
            if a.id == parent_edge:
                continue
            w = a.head if a.tail == v else a.tail
            if w not in disc:
                stack.append(a)
                dfs(w, a.id)
                low[v] = min(low[v], low[w])
                if low[w] >= disc[v]:
                    block_edges = []
                    while True:
                        e = stack.pop()
                        block_edges.append(e)
                        if e.id == a.id:
                            break
                    vs = frozenset(
                        [x for e in block_edges for x in (e.tail, e.head)]
                    )
                    blocks.append((vs, block_edges))
            elif disc[w] < disc[v]:
                stack.append(a)
                low[v] = min(low[v], disc[w])

    for v in quiver.vertices:
        if v not in disc:
            dfs(v, None)
    sys.setrecursionlimit(old_limit)
    return blocks


def prime_decompose(quiver: Quiver, weight: dict) -> list[tuple[Quiver, dict]]:
    """Split into blocks; the weight of a hanging branch is folded into the
    cut vertex it hangs from, so every factor's weight sums over its own
    vertex set to the original component total.

    Isolated vertices come out as arrowless single-vertex factors.  Factors
    are ordered by smallest vertex id."""
    check_weight(quiver, weight)
    comp_of: dict = {}
    comps = components(quiver)
    for comp in comps:
        for v in comp:
            comp_of[v] = comp

    blocks = _blocks(quiver)
    covered = {v for vs, _ in blocks for v in vs}
    factors: list[tuple[Quiver, dict]] = []

    for v in quiver.vertices:
        if v not in covered and quiver.valency(v) == 0:
            factors.append((Quiver([v], []), {v: weight[v]}))

    for vs, arrows in blocks:
        comp = comp_of[min(vs)]
        factor_weight = {}
        for v in sorted(vs):
            theta_v = weight[v]
            # vertices separated from this block by v contribute there
            rest = [u for u in comp if u != v]
            sub = quiver.induced_on_vertices(rest)
            for piece in components(sub):
                if piece & (vs - {v}):
                    continue
                theta_v += sum(weight[u] for u in piece)
            factor_weight[v] = theta_v
        factors.append(
            (Quiver(sorted(vs), sorted(arrows, key=lambda a: a.id)), factor_weight)
        )

    factors.sort(key=lambda f: (min(f[0].vertices), f[0].sorted_arrow_ids()))
    return factors


def is_prime(quiver: Quiver) -> bool:
    """One block covering the whole quiver (a single vertex with no arrows
    counts as prime; a vertex with two loops does not, each loop being its
    own block)."""
    if not quiver.vertices:
        return False
    if len(components(quiver)) != 1:
        return False
    if len(quiver.vertices) == 1 and not quiver.arrows:
        return True
    blocks = _blocks(quiver)
    return len(blocks) == 1 and blocks[0][0] == frozenset(quiver.vertices)


# -- skeleton ----------------------------------------------------------------


def skeleton(quiver: Quiver) -> Multigraph:
    """Forget orientations and suppress valency-2 vertices: the vertices of
    the skeleton are those of valency >= 3, with one edge per maximal
    undirected path running through valency-2 vertices (loops allowed)."""
    for v in quiver.vertices:
        if quiver.valency(v) < 2:
            raise ValencyTooLow(f"vertex {v!r} has valency {quiver.valency(v)}")
    if not is_prime(quiver):
        raise NotPrime("skeleton is defined for prime quivers")
    if euler_characteristic(quiver) < 2:
        raise UnsupportedCase("skeleton needs euler characteristic >= 2")

    hubs = [v for v in quiver.vertices if quiver.valency(v) >= 3]
    incident: dict = {v: [] for v in quiver.vertices}
    for a in quiver.arrows:
        incident[a.tail].append(a)
        if not a.is_loop():
            incident[a.head].append(a)

    used: set = set()
    edges = []
    for v in sorted(hubs):
        for a in sorted(incident[v], key=lambda a: a.id):
            if a.id in used:
                continue
            used.add(a.id)
            if a.is_loop():
                edges.append((v, v))
                continue
            prev = a
            cur = a.head if a.tail == v else a.tail
            while quiver.valency(cur) == 2:
                nxt = None
                for b in incident[cur]:
                    if b.id != prev.id:
                        nxt = b
                        break
                if nxt is None:
                    raise UnsupportedCase(
                        f"degenerate valency-2 vertex {cur!r} on a loop"
                    )
                used.add(nxt.id)
                prev = nxt
                cur = nxt.head if nxt.tail == cur else nxt.tail
            edges.append((v, cur))
    return Multigraph(sorted(hubs), edges)


# -- normal form on sink-subdivided skeletons ---------------------------------


def in_rd_form(quiver: Quiver) -> bool:
    """The shape conditions of the normal form: no arrow joins two
    valency-2 vertices, and every valency-2 vertex is a sink."""
    for v in quiver.vertices:
        if quiver.valency(v) == 2 and quiver.outdegree(v) != 0:
            return False
    for a in quiver.arrows:
        if (
            not a.is_loop()
            and quiver.valency(a.tail) == 2
            and quiver.valency(a.head) == 2
        ):
            return False
    return True


def normalize_to_Rd(
    quiver: Quiver, weight: dict, max_nodes: int = DEFAULT_MAX_NODES
) -> tuple[Quiver, dict, ReductionTrace]:
    """Drive a tight prime pair into the normal form where every valency-2
    vertex is a sink and no arrow joins two valency-2 vertices.

    Moves, in priority order: remove a removable arrow, contract a
    contractible one (these only become available when a reflection has
    just broken tightness, e.g. by turning a valency-2 sink into a
    flow-through vertex), then reflect a valency-2 source.  Each reflection
    lowers the valency-2 source count and removals/contractions lower the
    arrow count, so the loop terminates."""
    check_weight(quiver, weight)
    if not is_prime(quiver):
        raise NotPrime("normal form needs a prime quiver")
    if not is_tight(quiver, weight, max_nodes):
        raise NotTight("normal form needs a tight input pair")
    if euler_characteristic(quiver) < 2:
        raise UnsupportedCase("normal form needs euler characteristic >= 2")

    trace = ReductionTrace()
    while True:
        aid = _first_removable(quiver, weight, max_nodes)
        if aid is not None:
            quiver = quiver.without_arrow(aid)
            trace.moves.append(Move("remove", aid, quiver, dict(weight)))
            continue
        aid = _first_contractible(quiver, weight, max_nodes)
        if aid is not None:
            quiver, weight = contract(quiver, weight, aid)
            trace.moves.append(Move("contract", aid, quiver, dict(weight)))
            continue
        source = None
        for v in sorted(quiver.vertices):
            if quiver.valency(v) == 2 and quiver.outdegree(v) == 2:
                source = v
                break
        if source is not None:
            quiver, weight = reflect(quiver, weight, source)
            trace.moves.append(Move("reflect", source, quiver, dict(weight)))
            continue
        break
    if not in_rd_form(quiver):
        raise UnsupportedCase(
            "normal-form loop stalled before reaching the target shape"
        )
    return quiver, weight, trace


# -- doubling ----------------------------------------------------------------


def double_quiver(quiver: Quiver, weight: dict, d: int) -> tuple[Quiver, dict]:
    """Bipartite double: each vertex v splits into v- (weight -d) and v+
    (weight theta(v)+d); each arrow a: v->w is rerouted v- -> w+; an extra
    arrow e_v: v- -> v+ is added per vertex."""
    check_weight(quiver, weight)
    if not isinstance(d, int) or d < 1:
        raise InputError("doubling parameter d must be a positive integer")
    minus = {v: v + "-" for v in quiver.vertices}
    plus = {v: v + "+" for v in quiver.vertices}
    taken = set(minus.values()) | set(plus.values())
    new_vertices = []
    for v in quiver.vertices:
        new_vertices.append(minus[v])
        new_vertices.append(plus[v])
    arrow_ids = {a.id for a in quiver.arrows}
    new_arrows = [Arrow(a.id, minus[a.tail], plus[a.head]) for a in quiver.arrows]
    for v in quiver.vertices:
        eid = "e_" + v
        while eid in arrow_ids:
            eid += "'"
        arrow_ids.add(eid)
        new_arrows.append(Arrow(eid, minus[v], plus[v]))
    new_weight = {}
    for v in quiver.vertices:
        new_weight[minus[v]] = -d
        new_weight[plus[v]] = weight[v] + d
    return Quiver(new_vertices, new_arrows), new_weight


# -- localization at a polyhedron vertex ---------------------------------------


def vertex_localization(quiver: Quiver, weight: dict, m: dict) -> Quiver:
    """Contract the support of a polyhedron vertex m; the resulting quiver
    carries the zero weight (its cone is the local model at m)."""
    check_weight(quiver, weight)
    for a in quiver.arrows:
        if a.id not in m:
            raise InputError(f"flow missing arrow {a.id!r}")
        if not isinstance(m[a.id], int) or m[a.id] < 0:
            raise NotAVertex(f"flow value at {a.id!r} is not a non-negative integer")
    div = {v: 0 for v in quiver.vertices}
    for a in quiver.arrows:
        div[a.head] += m[a.id]
        div[a.tail] -= m[a.id]
    if any(div[v] != weight[v] for v in quiver.vertices):
        raise NotAVertex("flow does not have divergence theta")

    supp = [a for a in quiver.arrows if m[a.id] > 0]
    # support components must be stable trees
    supp_quiver = quiver.restricted_to_arrows([a.id for a in supp])
    for comp in components(supp_quiver):
        sub_arrows = [a for a in supp if a.tail in comp]
        if len(sub_arrows) != len(comp) - 1:
            raise NotAVertex("support component is not a tree")
        sub = Quiver(sorted(comp), sub_arrows)
        if not is_theta_stable(sub, {v: weight[v] for v in comp}):
            raise NotAVertex("support component is not stable")

    q, w = quiver, dict(weight)
    for aid in sorted(a.id for a in supp):
        q, w = contract(q, w, aid)
    if any(w[v] != 0 for v in q.vertices):
        raise AssertionError("localization weight failed to vanish")
    return q
