"""Binomial relation machinery for flow semigroups.

For an acyclic quiver with weight, the integer flows of all dilations form
a graded semigroup generated in degree one.  The relations among the
degree-one generators are binomial; whether all relations follow from
low-degree ones is decided by connectivity of per-element divisor graphs,
which this module builds, certifies, and mines for a minimal generating
system.  It also handles two side cases: the bipartite one-sided-matching
semigroup and the degree of relations between cycle products on strongly
connected quivers with zero weight.

Flows travel as dicts at the API boundary and as tuples (ordered by sorted
arrow id) internally.
"""

import itertools
import warnings
from dataclasses import dataclass

from .errors import (
    EmptyPolyhedron,
    EmptyWeight,
    InputError,
    NotBipartite,
    NotInSemigroup,
    NotParallel,
    UnsupportedCase,
)
from .polytope import DEFAULT_MAX_NODES, _NodeBudget, dimension, lattice_points
from .quiver import Quiver, divergence, is_strongly_connected, primitive_cycles, topological_order


def _leq(small: tuple, big: tuple) -> bool:
    return all(x <= y for x, y in zip(small, big))


def _sub(big: tuple, small: tuple) -> tuple:
    return tuple(x - y for x, y in zip(big, small))


def _addt(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


class GradedSemigroup:
    """All integer flows of the dilated polytopes, graded by dilation factor.

    Only acyclic quivers are supported: with oriented cycles and a nonzero
    weight the degree-one piece is infinite, and the zero-weight cyclic
    situation is served by affine_relation_degree instead.
    """

    def __init__(self, quiver: Quiver, weight: dict, max_nodes: int = DEFAULT_MAX_NODES):
        if topological_order(quiver) is None:
            raise UnsupportedCase(
                "graded semigroup requires an acyclic quiver; "
                "for strongly connected zero-weight quivers use affine_relation_degree",
                vertices=len(quiver.vertices),
            )
        self.quiver = quiver
        self.weight = dict(weight)
        self.max_nodes = max_nodes
        self.arrow_ids = tuple(quiver.sorted_arrow_ids())
        self._pieces: dict[int, tuple] = {0: (tuple(0 for _ in self.arrow_ids),)}
        self.generators = self.graded_piece(1)
        self._gen_index = {g: i for i, g in enumerate(self.generators)}

    def graded_piece(self, k: int) -> tuple:
        """Sorted tuple of all degree-k elements, as flow tuples."""
        if k < 0:
            raise InputError("degree must be non-negative")
        if k not in self._pieces:
            scaled = {v: k * w for v, w in self.weight.items()}
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", EmptyWeight)
                pts = lattice_points(self.quiver, scaled, 1, max_nodes=self.max_nodes)
            self._pieces[k] = tuple(
                tuple(p[a] for a in self.arrow_ids) for p in pts
            )
        return self._pieces[k]

    def flow_tuple(self, flow: dict) -> tuple:
        missing = [a for a in self.arrow_ids if a not in flow]
        if missing or len(flow) != len(self.arrow_ids):
            raise InputError(f"flow must assign exactly the arrow ids {list(self.arrow_ids)}")
        return tuple(flow[a] for a in self.arrow_ids)

    def flow_dict(self, tup: tuple) -> dict:
        return dict(zip(self.arrow_ids, tup))

    def contains(self, tup: tuple, k: int) -> bool:
        """Membership in the degree-k piece, decided by the defining equations."""
        if any(not isinstance(x, int) or isinstance(x, bool) or x < 0 for x in tup):
            return False
        div = divergence(self.quiver, self.flow_dict(tup))
        return all(div[v] == k * self.weight[v] for v in self.quiver.vertices)

    def index(self, gen: tuple) -> int:
        return self._gen_index[gen]

    def divisor_indices(self, tup: tuple) -> list:
        return [i for i, g in enumerate(self.generators) if _leq(g, tup)]

    def peel(self, tup: tuple, count: int):
        """Greedy factorization into `count` generators, lex-smallest first.

        Returns a tuple of generator indices, or None when `tup` is not a
        degree-`count` element.  Normality guarantees the greedy choice
        never needs backtracking.
        """
        residual = tup
        picked = []
        for _ in range(count):
            found = None
            for i, g in enumerate(self.generators):
                if _leq(g, residual):
                    found = i
                    break
            if found is None:
                return None
            picked.append(found)
            residual = _sub(residual, self.generators[found])
        if any(residual):
            return None
        return tuple(picked)


@dataclass(frozen=True)
class DivisorGraph:
    """Degree-one divisors of one semigroup element and their compatibilities."""

    element: tuple
    degree: int
    nodes: tuple  # generator flow tuples, sorted
    edges: tuple  # pairs of node indices, i < j
    components: tuple  # tuples of node indices, sorted by smallest member

    def is_connected(self) -> bool:
        return len(self.components) <= 1


@dataclass(frozen=True)
class BinomialGen:
    """A homogeneous binomial relation between two factorizations."""

    degree: int
    image: tuple
    left: tuple  # sorted generator indices
    right: tuple


@dataclass(frozen=True)
class DegreeViolation:
    """Witness that some element needs a generator above the claimed bound."""

    degree: int
    element: tuple
    components: tuple  # node flow tuples grouped per component


def _components_of(n: int, edges: list) -> list:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [tuple(groups[r]) for r in sorted(groups)]


def divisor_graph(semigroup: GradedSemigroup, element: dict, degree: int) -> DivisorGraph:
    """Graph of degree-one divisors of `element`, joined when their sum divides it."""
    if degree < 2:
        raise InputError("divisor graphs are defined for degree >= 2")
    tup = semigroup.flow_tuple(element)
    if not semigroup.contains(tup, degree):
        raise NotInSemigroup(
            "element does not lie in the requested graded piece",
            degree=degree,
            element=sorted(element.items()),
        )
    nodes = tuple(g for g in semigroup.generators if _leq(g, tup))
    edges = []
    for i, j in itertools.combinations(range(len(nodes)), 2):
        pair = _addt(nodes[i], nodes[j])
        if _leq(pair, tup):
            if __debug__:
                rest = _sub(tup, pair)
                if degree == 2:
                    assert not any(rest)
                else:
                    assert semigroup.peel(rest, degree - 2) is not None
            edges.append((i, j))
    comps = _components_of(len(nodes), edges)
    return DivisorGraph(tup, degree, nodes, tuple(edges), tuple(comps))


def _lazy_connected(nodes: list, adjacent) -> bool:
    """Union-find connectivity, testing pairs only until the answer is known.

    `adjacent(i, j)` is consulted lazily: pairs already known to be in the
    same component are skipped, and the scan stops as soon as a single
    component remains.  Used on the certification hot path, where almost
    every graph is connected and the full edge list is never needed.
    """
    n = len(nodes)
    if n <= 1:
        return True
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    remaining = n
    for i in range(n - 1):
        for j in range(i + 1, n):
            ri, rj = find(i), find(j)
            if ri == rj:
                continue
            if adjacent(i, j):
                parent[max(ri, rj)] = min(ri, rj)
                remaining -= 1
                if remaining == 1:
                    return True
    return remaining == 1


def _element_connected(semigroup: GradedSemigroup, tup: tuple) -> bool:
    """Fast connectivity of an element's divisor graph (no edge list)."""
    nodes = [g for g in semigroup.generators if _leq(g, tup)]
    return _lazy_connected(
        nodes, lambda i, j: _leq(_addt(nodes[i], nodes[j]), tup)
    )


def _representative(semigroup: GradedSemigroup, tup: tuple, degree: int, first: tuple) -> tuple:
    """Factorization starting with the given generator, greedy afterwards."""
    rest = semigroup.peel(_sub(tup, first), degree - 1)
    assert rest is not None
    return tuple(sorted((semigroup.index(first),) + rest))


def minimal_generators(semigroup: GradedSemigroup, max_degree: int) -> list:
    """Minimal binomial generating system up to the given degree.

    For each element whose divisor graph splits into c > 1 components the
    ideal needs exactly c - 1 generators; they pair a representative
    factorization of the first component against one from each other.
    """
    if max_degree < 2:
        raise InputError("max_degree must be at least 2")
    out = []
    if not semigroup.generators:
        return out
    for k in range(2, max_degree + 1):
        for tup in semigroup.graded_piece(k):
            if _element_connected(semigroup, tup):
                continue
            graph = divisor_graph(semigroup, semigroup.flow_dict(tup), k)
            reps = [
                _representative(semigroup, tup, k, graph.nodes[comp[0]])
                for comp in graph.components
            ]
            for other in reps[1:]:
                out.append(BinomialGen(k, tup, reps[0], other))
    return out


def certify_degree_bound(semigroup: GradedSemigroup, bound: int, horizon: int | None = None):
    """Check that no element above `bound` needs a new generator.

    Scans degrees in (bound, horizon]; the default horizon is
    max(bound + 1, polytope dimension + 1).  A horizon at or below the
    bound leaves nothing to scan and certifies vacuously.  Returns
    (True, None) or (False, first violation).
    """
    if bound < 1:
        raise InputError("bound must be positive")
    if not semigroup.generators:
        return True, None
    if horizon is None:
        horizon = max(bound + 1, dimension(semigroup.quiver, semigroup.weight) + 1)
    elif horizon < 1:
        raise InputError("horizon must be positive")
    for k in range(bound + 1, horizon + 1):
        for tup in semigroup.graded_piece(k):
            if _element_connected(semigroup, tup):
                continue
            graph = divisor_graph(semigroup, semigroup.flow_dict(tup), k)
            grouped = tuple(
                tuple(graph.nodes[i] for i in comp) for comp in graph.components
            )
            return False, DegreeViolation(k, tup, grouped)
    return True, None


def collapse_parallel(quiver: Quiver, arrow_pair: tuple) -> Quiver:
    """Merge two parallel arrows into the first one (flows add up)."""
    first, second = arrow_pair
    a1 = quiver.arrow(first)
    a2 = quiver.arrow(second)
    if first == second or a1.tail != a2.tail or a1.head != a2.head:
        raise NotParallel(
            "arrows must be distinct with equal tails and equal heads",
            arrows=[first, second],
        )
    return quiver.without_arrow(second)


def lift_generators(
    quiver: Quiver,
    weight: dict,
    arrow_pair: tuple,
    collapsed_gens: list,
    max_nodes: int = DEFAULT_MAX_NODES,
) -> list:
    """Pull relations back through the merge of two parallel arrows.

    Given a generating set for the quiver with the pair collapsed, returns
    one for the original quiver: every collapsed relation lifted once per
    split of its merged flow across the two parallel arrows (assigning
    first-arrow flow greedily across the factors), plus the quadratic
    swaps that move one unit between the two arrows.  The result generates
    but is not claimed minimal.
    """
    first, second = arrow_pair
    small = collapse_parallel(quiver, arrow_pair)
    big_sg = GradedSemigroup(quiver, weight, max_nodes=max_nodes)
    small_sg = GradedSemigroup(small, weight, max_nodes=max_nodes)
    pos1 = big_sg.arrow_ids.index(first)
    pos2 = big_sg.arrow_ids.index(second)
    merged_pos = small_sg.arrow_ids.index(first)

    def lift_side(indices: tuple, on_first: int) -> tuple:
        """Lift a factor multiset, putting `on_first` total units on α₁."""
        out = []
        left_to_place = on_first
        for i in indices:
            flow = small_sg.flow_dict(small_sg.generators[i])
            take = min(flow[first], left_to_place)
            left_to_place -= take
            flow[second] = flow[first] - take
            flow[first] = take
            out.append(big_sg.index(big_sg.flow_tuple(flow)))
        assert left_to_place == 0
        return tuple(sorted(out))

    lifted = []
    for gen in collapsed_gens:
        merged_total = gen.image[merged_pos]
        for on_first in range(merged_total + 1):
            image = small_sg.flow_dict(gen.image)
            image[second] = merged_total - on_first
            image[first] = on_first
            lifted.append(
                BinomialGen(
                    gen.degree,
                    big_sg.flow_tuple(image),
                    lift_side(gen.left, on_first),
                    lift_side(gen.right, on_first),
                )
            )

    def shifted(tup: tuple, delta: int) -> tuple:
        moved = list(tup)
        moved[pos1] -= delta
        moved[pos2] += delta
        return tuple(moved)

    seen = set()
    for m in big_sg.generators:
        if m[pos1] < 1:
            continue
        for n in big_sg.generators:
            if n[pos2] < 1:
                continue
            left = tuple(sorted((big_sg.index(m), big_sg.index(n))))
            right = tuple(
                sorted((big_sg.index(shifted(m, 1)), big_sg.index(shifted(n, -1))))
            )
            if left == right:
                continue
            key = (min(left, right), max(left, right))
            if key in seen:
                continue
            seen.add(key)
            lifted.append(BinomialGen(2, _addt(m, n), key[0], key[1]))
    lifted.sort(key=lambda g: (g.degree, g.image, g.left, g.right))
    return lifted


def _osm_parts(quiver: Quiver) -> tuple:
    """Split vertices into sources and sinks; reject mixed vertices."""
    sources, sinks = [], []
    for v in quiver.sorted_vertices():
        if quiver.indegree(v) == 0:
            sources.append(v)
        elif quiver.outdegree(v) == 0:
            sinks.append(v)
        else:
            raise NotBipartite(
                "vertex has both incoming and outgoing arrows", vertex=v
            )
    return sources, sinks


def osm_lattice_points(quiver: Quiver) -> list:
    """All one-sided matchings: one arrow per source, at most one per sink."""
    sources, _ = _osm_parts(quiver)
    arrow_ids = quiver.sorted_arrow_ids()
    out = []

    def extend(i: int, picked: dict, used_sinks: set):
        if i == len(sources):
            flow = {a: 0 for a in arrow_ids}
            for aid in picked.values():
                flow[aid] = 1
            out.append(flow)
            return
        v = sources[i]
        for arrow in sorted(quiver.out_arrows(v), key=lambda a: a.id):
            if arrow.head in used_sinks:
                continue
            picked[v] = arrow.id
            used_sinks.add(arrow.head)
            extend(i + 1, picked, used_sinks)
            used_sinks.discard(arrow.head)
            del picked[v]

    extend(0, {}, set())
    out.sort(key=lambda f: tuple(f[a] for a in arrow_ids))
    return out


def complete_to_equal_parts(quiver: Quiver) -> tuple:
    """Add fully connected extra sources until sources and sinks balance.

    Returns the enlarged quiver with the all-(-1)/all-(+1) weight on
    sources/sinks.
    """
    from .quiver import Arrow

    sources, sinks = _osm_parts(quiver)
    vertices = list(quiver.vertices)
    arrows = list(quiver.arrows)
    taken_v = set(vertices)
    taken_a = {a.id for a in arrows}
    extras = []
    for i in range(len(sinks) - len(sources)):
        name = f"extra{i + 1}"
        while name in taken_v:
            name += "'"
        taken_v.add(name)
        vertices.append(name)
        extras.append(name)
        for w in sinks:
            aid = f"{name}:{w}"
            while aid in taken_a:
                aid += "'"
            taken_a.add(aid)
            arrows.append(Arrow(aid, name, w))
    filled = Quiver(vertices, arrows)
    weight = {}
    for v in filled.vertices:
        weight[v] = 1 if filled.indegree(v) > 0 else -1
    # isolated original sources keep weight -1, matching the source side
    return filled, weight


def _osm_piece(quiver: Quiver, sources: list, sinks: list, k: int, budget: _NodeBudget) -> list:
    """All degree-k elements of the one-sided-matching semigroup."""
    arrow_ids = quiver.sorted_arrow_ids()
    pos = {a: i for i, a in enumerate(arrow_ids)}
    sink_cap = {w: k for w in sinks}
    out_arrows = {
        v: sorted(quiver.out_arrows(v), key=lambda a: a.id) for v in sources
    }
    results = []
    current = [0] * len(arrow_ids)
    sink_load = {w: 0 for w in sinks}

    def fill_source(si: int):
        budget.spend()
        if si == len(sources):
            results.append(tuple(current))
            return
        arrows = out_arrows[sources[si]]

        def comp(ai: int, remaining: int):
            if ai == len(arrows) - 1:
                arrow = arrows[ai]
                if sink_load[arrow.head] + remaining > sink_cap[arrow.head]:
                    return
                current[pos[arrow.id]] = remaining
                sink_load[arrow.head] += remaining
                fill_source(si + 1)
                sink_load[arrow.head] -= remaining
                current[pos[arrow.id]] = 0
                return
            arrow = arrows[ai]
            top = min(remaining, sink_cap[arrow.head] - sink_load[arrow.head])
            for take in range(top + 1):
                current[pos[arrow.id]] = take
                sink_load[arrow.head] += take
                comp(ai + 1, remaining - take)
                sink_load[arrow.head] -= take
                current[pos[arrow.id]] = 0

        if not arrows:
            return  # a source with no arrows kills every degree-k element
        comp(0, k)

    fill_source(0)
    results.sort()
    return results


def _osm_certified(quiver: Quiver, bound: int, horizon: int, budget: _NodeBudget) -> bool:
    """Divisor-graph connectivity on the one-sided-matching semigroup."""
    sources, sinks = _osm_parts(quiver)
    if not sources:
        return True
    arrow_ids = quiver.sorted_arrow_ids()
    matchings = [
        tuple(m[a] for a in arrow_ids) for m in osm_lattice_points(quiver)
    ]
    heads = {a.id: a.head for a in quiver.arrows}

    def sink_degrees(tup: tuple) -> dict:
        deg = {w: 0 for w in sinks}
        for aid, val in zip(arrow_ids, tup):
            if val:
                deg[heads[aid]] += val
        return deg

    for k in range(bound + 1, horizon + 1):
        for s in _osm_piece(quiver, sources, sinks, k, budget):
            deg_s = sink_degrees(s)
            full = {w for w, d in deg_s.items() if d == k}
            nodes = []
            for m in matchings:
                if not _leq(m, s):
                    continue
                deg_m = sink_degrees(m)
                if any(deg_m[w] == 0 for w in full):
                    continue
                nodes.append(m)

            def adjacent(i, j):
                pair = _addt(nodes[i], nodes[j])
                if not _leq(pair, s):
                    return False
                deg_pair = sink_degrees(pair)
                return all(deg_s[w] - deg_pair[w] <= k - 2 for w in sinks)

            if not _lazy_connected(nodes, adjacent):
                return False
    return True


def osm_certify_degree3(
    quiver: Quiver, horizon: int | None = None, max_nodes: int = DEFAULT_MAX_NODES
) -> bool:
    """Certify the degree-3 bound for the one-sided-matching semigroup.

    Runs the check twice — directly on the matching semigroup, and on the
    quiver completed with fully connected extra sources under the unit
    weight — and insists the answers agree.
    """
    sources, _ = _osm_parts(quiver)
    filled, unit_weight = complete_to_equal_parts(quiver)
    if horizon is None:
        try:
            horizon = max(4, dimension(filled, unit_weight) + 1)
        except EmptyPolyhedron:
            horizon = 4
    elif horizon < 1:
        raise InputError("horizon must be positive")
    budget = _NodeBudget(max_nodes)
    direct = _osm_certified(quiver, 3, horizon, budget)
    completed_sg = GradedSemigroup(filled, unit_weight, max_nodes=max_nodes)
    completed, _ = certify_degree_bound(completed_sg, 3, horizon)
    assert direct == completed, "matching-semigroup and completed-quiver routes disagree"
    return direct


def affine_relation_degree(quiver: Quiver, max_nodes: int = DEFAULT_MAX_NODES) -> int:
    """Largest alternative-decomposition size for a sum of two primitive cycles.

    On a strongly connected quiver with zero weight, the relations among
    cycle products are controlled by pairs of primitive cycles whose
    combined arrow multiset can be rewritten as a different multiset of
    primitive cycles; the return value is the largest size of such a
    rewriting (0 when none exists, i.e. the relation ideal is zero).
    """
    if not is_strongly_connected(quiver):
        raise UnsupportedCase(
            "relation degree is defined for strongly connected quivers",
            vertices=len(quiver.vertices),
        )
    arrow_ids = quiver.sorted_arrow_ids()
    cycles = primitive_cycles(quiver)
    eps = []
    for c in cycles:
        vec = c.epsilon(quiver)
        eps.append(tuple(vec[a] for a in arrow_ids))
    budget = _NodeBudget(max_nodes)
    best = 0

    def decompositions(target: tuple, start: int, picked: list, banned: tuple):
        nonlocal best
        budget.spend()
        if not any(target):
            if tuple(picked) != banned:
                best = max(best, len(picked))
            return
        for i in range(start, len(eps)):
            if _leq(eps[i], target):
                picked.append(i)
                decompositions(_sub(target, eps[i]), i, picked, banned)
                picked.pop()

    for i in range(len(eps)):
        for j in range(i, len(eps)):
            target = _addt(eps[i], eps[j])
            decompositions(target, 0, [], (i, j))
    return best
