"""Shared example quivers for the test suite."""

import random

from torquiv import Arrow, Quiver


def kronecker(w1=-1, w2=1):
    q = Quiver(["s", "t"], [Arrow("a1", "s", "t"), Arrow("a2", "s", "t")])
    return q, {"s": w1, "t": w2}


def quiver_a(weights=(-1, 1, 1, 1, -2)):
    """Two sources feeding three middle sinks: the 2-dimensional workhorse.

    Weight order: (s, m1, m2, m3, t)."""
    q = Quiver(
        ["s", "m1", "m2", "m3", "t"],
        [
            Arrow("a1", "s", "m1"),
            Arrow("a2", "s", "m2"),
            Arrow("a3", "s", "m3"),
            Arrow("a4", "t", "m1"),
            Arrow("a5", "t", "m2"),
            Arrow("a6", "t", "m3"),
        ],
    )
    s, m1, m2, m3, t = weights
    return q, {"s": s, "m1": m1, "m2": m2, "m3": m3, "t": t}


def two_cycle():
    q = Quiver(["u", "v"], [Arrow("a", "u", "v"), Arrow("b", "v", "u")])
    return q, {"u": 0, "v": 0}


def loop_quiver():
    q = Quiver(["v"], [Arrow("a", "v", "v")])
    return q, {"v": 0}


def affine_cycle_pair(d):
    """Oriented d-cycle plus all reversed arrows; strongly connected, and
    with the zero weight the polyhedron is a pointed cone whose dimension
    is the cycle space rank d+1."""
    verts = [f"v{i}" for i in range(d)]
    arrows = []
    for i in range(d):
        arrows.append(Arrow(f"a{i}", verts[i], verts[(i + 1) % d]))
        arrows.append(Arrow(f"b{i}", verts[(i + 1) % d], verts[i]))
    return Quiver(verts, arrows), {v: 0 for v in verts}


def opposite_pair(k_forward, k_backward):
    """Two vertices joined by k arrows one way and k the other."""
    arrows = [Arrow(f"c{i}", "u", "v") for i in range(k_forward)]
    arrows += [Arrow(f"d{i}", "v", "u") for i in range(k_backward)]
    return Quiver(["u", "v"], arrows), {"u": 0, "v": 0}


def complete_bipartite(n_sources, n_sinks, source_weight=None, sink_weight=None):
    """K(m,n) with all arrows source -> sink."""
    sources = [f"s{i}" for i in range(n_sources)]
    sinks = [f"t{j}" for j in range(n_sinks)]
    arrows = [
        Arrow(f"a{i}{j}", s, t)
        for i, s in enumerate(sources)
        for j, t in enumerate(sinks)
    ]
    q = Quiver(sources + sinks, arrows)
    if source_weight is None:
        source_weight = -n_sinks
    if sink_weight is None:
        sink_weight = n_sources
    w = {s: source_weight for s in sources}
    w.update({t: sink_weight for t in sinks})
    return q, w


def random_acyclic(rng: random.Random, max_vertices=5, max_arrows=8, weight_bound=3):
    """A random acyclic quiver with a weight that sums to zero (arrows only
    go from lower to higher vertex index, so cycles are impossible)."""
    n = rng.randint(2, max_vertices)
    verts = [f"v{i}" for i in range(n)]
    m = rng.randint(1, max_arrows)
    arrows = []
    for k in range(m):
        i = rng.randint(0, n - 2)
        j = rng.randint(i + 1, n - 1)
        arrows.append(Arrow(f"a{k}", verts[i], verts[j]))
    w = [rng.randint(-weight_bound, weight_bound) for _ in range(n - 1)]
    w.append(-sum(w))
    return Quiver(verts, arrows), dict(zip(verts, w))


# -- independent rewriting oracle ---------------------------------------------
#
# A generating set of homogeneous binomials is checked semantically: two
# factorizations of the same semigroup element must be linked by a chain of
# single-binomial substitutions.  This never looks at divisor graphs, so it
# cross-checks the production code from a different direction.


def all_factorizations(semigroup, element, degree):
    """All multisets of `degree` generator indices summing to the flow tuple,
    as sorted index tuples (non-decreasing)."""
    gens = semigroup.generators
    found = []
    picked = []

    def extend(start, residual):
        if len(picked) == degree:
            if not any(residual):
                found.append(tuple(picked))
            return
        for i in range(start, len(gens)):
            g = gens[i]
            if all(x <= y for x, y in zip(g, residual)):
                picked.append(i)
                extend(i, tuple(y - x for x, y in zip(g, residual)))
                picked.pop()

    extend(0, element)
    return found


def _substitutions(fact, binomials):
    """Every factorization reachable from `fact` by one binomial rewrite."""
    from collections import Counter

    have = Counter(fact)
    for b in binomials:
        for src, dst in ((b.left, b.right), (b.right, b.left)):
            need = Counter(src)
            if all(have[i] >= c for i, c in need.items()):
                replaced = have - need + Counter(dst)
                yield tuple(sorted(replaced.elements()))


def rewriting_connected(semigroup, binomials, max_degree):
    """True iff every pair of equal-image factorizations of degree <= max_degree
    is linked by rewrites that only use the given binomials."""
    usable = [b for b in binomials if b.degree <= max_degree]
    for k in range(2, max_degree + 1):
        for element in semigroup.graded_piece(k):
            facts = all_factorizations(semigroup, element, k)
            if len(facts) <= 1:
                continue
            todo = [facts[0]]
            seen = {facts[0]}
            while todo:
                here = todo.pop()
                for there in _substitutions(here, usable):
                    if there not in seen:
                        seen.add(there)
                        todo.append(there)
            if len(seen) != len(facts):
                return False
    return True
