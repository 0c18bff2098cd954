"""Exact enumeration and structure of quiver polyhedra.

The polyhedron of a pair (Q, θ) is the set of non-negative real flows with
divergence θ at every vertex.  For acyclic Q it is a lattice polytope; an
oriented cycle makes it unbounded (its characteristic vector is a recession
direction), in which case only the bounded-flow variant enumerates points.

Everything here is exact: integer backtracking for lattice points, the
stable-forest characterization for vertices, and rational Gaussian
elimination for dimensions.  No floats.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    EmptyPolyhedron,
    EmptyWeight,
    InputError,
    SearchCapExceeded,
    UnboundedPolyhedron,
)
from .quiver import (
    Arrow,
    Quiver,
    check_weight,
    components,
    is_theta_stable,
    primitive_cycles,
    topological_order,
)

DEFAULT_MAX_NODES = 10_000_000


@dataclass(frozen=True)
class BoundedFlowSpec:
    """A flow polytope: l(a) <= x(a) <= u(a), divergence theta."""

    quiver: Quiver
    weight: dict
    lower: dict
    upper: dict

    def validate(self) -> None:
        check_weight(self.quiver, self.weight)
        for a in self.quiver.arrows:
            if a.id not in self.lower or a.id not in self.upper:
                raise InputError(f"bounds missing for arrow {a.id!r}")
            l, u = self.lower[a.id], self.upper[a.id]
            if not (isinstance(l, int) and isinstance(u, int)):
                raise InputError(f"bounds for arrow {a.id!r} must be integers")
            if l < 0 or u < l:
                raise InputError(f"need 0 <= l <= u on arrow {a.id!r}")


class _NodeBudget:
    def __init__(self, max_nodes: int):
        self.left = max_nodes
        self.max = max_nodes

    def spend(self, n: int = 1) -> None:
        self.left -= n
        if self.left < 0:
            raise SearchCapExceeded(
                f"backtracking exceeded {self.max} nodes", max_nodes=self.max
            )


def flow_tuple(flow: dict, arrow_ids: list[str]) -> tuple:
    return tuple(flow[a] for a in arrow_ids)


def _sorted_flows(flows: list[dict], quiver: Quiver) -> list[dict]:
    order = quiver.sorted_arrow_ids()
    return sorted(flows, key=lambda f: flow_tuple(f, order))


# -- lattice points ----------------------------------------------------------


def lattice_points(
    quiver: Quiver, weight: dict, k: int, max_nodes: int = DEFAULT_MAX_NODES
) -> list[dict]:
    """All non-negative integer flows with divergence k*theta, for acyclic
    quivers, sorted lexicographically in sorted-arrow-id coordinates.

    Backtracks arrow by arrow (grouped by tail in topological order) and
    keeps, for every vertex, the interval of divergence its unassigned
    arrows can still produce; an arrow value is tried only when both of
    its endpoints stay inside their intervals, so every search node is
    locally feasible and the last arrow at a vertex is forced outright.
    """
    if not isinstance(k, int) or k < 1:
        raise InputError("degree k must be a positive integer")
    check_weight(quiver, weight)
    order = topological_order(quiver)
    if order is None:
        raise UnboundedPolyhedron(
            "quiver has an oriented cycle; use bounded flows instead"
        )
    if sum(weight[v] for v in quiver.vertices) != 0:
        warnings.warn("weight does not sum to zero: polyhedron is empty", EmptyWeight)
        return []
    for v in quiver.vertices:
        if not quiver.out_arrows(v) and not quiver.in_arrows(v) and weight[v] != 0:
            return []

    # No single arrow can ever carry more than the total sink demand.
    cap = k * sum(max(weight[v], 0) for v in quiver.vertices)
    arrows = [
        a
        for v in order
        for a in sorted(quiver.out_arrows(v), key=lambda arrow: arrow.id)
    ]

    # need[v]: divergence the unassigned arrows at v must still produce;
    # [lo[v], hi[v]]: what they can produce (each arrow ranges over [0, cap]).
    need = {v: k * weight[v] for v in quiver.vertices}
    lo = {v: 0 for v in quiver.vertices}
    hi = {v: 0 for v in quiver.vertices}
    for a in arrows:
        lo[a.tail] -= cap
        hi[a.head] += cap

    budget = _NodeBudget(max_nodes)
    results: list[dict] = []
    flow: dict = {}

    def assign(i: int) -> None:
        if i == len(arrows):
            results.append(dict(flow))
            return
        a = arrows[i]
        t, h = a.tail, a.head
        lo[t] += cap
        hi[h] -= cap
        low = max(0, lo[t] - need[t], need[h] - hi[h])
        high = min(cap, hi[t] - need[t], need[h] - lo[h])
        for x in range(low, high + 1):
            budget.spend()
            flow[a.id] = x
            need[t] += x
            need[h] -= x
            assign(i + 1)
            need[t] -= x
            need[h] += x
        flow.pop(a.id, None)
        lo[t] -= cap
        hi[h] += cap

    assign(0)
    return _sorted_flows(results, quiver)


def bounded_lattice_points(
    spec: BoundedFlowSpec, max_nodes: int = DEFAULT_MAX_NODES
) -> list[dict]:
    """All integer flows of the flow polytope l <= x <= u with divergence
    theta.  Cycles are fine here; the box bounds everything."""
    spec.validate()
    quiver = spec.quiver
    theta = spec.weight
    if sum(theta[v] for v in quiver.vertices) != 0:
        return []
    arrows = sorted(quiver.arrows, key=lambda a: a.id)
    budget = _NodeBudget(max_nodes)

    # Interval of divergence still achievable at v by unassigned arrows.
    rem_lo = {v: 0 for v in quiver.vertices}
    rem_hi = {v: 0 for v in quiver.vertices}
    for a in arrows:
        l, u = spec.lower[a.id], spec.upper[a.id]
        rem_lo[a.head] += l
        rem_hi[a.head] += u
        rem_lo[a.tail] -= u
        rem_hi[a.tail] -= l

    div = {v: 0 for v in quiver.vertices}
    results: list[dict] = []
    flow: dict = {}

    def feasible(v: str) -> bool:
        need = theta[v] - div[v]
        return rem_lo[v] <= need <= rem_hi[v]

    def assign(i: int) -> None:
        if i == len(arrows):
            results.append(dict(flow))
            return
        a = arrows[i]
        l, u = spec.lower[a.id], spec.upper[a.id]
        rem_lo[a.head] -= l
        rem_hi[a.head] -= u
        rem_lo[a.tail] += u
        rem_hi[a.tail] += l
        for x in range(l, u + 1):
            budget.spend()
            flow[a.id] = x
            div[a.head] += x
            div[a.tail] -= x
            if feasible(a.head) and feasible(a.tail):
                assign(i + 1)
            div[a.head] -= x
            div[a.tail] += x
        del flow[a.id]
        rem_lo[a.head] += l
        rem_hi[a.head] += u
        rem_lo[a.tail] -= u
        rem_hi[a.tail] -= l

    assign(0)
    return _sorted_flows(results, quiver)


# -- flow polytope -> quiver polytope gadget ---------------------------------


def _fresh(base: str, used: set) -> str:
    name = base
    while name in used:
        name += "'"
    used.add(name)
    return name


def to_quiver_polytope(spec: BoundedFlowSpec) -> tuple[Quiver, dict]:
    """Convert a flow polytope into a plain quiver polytope.

    First the lower bounds are shifted away (x -> x - l), then every arrow a
    is replaced by a three-arrow gadget through two new vertices v_a, w_a:

        tail(a) --a:1--> v_a <--a:2-- w_a --a:3--> head(a)

    with new weights u'(a) on v_a and -u'(a) on w_a, where u' = u - l.  The
    result is acyclic (old vertices only emit gadget arrows and absorb
    gadget arrows; every directed path has length <= 2) and its degree-1
    lattice points biject with the bounded flows via
    y(a:1) = y(a:3) = x(a) - l(a),  y(a:2) = u'(a) - (x(a) - l(a)).
    """
    spec.validate()
    quiver = spec.quiver
    shifted = dict(spec.weight)
    for a in quiver.arrows:
        l = spec.lower[a.id]
        shifted[a.head] -= l
        shifted[a.tail] += l

    used_v = set(quiver.vertices)
    used_a = {a.id for a in quiver.arrows}
    new_vertices = list(quiver.vertices)
    new_arrows = []
    new_weight = dict(shifted)
    for a in sorted(quiver.arrows, key=lambda a: a.id):
        uprime = spec.upper[a.id] - spec.lower[a.id]
        va = _fresh(f"v_{a.id}", used_v)
        wa = _fresh(f"w_{a.id}", used_v)
        new_vertices.extend([va, wa])
        new_weight[va] = uprime
        new_weight[wa] = -uprime
        new_arrows.append(Arrow(_fresh(f"{a.id}:1", used_a), a.tail, va))
        new_arrows.append(Arrow(_fresh(f"{a.id}:2", used_a), wa, va))
        new_arrows.append(Arrow(_fresh(f"{a.id}:3", used_a), wa, a.head))
    return Quiver(new_vertices, new_arrows), new_weight


def gadget_flow(spec: BoundedFlowSpec, flow: dict) -> dict:
    """Image of a bounded flow under the to_quiver_polytope bijection."""
    out = {}
    for a in spec.quiver.arrows:
        shifted = flow[a.id] - spec.lower[a.id]
        uprime = spec.upper[a.id] - spec.lower[a.id]
        out[f"{a.id}:1"] = shifted
        out[f"{a.id}:2"] = uprime - shifted
        out[f"{a.id}:3"] = shifted
    return out


# -- vertices ----------------------------------------------------------------


def _tree_flow(vertices: frozenset, arrows: list[Arrow], theta: dict) -> dict | None:
    """Unique flow with divergence theta supported on a tree; None when any
    entry fails to be a strictly positive integer."""
    residual = {v: theta[v] for v in vertices}
    degree = {v: 0 for v in vertices}
    incident: dict = {v: [] for v in vertices}
    for a in arrows:
        degree[a.tail] += 1
        degree[a.head] += 1
        incident[a.tail].append(a)
        incident[a.head].append(a)
    leaves = [v for v in vertices if degree[v] == 1]
    done: set = set()
    flow: dict = {}
    while leaves:
        v = leaves.pop()
        arrow = None
        for a in incident[v]:
            if a.id not in done:
                arrow = a
                break
        if arrow is None:
            continue
        x = residual[v] if arrow.head == v else -residual[v]
        if x <= 0:
            return None
        flow[arrow.id] = x
        done.add(arrow.id)
        residual[arrow.head] -= x
        residual[arrow.tail] += x
        other = arrow.tail if arrow.head == v else arrow.head
        degree[other] -= 1
        degree[v] -= 1
        if degree[other] == 1:
            leaves.append(other)
    if any(residual[v] != 0 for v in vertices):
        return None
    return flow


def vertices(
    quiver: Quiver, weight: dict, max_nodes: int = DEFAULT_MAX_NODES
) -> list[dict]:
    """All vertices of the quiver polyhedron, via the combinatorial
    characterization: m is a vertex exactly when the connected components of
    its support are stable subtrees (isolated vertices allowed where the
    weight vanishes).

    Enumerates forests of the underlying graph by include/exclude
    backtracking with union-find cycle pruning; on each forest solves the
    unique tree flows and keeps those that are strictly positive with every
    component stable.
    """
    check_weight(quiver, weight)
    if sum(weight[v] for v in quiver.vertices) != 0:
        return []
    zero = {a.id: 0 for a in quiver.arrows}
    if all(weight[v] == 0 for v in quiver.vertices):
        # the origin is the only candidate: any component with an arrow has
        # a successor-closed subset of weight 0
        return [zero]

    arrows = sorted(quiver.arrows, key=lambda a: a.id)
    arrows = [a for a in arrows if not a.is_loop()]  # loops never in forests
    budget = _NodeBudget(max_nodes)
    results: list[dict] = []

    parent = {v: v for v in quiver.vertices}

    def find(v: str) -> str:
        while parent[v] != v:
            v = parent[v]
        return v

    chosen: list[Arrow] = []

    def leaf() -> None:
        groups: dict = {}
        for v in quiver.vertices:
            groups.setdefault(find(v), []).append(v)
        comp_arrows: dict = {r: [] for r in groups}
        for a in chosen:
            comp_arrows[find(a.tail)].append(a)
        flow = dict(zero)
        for root, verts in groups.items():
            vset = frozenset(verts)
            sub = Quiver(sorted(vset), comp_arrows[root])
            tflow = _tree_flow(vset, comp_arrows[root], weight)
            if tflow is None:
                return
            if not is_theta_stable(sub, {v: weight[v] for v in vset}):
                return
            flow.update(tflow)
        results.append(flow)

    def rec(i: int) -> None:
        budget.spend()
        if i == len(arrows):
            leaf()
            return
        a = arrows[i]
        # exclude
        rec(i + 1)
        # include if no undirected cycle forms
        ra, rb = find(a.tail), find(a.head)
        if ra != rb:
            parent[ra] = rb
            chosen.append(a)
            rec(i + 1)
            chosen.pop()
            parent[ra] = ra

    rec(0)
    return _sorted_flows(results, quiver)


# -- dimension and facets ----------------------------------------------------


def _rank(rows: list[list[int]]) -> int:
    """Rank over the rationals, by exact Gaussian elimination."""
    mat = [[Fraction(x) for x in row] for row in rows if any(row)]
    if not mat:
        return 0
    ncols = len(mat[0])
    rank = 0
    col = 0
    while rank < len(mat) and col < ncols:
        pivot = None
        for r in range(rank, len(mat)):
            if mat[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            col += 1
            continue
        mat[rank], mat[pivot] = mat[pivot], mat[rank]
        pv = mat[rank][col]
        for r in range(rank + 1, len(mat)):
            if mat[r][col] != 0:
                factor = mat[r][col] / pv
                mat[r] = [x - factor * y for x, y in zip(mat[r], mat[rank])]
        rank += 1
        col += 1
    return rank


def recession_hilbert_basis(quiver: Quiver) -> list[dict]:
    """Characteristic vectors of all primitive cycles: the Hilbert basis of
    the recession cone."""
    return [c.epsilon(quiver) for c in primitive_cycles(quiver)]


def _affine_rank_data(
    quiver: Quiver, verts: list[dict], rays: list[dict]
) -> int:
    order = quiver.sorted_arrow_ids()
    rows = []
    if verts:
        base = flow_tuple(verts[0], order)
        for m in verts[1:]:
            rows.append([x - b for x, b in zip(flow_tuple(m, order), base)])
    for r in rays:
        rows.append(list(flow_tuple(r, order)))
    return _rank(rows)


def dimension(quiver: Quiver, weight: dict) -> int:
    """Dimension of the affine span of the polyhedron (vertex differences
    plus recession generators)."""
    verts = vertices(quiver, weight)
    if not verts:
        raise EmptyPolyhedron("quiver polyhedron has no points")
    return _affine_rank_data(quiver, verts, recession_hilbert_basis(quiver))


def facet_arrows(quiver: Quiver, weight: dict) -> list[list[str]]:
    """Arrows whose vanishing locus is a facet, grouped by the facet they
    cut (two arrows land in one group when their faces coincide).  Groups
    are sorted by their smallest arrow id."""
    verts = vertices(quiver, weight)
    if not verts:
        raise EmptyPolyhedron("quiver polyhedron has no points")
    cycles = primitive_cycles(quiver)
    rays = [c.epsilon(quiver) for c in cycles]
    dim = _affine_rank_data(quiver, verts, rays)

    groups: dict = {}
    for a in sorted(quiver.arrows, key=lambda a: a.id):
        face_verts = [i for i, m in enumerate(verts) if m[a.id] == 0]
        if not face_verts:
            continue  # the face is empty: every point uses a
        face_rays = [i for i, c in enumerate(cycles) if a.id not in c.arrow_ids]
        fdim = _affine_rank_data(
            quiver, [verts[i] for i in face_verts], [rays[i] for i in face_rays]
        )
        if fdim == dim - 1:
            key = (tuple(face_verts), tuple(face_rays))
            groups.setdefault(key, []).append(a.id)
    return sorted(groups.values(), key=lambda g: g[0])


# -- normality ---------------------------------------------------------------


def check_normality(
    quiver: Quiver, weight: dict, k: int, max_nodes: int = DEFAULT_MAX_NODES
) -> tuple[bool, dict]:
    """Is every lattice point of the k-th dilate a sum of k degree-1
    points?  Returns (verdict, witness): on success the witness maps each
    degree-k point to one decomposition; on failure it holds the
    counterexample."""
    if not isinstance(k, int) or k < 2:
        raise InputError("normality degree k must be an integer >= 2")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", EmptyWeight)
        ones = lattice_points(quiver, weight, 1, max_nodes)
        top = lattice_points(quiver, weight, k, max_nodes)
    order = quiver.sorted_arrow_ids()
    ones_sorted = sorted(ones, key=lambda f: flow_tuple(f, order))

    def decompose(target: dict) -> list[dict] | None:
        budget = _NodeBudget(max_nodes)

        def rec(remaining: tuple, depth: int, start: int) -> list[int] | None:
            budget.spend()
            if depth == k:
                return [] if all(x == 0 for x in remaining) else None
            for i in range(start, len(ones_sorted)):
                cand = flow_tuple(ones_sorted[i], order)
                if all(c <= r for c, r in zip(cand, remaining)):
                    nxt = tuple(r - c for r, c in zip(remaining, cand))
                    sub = rec(nxt, depth + 1, i)
                    if sub is not None:
                        return [i] + sub
            return None

        picks = rec(flow_tuple(target, order), 0, 0)
        if picks is None:
            return None
        return [ones_sorted[i] for i in picks]

    witness: dict = {}
    for s in top:
        dec = decompose(s)
        if dec is None:
            return False, {"counterexample": s}
        witness[str(flow_tuple(s, order))] = dec
    return True, witness
