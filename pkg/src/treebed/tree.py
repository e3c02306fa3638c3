"""Lazy infinite color trees over the cube patterns.

Vertices are cube identities; the parent of a vertex is the unique cube at
the nearest lower level whose box contains it, and every edge joins a vertex
to its parent with unit length. Nothing is materialized: parents are
computed on demand, and a windowed brute-force edge enumeration doubles as
the oracle for the lazy traversals.

The edge relation fixes the reading of "nearest": the parent sits at the
maximal level k' < k whose pattern contains the cube. Only this reading
makes the trees connected (chains of strictly decreasing levels exist below
every vertex because the expansion's fixed point is interior to a cube of
every color).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Sequence

from .core import Params, RationalBox
from .cubes import ColorMismatch, CubeId, ResourceLimit, _check_id, realize


class ScanExhausted(RuntimeError):
    """Parent scan hit its level cap before finding a containing cube."""

    def __init__(self, cid: CubeId, k_reached: int, context: str | None = None):
        msg = (
            f"no containing cube for {cid} down to level {k_reached}; "
            "raise scan_cap"
        )
        if context:
            msg += f" ({context})"
        super().__init__(msg)
        self.cid = cid
        self.k_reached = k_reached
        self.context = context


def _containing_gamma_at(P: Params, cid: CubeId, j: int) -> tuple[int, ...] | None:
    """Lattice point of the level-j cube containing cid's box, or None.

    Works per axis in scaled integers (exact, no Fraction overhead). With
    m = k - j >= 1, D = p*(p-1)*(n+1) and S = gamma_i*D + c*p*(p-1), the
    candidate is the floor of the cube center mapped through H^j, and the
    two containment inequalities are checked after clearing denominators by
    D * p^m. Only one candidate per axis can work: a containing interval
    must contain the center coordinate, and same-level intervals are
    disjoint.
    """
    p, n = P.p, P.n
    q = p - 1
    n1 = n + 1
    D = p * q * n1
    pn1 = p * n1
    qn1 = q * n1
    cpq = cid.c * p * q
    m = cid.k - j
    pm = p**m
    B = 2 * D * pm
    shift = pm * (2 * pn1 - 2 * cpq)
    lo_rhs_tail = qn1 - pn1 + pm * pn1
    hi_lhs_tail = -qn1 - pn1 + pm * pn1
    out = []
    for g in cid.gamma:
        S = g * D + cpq
        gp = (2 * S + D - 2 * pn1 + shift) // B
        base = gp * D + cpq
        if pm * (base + qn1) > S + lo_rhs_tail:
            return None
        if pm * (base + D - qn1) < S + D + hi_lhs_tail:
            return None
        out.append(gp)
    return tuple(out)


def parent(P: Params, cid: CubeId, scan_cap: int = 64) -> CubeId:
    """Unique vertex of maximal level k' < k whose cube contains cid's cube.

    Scans levels k-1, k-2, ... with O(1) exact work per level. A containing
    cube always exists at some finite depth; scan_cap only guards the loop.
    """
    _check_id(P, cid)
    if scan_cap < 1:
        raise ValueError("scan_cap must be positive")
    for j in range(cid.k - 1, cid.k - 1 - scan_cap, -1):
        g = _containing_gamma_at(P, cid, j)
        if g is not None:
            return CubeId(cid.c, j, g)
    raise ScanExhausted(cid, cid.k - scan_cap)


def ancestor_chain(
    P: Params, cid: CubeId, floor_level: int, scan_cap: int = 64
) -> list[CubeId]:
    """Chain cid, parent(cid), ... down to the first level <= floor_level."""
    chain = [cid]
    while chain[-1].k > floor_level:
        chain.append(parent(P, chain[-1], scan_cap))
    return chain


def tree_distance(P: Params, u: CubeId, v: CubeId, scan_cap: int = 64) -> int:
    """Hop count of the unique path between u and v in their color tree.

    Walks both ancestor chains toward lower levels, always advancing the
    endpoint at the higher level, until they meet. Neither pointer can pass
    the meet: it lies on both chains and the walk only advances strictly
    above it.
    """
    if u.c != v.c:
        raise ColorMismatch(f"colors {u.c} vs {v.c}")
    du = dv = 0
    while u != v:
        if u.k > v.k:
            u = parent(P, u, scan_cap)
            du += 1
        elif v.k > u.k:
            v = parent(P, v, scan_cap)
            dv += 1
        else:
            u = parent(P, u, scan_cap)
            du += 1
    return du + dv


def tree_path(P: Params, u: CubeId, v: CubeId, scan_cap: int = 64) -> list[CubeId]:
    """Vertex sequence of the unique u-v path (u and v included)."""
    if u.c != v.c:
        raise ColorMismatch(f"colors {u.c} vs {v.c}")
    left = [u]
    right = [v]
    while left[-1] != right[-1]:
        if left[-1].k > right[-1].k:
            left.append(parent(P, left[-1], scan_cap))
        elif right[-1].k > left[-1].k:
            right.append(parent(P, right[-1], scan_cap))
        else:
            left.append(parent(P, left[-1], scan_cap))
    return left + right[-2::-1]


@dataclass(frozen=True)
class EdgeSet:
    """Brute-force edge enumeration over a finite window of one color tree."""

    color: int
    k_min: int
    k_max: int
    gamma_bound: int
    vertices: tuple[CubeId, ...]
    edges: frozenset[tuple[CubeId, CubeId]]


def _axis_slab(P: Params, c: int, k: int, g: int) -> tuple[Fraction, Fraction]:
    scale = Fraction(1, P.p) ** k
    base = g + Fraction(c, P.n + 1) - Fraction(1, P.p - 1)
    e = Fraction(1, P.p - 1)
    return (scale * (base + P.lam) + e, scale * (base + 1 - P.lam) + e)


def _level_contains_box(
    P: Params, c: int, j: int, box: RationalBox, gamma_range: range
) -> bool:
    """Does any level-j cube with per-axis gamma in range contain box?

    Pure enumeration per axis (the pattern is an axis product), used by the
    oracle instead of the candidate arithmetic of the lazy parent.
    """
    for lo, hi in zip(box.lo, box.hi):
        if not any(
            slo <= lo and hi <= shi
            for slo, shi in (_axis_slab(P, c, j, g) for g in gamma_range)
        ):
            return False
    return True


def brute_force_edges(
    P: Params,
    c: int,
    k_min: int,
    k_max: int,
    gamma_bound: int,
    vertex_budget: int = 200_000,
) -> EdgeSet:
    """Direct transcription of the edge definition over a finite window.

    Vertices are all cubes of color c with level in [k_min, k_max] and
    |gamma_i| <= gamma_bound. A pair (v at k, v' at k' < k) is an edge iff
    v' contains v and no level strictly between them contains v; the
    intermediate scan enumerates lattice points two beyond the window bound,
    which is exhaustive because a containing cube must contain v's center.
    Test oracle only; quadratic in the window size.
    """
    if k_min > k_max:
        return EdgeSet(c, k_min, k_max, gamma_bound, (), frozenset())
    levels = list(range(k_min, k_max + 1))
    per_level = (2 * gamma_bound + 1) ** P.n
    if per_level * len(levels) > vertex_budget:
        raise ResourceLimit(
            f"window holds {per_level * len(levels)} vertices; "
            f"budget is {vertex_budget}"
        )
    axis = range(-gamma_bound, gamma_bound + 1)
    verts = [
        CubeId(c, k, g) for k in levels for g in product(axis, repeat=P.n)
    ]
    boxes = {v: realize(P, v) for v in verts}
    by_level = {k: [v for v in verts if v.k == k] for k in levels}
    scan = range(-gamma_bound - 2, gamma_bound + 3)
    edges = set()
    for k in levels:
        for kp in levels:
            if kp >= k:
                continue
            for v in by_level[k]:
                bv = boxes[v]
                for vp in by_level[kp]:
                    if not boxes[vp].contains_box(bv):
                        continue
                    if any(
                        _level_contains_box(P, c, j, bv, scan)
                        for j in range(kp + 1, k)
                    ):
                        continue
                    edges.add((vp, v))
    return EdgeSet(c, k_min, k_max, gamma_bound, tuple(verts), frozenset(edges))


def _steiner_span(
    P: Params, ids: Sequence[CubeId], scan_cap: int
) -> tuple[list[CubeId], list[tuple[CubeId, CubeId]]]:
    vertices: set[CubeId] = set(ids)
    for u, v in combinations(ids, 2):
        vertices.update(tree_path(P, u, v, scan_cap))
    ordered = sorted(vertices, key=lambda v: (v.k, v.gamma, v.c))
    edges = []
    members = set(ordered)
    for v in ordered:
        pv = parent(P, v, scan_cap)
        if pv in members:
            edges.append((pv, v))
    return ordered, edges


def export_subtree(
    P: Params,
    ids: Iterable[CubeId],
    fmt: str = "dot",
    scan_cap: int = 64,
) -> str:
    """Serialize the subtree spanned by ids (union of their pairwise paths).

    DOT nodes are named "c_k_g1[_g2...]" and carry the realized corners as
    decimal-string attributes; JSON keeps the corners as exact fraction
    strings. Edges all have unit weight.
    """
    id_list = list(ids)
    if not id_list:
        raise ValueError("no cube ids given")
    color = id_list[0].c
    for cid in id_list:
        _check_id(P, cid)
        if cid.c != color:
            raise ColorMismatch(f"colors {color} vs {cid.c}")
    nodes, edges = _steiner_span(P, id_list, scan_cap)
    boxes = {v: realize(P, v) for v in nodes}
    if fmt.lower() == "json":
        index = {v: i for i, v in enumerate(nodes)}
        doc = {
            "nodes": [
                {
                    "c": v.c,
                    "k": v.k,
                    "gamma": list(v.gamma),
                    "lo": [str(c) for c in boxes[v].lo],
                    "hi": [str(c) for c in boxes[v].hi],
                }
                for v in nodes
            ],
            "edges": [[index[a], index[b]] for a, b in edges],
        }
        return json.dumps(doc, indent=2, sort_keys=True)
    if fmt.lower() != "dot":
        raise ValueError(f"unknown format {fmt!r}; expected 'dot' or 'json'")

    def name(v: CubeId) -> str:
        return "_".join([str(v.c), str(v.k)] + [str(g) for g in v.gamma])

    def dec(vals: tuple[Fraction, ...]) -> str:
        return ",".join(repr(float(c)) for c in vals)

    lines = [f"graph T{color} {{"]
    for v in nodes:
        b = boxes[v]
        lines.append(f'  "{name(v)}" [lo="{dec(b.lo)}", hi="{dec(b.hi)}"];')
    for a, b in edges:
        lines.append(f'  "{name(a)}" -- "{name(b)}" [weight=1];')
    lines.append("}")
    return "\n".join(lines) + "\n"
