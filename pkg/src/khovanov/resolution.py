"""States of the resolution cube and the resolved trivalent graphs.

A state assigns 0 or 1 to each positive crossing and -1 or 0 to each
negative one.  Value 0 keeps the oriented smoothing; value +-1 replaces
the crossing by the double edge (two trivalent vertices joined by a
2-labelled edge, the incoming arcs meeting at one vertex and the
outgoing arcs at the other).  Circles are the components of the
1-labelled curve, indexed by their smallest arc.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagram import Crossing, LinkDiagram


@dataclass(frozen=True)
class State:
    """Map crossing id -> resolution value, stored in crossing-id order."""

    values: tuple[int, ...]

    def value(self, cid: int) -> int:
        return self.values[cid]

    @property
    def height(self) -> int:
        return sum(self.values)

    @property
    def double_count(self) -> int:
        return sum(abs(v) for v in self.values)

    def bump(self, cid: int) -> "State":
        v = list(self.values)
        v[cid] += 1
        return State(tuple(v))


def enumerate_states(d: LinkDiagram):
    """All 2^n states, lexicographic in crossing id (0 before 1, -1 before 0)."""
    n = len(d.crossings)
    lows = [0 if c.sign > 0 else -1 for c in d.crossings]
    out = []
    for mask in range(1 << n):
        vals = tuple(lows[i] + ((mask >> (n - 1 - i)) & 1) for i in range(n))
        out.append(State(vals))
    out.sort(key=lambda s: s.values)
    return out


def _smoothing_joins(c: Crossing, v: int):
    """End-joins for one crossing: ((arc, end), (arc, end)) pairs.

    End 0 is an arc's tail (where it leaves a crossing), end 1 its head.
    """
    a, b, cc, dd = c.ends
    doubled = v != 0
    if c.sign > 0:
        if not doubled:   # oriented: a->b, d->c
            return (((a, 1), (b, 0)), ((dd, 1), (cc, 0)))
        # membrane: heads a,d meet; tails b,c meet
        return (((a, 1), (dd, 1)), ((b, 0), (cc, 0)))
    if not doubled:       # oriented: a->d, b->c
        return (((a, 1), (dd, 0)), ((b, 1), (cc, 0)))
    return (((a, 1), (b, 1)), ((cc, 0), (dd, 0)))


@dataclass(frozen=True)
class ResolvedGraph:
    """Circles of a resolved diagram plus double-edge attachment data.

    ``circles[i]`` is the sorted arc tuple of the i-th circle; circles are
    ordered by smallest arc, crossingless loops last.  ``doubles`` maps a
    doubled crossing id to ``(in_circle, out_circle)``: the circles through
    the vertex where the incoming arcs meet and where the outgoing arcs
    meet.
    """

    circles: tuple[tuple, ...]
    arc_to_circle: dict
    doubles: dict

    @property
    def k(self) -> int:
        return len(self.circles)


def resolve(d: LinkDiagram, s: State) -> ResolvedGraph:
    parent = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    for a in d.arcs:
        parent[(a, 0)] = (a, 0)
        parent[(a, 1)] = (a, 1)
        union((a, 0), (a, 1))
    for c in d.crossings:
        for (e1, e2) in _smoothing_joins(c, s.value(c.id)):
            union(e1, e2)

    groups: dict = {}
    for a in sorted(d.arcs):
        groups.setdefault(find((a, 0)), set()).add(a)
    circles = sorted(tuple(sorted(g)) for g in groups.values())
    for i in range(d.free_loops):
        circles.append(("loop", i))
    circles = tuple(circles)
    arc_to_circle = {}
    for i, circ in enumerate(circles):
        for a in circ:
            if isinstance(a, int):
                arc_to_circle[a] = i

    doubles = {}
    for c in d.crossings:
        if s.value(c.id) != 0:
            a, b, cc, dd = c.ends
            if c.sign > 0:
                doubles[c.id] = (arc_to_circle[a], arc_to_circle[b])
            else:
                doubles[c.id] = (arc_to_circle[a], arc_to_circle[cc])
    return ResolvedGraph(circles=circles, arc_to_circle=arc_to_circle,
                         doubles=doubles)


def module_rank(g: ResolvedGraph) -> int:
    """Rank of the state module: 2 per circle."""
    return 1 << g.k


@dataclass(frozen=True)
class EdgeTransition:
    """One cube edge: the state changes by +1 at a single crossing.

    ``kind`` is "merge" (two circles become one) or "split".  The pair of
    circles on the two-circle side is recorded with its geometric roles:
    on the oriented-smoothing side the circles through the right and left
    local strands (right = the strand whose sheet is first at the
    membrane's trivalent vertices), on the double-edge side the circles
    through the in- and out-vertex.  ``correspondence`` matches untouched
    circle indices between source and target.
    """

    crossing: int
    sign: int
    from_state: State
    to_state: State
    kind: str
    src: ResolvedGraph
    tgt: ResolvedGraph
    oriented_pair: tuple[int, int]   # (right, left) circle ids, oriented side
    double_pair: tuple[int, int]     # (in, out) circle ids, double side
    oriented_on_source: bool         # which side of the map is the oriented one
    correspondence: dict


def cube_edge(d: LinkDiagram, s: State, cid: int) -> EdgeTransition:
    c = d.crossing(cid)
    hi = 1 if c.sign > 0 else 0
    if s.value(cid) >= hi:
        raise ValueError("state not incrementable at crossing %d" % cid)
    s2 = s.bump(cid)
    g1, g2 = resolve(d, s), resolve(d, s2)
    a, b, cc, dd = c.ends
    if c.sign > 0:
        g0, gd = g1, g2          # map runs oriented -> double
        oriented_on_source = True
    else:
        g0, gd = g2, g1          # map runs double -> oriented
        oriented_on_source = False
    if c.sign > 0:
        right, left = g0.arc_to_circle[a], g0.arc_to_circle[dd]
        din, dout = gd.arc_to_circle[a], gd.arc_to_circle[b]
    else:
        right, left = g0.arc_to_circle[b], g0.arc_to_circle[a]
        din, dout = gd.arc_to_circle[a], gd.arc_to_circle[cc]
    src, tgt = g1, g2
    if oriented_on_source:
        kind = "merge" if right != left else "split"
    else:
        kind = "merge" if din != dout else "split"
    if abs(g2.k - g1.k) != 1:
        raise ValueError(
            "saddle at crossing %d does not change the circle count by one "
            "(non-planar diagram?)" % cid)
    corr = _match_untouched(src, tgt, c.ends)
    return EdgeTransition(crossing=cid, sign=c.sign, from_state=s,
                          to_state=s2, kind=kind, src=src, tgt=tgt,
                          oriented_pair=(right, left),
                          double_pair=(din, dout),
                          oriented_on_source=oriented_on_source,
                          correspondence=corr)


def _match_untouched(src: ResolvedGraph, tgt: ResolvedGraph, local_arcs):
    local = set(local_arcs)
    by_arcs = {circ: j for j, circ in enumerate(tgt.circles)
               if not (set(circ) & local)}
    corr = {}
    for i, circ in enumerate(src.circles):
        if set(circ) & local:
            continue
        j = by_arcs.get(circ)
        if j is None:
            raise AssertionError("untouched circle lost in transition")
        corr[i] = j
    return corr


def dump_resolved(g: ResolvedGraph) -> str:
    lines = []
    for i, circ in enumerate(g.circles):
        lines.append("circle %d: %s" % (i, " ".join(str(a) for a in circ)))
    for cid in sorted(g.doubles):
        di, do = g.doubles[cid]
        lines.append("double edge at crossing %d: in-circle %d, out-circle %d"
                     % (cid, di, do))
    return "\n".join(lines)
