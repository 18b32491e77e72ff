"""Oriented link diagrams given as planar-diagram (PD) codes.

A diagram is a whitespace-separated list of tokens, one diagram per line:

    X[a,b,c,d]   a crossing; the four incident arc labels are listed
                 counterclockwise starting at the incoming under-strand
    O            a crossingless circle (PD codes cannot express these)

Orientations are propagated from the under-strand data (position 0 is
always incoming, position 2 outgoing); each crossing then gets a sign,
+1 when the over-strand runs from position 3 to position 1 (right-handed).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property


class PDError(ValueError):
    """Base class for diagram errors."""


class PDSyntaxError(PDError):
    """Malformed PD text."""


class PDValidationError(PDError):
    """Structurally invalid diagram (arc counts, orientation, ...)."""


_TOKEN = re.compile(r"X\[\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\]|O")


@dataclass(frozen=True)
class Crossing:
    """One transverse double point.

    ``ends`` lists the four incident arcs counterclockwise from the
    incoming under-strand.  ``sign`` is +1 when the over-strand enters at
    position 3 (right-handed crossing), -1 when it enters at position 1.
    """

    id: int
    ends: tuple[int, int, int, int]
    sign: int

    @property
    def under_in(self) -> int:
        return self.ends[0]

    @property
    def under_out(self) -> int:
        return self.ends[2]

    @property
    def over_in(self) -> int:
        return self.ends[3] if self.sign > 0 else self.ends[1]

    @property
    def over_out(self) -> int:
        return self.ends[1] if self.sign > 0 else self.ends[3]


@dataclass(frozen=True)
class LinkDiagram:
    """An oriented link diagram: crossings plus crossingless circles."""

    crossings: tuple[Crossing, ...]
    free_loops: int = 0

    @cached_property
    def arcs(self) -> frozenset[int]:
        return frozenset(a for c in self.crossings for a in c.ends)

    @cached_property
    def writhe(self) -> int:
        return sum(c.sign for c in self.crossings)

    @cached_property
    def components(self) -> tuple[tuple[int, ...], ...]:
        """Orbits of arc succession, one per link component (sorted)."""
        nxt = {}
        for c in self.crossings:
            nxt[c.under_in] = c.under_out
            nxt[c.over_in] = c.over_out
        seen = set()
        orbits = []
        for a in sorted(nxt):
            if a in seen:
                continue
            orbit = []
            b = a
            while b not in seen:
                seen.add(b)
                orbit.append(b)
                b = nxt[b]
            orbits.append(tuple(orbit))
        return tuple(sorted(orbits))

    @property
    def num_components(self) -> int:
        return len(self.components) + self.free_loops

    @cached_property
    def component_of_arc(self) -> dict[int, int]:
        out = {}
        for i, orbit in enumerate(self.components):
            for a in orbit:
                out[a] = i
        return out

    def crossing(self, cid: int) -> Crossing:
        for c in self.crossings:
            if c.id == cid:
                return c
        raise KeyError(cid)

    def serialize(self) -> str:
        toks = ["X[%d,%d,%d,%d]" % c.ends for c in self.crossings]
        toks += ["O"] * self.free_loops
        return " ".join(toks)

    def to_dict(self, name: str | None = None) -> dict:
        d = {"crossings": [list(c.ends) for c in self.crossings],
             "loops": self.free_loops}
        if name is not None:
            d["name"] = name
        return d

    def mirror(self) -> "LinkDiagram":
        """Switch every crossing (over <-> under); all signs flip."""
        out = []
        for c in self.crossings:
            a, b, cc, d = c.ends
            ends = (d, a, b, cc) if c.sign > 0 else (b, cc, d, a)
            out.append(ends)
        return from_ends(out, self.free_loops)

    def disjoint_union(self, other: "LinkDiagram") -> "LinkDiagram":
        off = max(self.arcs, default=0)
        shifted = [tuple(a + off for a in c.ends) for c in other.crossings]
        return from_ends([c.ends for c in self.crossings] + shifted,
                         self.free_loops + other.free_loops)

    def canonical(self) -> str:
        """A label-independent encoding, for isomorphism tests.

        Arcs are renumbered along each component from every possible
        starting arc and component order; the lexicographically smallest
        serialization wins.  Exponential only in the component count.
        """
        return _canonical_encoding(self)


def parse_pd(text: str) -> LinkDiagram:
    """Parse one diagram from PD text.  Empty input gives the empty diagram."""
    ends = []
    loops = 0
    pos = 0
    for tok in text.split():
        m = _TOKEN.fullmatch(tok)
        if m is None:
            raise PDSyntaxError("bad PD token %r" % tok)
        if tok == "O":
            loops += 1
        else:
            ends.append(tuple(int(g) for g in m.groups()))
        pos += 1
    return from_ends(ends, loops)


def from_ends(ends: list[tuple[int, int, int, int]], free_loops: int = 0) -> LinkDiagram:
    """Build and validate a diagram from raw crossing end-tuples."""
    occ: dict[int, list[tuple[int, int]]] = {}
    for ci, e in enumerate(ends):
        for pos, a in enumerate(e):
            occ.setdefault(a, []).append((ci, pos))
    for a, lst in sorted(occ.items()):
        if len(lst) != 2:
            raise PDValidationError(
                "arc %d appears %d times (must be exactly 2)" % (a, len(lst)))
    over_in_at_3 = _propagate_orientations(ends, occ)
    crossings = tuple(
        Crossing(id=ci, ends=e, sign=+1 if over_in_at_3[ci] else -1)
        for ci, e in enumerate(ends))
    d = LinkDiagram(crossings=crossings, free_loops=free_loops)
    d.components  # force the succession check
    return d


def _role(pos, over_in_at_3):
    # 'i' = arc flows into the crossing at this slot, 'o' = out.
    if pos == 0:
        return "i"
    if pos == 2:
        return "o"
    if over_in_at_3 is None:
        return None
    if pos == 3:
        return "i" if over_in_at_3 else "o"
    return "o" if over_in_at_3 else "i"


def _propagate_orientations(ends, occ):
    """Decide each crossing's over-strand direction.

    Every arc must be outgoing at one of its two slots and incoming at
    the other; under-strand slots are fixed, over-strand slots depend on
    one boolean per crossing.  Propagate until stable; components whose
    direction stays free (fully-over components) are oriented so that
    their smallest arc exits at its lexicographically first slot.
    """
    n = len(ends)
    b: list[bool | None] = [None] * n

    def feasible(arc):
        (c1, p1), (c2, p2) = occ[arc]
        r1, r2 = _role(p1, b[c1]), _role(p2, b[c2])
        if r1 is not None and r2 is not None:
            if r1 == r2:
                raise PDValidationError(
                    "inconsistent orientation at arc %d" % arc)
            return []
        if r1 is None and r2 is None:
            return []
        # exactly one side known: fix the unknown crossing
        if r1 is None:
            c_unk, p_unk, need = c1, p1, ("o" if r2 == "i" else "i")
        else:
            c_unk, p_unk, need = c2, p2, ("o" if r1 == "i" else "i")
        val = (need == "i") if p_unk == 3 else (need == "o")
        if b[c_unk] is None:
            b[c_unk] = val
            return [c_unk]
        if b[c_unk] != val:
            raise PDValidationError("inconsistent orientation at arc %d" % arc)
        return []

    def sweep():
        changed = True
        while changed:
            changed = False
            for arc in sorted(occ):
                if feasible(arc):
                    changed = True

    sweep()
    while any(v is None for v in b):
        # pick the smallest still-free arc whose slots are all over-slots
        free_arcs = [a for a in sorted(occ)
                     if any(b[c] is None for c, _ in occ[a])]
        a = free_arcs[0]
        (c1, p1), (c2, p2) = sorted(occ[a])
        # orient arc a to exit at its first slot
        c_unk, p_unk = (c1, p1) if b[c1] is None else (c2, p2)
        need = "o" if (c_unk, p_unk) == (c1, p1) else "i"
        b[c_unk] = (need == "i") if p_unk == 3 else (need == "o")
        sweep()
    # final consistency pass
    for arc in sorted(occ):
        (c1, p1), (c2, p2) = occ[arc]
        if _role(p1, b[c1]) == _role(p2, b[c2]):
            raise PDValidationError("inconsistent orientation at arc %d" % arc)
    return b


def diagram_from_dict(d: dict) -> LinkDiagram:
    ends = [tuple(int(x) for x in e) for e in d.get("crossings", [])]
    for e in ends:
        if len(e) != 4:
            raise PDSyntaxError("crossing entry %r must have 4 arcs" % (e,))
    return from_ends(ends, int(d.get("loops", 0)))


def _canonical_encoding(d: LinkDiagram) -> str:
    if not d.crossings:
        return "O " * d.free_loops if d.free_loops else ""
    comps = d.components
    nxt = {}
    for c in d.crossings:
        nxt[c.under_in] = c.under_out
        nxt[c.over_in] = c.over_out

    def encode(start_arcs):
        # renumber arcs by traversal order from the chosen starts
        relab = {}
        k = 1
        for s in start_arcs:
            a = s
            while a not in relab:
                relab[a] = k
                k += 1
                a = nxt[a]
        rows = sorted(tuple(relab[x] for x in c.ends) for c in d.crossings)
        return tuple(rows)

    import itertools
    best = None
    choices = [list(comp) for comp in comps]
    for order in itertools.permutations(range(len(comps))):
        for starts in itertools.product(*[choices[i] for i in order]):
            enc = encode(starts)
            if best is None or enc < best:
                best = enc
    return " ".join("X[%d,%d,%d,%d]" % r for r in best) + " O" * d.free_loops


def isomorphic(d1: LinkDiagram, d2: LinkDiagram) -> bool:
    """True when the diagrams agree up to arc/crossing relabeling."""
    return (d1.free_loops == d2.free_loops
            and len(d1.crossings) == len(d2.crossings)
            and d1.canonical() == d2.canonical())


def faces(d: LinkDiagram):
    """Face orbits of the rotation system, as tuples of darts.

    A dart is (crossing id, position); the next dart of a face is the
    counterclockwise successor of the current dart's partner (the other
    end-slot of the same arc).
    """
    occ = {}
    for c in d.crossings:
        for pos, a in enumerate(c.ends):
            occ.setdefault(a, []).append((c.id, pos))
    partner = {}
    for a, lst in occ.items():
        (s1, s2) = lst
        partner[s1] = s2
        partner[s2] = s1
    darts = sorted(partner)
    out = []
    seen = set()
    for start in darts:
        if start in seen:
            continue
        face = []
        dart = start
        while dart not in seen:
            seen.add(dart)
            face.append(dart)
            c, p = partner[dart]
            dart = (c, (p + 1) % 4)
        out.append(tuple(face))
    return tuple(out)


def arc_of_dart(d: LinkDiagram, dart):
    cid, pos = dart
    return d.crossing(cid).ends[pos]


def is_planar(d: LinkDiagram) -> bool:
    """Euler-characteristic test of the rotation system, per component."""
    if not d.crossings:
        return True
    comp = {c.id: c.id for c in d.crossings}

    def find(x):
        while comp[x] != x:
            comp[x] = comp[comp[x]]
            x = comp[x]
        return x

    occ = {}
    for c in d.crossings:
        for a in c.ends:
            occ.setdefault(a, []).append(c.id)
    for a, (c1, c2) in occ.items():
        r1, r2 = find(c1), find(c2)
        if r1 != r2:
            comp[r1] = r2
    groups = {}
    for c in d.crossings:
        groups.setdefault(find(c.id), []).append(c.id)
    face_count = {}
    for f in faces(d):
        face_count[find(f[0][0])] = face_count.get(find(f[0][0]), 0) + 1
    for root, ids in groups.items():
        v = len(ids)
        arcs = {a for cid in ids for a in d.crossing(cid).ends}
        e = len(arcs)
        if v - e + face_count.get(root, 0) != 2:
            return False
    return True


def switch_crossing(d: LinkDiagram, cid: int) -> LinkDiagram:
    """Exchange over- and under-strand at one crossing (sign flips)."""
    out = []
    for c in d.crossings:
        if c.id != cid:
            out.append(c.ends)
            continue
        a, b, cc, dd = c.ends
        out.append((dd, a, b, cc) if c.sign > 0 else (b, cc, dd, a))
    return from_ends(out, d.free_loops)


def smooth_crossing(d: LinkDiagram, cid: int) -> LinkDiagram:
    """Remove one crossing by its oriented smoothing, splicing the arcs."""
    c = d.crossing(cid)
    a, b, cc, dd = c.ends
    pairs = [(a, b), (dd, cc)] if c.sign > 0 else [(a, dd), (b, cc)]

    parent = {x: x for x in d.arcs}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for x, y in pairs:
        parent[find(x)] = find(y)

    rest = [tuple(find(x) for x in cr.ends)
            for cr in d.crossings if cr.id != cid]
    used = {x for e in rest for x in e}
    touched = {find(x) for p in pairs for x in p}
    new_loops = d.free_loops + sum(1 for g in touched if g not in used)
    return from_ends(rest, new_loops)


def skein_triple(d: LinkDiagram, cid: int):
    """(D+, D-, D0): the diagrams agreeing with d away from crossing cid."""
    c = d.crossing(cid)
    dplus = d if c.sign > 0 else switch_crossing(d, cid)
    dminus = switch_crossing(d, cid) if c.sign > 0 else d
    return dplus, dminus, smooth_crossing(dplus, cid)
