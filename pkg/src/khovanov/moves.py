"""Reidemeister moves on PD diagrams, for the invariance harness.

Locations are validated against the rotation system: kinks may be added
on any arc (or crossingless loop), R2 slides need two arcs cobounding a
face, R3 needs a triangular face whose strands are not cyclically
interleaved (one passes over both others).  Applying a move and then its
inverse returns an isomorphic diagram.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .diagram import (LinkDiagram, PDValidationError, faces, from_ends,
                      is_planar, parse_pd, smooth_crossing)


@dataclass(frozen=True)
class MoveSpec:
    """kind: R1+/R1-/R2/R3; direction: apply/undo; location per kind.

    R1 apply: (arc, chirality) with chirality "uo" (strand passes under
    first) or "ou"; arc None targets a crossingless loop.  R1 undo:
    crossing id.  R2 apply: (over_arc, under_arc).  R2 undo: (crossing,
    crossing).  R3: sorted triple of crossing ids around the triangle.
    """

    kind: str
    location: tuple
    direction: str = "apply"


def apply_move(d: LinkDiagram, mv: MoveSpec) -> LinkDiagram:
    if mv.kind in ("R1+", "R1-"):
        if mv.direction == "apply":
            return _r1_add(d, mv.location, +1 if mv.kind == "R1+" else -1)
        return _r1_undo(d, mv.location, +1 if mv.kind == "R1+" else -1)
    if mv.kind == "R2":
        if mv.direction == "apply":
            return _r2_add(d, mv.location)
        return _r2_undo(d, mv.location)
    if mv.kind == "R3":
        return _r3(d, mv.location)
    raise ValueError("unknown move kind %r" % mv.kind)


# ---------------------------------------------------------------------------
# R1

def _fresh(d, n):
    base = max(d.arcs, default=0)
    return [base + i + 1 for i in range(n)]


def _head_slot(d, arc):
    """(crossing index, pos) where the arc flows in."""
    for ci, c in enumerate(d.crossings):
        if c.under_in == arc and c.ends[0] == arc:
            return ci, 0
        over_in_pos = 3 if c.sign > 0 else 1
        if c.ends[over_in_pos] == arc:
            return ci, over_in_pos
    raise PDValidationError("arc %d has no head" % arc)


def _r1_add(d, location, sign):
    arc, chirality = location
    if arc is None:
        if d.free_loops <= 0:
            raise PDValidationError("no crossingless loop to kink")
        x, na, nb = 1, 2, 3
        base = max(d.arcs, default=0)
        x, na, nb = base + 1, base + 2, base + 3
        ends = [c.ends for c in d.crossings]
        ends.append(_kink_ends(x, na, nb, sign, chirality))
        # close the loop: continuation joins back to the entry
        ends[-1] = tuple(x if a == na else a for a in ends[-1])
        return from_ends(ends, d.free_loops - 1)
    if arc not in d.arcs:
        raise PDValidationError("arc %d not in diagram" % arc)
    na, nb = _fresh(d, 2)
    hc, hp = _head_slot(d, arc)
    ends = [list(c.ends) for c in d.crossings]
    ends[hc][hp] = na
    ends = [tuple(e) for e in ends]
    return from_ends(list(ends) + [_kink_ends(arc, na, nb, sign, chirality)],
                     d.free_loops)


def _kink_ends(x, na, nb, sign, chirality):
    """Four-tuple of a kink crossing: enter via x, leave via na, loop nb."""
    if sign > 0:
        return (x, na, nb, nb) if chirality == "uo" else (nb, nb, na, x)
    return (x, nb, nb, na) if chirality == "uo" else (nb, x, na, nb)


def _kink_shape(c):
    """(sign, incoming, outgoing, loop arc) when the crossing is a kink."""
    a, b, cc, dd = c.ends
    if c.sign > 0:
        if cc == dd:
            return (+1, a, b, cc)       # uo form X[x, z, y, y]
        if a == b:
            return (+1, dd, cc, a)      # ou form X[y, y, t, e]
    else:
        if b == cc:
            return (-1, a, dd, b)       # uo form X[x, y, y, z]
        if a == dd:
            return (-1, b, cc, a)       # ou form X[l, e, t, l]
    return None


def _r1_undo(d, location, sign):
    (cid,) = location if isinstance(location, tuple) else (location,)
    c = d.crossing(cid)
    shape = _kink_shape(c)
    if shape is None or shape[0] != sign:
        raise PDValidationError("crossing %d is not an R1%s kink"
                                % (cid, "+" if sign > 0 else "-"))
    _, incoming, outgoing, _loop = shape
    ends = [tuple(incoming if a == outgoing else a for a in cr.ends)
            for cr in d.crossings if cr.id != cid]
    loops = d.free_loops
    if not any(incoming in e for e in ends):
        loops += 1
    return from_ends(ends, loops)


def kink_crossings(d):
    """Crossings removable by an R1 undo."""
    out = []
    for c in d.crossings:
        s = _kink_shape(c)
        if s is not None:
            out.append((c.id, s[0]))
    return out


# ---------------------------------------------------------------------------
# R2

def _face_arcs(d):
    out = []
    for f in faces(d):
        arcs = tuple(d.crossing(cid).ends[pos] for cid, pos in f)
        out.append((f, arcs))
    return out


def r2_candidates(d):
    """(over_arc, under_arc) pairs cobounding a face, over != under."""
    pairs = set()
    for _, arcs in _face_arcs(d):
        distinct = sorted(set(arcs))
        for u in distinct:
            for v in distinct:
                if u != v:
                    pairs.add((u, v))
    return sorted(pairs)


def _r2_add(d, location):
    u, v = location
    if (u, v) not in r2_candidates(d):
        raise PDValidationError("arcs %d, %d do not cobound a face" % (u, v))
    m, u2, w, v2 = _fresh(d, 4)
    ends = [list(c.ends) for c in d.crossings]
    hu = _head_slot(d, u)
    hv = _head_slot(d, v)
    ends[hu[0]][hu[1]] = u2
    ends[hv[0]][hv[1]] = v2
    base = [tuple(e) for e in ends]
    # the poke template depends on the strands' relative sense along the
    # face; build the candidates and keep the planar one
    templates = [
        # antiparallel: v meets the returning crossing first
        [(w, u, v2, m), (v, u2, w, m)],
        [(w, m, v2, u), (v, m, w, u2)],
        # parallel: v meets the outgoing crossing first
        [(v, u, w, m), (w, u2, v2, m)],
        [(v, m, w, u), (w, m, v2, u2)],
    ]
    for tpl in templates:
        try:
            cand = from_ends(base + [tuple(t) for t in tpl], d.free_loops)
        except PDValidationError:
            continue
        signs = sorted(c.sign for c in cand.crossings[-2:])
        if signs != [-1, 1]:
            continue
        if is_planar(cand):
            return cand
    raise PDValidationError("no planar R2 slide of %d over %d" % (u, v))


def r2_undo_candidates(d):
    """Crossing pairs bounding a reducible bigon."""
    out = []
    for f, arcs in _face_arcs(d):
        if len(f) != 2:
            continue
        (c1, p1), (c2, p2) = f
        if c1 == c2:
            continue
        cr1, cr2 = d.crossing(c1), d.crossing(c2)
        if cr1.sign * cr2.sign != -1:
            continue
        # the two bigon arcs must belong to one strand each: one passes
        # over at both crossings, the other under at both
        a1, a2 = set(arcs) if len(set(arcs)) == 2 else (None, None)
        if a1 is None:
            continue
        def status(cr, arc):
            return [arc in (cr.over_in, cr.over_out),
                    arc in (cr.under_in, cr.under_out)]
        s = {}
        for arc in (a1, a2):
            o1, u1 = status(cr1, arc)
            o2, u2 = status(cr2, arc)
            s[arc] = (o1 and o2, u1 and u2)
        if any(v[0] for v in s.values()) and any(v[1] for v in s.values()):
            out.append(tuple(sorted((c1, c2))))
    return sorted(set(out))


def _r2_undo(d, location):
    c1, c2 = location
    if tuple(sorted((c1, c2))) not in r2_undo_candidates(d):
        raise PDValidationError("crossings %d, %d are not an R2 bigon" % (c1, c2))
    # pull the strands apart: each strand runs straight through both
    # removed crossings
    parent = {x: x for x in d.arcs}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    touched = set()
    for cid in (c1, c2):
        c = d.crossing(cid)
        for x, y in ((c.under_in, c.under_out), (c.over_in, c.over_out)):
            parent[find(x)] = find(y)
            touched.update((x, y))
    rest = [tuple(find(x) for x in cr.ends)
            for cr in d.crossings if cr.id not in (c1, c2)]
    used = {x for e in rest for x in e}
    groups = {find(x) for x in touched}
    loops = d.free_loops + sum(1 for g in groups if g not in used)
    return from_ends(rest, loops)


# ---------------------------------------------------------------------------
# R3

def r3_candidates(d):
    """Triangular faces admitting the slide (not cyclically interleaved)."""
    out = []
    for f, arcs in _face_arcs(d):
        if len(f) != 3 or len({cid for cid, _ in f}) != 3:
            continue
        if len(set(arcs)) != 3:
            continue
        if _triangle_data(d, f) is not None:
            out.append(tuple(sorted({cid for cid, _ in f})))
    return sorted(set(out))


def _arc_status(cr, arc):
    if arc in (cr.over_in, cr.over_out):
        return "o"
    return "u"


def _triangle_data(d, face):
    cids = [cid for cid, _ in face]
    arcs = [d.crossing(cid).ends[pos] for cid, pos in face]
    # endpoints of each triangle arc among the triangle crossings
    ends = {}
    for arc in arcs:
        at = []
        for cid in set(cids):
            cr = d.crossing(cid)
            slots = [p for p, a in enumerate(cr.ends) if a == arc]
            at.extend((cid, p) for p in slots)
        at = [t for t in at if t[0] in cids]
        if len(at) != 2 or at[0][0] == at[1][0]:
            return None
        ends[arc] = at
    statuses = {}
    for arc in arcs:
        sts = []
        for cid, _ in ends[arc]:
            sts.append(_arc_status(d.crossing(cid), arc))
        statuses[arc] = "".join(sorted(sts))
    kinds = sorted(statuses.values())
    if kinds != ["oo", "ou", "uu"]:
        return None
    return ends, statuses


def _strand_passage(d, cid, arc_out):
    """(in_arc, out_arc, over?) of the strand leaving crossing cid via arc_out."""
    cr = d.crossing(cid)
    if arc_out == cr.under_out:
        return cr.under_in, cr.under_out, False
    if arc_out == cr.over_out:
        return cr.over_in, cr.over_out, True
    return None


def _r3(d, location):
    tri = tuple(sorted(location))
    face = None
    for f, arcs in _face_arcs(d):
        if len(f) == 3 and tuple(sorted({cid for cid, _ in f})) == tri:
            if _triangle_data(d, f) is not None:
                face = f
                break
    if face is None:
        raise PDValidationError("no R3 triangle at crossings %s" % (tri,))
    ends, statuses = _triangle_data(d, face)
    arcs = list(ends)

    def is_out_slot(cid, pos):
        cr = d.crossing(cid)
        return pos == 2 or pos == (1 if cr.sign > 0 else 3)

    # for each triangle arc (one per strand): the strand leaves its first
    # crossing via the arc (out slot) and enters the second (in slot)
    strand = {}
    for arc in arcs:
        outs = [t for t in ends[arc] if is_out_slot(*t)]
        ins = [t for t in ends[arc] if not is_out_slot(*t)]
        if len(outs) != 1 or len(ins) != 1:
            raise PDValidationError("degenerate R3 triangle")
        strand[arc] = (outs[0][0], ins[0][0])
    # rebuild: every strand swaps the order of its two crossings
    new_ends = {c.id: {} for c in d.crossings}
    info = {}
    for arc in arcs:
        c_first, c_second = strand[arc]
        cr_f, cr_s = d.crossing(c_first), d.crossing(c_second)
        over_f = arc in (cr_f.over_in, cr_f.over_out)
        over_s = arc in (cr_s.over_in, cr_s.over_out)
        in_arc = cr_f.over_in if over_f else cr_f.under_in
        out_arc = cr_s.over_out if over_s else cr_s.under_out
        info[arc] = dict(c_first=c_first, c_second=c_second,
                         over_f=over_f, over_s=over_s,
                         in_arc=in_arc, out_arc=out_arc)
    rebuilt = {cid: {} for cid in tri}
    for arc in arcs:
        i = info[arc]
        # the strand now meets its former second crossing first
        rebuilt[i["c_second"]]["over" if i["over_s"] else "under"] = \
            (i["in_arc"], arc)
        rebuilt[i["c_first"]]["over" if i["over_f"] else "under"] = \
            (arc, i["out_arc"])
    out_ends = []
    for c in d.crossings:
        if c.id not in rebuilt:
            out_ends.append(c.ends)
            continue
        parts = rebuilt[c.id]
        if "over" not in parts or "under" not in parts:
            raise PDValidationError("R3 rebuild incomplete at crossing %d" % c.id)
        (ui, uo) = parts["under"]
        (oi, oo) = parts["over"]
        if c.sign > 0:
            out_ends.append((ui, oo, uo, oi))
        else:
            out_ends.append((ui, oi, uo, oo))
    cand = from_ends(out_ends, d.free_loops)
    if not is_planar(cand):
        raise PDValidationError("R3 slide is not planar here")
    return cand


# ---------------------------------------------------------------------------
# random sequences

def available_moves(d: LinkDiagram, max_crossings: int):
    """Deterministically ordered list of applicable MoveSpecs."""
    out = []
    n = len(d.crossings)
    if n < max_crossings:
        for arc in sorted(d.arcs):
            for kind in ("R1+", "R1-"):
                for ch in ("uo", "ou"):
                    out.append(MoveSpec(kind, (arc, ch)))
        if d.free_loops:
            for kind in ("R1+", "R1-"):
                out.append(MoveSpec(kind, (None, "uo")))
    for cid, sign in kink_crossings(d):
        out.append(MoveSpec("R1+" if sign > 0 else "R1-", (cid,), "undo"))
    if n + 2 <= max_crossings:
        for u, v in r2_candidates(d):
            out.append(MoveSpec("R2", (u, v)))
    for pair in r2_undo_candidates(d):
        out.append(MoveSpec("R2", pair, "undo"))
    for tri in r3_candidates(d):
        out.append(MoveSpec("R3", tri))
    return out


def random_move_sequence(d: LinkDiagram, count: int, seed: int,
                         max_crossings: int = 9):
    """Apply ``count`` random eligible moves; returns the diagram list."""
    rng = random.Random(seed)
    out = [d]
    cur = d
    for _ in range(count):
        moves = available_moves(cur, max_crossings)
        if not moves:
            break
        applied = False
        for _attempt in range(12):
            mv = rng.choice(moves)
            try:
                cur = apply_move(cur, mv)
                applied = True
                break
            except PDValidationError:
                continue
        if not applied:
            break
        out.append(cur)
    return out
