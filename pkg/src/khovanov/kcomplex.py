"""The bigraded chain complex of a link diagram.

Each state contributes the word module of its resolved graph, shifted by
-(w(D) + s(D)) in the q-grading and placed at height s(D).  The
differential between states differing by +1 at one crossing is the
saddle map tensored with a twisting sign from the top exterior power of
the doubled-crossing set Delta_s: with Delta_s sorted ascending,

    sign = (-1)^(number of elements of Delta_s greater than the crossing)

for the wedge (positive crossing entering Delta) and for the contraction
(negative crossing leaving Delta) alike; this is the convention that
makes every twisted square anticommute, mixed signs included.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import (GRADED, LEE, LinearMap, SaddleConvention,
                      get_convention, saddle_map)
from .diagram import LinkDiagram
from .resolution import State, cube_edge, enumerate_states, resolve


@dataclass(frozen=True)
class Summand:
    state: State
    k: int
    q_shift: int
    height: int
    twist_basis: tuple[int, ...]


@dataclass
class ChainComplex:
    diagram: LinkDiagram
    ring: str
    summands: dict                        # state values -> Summand
    heights: list[int]
    states_by_height: dict                # h -> ordered list of State
    offsets: dict                         # (h, state values) -> column offset
    dims: dict                            # h -> total rank
    differentials: dict                   # h -> {col: ((row, coeff), ...)}
    edge_data: dict = field(default_factory=dict)  # (values, cid) -> (sign, map)

    def qdeg(self, state: State, word: int) -> int:
        s = self.summands[state.values]
        return s.k - 2 * bin(word).count("1") + s.q_shift

    def basis(self, h: int):
        """Ordered (state, word) basis of the height-h group."""
        out = []
        for st in self.states_by_height.get(h, ()):
            k = self.summands[st.values].k
            out.extend((st, w) for w in range(1 << k))
        return out

    def total_rank(self) -> int:
        return sum(self.dims.values())


def twist_sign(summand: Summand, cid: int):
    """Sign and target twist basis for bumping one crossing.

    Wedge case (crossing enters the basis) and contraction case (crossing
    leaves it) both count the basis elements above the crossing.
    """
    basis = summand.twist_basis
    greater = sum(1 for c in basis if c > cid)
    sign = -1 if greater % 2 else 1
    if cid in basis:
        new_basis = tuple(c for c in basis if c != cid)
    else:
        new_basis = tuple(sorted(basis + (cid,)))
    return sign, new_basis


def build_complex(d: LinkDiagram, ring: str = GRADED,
                  conv: SaddleConvention | None = None) -> ChainComplex:
    if conv is None:
        conv = get_convention(ring)
    w = d.writhe
    summands = {}
    states_by_height: dict = {}
    for s in enumerate_states(d):
        g = resolve(d, s)
        q_shift = -sum(c.sign + s.value(c.id) for c in d.crossings)
        twist = tuple(sorted(c.id for c in d.crossings if s.value(c.id) != 0))
        summands[s.values] = Summand(state=s, k=g.k, q_shift=q_shift,
                                     height=s.height, twist_basis=twist)
        states_by_height.setdefault(s.height, []).append(s)
    for h in states_by_height:
        states_by_height[h].sort(key=lambda st: st.values)
    heights = sorted(states_by_height)
    offsets = {}
    dims = {}
    for h in heights:
        off = 0
        for st in states_by_height[h]:
            offsets[(h, st.values)] = off
            off += 1 << summands[st.values].k
        dims[h] = off

    edge_data = {}
    differentials: dict = {}
    maxes = {c.id: (1 if c.sign > 0 else 0) for c in d.crossings}
    for h in heights:
        cols: dict = {}
        for st in states_by_height[h]:
            sm = summands[st.values]
            src_off = offsets[(h, st.values)]
            for c in d.crossings:
                if st.value(c.id) >= maxes[c.id]:
                    continue
                t = cube_edge(d, st, c.id)
                m = saddle_map(t, ring, conv)
                sgn, _ = twist_sign(sm, c.id)
                edge_data[(st.values, c.id)] = (sgn, m)
                tgt_off = offsets[(h + 1, t.to_state.values)]
                for wsrc, hits in m.cols.items():
                    col = src_off + wsrc
                    lst = cols.setdefault(col, [])
                    for wtgt, coeff in hits:
                        lst.append((tgt_off + wtgt, sgn * coeff))
        differentials[h] = {
            col: tuple(sorted(_accumulate(lst))) for col, lst in cols.items()
            if _accumulate(lst)}
    return ChainComplex(diagram=d, ring=ring, summands=summands,
                        heights=heights, states_by_height=states_by_height,
                        offsets=offsets, dims=dims,
                        differentials=differentials, edge_data=edge_data)


def _accumulate(pairs):
    acc = {}
    for r, v in pairs:
        acc[r] = acc.get(r, 0) + v
    return [(r, v) for r, v in acc.items() if v]


@dataclass
class DSquaredReport:
    ok: bool
    failures: list   # (state values, c1, c2)

    def __bool__(self):
        return self.ok


def verify_d_squared(K: ChainComplex, full: bool = False) -> DSquaredReport:
    """Check that consecutive differentials compose to zero.

    The default mode checks every elementary square (both 2-step paths
    from each state must cancel after twisting), which is equivalent to
    the vanishing of the full composite and pinpoints failures; ``full``
    additionally multiplies the assembled matrices.
    """
    d = K.diagram
    maxes = {c.id: (1 if c.sign > 0 else 0) for c in d.crossings}
    failures = []
    ids = sorted(maxes)
    for st_values, sm in K.summands.items():
        st = sm.state
        live = [cid for cid in ids if st.value(cid) < maxes[cid]]
        for i, c1 in enumerate(live):
            for c2 in live[i + 1:]:
                if not _square_cancels(K, st, c1, c2):
                    failures.append((st_values, c1, c2))
    if full:
        for h in K.heights[:-1]:
            d1 = K.differentials.get(h, {})
            d2 = K.differentials.get(h + 1, {})
            for col, hits in d1.items():
                acc = {}
                for mid, v in hits:
                    for row, v2 in d2.get(mid, ()):
                        acc[row] = acc.get(row, 0) + v * v2
                if any(acc.values()):
                    failures.append(("full", h, col))
    return DSquaredReport(ok=not failures, failures=failures)


def _square_cancels(K: ChainComplex, st: State, c1: int, c2: int) -> bool:
    def step(values, cid):
        return K.edge_data[(values, cid)]

    s1, m1 = step(st.values, c1)
    sA = st.bump(c1)
    s1b, m1b = step(sA.values, c2)
    s2, m2 = step(st.values, c2)
    sB = st.bump(c2)
    s2b, m2b = step(sB.values, c1)
    pathA = m1b.compose(m1)
    pathB = m2b.compose(m2)
    tA, tB = s1 * s1b, s2 * s2b
    # sum of the two twisted composites must vanish
    for w, hits in pathA.cols.items():
        other = dict(pathB.cols.get(w, ()))
        for tgt, v in hits:
            if tA * v + tB * other.get(tgt, 0) != 0:
                return False
        for tgt, v2 in other.items():
            if tgt not in dict(hits) and tB * v2 != 0:
                return False
    for w, hits in pathB.cols.items():
        if w not in pathA.cols and any(v for _, v in hits):
            return False
    return True


# ---------------------------------------------------------------------------
# Reidemeister I chain maps on the four curl diagrams

_KINK_FORMS = {
    "X[1,1,2,2]": +1, "X[2,2,1,1]": +1,   # positive curls
    "X[1,2,2,1]": -1, "X[2,1,1,2]": -1,   # negative curls
}


@dataclass
class R1Maps:
    """Chain maps between a one-crossing curl complex and the unknot's.

    ``f`` collapses the curl (two circles -> one), ``g`` includes the
    unknot, ``D`` is the homotopy on the curled side; all satisfy the
    curl chain identities exactly.
    """

    sign: int
    f: tuple
    g: tuple
    D: tuple
    delta: tuple


def _curl_delta_cols(d, ring, conv):
    st0 = State((0,),)
    if d.crossings[0].sign > 0:
        t = cube_edge(d, State((0,)), 0)
    else:
        t = cube_edge(d, State((-1,)), 0)
    m = saddle_map(t, ring, conv)
    dim_src = 1 << m.src_k
    cols = []
    for w in range(dim_src):
        cols.append(dict(m.cols.get(w, ())))
    return tuple(cols)


def r1_chain_maps(d: LinkDiagram, cid: int = 0, ring: str = GRADED,
                  conv: SaddleConvention | None = None) -> R1Maps:
    """Solve for the curl equivalences f, g and homotopy D.

    ``d`` must be a one-crossing curl diagram.  The maps are found by a
    small constrained search over {-2..2}, mirroring how the saddle
    coefficients themselves are pinned; failure means the convention
    branch is wrong and raises.
    """
    pd = d.serialize()
    if pd not in _KINK_FORMS or cid != 0:
        raise ValueError("r1_chain_maps expects a one-crossing curl diagram")
    if conv is None:
        conv = get_convention(ring)
    sign = _KINK_FORMS[pd]
    delta = _curl_delta_cols(d, ring, conv)
    rng = (0, 1, -1, 2, -2)
    sols = _solve_r1(sign, delta, rng, lee=(ring == LEE))
    if not sols:
        raise ValueError("curl chain identities unsatisfiable: "
                         "wrong convention branch")
    f, g, D = sols[0]
    return R1Maps(sign=sign, f=f, g=g, D=D, delta=delta)


def _mat_mul(f, g):
    out = []
    for col in g:
        acc = {}
        for mid, cg in col.items():
            for tgt, cf in f[mid].items():
                acc[tgt] = acc.get(tgt, 0) + cf * cg
        out.append({k: v for k, v in acc.items() if v})
    return tuple(out)


def _is_identity(f):
    return all(col == {i: 1} for i, col in enumerate(f))


def _id_minus(f):
    out = []
    for i, col in enumerate(f):
        acc = {i: 1}
        for k, v in col.items():
            w = acc.get(k, 0) - v
            if w:
                acc[k] = w
            else:
                acc.pop(k, None)
        out.append(acc)
    return tuple(out)


def _solve_r1(sign, delta, rng, lee=False):
    """Search the curl chain maps; in the Lee ring the filtration allows
    one extra (q-degree dropping) entry on g (positive curl) or f
    (negative curl)."""
    import itertools
    sols = []
    extras = rng if lee else (0,)
    if sign > 0:
        # f: A@A -> A lowers word degree, g raises, D: A -> A@A lowers
        for f1, f2, f3 in itertools.product(rng, repeat=3):
            f = ({0: f1} if f1 else {}, {1: f2} if f2 else {},
                 {1: f3} if f3 else {}, {})
            for g1, g2, g3, g4 in itertools.product(rng, rng, rng, extras):
                g = ({k: v for k, v in ((0, g1), (3, g4)) if v},
                     {k: v for k, v in ((1, g2), (2, g3)) if v})
                if not _is_identity(_mat_mul(f, g)):
                    continue
                if any(_mat_mul(delta, g)):
                    continue
                target = _id_minus(_mat_mul(g, f))
                for d1, d2, d3 in itertools.product(rng, repeat=3):
                    D = ({k: v for k, v in ((1, d1), (2, d2)) if v},
                         {3: d3} if d3 else {})
                    if not _is_identity(_mat_mul(delta, D)):
                        continue
                    if _mat_mul(D, delta) == target:
                        sols.append((f, g, D))
                if sols:
                    return sols
    else:
        # delta: A -> A@A; f: A@A -> A raises word degree (mu-shaped),
        # g lowers, D: A@A -> A lowers
        for f1, f2, f3, f4 in itertools.product(rng, rng, rng, extras):
            f = ({1: f4} if f4 else {}, {0: f1} if f1 else {},
                 {0: f2} if f2 else {}, {1: f3} if f3 else {})
            if any(_mat_mul(f, delta)):
                continue
            for g1, g2, g3 in itertools.product(rng, repeat=3):
                g = ({k: v for k, v in ((1, g1), (2, g2)) if v},
                     {3: g3} if g3 else {})
                if not _is_identity(_mat_mul(f, g)):
                    continue
                target = _id_minus(_mat_mul(g, f))
                for d1, d2, d3 in itertools.product(rng, repeat=3):
                    D = ({0: d1} if d1 else {}, {1: d2} if d2 else {},
                         {1: d3} if d3 else {}, {})
                    if not _is_identity(_mat_mul(D, delta)):
                        continue
                    if _mat_mul(delta, D) == target:
                        sols.append((f, g, D))
                if sols:
                    return sols
    return sols


def r1_solvable(conv: SaddleConvention) -> bool:
    """All four curl forms admit the chain equivalences under ``conv``."""
    from .diagram import parse_pd
    for pd in _KINK_FORMS:
        try:
            r1_chain_maps(parse_pd(pd), 0, conv.ring, conv)
        except ValueError:
            return False
    return True


def dump_complex(K: ChainComplex) -> str:
    lines = ["ring %s  diagram %s" % (K.ring, K.diagram.serialize() or "(empty)")]
    for h in K.heights:
        for st in K.states_by_height[h]:
            sm = K.summands[st.values]
            lines.append("summand state=%s height=%d shift=%d circles=%d twist=%s"
                         % (",".join(str(v) for v in st.values), sm.height,
                            sm.q_shift, sm.k,
                            ",".join(str(c) for c in sm.twist_basis) or "-"))
    for h in K.heights:
        for col in sorted(K.differentials.get(h, {})):
            for row, v in K.differentials[h][col]:
                lines.append("d h=%d col=%d row=%d val=%d" % (h, col, row, v))
    return "\n".join(lines)
