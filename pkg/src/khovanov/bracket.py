"""Laurent-polynomial arithmetic and the decategorified invariants.

``bracket_state_sum`` evaluates the oriented state sum

    <D> = sum_s (-1)^{d_s} q^{-(w(D)+s(D))} (q + q^-1)^{#circles(s)}

which is (q+q^-1) times the Jones polynomial after q = -t^(-1/2).  The
displayed global sum carries no sign, but the defining local expansions
(<c+> = q^-1 <c0> - q^-2 <double>) force a minus per double edge;
(-1)^{d_s} reconciles the two.  ``jones_via_kauffman`` is an independent
oracle: the classical unoriented Kauffman bracket with writhe correction,
converted by A^2 -> -q^-1.
"""

from __future__ import annotations

from .diagram import LinkDiagram
from .resolution import enumerate_states, resolve


class LaurentPoly:
    """Sparse integer Laurent polynomial in one variable.

    >>> p = LaurentPoly({1: 1, -1: 1})
    >>> print(p * p)
    q^-2 + 2 + q^2
    """

    __slots__ = ("c",)

    def __init__(self, coeffs=None):
        self.c = {}
        if coeffs:
            for k, v in coeffs.items():
                if v:
                    self.c[k] = v

    @classmethod
    def const(cls, n):
        return cls({0: n})

    @classmethod
    def monomial(cls, coeff, exp):
        return cls({exp: coeff})

    def __bool__(self):
        return bool(self.c)

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.const(other)
        return isinstance(other, LaurentPoly) and self.c == other.c

    def __hash__(self):
        return hash(frozenset(self.c.items()))

    def __add__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.const(other)
        out = dict(self.c)
        for k, v in other.c.items():
            w = out.get(k, 0) + v
            if w:
                out[k] = w
            else:
                out.pop(k, None)
        return LaurentPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({k: -v for k, v in self.c.items()})

    def __sub__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.const(other)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.const(other)
        out = {}
        for k1, v1 in self.c.items():
            for k2, v2 in other.c.items():
                k = k1 + k2
                w = out.get(k, 0) + v1 * v2
                if w:
                    out[k] = w
                else:
                    out.pop(k, None)
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n):
        out = LaurentPoly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def substitute_inverse(self):
        """q -> q^-1."""
        return LaurentPoly({-k: v for k, v in self.c.items()})

    def evaluate(self, x):
        from fractions import Fraction
        total = Fraction(0)
        for k, v in self.c.items():
            total += v * Fraction(x) ** k
        return total

    def terms(self):
        return sorted(self.c.items())

    def __str__(self):
        if not self.c:
            return "0"
        parts = []
        for k, v in self.terms():
            if k == 0:
                body = str(abs(v))
            else:
                mag = "" if abs(v) == 1 else "%d*" % abs(v)
                body = "%sq^%d" % (mag, k)
            if not parts:
                parts.append(body if v > 0 else "-" + body)
            else:
                parts.append(("+ " if v > 0 else "- ") + body)
        return " ".join(parts)

    __repr__ = __str__


LOOP = LaurentPoly({1: 1, -1: 1})  # value of a crossingless circle


def bracket_state_sum(d: LinkDiagram) -> LaurentPoly:
    """The oriented state sum <D>; empty diagram gives 1."""
    w = d.writhe
    total = LaurentPoly()
    for s in enumerate_states(d):
        g = resolve(d, s)
        sign = -1 if s.double_count % 2 else 1
        term = LaurentPoly.monomial(sign, -(w + s.height)) * LOOP ** g.k
        total = total + term
    return total


def verify_skein(dplus: LinkDiagram, dminus: LinkDiagram,
                 dzero: LinkDiagram) -> bool:
    """q^2 <D+> - q^-2 <D-> = (q - q^-1) <D0>."""
    if len(dplus.crossings) != len(dminus.crossings) or \
       len(dzero.crossings) != len(dplus.crossings) - 1:
        raise ValueError("skein triple crossing counts do not match")
    lhs = (LaurentPoly.monomial(1, 2) * bracket_state_sum(dplus)
           - LaurentPoly.monomial(1, -2) * bracket_state_sum(dminus))
    rhs = LaurentPoly({1: 1, -1: -1}) * bracket_state_sum(dzero)
    return lhs == rhs


def jones_via_kauffman(d: LinkDiagram) -> LaurentPoly:
    """Unnormalized Jones polynomial via the classical Kauffman bracket.

    Expands every crossing into A- and B-smoothings (A joins the ends at
    positions 0-1 and 2-3), multiplies by (-A^3)^(-w), and substitutes
    A^2 = -q (the Jones variable here is t = q^-2).  The unknot gives
    q + q^-1.
    """
    n = len(d.crossings)
    # accumulate coefficients of A^k
    acc: dict[int, int] = {}
    for mask in range(1 << n):
        # mask bit i set = B-smoothing at crossing i
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
        apow = 0
        for i, c in enumerate(d.crossings):
            ends = _slot_ends(c)
            if (mask >> i) & 1:
                union(ends[0], ends[3]); union(ends[1], ends[2])
                apow -= 1
            else:
                union(ends[0], ends[1]); union(ends[2], ends[3])
                apow += 1
        roots = {find((a, 0)) for a in d.arcs}
        loops = len(roots) + d.free_loops
        # delta^loops with delta = -A^2 - A^-2, unreduced bracket
        coeffs = _delta_power(loops)
        for k, v in coeffs.items():
            kk = k + apow
            acc[kk] = acc.get(kk, 0) + v
    if n == 0:
        acc = _delta_power(d.free_loops)
    f = {}
    w = d.writhe
    for k, v in acc.items():
        kk = k - 3 * w
        s = -1 if (w % 2) else 1
        f[kk] = f.get(kk, 0) + v * s
    # substitute A^2 = -q (all exponents are even)
    out = {}
    for k, v in f.items():
        assert k % 2 == 0, "odd A-exponent in writhe-corrected bracket"
        half = k // 2
        out[half] = out.get(half, 0) + v * (-1 if half % 2 else 1)
    return LaurentPoly(out)


def _slot_ends(c):
    """The (arc, end) sitting at each of the four slots of a crossing."""
    a, b, cc, dd = c.ends
    out = [None] * 4
    out[0] = (a, 1)            # under-in: head of a
    out[2] = (cc, 0)           # under-out: tail of c
    if c.sign > 0:
        out[3] = (dd, 1)       # over-in
        out[1] = (b, 0)
    else:
        out[1] = (b, 1)
        out[3] = (dd, 0)
    return out


def _delta_power(k):
    """Coefficients of (-A^2 - A^-2)^k."""
    out = {0: 1}
    for _ in range(k):
        nxt = {}
        for e, v in out.items():
            for de in (2, -2):
                nxt[e + de] = nxt.get(e + de, 0) - v
        out = nxt
    return out
