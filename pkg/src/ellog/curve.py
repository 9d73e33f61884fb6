"""Weierstrass curves y^2 = x^3 + a x + b over F_q and its extensions.

Besides the chord-tangent group law and naive point counting, this module
carries the machinery tied to the three-coordinate curve model: the third
summation polynomial S_3, sparse trivariate polynomials in U, V, W, the
forward map phi sending Q to the abscissa triple of (Q - P1, Q, Q + P1),
and the pullback phi_star into functions on the Weierstrass curve.

A pulled-back function is kept in the shape (n0(X) + n1(X) Y) / (X - x1)^e,
reduced with the curve equation; that normal form is what the divisor
machinery consumes.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .algebra import FieldDesc, Poly


class MixedCurves(ValueError):
    pass


class Singular(ValueError):
    pass


class OrderNotDivisible(ValueError):
    pass


class MapsToInfinity(ValueError):
    pass


class Curve:
    """y^2 = x^3 + a x + b over a FieldDesc, with its point count cached."""

    __slots__ = ("field", "a", "b", "N", "t")

    def __init__(self, field: FieldDesc, a: int, b: int, N: int | None = None):
        K = field
        disc = K.add(K.mul(4 % K.p, K.pow_(a, 3)), K.mul(27 % K.p, K.mul(b, b)))
        if disc == 0:
            raise Singular("4a^3 + 27b^2 = 0")
        self.field = field
        self.a = a
        self.b = b
        self.N = N if N is not None else count_points(field, a, b)
        self.t = field.q + 1 - self.N
        if self.t * self.t > 4 * field.q:
            raise ValueError("point count violates the Hasse bound")

    def rhs(self, x: int) -> int:
        K = self.field
        return K.add(K.mul(x, K.mul(x, x)), K.add(K.mul(self.a, x), self.b))

    def rhs_in(self, dom, x):
        a = dom.embed(self.a)
        b = dom.embed(self.b)
        return dom.add(dom.mul(x, dom.mul(x, x)), dom.add(dom.mul(a, x), b))

    def rhs_poly(self) -> Poly:
        return Poly(self.field, (self.b, self.a, 0, 1))

    def order_over(self, i: int) -> int:
        """#E(F_{q^i}) from the trace recurrence t_i = t t_{i-1} - q t_{i-2}."""
        q = self.field.q
        t_prev, t_cur = 2, self.t
        for _ in range(i - 1):
            t_prev, t_cur = t_cur, self.t * t_cur - q * t_prev
        return q ** i + 1 - t_cur

    def encode(self) -> str:
        K = self.field
        mod = ",".join(str(c) for c in K.modulus)
        parts = [f"{K.p},{K.m},{mod}", K.enc(self.a), K.enc(self.b), str(self.N)]
        return "|".join(parts)

    def __eq__(self, other):
        return (isinstance(other, Curve) and self.field == other.field
                and self.a == other.a and self.b == other.b)

    def __hash__(self):
        return hash((self.field, self.a, self.b))

    def __repr__(self):
        K = self.field
        return f"E[y^2=x^3+{K.enc(self.a)}x+{K.enc(self.b)}/{K!r}]"

    def __reduce__(self):
        return (Curve, (self.field, self.a, self.b, self.N))


def count_points(field: FieldDesc, a: int, b: int) -> int:
    """Exhaustive count via the quadratic character: N = q + 1 + sum chi(f(x))."""
    K = field
    sq = set()
    for y in range(K.q):
        sq.add(K.mul(y, y))
    n = 1
    for x in range(K.q):
        fx = K.add(K.mul(x, K.mul(x, x)), K.add(K.mul(a, x), b))
        if fx == 0:
            n += 1
        elif fx in sq:
            n += 2
    return n


class Point:
    """Affine point or infinity, tagged with its coordinate domain.

    The domain may be the base FieldDesc, an ExtFieldDesc, or any object
    exposing the same embed/add/sub/mul/div/neg/eq protocol over its own
    element representation.
    """

    __slots__ = ("curve", "dom", "x", "y", "inf")

    def __init__(self, curve: Curve, dom, x=None, y=None, inf: bool = False):
        self.curve = curve
        self.dom = dom
        self.x = x
        self.y = y
        self.inf = inf

    @staticmethod
    def infinity(curve: Curve, dom=None) -> "Point":
        return Point(curve, dom if dom is not None else curve.field, inf=True)

    @staticmethod
    def make(curve: Curve, dom, x, y) -> "Point":
        p = Point(curve, dom, x, y)
        if not p.on_curve():
            raise ValueError("point is not on the curve")
        return p

    def on_curve(self) -> bool:
        if self.inf:
            return True
        dom = self.dom
        return _dom_eq(dom, dom.mul(self.y, self.y), self.curve.rhs_in(dom, self.x))

    def __eq__(self, other):
        if not isinstance(other, Point):
            return NotImplemented
        if self.curve != other.curve:
            return False
        if self.inf or other.inf:
            return self.inf and other.inf
        return _dom_eq(self.dom, self.x, other.x) and _dom_eq(self.dom, self.y, other.y)

    def __hash__(self):
        if self.inf:
            return hash((self.curve, "inf"))
        return hash((self.curve, _freeze(self.x), _freeze(self.y)))

    def __repr__(self):
        if self.inf:
            return "O"
        return f"({self.x}, {self.y})"


def _freeze(v):
    return tuple(v) if isinstance(v, (list, tuple)) else v


def _dom_eq(dom, a, b) -> bool:
    if hasattr(dom, "eq"):
        return dom.eq(a, b)
    return a == b


def point_neg(P: Point) -> Point:
    if P.inf:
        return P
    return Point(P.curve, P.dom, P.x, P.dom.neg(P.y))


def point_add(P: Point, Q: Point) -> Point:
    if P.curve != Q.curve or (not P.inf and not Q.inf and P.dom is not Q.dom
                              and P.dom != Q.dom):
        raise MixedCurves("points live on different curves or domains")
    if P.inf:
        return Q
    if Q.inf:
        return P
    dom = P.dom
    if _dom_eq(dom, P.x, Q.x):
        if _dom_eq(dom, P.y, dom.neg(Q.y)):
            return Point.infinity(P.curve, dom)
        # tangent
        num = dom.add(dom.mul(dom.embed(3 % P.curve.field.p), dom.mul(P.x, P.x)),
                      dom.embed(P.curve.a))
        lam = dom.div(num, dom.mul(dom.embed(2), P.y))
    else:
        lam = dom.div(dom.sub(Q.y, P.y), dom.sub(Q.x, P.x))
    x3 = dom.sub(dom.sub(dom.mul(lam, lam), P.x), Q.x)
    y3 = dom.sub(dom.mul(lam, dom.sub(P.x, x3)), P.y)
    return Point(P.curve, dom, x3, y3)


def scalar_mul(n: int, P: Point) -> Point:
    if n < 0:
        return scalar_mul(-n, point_neg(P))
    R = Point.infinity(P.curve, P.dom)
    A = P
    while n:
        if n & 1:
            R = point_add(R, A)
        A = point_add(A, A)
        n >>= 1
    return R


def point_order(P: Point, group_order: int) -> int:
    """Exact order of P given a multiple of it (the group order)."""
    if P.inf:
        return 1
    n = group_order
    for ell, _ in _int_factor(group_order):
        while n % ell == 0 and scalar_mul(n // ell, P).inf:
            n //= ell
    return n


def _int_factor(n: int) -> list[tuple[int, int]]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1
    if n > 1:
        out.append((n, 1))
    return out


def curve_points(curve: Curve) -> list[Point]:
    """All rational points (desk scale; O first)."""
    K = curve.field
    pts = [Point.infinity(curve)]
    roots: dict[int, list[int]] = {}
    for y in range(K.q):
        roots.setdefault(K.mul(y, y), []).append(y)
    for x in range(K.q):
        fx = curve.rhs(x)
        for y in roots.get(fx, ()):
            pts.append(Point(curve, K, x, y))
    return pts


def find_point_of_order(curve: Curve, k: int, seed: int = 0) -> Point | None:
    """A rational point of exact order k, or None if the group has none.

    Random candidates (N/k) * R are tried first; for small q an exhaustive
    scan certifies a miss.
    """
    if k == 1:
        return Point.infinity(curve)
    if curve.N % k != 0:
        raise OrderNotDivisible(f"k = {k} does not divide N = {curve.N}")
    K = curve.field
    rng = random.Random(seed * 0x9E3779B1 + 0x5EED)
    sq = {}
    for y in range(K.q):
        sq.setdefault(K.mul(y, y), y)
    cof = curve.N // k
    kfac = _int_factor(k)
    for _ in range(96):
        x = rng.randrange(K.q)
        fx = curve.rhs(x)
        if fx not in sq:
            continue
        R = Point(curve, K, x, sq[fx])
        P = scalar_mul(cof, R)
        if P.inf:
            continue
        if not scalar_mul(k, P).inf:
            continue
        if all(not scalar_mul(k // ell, P).inf for ell, _ in kfac):
            return P
    if K.q <= 1 << 10:
        for R in curve_points(curve):
            P = scalar_mul(cof, R)
            if P.inf or not scalar_mul(k, P).inf:
                continue
            if all(not scalar_mul(k // ell, P).inf for ell, _ in kfac):
                return P
        return None
    return None


class TorsionData:
    """P1 of exact order k with the abscissa/ordinate table of its multiples.

    xs[j], ys[j] are the coordinates of P_j = j * P1 for j in 1..k-1; index 0
    is unused (the multiple 0 * P1 is the point at infinity).
    """

    __slots__ = ("curve", "k", "P1", "xs", "ys", "_points")

    def __init__(self, curve: Curve, P1: Point, k: int):
        if k < 3:
            raise ValueError("torsion order must be at least 3")
        if not scalar_mul(k, P1).inf:
            raise ValueError("P1 does not have order dividing k")
        self.curve = curve
        self.k = k
        self.P1 = P1
        pts = [None]
        P = P1
        for j in range(1, k):
            if P.inf:
                raise ValueError(f"P1 has order {j} < k")
            pts.append(P)
            P = point_add(P, P1)
        if not P.inf:
            raise ValueError("P1 does not have exact order k")
        self._points = pts
        self.xs = [None] + [Q.x for Q in pts[1:]]
        self.ys = [None] + [Q.y for Q in pts[1:]]

    def point(self, j: int) -> Point:
        j %= self.k
        if j == 0:
            return Point.infinity(self.curve)
        return self._points[j]

    def __reduce__(self):
        return (_rebuild_td, (self.curve, self.P1.x, self.P1.y, self.k))


def _rebuild_td(curve, x, y, k):
    return TorsionData(curve, Point(curve, curve.field, x, y), k)


def semaev3(x1, x2, x3, curve: Curve, dom=None):
    """S_3 = 4 s1 (s3 + b) - (s2 - a)^2 in the given coordinate domain."""
    dom = dom if dom is not None else curve.field
    a = dom.embed(curve.a)
    b = dom.embed(curve.b)
    s1 = dom.add(dom.add(x1, x2), x3)
    s2 = dom.add(dom.add(dom.mul(x1, x2), dom.mul(x1, x3)), dom.mul(x2, x3))
    s3 = dom.mul(x1, dom.mul(x2, x3))
    t = dom.sub(s2, a)
    return dom.sub(dom.mul(dom.embed(4), dom.mul(s1, dom.add(s3, b))), dom.mul(t, t))


# ---------------------------------------------------------------------------
# sparse polynomials in U, V, W
# ---------------------------------------------------------------------------

class TriPoly:
    """Sparse polynomial in U, V, W over the base field.

    Keys are exponent triples (i, j, l); values are nonzero field codes.
    """

    __slots__ = ("field", "terms")

    def __init__(self, field: FieldDesc, terms=None):
        self.field = field
        t = {}
        if terms:
            for mono, c in (terms.items() if isinstance(terms, dict) else terms):
                if c:
                    key = tuple(mono)
                    cur = t.get(key)
                    c2 = field.add(cur, c) if cur is not None else c
                    if c2:
                        t[key] = c2
                    elif cur is not None:
                        del t[key]
        self.terms = t

    @staticmethod
    def const(field: FieldDesc, c: int) -> "TriPoly":
        return TriPoly(field, {(0, 0, 0): c} if c else {})

    @staticmethod
    def var(field: FieldDesc, name: str) -> "TriPoly":
        idx = "UVW".index(name)
        mono = [0, 0, 0]
        mono[idx] = 1
        return TriPoly(field, {tuple(mono): 1})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, TriPoly) and self.field == other.field and self.terms == other.terms

    def __hash__(self):
        return hash((self.field, tuple(sorted(self.terms.items()))))

    def __add__(self, other):
        K = self.field
        t = dict(self.terms)
        for mono, c in other.terms.items():
            c2 = K.add(t.get(mono, 0), c)
            if c2:
                t[mono] = c2
            else:
                t.pop(mono, None)
        return TriPoly(K, t)

    def __sub__(self, other):
        K = self.field
        t = dict(self.terms)
        for mono, c in other.terms.items():
            c2 = K.sub(t.get(mono, 0), c)
            if c2:
                t[mono] = c2
            else:
                t.pop(mono, None)
        return TriPoly(K, t)

    def __mul__(self, other):
        K = self.field
        if isinstance(other, int):
            return self.scale(other)
        t: dict[tuple, int] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = (m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2])
                c = K.mul(c1, c2)
                cur = t.get(mono)
                c2v = K.add(cur, c) if cur is not None else c
                if c2v:
                    t[mono] = c2v
                elif cur is not None:
                    del t[mono]
        return TriPoly(K, t)

    def scale(self, c: int) -> "TriPoly":
        K = self.field
        if c == 0:
            return TriPoly(K)
        return TriPoly(K, {m: K.mul(v, c) for m, v in self.terms.items()})

    def __neg__(self):
        return self.scale(self.field.neg(1))

    def shift_uv_to_vw(self) -> "TriPoly":
        """Substitute U -> V, V -> W (the right-hand-side twist)."""
        if any(m[2] for m in self.terms):
            raise ValueError("shift only defined for polynomials in U, V")
        return TriPoly(self.field, {(0, m[0], m[1]): c for m, c in self.terms.items()})

    def eval_in(self, dom, u, v, w):
        acc = dom.zero
        for (i, j, l), c in self.terms.items():
            term = dom.embed(c)
            for base, e in ((u, i), (v, j), (w, l)):
                for _ in range(e):
                    term = dom.mul(term, base)
            acc = dom.add(acc, term)
        return acc

    def degrees(self) -> tuple[int, int, int]:
        if not self.terms:
            return (0, 0, 0)
        return tuple(max(m[i] for m in self.terms) for i in range(3))

    def canonical(self) -> tuple:
        return tuple(sorted(self.terms.items()))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for (i, j, l), c in sorted(self.terms.items()):
            mono = "".join(s * e for s, e in zip("UVW", (i, j, l))) or "1"
            parts.append(f"{self.field.enc(c)}*{mono}")
        return " + ".join(parts)


def bracket(A: TriPoly, B: TriPoly) -> TriPoly:
    """A(V,W) B(U,V) - A(U,V) B(V,W): the right side of every relation."""
    return A.shift_uv_to_vw() * B - A * B.shift_uv_to_vw()


def semaev3_tri(curve: Curve, x_list: tuple[str | int, ...]) -> TriPoly:
    """S_3 with each slot a variable name or a constant code."""
    K = curve.field
    vals = []
    for s in x_list:
        vals.append(TriPoly.var(K, s) if isinstance(s, str) else TriPoly.const(K, s))
    x1, x2, x3 = vals
    s1 = x1 + x2 + x3
    s2 = x1 * x2 + x1 * x3 + x2 * x3
    s3 = x1 * x2 * x3
    t = s2 - TriPoly.const(K, curve.a)
    return (s1 * (s3 + TriPoly.const(K, curve.b))).scale(4 % K.p) - t * t


def model_equations(td: TorsionData) -> tuple[TriPoly, TriPoly, TriPoly]:
    """The three defining equations of the image curve.

    Returns (S_3(U,V,x1), divided difference of S_3(U,V,x1) - S_3(V,W,x1)
    by U - W, S_3(U,W,x2)).
    """
    curve = td.curve
    K = curve.field
    e1 = semaev3_tri(curve, ("U", "V", td.xs[1]))
    e3 = semaev3_tri(curve, ("U", "W", td.xs[2]))
    # e1 - e1[U->W] is divisible by U - W; divide monomial-wise using
    # U^a - W^a = (U - W) * sum U^i W^(a-1-i)
    diff_terms: dict[tuple, int] = {}
    for (i, j, l), c in e1.terms.items():
        if l:
            raise AssertionError("unexpected W in S_3(U,V,x1)")
        for t in range(i):
            mono = (t, j, i - 1 - t)
            cur = diff_terms.get(mono, 0)
            c2 = K.add(cur, c)
            if c2:
                diff_terms[mono] = c2
            else:
                diff_terms.pop(mono, None)
    e2 = TriPoly(K, diff_terms)
    return e1, e2, e3


def phi(Q: Point, td: TorsionData):
    """(x_{Q-P1}, x_Q, x_{Q+P1}); the three exceptional points are rejected."""
    if Q.inf:
        raise MapsToInfinity("O maps to infinity on the model")
    dom = Q.dom
    P1 = _lift_point(td.P1, dom, Q.curve)
    if _dom_eq(dom, Q.x, P1.x):
        raise MapsToInfinity("Q in {P1, -P1} maps to infinity on the model")
    left = point_add(Q, point_neg(P1))
    right = point_add(Q, P1)
    return (left.x, Q.x, right.x)


def _lift_point(P: Point, dom, curve: Curve) -> Point:
    if dom is P.dom or dom == P.dom:
        return P
    return Point(curve, dom, dom.embed(P.x), dom.embed(P.y))


# ---------------------------------------------------------------------------
# functions on E in the normal form (n0 + n1 Y) / (X - x1)^e
# ---------------------------------------------------------------------------

class ZeroFunction(ValueError):
    pass


@dataclass(frozen=True)
class CurveFunction:
    """(n0(X) + n1(X) Y) / (X - x1)^e on a fixed curve.

    Always reduced: no common (X - x1) factor of n0 and n1 remains while
    e > 0.  Multiplication reduces Y^2 via the curve equation.
    """

    curve: Curve
    x1: int
    n0: Poly
    n1: Poly
    e: int

    @staticmethod
    def make(curve: Curve, x1: int, n0: Poly, n1: Poly, e: int) -> "CurveFunction":
        K = curve.field
        lin = Poly(K, (K.neg(x1), 1))
        while e > 0 and not (n0.is_zero() and n1.is_zero()):
            q0, r0 = n0.divmod(lin)
            if not r0.is_zero():
                break
            if n1.is_zero():
                n0, e = q0, e - 1
                continue
            q1, r1 = n1.divmod(lin)
            if not r1.is_zero():
                break
            n0, n1, e = q0, q1, e - 1
        return CurveFunction(curve, x1, n0, n1, e)

    def is_zero(self) -> bool:
        return self.n0.is_zero() and self.n1.is_zero()

    def mul(self, other: "CurveFunction") -> "CurveFunction":
        if self.curve != other.curve or self.x1 != other.x1:
            raise MixedCurves("functions on different models")
        f = self.curve.rhs_poly()
        n0 = self.n0 * other.n0 + (self.n1 * other.n1) * f
        n1 = self.n0 * other.n1 + self.n1 * other.n0
        return CurveFunction.make(self.curve, self.x1, n0, n1, self.e + other.e)

    def eval_at(self, dom, x, y):
        """Value at an affine point in any domain (raises on a pole)."""
        num = dom.add(self.n0.eval_in(dom, x), dom.mul(self.n1.eval_in(dom, x), y))
        if self.e == 0:
            return num
        den = dom.sub(x, dom.embed(self.x1))
        d = den
        for _ in range(self.e - 1):
            d = dom.mul(d, den)
        return dom.div(num, d)

    def __repr__(self):
        return f"({self.n0!r} + ({self.n1!r})*Y)/(X-x1)^{self.e}"


def phi_star(f: TriPoly, td: TorsionData) -> CurveFunction:
    """Pull a model function back to the Weierstrass curve.

    U and W map to (x1 X^2 + (a + x1^2) X + a x1 + 2b +- 2 y1 Y)/(X - x1)^2,
    V maps to X; the result is put over the smallest power of (X - x1).
    """
    curve = td.curve
    K = curve.field
    x1 = td.xs[1]
    y1 = td.ys[1]
    a, b = curve.a, curve.b
    quad = Poly(K, (K.add(K.mul(a, x1), K.mul(2, b)), K.add(a, K.mul(x1, x1)), x1))
    two_y1 = K.mul(2, y1)
    NU = (quad, Poly(K, (two_y1,)))          # numerator of U over (X-x1)^2
    NW = (quad, Poly(K, (K.neg(two_y1),)))   # numerator of W
    fpoly = curve.rhs_poly()

    def pair_mul(p, q):
        n0 = p[0] * q[0] + (p[1] * q[1]) * fpoly
        n1 = p[0] * q[1] + p[1] * q[0]
        return (n0, n1)

    if f.is_zero():
        return CurveFunction.make(curve, x1, Poly(K, ()), Poly(K, ()), 0)
    e_common = max(2 * (i + l) for (i, j, l) in f.terms)
    tot0, tot1 = Poly(K, ()), Poly(K, ())
    lin = Poly(K, (K.neg(x1), 1))
    for (i, j, l), c in f.terms.items():
        term = (Poly(K, (c,)), Poly(K, ()))
        for _ in range(i):
            term = pair_mul(term, NU)
        for _ in range(l):
            term = pair_mul(term, NW)
        for _ in range(j):
            term = (term[0].shift(1), term[1].shift(1))
        pad = e_common - 2 * (i + l)
        for _ in range(pad):
            term = (term[0] * lin, term[1] * lin)
        tot0 = tot0 + term[0]
        tot1 = tot1 + term[1]
    return CurveFunction.make(curve, x1, tot0, tot1, e_common)
