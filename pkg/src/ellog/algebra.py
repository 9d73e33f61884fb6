"""Finite field towers and univariate polynomial arithmetic.

Two levels are supported: a base field F_q = F_p[w]/(modulus) with q = p^m,
and one extension F_q[X]/(I) on top of it.  Base field elements are stored as
integer codes in [0, q): the code is the base-p expansion of the coefficient
vector, low degree first.  This keeps polynomial inner loops allocation-free;
the `FieldElem` wrapper exists for call sites that prefer operators.

The canonical text encoding of an element is its comma-separated base-p digit
vector, low degree first (e.g. "3,0,1"), and is used verbatim by every
persistence format in the package.
"""

from __future__ import annotations

import random
from dataclasses import dataclass


DESK_Q_CAP = 1 << 20
_TABLE_Q_CAP = 1 << 10  # precompute add/mul tables below this size


class NotPrime(ValueError):
    pass


class CharTooSmall(ValueError):
    pass


class Reducible(ValueError):
    pass


class ZeroPolynomial(ValueError):
    pass


def is_probable_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for the word-sized integers we handle."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class FieldDesc:
    """Description of F_q = F_p[w]/(modulus), q = p^m, with code arithmetic.

    Element codes are integers 0..q-1; code(sum d_i w^i) = sum d_i p^i.
    All arithmetic methods act on codes.  Instances are immutable and safe
    to share across threads.
    """

    __slots__ = ("p", "m", "q", "modulus", "_mul_table", "_add_table",
                 "_neg_table", "_inv_table", "_frob_p_table")

    def __init__(self, p: int, m: int, modulus: tuple[int, ...]):
        if not is_probable_prime(p):
            raise NotPrime(f"{p} is not prime")
        if p < 5:
            raise CharTooSmall(f"characteristic {p} < 5 unsupported")
        if m < 1:
            raise ValueError("extension degree must be >= 1")
        q = p ** m
        if q > DESK_Q_CAP:
            raise ValueError(f"q = {q} exceeds desk-scale cap 2^20")
        if len(modulus) != m + 1 or modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree m")
        self.p = p
        self.m = m
        self.q = q
        self.modulus = tuple(c % p for c in modulus)
        self._mul_table = None
        self._add_table = None
        self._neg_table = None
        self._inv_table = None
        self._frob_p_table = None
        if m > 1 and not _is_irreducible_mod_p(self.modulus, p):
            raise Reducible("field modulus is reducible")
        if q <= _TABLE_Q_CAP:
            self._build_tables()

    # -- code <-> vector <-> text -------------------------------------

    def vec(self, code: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.m):
            out.append(code % self.p)
            code //= self.p
        return tuple(out)

    def code(self, vec) -> int:
        c = 0
        for d in reversed(list(vec)):
            c = c * self.p + (d % self.p)
        return c

    def enc(self, code: int) -> str:
        return ",".join(str(d) for d in self.vec(code))

    def dec(self, text: str) -> int:
        digits = [int(t) for t in text.split(",")]
        if len(digits) != self.m:
            raise ValueError(f"expected {self.m} digits, got {text!r}")
        return self.code(digits)

    # -- arithmetic on codes ------------------------------------------

    def _build_tables(self):
        q = self.q
        add = [[0] * q for _ in range(q)]
        mul = [[0] * q for _ in range(q)]
        for a in range(q):
            va = self.vec(a)
            for b in range(a, q):
                vb = self.vec(b)
                s = self.code((x + y) % self.p for x, y in zip(va, vb))
                add[a][b] = s
                add[b][a] = s
                pr = self._mul_slow(a, b)
                mul[a][b] = pr
                mul[b][a] = pr
        self._add_table = add
        self._mul_table = mul
        self._neg_table = [self._sub_slow(0, a) for a in range(q)]
        inv = [0] * q
        for a in range(1, q):
            inv[a] = self._pow_slow(a, q - 2)
        self._inv_table = inv

    def _mul_slow(self, a: int, b: int) -> int:
        if self.m == 1:
            return a * b % self.p
        va, vb = self.vec(a), self.vec(b)
        prod = [0] * (2 * self.m - 1)
        for i, x in enumerate(va):
            if x:
                for j, y in enumerate(vb):
                    prod[i + j] = (prod[i + j] + x * y) % self.p
        # reduce by the monic modulus
        for i in range(len(prod) - 1, self.m - 1, -1):
            c = prod[i]
            if c:
                prod[i] = 0
                for j in range(self.m):
                    prod[i - self.m + j] = (prod[i - self.m + j] - c * self.modulus[j]) % self.p
        return self.code(prod[: self.m])

    def _sub_slow(self, a: int, b: int) -> int:
        va, vb = self.vec(a), self.vec(b)
        return self.code((x - y) % self.p for x, y in zip(va, vb))

    def _pow_slow(self, a: int, e: int) -> int:
        r = 1
        while e:
            if e & 1:
                r = self._mul_slow(r, a)
            a = self._mul_slow(a, a)
            e >>= 1
        return r

    def add(self, a: int, b: int) -> int:
        if self._add_table is not None:
            return self._add_table[a][b]
        if self.m == 1:
            return (a + b) % self.p
        return self.code((x + y) % self.p for x, y in zip(self.vec(a), self.vec(b)))

    def sub(self, a: int, b: int) -> int:
        if self._add_table is not None:
            return self._add_table[a][self._neg_table[b]]
        if self.m == 1:
            return (a - b) % self.p
        return self._sub_slow(a, b)

    def neg(self, a: int) -> int:
        if self._neg_table is not None:
            return self._neg_table[a]
        if self.m == 1:
            return -a % self.p
        return self._sub_slow(0, a)

    def mul(self, a: int, b: int) -> int:
        if self._mul_table is not None:
            return self._mul_table[a][b]
        if self.m == 1:
            return a * b % self.p
        return self._mul_slow(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero field element")
        if self._inv_table is not None:
            return self._inv_table[a]
        if self.m == 1:
            return pow(a, self.p - 2, self.p)
        return self._pow_slow(a, self.q - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow_(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("negative power of zero")
            return 1 if e == 0 else 0
        e %= self.q - 1
        if self.m == 1:
            return pow(a, e, self.p)
        return self._pow_slow(a, e)

    def embed(self, base_code: int) -> int:
        return base_code

    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return 1

    def rand(self, rng: random.Random) -> int:
        return rng.randrange(self.q)

    def is_square(self, a: int) -> bool:
        if a == 0:
            return True
        return self.pow_(a, (self.q - 1) // 2) == 1

    def sqrt(self, a: int) -> int:
        """A square root of a, or raise ValueError if a is a non-residue."""
        return _tonelli_shanks(self, a, self.q)

    def elem(self, code: int) -> "FieldElem":
        return FieldElem(self, code)

    def __repr__(self):
        return f"GF({self.p}^{self.m})" if self.m > 1 else f"GF({self.p})"

    def __eq__(self, other):
        return (isinstance(other, FieldDesc) and self.p == other.p
                and self.m == other.m and self.modulus == other.modulus)

    def __hash__(self):
        return hash((self.p, self.m, self.modulus))

    # pickling support for the harvest worker pool
    def __reduce__(self):
        return (FieldDesc, (self.p, self.m, self.modulus))


@dataclass(frozen=True)
class FieldElem:
    """Operator-friendly wrapper around a field code."""

    field: FieldDesc
    code: int

    def _lift(self, other) -> int:
        if isinstance(other, FieldElem):
            if other.field != self.field:
                raise ValueError("field mismatch")
            return other.code
        return other % self.field.p

    def __add__(self, other):
        return FieldElem(self.field, self.field.add(self.code, self._lift(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElem(self.field, self.field.sub(self.code, self._lift(other)))

    def __rsub__(self, other):
        return FieldElem(self.field, self.field.sub(self._lift(other), self.code))

    def __mul__(self, other):
        return FieldElem(self.field, self.field.mul(self.code, self._lift(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FieldElem(self.field, self.field.div(self.code, self._lift(other)))

    def __neg__(self):
        return FieldElem(self.field, self.field.neg(self.code))

    def __pow__(self, e: int):
        return FieldElem(self.field, self.field.pow_(self.code, e))

    def __bool__(self):
        return self.code != 0

    def encode(self) -> str:
        return self.field.enc(self.code)

    def __repr__(self):
        return f"<{self.field.enc(self.code)}>"


# ---------------------------------------------------------------------------
# polynomials over F_p (for modulus search) and over a FieldDesc
# ---------------------------------------------------------------------------

def _is_irreducible_mod_p(coeffs: tuple[int, ...], p: int) -> bool:
    f = Poly(_prime_field(p), coeffs)
    return poly_is_irreducible(f)


_PRIME_FIELD_CACHE: dict[int, FieldDesc] = {}


def _prime_field(p: int) -> FieldDesc:
    fd = _PRIME_FIELD_CACHE.get(p)
    if fd is None:
        fd = FieldDesc(p, 1, (0, 1))
        _PRIME_FIELD_CACHE[p] = fd
    return fd


DEG_ZERO = -1  # degree sentinel for the zero polynomial


class Poly:
    """Univariate polynomial over a FieldDesc, coefficients low degree first.

    Immutable; no trailing zero coefficients are stored, and the zero
    polynomial has empty coefficients with degree() == DEG_ZERO.
    """

    __slots__ = ("field", "coeffs")

    def __init__(self, field: FieldDesc, coeffs):
        cs = list(coeffs)
        while cs and cs[-1] == 0:
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    def degree(self) -> int:
        return len(self.coeffs) - 1 if self.coeffs else DEG_ZERO

    def is_zero(self) -> bool:
        return not self.coeffs

    def lead(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def __eq__(self, other):
        return (isinstance(other, Poly) and self.field == other.field
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.field, self.coeffs))

    def __add__(self, other):
        K = self.field
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = K.add(out[i], c)
        return Poly(K, out)

    def __sub__(self, other):
        K = self.field
        n = max(len(self.coeffs), len(other.coeffs))
        out = []
        for i in range(n):
            x = self.coeffs[i] if i < len(self.coeffs) else 0
            y = other.coeffs[i] if i < len(other.coeffs) else 0
            out.append(K.sub(x, y))
        return Poly(K, out)

    def __neg__(self):
        K = self.field
        return Poly(K, [K.neg(c) for c in self.coeffs])

    def __mul__(self, other):
        K = self.field
        if isinstance(other, int):
            return Poly(K, [K.mul(c, other % K.q if other >= 0 else K.neg((-other) % K.q)) for c in self.coeffs])
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly(K, ())
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                row = out
                for j, y in enumerate(b):
                    if y:
                        row[i + j] = K.add(row[i + j], K.mul(x, y))
        return Poly(K, out)

    def scale(self, c: int) -> "Poly":
        K = self.field
        if c == 0:
            return Poly(K, ())
        return Poly(K, [K.mul(x, c) for x in self.coeffs])

    def shift(self, n: int) -> "Poly":
        """Multiply by X^n."""
        if self.is_zero():
            return self
        return Poly(self.field, (0,) * n + self.coeffs)

    def monic(self) -> "Poly":
        if self.is_zero() or self.coeffs[-1] == 1:
            return self
        return self.scale(self.field.inv(self.coeffs[-1]))

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        K = self.field
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        db, lb = other.degree(), other.lead()
        inv_lb = K.inv(lb)
        if len(rem) <= db:
            return Poly(K, ()), self
        quot = [0] * (len(rem) - db)
        for i in range(len(rem) - 1, db - 1, -1):
            c = rem[i]
            if c:
                f = K.mul(c, inv_lb)
                quot[i - db] = f
                for j in range(db + 1):
                    rem[i - db + j] = K.sub(rem[i - db + j], K.mul(f, other.coeffs[j]))
        return Poly(K, quot), Poly(K, rem)

    def __mod__(self, other):
        return self.divmod(other)[1]

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def gcd(self, other: "Poly") -> "Poly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic() if not a.is_zero() else a

    def eval_code(self, x: int) -> int:
        K = self.field
        acc = 0
        for c in reversed(self.coeffs):
            acc = K.add(K.mul(acc, x), c)
        return acc

    def eval_in(self, dom, x):
        """Horner evaluation in any domain exposing embed/add/mul."""
        acc = dom.zero
        for c in reversed(self.coeffs):
            acc = dom.add(dom.mul(acc, x), dom.embed(c))
        return acc

    def derivative(self) -> "Poly":
        K = self.field
        out = []
        for i, c in enumerate(self.coeffs[1:], start=1):
            out.append(K.mul(c, i % K.p))
        return Poly(K, out)

    def powmod(self, e: int, mod: "Poly") -> "Poly":
        r = Poly(self.field, (1,))
        base = self % mod
        while e:
            if e & 1:
                r = (r * base) % mod
            base = (base * base) % mod
            e >>= 1
        return r

    def encode(self) -> str:
        K = self.field
        return ";".join(K.enc(c) for c in self.coeffs)

    @staticmethod
    def decode(field: FieldDesc, text: str) -> "Poly":
        if not text:
            return Poly(field, ())
        return Poly(field, [field.dec(t) for t in text.split(";")])

    def __repr__(self):
        if self.is_zero():
            return "Poly(0)"
        return "Poly[" + " ".join(self.field.enc(c) for c in self.coeffs) + "]"


def poly_ext_gcd(a: Poly, b: Poly) -> tuple[Poly, Poly, Poly]:
    """(g, s, t) with s*a + t*b = g, g monic (or zero)."""
    K = a.field
    r0, r1 = a, b
    s0, s1 = Poly(K, (1,)), Poly(K, ())
    t0, t1 = Poly(K, ()), Poly(K, (1,))
    while not r1.is_zero():
        q, r = r0.divmod(r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0.is_zero():
        return r0, s0, t0
    lc = r0.lead()
    ic = K.inv(lc)
    return r0.scale(ic), s0.scale(ic), t0.scale(ic)


def poly_is_irreducible(f: Poly) -> bool:
    """Rabin's test: X^(q^n) = X mod f and gcd conditions at maximal subfields."""
    n = f.degree()
    if n <= 0:
        return False
    if n == 1:
        return True
    K = f.field
    x = Poly(K, (0, 1))
    # distinct prime divisors of n
    primes, t = [], n
    d = 2
    while d * d <= t:
        if t % d == 0:
            primes.append(d)
            while t % d == 0:
                t //= d
        d += 1
    if t > 1:
        primes.append(t)
    for ell in primes:
        h = x.powmod(K.q ** (n // ell), f) - x
        if f.gcd(h).degree() != 0:
            return False
    return x.powmod(K.q ** n, f) == x


def field_make(p: int, m: int, seed: int = 0) -> FieldDesc:
    """Build F_{p^m} with a deterministic seeded modulus search.

    For m = 1 the modulus is X.  Otherwise monic degree-m polynomials are
    drawn from a seeded stream and the first irreducible one wins, so a fixed
    seed reproduces the same field.
    """
    if not is_probable_prime(p):
        raise NotPrime(f"{p} is not prime")
    if p < 5:
        raise CharTooSmall(f"characteristic {p} < 5 unsupported")
    if m == 1:
        return _prime_field(p)
    prime = _prime_field(p)
    rng = random.Random(1_000_003 * seed + 7 * p + m)
    while True:
        coeffs = [rng.randrange(p) for _ in range(m)] + [1]
        if poly_is_irreducible(Poly(prime, coeffs)):
            return FieldDesc(p, m, tuple(coeffs))


# ---------------------------------------------------------------------------
# factorization (squarefree / distinct-degree / equal-degree)
# ---------------------------------------------------------------------------

def _pth_root_code(K: FieldDesc, c: int) -> int:
    # c^(p^(m-1)) inverts the p-power map on F_{p^m}
    return K.pow_(c, K.p ** (K.m - 1))


def _squarefree_parts(f: Poly) -> list[tuple[Poly, int]]:
    """[(g_i, e_i)] with f = lc * prod g_i^e_i, g_i squarefree monic, pairwise coprime."""
    K = f.field
    f = f.monic()
    out: list[tuple[Poly, int]] = []

    def rec(g: Poly, mult: int):
        if g.degree() <= 0:
            return
        gp = g.derivative()
        if gp.is_zero():
            # g = h(X^p); take p-th root of coefficients
            root = Poly(K, [_pth_root_code(K, c) for c in g.coeffs[:: K.p]])
            rec(root, mult * K.p)
            return
        c = g.gcd(gp)
        w = (g // c).monic()
        i = 1
        while w.degree() > 0:
            y = w.gcd(c)
            part = (w // y).monic()
            if part.degree() > 0:
                out.append((part, mult * i))
            w = y
            c = (c // y).monic()
            i += 1
        if c.degree() > 0:
            rec(c, mult)

    rec(f, 1)
    return out


def _distinct_degree(f: Poly) -> list[tuple[Poly, int]]:
    """Split a squarefree monic f into [(product of irreducibles of degree d, d)]."""
    K = f.field
    out = []
    x = Poly(K, (0, 1))
    h = x
    rest = f
    d = 0
    while rest.degree() > 0:
        d += 1
        if 2 * d > rest.degree():
            out.append((rest, rest.degree()))
            break
        h = h.powmod(K.q, rest)
        g = rest.gcd(h - x)
        if g.degree() > 0:
            out.append((g, d))
            rest = (rest // g).monic()
            h = h % rest
    return out


def _equal_degree(f: Poly, d: int, rng: random.Random) -> list[Poly]:
    """Cantor-Zassenhaus split of a product of degree-d irreducibles (odd q)."""
    K = f.field
    n = f.degree()
    if n == d:
        return [f]
    exp = (K.q ** d - 1) // 2
    while True:
        r = Poly(K, [rng.randrange(K.q) for _ in range(n)])
        if r.degree() < 1:
            continue
        g = f.gcd(r)
        if 0 < g.degree() < n:
            break
        h = r.powmod(exp, f) - Poly(K, (1,))
        g = f.gcd(h)
        if 0 < g.degree() < n:
            break
    left = _equal_degree(g.monic(), d, rng)
    right = _equal_degree((f // g).monic(), d, rng)
    return left + right


def poly_factor(f: Poly) -> list[tuple[Poly, int]]:
    """Full factorization into monic irreducibles with multiplicities.

    Deterministic: the equal-degree randomness is seeded from the input, and
    the result is sorted by (degree, coefficient codes).
    """
    if f.is_zero():
        raise ZeroPolynomial("cannot factor the zero polynomial")
    if f.degree() == 0:
        return []
    seed = 0
    for c in f.coeffs:
        seed = (seed * 1_000_003 + c + 1) & 0x7FFFFFFF
    rng = random.Random(seed ^ (f.field.q << 8))
    factors: dict[Poly, int] = {}
    for part, mult in _squarefree_parts(f):
        for prod, d in _distinct_degree(part):
            for irr in _equal_degree(prod, d, rng):
                key = irr.monic()
                factors[key] = factors.get(key, 0) + mult
    items = sorted(factors.items(), key=lambda kv: (kv[0].degree(), kv[0].coeffs))
    return items


def poly_random_monic(K: FieldDesc, degree: int, rng: random.Random) -> Poly:
    return Poly(K, [rng.randrange(K.q) for _ in range(degree)] + [1])


def poly_irreducibles(K: FieldDesc, degree: int) -> list[Poly]:
    """All monic irreducibles of the given degree, in coefficient order."""
    out = []
    for code in range(K.q ** degree):
        coeffs = []
        c = code
        for _ in range(degree):
            coeffs.append(c % K.q)
            c //= K.q
        coeffs.append(1)
        f = Poly(K, coeffs)
        if poly_is_irreducible(f):
            out.append(f)
    return out


# ---------------------------------------------------------------------------
# the extension F_{q^k} = F_q[X]/(I)
# ---------------------------------------------------------------------------

class ExtFieldDesc:
    """F_q[X]/(I) for monic irreducible I of degree k over the base.

    Elements are tuples of base codes of length k (low degree first).
    """

    __slots__ = ("base", "I", "k", "order_total", "_frob_pows")

    def __init__(self, base: FieldDesc, I: Poly, _trusted: bool = False):
        if not I.is_monic():
            raise Reducible("extension modulus must be monic")
        if not _trusted and not poly_is_irreducible(I):
            raise Reducible("extension modulus is reducible")
        self.base = base
        self.I = I
        self.k = I.degree()
        self.order_total = base.q ** self.k
        self._frob_pows = None

    # -- element helpers ----------------------------------------------

    @property
    def zero(self):
        return (0,) * self.k

    @property
    def one(self):
        return (1,) + (0,) * (self.k - 1)

    def embed(self, base_code: int):
        return (base_code,) + (0,) * (self.k - 1)

    def gen(self):
        """theta = X mod I (assumes k >= 2)."""
        return (0, 1) + (0,) * (self.k - 2)

    def from_poly(self, f: Poly):
        r = f % self.I
        cs = list(r.coeffs) + [0] * (self.k - len(r.coeffs))
        return tuple(cs)

    def to_poly(self, a) -> Poly:
        return Poly(self.base, a)

    def add(self, a, b):
        K = self.base
        return tuple(K.add(x, y) for x, y in zip(a, b))

    def sub(self, a, b):
        K = self.base
        return tuple(K.sub(x, y) for x, y in zip(a, b))

    def neg(self, a):
        K = self.base
        return tuple(K.neg(x) for x in a)

    def mul(self, a, b):
        K = self.base
        k = self.k
        prod = [0] * (2 * k - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] = K.add(prod[i + j], K.mul(x, y))
        I = self.I.coeffs
        for i in range(2 * k - 2, k - 1, -1):
            c = prod[i]
            if c:
                prod[i] = 0
                for j in range(k):
                    if I[j]:
                        prod[i - k + j] = K.sub(prod[i - k + j], K.mul(c, I[j]))
        return tuple(prod[:k])

    def inv(self, a):
        if not any(a):
            raise ZeroDivisionError("inverse of zero extension element")
        g, s, _ = poly_ext_gcd(self.to_poly(a), self.I)
        if g.degree() != 0:
            raise ZeroDivisionError("non-invertible element (reducible modulus?)")
        inv_c = self.base.inv(g.coeffs[0])
        return self.from_poly(s.scale(inv_c))

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow_(self, a, e: int):
        if e < 0:
            return self.pow_(self.inv(a), -e)
        r = self.one
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r

    def eq(self, a, b) -> bool:
        return tuple(a) == tuple(b)

    def rand(self, rng: random.Random):
        return tuple(rng.randrange(self.base.q) for _ in range(self.k))

    def is_base(self, a) -> bool:
        return not any(a[1:])

    def frobenius(self, a, times: int = 1):
        """a^(q^times) via the cached q-power basis images."""
        times %= self.k
        if times == 0:
            return tuple(a)
        if self._frob_pows is None:
            x_q = Poly(self.base, (0, 1)).powmod(self.base.q, self.I)
            pows = [self.one, self.from_poly(x_q)]
            for _ in range(2, self.k):
                pows.append(self.mul(pows[-1], pows[1]))
            self._frob_pows = pows
        out = self.zero
        cur = a
        for _ in range(times):
            acc = self.zero
            for i, c in enumerate(cur):
                if c:
                    acc = self.add(acc, tuple(self.base.mul(c, y) for y in self._frob_pows[i]))
            cur = acc
        out = cur
        return out

    def frobenius_pow(self, a, times: int = 1):
        """Same map computed by plain exponentiation (independent path)."""
        return self.pow_(a, self.base.q ** (times % self.k))

    def sqrt(self, a):
        return _tonelli_shanks(self, a, self.order_total)

    def is_square(self, a) -> bool:
        if not any(a):
            return True
        return self.eq(self.pow_(a, (self.order_total - 1) // 2), self.one)

    def enc(self, a) -> str:
        return ";".join(self.base.enc(c) for c in a)

    def dec(self, text: str):
        parts = text.split(";")
        if len(parts) != self.k:
            raise ValueError("bad extension element encoding")
        return tuple(self.base.dec(t) for t in parts)

    def __eq__(self, other):
        return (isinstance(other, ExtFieldDesc) and self.base == other.base
                and self.I == other.I)

    def __hash__(self):
        return hash((self.base, self.I))

    def __repr__(self):
        return f"GF({self.base.q}^{self.k})"

    def __reduce__(self):
        return (_rebuild_ext, (self.base, self.I.coeffs))


def _rebuild_ext(base, icoeffs):
    return ExtFieldDesc(base, Poly(base, icoeffs), _trusted=True)


def ext_make(base: FieldDesc, I: Poly) -> ExtFieldDesc:
    """Wrap F_q[X]/(I); irreducibility is rechecked and Reducible raised if bad."""
    return ExtFieldDesc(base, I)


def frobenius(x, times: int = 1):
    """x^(q^times) for a FieldElem (identity) or (ext, element) pair."""
    if isinstance(x, FieldElem):
        return x
    if isinstance(x, tuple) and len(x) == 2 and isinstance(x[0], ExtFieldDesc):
        ext, a = x
        return (ext, ext.frobenius(a, times))
    raise TypeError("frobenius expects a FieldElem or (ExtFieldDesc, element)")


def _tonelli_shanks(dom, a, order: int):
    """Square root in a cyclic multiplicative group of the given odd-char field."""
    if dom.eq(a, dom.zero) if hasattr(dom, "eq") else a == 0:
        return a
    one = dom.one
    n1 = order - 1
    legendre = dom.pow_(a, n1 // 2)
    eq = dom.eq if hasattr(dom, "eq") else (lambda u, v: u == v)
    if not eq(legendre, one):
        raise ValueError("element is not a square")
    s, m = n1, 0
    while s % 2 == 0:
        s //= 2
        m += 1
    if m == 1:
        return dom.pow_(a, (order + 1) // 4)
    rng = random.Random(0xE11)
    while True:
        z = dom.rand(rng)
        if eq(z, dom.zero) if hasattr(dom, "eq") else z == 0:
            continue
        if not eq(dom.pow_(z, n1 // 2), one):
            break
    c = dom.pow_(z, s)
    t = dom.pow_(a, s)
    r = dom.pow_(a, (s + 1) // 2)
    while not eq(t, one):
        i, tt = 0, t
        while not eq(tt, one):
            tt = dom.mul(tt, tt)
            i += 1
        b = c
        for _ in range(m - i - 1):
            b = dom.mul(b, b)
        m = i
        c = dom.mul(b, b)
        t = dom.mul(t, c)
        r = dom.mul(r, b)
    return r
