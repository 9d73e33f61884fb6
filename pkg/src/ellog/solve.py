"""Linear algebra modulo the prime factors of M, log assembly, descent, and
independently checked individual logarithms.

Logs are stored relative to a reference class r: the kernel vector of the
relation matrix is normalized so the reference column equals 1, making
every stored value log_r of the column's class.  Individual logarithms
base g then come out as a ratio of two log_r values, so the normalization
cancels; the final exponent is always re-verified by exponentiation.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field as dc_field

from .algebra import Poly, poly_factor
from .curve import CurveFunction, TriPoly, phi
from .divisor import Divisor, Place, PlaceAlgebra, divisor_of
from .harvest import C_COLUMN, FactorBase, Relation
from .linalg import (InconsistentSystem, MoreRelationsNeeded, kernel_mod_prime,
                     kernel_mod_prime_power)
from .psi import PsiValue, psi_elementary, translation_constant


class FactorizationTimeout(RuntimeError):
    pass


class BudgetExhausted(RuntimeError):
    pass


class NoSolutionInBudget(RuntimeError):
    pass


class DescentFailed(RuntimeError):
    pass


class NotInSubgroup(ValueError):
    pass


# ---------------------------------------------------------------------------
# integer factorization (desk scale)
# ---------------------------------------------------------------------------

def _is_prime(n: int) -> bool:
    from .algebra import is_probable_prime
    return is_probable_prime(n)


def _pollard_rho_factor(n: int, rng: random.Random, budget: int = 1_000_000) -> int:
    if n % 2 == 0:
        return 2
    while True:
        c = rng.randrange(1, n)
        x = y = rng.randrange(2, n)
        d = 1
        steps = 0
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
            steps += 1
            if steps > budget:
                raise FactorizationTimeout(f"rho stalled on {n}")
        if d != n:
            return d


def factor_modulus(M: int) -> list[tuple[int, int]]:
    """Full factorization, trial division to 10^6 then Pollard rho."""
    if M < 2:
        raise ValueError("modulus must be at least 2")
    out: dict[int, int] = {}
    n = M
    for p in range(2, 1_000_000):
        if p * p > n:
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    rng = random.Random(0xFAC7)
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if _is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        d = _pollard_rho_factor(m, rng)
        stack.extend([d, m // d])
    return sorted(out.items())


# ---------------------------------------------------------------------------
# group oracles
# ---------------------------------------------------------------------------

def bsgs_oracle(h, g, n: int):
    """Baby-step giant-step discrete log of h base g in a group of order n.

    Accepts PsiValue pairs or (ext, code) pairs; returns the log in [0, n)
    or raises NotInSubgroup.  Memory is O(sqrt(n)): desk scale only.
    """
    if n > 10_000_000_000:
        raise ValueError("group order beyond the desk-scale oracle cap")
    if isinstance(h, PsiValue):
        one = PsiValue(g.ext, g.ext.one)
        mul = PsiValue.mul
        key = lambda v: v.rep
    else:
        ext, _ = g
        one = (ext, ext.one)
        mul = lambda a, b: (ext, ext.mul(a[1], b[1]))
        key = lambda v: v[1]
    m = math.isqrt(n) + 1
    table = {}
    cur = one
    for j in range(m):
        table.setdefault(key(cur), j)
        cur = mul(cur, g)
    giant = _pow_elem(g, (n - m) % n, mul, one)
    y = h
    for i in range(m):
        j = table.get(key(y))
        if j is not None:
            return (i * m + j) % n
        y = mul(y, giant)
    raise NotInSubgroup("element outside the subgroup generated by g")


def _pow_elem(g, e, mul, one):
    r = one
    b = g
    while e:
        if e & 1:
            r = mul(r, b)
        b = mul(b, b)
        e >>= 1
    return r


def pollard_rho_dlog(h: PsiValue, g: PsiValue, ell: int, seed: int = 0):
    """Pollard rho in the order-ell subgroup (g of order ell, h in <g>)."""
    one = PsiValue(g.ext, g.ext.one)
    rng = random.Random(seed)
    for _ in range(64):
        a0, b0 = rng.randrange(ell), rng.randrange(ell)

        def step(state):
            x, a, b = state
            sel = hash(x.rep) % 3
            if sel == 0:
                return x.mul(g), (a + 1) % ell, b
            if sel == 1:
                return x.mul(h), a, (b + 1) % ell
            return x.mul(x), (a * 2) % ell, (b * 2) % ell

        x = g.pow(a0).mul(h.pow(b0))
        slow = (x, a0, b0)
        fast = step(slow)
        for _ in range(8 * ell + 64):
            if slow[0] == fast[0]:
                break
            slow = step(slow)
            fast = step(step(fast))
        else:
            continue
        a1, b1, a2, b2 = slow[1], slow[2], fast[1], fast[2]
        db = (b1 - b2) % ell
        if db == 0:
            continue
        return (a2 - a1) * pow(db, -1, ell) % ell
    raise DescentFailed("rho failed to find a collision")


def find_generator(ext, seed: int = 0):
    """A generator of the multiplicative group of the extension field."""
    n = ext.order_total - 1
    primes = [p for p, _ in factor_modulus(n)]
    rng = random.Random(seed * 31 + 5)
    while True:
        g = ext.rand(rng)
        if not any(g):
            continue
        if all(not ext.eq(ext.pow_(g, n // p), ext.one) for p in primes):
            return g


# ---------------------------------------------------------------------------
# the core solve
# ---------------------------------------------------------------------------

def solve_mod(rows: list[dict[int, int]], ncols: int, ell: int, e: int = 1):
    """Kernel vector of the homogeneous system mod ell^e.

    Raises MoreRelationsNeeded when the mod-ell kernel dimension exceeds 1
    and InconsistentSystem when it is 0 (relations are homogeneous, so an
    empty kernel means the columns cannot all carry consistent logs).
    """
    basis_vecs = kernel_mod_prime(rows, ncols, ell)
    if len(basis_vecs) == 0:
        raise InconsistentSystem("homogeneous system with trivial kernel")
    if len(basis_vecs) > 1:
        raise MoreRelationsNeeded(f"kernel dimension {len(basis_vecs)} mod {ell}")
    if e == 1:
        return basis_vecs[0]
    vec = kernel_mod_prime_power(rows, ncols, ell, e)
    if vec is None:
        raise MoreRelationsNeeded(f"kernel lift failed mod {ell}^{e}")
    return vec


@dataclass
class LogTable:
    """Column logs relative to the reference class, per prime power and mod M."""

    ref_col: int
    per_prime: dict[int, list[int]]      # ell^e -> normalized kernel vector
    mod_m: dict[int, int] = dc_field(default_factory=dict)
    M: int = 0

    def log(self, col: int) -> int | None:
        return self.mod_m.get(col)


def column_class(fb: FactorBase, col: int, basis) -> PsiValue:
    if col == 0:
        return translation_constant(basis)
    return psi_elementary(fb.rep_of_col(col), basis)


def solve_core(basis, fb: FactorBase, relations: list[Relation],
               small_prime_bound: int = 10, seed: int = 0) -> LogTable:
    """Solve the height-<=3 system for every prime power dividing M.

    Primes up to small_prime_bound skip the matrix and read the logs off
    psi values directly (tiny subgroups); the rest go through the kernel.
    The reference column is chosen so its kernel coordinate is a unit in
    every factor and its class generates the full quotient group.
    """
    M = basis.M
    ncols = fb.columns()
    rows = [r.cols for r in relations] + [r.cols for r in fb.cycle_relations()]
    vectors: dict[int, list[int]] = {}
    small: list[tuple[int, int]] = []
    for ell, e in factor_modulus(M):
        if ell <= small_prime_bound:
            small.append((ell, e))
            continue
        vectors[ell ** e] = solve_mod(rows, ncols, ell, e)
    if small:
        gq = PsiValue(basis.ext, find_generator(basis.ext, seed))
        classes = [column_class(fb, c, basis) for c in range(ncols)]
        for ell, e in small:
            pe = ell ** e
            exp = M // pe
            gsub = gq.pow(exp)
            vec = [bsgs_oracle(cls.pow(exp), gsub, pe) for cls in classes]
            vectors[pe] = vec
    # reference column: unit everywhere, class generating the quotient
    prime_list = [ell for ell, _ in factor_modulus(M)]
    ref = None
    for col in range(ncols):
        if all(vec[col] % _ell_of(pe, prime_list) for pe, vec in vectors.items()):
            cls = column_class(fb, col, basis)
            if all(not cls.pow(M // ell).is_one() for ell in prime_list):
                ref = col
                break
    if ref is None:
        raise MoreRelationsNeeded("no column usable as a generating reference")
    per_prime = {}
    for pe, vec in vectors.items():
        inv = pow(vec[ref], -1, pe)
        per_prime[pe] = [(v * inv) % pe for v in vec]
    mod_m = {}
    for col in range(ncols):
        mod_m[col] = _crt([(per_prime[pe][col], pe) for pe in per_prime]) % M
    return LogTable(ref, per_prime, mod_m, M)


def _ell_of(pe: int, primes: list[int]) -> int:
    for p in primes:
        if pe % p == 0:
            return p
    raise AssertionError


def _crt(residues):
    x, m = 0, 1
    for r, mod in residues:
        g = pow(m, -1, mod)
        x = x + m * ((r - x) * g % mod)
        m *= mod
    return x % m


def verify_log_table(basis, fb: FactorBase, table: LogTable,
                     sample: int = 6, seed: int = 0) -> bool:
    """reference^log must reproduce each sampled column class."""
    rng = random.Random(seed)
    cols = sorted(table.mod_m)
    picks = cols if len(cols) <= sample else rng.sample(cols, sample)
    ref_cls = column_class(fb, table.ref_col, basis)
    for col in picks:
        if ref_cls.pow(table.mod_m[col]) != column_class(fb, col, basis):
            return False
    return True


# ---------------------------------------------------------------------------
# from field elements to factor-base logs
# ---------------------------------------------------------------------------

def poly_to_divisor(f: Poly, curve) -> Divisor:
    """Divisor of the function f(X) on the curve (degree 0)."""
    return divisor_of(CurveFunction.make(curve, 0, f, Poly(f.field, ()), 0), curve)


@dataclass
class LogContext:
    """Solved logs: factor-base columns plus individually descended places."""

    fb: FactorBase
    cols: dict[int, int]
    extra: dict[Place, int] = dc_field(default_factory=dict)

    def log_of_place(self, place: Place) -> int | None:
        M = self.fb.basis.M
        if place in self.fb.place_map:
            acc = 0
            for col, coef in self.fb.place_log_terms(place, 1):
                if col not in self.cols:
                    return None
                acc = (acc + coef * self.cols[col]) % M
            return acc
        return self.extra.get(place)

    def log_of_divisor(self, D: Divisor) -> int | None:
        M = self.fb.basis.M
        acc = 0
        for place, n in D.finite_places():
            v = self.log_of_place(place)
            if v is None:
                return None
            acc = (acc + n * v) % M
        return acc

    def missing_places(self, D: Divisor) -> list[Place]:
        return [p for p, _ in D.finite_places() if self.log_of_place(p) is None]


def log_of_poly_image(basis, ctx: LogContext, f: Poly, descender=None) -> int | None:
    """log_r of the class of f(theta) via the divisor of f(X)."""
    D = poly_to_divisor(f, basis.curve)
    val = ctx.log_of_divisor(D)
    if val is not None or descender is None:
        return val
    for p in ctx.missing_places(D):
        if not descender(p):
            return None
    return ctx.log_of_divisor(D)


@dataclass
class SplitResult:
    shift: int                     # w = z * g^shift was resolved
    num_factors: list[tuple[Poly, int]]
    den_factors: list[tuple[Poly, int]]
    log_r: int


def classical_split(z, basis, ctx: LogContext, g, log_r_g: int,
                    d0: int = 4, budget: int = 400,
                    seed: int = 0, descender=None) -> SplitResult:
    """Express the class of z through factor-base logs.

    Randomizes z by powers of g, lifts to a polynomial in theta, and either
    factors it directly or half-splits it into a quotient of two half-degree
    polynomials via the extended Euclidean algorithm; factors of degree up
    to d0 are accepted when their place logs resolve.
    """
    ext = basis.ext
    M = basis.M
    if ext.is_base(z):
        return SplitResult(0, [], [], 0)
    rng = random.Random(seed * 0x517CC1B7 + 11)
    n_full = ext.order_total - 1
    for _ in range(budget):
        shift = rng.randrange(n_full)
        w = ext.mul(z, ext.pow_(g, shift))
        W = ext.to_poly(w)
        if W.degree() < 1:
            continue
        direct = _resolve_factors(basis, ctx, W, d0, descender)
        if direct is not None:
            return SplitResult(shift, direct[1], [], (direct[0] - shift * log_r_g) % M)
        for num, den in _euclid_splits(W, ext.I, (basis.k - 1) // 2 + 1):
            rnum = _resolve_factors(basis, ctx, num, d0, descender)
            if rnum is None:
                continue
            rden = _resolve_factors(basis, ctx, den, d0, descender)
            if rden is None:
                continue
            log_val = (rnum[0] - rden[0] - shift * log_r_g) % M
            return SplitResult(shift, rnum[1], rden[1], log_val)
    raise BudgetExhausted("classical split budget exhausted")


def _resolve_factors(basis, ctx: LogContext, W: Poly, d0: int, descender):
    """(log_r of class W(theta), factors) or None."""
    M = basis.M
    total = 0
    factors = poly_factor(W)
    if any(f.degree() > d0 for f, _ in factors):
        return None
    out = []
    for f, mult in factors:
        v = log_of_poly_image(basis, ctx, f, descender)
        if v is None:
            return None
        total = (total + mult * v) % M
        out.append((f, mult))
    return total, out


def _euclid_splits(W: Poly, I: Poly, half: int):
    """(num, den) pairs with W = num/den mod I and deg num <= half-ish."""
    K = W.field
    r0, r1 = I, W % I
    t0, t1 = Poly(K, ()), Poly(K, (1,))
    out = []
    while not r1.is_zero():
        q, r = r0.divmod(r1)
        r0, r1 = r1, r
        t0, t1 = t1, t0 - q * t1
        if not r0.is_zero() and r0.degree() <= half and not t0.is_zero():
            out.append((r0, t0))
    return out


# ---------------------------------------------------------------------------
# bilinear descent
# ---------------------------------------------------------------------------

def _mono_list(t: int) -> list[tuple[int, int]]:
    """Exponent pairs of the monomial set M_t: U^i, V^i, U^i V, U V^i, i <= t."""
    out = set()
    for i in range(t + 1):
        out.update({(i, 0), (0, i), (i, 1), (1, i)})
    return sorted(out, key=lambda m: (m[0] + m[1], m[0]), reverse=True)


def _mono_value(alg, m, x, y):
    acc = alg.one
    for _ in range(m[0]):
        acc = alg.mul(acc, x)
    for _ in range(m[1]):
        acc = alg.mul(acc, y)
    return acc


def descent_free_counts(t_a: int, t_b: int, compelled: int = 0) -> tuple[int, int]:
    """Free coefficient counts in A and B after monic normalization.

    With no compelled points: A carries 4 t_a - 2 unknowns (head fixed to 1,
    B's head removed), B carries 4 t_b - 1, minus one more when the sets
    coincide; each compelled point removes one from each side.
    """
    na = 4 * t_a - 2 - compelled
    nb = 4 * t_b - 1 - (1 if t_a == t_b else 0) - compelled
    return na, nb


def bilinear_descend(basis, ctx: LogContext, target: Place,
                     t_a: int = 2, t_b: int = 2,
                     compelled: int = 0, budget: int = 200_000,
                     seed: int = 0, depth: int = 0, max_depth: int = 4,
                     stats: dict | None = None,
                     _active: frozenset = frozenset()):
    """Express log(target) through lower-degree places and record it in ctx.

    A ranges over its free coefficients; for each A the vanishing of the
    bracket at a conjugate point of the target imposes deg(target)
    F_q-linear conditions on B.  A surviving pair must have all other
    divisor places resolvable, recursing on stubborn ones of strictly
    smaller degree.  Raises NoSolutionInBudget when the space is exhausted.
    """
    M = basis.M
    K = basis.curve.field
    q = K.q
    deg = target.degree
    known = ctx.log_of_place(target)
    if known is not None:
        return known, None
    if depth > max_depth:
        raise DescentFailed("descent recursion too deep")
    if target in _active:
        raise DescentFailed("cyclic descent dependency")
    _active = _active | {target}
    alg = PlaceAlgebra(basis.curve, target)
    Q = alg.point()
    xu, xv, xw = phi(Q, basis.td)

    monos_a = _mono_list(t_a)
    monos_b = _mono_list(t_b)
    head_a, head_b = monos_a[0], monos_b[0]
    mu_b = [_mono_value(alg, m, xv, xw) for m in monos_b]   # m(V, W)
    nu_b = [_mono_value(alg, m, xu, xv) for m in monos_b]   # m(U, V)
    mu_a = [_mono_value(alg, m, xv, xw) for m in monos_a]
    nu_a = [_mono_value(alg, m, xu, xv) for m in monos_a]

    td = basis.td
    compelled_pts = [(td.xs[(j - 1) % td.k], td.xs[j % td.k])
                     for j in range(2, 2 + compelled)]

    free_a = [i for i, m in enumerate(monos_a) if m not in (head_a, head_b)]
    rng = random.Random(seed * 7919 + deg)
    for a_vec in _coef_stream(q, len(free_a) - len(compelled_pts), rng, budget):
        coeffs_a = _build_coeffs(K, monos_a, head_a, head_b, free_a, a_vec,
                                 compelled_pts)
        if coeffs_a is None:
            continue
        a1 = _combo(alg, mu_a, coeffs_a)
        a2 = _combo(alg, nu_a, coeffs_a)
        # bracket(A, B)(Phi Q) = a1 * B(U,V)(Q) - a2 * B(V,W)(Q), linear in B
        rows = [[0] * (len(monos_b) + 1) for _ in range(alg.dim)]
        for bi in range(len(monos_b)):
            col = alg.sub(alg.mul(a1, nu_b[bi]), alg.mul(a2, mu_b[bi]))
            for r, coord in enumerate(alg.coords(col)):
                rows[r][bi] = coord
        for (cx, cy) in compelled_pts:
            extra = [0] * (len(monos_b) + 1)
            for bi, m in enumerate(monos_b):
                extra[bi] = K.mul(K.pow_(cx, m[0]), K.pow_(cy, m[1]))
            rows.append(extra)
        bsol = _b_solutions(K, rows, monos_b, head_b, head_a if t_a == t_b else None)
        for coeffs_b in bsol:
            A = TriPoly(K, {(m[0], m[1], 0): c for m, c in zip(monos_a, coeffs_a) if c})
            B = TriPoly(K, {(m[0], m[1], 0): c for m, c in zip(monos_b, coeffs_b) if c})
            if A.is_zero() or B.is_zero() or A == B:
                continue
            from .harvest import pair_divisors, DegeneratePair
            try:
                pr = pair_divisors(basis, A, B)
            except DegeneratePair:
                continue
            n_target = pr.right_divisor.coeffs.get(target, 0)
            if n_target <= 0 or math.gcd(n_target, M) != 1:
                continue
            if stats is not None:
                stats["candidates"] = stats.get("candidates", 0) + 1
            total = pr.left_total() - pr.right_divisor
            ok = True
            for p in ctx.missing_places(total):
                if p == target:
                    continue
                if p.degree > 8 or p.degree > deg:
                    ok = False
                    break
                sub_compelled = 3 if p.degree <= 6 else 2
                try:
                    bilinear_descend(basis, ctx, p, t_a, t_b, sub_compelled,
                                     budget, seed, depth + 1, max_depth, stats,
                                     _active)
                except (NoSolutionInBudget, DescentFailed):
                    ok = False
                    break
                if ctx.log_of_place(p) is None:
                    ok = False
                    break
            if not ok:
                continue
            rest = 0
            gap = False
            for p, n in total.finite_places():
                if p == target:
                    continue
                v = ctx.log_of_place(p)
                if v is None:
                    gap = True
                    break
                rest = (rest + n * v) % M
            if gap:
                continue
            # total carries the target with coefficient -n_target, so
            # rest - n_target * log(target) = 0
            val = rest * pow(n_target, -1, M) % M
            _store_place_log(ctx, target, val)
            # the row covers the indexed columns; the target (and any other
            # unindexed place) contributes through its stored place log
            rel = Relation("descent", (deg, t_a, t_b, compelled, n_target),
                           _descent_row(ctx.fb, total))
            return val, rel
    raise NoSolutionInBudget(
        f"no usable (A, B) for the degree-{deg} target with t_a={t_a}, t_b={t_b}")


def _store_place_log(ctx: LogContext, place: Place, val: int):
    """Record a solved place; inside the base, solve its representative column."""
    fb = ctx.fb
    M = fb.basis.M
    q = fb.basis.q
    if place in fb.place_map:
        col, s, d = fb.place_map[place]
        if col == C_COLUMN or col in ctx.cols:
            return
        qs = pow(q, s, M)
        sig = ((q ** s - 1) // (q - 1)) % M
        rhs = (val - d * sig * ctx.cols[0]) % M
        ctx.cols[col] = rhs * pow(qs, -1, M) % M
    else:
        ctx.extra[place] = val


def _descent_row(fb: FactorBase, total: Divisor) -> dict[int, int]:
    row: dict[int, int] = {}
    M = fb.basis.M
    for place, n in total.finite_places():
        if place in fb.place_map:
            for col, coef in fb.place_log_terms(place, n):
                row[col] = (row.get(col, 0) + coef) % M
    return {c: v for c, v in row.items() if v}


def _coef_stream(q: int, nfree: int, rng: random.Random, budget: int):
    total = q ** nfree
    if total <= budget:
        idx = list(range(total))
        rng.shuffle(idx)
    else:
        idx = (rng.randrange(total) for _ in range(budget))
    for code in idx:
        vec = []
        c = code
        for _ in range(nfree):
            vec.append(c % q)
            c //= q
        yield vec


def _build_coeffs(K, monos, head, removed, free_idx, a_vec, compelled_pts):
    coeffs = [0] * len(monos)
    coeffs[monos.index(head)] = 1
    take = list(a_vec)
    ncomp = len(compelled_pts)
    enum_idx = free_idx[ncomp:] if ncomp else free_idx
    pin_idx = free_idx[:ncomp]
    for i, v in zip(enum_idx, take):
        coeffs[i] = v
    if ncomp:
        # solve the compelled vanishing rows for the pinned coefficients
        rows = []
        rhs = []
        for (cx, cy) in compelled_pts:
            row = []
            acc = 0
            for i, m in enumerate(monos):
                val = K.mul(K.pow_(cx, m[0]), K.pow_(cy, m[1]))
                if i in pin_idx:
                    row.append(val)
                else:
                    acc = K.add(acc, K.mul(val, coeffs[i]))
            rows.append(row)
            rhs.append(K.neg(acc))
        from .divisor import _gauss_solve
        sol = _gauss_solve(K, rows, rhs, len(pin_idx))
        if sol is None:
            return None
        for i, v in zip(pin_idx, sol):
            coeffs[i] = v
    return coeffs


def _combo(alg, values, coeffs):
    acc = alg.zero
    for v, c in zip(values, coeffs):
        if c:
            acc = alg.add(acc, _scale(alg, v, c))
    return acc


def _scale(alg, v, c):
    return alg.mul(alg.embed(c), v)


def _b_solutions(K, rows, monos_b, head_b, also_zero, cap: int = 64):
    """Points of the affine solution space for B: head = 1, optional zero slot.

    The space always contains the degenerate direction proportional to A, so
    several points are returned (particular solution plus nullspace
    offsets); the caller filters the useless ones.
    """
    n = len(monos_b)
    fixed = {monos_b.index(head_b): 1}
    if also_zero is not None and also_zero in monos_b and monos_b.index(also_zero) not in fixed:
        fixed[monos_b.index(also_zero)] = 0
    free_cols = [i for i in range(n) if i not in fixed]
    A = []
    b = []
    for row in rows:
        acc = 0
        for i, v in fixed.items():
            if v and row[i]:
                acc = K.add(acc, K.mul(row[i], v))
        A.append([row[i] for i in free_cols])
        b.append(K.neg(acc))
    sol, null_basis = _gauss_solve_with_nullspace(K, A, b, len(free_cols))
    if sol is None:
        return []

    def assemble(vec):
        coeffs = [0] * n
        for i, v in fixed.items():
            coeffs[i] = v
        for i, v in zip(free_cols, vec):
            coeffs[i] = v
        return coeffs

    out = [assemble(sol)]
    count = 1
    for nb in null_basis:
        for lam in range(1, K.q):
            if count >= cap:
                return out
            vec = [K.add(s, K.mul(lam, w)) for s, w in zip(sol, nb)]
            out.append(assemble(vec))
            count += 1
    if len(null_basis) >= 2:
        n1, n2 = null_basis[0], null_basis[1]
        for l1 in range(1, K.q):
            for l2 in range(1, K.q):
                if count >= cap:
                    return out
                vec = [K.add(s, K.add(K.mul(l1, w1), K.mul(l2, w2)))
                       for s, w1, w2 in zip(sol, n1, n2)]
                out.append(assemble(vec))
                count += 1
    return out


def _gauss_solve_with_nullspace(K, A, b, ncols):
    """(particular solution, nullspace basis) over F_q, or (None, [])."""
    rows = [list(r) + [bv] for r, bv in zip(A, b)]
    piv_cols = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(rows)):
            if rows[i][c]:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = K.inv(rows[r][c])
        rows[r] = [K.mul(x, inv) for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [K.sub(x, K.mul(f, y)) for x, y in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
        if r == len(rows):
            break
    for i in range(r, len(rows)):
        if rows[i][ncols]:
            return None, []
    sol = [0] * ncols
    for i, c in enumerate(piv_cols):
        sol[c] = rows[i][ncols]
    piv_set = set(piv_cols)
    null_basis = []
    for fc in range(ncols):
        if fc in piv_set:
            continue
        vec = [0] * ncols
        vec[fc] = 1
        for i, pc in enumerate(piv_cols):
            vec[pc] = K.neg(rows[i][fc])
        null_basis.append(vec)
    return sol, null_basis


# ---------------------------------------------------------------------------
# individual logarithms
# ---------------------------------------------------------------------------

@dataclass
class DlogResult:
    x_mod_m: int
    x_full: int | None
    verified: bool
    attempts: int


def _make_descender(basis, ctx: LogContext, params):
    t_a, t_b = params.get("t_a", 2), params.get("t_b", 2)

    def descender(place: Place) -> bool:
        if ctx.log_of_place(place) is not None:
            return True
        deg = place.degree
        if deg < 4 or deg > 8:
            return False
        compelled = 3 if deg <= 6 else 2
        try:
            bilinear_descend(basis, ctx, place, t_a, t_b, compelled,
                             seed=params.get("seed", 0))
            return ctx.log_of_place(place) is not None
        except (NoSolutionInBudget, DescentFailed):
            return False

    return descender


def log_r_of_generator(basis, ctx: LogContext, g,
                       d0: int = 4, seed: int = 0, descender=None) -> int:
    """log_r(class of g) via splits of g^(1+r'') with 1+r'' invertible mod M."""
    ext = basis.ext
    M = basis.M
    rng = random.Random(seed * 131 + 1)
    for _ in range(400):
        rr = rng.randrange(M)
        if math.gcd(1 + rr, M) != 1:
            continue
        w = ext.pow_(g, 1 + rr)
        W = ext.to_poly(w)
        if W.degree() < 1:
            continue
        got = _resolve_factors(basis, ctx, W, d0, descender)
        if got is not None:
            return got[0] * pow(1 + rr, -1, M) % M
        for num, den in _euclid_splits(W, ext.I, (basis.k - 1) // 2 + 1):
            rn = _resolve_factors(basis, ctx, num, d0, descender)
            if rn is None:
                continue
            rd = _resolve_factors(basis, ctx, den, d0, descender)
            if rd is None:
                continue
            return (rn[0] - rd[0]) * pow(1 + rr, -1, M) % M
    raise BudgetExhausted("could not anchor the generator log")


def dlog(z, g, basis, fb: FactorBase, logs: dict[int, int],
         d0: int = 4, seed: int = 0, budget: int = 400,
         with_full: bool = True, allow_descent: bool = True,
         ctx: LogContext | None = None) -> DlogResult:
    """log_g(z) mod M, plus the full exponent when requested.

    The mod-M part is the ratio of two reference-based logs, so it never
    depends on the normalization; it is always checked by verifying that
    z / g^x lands in F_q^*.  The remaining F_q^* component comes from a
    baby-step giant-step in the subgroup generated by g^M.
    """
    ext = basis.ext
    M = basis.M
    if ctx is None:
        ctx = LogContext(fb, logs)
    descender = _make_descender(basis, ctx, {"seed": seed}) if allow_descent else None
    lg = log_r_of_generator(basis, ctx, g, d0, seed, descender)
    if math.gcd(lg, M) != 1:
        raise DescentFailed("generator log is not invertible mod M; is g primitive?")
    split = classical_split(z, basis, ctx, g, lg, d0, budget, seed, descender)
    x = split.log_r * pow(lg, -1, M) % M
    # soundness gate: z * g^(-x) must be a base-field element
    resid = ext.mul(z, ext.pow_(g, (-x) % (ext.order_total - 1)))
    verified = ext.is_base(resid)
    x_full = None
    if verified and with_full:
        eta = ext.pow_(g, M)
        y = bsgs_oracle((ext, resid), (ext, eta), basis.curve.field.q - 1)
        x_full = (x + M * y) % (ext.order_total - 1)
        if not ext.eq(ext.pow_(g, x_full), z):
            verified = False
    return DlogResult(x, x_full, verified, split.shift)


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------

def write_logs(path: str, basis, fb: FactorBase, table: LogTable,
               extended: dict[int, int] | None = None):
    K = basis.curve.field
    lines = [f"# logs {fb.fingerprint()}", f"# reference-col {table.ref_col}"]
    for pe in sorted(table.per_prime):
        lines.append(f"[mod {pe}]")
        vec = table.per_prime[pe]
        for col, val in enumerate(vec):
            lines.append(f"{_col_name(fb, col, K)} = {val}")
    lines.append(f"[mod M {table.M}]")
    merged = dict(table.mod_m)
    if extended:
        merged.update(extended)
    for col in sorted(merged):
        lines.append(f"{_col_name(fb, col, K)} = {merged[col]}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _col_name(fb: FactorBase, col: int, K) -> str:
    if col == 0:
        return "c"
    return fb.rep_of_col(col).encode(K)


def read_logs(path: str, basis, fb: FactorBase) -> tuple[LogTable, dict[int, int]]:
    K = basis.curve.field
    name_to_col = {fb.reps[i].encode(K): i + 1 for i in range(len(fb.reps))}
    name_to_col["c"] = 0
    per_prime: dict[int, list[int]] = {}
    mod_m: dict[int, int] = {}
    ref_col = None
    section = None
    M = 0
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("# reference-col"):
                ref_col = int(line.split()[-1])
                continue
            if line.startswith("#"):
                continue
            if line.startswith("[mod M"):
                M = int(line[:-1].split()[2])
                section = "M"
                continue
            if line.startswith("[mod "):
                pe = int(line[:-1].split()[1])
                per_prime[pe] = [0] * fb.columns()
                section = pe
                continue
            name, val = line.rsplit(" = ", 1)
            col = name_to_col.get(name)
            if col is None:
                continue
            if section == "M":
                mod_m[col] = int(val)
            else:
                per_prime[section][col] = int(val)
    if ref_col is None:
        raise ValueError("log file missing the reference column")
    return LogTable(ref_col, per_prime, dict(mod_m), M), mod_m
