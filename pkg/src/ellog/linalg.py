"""Dense linear algebra modulo a prime power.

Row counts stay in the low thousands at desk scale, so plain Gaussian
elimination over Z/ell is used, with a Hensel lift for prime-power moduli.
Rows are dicts column -> coefficient; columns are integers.
"""

from __future__ import annotations


class MoreRelationsNeeded(RuntimeError):
    pass


class InconsistentSystem(RuntimeError):
    pass


def _rref_mod(rows: list[list[int]], ell: int, width: int):
    """In-place reduced row echelon form; returns pivot column list."""
    pivots = []
    r = 0
    for c in range(width):
        piv = None
        for i in range(r, len(rows)):
            if rows[i][c] % ell:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], -1, ell)
        rows[r] = [(x * inv) % ell for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] % ell:
                f = rows[i][c]
                rows[i] = [(x - f * y) % ell for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return pivots


def kernel_mod_prime(rows: list[dict[int, int]], ncols: int, ell: int) -> list[list[int]]:
    """Basis of the right kernel of the sparse row set, modulo prime ell."""
    dense = []
    for row in rows:
        v = [0] * ncols
        for c, x in row.items():
            v[c] = x % ell
        if any(v):
            dense.append(v)
    pivots = _rref_mod(dense, ell, ncols)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fc in free:
        vec = [0] * ncols
        vec[fc] = 1
        for i, pc in enumerate(pivots):
            vec[pc] = (-dense[i][fc]) % ell
        basis.append(vec)
    return basis


def solve_affine_mod(rows: list[dict[int, int]], rhs: list[int], ncols: int,
                     modulus: int, ell: int, e: int):
    """One solution of A x = rhs mod ell^e, or None if underdetermined.

    Requires the mod-ell system to determine every unknown (unique
    solution); lifts it through the prime power.  Raises
    InconsistentSystem when no solution exists even mod ell.
    """
    dense = []
    for row, b in zip(rows, rhs):
        v = [0] * (ncols + 1)
        for c, x in row.items():
            v[c] = x % modulus
        v[ncols] = b % modulus
        dense.append(v)

    def solve_once(mat_rows, mod_l):
        work = [[x % mod_l for x in r] for r in mat_rows]
        pivots = _rref_mod(work, mod_l, ncols)
        for r in work:
            if any(x % mod_l for x in r[:ncols]):
                continue
            if r[ncols] % mod_l:
                raise InconsistentSystem("inconsistent rows")
        if len(pivots) < ncols:
            return None
        x = [0] * ncols
        for i, pc in enumerate(pivots):
            x[pc] = work[i][ncols] % mod_l
        return x

    sol = solve_once(dense, ell)
    if sol is None:
        return None
    modk = ell
    while modk < ell ** e:
        # residual r = (A sol - rhs)/modk mod ell; correct sol by modk * d
        resid = []
        for v in dense:
            acc = -v[ncols]
            for c in range(ncols):
                if v[c]:
                    acc += v[c] * sol[c]
            if acc % modk:
                raise AssertionError("lift invariant broken")
            resid.append((acc // modk) % ell)
        corr_rows = [{c: v[c] for c in range(ncols) if v[c]} for v in dense]
        d = solve_once([[corr.get(c, 0) for c in range(ncols)] + [(-r) % ell]
                        for corr, r in zip(corr_rows, resid)], ell)
        if d is None:
            return None
        sol = [(s + modk * dd) % (modk * ell) for s, dd in zip(sol, d)]
        modk *= ell
    return sol


def kernel_mod_prime_power(rows: list[dict[int, int]], ncols: int,
                           ell: int, e: int) -> list[int] | None:
    """A kernel vector mod ell^e whose reduction mod ell spans the kernel.

    Returns None when the mod-ell kernel dimension is not 1 (the caller
    decides between MoreRelationsNeeded and a degenerate instance).
    """
    basis = kernel_mod_prime(rows, ncols, ell)
    if len(basis) != 1:
        return None
    vec = basis[0]
    modk = ell
    target = ell ** e
    vec = list(vec)
    while modk < target:
        # want A (vec + modk * w) = 0 mod modk*ell with A vec = 0 mod modk
        resid = []
        used = []
        for row in rows:
            acc = 0
            for c, x in row.items():
                acc += x * vec[c]
            if acc % modk:
                raise AssertionError("kernel lift invariant broken")
            resid.append((acc // modk) % ell)
            used.append(row)
        # solve A w = -resid mod ell together with w[anchor] = 0
        anchor = max(range(ncols), key=lambda c: vec[c] % ell != 0)
        aug_rows = [dict(r) for r in used] + [{anchor: 1}]
        aug_rhs = [(-r) % ell for r in resid] + [0]
        w = _solve_least(aug_rows, aug_rhs, ncols, ell)
        if w is None:
            return None
        vec = [(v + modk * ww) % target for v, ww in zip(vec, w)]
        modk *= ell
    return vec


def _solve_least(rows: list[dict[int, int]], rhs: list[int], ncols: int, ell: int):
    dense = []
    for row, b in zip(rows, rhs):
        v = [0] * (ncols + 1)
        for c, x in row.items():
            v[c] = x % ell
        v[ncols] = b % ell
        dense.append(v)
    pivots = _rref_mod(dense, ell, ncols)
    for r in dense:
        if not any(x for x in r[:ncols]) and r[ncols]:
            raise InconsistentSystem("inconsistent lift system")
    x = [0] * ncols
    for i, pc in enumerate(pivots):
        x[pc] = dense[i][ncols]
    return x
