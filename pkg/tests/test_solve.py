import random

import pytest

from ellog.algebra import Poly, poly_irreducibles
from ellog.divisor import PLACE_AT_INFINITY, places_over
from ellog.harvest import build_factor_base, harvest_core, harvest_m1
from ellog.linalg import MoreRelationsNeeded
from ellog.psi import PsiValue, psi_elementary
from ellog.solve import (LogContext, NotInSubgroup, bilinear_descend,
                         bsgs_oracle, classical_split, column_class,
                         descent_free_counts, dlog, factor_modulus,
                         find_generator, log_r_of_generator, pollard_rho_dlog,
                         poly_to_divisor, solve_core, solve_mod,
                         verify_log_table)


@pytest.fixture(scope="module")
def solved(basis59, fb59):
    rels, _ = harvest_core(basis59, fb59)
    extra = harvest_m1(basis59, fb59)
    table = solve_core(basis59, fb59, rels + extra)
    return rels + extra, table


def test_factor_modulus_acceptance_instance(basis59):
    M = basis59.M
    assert M == (5 ** 9 - 1) // 4 == 488281
    fac = factor_modulus(M)
    # recompute by plain trial division as the independent oracle
    n, oracle, d = M, [], 2
    while d * d <= n:
        while n % d == 0:
            oracle.append(d)
            n //= d
        d += 1
    if n > 1:
        oracle.append(n)
    assert sorted(oracle) == [p for p, e in fac for _ in range(e)]
    prod = 1
    for p, e in fac:
        prod *= p ** e
        from ellog.algebra import is_probable_prime
        assert is_probable_prime(p)
    assert prod == M


def test_factor_modulus_prime_and_tiny():
    assert factor_modulus(829) == [(829, 1)]
    with pytest.raises(ValueError):
        factor_modulus(1)


def test_solve_mod_duplicates_and_errors():
    rows = [{0: 1, 1: 17}, {1: 1, 2: 3}]
    v1 = solve_mod(rows, 3, 19)
    v2 = solve_mod(rows + rows, 3, 19)
    assert v1 == v2
    with pytest.raises(MoreRelationsNeeded):
        solve_mod([{0: 1, 1: 1}], 3, 19)


def test_solve_mod_prime_power_lift():
    # planted solution x = (5, 12, 1) mod 7^2, homogeneous rows around it
    ell, e = 7, 2
    mod = ell ** e
    x = [5, 12, 1]
    rng = random.Random(3)
    rows = []
    for _ in range(8):
        a = [rng.randrange(mod) for _ in range(3)]
        # adjust last coefficient so the row annihilates x (x[2] = 1 helps)
        a[2] = (-(a[0] * x[0] + a[1] * x[1])) % mod
        rows.append({i: v for i, v in enumerate(a) if v})
    vec = solve_mod(rows, 3, ell, e)
    lam = vec[2]  # x normalized so the last coordinate is 1 in the plant
    assert all((vec[i] - lam * x[i]) % mod == 0 for i in range(3))


def test_solve_core_and_verification(basis59, fb59, solved):
    rels, table = solved
    assert set(table.mod_m) == set(range(fb59.columns()))
    assert verify_log_table(basis59, fb59, table, sample=7)
    assert table.mod_m[table.ref_col] == 1


def test_solved_logs_satisfy_holdout_rows(basis59, fb59, solved):
    rels, table = solved
    rng = random.Random(5)
    holdout = rng.sample(rels, min(50, len(rels)))
    refit = solve_core(basis59, fb59, [r for r in rels if r not in holdout])
    for rel in holdout:
        acc = sum(v * refit.mod_m[c] for c, v in rel.cols.items()) % basis59.M
        assert acc == 0


def test_solved_logs_match_bsgs(basis59, fb59, solved):
    _, table = solved
    rcls = column_class(fb59, table.ref_col, basis59)
    rng = random.Random(6)
    for col in rng.sample(range(fb59.columns()), 5):
        want = bsgs_oracle(column_class(fb59, col, basis59), rcls, basis59.M)
        assert table.mod_m[col] == want


def test_bsgs_oracle_basics(basis59):
    ext = basis59.ext
    g = find_generator(ext, 0)
    gbar = PsiValue(ext, g)
    one = PsiValue(ext, ext.one)
    assert bsgs_oracle(one, gbar, basis59.M) == 0
    rng = random.Random(7)
    for _ in range(5):
        e = rng.randrange(basis59.M)
        assert bsgs_oracle(gbar.pow(e), gbar, basis59.M) == e
    # the field pair flavor
    eta = ext.pow_(g, basis59.M)
    assert bsgs_oracle((ext, ext.pow_(eta, 3)), (ext, eta), 4) == 3


def test_bsgs_not_in_subgroup(basis59):
    ext = basis59.ext
    g = find_generator(ext, 0)
    eta = ext.pow_(g, basis59.M)  # order q - 1 = 4
    with pytest.raises(NotInSubgroup):
        bsgs_oracle((ext, g), (ext, eta), 4)


def test_pollard_rho_agrees_with_bsgs(basis59):
    ext = basis59.ext
    g = PsiValue(ext, find_generator(ext, 0))
    M = basis59.M
    rng = random.Random(8)
    for trial in range(20):
        ell = (19, 31, 829)[trial % 3]
        sub = g.pow(M // ell)
        e = rng.randrange(ell)
        h = sub.pow(e)
        got = pollard_rho_dlog(h, sub, ell, seed=trial)
        assert got == bsgs_oracle(h, sub, ell) == e


def test_poly_to_divisor_shapes(basis59):
    curve = basis59.curve
    K = curve.field
    td = basis59.td
    # linear with torsion abscissa reproduces the vertical lemma divisor
    f = Poly(K, (K.neg(td.xs[4]), 1))
    D = poly_to_divisor(f, curve)
    assert D.degree == 0 and D.height == 2
    assert D.coeffs[PLACE_AT_INFINITY] == -2
    # an irreducible with non-square cubic residue gives one inert place
    for u in poly_irreducibles(K, 2):
        pls = places_over(curve, u)
        if len(pls) == 1 and pls[0].kind == "inert":
            D = poly_to_divisor(u, curve)
            assert D.degree == 0
            assert [(p.kind, n) for p, n in D.finite_places()] == [("inert", 1)]
            break
    else:
        pytest.fail("no inert quadratic found")


def test_classical_split_base_field_is_empty(basis59, fb59, solved):
    _, table = solved
    ctx = LogContext(fb59, dict(table.mod_m))
    g = find_generator(basis59.ext, 0)
    res = classical_split(basis59.ext.embed(3), basis59, ctx, g, 1)
    assert res.log_r == 0 and not res.num_factors


def test_classical_split_theta_shift(basis59, fb59, solved):
    # theta - x_j is already a factor-base image
    _, table = solved
    ctx = LogContext(fb59, dict(table.mod_m))
    ext = basis59.ext
    g = find_generator(ext, 0)
    lg = log_r_of_generator(basis59, ctx, g)
    z = ext.sub(basis59.theta, ext.embed(basis59.td.xs[3]))
    split = classical_split(z, basis59, ctx, g, lg, seed=1)
    rcls = column_class(fb59, table.ref_col, basis59)
    want = bsgs_oracle(PsiValue(ext, z), rcls, basis59.M)
    assert split.log_r == want


def test_classical_split_reconstruction(basis59, fb59, solved):
    _, table = solved
    ctx = LogContext(fb59, dict(table.mod_m))
    ext = basis59.ext
    g = find_generator(ext, 0)
    lg = log_r_of_generator(basis59, ctx, g)
    rng = random.Random(11)
    for _ in range(20):
        z = ext.rand(rng)
        if not any(z):
            continue
        split = classical_split(z, basis59, ctx, g, lg, seed=3)
        w = ext.mul(z, ext.pow_(g, split.shift))
        prod = ext.one
        for f, mult in split.num_factors:
            prod = ext.mul(prod, ext.pow_(ext.from_poly(f), mult))
        for f, mult in split.den_factors:
            prod = ext.div(prod, ext.pow_(ext.from_poly(f), mult))
        ratio = ext.div(w, prod)
        assert ext.is_base(ratio)


def test_descent_free_counts():
    assert descent_free_counts(2, 1) == (6, 3)
    assert descent_free_counts(2, 2) == (6, 6)
    assert descent_free_counts(2, 2, compelled=3) == (3, 3)


def test_bilinear_descend_known_target_returns(basis59, fb59, solved):
    _, table = solved
    ctx = LogContext(fb59, dict(table.mod_m))
    rep = fb59.reps[0]
    val, rel = bilinear_descend(basis59, ctx, rep)
    assert val == table.mod_m[fb59.rep_col[rep]]
    assert rel is None


def test_bilinear_descend_degree_six(basis59, fb59, solved):
    from ellog.solve import factor_modulus
    from ellog.harvest import extend_h4, extend_h5
    _, table = solved
    logs = dict(table.mod_m)
    fbx = build_factor_base(basis59, 3)
    fbx.extend_to(5)
    pp = factor_modulus(basis59.M)
    extend_h4(basis59, fbx, logs, pp)
    extend_h5(basis59, fbx, logs)
    ctx = LogContext(fbx, logs)
    K = basis59.curve.field
    target = next(p for u in poly_irreducibles(K, 3)
                  for p in places_over(basis59.curve, u) if p.degree == 6)
    val, rel = bilinear_descend(basis59, ctx, target, 2, 2, compelled=3, seed=1)
    rcls = column_class(fbx, table.ref_col, basis59)
    want = bsgs_oracle(psi_elementary(target, basis59), rcls, basis59.M)
    assert val == want
    # the row plus the (unindexed) target term is a true homogeneous relation
    n_target = rel.params[-1]
    tl = {c: bsgs_oracle(column_class(fbx, c, basis59), rcls, basis59.M)
          for c in rel.cols}
    row_sum = sum(v * tl[c] for c, v in rel.cols.items()) % basis59.M
    assert (row_sum - n_target * want) % basis59.M == 0


def test_dlog_identity_and_planted(basis59, fb59, solved):
    _, table = solved
    logs = dict(table.mod_m)
    ext = basis59.ext
    g = find_generator(ext, 0)
    res = dlog(g, g, basis59, fb59, logs, allow_descent=False)
    assert res.verified and res.x_mod_m == 1 % basis59.M and res.x_full == 1
    res = dlog(ext.pow_(g, 12345), g, basis59, fb59, logs, allow_descent=False)
    assert res.verified and res.x_full == 12345
