import random
from fractions import Fraction

import pytest

from quatheta.exact import make_quad_field
from quatheta.forms_hecke import (
    AutoForm,
    BrandtModule,
    basis_vector,
    brandt_diagonal_counts,
    eigenform,
    eigenvalue_of,
    hecke_trace_weight2,
    normalize_integral,
    pair_k,
    petersson,
    rho_act,
    weight_indices,
)
from quatheta.ideal_classes import eichler_order, right_class_set
from quatheta.linalg import mat_mul, rational_roots, charpoly
from quatheta.oracle import eta_product_level11, trace_hecke
from quatheta.quaternion import QuatAlgebra, choose_beta, i_K_matrix

rng = random.Random(424)

_cache = {}


def module_for(n_minus, d_k, level=1, k=2, square_at=()):
    key = (n_minus, d_k, level, k, tuple(sorted(square_at)))
    if key not in _cache:
        K = make_quad_field(d_k)
        beta = choose_beta(K, n_minus, square_at=square_at)
        alg = QuatAlgebra(K, beta, n_minus)
        order = eichler_order(alg, level)
        _cache[key] = BrandtModule(order, k=k)
    return _cache[key]


def rand_invertible(K):
    while True:
        g = [[K.elem(rng.randint(-4, 4), rng.randint(-4, 4)) for _ in range(2)] for _ in range(2)]
        det = g[0][0] * g[1][1] - g[0][1] * g[1][0]
        if not det == 0:
            return g


# ---------------------------------------------------------------------------
# rho and the pairing


def test_rho_identity_and_scalars():
    K = make_quad_field(4)
    k = 6
    P = tuple(K.elem(rng.randint(-3, 3)) for _ in range(k - 1))
    ident = [[K.elem(1), K.elem(0)], [K.elem(0), K.elem(1)]]
    assert rho_act(ident, P, k) == P
    sc = [[K.elem(5), K.elem(0)], [K.elem(0), K.elem(5)]]
    assert rho_act(sc, P, k) == P


def test_rho_weight2_trivial():
    K = make_quad_field(4)
    g = rand_invertible(K)
    P = (K.elem(7),)
    assert rho_act(g, P, 2) == P


def test_rho_group_action():
    K = make_quad_field(4)
    k = 4
    for _ in range(25):
        g, h = rand_invertible(K), rand_invertible(K)
        P = tuple(K.elem(rng.randint(-3, 3), rng.randint(-2, 2)) for _ in range(k - 1))
        lhs = rho_act(mat_mul(g, h), P, k)
        rhs = rho_act(g, rho_act(h, P, k), k)
        assert lhs == rhs


def test_pairing_orthogonality_and_values():
    K = make_quad_field(4)
    k = 4
    v1 = basis_vector(K, k, 1)
    vm1 = basis_vector(K, k, -1)
    v0 = basis_vector(K, k, 0)
    assert pair_k(v1, vm1, k) == 1
    assert pair_k(v0, v0, k) == Fraction(-1, 2)
    assert pair_k(v1, v0, k) == 0
    assert pair_k(v1, v1, k) == 0


def test_pairing_equivariance_random():
    K = make_quad_field(4)
    for k in (2, 4, 6):
        for _ in range(67):
            g = rand_invertible(K)
            P = tuple(K.elem(rng.randint(-3, 3), rng.randint(-2, 2)) for _ in range(k - 1))
            Q = tuple(K.elem(rng.randint(-3, 3), rng.randint(-2, 2)) for _ in range(k - 1))
            assert pair_k(rho_act(g, P, k), rho_act(g, Q, k), k) == pair_k(P, Q, k)


def test_weight_indices():
    assert weight_indices(2) == [0]
    assert weight_indices(4) == [-1, 0, 1]
    assert weight_indices(6) == [-2, -1, 0, 1, 2]


# ---------------------------------------------------------------------------
# Brandt matrices, weight 2, level 11 desk instance


def test_brandt_t2_t3_spectrum_b11():
    mod = module_for(11, 4, square_at=(3,))
    t2 = mod.hecke_rational(2)
    roots2 = set(rational_roots(charpoly(t2)))
    assert roots2 == {Fraction(3), Fraction(-2)}
    t3 = mod.hecke_rational(3)
    roots3 = set(rational_roots(charpoly(t3)))
    assert roots3 == {Fraction(4), Fraction(-1)}


def test_brandt_row_degree():
    mod = module_for(11, 4, square_at=(3,))
    t2 = mod.hecke_rational(2)
    # constant vector is an eigenvector with eigenvalue q+1
    for row in t2:
        assert sum(row) == 3


def test_brandt_commutativity_and_eta_match():
    mod = module_for(11, 4, square_at=(3,))
    a = eta_product_level11(20)
    for q in (2, 3, 5, 7, 13):
        tq = mod.hecke_rational(q)
        roots = rational_roots(charpoly(tq))
        assert Fraction(a[q]) in roots, q
        assert Fraction(q + 1) in roots
    t2, t3 = mod.hecke_rational(2), mod.hecke_rational(3)
    assert mat_mul(t2, t3) == mat_mul(t3, t2)


def test_eigenform_level11():
    mod = module_for(11, 4, square_at=(3,))
    f = eigenform(mod, [(2, Fraction(-2))])
    vals = [v[0].u for v in f.values]
    assert sorted(abs(x) for x in vals) == [2, 3]
    # eigenvalues at other primes come along for free
    assert eigenvalue_of(mod, f, 3) == -1
    assert eigenvalue_of(mod, f, 5) == 1
    assert eigenvalue_of(mod, f, 7) == -2
    assert eigenvalue_of(mod, f, 13) == 4


def test_eisenstein_eigenform():
    mod = module_for(11, 4, square_at=(3,))
    f = eigenform(mod, [(2, Fraction(3)), (3, Fraction(4))])
    assert all(v[0] == f.values[0][0] for v in f.values)


def test_inconsistent_target_rejected():
    mod = module_for(11, 4, square_at=(3,))
    import quatheta.exact as qe

    with pytest.raises(qe.QuathetaError):
        eigenform(mod, [(2, Fraction(0))])


def test_u11_eigenvalue():
    mod = module_for(11, 4, square_at=(3,))
    f = eigenform(mod, [(2, Fraction(-2))])
    # U_11 acts with eigenvalue a_11 = 1 on the level-11 newform
    assert eigenvalue_of(mod, f, 11) == 1


# ---------------------------------------------------------------------------
# fast diagonal counts agree with the exact operators


def test_fast_trace_matches_exact():
    mod = module_for(11, 4, square_at=(3,))
    counts = brandt_diagonal_counts(mod.cs, 13)
    for q in (2, 3, 5, 7, 13):
        tq = mod.hecke_rational(q)
        tr = sum(tq[i][i] for i in range(len(tq)))
        assert hecke_trace_weight2(mod.cs, counts, q) == tr


def test_eta_oracle_agreement_1000():
    mod = module_for(11, 4, square_at=(3,))
    a = eta_product_level11(1000)
    counts = brandt_diagonal_counts(mod.cs, 999)
    from quatheta.oracle import hecke_expand

    prime_eigs = {}
    for q in range(2, 1000):
        if not all(q % d for d in range(2, int(q ** 0.5) + 1)):
            continue
        if q == 11:
            prime_eigs[11] = 1  # U_11 eigenvalue, from the exact operator below
            continue
        tr = hecke_trace_weight2(mod.cs, counts, q)
        aq = tr - (q + 1)
        assert aq.denominator == 1
        prime_eigs[q] = int(aq)
    b = hecke_expand(prime_eigs, 11, 2, 999)
    assert b[1:1000] == a[1:1000]


# ---------------------------------------------------------------------------
# weight 4


def test_weight4_dims():
    mod5 = module_for(5, 8, k=4)
    assert mod5.dim == 1  # dim S_4(Gamma_0(5))
    mod7 = module_for(7, 4, k=4)
    assert mod7.dim == 1


def test_weight4_eigenvalues_match_trace_formula():
    mod5 = module_for(5, 8, k=4)
    t2 = mod5.hecke_rational(2)
    t3 = mod5.hecke_rational(3)
    assert t2[0][0] == trace_hecke(5, 4, 2) == -4
    assert t3[0][0] == trace_hecke(5, 4, 3) == 2
    mod7 = module_for(7, 4, k=4)
    assert mod7.hecke_rational(2)[0][0] == trace_hecke(7, 4, 2) == -1
    assert mod7.hecke_rational(3)[0][0] == trace_hecke(7, 4, 3)
    assert mod7.hecke_rational(5)[0][0] == trace_hecke(7, 4, 5) == 16


def test_weight4_commutativity():
    mod = module_for(7, 4, k=4)
    t2 = mod.hecke_matrix(2)
    t3 = mod.hecke_matrix(3)
    assert mat_mul(t2, t3) == mat_mul(t3, t2)


# ---------------------------------------------------------------------------
# petersson pairing


def test_petersson_b2_single_class():
    mod = module_for(2, 4)
    f = mod.form_from_vector([mod.K.elem(1)])
    v = petersson(f, f)
    assert v == Fraction(1, 12)


def test_petersson_eisenstein_orthogonal_cusp():
    mod = module_for(11, 4, square_at=(3,))
    f = eigenform(mod, [(2, Fraction(-2))])
    e = eigenform(mod, [(2, Fraction(3)), (3, Fraction(4))])
    assert petersson(e, f) == 0
    assert petersson(f, e) == 0


def test_petersson_self_adjoint():
    mod = module_for(11, 4, square_at=(3,))
    for q in (2, 3, 5, 7, 13):
        tq = mod.hecke_rational(q)
        # adjointness on a basis of forms
        basis = []
        for i in range(mod.dim):
            vec = [mod.K.elem(1 if j == i else 0) for j in range(mod.dim)]
            basis.append(mod.form_from_vector(vec))
        for i in range(mod.dim):
            for j in range(mod.dim):
                tf = mod.form_from_vector(
                    [sum((mod.hecke_matrix(q)[r][c] * mod.vector_of_form(basis[i])[c]
                          for c in range(mod.dim)), mod.K.elem(0))
                     for r in range(mod.dim)]
                )
                tg = mod.form_from_vector(
                    [sum((mod.hecke_matrix(q)[r][c] * mod.vector_of_form(basis[j])[c]
                          for c in range(mod.dim)), mod.K.elem(0))
                     for r in range(mod.dim)]
                )
                assert petersson(tf, basis[j]) == petersson(basis[i], tg)
