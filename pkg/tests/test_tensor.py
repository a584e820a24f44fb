"""Symmetric pair tensors, gauge space, and the pair/endomorphism views.

Polarization is checked against an independent finite-difference
oracle; gauge dimensions against the closed-form count.
"""

import itertools
import random
from fractions import Fraction
from math import comb, factorial

import pytest
from hypothesis import given, settings, strategies as st

from jetiso.tensor import (
    PolyEnd,
    SignedPerm,
    Space,
    SymPairTensor,
    content_of,
    curvature_jet_dim_bound,
    end_to_pair,
    eval_pair,
    gauge_basis,
    gauge_dim,
    is_gauge_tensor,
    kulkarni,
    multiset_count,
    multiset_from_content,
    pair_to_end,
    polarize,
    random_signed_perm,
    sym_indices,
    transform_pair_tensor,
)

F = Fraction

E3 = Space(3, (1, 1, 1))
L3 = Space(3, (-1, 1, 1))
E2 = Space(2, (1, 1))


def eval_poly(coeffs, point):
    total = F(0)
    for mono, c in coeffs.items():
        v = F(c)
        for e, x in zip(mono, point):
            v *= x**e
        total += v
    return total


def polarize_by_differences(coeffs, n, degree):
    """Independent oracle: T(v_1..v_d) via inclusion-exclusion.

    T(v_1,...,v_d) = (1/d!) sum over nonempty S of (-1)^(d-|S|) p(sum_S v_i).
    """
    out = {}
    for ms in sym_indices(n, degree):
        vecs = [[F(1) if j == i else F(0) for j in range(n)] for i in ms]
        total = F(0)
        for r in range(1, degree + 1):
            for subset in itertools.combinations(range(degree), r):
                point = [sum(vecs[i][j] for i in subset) for j in range(n)]
                total += (-1) ** (degree - r) * eval_poly(coeffs, point)
        value = F(total, factorial(degree))
        if value:
            out[ms] = value
    return out


class TestMultisets:
    def test_sym_indices_count(self):
        for n in (1, 2, 3):
            for k in range(5):
                assert len(list(sym_indices(n, k))) == comb(n + k - 1, k)

    def test_multiset_count(self):
        assert multiset_count(()) == 1
        assert multiset_count((1, 1, 2)) == 3
        assert multiset_count((0, 1, 2)) == 6
        assert multiset_count((2, 2)) == 1

    def test_content_round_trip(self):
        for ms in sym_indices(3, 4):
            assert multiset_from_content(content_of(ms, 3)) == ms


class TestPolarize:
    def test_against_difference_oracle(self):
        rng = random.Random(7)
        for n, degree in [(2, 2), (2, 3), (3, 2), (3, 3), (2, 4)]:
            coeffs = {
                mono: F(rng.randint(-5, 5))
                for mono in (content_of(ms, n) for ms in sym_indices(n, degree))
            }
            coeffs = {m: c for m, c in coeffs.items() if c}
            assert polarize(coeffs, n, degree) == polarize_by_differences(
                coeffs, n, degree
            )

    def test_diagonal_recovery(self):
        coeffs = {(2, 1): F(3), (0, 3): F(-1)}
        form = polarize(coeffs, 2, 3)
        for point in [(F(1), F(2)), (F(-1, 2), F(3))]:
            total = F(0)
            for ms, v in form.items():
                prod = v * multiset_count(ms)
                for i in ms:
                    prod *= point[i]
                total += prod
            assert total == eval_poly(coeffs, point)

    def test_rejects_inhomogeneous(self):
        with pytest.raises(ValueError):
            polarize({(1, 0): F(1), (1, 1): F(1)}, 2, 2)


def metric_pair(space):
    comps = {((), (i, i)): F(space.eps(i)) for i in range(space.n)}
    return SymPairTensor(space, 0, comps)


def basis_inner(space):
    def ip(i, j):
        return F(space.eps(i)) if i == j else F(0)

    return ip


def const_curv_pair(space, kappa):
    """Lowest symmetrized component of constant curvature kappa."""
    comps = {}
    ip = basis_inner(space)
    for u in range(space.n):
        for v in range(u, space.n):
            for p in range(space.n):
                for q in range(p, space.n):
                    val = F(kappa) * (
                        ip(u, v) * ip(p, q)
                        - F(1, 2) * (ip(p, u) * ip(v, q) + ip(p, v) * ip(u, q))
                    )
                    if val:
                        comps[((u, v), (p, q))] = val
    return SymPairTensor(space, 2, comps)


class TestGauge:
    def test_metric_is_not_gauge_at_k2(self):
        # the pure product pattern g tensor g fails the radial condition
        space = E2
        comps = {}
        for u in range(2):
            for p in range(2):
                comps[((u, u), (p, p))] = F(1)
        h = SymPairTensor(space, 2, comps)
        assert not is_gauge_tensor(h)

    def test_const_curvature_is_gauge(self):
        for space in (E3, L3):
            assert is_gauge_tensor(const_curv_pair(space, 1))

    def test_gauge_dim_examples(self):
        # degree-1 metric parts always vanish in this normalization
        assert gauge_dim(2, 1) == 0
        assert gauge_dim(3, 1) == 0
        # degree-2 parts match the curvature count n^2(n^2-1)/12
        assert gauge_dim(2, 2) == 1
        assert gauge_dim(3, 2) == 6
        assert gauge_dim(4, 2) == 20

    @pytest.mark.parametrize("n", [2, 3, 4])
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_basis_matches_dimension(self, n, k):
        space = Space(n, (1,) * n)
        basis = gauge_basis(space, k)
        assert len(basis) == gauge_dim(n, k)
        for h in basis:
            assert is_gauge_tensor(h)

    def test_dim_bound_integrality(self):
        for n in (2, 3, 4, 5):
            for k in range(5):
                assert curvature_jet_dim_bound(n, k) > 0


class TestEvalPair:
    def test_metric_evaluation(self):
        g = metric_pair(L3)
        y = [F(2), F(0), F(1)]
        z = [F(1), F(3), F(-1)]
        assert eval_pair(g, [], y, z) == -2 + 0 - 1

    def test_symmetric_slot_weighting(self):
        # h = x0*x1 in the symmetric slots, pair (0,0)
        h = SymPairTensor(E2, 2, {((0, 1), (0, 0)): F(1)})
        a = [F(1), F(2)]
        b = [F(3), F(5)]
        # sum over both arrangements of (0,1)
        assert eval_pair(h, [a, b], [F(1), F(0)], [F(1), F(0)]) == 1 * 5 + 2 * 3


class TestKulkarni:
    def test_constant_curvature_pattern(self):
        for space in (E3, L3):
            kappa = F(2)
            t = kulkarni(const_curv_pair(space, kappa))
            ip = basis_inner(space)
            for a, b, c, d in itertools.product(range(space.n), repeat=4):
                expected = 3 * kappa * (ip(a, c) * ip(b, d) - ip(b, c) * ip(a, d))
                assert t.get((a, b, c, d)) == expected

    def test_output_symmetries(self):
        # the four-term pattern is curvature-shaped for any symmetric input
        rng = random.Random(11)
        space = E3
        comps = {}
        for sym in sym_indices(space.n, 4):
            for pair in sym_indices(space.n, 2):
                if rng.random() < 0.5:
                    comps[(sym, pair)] = F(rng.randint(-4, 4))
        h = SymPairTensor(space, 4, comps)
        t = kulkarni(h)
        n = space.n
        for idx in itertools.product(range(n), repeat=6):
            lead, (a, b, c, d) = idx[:2], idx[2:]
            assert t.get(idx) == -t.get(lead + (b, a, c, d))
            assert t.get(idx) == -t.get(lead + (a, b, d, c))
            assert t.get(idx) == t.get(lead + (c, d, a, b))
            cyc = (
                t.get(idx)
                + t.get(lead + (a, c, d, b))
                + t.get(lead + (a, d, b, c))
            )
            assert cyc == 0

    def test_rejects_low_arity(self):
        with pytest.raises(ValueError):
            kulkarni(metric_pair(E2))


class TestEndomorphismView:
    def test_metric_maps_to_identity(self):
        for space in (E3, L3):
            e = pair_to_end(metric_pair(space))
            for a in range(space.n):
                for b in range(space.n):
                    want = F(1) if a == b else F(0)
                    assert e.entry(a, b).constant_term() == want

    @pytest.mark.parametrize("space", [E3, L3], ids=["euclidean", "lorentz"])
    def test_round_trip(self, space):
        rng = random.Random(13)
        for k in (1, 2, 3):
            h = SymPairTensor(space, k)
            for b in gauge_basis(space, k):
                h = h + b.scaled(F(rng.randint(-3, 3)))
            assert end_to_pair(pair_to_end(h)) == h

    def test_composition_degree(self):
        from jetiso.poly import Poly

        x0 = Poly.variable(2, 0)
        a = PolyEnd(E2, 1, {(0, 1): x0})
        b = PolyEnd(E2, 2, {(1, 0): x0 * x0})
        c = a * b
        assert c.degree == 3
        assert c.entry(0, 0) == x0 * x0 * x0
        assert c.entry(1, 1).is_zero()


class TestSignedPerms:
    def test_compose_and_inverse(self):
        rng = random.Random(17)
        for _ in range(20):
            g = random_signed_perm(L3, rng)
            h = random_signed_perm(L3, rng)
            assert g.preserves(L3) and h.preserves(L3)
            gh = g.compose(h)
            ident = gh.compose(gh.inverse())
            assert ident.perm == (0, 1, 2)
            assert ident.signs == (1, 1, 1)

    def test_action_composition(self):
        rng = random.Random(19)
        t = const_curv_pair(L3, 3)
        for _ in range(10):
            g = random_signed_perm(L3, rng)
            h = random_signed_perm(L3, rng)
            lhs = transform_pair_tensor(transform_pair_tensor(t, h), g)
            rhs = transform_pair_tensor(t, g.compose(h))
            assert lhs == rhs

    def test_pullback_matches_evaluation(self):
        rng = random.Random(23)
        space = L3
        h = SymPairTensor(space, 2)
        for b in gauge_basis(space, 2):
            h = h + b.scaled(F(rng.randint(-2, 2)))
        g = random_signed_perm(space, rng)

        def apply(v):
            out = [F(0)] * space.n
            for j, x in enumerate(v):
                out[g.perm[j]] += g.signs[j] * x
            return out

        xs = [[F(rng.randint(-3, 3)) for _ in range(space.n)] for _ in range(2)]
        y = [F(rng.randint(-3, 3)) for _ in range(space.n)]
        z = [F(rng.randint(-3, 3)) for _ in range(space.n)]
        th = transform_pair_tensor(h, g)
        assert eval_pair(th, [apply(x) for x in xs], apply(y), apply(z)) == eval_pair(
            h, xs, y, z
        )

    def test_gauge_space_is_invariant(self):
        rng = random.Random(29)
        for space in (E3, L3):
            for b in gauge_basis(space, 2):
                g = random_signed_perm(space, rng)
                assert is_gauge_tensor(transform_pair_tensor(b, g))

    def test_invalid_perm_rejected(self):
        with pytest.raises(ValueError):
            SignedPerm((0, 0, 1), (1, 1, 1))
        with pytest.raises(ValueError):
            SignedPerm((0, 1), (1, 2))


signatures = st.sampled_from([(1, 1), (-1, 1), (1, 1, 1), (-1, 1, 1)])


@settings(max_examples=40)
@given(signatures, st.integers(min_value=0, max_value=2), st.randoms(use_true_random=False))
def test_serialization_round_trip(sig, k, rng):
    space = Space(len(sig), sig)
    comps = {}
    for sym in sym_indices(space.n, k):
        for pair in sym_indices(space.n, 2):
            if rng.random() < 0.3:
                comps[(sym, pair)] = F(rng.randint(-9, 9), rng.randint(1, 9))
    h = SymPairTensor(space, k, comps)
    assert SymPairTensor.from_json_obj(h.to_json_obj()) == h


def test_short_names_match_the_long_ones():
    from jetiso import freealg, jets, tensor

    assert tensor.is_in_N is tensor.is_gauge_tensor
    assert tensor.n_basis is tensor.gauge_basis
    assert tensor.dim_N is tensor.gauge_dim
    assert tensor.dim_C_lower is tensor.curvature_jet_dim_bound
    assert jets.c_basis is jets.linear_jet_basis
    assert freealg.q_of is freealg.q_poly
