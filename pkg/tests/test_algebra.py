"""Polynomial map arithmetic against offline-computed expected tables.

The frozen coefficient tables in this file were produced by a computer
algebra system from the same defining formulas, then transcribed.  All
inputs use dyadic-rational coefficients so the library's float
arithmetic reproduces them exactly; comparisons still allow 1e-15 to be
robust against summation-order differences.
"""

import cmath
import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dilaflow import PolyMap, ValidationError, VectorField, linear_flow_diag

# h = (z1 + (2-i) z2^2,  z2 + 0.5 z1 z2)
H_TERMS = {
    (1, (1, 0)): 1.0,
    (2, (0, 1)): 1.0,
    (1, (0, 2)): 2.0 - 1.0j,
    (2, (1, 1)): 0.5,
}
# g = (z1 + i z1^2,  z2 - 0.25 z1 z2 + 0.75 z2^2)
G_TERMS = {
    (1, (1, 0)): 1.0,
    (2, (0, 1)): 1.0,
    (1, (2, 0)): 1.0j,
    (2, (1, 1)): -0.25,
    (2, (0, 2)): 0.75,
}
# v = (-z1 + z1 z2,  -2 z2 + z2^2 + z1^3)
V_TERMS = {
    (1, (1, 0)): -1.0,
    (2, (0, 1)): -2.0,
    (1, (1, 1)): 1.0,
    (2, (0, 2)): 1.0,
    (2, (3, 0)): 1.0,
}

COMPOSE_HG_DEG3 = {
    (1, (1, 0)): 1.0,
    (2, (0, 1)): 1.0,
    (1, (2, 0)): 1.0j,
    (1, (0, 2)): 2.0 - 1.0j,
    (2, (1, 1)): 0.25,
    (2, (0, 2)): 0.75,
    (1, (1, 2)): -1.0 + 0.5j,
    (1, (0, 3)): 3.0 - 1.5j,
    (2, (2, 1)): -0.125 + 0.5j,
    (2, (1, 2)): 0.375,
}

JACOBIAN_HV_DEG3 = {
    (1, (1, 0)): -1.0,
    (2, (0, 1)): -2.0,
    (1, (1, 1)): 1.0,
    (1, (0, 2)): -8.0 + 4.0j,
    (2, (1, 1)): -1.5,
    (2, (0, 2)): 1.0,
    (2, (3, 0)): 1.0,
    (2, (1, 2)): 1.0,
    (1, (0, 3)): 4.0 - 2.0j,
}

INVERSE_H_DEG4 = {
    (1, (1, 0)): 1.0,
    (2, (0, 1)): 1.0,
    (1, (0, 2)): -2.0 + 1.0j,
    (2, (1, 1)): -0.5,
    (1, (1, 2)): 2.0 - 1.0j,
    (2, (0, 3)): 1.0 - 0.5j,
    (2, (2, 1)): 0.25,
    (1, (0, 4)): -3.0 + 4.0j,
    (1, (2, 2)): -1.5 + 0.75j,
    (2, (1, 3)): -2.0 + 1.0j,
    (2, (3, 1)): -0.125,
}


def make_h():
    return PolyMap(2, 2, H_TERMS)


def make_g():
    return PolyMap(2, 2, G_TERMS)


def make_v():
    return PolyMap(2, 3, V_TERMS)


def assert_terms_close(p, expected, tol=1e-15):
    keys = set(p.terms) | set(expected)
    for key in sorted(keys, key=lambda kk: (sum(kk[1]), kk[1], kk[0])):
        got = p.terms.get(key, 0j)
        want = complex(expected.get(key, 0j))
        assert abs(got - want) <= tol, (key, got, want)


class TestFrozenTables:
    def test_compose(self):
        assert_terms_close(make_h().compose(make_g(), 3), COMPOSE_HG_DEG3)

    def test_jacobian_apply(self):
        assert_terms_close(make_h().jacobian_apply(make_v(), 3), JACOBIAN_HV_DEG3)

    def test_inverse(self):
        assert_terms_close(make_h().inverse(4), INVERSE_H_DEG4)

    def test_inverse_round_trip_exact_case(self):
        h = make_h()
        q = h.inverse(4)
        round_trip = h.compose(q, 4)
        assert_terms_close(round_trip, PolyMap.identity(2, 4).terms, tol=1e-15)

    def test_evaluate_point(self):
        z = np.array([0.3 + 0.2j, -0.1 + 0.4j])
        got = make_h()(z)
        want = np.array([-0.08 + 0.19j, -0.155 + 0.45j])
        assert np.max(np.abs(got - want)) <= 1e-15


class TestBasics:
    def test_degree_and_coefficient(self):
        v = make_v()
        assert v.degree() == 3
        assert v.coefficient(2, (3, 0)) == 1.0
        assert v.coefficient(1, (5, 5)) == 0j
        assert v.max_coefficient() == 2.0
        assert v.coefficient_mass() == pytest.approx(6.0)

    def test_zero_and_identity(self):
        z = PolyMap.zero(3)
        assert z.terms == {} and z.degree() == 0
        ident = PolyMap.identity(3)
        assert ident.has_identity_linear_part()
        pt = np.array([0.1, 0.2j, -0.3])
        assert np.array_equal(ident(pt), pt.astype(complex))

    def test_linear_constructor(self):
        p = PolyMap.linear([2.0, -1j])
        assert p.coefficient(1, (1, 0)) == 2.0
        assert p.coefficient(2, (0, 1)) == -1j

    def test_prune_drops_noise_terms(self):
        p = PolyMap(2, 2, {(1, (2, 0)): 1e-15, (2, (0, 2)): 1.0})
        assert (1, (2, 0)) not in p.terms
        assert (2, (0, 2)) in p.terms

    def test_structure_queries(self):
        h = make_h()
        assert h.has_zero_constant_term()
        assert h.has_identity_linear_part()
        assert set(h.linear_part()) == {(1, (1, 0)), (2, (0, 1))}
        quad = h.homogeneous_part(2)
        assert set(quad.terms) == {(1, (0, 2)), (2, (1, 1))}
        assert h.truncated(1).terms == PolyMap.identity(2).terms

    def test_arithmetic(self):
        h, g = make_h(), make_g()
        s = h + g
        assert s.coefficient(1, (1, 0)) == 2.0
        assert s.coefficient(2, (1, 1)) == 0.25
        d = h - h
        assert d.terms == {}
        assert h.scaled(2.0).coefficient(1, (0, 2)) == 4.0 - 2.0j
        assert h.diag_scale([1.0, -1j]).coefficient(2, (1, 1)) == -0.5j
        assert h.diag_scale([1.0, -1j]).coefficient(1, (0, 2)) == 2.0 - 1.0j


class TestValidation:
    def test_bad_dimension(self):
        with pytest.raises(ValidationError):
            PolyMap(0, 2)

    def test_degree_cap(self):
        with pytest.raises(ValidationError):
            PolyMap(2, 2, {(1, (3, 0)): 1.0})

    def test_component_out_of_range(self):
        with pytest.raises(ValidationError):
            PolyMap(2, 2, {(3, (1, 0)): 1.0})

    def test_exponent_length(self):
        with pytest.raises(ValidationError):
            PolyMap(2, 2, {(1, (1, 0, 0)): 1.0})

    def test_negative_exponent(self):
        with pytest.raises(ValidationError):
            PolyMap(2, 2, {(1, (-1, 2)): 1.0})

    def test_non_finite_coefficient(self):
        with pytest.raises(ValidationError):
            PolyMap(2, 2, {(1, (1, 0)): float("nan")})

    def test_evaluate_shape(self):
        with pytest.raises(ValidationError):
            make_h()(np.zeros(3))

    def test_compose_dimension_mismatch(self):
        with pytest.raises(ValidationError):
            make_h().compose(PolyMap.identity(3), 2)

    def test_compose_requires_origin_fixed_inner(self):
        inner = PolyMap(2, 1, {(1, (0, 0)): 1.0, (1, (1, 0)): 1.0, (2, (0, 1)): 1.0})
        with pytest.raises(ValidationError):
            make_h().compose(inner, 2)

    def test_inverse_requires_identity_linear_part(self):
        p = PolyMap.linear([2.0, 1.0], max_degree=2)
        with pytest.raises(ValidationError):
            p.inverse(2)


class TestTriangularity:
    def test_already_triangular(self):
        p = PolyMap(2, 2, {(1, (1, 0)): 1.0, (2, (0, 1)): 1.0, (2, (2, 0)): 1.0})
        flag, perm = p.is_triangular()
        assert flag and perm == (1, 2)

    def test_triangular_after_relabeling(self):
        # component 1 feeds on z2, so the roles must swap
        p = PolyMap(2, 2, {(1, (1, 0)): -2.0, (2, (0, 1)): -1.0, (1, (0, 2)): 1.0})
        flag, perm = p.is_triangular()
        assert flag and perm == (2, 1)
        q = p.permuted(perm)
        assert q.coefficient(2, (2, 0)) == 1.0
        assert q.coefficient(1, (1, 0)) == -1.0
        assert q.coefficient(2, (0, 1)) == -2.0

    def test_cyclic_dependency_is_not_triangular(self):
        p = PolyMap(
            2, 2,
            {(1, (1, 0)): 1.0, (2, (0, 1)): 1.0, (1, (0, 2)): 1.0, (2, (2, 0)): 1.0},
        )
        flag, perm = p.is_triangular()
        assert not flag and perm is None

    def test_off_diagonal_linear_blocks(self):
        p = PolyMap(2, 1, {(1, (1, 0)): 1.0, (2, (1, 0)): 1.0, (2, (0, 1)): 1.0})
        assert p.is_triangular() == (False, None)

    def test_permuted_rejects_non_permutation(self):
        with pytest.raises(ValidationError):
            make_h().permuted((1, 1))


class TestVectorField:
    def test_reordering_records_permutation(self):
        # same field as (-1, -2.5) with z1^2 feeding component 2, but
        # entered with the coordinates swapped
        swapped = VectorField((-2.5, -1.0), PolyMap(2, 2, {(1, (0, 2)): 1.0}))
        assert swapped.alpha == (-1.0 + 0j, -2.5 + 0j)
        assert swapped.permutation == (2, 1)
        assert swapped.higher.terms == {(2, (2, 0)): 1.0 + 0j}

    def test_ordered_input_keeps_identity_permutation(self):
        vf = VectorField((-1.0, -2.5), PolyMap(2, 2, {(2, (2, 0)): 1.0}))
        assert vf.permutation == (1, 2)

    def test_is_dilation(self):
        assert VectorField((-1.0, -2.0 + 3.0j), PolyMap.zero(2)).is_dilation
        assert not VectorField((1e-9, -1.0), PolyMap.zero(2)).is_dilation

    def test_rejects_low_degree_higher_terms(self):
        with pytest.raises(ValidationError):
            VectorField((-1.0, -2.0), PolyMap(2, 2, {(1, (0, 1)): 1.0}))

    def test_rejects_bad_radius(self):
        with pytest.raises(ValidationError):
            VectorField((-1.0,), PolyMap.zero(1), radius=0.0)

    def test_min_higher_degree(self):
        assert VectorField((-1.0, -2.0), PolyMap.zero(2)).min_higher_degree() is None
        vf = VectorField((-1.0, -2.0), PolyMap(2, 3, {(2, (3, 0)): 1.0}))
        assert vf.min_higher_degree() == 3

    def test_evaluate_and_rhs_agree(self):
        vf = VectorField((-1.0 - 1.0j, -2.0 - 1.0j), PolyMap(2, 2, {(2, (2, 0)): 1.0}))
        z = np.array([0.2 + 0.1j, -0.3 + 0.05j])
        via_eval = vf(z)
        via_rhs = np.array(vf.rhs()([complex(z[0]), complex(z[1])]))
        assert np.array_equal(via_eval, via_rhs)
        want0 = (-1 - 1j) * z[0]
        want1 = (-2 - 1j) * z[1] + z[0] ** 2
        assert abs(via_eval[0] - want0) < 1e-16
        assert abs(via_eval[1] - want1) < 1e-16

    def test_as_polymap(self):
        vf = VectorField((-1.0, -2.5), PolyMap(2, 2, {(2, (2, 0)): 1.0}))
        p = vf.as_polymap(2)
        assert p.coefficient(1, (1, 0)) == -1.0
        assert p.coefficient(2, (0, 1)) == -2.5
        assert p.coefficient(2, (2, 0)) == 1.0

    def test_linear_flow_diag(self):
        alpha = (-1.0 - 1.0j, -2.5)
        got = linear_flow_diag(alpha, 0.7)
        want = np.array([cmath.exp((-1 - 1j) * 0.7), math.exp(-2.5 * 0.7)])
        assert np.max(np.abs(got - want)) < 1e-16


class TestSerialization:
    def test_polymap_round_trip_exact(self):
        h = make_h()
        assert PolyMap.from_json_dict(h.to_json_dict()).terms == h.terms

    def test_json_terms_are_graded_lex_sorted(self):
        p = PolyMap(2, 3, {(2, (3, 0)): 1.0, (1, (0, 2)): 1.0, (2, (1, 1)): 1.0, (1, (1, 0)): 1.0})
        rows = [(tuple(t["exponents"]), t["component"]) for t in p.to_json_dict()["terms"]]
        assert rows == [((1, 0), 1), ((0, 2), 1), ((1, 1), 2), ((3, 0), 2)]

    def test_vectorfield_round_trip_exact(self):
        vf = VectorField(
            (-1.0 - 1.0j, -2.0 - 1.0j), PolyMap(2, 2, {(2, (2, 0)): 0.5 + 0.25j}), radius=2.0
        )
        back = VectorField.from_json_dict(vf.to_json_dict())
        assert back.alpha == vf.alpha
        assert back.higher.terms == vf.higher.terms
        assert back.radius == vf.radius

    def test_json_text_round_trip(self):
        vf = VectorField((-1.0, -2.5), PolyMap(2, 2, {(2, (2, 0)): 1.0}))
        back = VectorField.from_json_dict(json.loads(json.dumps(vf.to_json_dict())))
        assert back.alpha == vf.alpha and back.higher.terms == vf.higher.terms

    @pytest.mark.parametrize(
        "mutate",
        [
            lambda d: d.update(extra=1),
            lambda d: d.pop("radius"),
            lambda d: d.__setitem__("dimension", "2"),
            lambda d: d["terms"].append(dict(d["terms"][0])),
            lambda d: d["terms"][0].__setitem__("coeff", [1.0]),
            lambda d: d["terms"][0].__setitem__("coeff", [True, 0.0]),
            lambda d: d["terms"][0].__setitem__("exponents", [2.0, 0]),
            lambda d: d["terms"][0].pop("component"),
        ],
    )
    def test_strict_schema_rejections(self, mutate):
        base = VectorField((-1.0, -2.5), PolyMap(2, 2, {(2, (2, 0)): 1.0})).to_json_dict()
        mutate(base)
        with pytest.raises(ValidationError):
            VectorField.from_json_dict(base)

    def test_polymap_unknown_key_rejected(self):
        d = make_h().to_json_dict()
        d["note"] = "x"
        with pytest.raises(ValidationError):
            PolyMap.from_json_dict(d)


# -- property tests ----------------------------------------------------------

DIM = 2


def _exponents(dim, lo, hi):
    out = []
    for total in range(lo, hi + 1):
        for k in itertools.product(range(total + 1), repeat=dim):
            if sum(k) == total:
                out.append(k)
    return out


small_real = st.floats(-1.0, 1.0, allow_nan=False, allow_infinity=False)
small_complex = st.builds(complex, small_real, small_real)


@st.composite
def origin_fixing_maps(draw, identity_linear=False, deg=3):
    terms = {}
    for _ in range(draw(st.integers(0, 4))):
        j = draw(st.integers(1, DIM))
        k = draw(st.sampled_from(_exponents(DIM, 2, deg)))
        terms[(j, k)] = draw(small_complex)
    for j in range(1, DIM + 1):
        unit = tuple(1 if q == j - 1 else 0 for q in range(DIM))
        terms[(j, unit)] = 1.0 if identity_linear else draw(small_complex)
    return PolyMap(DIM, deg, terms)


small_points = st.lists(
    st.builds(complex, st.floats(-0.5, 0.5), st.floats(-0.5, 0.5)),
    min_size=DIM,
    max_size=DIM,
)


@settings(max_examples=60, deadline=None)
@given(origin_fixing_maps(), origin_fixing_maps(), small_points)
def test_addition_is_pointwise(p, q, z):
    z = np.array(z)
    assert np.max(np.abs((p + q)(z) - (p(z) + q(z)))) < 1e-12


@settings(max_examples=60, deadline=None)
@given(origin_fixing_maps(), origin_fixing_maps(), small_points)
def test_compose_matches_pointwise_evaluation_on_full_degree(p, q, z):
    # truncation degree deg(p)*deg(q) loses nothing, so values must agree
    z = np.array(z)
    cap = max(1, p.degree() * max(q.degree(), 1))
    comp = p.compose(q, cap)
    assert np.max(np.abs(comp(z) - p(q(z)))) < 1e-9


@settings(max_examples=40, deadline=None)
@given(origin_fixing_maps(deg=2), origin_fixing_maps(deg=2), origin_fixing_maps(deg=2))
def test_compose_associativity_under_truncation(p, q, r):
    cap = 4
    left = p.compose(q, cap).compose(r, cap)
    right = p.compose(q.compose(r, cap), cap)
    keys = set(left.terms) | set(right.terms)
    gap = max((abs(left.terms.get(k, 0j) - right.terms.get(k, 0j)) for k in keys), default=0.0)
    assert gap < 1e-10


@settings(max_examples=40, deadline=None)
@given(origin_fixing_maps(identity_linear=True))
def test_inverse_round_trip(p):
    cap = 4
    q = p.inverse(cap)
    ident = PolyMap.identity(DIM, cap)
    for comp in (p.compose(q, cap), q.compose(p, cap)):
        keys = set(comp.terms) | set(ident.terms)
        gap = max(abs(comp.terms.get(k, 0j) - ident.terms.get(k, 0j)) for k in keys)
        assert gap < 1e-8


@settings(max_examples=60, deadline=None)
@given(origin_fixing_maps())
def test_serialization_round_trip_property(p):
    assert PolyMap.from_json_dict(json.loads(json.dumps(p.to_json_dict()))).terms == p.terms


@settings(max_examples=60, deadline=None)
@given(origin_fixing_maps(), small_points, st.permutations(list(range(1, DIM + 1))))
def test_permuted_conjugates_evaluation(p, z, perm):
    perm = tuple(perm)
    q = p.permuted(perm)
    z = np.array(z)
    # P sends e_{perm[i-1]} to e_i, so (Pz)_i = z_{perm[i-1]}
    pz = np.array([z[perm[i] - 1] for i in range(DIM)])
    lhs = q(pz)
    rhs_full = p(z)
    rhs = np.array([rhs_full[perm[i] - 1] for i in range(DIM)])
    assert np.max(np.abs(lhs - rhs)) < 1e-14


@settings(max_examples=60, deadline=None)
@given(origin_fixing_maps(), small_points)
def test_evaluate_is_insertion_order_independent(p, z):
    shuffled = dict(reversed(list(p.terms.items())))
    q = PolyMap(p.dimension, p.max_degree, shuffled)
    z = np.array(z)
    assert np.array_equal(p(z), q(z))
