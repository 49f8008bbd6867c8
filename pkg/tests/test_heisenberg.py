"""Formal group-law layer, twisted kernels, squared-ladder sl(2)."""

import dataclasses
import math
from fractions import Fraction

import pytest

from umbra.core import CapMismatchError, CapShortfallError, ParameterError
from umbra.heisenberg import (
    DiscreteKernel,
    composition_check_formal,
    generic_sl2_ladder,
    group_law_check,
    heisenberg_rep_formal,
    metaplectic,
    metaplectic_check,
    metaplectic_sequences,
    rep_of_kernel,
    sl2_closure_check,
    twisted_convolve,
    twisted_convolve_check,
    weyl_relation_check,
)
from umbra.core import LinearOp, exp_nilpotent_matrix, exp_raising_matrix
from umbra.models import build_model
from umbra.reports import PASS

NU = Fraction(5, 2)


# -- the formal series itself ------------------------------------------

def test_rep_series_low_order_coefficients():
    m = build_model("monomial", 8)
    pi = heisenberg_rep_formal(m, 3)
    ident = LinearOp.identity(m.degree_cap)
    assert pi.materialize((0, 0, 0)) == ident
    # s, x, y slots in that order
    assert pi.materialize((0, 0, 1)) == m.lowering.scale(-1)
    assert pi.materialize((0, 1, 0)) == m.raising.scale(-1)
    assert pi.materialize((1, 0, 0)) == ident.scale(-1)
    assert pi.materialize((0, 1, 1)) == m.lowering @ m.raising
    assert pi.materialize((0, 0, 2)) == (m.lowering @ m.lowering).scale(
        Fraction(1, 2)
    )


def test_rep_series_needs_headroom():
    with pytest.raises(CapShortfallError):
        heisenberg_rep_formal(build_model("monomial", 3), 4)


# -- group law ---------------------------------------------------------

def test_group_law_monomials_order_six():
    m = build_model("monomial", 10)
    r = group_law_check(m, 6)
    assert r.status == PASS and r.max_residual == 0


def test_group_law_heat():
    r = group_law_check(build_model("heat", 8), 4)
    assert r.status == PASS


def test_group_law_flags_corrupted_commutator():
    m = build_model("monomial", 10)
    bad = dataclasses.replace(m, raising=m.raising.scale(2))
    r = group_law_check(bad, 3)
    assert r.status != PASS
    idx = r.first_failure["multi_index"]
    assert sum(idx.values()) == 2
    assert idx == {"x1": 1, "y2": 1}


def test_group_law_cap_shortfall():
    with pytest.raises(CapShortfallError):
        group_law_check(build_model("monomial", 5), 4, output_degree=4)


# -- Weyl reordering ---------------------------------------------------

def test_weyl_relation_monomials():
    r = weyl_relation_check(build_model("monomial", 10), 6)
    assert r.status == PASS and r.max_residual == 0


def test_weyl_relation_first_order_is_commutator():
    # at order 1 the identity e^(yL)e^(xR) = e^(xy)e^(xR)e^(yL) carries
    # exactly the [L,R] = I relation in its x^1 y^1 slot
    r = weyl_relation_check(build_model("monomial", 6), 1)
    assert r.status == PASS


def test_weyl_relation_bessel():
    r = weyl_relation_check(build_model("bessel", 8, nu=3), 4)
    assert r.status == PASS


def test_composition_formal_monomials():
    r = composition_check_formal(build_model("monomial", 12), 5)
    assert r.status == PASS and r.max_residual == 0


def test_composition_formal_lower_factorial():
    r = composition_check_formal(build_model("lower-factorial", 10), 4)
    assert r.status == PASS


def test_composition_formal_first_order():
    r = composition_check_formal(build_model("monomial", 6), 1)
    assert r.status == PASS


# -- discrete kernels and the twisted product --------------------------

def test_twisted_reorder_atom():
    k1 = DiscreteKernel.atom(1, 0, x=1, y=0)
    k2 = DiscreteKernel.atom(1, 0, x=0, y=1)
    out = twisted_convolve(k1, k2)
    assert out == DiscreteKernel.atom(1, -1, x=1, y=1)


def test_twisted_delta_is_identity():
    k = DiscreteKernel.atom(Fraction(3, 2), Fraction(1, 3), x=2, y=-1)
    assert twisted_convolve(k, DiscreteKernel.delta()) == k
    assert twisted_convolve(DiscreteKernel.delta(), k) == k


def test_twisted_no_phase_when_x1_vanishes():
    k1 = DiscreteKernel.atom(2, 0, x=0, y=Fraction(1, 2))
    k2 = DiscreteKernel.atom(3, 0, x=5, y=7)
    out = twisted_convolve(k1, k2)
    assert out == DiscreteKernel.atom(6, 0, x=5, y=Fraction(15, 2))


def test_twisted_associative_three_atoms():
    k1 = DiscreteKernel.atom(1, 0, x=1, y=2)
    k2 = DiscreteKernel.atom(Fraction(1, 2), Fraction(1, 5), x=-1, y=Fraction(1, 3))
    k3 = DiscreteKernel.atom(3, -1, x=Fraction(2, 7), y=-2)
    assert twisted_convolve(twisted_convolve(k1, k2), k3) == twisted_convolve(
        k1, twisted_convolve(k2, k3)
    )


def test_twisted_convolve_check_report():
    assert twisted_convolve_check().status == PASS


def test_kernel_json_round_trip():
    k = DiscreteKernel.atom(1, 0, 1, 2) + DiscreteKernel.atom(
        Fraction(-2, 3), Fraction(1, 7), Fraction(5, 2), 0
    )
    assert DiscreteKernel.from_json(k.to_json()) == k


def test_kernel_json_lenient_defaults_and_rejections():
    assert DiscreteKernel.from_obj([{"coef": "1"}]) == DiscreteKernel.delta()
    with pytest.raises(ParameterError):
        DiscreteKernel.from_obj([{"x": "1"}])  # no coefficient
    with pytest.raises(ParameterError):
        DiscreteKernel.from_obj([{"coef": "one"}])
    with pytest.raises(ParameterError):
        DiscreteKernel.from_json('{"coef": "1"}')  # not an array


# -- operator representation of kernels --------------------------------

def test_rep_lowering_only_kernel_is_exact():
    m = build_model("monomial", 8)
    rep = rep_of_kernel(m, DiscreteKernel.atom(1, 0, x=0, y=Fraction(1, 2)))
    assert not rep.truncated
    op = rep.linear_op()
    assert op == exp_nilpotent_matrix(m.lowering, Fraction(1, 2))


def test_rep_delta_is_identity():
    m = build_model("monomial", 6)
    rep = rep_of_kernel(m, DiscreteKernel.delta())
    assert rep.linear_op() == LinearOp.identity(m.degree_cap)


def test_rep_raising_kernel_sets_flag():
    m = build_model("monomial", 6)
    rep = rep_of_kernel(m, DiscreteKernel.atom(1, 0, x=1, y=0))
    assert rep.truncated
    assert rep.linear_op() == exp_raising_matrix(m.raising, 1)


def test_rep_rejects_mismatched_working_cap():
    m = build_model("monomial", 6)
    with pytest.raises(CapMismatchError):
        rep_of_kernel(m, DiscreteKernel.delta(), n_work=8)


def test_rep_irrational_weight_refuses_collapse():
    m = build_model("monomial", 6)
    rep = rep_of_kernel(m, DiscreteKernel.atom(1, Fraction(1, 2), x=0, y=1))
    with pytest.raises(ParameterError):
        rep.linear_op()
    mat = rep.float_matrix()
    assert mat[0][0] == pytest.approx(math.exp(0.5))


def test_rep_is_homomorphism_exactly_when_no_reorder_needed():
    m = build_model("monomial", 8)
    k1 = DiscreteKernel.atom(1, 0, x=0, y=Fraction(1, 3))
    k2 = DiscreteKernel.atom(1, 0, x=Fraction(1, 4), y=0)
    lhs = rep_of_kernel(m, k1).linear_op() @ rep_of_kernel(m, k2).linear_op()
    rhs = rep_of_kernel(m, twisted_convolve(k1, k2)).linear_op()
    assert lhs == rhs


def test_rep_is_homomorphism_numerically_with_reorder():
    m = build_model("monomial", 16)
    k1 = DiscreteKernel.atom(1, 0, x=Fraction(1, 8), y=Fraction(1, 9))
    k2 = DiscreteKernel.atom(1, 0, x=Fraction(1, 7), y=Fraction(1, 10))
    a = rep_of_kernel(m, k1).float_matrix()
    b = rep_of_kernel(m, k2).float_matrix()
    c = rep_of_kernel(m, twisted_convolve(k1, k2)).float_matrix()
    n = len(a)
    for i in range(n):
        for j in range(5):  # columns far from the cap
            ab = sum(a[i][r] * b[r][j] for r in range(n))
            assert ab == pytest.approx(c[i][j], abs=1e-12)


# -- squared ladders ---------------------------------------------------

def test_metaplectic_bracket_on_vacuum_vector():
    m = build_model("monomial", 8)
    s = metaplectic(m)
    comm = (s.lower2 @ s.raise2) - (s.raise2 @ s.lower2)
    p0 = m.basis[0]
    assert comm.apply(p0) == p0.scale(2)
    assert (s.z.apply(p0)) == p0.scale(Fraction(1, 2))


def test_metaplectic_constants_fixed():
    for name, nu, n in (
        ("monomial", None, 8),
        ("hermite", None, 8),
        ("heat", None, 6),
        ("bessel", NU, 6),
    ):
        s = metaplectic(build_model(name, n, nu=nu))
        assert s.constants == (4, -2, 2), name


@pytest.mark.parametrize(
    "name,nu,n",
    [
        ("monomial", None, 10),
        ("lower-factorial", None, 10),
        ("upper-factorial", None, 10),
        ("hermite", None, 10),
        ("heat", None, 6),
        ("bessel", NU, 6),
    ],
)
def test_metaplectic_check_catalog(name, nu, n):
    for r in metaplectic_check(build_model(name, n, nu=nu)):
        assert r.status == PASS, (name, r.check)


def test_sl2_closure_check_catalog():
    for name, nu, n in (
        ("monomial", None, 10),
        ("heat", None, 6),
        ("bessel", NU, 6),
    ):
        assert sl2_closure_check(build_model(name, n, nu=nu)).status == PASS


def test_metaplectic_sequences_are_model_independent():
    # L^2, R^2, RL + 1/2 act diagonally the same way in every model
    for name, nu, n in (("monomial", None, 8), ("heat", None, 8)):
        m = build_model(name, n, nu=nu)
        a, b, c = metaplectic_sequences(m)
        top = len(a) - 1
        assert a[0] == 0 and all(a[k] == 1 for k in range(1, top + 1))
        assert all(
            b[k] == (2 * k + 1) * (2 * k + 2) for k in range(top)
        )
        assert all(c[k] == 2 * k + Fraction(1, 2) for k in range(top + 1))


def test_generic_ladder_quadratic_sequence_closes():
    n = 8
    a = [k * k for k in range(n + 1)]
    b = [1] * (n + 1)
    c = [2 * k + 1 for k in range(n + 1)]
    res = generic_sl2_ladder(a, b, c)
    assert res.ok
    assert res.lam_plus == 2 and res.lam_minus == -2
    # [lower, raise] p_n = (a_{n+1} b_n - a_n b_{n-1}) p_n = (2n+1) p_n
    # = 1 * c_n, so the bracket closes with lam = 1 here
    assert res.lam == 1


def test_generic_ladder_abelian():
    res = generic_sl2_ladder([0] * 5, [0] * 5, [0] * 5)
    assert res.ok
    assert res.constants == (0, 0, 0)


def test_generic_ladder_rejects_perturbed_sequence():
    m = build_model("heat", 8)
    a, b, c = metaplectic_sequences(m)
    c = list(c)
    c[3] += 1
    res = generic_sl2_ladder(a, b, c)
    assert not res.ok
    assert res.first_violation is not None


def test_generic_ladder_consistent_with_metaplectic():
    for name, nu in (("monomial", None), ("bessel", NU)):
        m = build_model(name, 8, nu=nu)
        res = generic_sl2_ladder(*metaplectic_sequences(m))
        assert res.ok
        assert res.constants == (4, -2, 2), name


def test_generic_ladder_input_validation():
    with pytest.raises(ParameterError):
        generic_sl2_ladder([0, 1], [0, 1], [0])
    with pytest.raises(ParameterError):
        generic_sl2_ladder([0], [0], [0])
