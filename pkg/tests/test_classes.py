"""Class representatives, the circle twist, and fiber integration."""

import pytest

from folchar.classes import (PROP31_SIGN, bott_rep, dbott_rep, fiber_integrate,
                             fiber_integrate_class, flk_rep, s1_twist,
                             twopi_i_scalar, verify_prop31)
from folchar.errors import ArgumentError, DeclarationError, UnsupportedCoefficientError
from folchar.foliation import ChartFoliation, DeformationData
from folchar.cdga import GeneratorDecl, Universe
from folchar.models import s3_chart, s3_deformation, s3_universe
from folchar.scalars import S_ONE, Scalar


@pytest.fixture(scope="module")
def setup():
    u = s3_universe()
    chart = s3_chart(u)
    deformation = s3_deformation(chart)
    return u, chart, deformation


def test_bott_rep_structure(setup):
    u, chart, _ = setup
    rep = bott_rep(chart)
    assert rep.kind == "bott" and rep.q == 1
    assert rep.degree == 3 and rep.c_power == 2
    assert rep.rep == chart.theta.wedge(chart.theta.d())


def test_bott_rep_vanishes_for_closed_theta():
    u = Universe([
        GeneratorDecl("y", 0, differential="dy"),
        GeneratorDecl("dy", 1, transverse=True),
    ])
    chart = ChartFoliation(1, "real", [[u.gen("dy")]], [u.gen("dy")])
    assert bott_rep(chart).rep.is_zero


def test_bott_rep_vanishes_in_single_transverse_direction():
    # theta = f dy repeats dy against d(theta)
    u = Universe([
        GeneratorDecl("y", 0, differential="dy"),
        GeneratorDecl("f", 0, differential="df"),
        GeneratorDecl("dy", 1, transverse=True),
        GeneratorDecl("df", 1),
    ])
    chart = ChartFoliation(1, "real", [[u.gen("dy").scale(u.sym("f"))]], [u.gen("dy")])
    assert bott_rep(chart).rep.is_zero


def test_dbott_and_flk_linear_in_theta_dot(setup):
    u, chart, deformation = setup
    doubled = DeformationData(
        chart,
        tuple(w.scale(Scalar.from_const(2)) for w in deformation.omega_dot),
        tuple(tuple(e.scale(Scalar.from_const(2)) for e in row)
              for row in deformation.tau_dot))
    assert dbott_rep(chart, doubled).rep == dbott_rep(chart, deformation).rep.scale(
        Scalar.from_const(2))
    assert flk_rep(chart, doubled).rep == flk_rep(chart, deformation).rep.scale(
        Scalar.from_const(2))


def test_flk_degree_and_power(setup):
    from folchar.models import s3_deformation_gauged

    _, chart, deformation = setup
    # for this family theta_dot is proportional to theta, so the plain
    # representative collapses to the zero form
    assert flk_rep(chart, deformation).rep.is_zero
    gauged = s3_deformation_gauged(chart)
    rep = flk_rep(chart, gauged)
    assert not rep.rep.is_zero
    assert rep.degree == 4 and rep.c_power == 3


def test_zero_deformation_gives_zero_reps(setup):
    u, chart, _ = setup
    zero = DeformationData(chart, (u.zero(),), ((u.zero(),),))
    assert dbott_rep(chart, zero).rep.is_zero
    assert flk_rep(chart, zero).rep.is_zero


def test_s1_twist_identity_and_composition(setup):
    u, chart, _ = setup
    assert s1_twist(chart, 0) is chart
    tw = s1_twist(chart, 2)
    assert tw.twist_index == 2
    dt_over_t = u.gen("dt").scale(S_ONE / u.sym("t"))
    assert tw.theta == chart.theta - dt_over_t.scale(Scalar.from_const(2))
    tw2 = s1_twist(tw, -1)
    assert tw2.twist_index == 1
    assert tw2.theta == chart.theta - dt_over_t
    # d(theta) is twist-invariant
    assert tw.dtheta == chart.dtheta


def test_s1_twist_requires_fiber_coordinate(setup):
    _, chart, _ = setup
    with pytest.raises(DeclarationError):
        s1_twist(chart, 1, fiber="nope")


def test_s1_twist_parallel_trivialization_residual(setup):
    # the defining check d(t^m Ω) + theta°∧(t^m Ω) = 0 holds exactly
    _, chart, _ = setup
    for m in (-2, 1, 3):
        s1_twist(chart, m)  # raises on a non-parallel trivialization


def test_fiber_integrate_no_dt_is_zero(setup):
    u, chart, _ = setup
    assert fiber_integrate(bott_rep(chart).rep).is_zero


def test_fiber_integrate_residue(setup):
    u, _, _ = setup
    dt_over_t = u.gen("dt").scale(S_ONE / u.sym("t"))
    beta = u.gen("dz1").scale(u.sym("z1b"))
    out = fiber_integrate(dt_over_t.wedge(beta))
    assert out == beta.scale(twopi_i_scalar(u, "holomorphic"))
    # t (dt/t) ∧ beta integrates to zero: no residue
    assert fiber_integrate(dt_over_t.scale(u.sym("t")).wedge(beta)).is_zero


def test_fiber_integrate_laurent_required(setup):
    u, _, _ = setup
    bad = u.gen("dt").scale(S_ONE / (S_ONE + u.sym("t")))
    with pytest.raises(UnsupportedCoefficientError):
        fiber_integrate(bad)


def test_fiber_volume_normalization(setup):
    u, _, _ = setup
    dt_over_t = u.gen("dt").scale(S_ONE / u.sym("t"))
    vol = dt_over_t.scale(S_ONE / twopi_i_scalar(u, "holomorphic"))
    assert fiber_integrate(vol) == u.form(1)


def test_fiber_integrate_needs_reserved_symbol():
    u = Universe([
        GeneratorDecl("t", 0, differential="dt"),
        GeneratorDecl("x", 0, differential="dx"),
        GeneratorDecl("dt", 1),
        GeneratorDecl("dx", 1),
    ])
    a = u.gen("dt").scale(S_ONE / u.sym("t")).wedge(u.gen("dx"))
    with pytest.raises(DeclarationError):
        fiber_integrate(a)
    # forms without dt never need it
    assert fiber_integrate(u.gen("dx").scale(u.sym("x"))).is_zero


@pytest.mark.parametrize("m", [-1, 0, 1, 2])
def test_verify_prop31_all_twists(setup, m):
    _, chart, deformation = setup
    rep = verify_prop31(chart, deformation, m)
    assert rep.sigma == PROP31_SIGN == 1
    assert rep.decomposition_residual.is_zero
    assert rep.fiber_residual.is_zero
    assert rep.passed


def test_prop31_m0_reduces_to_pullback(setup):
    _, chart, deformation = setup
    rep0 = verify_prop31(chart, deformation, 0)
    assert rep0.passed
    # untwisted: fiber integration of the representative is exactly zero
    assert fiber_integrate(flk_rep(chart, deformation).rep).is_zero


def test_fiber_integrate_class_keeps_bookkeeping(setup):
    _, chart, deformation = setup
    tw = s1_twist(chart, 1)
    flk0 = flk_rep(tw, deformation.on_chart(tw))
    fibered = fiber_integrate_class(flk0)
    assert fibered.c_power == flk0.c_power
    assert fibered.kind == "flk"
    # pi_! FLK° = -m DBott exactly once the 2πi factor (=-1/c) is matched
    dbott = dbott_rep(chart, deformation)
    c = Scalar.var("c")
    assert fibered.rep.scale(c) == dbott.rep.scale(Scalar.from_const(-1))
