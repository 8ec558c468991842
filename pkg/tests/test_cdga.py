"""The graded algebra: wedge, exterior derivative, ideal reduction,
parameter derivatives, rewrite rules."""

import pytest

from folchar.cdga import (FormExpr, GeneratorDecl, RewriteRule, RewriteSystem,
                          Universe, exterior_d, param_derivative, reduce_mod_ideal,
                          wedge)
from folchar.errors import ArgumentError, DeclarationError, RewriteError
from folchar.randgen import property_universe, random_form, seeded_rng
from folchar.scalars import Poly, S_ONE, Scalar


@pytest.fixture()
def s3u():
    return Universe([
        GeneratorDecl("z1", 0, differential="dz1", conjugate="z1b"),
        GeneratorDecl("z1b", 0, differential="dz1b", conjugate="z1"),
        GeneratorDecl("z2", 0, differential="dz2", conjugate="z2b"),
        GeneratorDecl("z2b", 0, differential="dz2b", conjugate="z2"),
        GeneratorDecl("lambda1", 0),
        GeneratorDecl("lambda2", 0),
        GeneratorDecl("dz1", 1),
        GeneratorDecl("dz1b", 1),
        GeneratorDecl("dz2", 1),
        GeneratorDecl("dz2b", 1),
    ])


def test_wedge_repeated_generator_vanishes(s3u):
    dz1 = s3u.gen("dz1")
    assert wedge(dz1, dz1).is_zero


def test_wedge_anticommutes_on_one_forms(s3u):
    dz1, dz2 = s3u.gen("dz1"), s3u.gen("dz2")
    assert wedge(dz1, dz2) == -wedge(dz2, dz1)


def test_wedge_coefficient_bilinearity(s3u):
    f, g = s3u.sym("z1"), s3u.sym("z2")
    a = s3u.gen("dz1").scale(f)
    b = s3u.gen("dz2").scale(g)
    assert wedge(a, b) == wedge(s3u.gen("dz1"), s3u.gen("dz2")).scale(f * g)


def test_wedge_rejects_mixed_universes(s3u):
    other = Universe([GeneratorDecl("w", 0, differential="dw"), GeneratorDecl("dw", 1)])
    with pytest.raises(DeclarationError):
        wedge(s3u.gen("dz1"), other.gen("dw"))


def test_exterior_d_declared_differential(s3u):
    assert exterior_d(s3u.form(s3u.sym("z1"))) == s3u.gen("dz1")


def test_exterior_d_leibniz_oracle(s3u):
    # hand oracle: d(l2 z2 dz1 - l1 z1 dz2) = -(l1+l2) dz1∧dz2
    l1, l2 = s3u.sym("lambda1"), s3u.sym("lambda2")
    omega = s3u.gen("dz1").scale(l2 * s3u.sym("z2")) - s3u.gen("dz2").scale(l1 * s3u.sym("z1"))
    expected = wedge(s3u.gen("dz1"), s3u.gen("dz2")).scale(-(l1 + l2))
    assert exterior_d(omega) == expected


def test_exterior_d_squared_zero(s3u):
    a = s3u.form(s3u.sym("z1") * s3u.sym("z2"))
    assert exterior_d(exterior_d(a)).is_zero


def test_reduce_mod_ideal_definition():
    u = Universe([
        GeneratorDecl("x1", 0, differential="dx1"),
        GeneratorDecl("x2", 0, differential="dx2"),
        GeneratorDecl("y1", 0, differential="dy1"),
        GeneratorDecl("dx1", 1),
        GeneratorDecl("dx2", 1),
        GeneratorDecl("dy1", 1, transverse=True),
    ])
    g, h = u.sym("x1"), u.sym("x2")
    a = wedge(u.gen("dx1"), u.gen("dy1")).scale(g) + wedge(u.gen("dx1"), u.gen("dx2")).scale(h)
    assert reduce_mod_ideal(a, 1) == wedge(u.gen("dx1"), u.gen("dx2")).scale(h)
    with pytest.raises(ArgumentError):
        reduce_mod_ideal(a, 0)


def test_reduce_mod_ideal_two_transverse_factors():
    u = Universe([
        GeneratorDecl("y1", 0, differential="dy1"),
        GeneratorDecl("y2", 0, differential="dy2"),
        GeneratorDecl("dy1", 1, transverse=True),
        GeneratorDecl("dy2", 1, transverse=True),
    ])
    a = wedge(u.gen("dy1"), u.gen("dy2"))
    assert reduce_mod_ideal(a, 2).is_zero
    assert reduce_mod_ideal(a, 3) == a


def test_param_derivative_examples(s3u):
    lam = s3u.sym("lambda1")
    a = s3u.gen("dz1").scale(lam * s3u.sym("z1b"))
    assert param_derivative(a, "lambda1") == s3u.gen("dz1").scale(s3u.sym("z1b"))
    with pytest.raises(ArgumentError):
        param_derivative(a, "z1")  # has a linked differential: not a parameter


def test_universe_extension_and_lift(s3u):
    bigger = s3u.extend([GeneratorDecl("u0", 0)])
    a = s3u.gen("dz1").scale(s3u.sym("z1"))
    lifted = bigger.lift(a)
    assert lifted.universe is bigger
    assert str(lifted) == str(a)
    with pytest.raises(DeclarationError):
        s3u.lift(bigger.form(bigger.sym("u0")))


def test_rewrite_sphere_relation():
    m = lambda **kw: tuple(sorted(kw.items()))
    rs = RewriteSystem([
        RewriteRule(m(z1=1, z1b=1), Poly.const(1) - Poly.var("z2") * Poly.var("z2b")),
    ])
    h = Poly.var("z1") * Poly.var("z1b") + Poly.var("z2") * Poly.var("z2b")
    assert rs.reduce_poly(h) == Poly.const(1)


def test_rewrite_termination_rejected():
    m = lambda **kw: tuple(sorted(kw.items()))
    # the rhs monomial z1*z1b is larger than the lhs z2*z2b
    with pytest.raises(RewriteError):
        RewriteSystem([RewriteRule(
            m(z2=1, z2b=1), Poly.const(1) - Poly.var("z1") * Poly.var("z1b"))])


def test_rewrite_confluence_rejected():
    m = lambda **kw: tuple(sorted(kw.items()))
    with pytest.raises(RewriteError):
        RewriteSystem([
            RewriteRule(m(x=1, y=1), Poly.const(1)),
            RewriteRule(m(x=1, z=1), Poly.var("y")),
        ])


def test_rewrite_on_forms():
    m = lambda **kw: tuple(sorted(kw.items()))
    u = Universe([
        GeneratorDecl("z1", 0, differential="dz1"),
        GeneratorDecl("z1b", 0),
        GeneratorDecl("z2", 0),
        GeneratorDecl("z2b", 0),
        GeneratorDecl("dz1", 1),
    ], rewrites=None)
    rs = RewriteSystem([
        RewriteRule(m(z1=1, z1b=1), Poly.const(1) - Poly.var("z2") * Poly.var("z2b")),
    ])
    h = u.sym("z1") * u.sym("z1b") + u.sym("z2") * u.sym("z2b")
    a = u.gen("dz1").scale(h)
    assert a.rewrite(rs) == u.gen("dz1")


# -- randomized structural properties -------------------------------------------

def _random_pair(u, rng, dmax=2):
    da = rng.randint(0, dmax)
    db = rng.randint(0, dmax)
    return random_form(rng, u, da), random_form(rng, u, db), da, db


def test_graded_commutativity_randomized():
    u = property_universe()
    rng = seeded_rng(101)
    for _ in range(100):
        a, b, da, db = _random_pair(u, rng)
        sign = -1 if (da * db) % 2 else 1
        assert (wedge(a, b) - wedge(b, a).scale(sign)).is_zero


def test_d_squared_zero_randomized():
    u = property_universe()
    rng = seeded_rng(102)
    for _ in range(100):
        a = random_form(rng, u, rng.randint(0, 2))
        assert exterior_d(exterior_d(a)).is_zero


def test_leibniz_randomized():
    u = property_universe()
    rng = seeded_rng(103)
    for _ in range(100):
        a, b, da, db = _random_pair(u, rng)
        sign = -1 if da % 2 else 1
        lhs = exterior_d(wedge(a, b))
        rhs = wedge(exterior_d(a), b) + wedge(a, exterior_d(b)).scale(sign)
        assert (lhs - rhs).is_zero


def test_reduce_idempotent_and_monotone_randomized():
    u = property_universe()
    rng = seeded_rng(104)
    for _ in range(100):
        a = random_form(rng, u, rng.randint(0, 3))
        k1, k2 = rng.randint(1, 3), rng.randint(1, 3)
        assert reduce_mod_ideal(reduce_mod_ideal(a, k1), k1) == reduce_mod_ideal(a, k1)
        assert reduce_mod_ideal(reduce_mod_ideal(a, k1), k2) == \
            reduce_mod_ideal(a, min(k1, k2))


def test_param_derivative_commutes_with_d_randomized():
    u = property_universe()
    rng = seeded_rng(105)
    for _ in range(100):
        a = random_form(rng, u, rng.randint(0, 2))
        assert (param_derivative(exterior_d(a), "lam")
                - exterior_d(param_derivative(a, "lam"))).is_zero
