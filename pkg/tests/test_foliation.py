"""Charts, deformations, the leafwise complex, the projective operator,
the connection solver, and the named chain-level identities."""

import pytest

from folchar.cdga import GeneratorDecl, Universe, wedge
from folchar.errors import ArgumentError, SolverError
from folchar.foliation import (DTHETA_SIGN, ChartFoliation, DeformationData,
                               VectorValuedForm, check_dtheta_power,
                               check_lemma21_closed, check_lp_lemma,
                               check_prop31_expansion, covariant_d,
                               lp_representative, projective_curvature,
                               solve_connection, theta_wedge, verify_identity)
from folchar.models import s3_chart, s3_connection_ansatz, s3_defining_form, s3_universe
from folchar.randgen import (lemma21_instance, lemma_lp_instance, normalized_chart,
                             prop31_instance, random_form, seeded_rng)
from folchar.scalars import ComplexRational, S_ONE, Scalar


def _flat_chart():
    u = Universe([
        GeneratorDecl("x", 0, differential="dx"),
        GeneratorDecl("y1", 0, differential="dy1"),
        GeneratorDecl("f", 0, differential="df"),
        GeneratorDecl("dx", 1),
        GeneratorDecl("df", 1),
        GeneratorDecl("dy1", 1, transverse=True),
    ])
    tau = [[u.zero()]]
    return u, ChartFoliation(1, "real", tau, [u.gen("dy1")])


def test_covariant_d_flat_connection():
    u, chart = _flat_chart()
    c = VectorValuedForm([u.gen("dx").scale(u.sym("f"))])
    out = covariant_d(c, chart)
    assert out[0] == wedge(u.gen("df"), u.gen("dx"))


def test_covariant_d_constant_section_gives_connection_row():
    rng = seeded_rng(7)
    chart = normalized_chart(1, rng)
    u = chart.universe
    c = VectorValuedForm([u.form(1)])
    out = covariant_d(c, chart)
    assert out[0] == chart.tau[0][0].reduce_transverse(1)


@pytest.mark.parametrize("q", [1, 2])
def test_covariant_d_squares_to_zero(q):
    rng = seeded_rng(11 + q)
    chart = normalized_chart(q, rng)
    u = chart.universe
    for _ in range(5):
        c = VectorValuedForm([random_form(rng, u, 1) for _ in range(q)])
        assert covariant_d(covariant_d(c, chart), chart).is_zero


@pytest.mark.parametrize("q", [1, 2])
def test_theta_wedge_preserves_closedness(q):
    rng = seeded_rng(23 + q)
    chart, cocycle, _ = lemma21_instance(q, rng)
    assert covariant_d(cocycle, chart).is_zero
    assert covariant_d(theta_wedge(chart, cocycle), chart).is_zero


@pytest.mark.parametrize("q", [1, 2])
def test_theta_wedge_sends_exact_to_exact(q):
    rng = seeded_rng(29 + q)
    chart, cocycle, potential = lemma21_instance(q, rng)
    image = theta_wedge(chart, cocycle)
    witness = covariant_d(theta_wedge(chart, potential).map(lambda x: -x), chart)
    diff = [a - b for a, b in zip(image, witness)]
    assert all(d.reduce_transverse(1).is_zero for d in diff)


def test_theta_wedge_zero_theta():
    u, chart = _flat_chart()
    c = VectorValuedForm([u.gen("dx")])
    assert theta_wedge(chart, c).is_zero


def test_projective_curvature_q1():
    # N_1 = df - (1/2) f^2 dy for theta = f dy
    u, _ = _flat_chart()
    chart = ChartFoliation(1, "real", [[u.gen("dy1").scale(u.sym("f"))]], [u.gen("dy1")])
    (n1,) = projective_curvature(chart)
    f = u.sym("f")
    half = Scalar.from_const(ComplexRational(1)) / Scalar.from_const(2)
    assert n1 == u.gen("df") - u.gen("dy1").scale(f * f * half)


def test_projective_curvature_q2():
    u = Universe([
        GeneratorDecl("y1", 0, differential="dy1"),
        GeneratorDecl("y2", 0, differential="dy2"),
        GeneratorDecl("f", 0, differential="df"),
        GeneratorDecl("g", 0, differential="dg"),
        GeneratorDecl("dy1", 1, transverse=True),
        GeneratorDecl("dy2", 1, transverse=True),
        GeneratorDecl("df", 1),
        GeneratorDecl("dg", 1),
    ])
    f, g = u.sym("f"), u.sym("g")
    tau = [[u.gen("dy1").scale(f), u.zero()], [u.zero(), u.gen("dy2").scale(g)]]
    chart = ChartFoliation(2, "real", tau, [u.gen("dy1"), u.gen("dy2")])
    n1, n2 = projective_curvature(chart)
    third = S_ONE / Scalar.from_const(3)
    assert n1 == u.gen("df") - u.gen("dy1").scale(f * f * third) \
        - u.gen("dy2").scale(f * g * third)
    assert n2 == u.gen("dg") - u.gen("dy1").scale(g * f * third) \
        - u.gen("dy2").scale(g * g * third)


def test_projective_curvature_zero_theta():
    u, chart = _flat_chart()
    for n in projective_curvature(chart):
        assert n.is_zero


def test_projective_curvature_requires_normal_form():
    u = s3_universe()
    chart = s3_chart(u)
    with pytest.raises(ArgumentError):
        projective_curvature(chart)


def test_lp_representative_zero_input():
    rng = seeded_rng(37)
    chart = normalized_chart(2, rng)
    u = chart.universe
    zero_vec = VectorValuedForm([u.zero(), u.zero()])
    assert lp_representative(chart, zero_vec).is_zero


def test_lp_representative_flat_theta_vanishes_for_q2():
    # d theta = 0 kills the (d theta)^(q-1) factor
    u = Universe([
        GeneratorDecl("y1", 0, differential="dy1"),
        GeneratorDecl("y2", 0, differential="dy2"),
        GeneratorDecl("a", 0, differential="da"),
        GeneratorDecl("dy1", 1, transverse=True),
        GeneratorDecl("dy2", 1, transverse=True),
        GeneratorDecl("da", 1),
    ])
    zero = u.zero()
    tau = [[zero, zero], [zero, zero]]
    chart = ChartFoliation(2, "real", tau, [u.gen("dy1"), u.gen("dy2")])
    c = VectorValuedForm([u.gen("da"), u.gen("da")])
    assert lp_representative(chart, c).is_zero


def test_lp_middle_line_expansion():
    # engine-vs-engine: lp(theta∧omega_dot) equals
    # -(sum_i df_i∧omega_dot^i)∧(dθ)^q - (1/q) theta∧theta_dot∧(dθ)^q
    rng = seeded_rng(41)
    for q in (1, 2):
        chart, deformation = lemma_lp_instance(q, rng)
        u = chart.universe
        lhs = lp_representative(chart, theta_wedge(chart, deformation.omega_dot))
        coframe = chart.normalized_coframe()
        pos_of = {idx: j for j, idx in enumerate(coframe)}
        fs = [None] * q
        for mono, s in chart.theta.terms.items():
            fs[pos_of[mono[0]]] = s
        dthq = chart.dtheta ** q
        first = u.zero()
        for i in range(q):
            first = first + u.form(fs[i]).d().wedge(deformation.omega_dot[i])
        invq = S_ONE / Scalar.from_const(q)
        rhs = -(first.wedge(dthq)) \
            - chart.theta.wedge(deformation.theta_dot).wedge(dthq).scale(invq)
        assert (lhs - rhs).is_zero


# -- connection solver -----------------------------------------------------------

def test_solver_s3_data_closed_form():
    u = s3_universe()
    omega = s3_defining_form(u)
    eta = solve_connection(omega, s3_connection_ansatz(u))
    l1, l2 = u.sym("lambda1"), u.sym("lambda2")
    h = l1 * u.sym("z1") * u.sym("z1b") + l2 * u.sym("z2") * u.sym("z2b")
    expected = (u.gen("dz1").scale(u.sym("z1b")) + u.gen("dz2").scale(u.sym("z2b"))) \
        .scale(-(l1 + l2) / h)
    assert eta == expected
    assert (omega.d() + eta.wedge(omega)).is_zero


def test_solver_closed_form_admits_zero():
    u = s3_universe()
    eta = solve_connection(u.gen("dz1"), s3_connection_ansatz(u))
    assert eta.is_zero


def test_solver_log_derivative_example():
    u = s3_universe()
    omega = u.gen("dz2").scale(u.sym("z1"))
    eta = solve_connection(omega, [u.gen("dz1").scale(S_ONE / u.sym("z1"))])
    assert eta == u.gen("dz1").scale(-(S_ONE / u.sym("z1")))


def test_solver_reports_irreducible_residual():
    u = s3_universe()
    omega = s3_defining_form(u)
    with pytest.raises(SolverError) as err:
        solve_connection(omega, [u.gen("dz1b")])
    assert err.value.residual is not None
    assert not err.value.residual.is_zero


# -- deformation data -------------------------------------------------------------

def test_deformation_relation_enforced():
    rng = seeded_rng(53)
    chart = normalized_chart(1, rng)
    u = chart.universe
    bad_tau_dot = ((u.gen("beta1"),),)
    with pytest.raises(ArgumentError):
        DeformationData(chart, (u.gen("beta1").scale(u.sym("g11")),), bad_tau_dot)


def test_deformation_from_parameter_satisfies_relation():
    chart = s3_chart()
    d = DeformationData.from_parameter(chart, "lambda1", scale=2)
    assert d.theta_dot == chart.tau[0][0].pderiv("lambda1").scale(Scalar.from_const(2))


def test_solve_tau_dot_rejects_leafwise_nonclosed():
    rng = seeded_rng(59)
    chart = normalized_chart(1, rng)
    u = chart.universe
    # g11 * beta1 has d(g11)∧beta1 with no transverse factor
    with pytest.raises(SolverError):
        DeformationData.solve_tau_dot(chart, (u.gen("beta1").scale(u.sym("g11")),))


# -- named identities --------------------------------------------------------------

@pytest.mark.parametrize("q", [1, 2, 3])
def test_dtheta_power_sign_table(q):
    rng = seeded_rng(61 + q)
    chart = normalized_chart(q, rng)
    rep = check_dtheta_power(chart)
    assert rep.passed
    assert rep.details["global_sign"] == DTHETA_SIGN == 1
    assert rep.details["parity_factor"] == (-1 if (q * (q - 1) // 2) % 2 else 1)


@pytest.mark.parametrize("q", [1, 2])
def test_lemma_lp_identity(q):
    rng = seeded_rng(67 + q)
    for _ in range(3):
        chart, deformation = lemma_lp_instance(q, rng)
        rep = check_lp_lemma(chart, deformation)
        assert rep.passed, str(rep.residual)


def test_lemma_lp_fails_without_deformation_relation():
    rng = seeded_rng(71)
    chart, deformation = lemma_lp_instance(2, rng)
    u = chart.universe
    # breaking tau_dot breaks the precondition: constructing the data fails
    # (dy2 in the first column wedges nontrivially against omega^1 = dy1)
    broken = [list(r) for r in deformation.tau_dot]
    broken[0][0] = broken[0][0] + u.gen("dy2")
    with pytest.raises(ArgumentError):
        DeformationData(chart, deformation.omega_dot.components, broken)


@pytest.mark.parametrize("q", [1, 2])
def test_prop31_expansion_symbolic_m(q):
    rng = seeded_rng(73 + q)
    eta, eta_dot, m = prop31_instance(q, rng)
    rep = check_prop31_expansion(eta, eta_dot, m, q)
    assert rep.passed
    assert rep.details["d_eta_twist_invariant"]


@pytest.mark.parametrize("q", [1, 2])
def test_lemma21_closed_identity(q):
    rng = seeded_rng(79 + q)
    chart, cocycle, _ = lemma21_instance(q, rng)
    rep = check_lemma21_closed(chart, cocycle)
    assert rep.passed


def test_verify_identity_dispatch_and_unknown():
    rng = seeded_rng(83)
    chart, deformation = lemma_lp_instance(1, rng)
    rep = verify_identity("lemma-LP", chart=chart, deformation=deformation)
    assert rep.passed
    with pytest.raises(ArgumentError):
        verify_identity("no-such-identity", chart=chart)
