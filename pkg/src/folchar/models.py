"""The built-in transversely holomorphic family on the three-sphere.

The foliation is defined by omega = lambda2 z2 dz1 - lambda1 z1 dz2 on
the unit sphere in C^2; the connection form is solved from the ansatz
{z1b dz1 / h, z2b dz2 / h} with h = lambda1 z1 z1b + lambda2 z2 z2b,
giving eta = -(lambda1+lambda2)(z1b dz1 + z2b dz2)/h.  Numerically the
family is driven through lambda = lambda1 with lambda2 = 1, so the class
coefficients are

    bott(lambda)  = lambda + 2 + 1/lambda,
    dbott(lambda) = 1 - 1/lambda^2,
    fiber-integrated flk at twist m = -m (1 - 1/lambda^2).

The deformation representative is the lambda-derivative of the chart
data scaled by q + 1 = 2: integrating theta∧(d theta)^q by parts gives
d/dlambda ∫ theta∧(d theta)^q = (q+1) ∫ theta_dot∧(d theta)^q, so the
scale makes the dbott coefficient equal the actual derivative of the
bott coefficient, which is what the finite-difference cross-check and
the closed forms above require.
"""

from __future__ import annotations

import math

from .cdga import FormExpr, GeneratorDecl, Universe
from .classes import ClassRep, bott_rep, dbott_rep, fiber_integrate, flk_rep, s1_twist
from .errors import ArgumentError
from .foliation import ChartFoliation, DeformationData, solve_connection
from .numeric import (FormIntegrator, ParamManifold, QuadratureSpec, builtin,
                      class_coefficient, category_constant)
from .scalars import S_ONE

LAMBDA2_VALUE = 1.0 + 0.0j
DERIVATIVE_SCALE = 2  # q + 1 for q = 1


def s3_universe() -> Universe:
    return Universe([
        GeneratorDecl("z1", 0, differential="dz1", conjugate="z1b"),
        GeneratorDecl("z1b", 0, differential="dz1b", conjugate="z1"),
        GeneratorDecl("z2", 0, differential="dz2", conjugate="z2b"),
        GeneratorDecl("z2b", 0, differential="dz2b", conjugate="z2"),
        GeneratorDecl("t", 0, differential="dt"),
        GeneratorDecl("lambda1", 0),
        GeneratorDecl("lambda2", 0),
        GeneratorDecl("c", 0),
        GeneratorDecl("dz1", 1),
        GeneratorDecl("dz1b", 1),
        GeneratorDecl("dz2", 1),
        GeneratorDecl("dz2b", 1),
        GeneratorDecl("dt", 1),
    ])


def s3_defining_form(u: Universe) -> FormExpr:
    l1, l2 = u.sym("lambda1"), u.sym("lambda2")
    return u.gen("dz1").scale(l2 * u.sym("z2")) - u.gen("dz2").scale(l1 * u.sym("z1"))


def s3_connection_ansatz(u: Universe):
    z1b, z2b = u.sym("z1b"), u.sym("z2b")
    h = u.sym("lambda1") * u.sym("z1") * z1b + u.sym("lambda2") * u.sym("z2") * z2b
    return [u.gen("dz1").scale(z1b / h), u.gen("dz2").scale(z2b / h)]


def s3_chart(u: Universe | None = None) -> ChartFoliation:
    u = u or s3_universe()
    omega = s3_defining_form(u)
    eta = solve_connection(omega, s3_connection_ansatz(u))
    return ChartFoliation(1, "holomorphic", [[eta]], [omega])


def s3_deformation(chart: ChartFoliation) -> DeformationData:
    """The lambda-variation of the family, normalized so the class value
    is the honest derivative of the Bott coefficient."""
    return DeformationData.from_parameter(chart, "lambda1", scale=DERIVATIVE_SCALE)


def s3_degree4_witness(chart: ChartFoliation) -> FormExpr:
    """(d theta)^2: a nonzero degree-4 form attached to the family whose
    pullback to the three-sphere vanishes purely through the rank of the
    parametrization (the untwisted flk representative itself collapses to
    the zero form here, since every admissible theta_dot stays in the
    span of dz1, dz2)."""
    return chart.dtheta ** 2


def s3_volume_form(u: Universe | None = None) -> FormExpr:
    """z1b dz1 ∧ dz2b ∧ dz2, signed so its built-in integral is +2π²."""
    u = u or s3_universe()
    form = u.gen("dz1").scale(u.sym("z1b")).wedge(u.gen("dz2b")).wedge(u.gen("dz2"))
    from .numeric import S3_ORIENTATION

    return form.scale(S3_ORIENTATION)


def assert_regular_lambda(lam: complex):
    """The ratio lambda must avoid the closed negative real axis, where
    h = lambda |z1|^2 + |z2|^2 vanishes somewhere on the sphere."""
    if lam == 0 or (lam.imag == 0 and lam.real < 0):
        raise ArgumentError(
            f"lambda = {lam} is on the closed negative real axis; the family is singular there")


def family_params(lam: complex) -> dict:
    assert_regular_lambda(complex(lam))
    return {"lambda1": complex(lam), "lambda2": LAMBDA2_VALUE}


class S3Family:
    """Compiled integrators for the family's class coefficients.

    The symbolic representatives are lambda-independent, so each form is
    compiled against the quadrature grid once and swept by rebinding the
    parameter; twist indices get their own fiber-integrated compilations.
    """

    def __init__(self, quad: QuadratureSpec | None = None):
        self.quad = quad or QuadratureSpec()
        self.universe = s3_universe()
        self.chart = s3_chart(self.universe)
        self.deformation = s3_deformation(self.chart)
        self.manifold = builtin("s3")
        self._bott = bott_rep(self.chart)
        self._dbott = dbott_rep(self.chart, self.deformation)
        self._flk = flk_rep(self.chart, self.deformation)
        self._integrators: dict = {}

    def _coefficient(self, key: str, rep: ClassRep, lam: complex) -> complex:
        if rep.rep.is_zero:
            return 0.0 + 0.0j
        integ = self._integrators.get(key)
        if integ is None:
            integ = FormIntegrator(rep.rep, self.manifold, self.quad)
            self._integrators[key] = integ
        params = family_params(lam)
        params["c"] = category_constant("holomorphic")
        value = integ.integrate(params)
        return (params["c"] ** rep.c_power) * value

    def bott(self, lam: complex) -> complex:
        return self._coefficient("bott", self._bott, lam)

    def dbott(self, lam: complex) -> complex:
        return self._coefficient("dbott", self._dbott, lam)

    def flk_rep(self) -> ClassRep:
        """The untwisted degree-4 representative (pulls back to zero)."""
        return self._flk

    def flk_fiber(self, lam: complex, m: int) -> complex:
        """Fiber-integrated coefficient of the twisted class at index m."""
        if m == 0:
            return 0.0 + 0.0j
        key = f"flk_fiber_m{m}"
        rep = self._integrators.get(key + ":rep")
        if rep is None:
            twisted = s1_twist(self.chart, m)
            flk0 = flk_rep(twisted, self.deformation.on_chart(twisted))
            form = fiber_integrate(flk0.rep)
            rep = ClassRep("flk", flk0.q, flk0.c_power, form, m)
            self._integrators[key + ":rep"] = rep
        return self._coefficient(key, rep, lam)

    def sweep(self, start: complex, stop: complex, steps: int, m: int):
        """Rows (lambda, bott, dbott, flk_fiber) on an evenly spaced path."""
        if steps < 1:
            raise ArgumentError("steps must be >= 1")
        rows = []
        for k in range(steps):
            frac = 0.0 if steps == 1 else k / (steps - 1)
            lam = start + (stop - start) * frac
            rows.append((lam, self.bott(lam), self.dbott(lam),
                         self.flk_fiber(lam, m)))
        return rows


def bott_closed_form(lam: complex) -> complex:
    return lam + 2.0 + 1.0 / lam


def dbott_closed_form(lam: complex) -> complex:
    return 1.0 - 1.0 / (lam * lam)


def flk_fiber_closed_form(lam: complex, m: int) -> complex:
    return -m * dbott_closed_form(lam)


def derivative_crosscheck(family: S3Family, lambda0: complex, h: float) -> dict:
    """Central finite difference of the Bott coefficient against the
    dbott coefficient at lambda0; both avoid the singular axis."""
    assert_regular_lambda(complex(lambda0) + h)
    assert_regular_lambda(complex(lambda0) - h)
    fd = (family.bott(lambda0 + h) - family.bott(lambda0 - h)) / (2.0 * h)
    db = family.dbott(lambda0)
    return {
        "lambda0": complex(lambda0),
        "step": h,
        "finite_difference": fd,
        "dbott": db,
        "difference": fd - db,
    }
