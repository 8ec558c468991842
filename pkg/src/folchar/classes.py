"""Characteristic-class representatives, the circle twist, and fiber
integration.

Representatives keep the normalization constant symbolic: a ClassRep
carries the exponent of c (c = -1/2π in the real category, -1/(2π√-1)
in the transversely holomorphic one) and the constant is only applied
numerically at integration time.  Fiber integration itself produces the
transcendental factor 2π√-1; to keep the symbolic layer float-free that
factor is expressed exactly through a reserved degree-0 symbol for c
(2π√-1 = -1/c holomorphic, -i/c real), which universes using the twist
machinery must declare.

Sign conventions, fixed once: dt is factored to the leftmost position
of a monomial before taking the fiber residue, and the fiber volume
form vol = (1/2π√-1)·dt/t multiplies from the left.  With these, the
fiber-integration relation reproduces the stated -m coefficient with
global sign PROP31_SIGN = +1 on every instance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cdga import FormExpr, Universe
from .errors import ArgumentError, DeclarationError
from .foliation import ChartFoliation, DeformationData
from .scalars import CR_I, CR_ONE, ComplexRational, Poly, S_ONE, Scalar

#: single global sign of the twist/fiber-integration relation, constant
#: across charts, deformations, twist indices and codimensions.
PROP31_SIGN = 1

KINDS = ("bott", "dbott", "flk", "lp-image")


@dataclass(frozen=True)
class ClassRep:
    """A characteristic-class representative.

    rep is the form without the normalization constant; the full
    representative is c^c_power * rep.  degree bookkeeping: 2q+1 for
    bott/dbott (c_power q+1), 2q+2 for flk (c_power q+2).
    """

    kind: str
    q: int
    c_power: int
    rep: FormExpr
    twist_index: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ArgumentError(f"unknown class kind {self.kind!r}")

    @property
    def degree(self):
        return self.rep.degree()

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "q": self.q,
            "c_power": self.c_power,
            "degree": self.degree,
            "twist_index": self.twist_index,
            "form": str(self.rep),
        }


def _assert_degree(rep: FormExpr, expected: int, what: str):
    d = rep.degree()
    if not rep.is_zero and d != expected:
        raise ArgumentError(f"{what} representative has degree {d}, expected {expected}")


def bott_rep(chart: ChartFoliation) -> ClassRep:
    """theta ∧ (d theta)^q; Godbillon-Vey in the real category, Bott in
    the transversely holomorphic one."""
    q = chart.q
    rep = chart.theta.wedge(chart.dtheta ** q)
    _assert_degree(rep, 2 * q + 1, "bott")
    return ClassRep("bott", q, q + 1, rep, chart.twist_index)


def dbott_rep(chart: ChartFoliation, deformation: DeformationData) -> ClassRep:
    """theta_dot ∧ (d theta)^q: the infinitesimal derivative of the
    class along the deformation."""
    q = chart.q
    rep = deformation.theta_dot.wedge(chart.dtheta ** q)
    _assert_degree(rep, 2 * q + 1, "dbott")
    return ClassRep("dbott", q, q + 1, rep, chart.twist_index)


def flk_rep(chart: ChartFoliation, deformation: DeformationData) -> ClassRep:
    """theta_dot ∧ theta ∧ (d theta)^q: the fundamental deformation
    class that is not the derivative of a secondary class."""
    q = chart.q
    rep = deformation.theta_dot.wedge(chart.theta).wedge(chart.dtheta ** q)
    _assert_degree(rep, 2 * q + 2, "flk")
    return ClassRep("flk", q, q + 2, rep, chart.twist_index)


def s1_twist(chart: ChartFoliation, m: int, fiber: str = "t") -> ChartFoliation:
    """Replace the trivialization by t^m * omega over M x S^1: theta
    shifts by -m dt/t, the connection matrix and coframe are untouched.

    When omega is supplied (always, for charts) the defining relation
    for the twisted trivialization, d(t^m Ω) + theta°∧(t^m Ω) = 0 with
    Ω = omega^1∧..∧omega^q, reduces exactly to the untwisted relation;
    it is verified here and a failure raises.
    """
    u = chart.universe
    if not u.has(fiber):
        raise DeclarationError(f"fiber coordinate {fiber!r} is not declared")
    decl = u.decl(fiber)
    if decl.degree != 0 or decl.differential is None:
        raise DeclarationError(f"{fiber!r} must be a degree-0 symbol with a linked differential")
    if m == 0:
        return chart
    t = u.sym(fiber)
    dt_over_t = u.gen(decl.differential).scale(S_ONE / t)
    shift = dt_over_t.scale(Scalar.from_const(ComplexRational(-m)))
    if chart.theta_shift is not None:
        shift = shift + chart.theta_shift
    twisted = chart.replace(theta_shift=shift,
                            twist_index=(chart.twist_index or 0) + m)
    _check_twist_residual(twisted, fiber)
    return twisted


def _check_twist_residual(chart: ChartFoliation, fiber: str):
    """d(t^M Ω) + theta°∧(t^M Ω) with Ω = omega^1∧..∧omega^q and M the
    accumulated twist index must normalize to zero."""
    u = chart.universe
    top = chart.omega[0]
    for w in chart.omega[1:]:
        top = top.wedge(w)
    m_total = chart.twist_index or 0
    t = u.sym(fiber)
    top = top.scale(t ** m_total)
    residual = top.d() + chart.theta.wedge(top)
    if not residual.is_zero:
        raise ArgumentError(
            "twisted trivialization is not parallel: residual "
            f"d(t^m Ω) + theta°∧(t^m Ω) = {residual}")


def twopi_i_scalar(universe: Universe, category: str, c_symbol: str = "c") -> Scalar:
    """2π√-1 expressed exactly through the reserved normalization symbol:
    -1/c for the holomorphic category, -i/c for the real one."""
    if not universe.has(c_symbol):
        raise DeclarationError(
            f"fiber integration needs the reserved symbol {c_symbol!r} declared "
            "(the numeric layer binds it to the category constant)")
    c = Poly.var(c_symbol)
    if category == "holomorphic":
        return Scalar(Poly.const(-CR_ONE), c)
    if category == "real":
        return Scalar(Poly.const(-CR_I), c)
    raise ArgumentError(f"unknown category {category!r}")


def fiber_integrate(a: FormExpr, fiber: str = "t", category: str = "holomorphic",
                    c_symbol: str = "c") -> FormExpr:
    """Integration along the circle fiber.

    Each dt-containing term is factored as t^k (dt/t)∧β with dt moved to
    the leftmost position; the k = 0 Laurent component survives with the
    factor 2π√-1, terms without dt map to 0.  Coefficients must depend
    on t through Laurent monomials only.
    """
    u = a.universe
    decl = u.decl(fiber)
    if decl.degree != 0 or decl.differential is None:
        raise DeclarationError(f"{fiber!r} must be a degree-0 symbol with a linked differential")
    dt_index = u.odd_index(decl.differential)
    out = u.zero()
    for mono, s in a.terms.items():
        if dt_index not in mono:
            continue
        pos = mono.index(dt_index)
        rest = mono[:pos] + mono[pos + 1:]
        signed = s if pos % 2 == 0 else -s
        residue = signed.laurent(fiber).get(-1)
        if residue is None:
            continue
        out = out + FormExpr(u, {rest: residue})
    if out.is_zero:
        return out
    return out.scale(twopi_i_scalar(u, category, c_symbol))


def fiber_integrate_class(rep: ClassRep, fiber: str = "t",
                          c_symbol: str = "c") -> ClassRep:
    """Fiber-integrate a representative; kind and c_power are kept, the
    2π√-1 factor lives inside the form through the reserved c symbol."""
    category = "holomorphic"
    form = fiber_integrate(rep.rep, fiber, category, c_symbol)
    return ClassRep(rep.kind, rep.q, rep.c_power, form, rep.twist_index)


@dataclass(frozen=True)
class Prop31Report:
    """Outcome of the twist relation checks for one (chart, deformation, m).

    decomposition_residual: FLK° - [π*FLK - σ m vol∧DBott] at matched
    normalization powers; fiber_residual: c·π_!(FLK°-form) + σ m DBott-form.
    Both must normalize to zero with the single global sign σ.
    """

    m: int
    q: int
    sigma: int
    decomposition_residual: FormExpr
    fiber_residual: FormExpr
    passed: bool
    details: dict = field(default_factory=dict)


def verify_prop31(chart: ChartFoliation, deformation: DeformationData, m: int,
                  fiber: str = "t", c_symbol: str = "c") -> Prop31Report:
    """Verify the twist relations for the pulled-back deformation.

    (i)  theta_dot∧theta°∧(dθ°)^q = theta_dot∧theta∧(dθ)^q
         - σ m (vol-term) with vol = (1/2π√-1) dt/t wedged on the left;
    (ii) c · fiber_integrate(FLK°-form) = -σ m · DBott-form,
    both exactly, with the same recorded global sign σ = PROP31_SIGN.
    """
    if chart.category != "holomorphic":
        raise ArgumentError("the circle twist applies to transversely holomorphic charts")
    q = chart.q
    u = chart.universe
    twisted = s1_twist(chart, m, fiber)
    deformation0 = deformation if m == 0 else deformation.on_chart(twisted)

    flk0 = flk_rep(twisted, deformation0)
    flk_base = flk_rep(chart, deformation)
    dbott_base = dbott_rep(chart, deformation)

    sigma = PROP31_SIGN
    tdecl = u.decl(fiber)
    dt_over_t = u.gen(tdecl.differential).scale(S_ONE / u.sym(fiber))
    vol = dt_over_t.scale(S_ONE / twopi_i_scalar(u, "holomorphic", c_symbol))
    # matched at c-power q+2: DBott carries q+1, so its form picks up a
    # factor 1/c next to vol's exact -c; the c's cancel in the residual.
    c_scalar = Scalar.var(c_symbol)
    vol_term = vol.wedge(dbott_base.rep).scale(S_ONE / c_scalar)
    decomposition = flk0.rep - (flk_base.rep - vol_term.scale(
        Scalar.from_const(ComplexRational(sigma * m))))

    fibered = fiber_integrate(flk0.rep, fiber, "holomorphic", c_symbol)
    fiber_res = fibered.scale(c_scalar) + dbott_base.rep.scale(
        Scalar.from_const(ComplexRational(sigma * m)))

    passed = decomposition.is_zero and fiber_res.is_zero
    return Prop31Report(
        m=m, q=q, sigma=sigma,
        decomposition_residual=decomposition,
        fiber_residual=fiber_res,
        passed=passed,
        details={
            "conventions": "dt factored leftmost; vol wedged on the left",
            "twisted_theta": str(twisted.theta),
        })
