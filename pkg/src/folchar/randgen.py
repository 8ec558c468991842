"""Seeded construction of random algebra elements and chart instances.

All randomness flows through a `random.Random` seeded either explicitly
or from the FOLCHAR_SEED environment variable, so property checks and
identity sweeps are reproducible run to run.
"""

from __future__ import annotations

import os
import random
from fractions import Fraction

from .cdga import FormExpr, GeneratorDecl, Universe
from .foliation import ChartFoliation, DeformationData, VectorValuedForm, covariant_d
from .scalars import CR_ONE, ComplexRational, Poly, S_ONE, Scalar

DEFAULT_SEED = 20240801


def seeded_rng(seed=None) -> random.Random:
    if seed is None:
        seed = int(os.environ.get("FOLCHAR_SEED", DEFAULT_SEED))
    return random.Random(seed)


def random_fraction(rng, lo=-3, hi=3, den_max=2, nonzero=False) -> Fraction:
    while True:
        f = Fraction(rng.randint(lo, hi), rng.randint(1, den_max))
        if f or not nonzero:
            return f


def random_cr(rng, complex_prob=0.25, nonzero=False) -> ComplexRational:
    while True:
        im = random_fraction(rng) if rng.random() < complex_prob else Fraction(0)
        c = ComplexRational(random_fraction(rng), im)
        if c or not nonzero:
            return c


def random_poly(rng, symbols, max_terms=2, max_deg=2) -> Poly:
    p = Poly.zero()
    for _ in range(rng.randint(1, max_terms)):
        mono = {}
        for _ in range(rng.randint(0, max_deg)):
            s = rng.choice(symbols)
            mono[s] = mono.get(s, 0) + 1
        p = p + Poly({tuple(sorted(mono.items())): random_cr(rng)})
    return p


def random_scalar(rng, symbols, rational_prob=0.2) -> Scalar:
    num = random_poly(rng, symbols)
    if rng.random() < rational_prob:
        den = Poly.const(CR_ONE) + Poly.var(rng.choice(symbols)) ** 2
        return Scalar(num, den)
    return Scalar(num)


def random_form(rng, universe: Universe, degree: int, max_terms=3) -> FormExpr:
    """A random homogeneous form with polynomial/rational coefficients."""
    syms = [d.name for d in universe.decls if d.degree == 0]
    odd = list(range(len(universe.odd_names)))
    out = universe.zero()
    for _ in range(rng.randint(1, max_terms)):
        if degree > len(odd):
            break
        mono = tuple(sorted(rng.sample(odd, degree)))
        out = out + FormExpr(universe, {mono: random_scalar(rng, syms)})
    return out


def property_universe(rng=None) -> Universe:
    """A small universe for the algebraic property suite: three linked
    coordinates, one transverse pair, and a parameter."""
    return Universe([
        GeneratorDecl("x1", 0, differential="dx1"),
        GeneratorDecl("x2", 0, differential="dx2"),
        GeneratorDecl("y1", 0, differential="dy1"),
        GeneratorDecl("lam", 0),
        GeneratorDecl("dx1", 1),
        GeneratorDecl("dx2", 1),
        GeneratorDecl("dy1", 1, transverse=True),
    ])


# -- generic chart instances ---------------------------------------------------

def normalized_chart(q: int, rng, n_leaf=2) -> ChartFoliation:
    """A chart in the local normal form: omega = (dy^1..dy^q), a generic
    transverse Bott connection matrix built from independent function
    symbols, and a few closed leafwise one-form generators for variety."""
    decls = []
    for i in range(1, q + 1):
        decls.append(GeneratorDecl(f"y{i}", 0, differential=f"dy{i}"))
    for i in range(1, q + 1):
        for j in range(1, q + 1):
            for k in range(1, q + 1):
                decls.append(GeneratorDecl(f"t{i}{j}{k}", 0, differential=f"dt{i}{j}{k}"))
    for i in range(1, q + 1):
        for j in range(1, q + 1):
            decls.append(GeneratorDecl(f"g{i}{j}", 0, differential=f"dg{i}{j}"))
    for i in range(1, q + 1):
        decls.append(GeneratorDecl(f"dy{i}", 1, transverse=True))
    for i in range(1, q + 1):
        for j in range(1, q + 1):
            for k in range(1, q + 1):
                decls.append(GeneratorDecl(f"dt{i}{j}{k}", 1))
    for i in range(1, q + 1):
        for j in range(1, q + 1):
            decls.append(GeneratorDecl(f"dg{i}{j}", 1))
    for a in range(1, n_leaf + 1):
        decls.append(GeneratorDecl(f"beta{a}", 1))
    u = Universe(decls)
    tau = []
    for i in range(1, q + 1):
        row = []
        for j in range(1, q + 1):
            e = u.zero()
            for k in range(1, q + 1):
                coeff = Scalar.from_const(random_cr(rng, complex_prob=0, nonzero=True))
                e = e + u.gen(f"dy{k}").scale(u.sym(f"t{i}{j}{k}") * coeff)
            row.append(e)
        tau.append(row)
    omega = tuple(u.gen(f"dy{i}") for i in range(1, q + 1))
    return ChartFoliation(q, "real", tau, omega)


def lemma_lp_instance(q: int, rng):
    """(chart, deformation) pair for the projective-obstruction identity.

    omega_dot mixes function-symbol transverse parts with constant
    multiples of closed leafwise generators; tau_dot is then solved so
    the deformation relation holds exactly.
    """
    chart = normalized_chart(q, rng)
    u = chart.universe
    n_leaf = sum(1 for d in u.decls if d.degree == 1 and d.name.startswith("beta"))
    omega_dot = []
    for i in range(1, q + 1):
        w = u.zero()
        for j in range(1, q + 1):
            coeff = Scalar.from_const(random_cr(rng, complex_prob=0))
            w = w + u.gen(f"dy{j}").scale(u.sym(f"g{i}{j}") * coeff)
        for a in range(1, n_leaf + 1):
            coeff = Scalar.from_const(random_cr(rng, complex_prob=0, nonzero=True))
            w = w + u.gen(f"beta{a}").scale(coeff)
        omega_dot.append(w)
    deformation = DeformationData.solve_tau_dot(chart, omega_dot)
    return chart, deformation


def prop31_instance(q: int, rng, symbolic_m=True, n_coords=None):
    """(eta, eta_dot, m) with generic one-forms built from function
    symbols over enough coordinates that (d eta)^q is nonzero."""
    n = n_coords if n_coords is not None else q + 2
    decls = [GeneratorDecl("t", 0, differential="dt"), GeneratorDecl("m", 0)]
    for i in range(1, n + 1):
        decls += [GeneratorDecl(f"w{i}", 0, differential=f"dw{i}"),
                  GeneratorDecl(f"a{i}", 0, differential=f"da{i}"),
                  GeneratorDecl(f"b{i}", 0, differential=f"db{i}")]
    decls.append(GeneratorDecl("dt", 1))
    for i in range(1, n + 1):
        decls += [GeneratorDecl(f"dw{i}", 1), GeneratorDecl(f"da{i}", 1),
                  GeneratorDecl(f"db{i}", 1)]
    u = Universe(decls)
    eta = u.zero()
    eta_dot = u.zero()
    for i in range(1, n + 1):
        eta = eta + u.gen(f"dw{i}").scale(
            u.sym(f"a{i}") * Scalar.from_const(random_cr(rng, nonzero=True)))
        eta_dot = eta_dot + u.gen(f"dw{i}").scale(
            u.sym(f"b{i}") * Scalar.from_const(random_cr(rng, nonzero=True)))
    m = u.sym("m") if symbolic_m else ComplexRational(rng.randint(-2, 2))
    return eta, eta_dot, m


def lemma21_instance(q: int, rng, cocycle_degree=1):
    """(chart-with-frame-factor, exact cocycle, potential) for the
    closedness and exactness checks of the trace-form multiplication.

    The trivialization shift d(log F) = dF/F models a frame factor on
    the canonical bundle; cocycles are produced as covariant derivatives
    of random potentials, hence closed by construction.
    """
    base = normalized_chart(q, rng)
    u0 = base.universe
    u = u0.extend([GeneratorDecl("F", 0, differential="dF"),
                   GeneratorDecl("dF", 1)])
    tau = tuple(tuple(u.lift(e) for e in row) for row in base.tau)
    omega = tuple(u.lift(w) for w in base.omega)
    shift = u.gen("dF").scale(S_ONE / u.sym("F"))
    chart = ChartFoliation(q, "real", tau, omega, theta_shift=shift)
    if cocycle_degree == 1:
        potential = VectorValuedForm(
            tuple(random_form(rng, u, 0, max_terms=2) for _ in range(q)))
    else:
        potential = VectorValuedForm(
            tuple(random_form(rng, u, cocycle_degree - 1, max_terms=2) for _ in range(q)))
    cocycle = covariant_d(potential, chart)
    return chart, cocycle, potential
