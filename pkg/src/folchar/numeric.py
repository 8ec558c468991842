"""Numeric evaluation of forms on parametrized cycles.

Built-in cycles: the unit three-sphere in Hopf coordinates
(z1 = cos ξ e^{iφ1}, z2 = sin ξ e^{iφ2}), the unit circle (t = e^{iψ}),
and their product.  Pullbacks are evaluated through analytically coded
Jacobians; integration uses Gauss-Legendre nodes on bounded axes and the
periodic trapezoid rule on angles, which is spectrally accurate for the
smooth integrands that arise here.

Orientation of the built-in sphere is calibrated once so that the Bott
coefficient of the standard family at lambda = 1 equals +4; with the
axis order (xi, phi1, phi2) that calibration gives the sign -1.  The
circle is oriented so that the integral of dt/t is +2πi.

The numeric layer is the only place conjugate pairs act: a symbol with a
declared partner always evaluates to the conjugate of the partner's
value.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .cdga import FormExpr, Universe
from .classes import ClassRep
from .errors import ArgumentError, DeclarationError, SingularEvaluationError

S3_ORIENTATION = -1
S1_ORIENTATION = 1

C_REAL = -1.0 / (2.0 * math.pi)
C_HOLOMORPHIC = 1j / (2.0 * math.pi)  # -1/(2π√-1)

REFERENCE_NODES = 48


def category_constant(category: str) -> complex:
    if category == "real":
        return C_REAL
    if category == "holomorphic":
        return C_HOLOMORPHIC
    raise ArgumentError(f"unknown category {category!r}")


@dataclass(frozen=True)
class Axis:
    name: str
    lo: float
    hi: float
    periodic: bool


class CoordMap:
    """A coordinate function of the parameters with analytic partials."""

    __slots__ = ("value", "partials")

    def __init__(self, value, partials):
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "partials", dict(partials))

    def __setattr__(self, name, value):
        raise AttributeError("CoordMap is immutable")

    def partial(self, axis: str):
        return self.partials.get(axis)


class ParamManifold:
    """A parametrized cycle: axes, coordinate assignment, orientation."""

    def __init__(self, name: str, axes, coords, orientation: int = 1):
        self.name = name
        self.axes = tuple(axes)
        self.coords = dict(coords)
        self.orientation = orientation
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            raise ArgumentError("duplicate axis names")

    @property
    def dimension(self) -> int:
        return len(self.axes)

    def product(self, other: "ParamManifold", name=None) -> "ParamManifold":
        overlap = {a.name for a in self.axes} & {a.name for a in other.axes}
        if overlap:
            raise ArgumentError(f"product axes collide: {sorted(overlap)}")
        return ParamManifold(
            name or f"{self.name}x{other.name}",
            self.axes + other.axes,
            {**self.coords, **other.coords},
            self.orientation * other.orientation,
        )

    def random_points(self, n: int, rng) -> dict:
        """n uniform parameter points, as a dict of arrays per axis."""
        return {a.name: np.array([rng.uniform(a.lo, a.hi) for _ in range(n)])
                for a in self.axes}


def builtin_s3() -> ParamManifold:
    def z1(p):
        return np.cos(p["xi"]) * np.exp(1j * p["phi1"])

    def z2(p):
        return np.sin(p["xi"]) * np.exp(1j * p["phi2"])

    coords = {
        "z1": CoordMap(z1, {
            "xi": lambda p: -np.sin(p["xi"]) * np.exp(1j * p["phi1"]),
            "phi1": lambda p: 1j * np.cos(p["xi"]) * np.exp(1j * p["phi1"]),
        }),
        "z2": CoordMap(z2, {
            "xi": lambda p: np.cos(p["xi"]) * np.exp(1j * p["phi2"]),
            "phi2": lambda p: 1j * np.sin(p["xi"]) * np.exp(1j * p["phi2"]),
        }),
        "z1b": CoordMap(lambda p: np.conj(z1(p)), {
            "xi": lambda p: -np.sin(p["xi"]) * np.exp(-1j * p["phi1"]),
            "phi1": lambda p: -1j * np.cos(p["xi"]) * np.exp(-1j * p["phi1"]),
        }),
        "z2b": CoordMap(lambda p: np.conj(z2(p)), {
            "xi": lambda p: np.cos(p["xi"]) * np.exp(-1j * p["phi2"]),
            "phi2": lambda p: -1j * np.sin(p["xi"]) * np.exp(-1j * p["phi2"]),
        }),
    }
    axes = (Axis("xi", 0.0, math.pi / 2.0, False),
            Axis("phi1", 0.0, 2.0 * math.pi, True),
            Axis("phi2", 0.0, 2.0 * math.pi, True))
    return ParamManifold("s3", axes, coords, orientation=S3_ORIENTATION)


def builtin_s1() -> ParamManifold:
    coords = {
        "t": CoordMap(lambda p: np.exp(1j * p["psi"]),
                      {"psi": lambda p: 1j * np.exp(1j * p["psi"])}),
    }
    return ParamManifold("s1", (Axis("psi", 0.0, 2.0 * math.pi, True),), coords,
                         orientation=S1_ORIENTATION)


def builtin(name: str) -> ParamManifold:
    if name == "s3":
        return builtin_s3()
    if name == "s1":
        return builtin_s1()
    if name == "s3xs1":
        return builtin_s3().product(builtin_s1(), name="s3xs1")
    raise ArgumentError(f"unknown built-in manifold {name!r}; know s3, s1, s3xs1")


@dataclass(frozen=True)
class QuadratureSpec:
    """Nodes per axis; the scheme is chosen by the axis periodicity
    (periodic trapezoid on angles, Gauss-Legendre elsewhere)."""

    nodes: int = REFERENCE_NODES

    def __post_init__(self):
        if self.nodes < 4:
            raise ArgumentError("node counts below 4 are not allowed")

    def axis_rule(self, axis: Axis):
        n = self.nodes
        if axis.periodic:
            h = (axis.hi - axis.lo) / n
            x = axis.lo + h * np.arange(n)
            w = np.full(n, h)
        else:
            x, w = np.polynomial.legendre.leggauss(n)
            half = 0.5 * (axis.hi - axis.lo)
            x = axis.lo + half * (x + 1.0)
            w = w * half
        return x, w


# -- evaluation ----------------------------------------------------------------

def _resolve_environment(universe: Universe, man: ParamManifold, points: dict,
                         params: dict | None):
    """Values of every degree-0 symbol at the points.

    Resolution order: manifold coordinate map, declared conjugate of an
    assigned coordinate, then the params dict.  Conjugate pairs always
    evaluate consistently because partner values are derived, not bound
    independently."""
    params = params or {}
    env = {}
    for d in universe.decls:
        if d.degree != 0:
            continue
        name = d.name
        if name in man.coords:
            env[name] = man.coords[name].value(points)
        elif d.conjugate is not None and d.conjugate in man.coords:
            env[name] = np.conj(man.coords[d.conjugate].value(points))
        elif name in params:
            env[name] = params[name]
    return env


def _require_symbols(form: FormExpr, env: dict):
    missing = set()
    for s in form.terms.values():
        missing |= {n for n in s.symbols() if n not in env}
    if missing:
        raise DeclarationError(
            f"no value assigned for degree-0 symbols {sorted(missing)}")


def _generator_rows(universe: Universe, man: ParamManifold, mono):
    """Coordinate parents of the degree-1 generators in a monomial."""
    rows = []
    for gi in mono:
        parent = universe.parent_symbol(gi)
        if parent is None:
            raise ArgumentError(
                f"generator {universe.odd_names[gi]} is not the differential "
                "of an assigned coordinate")
        rows.append(parent)
    return rows


def _coord_partial(universe: Universe, man: ParamManifold, parent: str,
                   axis: str, points: dict):
    if parent in man.coords:
        f = man.coords[parent].partial(axis)
        return None if f is None else f(points)
    d = universe.decl(parent)
    if d.conjugate is not None and d.conjugate in man.coords:
        f = man.coords[d.conjugate].partial(axis)
        return None if f is None else np.conj(f(points))
    raise ArgumentError(f"coordinate {parent!r} has no assignment on {man.name}")


def _minor_determinant(universe, man, mono, axis_names, points, npts):
    """det of the pullback Jacobian rows(mono) x columns(axis_names)."""
    k = len(mono)
    rows = _generator_rows(universe, man, mono)
    mat = np.zeros((npts, k, k), dtype=complex)
    for a, parent in enumerate(rows):
        for b, axis in enumerate(axis_names):
            col = _coord_partial(universe, man, parent, axis, points)
            if col is not None:
                mat[:, a, b] = col
    if k == 1:
        return mat[:, 0, 0]
    return np.linalg.det(mat)


def evaluate_form(a: FormExpr, point: dict, man: ParamManifold,
                  params: dict | None = None) -> np.ndarray:
    """Pullback coefficients of `a` at one parameter point, one complex
    number per n-choose-k axis subset (lexicographic order); degree above
    the dimension yields the empty (zero) tuple."""
    deg = a.degree()
    if a.is_zero:
        return np.zeros(1, dtype=complex) if not a.terms else np.zeros(0, dtype=complex)
    if deg is None:
        raise ArgumentError("evaluate_form needs a homogeneous form")
    n = man.dimension
    if deg > n:
        return np.zeros(0, dtype=complex)
    points = {k: np.atleast_1d(np.asarray(v, dtype=float)) for k, v in point.items()}
    npts = len(next(iter(points.values()))) if points else 1
    env = _resolve_environment(a.universe, man, points, params)
    _require_symbols(a, env)
    subsets = list(itertools.combinations([ax.name for ax in man.axes], deg))
    out = np.zeros((len(subsets), npts), dtype=complex)
    for mono, s in a.terms.items():
        coeff = s.evaluate(env)
        for si, subset in enumerate(subsets):
            det = _minor_determinant(a.universe, man, mono, subset, points, npts)
            out[si] += coeff * det
    return out[:, 0] if npts == 1 else out


def evaluate_on_tangents(a: FormExpr, point: dict, vectors, man: ParamManifold,
                         params: dict | None = None) -> complex:
    """Value of a k-form on k tangent vectors (each a coefficient tuple
    over the parameter axes).  Linearly dependent vectors make this a
    genuine floating-point cancellation test."""
    deg = a.degree()
    vectors = [np.asarray(v, dtype=float) for v in vectors]
    if deg is None or deg != len(vectors):
        raise ArgumentError("number of tangent vectors must equal the form degree")
    points = {k: np.atleast_1d(np.asarray(v, dtype=float)) for k, v in point.items()}
    env = _resolve_environment(a.universe, man, points, params)
    _require_symbols(a, env)
    axis_names = [ax.name for ax in man.axes]
    total = 0.0 + 0.0j
    for mono, s in a.terms.items():
        coeff = complex(np.asarray(s.evaluate(env)).reshape(-1)[0])
        rows = _generator_rows(a.universe, man, mono)
        mat = np.zeros((deg, deg), dtype=complex)
        for i, parent in enumerate(rows):
            grad = np.zeros(len(axis_names), dtype=complex)
            for bi, axis in enumerate(axis_names):
                col = _coord_partial(a.universe, man, parent, axis, points)
                if col is not None:
                    grad[bi] = np.asarray(col).reshape(-1)[0]
            for j, v in enumerate(vectors):
                mat[i, j] = grad @ v
        total += coeff * np.linalg.det(mat)
    return total


class FormIntegrator:
    """A form compiled against one (manifold, quadrature) grid.

    The node grid, quadrature weights, and the top-degree minor
    determinants are parameter-independent, so they are computed once;
    re-integration with new parameter bindings only re-evaluates the
    scalar coefficients.
    """

    def __init__(self, form: FormExpr, man: ParamManifold, quad: QuadratureSpec):
        deg = form.degree()
        if form.is_zero:
            deg = man.dimension
        if deg != man.dimension:
            raise ArgumentError(
                f"form degree {deg} does not match manifold dimension {man.dimension}")
        self.form = form
        self.man = man
        self.quad = quad
        axes_xw = [quad.axis_rule(ax) for ax in man.axes]
        grids = np.meshgrid(*[xw[0] for xw in axes_xw], indexing="ij")
        self.points = {ax.name: g.reshape(-1) for ax, g in zip(man.axes, grids)}
        wgrids = np.meshgrid(*[xw[1] for xw in axes_xw], indexing="ij")
        w = wgrids[0]
        for extra in wgrids[1:]:
            w = w * extra
        self.weights = w.reshape(-1)
        npts = len(self.weights)
        axis_names = [ax.name for ax in man.axes]
        self._dets = {}
        self._coord_env = _resolve_environment(form.universe, man, self.points, None)
        for mono in form.terms:
            if mono not in self._dets:
                self._dets[mono] = _minor_determinant(
                    form.universe, man, mono, axis_names, self.points, npts)

    def integrate(self, params: dict | None = None) -> complex:
        env = dict(self._coord_env)
        if params:
            env.update(params)
        _require_symbols(self.form, env)
        total = np.zeros(len(self.weights), dtype=complex)
        for mono, s in self.form.terms.items():
            coeff = s.evaluate(env)
            total = total + coeff * self._dets[mono]
        return self.man.orientation * complex(np.sum(total * self.weights))


def integrate(a: FormExpr, man: ParamManifold, quad: QuadratureSpec,
              params: dict | None = None) -> complex:
    """Quadrature of a top-degree form over the cycle."""
    return FormIntegrator(a, man, quad).integrate(params)


def class_coefficient(rep: ClassRep, man: ParamManifold, quad: QuadratureSpec,
                      params: dict | None = None, category: str = "holomorphic",
                      c_symbol: str = "c") -> complex:
    """c^c_power times the integral of the representative.

    The reserved normalization symbol is bound to the category constant;
    binding it to anything else in `params` is rejected.
    """
    c_num = category_constant(category)
    params = dict(params or {})
    if c_symbol in params and params[c_symbol] != c_num:
        raise ArgumentError(f"{c_symbol!r} is reserved for the normalization constant")
    params[c_symbol] = c_num
    if rep.rep.is_zero:
        return 0.0 + 0.0j
    value = integrate(rep.rep, man, quad, params)
    return (c_num ** rep.c_power) * value


def finite_difference(f, x0: complex, h: float) -> complex:
    """Central difference (f(x0+h) - f(x0-h)) / 2h along the real axis."""
    return (f(x0 + h) - f(x0 - h)) / (2.0 * h)
