"""Graded-commutative differential algebra with exact coefficients.

A universe declares degree-0 symbols (coordinates, functions, parameters)
and degree-1 generators (coframe elements).  Forms are finite sums of
Scalar coefficients times strictly increasing monomials in the degree-1
generators; the monomial order is declaration order, signs come from the
parity of the sorting permutation, and zero coefficients are dropped, so
the representation is a normal form and equality is syntactic up to
cross-multiplied coefficient comparison.

All values are immutable and every operation is pure, so concurrent use
needs no coordination.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .errors import ArgumentError, DeclarationError, RewriteError
from .scalars import (
    CR_ONE,
    ComplexRational,
    Mono,
    Poly,
    S_ONE,
    S_ZERO,
    Scalar,
    as_cr,
    mono_cmp,
    mono_degree,
    mono_div,
    mono_gt,
    mono_mul,
)


@dataclass(frozen=True)
class GeneratorDecl:
    """One generator of a universe.

    degree 0: a coordinate, local function, or parameter; `differential`
    names the linked degree-1 generator (d of this symbol), or is None
    for parameters (d = 0).

    degree 1: a coframe element; its exterior derivative defaults to 0
    and may be overridden through `Universe(odd_differentials=...)`.
    """

    name: str
    degree: int
    transverse: bool = False
    differential: str | None = None
    conjugate: str | None = None


class Universe:
    """An ordered family of generator declarations.

    The declaration order of degree-1 generators fixes the monomial
    order of the whole algebra.  Instances are immutable after
    construction; `extend` builds a larger universe sharing the prefix.
    """

    def __init__(self, decls: Sequence[GeneratorDecl],
                 odd_differentials: Mapping[str, Callable[["Universe"], "FormExpr"]] | None = None,
                 rewrites: "RewriteSystem | None" = None):
        names = [d.name for d in decls]
        if len(set(names)) != len(names):
            raise DeclarationError("duplicate generator names in universe")
        self._decls = tuple(decls)
        self._by_name = {d.name: d for d in decls}
        self._odd_names = tuple(d.name for d in decls if d.degree == 1)
        self._odd_index = {n: i for i, n in enumerate(self._odd_names)}
        self._sym0 = frozenset(d.name for d in decls if d.degree == 0)
        self._transverse = frozenset(
            self._odd_index[d.name] for d in decls if d.degree == 1 and d.transverse)
        self.rewrites = rewrites

        for d in decls:
            if d.degree not in (0, 1):
                raise DeclarationError(f"generator {d.name} has unsupported degree {d.degree}")
            if d.degree == 0 and d.differential is not None:
                if d.differential not in self._odd_index:
                    raise DeclarationError(
                        f"{d.name}: linked differential {d.differential!r} is not a "
                        f"declared degree-1 generator")
            if d.conjugate is not None and d.conjugate not in self._by_name:
                raise DeclarationError(f"{d.name}: conjugate partner {d.conjugate!r} undeclared")

        # d on degree-0 symbols: the linked generator as a one-term form, else 0
        self._d_sym: dict[str, FormExpr] = {}
        for d in decls:
            if d.degree == 0:
                if d.differential is None:
                    self._d_sym[d.name] = self.zero()
                else:
                    self._d_sym[d.name] = self.gen(d.differential)
        # parent lookup: degree-1 generator index -> the symbol it differentiates
        self._parent_of_odd: dict[int, str] = {}
        for d in decls:
            if d.degree == 0 and d.differential is not None:
                self._parent_of_odd[self._odd_index[d.differential]] = d.name

        # d on degree-1 generators (rarely nonzero)
        self._d_odd: dict[int, FormExpr] = {}
        if odd_differentials:
            for name, builder in odd_differentials.items():
                if name not in self._odd_index:
                    raise DeclarationError(f"odd differential for undeclared generator {name!r}")
                form = builder(self) if callable(builder) else builder
                if not isinstance(form, FormExpr) or form.universe is not self:
                    raise DeclarationError(f"odd differential of {name!r} must be a form here")
                self._d_odd[self._odd_index[name]] = form
        self._validate_differentials()

    # -- introspection ----------------------------------------------------

    @property
    def decls(self) -> tuple[GeneratorDecl, ...]:
        return self._decls

    def decl(self, name: str) -> GeneratorDecl:
        try:
            return self._by_name[name]
        except KeyError:
            raise DeclarationError(f"undeclared generator {name!r}") from None

    def has(self, name: str) -> bool:
        return name in self._by_name

    @property
    def odd_names(self) -> tuple[str, ...]:
        return self._odd_names

    def odd_index(self, name: str) -> int:
        try:
            return self._odd_index[name]
        except KeyError:
            raise DeclarationError(f"undeclared degree-1 generator {name!r}") from None

    @property
    def transverse_indices(self) -> frozenset:
        return self._transverse

    def parent_symbol(self, odd_index: int) -> str | None:
        """The degree-0 symbol whose differential is this generator."""
        return self._parent_of_odd.get(odd_index)

    def parameters(self) -> tuple[str, ...]:
        """Degree-0 symbols with zero differential."""
        return tuple(d.name for d in self._decls if d.degree == 0 and d.differential is None)

    def conjugate_pairs(self) -> dict[str, str]:
        return {d.name: d.conjugate for d in self._decls if d.conjugate is not None}

    # -- element constructors ---------------------------------------------

    def zero(self) -> "FormExpr":
        return FormExpr(self, {}, _trusted=True)

    def scalar(self, value) -> Scalar:
        if isinstance(value, Scalar):
            return value
        return Scalar.from_const(as_cr(value))

    def sym(self, name: str) -> Scalar:
        d = self.decl(name)
        if d.degree != 0:
            raise DeclarationError(f"{name!r} is not a degree-0 symbol")
        return Scalar.var(name)

    def gen(self, name: str) -> "FormExpr":
        i = self.odd_index(name)
        return FormExpr(self, {(i,): S_ONE}, _trusted=True)

    def form(self, value) -> "FormExpr":
        """Coerce a Scalar or exact constant into a degree-0 form."""
        if isinstance(value, FormExpr):
            if value.universe is not self:
                raise DeclarationError("form belongs to a different universe")
            return value
        s = value if isinstance(value, Scalar) else self.scalar(value)
        if s.is_zero:
            return self.zero()
        return FormExpr(self, {(): s}, _trusted=True)

    def d_of_symbol(self, name: str) -> "FormExpr":
        return self._d_sym[name]

    def d_of_generator(self, index: int) -> "FormExpr":
        return self._d_odd.get(index, self.zero())

    def extend(self, decls: Sequence[GeneratorDecl]) -> "Universe":
        """A universe with extra generators appended; existing degree-1
        indices are preserved, so forms lift by re-tagging."""
        return Universe(tuple(self._decls) + tuple(decls))

    def lift(self, form: "FormExpr") -> "FormExpr":
        """Re-tag a form from a prefix universe into this one."""
        src = form.universe
        if src is self:
            return form
        if src._decls != self._decls[: len(src._decls)]:
            raise DeclarationError("form universe is not a prefix of the target universe")
        return FormExpr(self, dict(form.terms), _trusted=True)

    def _validate_differentials(self):
        for i, f in self._d_odd.items():
            if not exterior_d(f).is_zero:
                raise DeclarationError(
                    f"d(d {self._odd_names[i]}) does not normalize to 0")

    def __repr__(self):
        return f"Universe({', '.join(d.name for d in self._decls)})"


def _merge_monomials(a: tuple, b: tuple):
    """Merge two ascending index tuples; return (merged, sign) or (None, 0)
    when an index repeats.  The sign is the parity of the interleaving."""
    if not a:
        return b, 1
    if not b:
        return a, 1
    out = []
    sign = 1
    i = j = 0
    la, lb = len(a), len(b)
    while i < la and j < lb:
        x, y = a[i], b[j]
        if x == y:
            return None, 0
        if x < y:
            out.append(x)
            i += 1
        else:
            out.append(y)
            j += 1
            if (la - i) & 1:
                sign = -sign
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out), sign


class FormExpr:
    """A differential form in normal form.

    terms maps strictly increasing tuples of degree-1 generator indices
    to nonzero Scalar coefficients.  The empty tuple is the degree-0
    component.
    """

    __slots__ = ("universe", "terms")

    def __init__(self, universe: Universe, terms: dict, *, _trusted=False):
        object.__setattr__(self, "universe", universe)
        if _trusted:
            object.__setattr__(self, "terms", terms)
        else:
            object.__setattr__(self, "terms", {m: s for m, s in terms.items() if not s.is_zero})

    def __setattr__(self, name, value):
        raise AttributeError("FormExpr is immutable")

    # -- structure ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int | None:
        """Common degree of the terms; None for 0 or mixed-degree sums."""
        degs = {len(m) for m in self.terms}
        if len(degs) == 1:
            return degs.pop()
        return None

    def homogeneous_part(self, k: int) -> "FormExpr":
        return FormExpr(self.universe, {m: s for m, s in self.terms.items() if len(m) == k},
                        _trusted=True)

    def __eq__(self, other):
        if not isinstance(other, FormExpr):
            return NotImplemented
        if self.universe is not other.universe:
            return False
        if self.terms.keys() != other.terms.keys():
            return False
        return all(self.terms[m] == other.terms[m] for m in self.terms)

    def __hash__(self):
        raise TypeError("FormExpr is not hashable")

    # -- linear structure ---------------------------------------------------

    def _check_same_universe(self, other: "FormExpr"):
        if self.universe is not other.universe:
            raise DeclarationError("operands live in different generator universes")

    def __add__(self, other: "FormExpr") -> "FormExpr":
        self._check_same_universe(other)
        out = dict(self.terms)
        for m, s in other.terms.items():
            cur = out.get(m)
            tot = s if cur is None else cur + s
            if tot.is_zero:
                out.pop(m, None)
            else:
                out[m] = tot
        return FormExpr(self.universe, out, _trusted=True)

    def __sub__(self, other: "FormExpr") -> "FormExpr":
        return self + (-other)

    def __neg__(self) -> "FormExpr":
        return FormExpr(self.universe, {m: -s for m, s in self.terms.items()}, _trusted=True)

    def scale(self, s) -> "FormExpr":
        s = s if isinstance(s, Scalar) else Scalar.from_const(as_cr(s))
        if s.is_zero:
            return self.universe.zero()
        return FormExpr(self.universe, {m: c * s for m, c in self.terms.items()}, _trusted=True)

    def __mul__(self, other):
        if isinstance(other, FormExpr):
            return self.wedge(other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, other):
        if isinstance(other, Scalar):
            return self.scale(S_ONE / other)
        return self.scale(S_ONE / Scalar.from_const(as_cr(other)))

    def __pow__(self, n: int) -> "FormExpr":
        if n < 0:
            raise ArgumentError("form power must be >= 0")
        out = self.universe.form(1)
        for _ in range(n):
            out = out.wedge(self)
        return out

    # -- graded product -----------------------------------------------------

    def wedge(self, other: "FormExpr") -> "FormExpr":
        self._check_same_universe(other)
        out: dict = {}
        for m1, s1 in self.terms.items():
            for m2, s2 in other.terms.items():
                m, sign = _merge_monomials(m1, m2)
                if m is None:
                    continue
                s = s1 * s2
                if sign < 0:
                    s = -s
                cur = out.get(m)
                tot = s if cur is None else cur + s
                if tot.is_zero:
                    out.pop(m, None)
                else:
                    out[m] = tot
        return FormExpr(self.universe, out, _trusted=True)

    # -- differential operators ----------------------------------------------

    def d(self) -> "FormExpr":
        """Exterior derivative: graded Leibniz over monomials, quotient
        rule on rational coefficients."""
        u = self.universe
        acc = u.zero()
        for m, s in self.terms.items():
            # d of the coefficient
            for name in sorted(s.symbols()):
                dsym = u._d_sym.get(name)
                if dsym is None or dsym.is_zero:
                    continue
                part = s.partial(name)
                if part.is_zero:
                    continue
                piece = dsym.scale(part)
                if m:
                    piece = piece.wedge(FormExpr(u, {m: S_ONE}, _trusted=True))
                acc = acc + piece
            # d of the generators (zero unless explicitly declared)
            for pos, gi in enumerate(m):
                dg = u._d_odd.get(gi)
                if dg is None or dg.is_zero:
                    continue
                rest = m[:pos] + m[pos + 1:]
                piece = dg.scale(s if pos % 2 == 0 else -s)
                if rest:
                    piece = piece.wedge(FormExpr(u, {rest: S_ONE}, _trusted=True))
                acc = acc + piece
        return acc

    def reduce_transverse(self, k: int) -> "FormExpr":
        """Drop terms whose monomial holds at least k transverse factors."""
        if k <= 0:
            raise ArgumentError("ideal index k must be a positive integer")
        tv = self.universe.transverse_indices
        out = {m: s for m, s in self.terms.items()
               if sum(1 for i in m if i in tv) < k}
        return FormExpr(self.universe, out, _trusted=True)

    def pderiv(self, name: str) -> "FormExpr":
        """Formal parameter derivative: acts on coefficients only."""
        d = self.universe.decl(name)
        if d.degree != 0 or d.differential is not None:
            raise ArgumentError(f"{name!r} is not a parameter symbol (need degree 0, d = 0)")
        out = {}
        for m, s in self.terms.items():
            p = s.partial(name)
            if not p.is_zero:
                out[m] = p
        return FormExpr(self.universe, out, _trusted=True)

    def rewrite(self, rs: "RewriteSystem | None" = None) -> "FormExpr":
        rs = rs if rs is not None else self.universe.rewrites
        if rs is None:
            return self
        out = {}
        for m, s in self.terms.items():
            s2 = rs.reduce_scalar(s)
            if not s2.is_zero:
                out[m] = s2
        return FormExpr(self.universe, out, _trusted=True)

    # -- rendering -----------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        u = self.universe
        parts = []
        for m in sorted(self.terms, key=lambda mm: (len(mm), mm)):
            s = self.terms[m]
            stxt = str(s)
            needs_parens = (" + " in stxt or " - " in stxt) or (
                stxt.startswith("-") and m)
            if needs_parens:
                stxt = f"({stxt})"
            if not m:
                parts.append(stxt)
            else:
                mtxt = "∧".join(u.odd_names[i] for i in m)
                parts.append(mtxt if stxt == "1" else f"{stxt}·{mtxt}")
        return " + ".join(parts)

    def __repr__(self):
        return f"FormExpr({self})"


# -- module-level operation names ------------------------------------------

def wedge(a: FormExpr, b: FormExpr) -> FormExpr:
    """Graded product of two forms in one universe."""
    return a.wedge(b)


def exterior_d(a: FormExpr) -> FormExpr:
    """Exterior derivative."""
    return a.d()


def reduce_mod_ideal(a: FormExpr, k: int) -> FormExpr:
    """Quotient by the ideal of forms with >= k transverse coframe factors."""
    return a.reduce_transverse(k)


def param_derivative(a: FormExpr, name: str) -> FormExpr:
    """Formal derivative with respect to a parameter symbol."""
    return a.pderiv(name)


# -- degree-0 rewriting -------------------------------------------------------

@dataclass(frozen=True)
class RewriteRule:
    """lhs (a degree-0 monomial) rewrites to rhs (a degree-0 polynomial)."""

    lhs: Mono
    rhs: Poly


class RewriteSystem:
    """A terminating, confluent set of monomial rewrite rules.

    Termination requires every rhs monomial to be strictly smaller than
    the lhs in the fixed graded-lex order.  Confluence is checked on all
    critical pairs up to `degree_bound`; systems that fail either check
    are rejected at construction.
    """

    def __init__(self, rules: Sequence[RewriteRule], degree_bound: int = 16):
        self.rules = tuple(rules)
        self.degree_bound = degree_bound
        for r in self.rules:
            if not r.lhs:
                raise RewriteError("rewrite lhs must be a non-constant monomial")
            for m in r.rhs.terms:
                if not mono_gt(r.lhs, m):
                    raise RewriteError(
                        f"rule {mono_str_rule(r)} does not decrease the monomial order")
        self._check_confluence()

    def _check_confluence(self):
        n = len(self.rules)
        for i in range(n):
            for j in range(i + 1, n):
                a, b = self.rules[i], self.rules[j]
                lcm = dict(a.lhs)
                for name, e in b.lhs:
                    lcm[name] = max(lcm.get(name, 0), e)
                L = tuple(sorted(lcm.items()))
                if mono_degree(L) > self.degree_bound:
                    continue
                p1 = self._rewrite_once(L, a)
                p2 = self._rewrite_once(L, b)
                if self.reduce_poly(p1) != self.reduce_poly(p2):
                    raise RewriteError(
                        "rewrite system is not confluent on the overlap "
                        f"{dict(L)} of rules {i} and {j}")

    @staticmethod
    def _rewrite_once(m: Mono, rule: RewriteRule) -> Poly:
        q = mono_div(m, rule.lhs)
        return rule.rhs * Poly({q: CR_ONE})

    def reduce_poly(self, p: Poly) -> Poly:
        changed = True
        while changed:
            changed = False
            for m, c in p.terms.items():
                for rule in self.rules:
                    q = mono_div(m, rule.lhs)
                    if q is None:
                        continue
                    rest = Poly({mm: cc for mm, cc in p.terms.items() if mm != m})
                    p = rest + (rule.rhs * Poly({q: c}))
                    changed = True
                    break
                if changed:
                    break
        return p

    def reduce_scalar(self, s: Scalar) -> Scalar:
        num = self.reduce_poly(s.num)
        den = self.reduce_poly(s.den)
        if den.is_zero:
            raise RewriteError(f"denominator {s.den} rewrites to zero")
        return Scalar(num, den)


def mono_str_rule(r: RewriteRule) -> str:
    from .scalars import mono_str

    return f"{mono_str(r.lhs)} -> {r.rhs}"
