"""Exact coefficient arithmetic for the form engine.

Form coefficients are rational functions in named degree-0 symbols with
Gaussian-rational coefficients (a + b*i with a, b rational).  Everything
here is immutable and exact: no floating-point value is ever created at
this layer, and equality of fractions is decided by cross-multiplication
against polynomial normal forms, never by gcd extraction or rounding.

Monomials are tuples of (symbol, exponent) pairs sorted by symbol name;
the monomial order used for normal forms and rewrite termination is
graded lexicographic on that representation.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .errors import ArgumentError, UnsupportedCoefficientError

Mono = tuple  # tuple[tuple[str, int], ...]


class ComplexRational:
    """a + b*sqrt(-1) with exact rational a and b."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", re if isinstance(re, Fraction) else Fraction(re))
        object.__setattr__(self, "im", im if isinstance(im, Fraction) else Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("ComplexRational is immutable")

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if not isinstance(other, ComplexRational):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __add__(self, other):
        return ComplexRational(self.re + other.re, self.im + other.im)

    def __sub__(self, other):
        return ComplexRational(self.re - other.re, self.im - other.im)

    def __neg__(self):
        return ComplexRational(-self.re, -self.im)

    def __mul__(self, other):
        if not self.im and not other.im:
            return ComplexRational(self.re * other.re)
        return ComplexRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __truediv__(self, other):
        if not other:
            raise ZeroDivisionError("division by zero ComplexRational")
        if not other.im:
            return ComplexRational(self.re / other.re, self.im / other.re)
        norm = other.re * other.re + other.im * other.im
        return ComplexRational(
            (self.re * other.re + self.im * other.im) / norm,
            (self.im * other.re - self.re * other.im) / norm,
        )

    def __pow__(self, n):
        if n < 0:
            return CR_ONE / self.__pow__(-n)
        out = CR_ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self):
        return ComplexRational(self.re, -self.im)

    def to_complex(self):
        return complex(self.re) + 1j * complex(self.im)

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            if self.im == 1:
                return "i"
            if self.im == -1:
                return "-i"
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        mag = abs(self.im)
        imtxt = "i" if mag == 1 else f"{mag}i"
        return f"({self.re}{sign}{imtxt})"

    def __repr__(self):
        return f"ComplexRational({self.re!r}, {self.im!r})"


CR_ZERO = ComplexRational(0)
CR_ONE = ComplexRational(1)
CR_I = ComplexRational(0, 1)


def as_cr(x) -> ComplexRational:
    if isinstance(x, ComplexRational):
        return x
    if isinstance(x, (int, Fraction)):
        return ComplexRational(x)
    raise ArgumentError(f"cannot interpret {x!r} as an exact complex rational")


# -- monomial helpers ------------------------------------------------------

def mono_mul(a: Mono, b: Mono) -> Mono:
    if not a:
        return b
    if not b:
        return a
    merged = dict(a)
    for name, exp in b:
        merged[name] = merged.get(name, 0) + exp
    return tuple(sorted(merged.items()))


def mono_div(a: Mono, b: Mono):
    """a / b, or None when b does not divide a."""
    rem = dict(a)
    for name, exp in b:
        have = rem.get(name, 0)
        if have < exp:
            return None
        if have == exp:
            del rem[name]
        else:
            rem[name] = have - exp
    return tuple(sorted(rem.items()))


def mono_degree(m: Mono) -> int:
    return sum(e for _, e in m)


def mono_cmp(a: Mono, b: Mono) -> int:
    """Graded lexicographic order (earlier names rank higher): the fixed
    monomial order used for leading terms and rewrite termination."""
    da, db = mono_degree(a), mono_degree(b)
    if da != db:
        return 1 if da > db else -1
    ia, ib = 0, 0
    while ia < len(a) and ib < len(b):
        na, ea = a[ia]
        nb, eb = b[ib]
        if na == nb:
            if ea != eb:
                return 1 if ea > eb else -1
            ia += 1
            ib += 1
        elif na < nb:
            return 1  # a has positive exponent on an earlier name
        else:
            return -1
    if ia < len(a):
        return 1
    if ib < len(b):
        return -1
    return 0


def mono_gt(a: Mono, b: Mono) -> bool:
    return mono_cmp(a, b) > 0


def mono_key(m: Mono):
    """Deterministic sort key (degree, then tuple); used only for stable
    rendering and hashing, not for leading-term selection."""
    return (mono_degree(m), m)


def mono_str(m: Mono) -> str:
    if not m:
        return "1"
    return "*".join(n if e == 1 else f"{n}^{e}" for n, e in m)


class Poly:
    """Multivariate polynomial over the Gaussian rationals.

    Stored as a mapping from monomials to nonzero coefficients; that
    representation is the normal form, so dict equality decides
    polynomial equality.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Mono, ComplexRational] | None = None, *, _trusted=False):
        if terms is None:
            object.__setattr__(self, "terms", {})
        elif _trusted:
            object.__setattr__(self, "terms", terms)
        else:
            clean = {m: c for m, c in terms.items() if c}
            object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    @classmethod
    def zero(cls) -> "Poly":
        return P_ZERO

    @classmethod
    def const(cls, c) -> "Poly":
        c = as_cr(c)
        if not c:
            return P_ZERO
        return cls({(): c}, _trusted=True)

    @classmethod
    def var(cls, name: str, exp: int = 1) -> "Poly":
        if exp < 0:
            raise ArgumentError("Poly.var exponent must be >= 0")
        if exp == 0:
            return P_ONE
        return cls({((name, exp),): CR_ONE}, _trusted=True)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items(), key=lambda kv: mono_key(kv[0]))))

    def __add__(self, other: "Poly") -> "Poly":
        if not self.terms:
            return other
        if not other.terms:
            return self
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            if s is None:
                out[m] = c
            else:
                s = s + c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return Poly(out, _trusted=True)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()}, _trusted=True)

    def __mul__(self, other: "Poly") -> "Poly":
        if not self.terms or not other.terms:
            return P_ZERO
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                c = c1 * c2
                s = out.get(m)
                if s is None:
                    out[m] = c
                else:
                    s = s + c
                    if s:
                        out[m] = s
                    else:
                        del out[m]
        return Poly(out, _trusted=True)

    def scale(self, c: ComplexRational) -> "Poly":
        if not c:
            return P_ZERO
        return Poly({m: co * c for m, co in self.terms.items()}, _trusted=True)

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ArgumentError("Poly power must be >= 0")
        out = P_ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def partial(self, name: str) -> "Poly":
        out: dict = {}
        for m, c in self.terms.items():
            for i, (n, e) in enumerate(m):
                if n == name:
                    dm = m[:i] + ((n, e - 1),) + m[i + 1:] if e > 1 else m[:i] + m[i + 1:]
                    dc = c * ComplexRational(e)
                    s = out.get(dm)
                    out[dm] = dc if s is None else s + dc
                    break
        return Poly({m: c for m, c in out.items() if c}, _trusted=True)

    def symbols(self) -> set:
        out = set()
        for m in self.terms:
            for n, _ in m:
                out.add(n)
        return out

    def degree_in(self, name: str) -> int:
        best = 0
        for m in self.terms:
            for n, e in m:
                if n == name and e > best:
                    best = e
        return best

    def split_by_power(self, name: str) -> dict:
        """Decompose as sum_k name^k * p_k with p_k free of `name`."""
        out: dict = {}
        for m, c in self.terms.items():
            k = 0
            rest = []
            for n, e in m:
                if n == name:
                    k = e
                else:
                    rest.append((n, e))
            bucket = out.setdefault(k, {})
            bucket[tuple(rest)] = bucket.get(tuple(rest), CR_ZERO) + c
        return {k: Poly(v) for k, v in out.items() if Poly(v)}

    def split_by_monomials_in(self, names) -> dict:
        """Group terms by their monomial part in `names`; values are
        polynomials in the remaining symbols."""
        names = set(names)
        out: dict = {}
        for m, c in self.terms.items():
            inside = tuple((n, e) for n, e in m if n in names)
            outside = tuple((n, e) for n, e in m if n not in names)
            bucket = out.setdefault(inside, {})
            bucket[outside] = bucket.get(outside, CR_ZERO) + c
        return {k: Poly(v) for k, v in out.items() if Poly(v)}

    def lead(self):
        """Leading (monomial, coefficient) under the graded-lex order."""
        if not self.terms:
            return None
        best = None
        for m in self.terms:
            if best is None or mono_gt(m, best):
                best = m
        return best, self.terms[best]

    def exact_div(self, d: "Poly"):
        """Return self / d when d divides exactly, else None."""
        if d.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        if self.is_zero:
            return P_ZERO
        dm, dc = d.lead()
        rem = dict(self.terms)
        quo: dict = {}
        while rem:
            m = None
            for cand in rem:
                if m is None or mono_gt(cand, m):
                    m = cand
            q = mono_div(m, dm)
            if q is None:
                return None
            c = rem[m] / dc
            quo[q] = quo.get(q, CR_ZERO) + c
            for m2, c2 in d.terms.items():
                mm = mono_mul(q, m2)
                s = rem.get(mm, CR_ZERO) - c * c2
                if s:
                    rem[mm] = s
                else:
                    rem.pop(mm, None)
        return Poly(quo)

    def common_monomial(self) -> Mono:
        """Largest monomial dividing every term (the monomial content)."""
        if not self.terms:
            return ()
        mins: dict = None
        for m in self.terms:
            d = dict(m)
            if mins is None:
                mins = d
            else:
                mins = {n: min(e, d[n]) for n, e in mins.items() if n in d}
            if not mins:
                return ()
        return tuple(sorted(mins.items()))

    def divide_monomial(self, g: Mono) -> "Poly":
        if not g:
            return self
        out = {}
        for m, c in self.terms.items():
            q = mono_div(m, g)
            if q is None:
                raise ArgumentError("monomial does not divide every term")
            out[q] = c
        return Poly(out, _trusted=True)

    def evaluate(self, env: Mapping[str, object]):
        """Evaluate at complex values (scalars or numpy arrays)."""
        total = 0
        for m, c in self.terms.items():
            v = c.to_complex()
            for n, e in m:
                v = v * env[n] ** e
            total = total + v
        return total

    def __str__(self):
        if not self.terms:
            return "0"
        import functools

        parts = []
        for m in sorted(self.terms, key=functools.cmp_to_key(mono_cmp), reverse=True):
            c = self.terms[m]
            ctxt = str(c)
            if not m:
                parts.append(ctxt)
            elif c == CR_ONE:
                parts.append(mono_str(m))
            elif c == -CR_ONE:
                parts.append("-" + mono_str(m))
            else:
                parts.append(f"{ctxt}*{mono_str(m)}")
        txt = parts[0]
        for p in parts[1:]:
            txt += " - " + p[1:] if p.startswith("-") else " + " + p
        return txt

    def __repr__(self):
        return f"Poly({self})"


P_ZERO = Poly({}, _trusted=True)
P_ONE = Poly({(): CR_ONE}, _trusted=True)


class Scalar:
    """Rational function num/den over the Gaussian rationals.

    Stored as a cleared pair; the denominator is made monic under the
    graded-lex order, common monomial factors are cancelled, and exact
    polynomial division is attempted so that most equal values share one
    representation.  Residual equality is via cross-multiplication.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly = P_ONE):
        if den.is_zero:
            raise ZeroDivisionError("Scalar denominator is the zero polynomial")
        if num.is_zero:
            object.__setattr__(self, "num", P_ZERO)
            object.__setattr__(self, "den", P_ONE)
            return
        # cancel shared monomial content
        g_num = num.common_monomial()
        g_den = den.common_monomial()
        if g_num and g_den:
            shared = {}
            dn = dict(g_num)
            for n, e in g_den:
                if n in dn:
                    shared[n] = min(e, dn[n])
            if shared:
                g = tuple(sorted(shared.items()))
                num = num.divide_monomial(g)
                den = den.divide_monomial(g)
        # monic denominator
        _, lc = den.lead()
        if lc != CR_ONE:
            inv = CR_ONE / lc
            den = den.scale(inv)
            num = num.scale(inv)
        # exact cancellation
        if den != P_ONE:
            q = num.exact_div(den)
            if q is not None:
                num, den = q, P_ONE
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    @classmethod
    def from_const(cls, c) -> "Scalar":
        return cls(Poly.const(as_cr(c)))

    @classmethod
    def var(cls, name: str) -> "Scalar":
        return cls(Poly.var(name))

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def __bool__(self):
        return not self.num.is_zero

    def __eq__(self, other):
        if not isinstance(other, Scalar):
            return NotImplemented
        if self.den == other.den:
            return self.num == other.num
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        raise TypeError("Scalar is not hashable; compare via ==")

    def __add__(self, other: "Scalar") -> "Scalar":
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if self.den == other.den:
            return Scalar(self.num + other.num, self.den)
        return Scalar(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other: "Scalar") -> "Scalar":
        return self + (-other)

    def __neg__(self) -> "Scalar":
        return Scalar(-self.num, self.den)

    def __mul__(self, other: "Scalar") -> "Scalar":
        if self.is_zero or other.is_zero:
            return S_ZERO
        return Scalar(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "Scalar") -> "Scalar":
        if other.is_zero:
            raise ZeroDivisionError("division by zero Scalar")
        return Scalar(self.num * other.den, self.den * other.num)

    def __pow__(self, n: int) -> "Scalar":
        if n < 0:
            return S_ONE / self.__pow__(-n)
        out = S_ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def scale_cr(self, c: ComplexRational) -> "Scalar":
        if not c:
            return S_ZERO
        return Scalar(self.num.scale(c), self.den)

    def partial(self, name: str) -> "Scalar":
        """Formal partial derivative; quotient rule on the cleared pair."""
        dn = self.num.partial(name)
        dd = self.den.partial(name)
        if dd.is_zero:
            return Scalar(dn, self.den)
        return Scalar(dn * self.den - self.num * dd, self.den * self.den)

    def symbols(self) -> set:
        return self.num.symbols() | self.den.symbols()

    def laurent(self, name: str) -> dict:
        """Decompose as sum_k name^k * s_k with s_k free of `name`.

        Requires the denominator to be a pure name-power times a
        name-free polynomial; raises UnsupportedCoefficientError
        otherwise (e.g. 1/(t+1) has no finite Laurent form).
        """
        den_parts = self.den.split_by_power(name)
        if len(den_parts) != 1:
            raise UnsupportedCoefficientError(
                f"denominator {self.den} is not a Laurent monomial in {name}")
        b, den_rest = next(iter(den_parts.items()))
        out = {}
        for a, num_part in self.num.split_by_power(name).items():
            k = a - b
            s = Scalar(num_part, den_rest)
            out[k] = out[k] + s if k in out else s
        return {k: v for k, v in out.items() if not v.is_zero}

    def evaluate(self, env: Mapping[str, object], *, singular_tol: float = 1e-12):
        import numpy as np

        den_val = self.den.evaluate(env)
        bad = np.any(np.abs(den_val) < singular_tol) if hasattr(den_val, "__len__") \
            else abs(den_val) < singular_tol
        if bad:
            from .errors import SingularEvaluationError
            raise SingularEvaluationError(
                f"denominator vanished while evaluating {self}", scalar_text=str(self))
        return self.num.evaluate(env) / den_val

    def __str__(self):
        if self.den == P_ONE:
            return str(self.num)
        ntxt = str(self.num)
        if len(self.num.terms) > 1:
            ntxt = f"({ntxt})"
        dtxt = str(self.den)
        if len(self.den.terms) > 1:
            dtxt = f"({dtxt})"
        return f"{ntxt}/{dtxt}"

    def __repr__(self):
        return f"Scalar({self})"


S_ZERO = Scalar(P_ZERO)
S_ONE = Scalar(P_ONE)
S_I = Scalar(Poly.const(CR_I))
