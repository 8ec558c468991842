"""Manifest loading: JSON schema, expression grammar, validation.

A manifest declares a generator universe, optional rewrite rules and
named subexpressions, charts, deformations, manifolds, and a task list.
Expressions use a small infix grammar over the declared symbols:

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/'|'wedge') factor)*
    factor := ('-')? power
    power  := atom ('^' integer)?
    atom   := number | name | 'i' | 'd' '(' expr ')' | '(' expr ')'

'*' and 'wedge' both denote the graded product; '/' divides by a
degree-0 expression; numeric literals are exact (decimals become
fractions).  'i' is the imaginary unit and cannot be declared.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .cdga import FormExpr, GeneratorDecl, RewriteRule, RewriteSystem, Universe
from .errors import ArgumentError, DeclarationError, FolcharError, ManifestError, RewriteError
from .foliation import ChartFoliation, DeformationData, solve_connection
from .scalars import CR_I, ComplexRational, Poly, S_ONE, Scalar

_TOKEN = re.compile(r"\s*(?:(\d+\.\d+|\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\^|\+|\-|\*|/|\(|\)|,))")


class _Parser:
    def __init__(self, text: str, universe: Universe, lets: dict):
        self.text = text
        self.universe = universe
        self.lets = lets
        self.tokens = self._tokenize(text)
        self.pos = 0

    @staticmethod
    def _tokenize(text):
        out = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                rest = text[pos:].strip()
                if not rest:
                    break
                raise ManifestError(f"cannot tokenize {rest[:20]!r} in expression {text!r}")
            if m.group(1):
                out.append(("num", m.group(1)))
            elif m.group(2):
                out.append(("name", m.group(2)))
            else:
                out.append(("op", m.group(3)))
            pos = m.end()
        out.append(("end", ""))
        return out

    def _peek(self):
        return self.tokens[self.pos]

    def _next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def _expect_op(self, op):
        kind, val = self._next()
        if kind != "op" or val != op:
            raise ManifestError(f"expected {op!r} in {self.text!r}, found {val!r}")

    def parse(self) -> FormExpr:
        e = self._expr()
        kind, val = self._peek()
        if kind != "end":
            raise ManifestError(f"unexpected trailing {val!r} in {self.text!r}")
        return e

    def _expr(self) -> FormExpr:
        e = self._term()
        while True:
            kind, val = self._peek()
            if kind == "op" and val in "+-":
                self._next()
                rhs = self._term()
                e = e + rhs if val == "+" else e - rhs
            else:
                return e

    def _term(self) -> FormExpr:
        e = self._factor()
        while True:
            kind, val = self._peek()
            if kind == "op" and val in "*/":
                self._next()
                rhs = self._factor()
                e = e.wedge(rhs) if val == "*" else self._divide(e, rhs)
            elif kind == "name" and val == "wedge":
                self._next()
                e = e.wedge(self._factor())
            else:
                return e

    def _divide(self, a: FormExpr, b: FormExpr) -> FormExpr:
        s = _as_scalar(b, self.text)
        if s.is_zero:
            raise ManifestError(f"division by zero in {self.text!r}")
        return a.scale(S_ONE / s)

    def _factor(self) -> FormExpr:
        kind, val = self._peek()
        if kind == "op" and val == "-":
            self._next()
            return -self._factor()
        return self._power()

    def _power(self) -> FormExpr:
        base = self._atom()
        kind, val = self._peek()
        if kind == "op" and val == "^":
            self._next()
            sign = 1
            k2, v2 = self._peek()
            if k2 == "op" and v2 == "-":
                self._next()
                sign = -1
            k3, v3 = self._next()
            if k3 != "num" or "." in v3:
                raise ManifestError(f"exponent must be an integer in {self.text!r}")
            n = sign * int(v3)
            if n >= 0:
                return base ** n
            s = _as_scalar(base, self.text)
            return self.universe.form(s ** n)
        return base

    def _atom(self) -> FormExpr:
        kind, val = self._next()
        u = self.universe
        if kind == "num":
            frac = Fraction(val)
            return u.form(Scalar.from_const(ComplexRational(frac)))
        if kind == "op" and val == "(":
            e = self._expr()
            self._expect_op(")")
            return e
        if kind == "name":
            if val == "d":
                k2, v2 = self._peek()
                if k2 == "op" and v2 == "(":
                    self._next()
                    e = self._expr()
                    self._expect_op(")")
                    return e.d()
            if val == "i":
                return u.form(Scalar.from_const(CR_I))
            if val in self.lets:
                return self.lets[val]
            if u.has(val):
                d = u.decl(val)
                return u.form(u.sym(val)) if d.degree == 0 else u.gen(val)
            raise ManifestError(f"undeclared symbol {val!r} in expression {self.text!r}")
        raise ManifestError(f"unexpected token {val!r} in {self.text!r}")


def _as_scalar(form: FormExpr, context: str) -> Scalar:
    if form.is_zero:
        return Scalar.from_const(0)
    if set(form.terms) != {()}:
        raise ManifestError(f"a degree-0 expression is required in {context!r}")
    return form.terms[()]


def parse_expression(text: str, universe: Universe, lets: dict | None = None) -> FormExpr:
    return _Parser(str(text), universe, lets or {}).parse()


def parse_complex(value) -> complex:
    """Complex literal: number, [re, im], or a string like '1+2i'."""
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        txt = value.strip().replace(" ", "")
        txt = re.sub(r"i\b", "j", txt)
        txt = txt.replace("i", "j")
        try:
            return complex(txt)
        except ValueError:
            raise ManifestError(f"cannot parse complex literal {value!r}") from None
    raise ManifestError(f"cannot parse complex literal {value!r}")


# -- manifest data --------------------------------------------------------------

@dataclass
class ManifestData:
    path: str
    universe: Universe
    lets: dict
    rewrites: RewriteSystem | None
    charts: dict
    deformations: dict
    manifolds: dict  # name -> (builtin_name, params dict)
    tasks: list
    raw: dict = field(repr=False, default_factory=dict)

    def default_chart(self) -> str:
        return next(iter(self.charts))

    def default_deformation(self) -> str | None:
        return next(iter(self.deformations), None)

    def default_manifold(self) -> str | None:
        return next(iter(self.manifolds), None)


_GEN_KEYS = {"name", "degree", "transverse", "differential", "conjugate"}
_TOP_KEYS = {"generators", "lets", "rewrites", "charts", "deformations",
             "manifolds", "tasks"}


def load_manifest(path: str) -> ManifestData:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as e:
        raise ManifestError(f"cannot read manifest {path}: {e}") from None
    except json.JSONDecodeError as e:
        raise ManifestError(f"manifest {path} is not valid JSON: {e}") from None
    if not isinstance(raw, dict):
        raise ManifestError("manifest root must be a JSON object")
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ManifestError(f"unknown manifest sections {sorted(unknown)}")

    gens = raw.get("generators")
    if not gens:
        raise ManifestError("manifest needs a non-empty 'generators' section")
    decls = []
    odd_differential_exprs = {}
    for g in gens:
        unknown = set(g) - _GEN_KEYS
        if unknown:
            raise ManifestError(f"generator {g.get('name')!r}: unknown keys {sorted(unknown)}")
        name = g.get("name")
        if not isinstance(name, str) or not name:
            raise ManifestError("every generator needs a string name")
        if name == "i":
            raise ManifestError("'i' is the imaginary unit and cannot be declared")
        degree = g.get("degree")
        if degree not in (0, 1):
            raise ManifestError(f"generator {name!r}: degree must be 0 or 1")
        diff = g.get("differential")
        if degree == 1 and diff is not None:
            odd_differential_exprs[name] = diff
            diff = None
        decls.append(GeneratorDecl(name, degree, bool(g.get("transverse", False)),
                                   diff, g.get("conjugate")))
    try:
        universe = Universe(
            decls,
            odd_differentials={
                n: (lambda u, txt=txt: parse_expression(txt, u))
                for n, txt in odd_differential_exprs.items()
            } or None,
        )
    except FolcharError as e:
        raise ManifestError(f"invalid generator universe: {e}") from None

    lets: dict = {}
    for name, txt in (raw.get("lets") or {}).items():
        if universe.has(name):
            raise ManifestError(f"let {name!r} shadows a declared generator")
        lets[name] = parse_expression(txt, universe, lets)

    rewrites = None
    rules_raw = raw.get("rewrites") or []
    if rules_raw:
        rules = []
        one = Poly.const(1)
        for r in rules_raw:
            lhs_scalar = _as_scalar(parse_expression(r["lhs"], universe, lets), r["lhs"])
            if lhs_scalar.den != one or len(lhs_scalar.num.terms) != 1:
                raise ManifestError(f"rewrite lhs {r['lhs']!r} must be a single monomial")
            (mono, coeff), = lhs_scalar.num.terms.items()
            if coeff != ComplexRational(1):
                raise ManifestError(f"rewrite lhs {r['lhs']!r} must have coefficient 1")
            rhs_scalar = _as_scalar(parse_expression(r["rhs"], universe, lets), r["rhs"])
            if rhs_scalar.den != one:
                raise ManifestError(f"rewrite rhs {r['rhs']!r} must be polynomial")
            rules.append(RewriteRule(mono, rhs_scalar.num))
        try:
            rewrites = RewriteSystem(rules)
        except RewriteError as e:
            raise ManifestError(f"invalid rewrite system: {e}") from None

    charts = {}
    for idx, c in enumerate(raw.get("charts") or []):
        name = c.get("name", f"chart{idx}")
        q = c.get("q")
        if not isinstance(q, int) or q < 1:
            raise ManifestError(f"chart {name!r}: q must be a positive integer")
        category = c.get("category", "real")
        omega_txts = c.get("omega")
        if not omega_txts or len(omega_txts) != q:
            raise ManifestError(f"chart {name!r}: omega must list q={q} one-forms")
        omega = tuple(parse_expression(t, universe, lets) for t in omega_txts)
        tau_spec = c.get("tau")
        if isinstance(tau_spec, dict) and "solve" in tau_spec:
            if q != 1:
                raise ManifestError(f"chart {name!r}: tau solve mode needs q = 1")
            ansatz = [parse_expression(t, universe, lets)
                      for t in tau_spec["solve"].get("ansatz", [])]
            try:
                eta = solve_connection(omega[0], ansatz, rewrites=rewrites)
            except FolcharError as e:
                raise ManifestError(f"chart {name!r}: connection solve failed: {e}") from None
            tau = ((eta,),)
        else:
            if (not isinstance(tau_spec, list) or len(tau_spec) != q
                    or any(len(row) != q for row in tau_spec)):
                raise ManifestError(f"chart {name!r}: tau must be a {q}x{q} matrix or solve spec")
            tau = tuple(tuple(parse_expression(t, universe, lets) for t in row)
                        for row in tau_spec)
        try:
            charts[name] = ChartFoliation(q, category, tau, omega)
        except FolcharError as e:
            raise ManifestError(f"chart {name!r}: {e}") from None

    deformations = {}
    for idx, d in enumerate(raw.get("deformations") or []):
        name = d.get("name", f"deformation{idx}")
        chart_name = d.get("chart", next(iter(charts), None))
        if chart_name not in charts:
            raise ManifestError(f"deformation {name!r}: unknown chart {chart_name!r}")
        chart = charts[chart_name]
        try:
            if "derive_from" in d:
                deformations[name] = DeformationData.from_parameter(
                    chart, d["derive_from"], scale=d.get("scale", 1))
            else:
                omega_dot = tuple(parse_expression(t, universe, lets)
                                  for t in d.get("omega_dot", []))
                if len(omega_dot) != chart.q:
                    raise ManifestError(
                        f"deformation {name!r}: omega_dot needs q={chart.q} entries")
                tau_dot_spec = d.get("tau_dot", "solve")
                if tau_dot_spec == "solve":
                    deformations[name] = DeformationData.solve_tau_dot(chart, omega_dot)
                else:
                    tau_dot = tuple(tuple(parse_expression(t, universe, lets) for t in row)
                                    for row in tau_dot_spec)
                    deformations[name] = DeformationData(chart, omega_dot, tau_dot)
        except ManifestError:
            raise
        except FolcharError as e:
            raise ManifestError(f"deformation {name!r}: {e}") from None

    manifolds = {}
    for idx, m in enumerate(raw.get("manifolds") or []):
        name = m.get("name", f"manifold{idx}")
        builtin_name = m.get("builtin")
        if builtin_name not in ("s3", "s1", "s3xs1"):
            raise ManifestError(
                f"manifold {name!r}: builtin must be one of s3, s1, s3xs1")
        params = {k: parse_complex(v) for k, v in (m.get("params") or {}).items()}
        manifolds[name] = (builtin_name, params)

    tasks = raw.get("tasks") or []
    known_tasks = {"check", "class", "sweep", "prop31"}
    for t in tasks:
        if not isinstance(t, dict) or t.get("task") not in known_tasks:
            raise ManifestError(f"unknown task entry {t!r}; tasks: {sorted(known_tasks)}")

    return ManifestData(path, universe, lets, rewrites, charts, deformations,
                        manifolds, tasks, raw)


def universe_to_dict(u: Universe) -> list:
    """Serialize a universe back into the manifest generator schema."""
    out = []
    for d in u.decls:
        entry: dict = {"name": d.name, "degree": d.degree}
        if d.transverse:
            entry["transverse"] = True
        if d.differential is not None:
            entry["differential"] = d.differential
        if d.conjugate is not None:
            entry["conjugate"] = d.conjugate
        out.append(entry)
    return out


def universe_from_dict(gens: list) -> Universe:
    decls = [GeneratorDecl(g["name"], g["degree"], bool(g.get("transverse", False)),
                           g.get("differential"), g.get("conjugate")) for g in gens]
    return Universe(decls)
