"""Sparse multivariate polynomials and their fractions.

A monomial is a tuple of (variable_index, exponent) pairs, sorted by index,
all exponents positive; the empty tuple is the constant monomial.  Terms
live in a dict monomial -> coefficient, zero coefficients never stored.
Coefficients may be Fraction, int or ExactScalar (duck typed).

The canonical term order is graded lexicographic with respect to the
declaration order of the symbol table; it only matters for leading-term
extraction and printing, determinism is the point.
"""

from __future__ import annotations

from fractions import Fraction

Monomial = tuple


class SymbolTable:
    """Ordered registry of symbol names shared by a family of polynomials."""

    def __init__(self, names=()):
        self.names: list[str] = []
        self.index: dict[str, int] = {}
        for n in names:
            self.add(n)

    def add(self, name: str) -> int:
        if name in self.index:
            return self.index[name]
        self.index[name] = len(self.names)
        self.names.append(name)
        return self.index[name]

    def __contains__(self, name: str) -> bool:
        return name in self.index

    def __len__(self):
        return len(self.names)


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for v, e in m2:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def _mono_deg(m: Monomial) -> int:
    return sum(e for _, e in m)


def _mono_key(m: Monomial):
    # graded lex: higher total degree first, then earlier variables with
    # higher exponents; encode so that sorted(..., reverse=True) is canonical
    return (_mono_deg(m), tuple((-v, e) for v, e in m))


class Poly:
    __slots__ = ("table", "terms")

    def __init__(self, table: SymbolTable, terms: dict | None = None):
        self.table = table
        self.terms = {} if terms is None else terms

    # -- constructors ------------------------------------------------
    @staticmethod
    def const(table: SymbolTable, c) -> "Poly":
        if isinstance(c, int):
            c = Fraction(c)
        return Poly(table, {(): c} if c else {})

    @staticmethod
    def variable(table: SymbolTable, name: str) -> "Poly":
        i = table.index[name]
        return Poly(table, {((i, 1),): Fraction(1)})

    def coerce(self, x) -> "Poly":
        if isinstance(x, Poly):
            if x.table is not self.table:
                raise ValueError("polynomials from different symbol tables")
            return x
        if not isinstance(x, (int, Fraction, float)) and \
                type(x).__name__ != "ExactScalar":
            raise TypeError(f"cannot coerce {type(x).__name__} into Poly")
        return Poly.const(self.table, x)

    # -- inspection ---------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def constant_value(self):
        if not self.terms:
            return Fraction(0)
        if self.is_constant():
            return self.terms[()]
        raise ValueError(f"{self} is not constant")

    def degree(self) -> int:
        return max((_mono_deg(m) for m in self.terms), default=0)

    def variables(self) -> set:
        return {v for m in self.terms for v, _ in m}

    def leading(self) -> tuple:
        """(monomial, coefficient) of the graded-lex leading term."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        m = max(self.terms, key=_mono_key)
        return m, self.terms[m]

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: _mono_key(kv[0]), reverse=True)

    # -- arithmetic ----------------------------------------------------
    def __add__(self, other):
        try:
            o = self.coerce(other)
        except TypeError:
            return NotImplemented
        terms = dict(self.terms)
        for m, c in o.terms.items():
            s = terms.get(m, 0) + c
            if s:
                terms[m] = s
            elif m in terms:
                del terms[m]
        return Poly(self.table, terms)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.table, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        try:
            o = self.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        try:
            o = self.coerce(other)
        except TypeError:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            if not isinstance(other, (int, Fraction, float)) and \
                    type(other).__name__ != "ExactScalar":
                return NotImplemented
            if isinstance(other, int):
                other = Fraction(other)
            if not other:
                return Poly(self.table)
            return Poly(self.table, {m: c * other for m, c in self.terms.items()})
        if other.table is not self.table:
            raise ValueError("polynomials from different symbol tables")
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                s = out.get(m, 0) + c1 * c2
                if s:
                    out[m] = s
                elif m in out:
                    del out[m]
        return Poly(self.table, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of Poly")
        result = Poly.const(self.table, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.table is other.table and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == Poly.const(self.table, other).terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- calculus ------------------------------------------------------
    def derivative(self, name: str) -> "Poly":
        v = self.table.index[name]
        out: dict = {}
        for m, c in self.terms.items():
            d = dict(m)
            if v not in d:
                continue
            e = d[v]
            if e == 1:
                del d[v]
            else:
                d[v] = e - 1
            mm = tuple(sorted(d.items()))
            s = out.get(mm, 0) + e * c
            if s:
                out[mm] = s
            elif mm in out:
                del out[mm]
        return Poly(self.table, out)

    def substitute(self, bindings: dict):
        """Replace symbols by values (Poly, RatFunc or scalars).

        Unknown binding names error; unbound symbols stay symbolic.  The
        result type follows the bindings (RatFunc if any binding is one).
        """
        for name in bindings:
            if name not in self.table.index:
                raise KeyError(f"unknown symbol {name!r}")
        by_index = {self.table.index[n]: v for n, v in bindings.items()}
        result = None
        for m, c in self.terms.items():
            term = Poly.const(self.table, c)
            for v, e in m:
                if v in by_index:
                    val = by_index[v]
                    if isinstance(val, (int, Fraction)):
                        val = Poly.const(self.table, val)
                    factor = val ** e
                else:
                    factor = Poly(self.table, {((v, e),): Fraction(1)})
                term = factor * term if isinstance(factor, RatFunc) else term * factor
            result = term if result is None else result + term
        if result is None:
            return Poly(self.table)
        return result

    def eval_float(self, bindings: dict) -> float:
        total = 0.0
        for m, c in self.terms.items():
            x = float(c)
            for v, e in m:
                x *= float(bindings[self.table.names[v]]) ** e
            total += x
        return total

    # -- printing --------------------------------------------------------
    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for m, c in self.sorted_terms():
            factors = []
            for v, e in m:
                n = self.table.names[v]
                factors.append(n if e == 1 else f"{n}^{e}")
            body = "*".join(factors)
            if body:
                if c == 1:
                    bits.append(body)
                elif c == -1:
                    bits.append(f"-{body}")
                else:
                    bits.append(f"{c}*{body}")
            else:
                bits.append(f"{c}")
        out = " + ".join(bits)
        return out.replace("+ -", "- ")


# ---------------------------------------------------------------------------
# gcd machinery (recursive primitive pseudo-remainder sequences)
# ---------------------------------------------------------------------------

def _to_univariate(p: Poly, v: int) -> list:
    """Dense coefficient list in variable v, entries Poly without v."""
    deg = 0
    for m in p.terms:
        for var, e in m:
            if var == v:
                deg = max(deg, e)
    coeffs = [Poly(p.table) for _ in range(deg + 1)]
    for m, c in p.terms.items():
        e = 0
        rest = []
        for var, ex in m:
            if var == v:
                e = ex
            else:
                rest.append((var, ex))
        coeffs[e] = coeffs[e] + Poly(p.table, {tuple(rest): c})
    return coeffs


def _from_univariate(coeffs: list, v: int, table: SymbolTable) -> Poly:
    out = Poly(table)
    xv = Poly(table, {((v, 1),): Fraction(1)})
    for e, c in enumerate(coeffs):
        if c:
            out = out + c * (xv ** e)
    return out


def poly_divmod_exact(p: Poly, d: Poly) -> Poly:
    """Exact quotient p/d; raises ValueError if d does not divide p."""
    if not d:
        raise ZeroDivisionError("polynomial division by zero")
    table = p.table
    q = Poly(table)
    r = p
    dm, dc = d.leading()
    while r:
        rm, rc = r.leading()
        # divide leading monomials
        diff = dict(rm)
        ok = True
        for v, e in dm:
            if diff.get(v, 0) < e:
                ok = False
                break
            diff[v] -= e
            if diff[v] == 0:
                del diff[v]
        if not ok:
            raise ValueError("inexact polynomial division")
        mono = tuple(sorted(diff.items()))
        coeff = rc / dc if not isinstance(rc, int) else Fraction(rc) / dc
        t = Poly(table, {mono: coeff})
        q = q + t
        r = r - t * d
    return q


def _content(coeffs: list) -> Poly:
    g = None
    for c in coeffs:
        if c:
            g = c if g is None else poly_gcd(g, c)
    return g


def _prem(a: list, b: list, table: SymbolTable) -> list:
    """Pseudo-remainder of dense univariate lists with Poly coefficients."""
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    while len(a) - 1 >= db and any(bool(c) for c in a):
        while a and not a[-1]:
            a.pop()
        if not a or len(a) - 1 < db:
            break
        la = a[-1]
        shift = len(a) - 1 - db
        a = [c * lb for c in a]
        for i, c in enumerate(b):
            a[i + shift] = a[i + shift] - la * c
        while a and not a[-1]:
            a.pop()
    return a


def poly_gcd(p: Poly, q: Poly) -> Poly:
    """gcd up to a unit; monic-normalized in the graded-lex leading coeff."""
    if not p:
        g = q
    elif not q:
        g = p
    else:
        pv = p.variables() | q.variables()
        if not pv:
            return Poly.const(p.table, 1)
        v = max(pv)
        a, b = _to_univariate(p, v), _to_univariate(q, v)
        ca, cb = _content(a), _content(b)
        cg = poly_gcd(ca, cb)
        a = [poly_divmod_exact(c, ca) if c else c for c in a]
        b = [poly_divmod_exact(c, cb) if c else c for c in b]
        if len(a) < len(b):
            a, b = b, a
        while True:
            b = [c for c in b]
            while b and not b[-1]:
                b.pop()
            if not b:
                g0 = _from_univariate(a, v, p.table)
                break
            r = _prem(a, b, p.table)
            while r and not r[-1]:
                r.pop()
            if not r:
                g0 = _from_univariate(b, v, p.table)
                break
            cr = _content(r)
            r = [poly_divmod_exact(c, cr) if c else c for c in r]
            a, b = b, r
        # primitive part gcd times content gcd
        if g0:
            u = _to_univariate(g0, v)
            cu = _content(u)
            g0 = poly_divmod_exact(g0, cu)
        g = cg * g0
    if not g:
        return g
    _, lc = g.leading()
    if lc != 1:
        inv = (Fraction(1) / lc) if isinstance(lc, (int, Fraction)) else 1 / lc
        g = g * inv
    return g


class RatFunc:
    """Quotient of two polynomials, gcd-reduced, monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None, reduce: bool = True):
        if den is None:
            den = Poly.const(num.table, 1)
        if not den:
            raise ZeroDivisionError("zero denominator")
        if reduce:
            g = poly_gcd(num, den)
            if g and not (g.is_constant() and g.constant_value() == 1):
                num = poly_divmod_exact(num, g)
                den = poly_divmod_exact(den, g)
            _, lc = den.leading()
            if lc != 1:
                inv = (Fraction(1) / lc) if isinstance(lc, (int, Fraction)) else 1 / lc
                num = num * inv
                den = den * inv
        self.num = num
        self.den = den

    @staticmethod
    def of(x, table: SymbolTable) -> "RatFunc":
        if isinstance(x, RatFunc):
            return x
        if isinstance(x, Poly):
            return RatFunc(x, reduce=False)
        return RatFunc(Poly.const(table, x), reduce=False)

    def __bool__(self):
        return bool(self.num)

    def __add__(self, other):
        o = RatFunc.of(other, self.num.table)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, reduce=False)

    def __sub__(self, other):
        return self + (-RatFunc.of(other, self.num.table))

    def __rsub__(self, other):
        return RatFunc.of(other, self.num.table) + (-self)

    def __mul__(self, other):
        o = RatFunc.of(other, self.num.table)
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = RatFunc.of(other, self.num.table)
        if not o.num:
            raise ZeroDivisionError("division by zero RatFunc")
        return RatFunc(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return RatFunc.of(other, self.num.table) / self

    def __pow__(self, n: int):
        if n < 0:
            return RatFunc(self.den, self.num) ** (-n)
        return RatFunc(self.num ** n, self.den ** n)

    def __eq__(self, other):
        o = RatFunc.of(other, self.num.table)
        # cross multiplication; independent of normalization state
        return self.num * o.den == o.num * self.den

    def __repr__(self):
        if self.den.is_constant() and self.den.constant_value() == 1:
            return repr(self.num)
        return f"({self.num!r})/({self.den!r})"


class LinExpr:
    """Affine-linear expression  sum coeff_u * u + const  in named unknowns.

    Coefficients and the constant are Poly over the shared symbol table.
    Products of two expressions that both carry unknowns raise -- this is
    the linearity guard the staged eliminations rely on.
    """

    __slots__ = ("table", "lin", "const")

    def __init__(self, table: SymbolTable, lin: dict | None = None, const: Poly | None = None):
        self.table = table
        self.lin = lin or {}
        self.const = const if const is not None else Poly(table)

    @staticmethod
    def unknown(table: SymbolTable, name: str) -> "LinExpr":
        return LinExpr(table, {name: Poly.const(table, 1)})

    @staticmethod
    def known(table: SymbolTable, value) -> "LinExpr":
        if isinstance(value, LinExpr):
            return value
        if not isinstance(value, Poly):
            value = Poly.const(table, value)
        return LinExpr(table, {}, value)

    def __bool__(self):
        return bool(self.const) or any(bool(c) for c in self.lin.values())

    def __add__(self, other):
        o = LinExpr.known(self.table, other)
        lin = dict(self.lin)
        for k, v in o.lin.items():
            s = lin.get(k, Poly(self.table)) + v
            if s:
                lin[k] = s
            elif k in lin:
                del lin[k]
        return LinExpr(self.table, lin, self.const + o.const)

    __radd__ = __add__

    def __neg__(self):
        return LinExpr(self.table, {k: -v for k, v in self.lin.items()}, -self.const)

    def __sub__(self, other):
        return self + (-LinExpr.known(self.table, other))

    def __rsub__(self, other):
        return LinExpr.known(self.table, other) + (-self)

    def __mul__(self, other):
        if isinstance(other, LinExpr):
            if other.lin and self.lin:
                raise ValueError("nonlinear product of unknowns")
            if other.lin:
                return other * self.const
            other = other.const
        if not isinstance(other, Poly):
            other = Poly.const(self.table, other)
        return LinExpr(self.table,
                       {k: v * other for k, v in self.lin.items() if v * other},
                       self.const * other)

    __rmul__ = __mul__

    def __eq__(self, other):
        o = LinExpr.known(self.table, other)
        return not bool(self - o)

    def substitute_unknowns(self, assignment: dict) -> "LinExpr":
        """Replace solved unknowns by Poly values; others stay."""
        out = LinExpr(self.table, {}, self.const)
        for k, v in self.lin.items():
            if k in assignment:
                out = out + LinExpr.known(self.table, v * assignment[k])
            else:
                out = out + LinExpr(self.table, {k: v})
        return out

    def __repr__(self):
        bits = [f"({v!r})*{k}" for k, v in sorted(self.lin.items())]
        if self.const or not bits:
            bits.append(repr(self.const))
        return " + ".join(bits)
