"""Alternating forms over a named coframe, with structure-equation d.

A k-form stores coefficients on strictly increasing index tuples only.
Coefficients are duck typed: int, Fraction, float, ExactScalar, Poly or
LinExpr all work, as long as they add and multiply with each other.

Conventions (fixed once, everything downstream depends on them):
  * a tensor-backed form T = (1/k!) T_{i..j} theta^i ^..^ theta^j has
    KForm coefficient T_{i..j} on the sorted tuple i<..<j;
  * torsion 2-forms T^i = 1/2 T^i_{jk} theta^j ^ theta^k and curvature
    K^i_j = 1/2 K^i_{jkl} theta^k ^ theta^l follow the same rule.
"""

from __future__ import annotations

from fractions import Fraction

from .poly import Poly, SymbolTable


class Coframe:
    """Ordered basis 1-form names with a designated horizontal subset."""

    def __init__(self, names, horizontal=None):
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise ValueError("coframe names must be unique")
        self.index = {n: i for i, n in enumerate(self.names)}
        if horizontal is None:
            horizontal = self.names
        self.horizontal = tuple(self.index[n] for n in horizontal)

    def __len__(self):
        return len(self.names)

    def __eq__(self, other):
        return isinstance(other, Coframe) and self.names == other.names \
            and self.horizontal == other.horizontal

    def __repr__(self):
        return f"Coframe({', '.join(self.names)})"


def theta_coframe():
    """The 9 horizontal directions alone."""
    return Coframe([f"th{i}" for i in range(1, 10)])


def bundle_coframe():
    """The (9+3+3)-dimensional preferred coframe of the structure bundle."""
    names = [f"th{i}" for i in range(1, 10)] + ["g1", "g2", "g3", "g1p", "g2p", "g3p"]
    return Coframe(names, horizontal=names[:9])


def _merge_sign(t1, t2):
    """Concatenate sorted index tuples; None if they collide."""
    out = []
    i = j = 0
    sign = 1
    while i < len(t1) and j < len(t2):
        a, b = t1[i], t2[j]
        if a == b:
            return None, 0
        if a < b:
            out.append(a)
            i += 1
        else:
            # t2[j] jumps over the remaining len(t1)-i entries of t1
            if (len(t1) - i) % 2:
                sign = -sign
            out.append(b)
            j += 1
    out.extend(t1[i:])
    out.extend(t2[j:])
    return tuple(out), sign


def sort_indices(indices):
    """(sorted tuple, permutation sign); sign 0 on a repeated index."""
    idx = list(indices)
    sign = 1
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    for i in range(1, len(idx)):
        if idx[i - 1] == idx[i]:
            return tuple(idx), 0
    return tuple(idx), sign


class KForm:
    __slots__ = ("coframe", "degree", "coeffs")

    def __init__(self, coframe: Coframe, degree: int, coeffs: dict | None = None):
        self.coframe = coframe
        self.degree = degree
        self.coeffs = coeffs or {}

    # -- constructors -------------------------------------------------
    @staticmethod
    def zero(coframe, degree):
        return KForm(coframe, degree)

    @staticmethod
    def term(coframe, indices, coeff=1):
        srt, sign = sort_indices(indices)
        if sign == 0 or not coeff:
            return KForm(coframe, len(indices))
        return KForm(coframe, len(indices), {srt: coeff if sign == 1 else -coeff})

    @staticmethod
    def from_names(coframe, names, coeff=1):
        return KForm.term(coframe, [coframe.index[n] for n in names], coeff)

    def _check(self, other: "KForm"):
        if self.coframe != other.coframe:
            raise ValueError("forms over mismatched coframes")
        if self.degree != other.degree:
            raise ValueError("forms of mismatched degree")

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other):
        self._check(other)
        coeffs = dict(self.coeffs)
        for t, c in other.coeffs.items():
            s = coeffs.get(t, 0) + c
            if s:
                coeffs[t] = s
            elif t in coeffs:
                del coeffs[t]
        return KForm(self.coframe, self.degree, coeffs)

    def __neg__(self):
        return KForm(self.coframe, self.degree, {t: -c for t, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, s):
        if not s:
            return KForm(self.coframe, self.degree)
        out = {}
        for t, c in self.coeffs.items():
            v = c * s
            if v:
                out[t] = v
        return KForm(self.coframe, self.degree, out)

    def wedge(self, other: "KForm") -> "KForm":
        if self.coframe != other.coframe:
            raise ValueError("forms over mismatched coframes")
        deg = self.degree + other.degree
        if deg > len(self.coframe):
            return KForm(self.coframe, deg)
        out: dict = {}
        for t1, c1 in self.coeffs.items():
            for t2, c2 in other.coeffs.items():
                t, sign = _merge_sign(t1, t2)
                if sign == 0:
                    continue
                v = c1 * c2
                if sign < 0:
                    v = -v
                s = out.get(t, 0) + v
                if s:
                    out[t] = s
                elif t in out:
                    del out[t]
        return KForm(self.coframe, deg, out)

    def __eq__(self, other):
        if not isinstance(other, KForm):
            return NotImplemented
        return self.coframe == other.coframe and self.degree == other.degree \
            and not (self - other).coeffs

    def __bool__(self):
        return bool(self.coeffs)

    # -- substitution and pullback -------------------------------------
    def substitute_basis(self, images: dict) -> "KForm":
        """Replace basis 1-forms by 1-forms: index -> {index: coeff}.

        Indices absent from images map to themselves.
        """
        out = KForm(self.coframe, self.degree)
        for t, c in self.coeffs.items():
            partial = [(tuple(), c)]
            for i in t:
                img = images.get(i, {i: 1})
                nxt = []
                for tup, coeff in partial:
                    for j, a in img.items():
                        if not a:
                            continue
                        merged, sign = _merge_sign(tup, (j,))
                        if sign == 0:
                            continue
                        v = coeff * a
                        nxt.append((merged, v if sign == 1 else -v))
                partial = nxt
            for tup, coeff in partial:
                s = out.coeffs.get(tup, 0) + coeff
                if s:
                    out.coeffs[tup] = s
                elif tup in out.coeffs:
                    del out.coeffs[tup]
        return out

    def pullback(self, matrix) -> "KForm":
        """theta^i -> sum_j matrix[i][j] theta^j on the horizontal block."""
        hor = self.coframe.horizontal
        images = {}
        for a, i in enumerate(hor):
            images[i] = {hor[b]: matrix[a][b] for b in range(len(hor)) if matrix[a][b]}
        return self.substitute_basis(images)

    def embed_horizontal(self, target: Coframe) -> "KForm":
        """Re-home a purely horizontal form onto another coframe by the
        positional match of the horizontal blocks."""
        hset = set(self.coframe.horizontal)
        pos = {i: a for a, i in enumerate(self.coframe.horizontal)}
        out = KForm(target, self.degree)
        for t, c in self.coeffs.items():
            if not set(t) <= hset:
                raise ValueError("cannot embed a non-horizontal form")
            out.coeffs[tuple(sorted(target.horizontal[pos[i]] for i in t))] = c
        return out

    def map_coefficients(self, fn) -> "KForm":
        out = {}
        for t, c in self.coeffs.items():
            v = fn(c)
            if v:
                out[t] = v
        return KForm(self.coframe, self.degree, out)

    # -- the flat Hodge star on the horizontal block --------------------
    def hodge_star(self) -> "KForm":
        hor = self.coframe.horizontal
        hset = set(hor)
        pos = {i: a for a, i in enumerate(hor)}
        n = len(hor)
        out = KForm(self.coframe, n - self.degree)
        for t, c in self.coeffs.items():
            if not set(t) <= hset:
                raise ValueError("hodge star of a non-horizontal form")
            there = [pos[i] for i in t]
            comp = [a for a in range(n) if a not in there]
            _, sign = sort_indices(tuple(there) + tuple(comp))
            tup = tuple(hor[a] for a in comp)
            v = c if sign == 1 else -c
            s = out.coeffs.get(tup, 0) + v
            if s:
                out.coeffs[tup] = s
            elif tup in out.coeffs:
                del out.coeffs[tup]
        return out

    def inner(self, other: "KForm"):
        """Flat inner product: sum over sorted tuples of coeff products."""
        self._check(other)
        s = 0
        for t, c in self.coeffs.items():
            o = other.coeffs.get(t)
            if o is not None:
                s = s + c * o
        return s

    # -- output ----------------------------------------------------------
    def dump(self) -> str:
        """One line per term: `i<j<...<k : coefficient` (1-based indices)."""
        lines = []
        for t in sorted(self.coeffs):
            key = "<".join(str(i + 1) for i in t)
            lines.append(f"{key} : {self.coeffs[t]}")
        return "\n".join(lines) if lines else "0"

    def pretty(self) -> str:
        bits = []
        for t in sorted(self.coeffs):
            names = "^".join(self.coframe.names[i] for i in t)
            bits.append(f"({self.coeffs[t]}) {names}")
        return " + ".join(bits) if bits else "0"

    def __repr__(self):
        return f"KForm<deg {self.degree}: {self.pretty()}>"


class StructureTable:
    """d-rules for every basis 1-form, plus d-rules for scalar symbols.

    Symbol rules supply d of every symbol appearing in coefficients; a
    missing rule only errors when the symbol actually gets differentiated.
    """

    def __init__(self, coframe: Coframe, table: SymbolTable,
                 d_rules: dict, symbol_rules: dict | None = None):
        self.coframe = coframe
        self.table = table
        self.d_rules = d_rules
        self.symbol_rules = symbol_rules or {}
        for name in coframe.names:
            if name not in d_rules:
                raise ValueError(f"missing d-rule for {name}")

    def d(self, form: KForm) -> KForm:
        out = KForm(self.coframe, form.degree + 1)
        for t, c in form.coeffs.items():
            base = KForm(self.coframe, form.degree, {t: 1})
            # d(coefficient) ^ theta^I
            if isinstance(c, Poly):
                for v in sorted(c.variables()):
                    dc = c.derivative(self.table.names[v])
                    if dc:
                        name = self.table.names[v]
                        if name not in self.symbol_rules:
                            raise KeyError(f"no d-rule for symbol {name!r}")
                        rule = self.symbol_rules[name]
                        out = out + rule.map_coefficients(lambda x, dc=dc: dc * x).wedge(base)
            # coefficient * d(theta^I) by the Leibniz rule
            for pos in range(len(t)):
                rest = t[:pos] + t[pos + 1:]
                sign = -1 if pos % 2 else 1
                dtheta = self.d_rules[self.coframe.names[t[pos]]]
                for tt, cc in dtheta.coeffs.items():
                    merged, s2 = _merge_sign(tt, rest)
                    if s2 == 0:
                        continue
                    v = c * cc
                    if sign * s2 < 0:
                        v = -v
                    if not v:
                        continue
                    s = out.coeffs.get(merged, 0) + v
                    if s:
                        out.coeffs[merged] = s
                    elif merged in out.coeffs:
                        del out.coeffs[merged]
        return out

    def d2(self, name: str) -> KForm:
        return self.d(self.d_rules[name])

    def closure_residuals(self) -> dict:
        return {n: self.d2(n) for n in self.coframe.names}

    def is_closed(self) -> bool:
        return all(not r for r in self.closure_residuals().values())

    def substitute_symbols(self, bindings: dict) -> "StructureTable":
        """Gauge substitutions on scalar symbols (e.g. t2 -> 0)."""
        def sub(form: KForm) -> KForm:
            return form.map_coefficients(
                lambda c: c.substitute(bindings) if isinstance(c, Poly) else c)
        rules = {n: sub(f) for n, f in self.d_rules.items()}
        srules = {n: sub(f) for n, f in self.symbol_rules.items() if n not in bindings}
        return StructureTable(self.coframe, self.table, rules, srules)

    def drop_forms(self, names) -> "StructureTable":
        """Set the listed basis forms identically to zero and reindex.

        The caller is responsible for having checked the forced relations;
        here any appearance of a dropped form is simply deleted.
        """
        dead = {self.coframe.index[n] for n in names}
        keep = [i for i in range(len(self.coframe)) if i not in dead]
        remap = {old: new for new, old in enumerate(keep)}
        new_names = [self.coframe.names[i] for i in keep]
        new_hor = [self.coframe.names[i] for i in self.coframe.horizontal if i not in dead]
        cf = Coframe(new_names, horizontal=new_hor)

        def conv(form: KForm, degree) -> KForm:
            out = KForm(cf, degree)
            for t, c in form.coeffs.items():
                if set(t) & dead:
                    continue
                out.coeffs[tuple(remap[i] for i in t)] = c
            return out

        rules = {n: conv(f, 2) for n, f in self.d_rules.items() if n not in names}
        srules = {n: conv(f, 1) for n, f in self.symbol_rules.items()}
        return StructureTable(cf, self.table, rules, srules)
