"""First and second Bianchi identities on the 15-dimensional bundle.

The structure equations carry three kinds of symbols:
  * torsion components (t1..t3, u1..u7) -- Poly symbols,
  * curvature components kappa^A_{ij}   -- linear unknowns,
  * derivative-ansatz components of d(torsion) -- linear unknowns,
and d^2 == 0 is expanded into LinExpr coefficient equations which are
solved in the stages the primitive-form decomposition dictates: terms at
theta^theta^gamma first, then theta^theta^theta, then the rest must
vanish identically.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from .forms import Coframe, KForm, StructureTable, bundle_coframe
from .linalg import (LinAlgError, StagedSolution, solve_linear_exprs,
                     substitute_conditions)
from .poly import LinExpr, Poly, SymbolTable
from .rep9 import GENERATORS
from .torsion import TRIPLES, symbolic_params, torsion_forms

GAMMA_NAMES = ("g1", "g2", "g3", "g1p", "g2p", "g3p")
# (2str): d g1 = -g2^g3 + kappa^1 and cyclic, separately for both factors
GAMMA_STRUCTURE = {"g1": ("g2", "g3"), "g2": ("g3", "g1"), "g3": ("g1", "g2"),
                   "g1p": ("g2p", "g3p"), "g2p": ("g3p", "g1p"), "g3p": ("g1p", "g2p")}
FREE_FUNCTION = {"none": "s", "v02": "k", "v06": "k1", "mixed": "k1"}


def kappa_unknown(g: str, i: int, j: int) -> str:
    return f"K{g}_{i}_{j}"


def dt_unknown(sym: str, form_name: str) -> str:
    return f"D{sym}_{form_name}"


def gamma_wedge_terms(cf: Coframe, table: SymbolTable):
    """The connection part of (1str): d th^i += -Gamma^i_j ^ th^j."""
    out = [KForm(cf, 2) for _ in range(9)]
    for a, g in enumerate(GAMMA_NAMES):
        gen = GENERATORS[a]
        gi = cf.index[g]
        for i in range(9):
            for j in range(9):
                if gen[i][j]:
                    out[i] = out[i] + KForm.term(
                        cf, (gi, cf.index[f"th{j + 1}"]), Fraction(-gen[i][j]))
    return out


def kappa_unknown_form(cf: Coframe, table: SymbolTable, g: str) -> KForm:
    f = KForm(cf, 2)
    for i, j in combinations(range(9), 2):
        name = kappa_unknown(g, i, j)
        f = f + KForm.term(cf, (cf.index[f"th{i + 1}"], cf.index[f"th{j + 1}"]),
                           LinExpr.unknown(table, name))
    return f


def dt_ansatz_form(cf: Coframe, table: SymbolTable, sym: str) -> KForm:
    f = KForm(cf, 1)
    for name in cf.names:
        f = f + KForm(cf, 1, {(cf.index[name],): LinExpr.unknown(table, dt_unknown(sym, name))})
    return f


def bundle_table(family: str, table: SymbolTable | None = None,
                 curvature: dict | None = None, dt_rules: dict | None = None):
    """(1str)-(2str) with the chosen torsion family.

    curvature: None for kappa unknowns, else dict g-name -> 2-form.
    dt_rules: None for the full derivative ansatz, else solved 1-forms.
    """
    table = table or SymbolTable()
    cf = bundle_coframe()
    if family == "none":
        params = {}
        tors = [KForm(cf, 2) for _ in range(9)]
    else:
        params = symbolic_params(table, family)
        tors = torsion_forms(params, cf)
    conn = gamma_wedge_terms(cf, table)
    d_rules = {}
    for i in range(9):
        d_rules[f"th{i + 1}"] = conn[i] + tors[i]
    for g, (a, b) in GAMMA_STRUCTURE.items():
        rule = KForm.term(cf, (cf.index[a], cf.index[b]), Fraction(-1))
        if curvature is None:
            rule = rule + kappa_unknown_form(cf, table, g)
        else:
            kap = curvature.get(g)
            if kap is not None:
                rule = rule + kap
        d_rules[g] = rule
    symbol_rules = {}
    active = [s for s, v in params.items() if v]
    for sym in active:
        if dt_rules is not None:
            symbol_rules[sym] = dt_rules[sym]
        else:
            symbol_rules[sym] = dt_ansatz_form(cf, table, sym)
    return StructureTable(cf, table, d_rules, symbol_rules), table, active


class BianchiResult:
    def __init__(self, family, table, st, dt_rules, curvature, free, solution):
        self.family = family
        self.table = table          # SymbolTable (holds torsion + free syms)
        self.structure = st         # the bundle StructureTable (with unknowns)
        self.dt_rules = dt_rules    # sym -> solved 1-form (Poly coefficients)
        self.curvature = curvature  # g-name -> solved 2-form (Poly coefficients)
        self.free = free            # canonical free-function names
        self.solution = solution    # raw StagedSolution

    def curvature_in_kappa0_basis(self):
        """Expand each kappa^A over the kappa0 2-forms if possible."""
        from .modules9 import KAPPA0
        cf = self.structure.coframe
        out = {}
        for g in GAMMA_NAMES:
            form = self.curvature[g]
            expansion = {}
            rest = form
            for name, base in KAPPA0.items():
                b = base.embed_horizontal(cf)
                t0, c0 = next(iter(b.coeffs.items()))
                coeff = rest.coeffs.get(t0, 0)
                if coeff:
                    coeff = coeff * (Fraction(1) / c0)
                    expansion[name] = coeff
                    rest = rest - b.map_coefficients(lambda x, c=coeff: c * x)
            out[g] = (expansion, rest)
        return out


def _classify(cf: Coframe, t):
    """Number of gamma indices in a coefficient tuple."""
    hor = set(cf.horizontal)
    return sum(1 for i in t if i not in hor)


def first_bianchi(family: str):
    """Solve d^2 theta == 0 for the derivative rules and the curvature."""
    st, table, active = bundle_table(family)
    cf = st.coframe
    residuals = [st.d2(f"th{i}") for i in range(1, 10)]
    stage_eqs = {0: [], 1: [], 2: [], 3: []}
    for r in residuals:
        for t, c in r.coeffs.items():
            if isinstance(c, LinExpr) and c:
                stage_eqs[_classify(cf, t)].append(c)
            elif not isinstance(c, LinExpr) and c:
                stage_eqs[_classify(cf, t)].append(LinExpr.known(table, c))
    # stage 1: theta^theta^gamma determines the gamma components of dt
    sol1 = solve_linear_exprs(stage_eqs[1], table)
    if any(bool(c) for c in sol1.conditions):
        raise LinAlgError(f"first Bianchi stage 1 leaves conditions in {family}")
    # stage 2: theta^theta^theta determines dt theta-components and kappa
    eqs2 = [e.substitute_unknowns(sol1.assignment) for e in stage_eqs[0]]
    sol2 = solve_linear_exprs(eqs2, table)
    if any(bool(c) for c in sol2.conditions):
        raise LinAlgError(f"first Bianchi stage 2 leaves conditions in {family}")
    assignment = dict(sol1.assignment)
    assignment.update(sol2.assignment)
    # remaining primitive types must vanish identically
    for grade in (2, 3):
        for e in stage_eqs[grade]:
            r = e.substitute_unknowns(assignment)
            if r.lin or r.const:
                raise LinAlgError(f"first Bianchi leaves a grade-{grade} residual")
    free_raw = sorted(set(sol1.free) | set(sol2.free))
    # rename the free unknowns to the family's canonical function names
    canonical = FREE_FUNCTION[family]
    renames = {}
    canonical_free = []
    for n, name in enumerate(free_raw):
        new = canonical if n == 0 else f"{canonical}_{n + 1}"
        table.add(new)
        canonical_free.append(new)
        renames[name] = Poly.variable(table, new)
    # orient the first free function so kappa^1 = +f * kappa0^1 + ...,
    # i.e. the coefficient on theta^1^theta^4 carries -f
    if free_raw:
        probe = assignment.get(kappa_unknown("g1", 0, 3))
        if probe is None and kappa_unknown("g1", 0, 3) in free_raw:
            probe = Poly.variable(table, kappa_unknown("g1", 0, 3))
        if probe is not None:
            dcoef = probe.derivative(free_raw[0])
            if dcoef.is_constant() and dcoef.constant_value() > 0:
                renames[free_raw[0]] = -renames[free_raw[0]]
    def finalize(p: Poly) -> Poly:
        return p.substitute(renames) if renames else p
    def lookup(u):
        if u in renames:
            return renames[u]
        val = assignment.get(u)
        if val is None:
            raise LinAlgError(f"underdetermined component {u}")
        return finalize(val)

    dt_rules = {}
    for sym in active:
        f = KForm(cf, 1)
        for name in cf.names:
            val = lookup(dt_unknown(sym, name))
            if val:
                f = f + KForm(cf, 1, {(cf.index[name],): val})
        dt_rules[sym] = f
    curvature = {}
    for g in GAMMA_NAMES:
        f = KForm(cf, 2)
        for i, j in combinations(range(9), 2):
            val = lookup(kappa_unknown(g, i, j))
            if val:
                f = f + KForm(cf, 2, {(cf.index[f"th{i + 1}"], cf.index[f"th{j + 1}"]): val})
        curvature[g] = f
    # full verification: the assignment kills every residual coefficient,
    # identically in the torsion symbols and the raw free unknowns
    for r in residuals:
        for t, c in r.coeffs.items():
            if isinstance(c, LinExpr):
                res = c.substitute_unknowns(assignment)
                leftovers = set(res.lin) - set(free_raw)
                if leftovers:
                    raise LinAlgError(f"unsolved unknowns {leftovers}")
                p = res.const
                for name, coeff in res.lin.items():
                    p = p + coeff * Poly.variable(table, name)
                if p:
                    raise LinAlgError("nonzero residual after first Bianchi")
            elif c:
                raise LinAlgError("nonzero known residual after first Bianchi")
    return BianchiResult(family, table, st, dt_rules, curvature,
                         canonical_free, StagedSolution(assignment, free_raw, [], []))


def second_bianchi(first: BianchiResult):
    """Solve d^2 gamma == 0 for the derivatives of the free functions."""
    family = first.family
    table = first.table
    st0, _, active = bundle_table(family, table=table,
                                  curvature=first.curvature,
                                  dt_rules=first.dt_rules)
    cf = st0.coframe
    # ansatz for d of each free function
    for name in first.free:
        st0.symbol_rules[name] = dt_ansatz_form(cf, table, name)
    residuals = [st0.d2(g) for g in GAMMA_NAMES]
    eqs = []
    for r in residuals:
        for t, c in r.coeffs.items():
            if isinstance(c, LinExpr) and c:
                eqs.append(c)
            elif not isinstance(c, LinExpr) and c:
                eqs.append(LinExpr.known(table, c))
    sol = solve_linear_exprs(eqs, table)
    if sol.free:
        raise LinAlgError(f"second Bianchi free unknowns {sol.free}")
    rules = {}
    for name in first.free:
        f = KForm(cf, 1)
        for cname in cf.names:
            val = sol.assignment.get(dt_unknown(name, cname))
            if val:
                f = f + KForm(cf, 1, {(cf.index[cname],): val})
        rules[name] = f
    # algebraic conditions survive on the full bundle for some families
    # (they cut the locus where the gauged reductions live); deduplicated
    conditions = []
    for c in sol.conditions:
        if c and all(c != d and c != -d for d in conditions):
            conditions.append(c)
    return rules, conditions


# ---------------------------------------------------------------------------
# gauge reduction
# ---------------------------------------------------------------------------

class GaugeReduction:
    def __init__(self, forced_zero_forms, forced_bindings, constant_symbols,
                 reduced_table, notes):
        self.forced_zero_forms = forced_zero_forms
        self.forced_bindings = forced_bindings
        self.constant_symbols = constant_symbols
        self.reduced = reduced_table
        self.notes = notes


def _poly_to_linexpr(p: Poly, unknowns, table) -> LinExpr:
    lin: dict = {}
    const = Poly(table)
    idx = {table.index[u]: u for u in unknowns if u in table.index}
    for mono, c in p.terms.items():
        hit = [(v, e) for v, e in mono if v in idx]
        if not hit:
            const = const + Poly(table, {mono: c})
            continue
        if len(hit) > 1 or hit[0][1] > 1:
            raise LinAlgError("binding equation not linear in the free function")
        v, _ = hit[0]
        rest = tuple((w, e) for w, e in mono if w != v)
        name = idx[v]
        lin[name] = lin.get(name, Poly(table)) + Poly(table, {rest: c})
    return LinExpr(table, lin, const)


def gauge_reduce_v02(first: BianchiResult, nonzero: str = "t1") -> GaugeReduction:
    """t2 = t3 = 0 with t1 != 0: forces g2 = g3 = 0, then k = t1^2 (in the
    derived sign convention), then dt1 = 0, landing on the 13-dim system."""
    table = first.table
    cf = first.structure.coframe
    gauge = {"t2": Poly.const(table, 0), "t3": Poly.const(table, 0)}
    notes = []
    # killed symbols force their solved d-rules to vanish
    forced_zero = []
    for sym in ("t2", "t3"):
        rule = first.dt_rules[sym].map_coefficients(lambda c: c.substitute(gauge))
        for (i,), c in rule.coeffs.items():
            if not c:
                continue
            # c is a multiple of the nonvanishing torsion component
            quotient = _divide_by_symbol(c, nonzero, table)
            if quotient is None:
                raise LinAlgError(f"cannot force {cf.names[i]} to zero: d{sym} has "
                                  f"coefficient {c} not proportional to {nonzero}")
            forced_zero.append(cf.names[i])
            notes.append(f"d{sym} = 0 and {nonzero} != 0 force {cf.names[i]} = 0")
    forced_zero = sorted(set(forced_zero))
    # the structure equations of killed gammas force curvature bindings
    bindings = {}
    free_fn = [n for n in first.free]
    for g in forced_zero:
        a, b = GAMMA_STRUCTURE[g]
        resid = first.curvature[g].map_coefficients(lambda c: c.substitute(gauge))
        # -gamma_a ^ gamma_b dies iff either factor is forced to zero
        if a not in forced_zero and b not in forced_zero:
            raise LinAlgError(f"gauge leaves gamma^gamma term in d{g}")
        eqs = []
        for t, c in resid.coeffs.items():
            eqs.append(_poly_to_linexpr(c, free_fn, table))
        sol = solve_linear_exprs([e for e in eqs if e], table)
        for name, val in sol.assignment.items():
            if name in bindings and bindings[name] != val:
                raise LinAlgError(f"conflicting bindings for {name}")
            bindings[name] = val
            notes.append(f"kappa^{g} = 0 forces {name} = {val}")
        for c in sol.conditions:
            if c:
                raise LinAlgError(f"gauge contradiction: {c} = 0 required")
    # constancy of the surviving torsion component
    subs_all = dict(gauge)
    subs_all.update({k: v for k, v in bindings.items()})
    const_syms = []
    for sym in ("t1",):
        rule = first.dt_rules[sym].map_coefficients(lambda c: c.substitute(subs_all))
        rule = KForm(cf, 1, {t: c for t, c in rule.coeffs.items()
                             if cf.names[t[0]] not in forced_zero and c})
        if not rule:
            const_syms.append(sym)
            notes.append(f"d{sym} = 0 on the reduced manifold: {sym} is constant")
    # build the reduced structure table
    curvature = {}
    for g in GAMMA_NAMES:
        curvature[g] = first.curvature[g].map_coefficients(lambda c: c.substitute(subs_all))
    dt_rules = {s: first.dt_rules[s].map_coefficients(lambda c: c.substitute(subs_all))
                for s in first.dt_rules}
    st, _, _ = bundle_table(first.family, table=table, curvature=curvature,
                            dt_rules=dt_rules)
    st = st.substitute_symbols(gauge)
    for s in const_syms:
        st.symbol_rules[s] = KForm(st.coframe, 1)
    reduced = st.drop_forms(forced_zero)
    return GaugeReduction(forced_zero, bindings, const_syms, reduced, notes)


def _divide_by_symbol(p: Poly, sym: str, table):
    """p / sym if every monomial carries the symbol, else None."""
    v = table.index[sym]
    out = {}
    for mono, c in p.terms.items():
        d = dict(mono)
        if d.get(v, 0) < 1:
            return None
        d[v] -= 1
        if d[v] == 0:
            del d[v]
        out[tuple(sorted(d.items()))] = c
    return Poly(table, out)


# ---------------------------------------------------------------------------
# flat-plus reduction (gamma^A == 0, kappa^A == 0) on 12 dimensions
# ---------------------------------------------------------------------------

def flat_plus_system(family: str):
    """The reduced EDS with so(3)_L connection gauged away.

    Returns the constraint polynomials (the solvability conditions of
    d^2 theta == 0 for the primed curvature) and the solved kappa^{A'}.
    """
    table = SymbolTable()
    params = symbolic_params(table, family)
    names = [f"th{i}" for i in range(1, 10)] + ["g1p", "g2p", "g3p"]
    cf = Coframe(names, horizontal=names[:9])
    tors = torsion_forms(params, cf)
    d_rules = {}
    for i in range(9):
        d_rules[f"th{i + 1}"] = tors[i]
    # primed connection terms
    for a, g in enumerate(("g1p", "g2p", "g3p")):
        gen = GENERATORS[3 + a]
        gi = cf.index[g]
        for i in range(9):
            for j in range(9):
                if gen[i][j]:
                    d_rules[f"th{i + 1}"] = d_rules[f"th{i + 1}"] + KForm.term(
                        cf, (gi, cf.index[f"th{j + 1}"]), Fraction(-gen[i][j]))
    for g, (a, b) in (("g1p", ("g2p", "g3p")), ("g2p", ("g3p", "g1p")),
                      ("g3p", ("g1p", "g2p"))):
        rule = KForm.term(cf, (cf.index[a], cf.index[b]), Fraction(-1))
        for i, j in combinations(range(9), 2):
            rule = rule + KForm.term(cf, (cf.index[f"th{i + 1}"], cf.index[f"th{j + 1}"]),
                                     LinExpr.unknown(table, kappa_unknown(g, i, j)))
        d_rules[g] = rule
    # torsion coefficients are constant on the reduced manifold
    symbol_rules = {s: KForm(cf, 1) for s, v in params.items() if v}
    st = StructureTable(cf, table, d_rules, symbol_rules)
    residuals = [st.d2(n) for n in names[:9]]
    eqs = []
    for r in residuals:
        for t, c in r.coeffs.items():
            if isinstance(c, LinExpr) and c:
                eqs.append(c)
            elif not isinstance(c, LinExpr) and c:
                eqs.append(LinExpr.known(table, c))
    sol = solve_linear_exprs(eqs, table)
    if sol.free:
        raise LinAlgError(f"flat-plus curvature underdetermined: {sol.free}")
    curvature = {}
    for g in ("g1p", "g2p", "g3p"):
        f = KForm(cf, 2)
        for i, j in combinations(range(9), 2):
            val = sol.assignment.get(kappa_unknown(g, i, j), Poly(table))
            if val:
                f = f + KForm(cf, 2, {(cf.index[f"th{i + 1}"], cf.index[f"th{j + 1}"]): val})
        curvature[g] = f
    conditions = [c for c in sol.conditions if c]
    return {"table": table, "coframe": cf, "params": params,
            "conditions": conditions, "curvature": curvature,
            "structure": st, "solution": sol}


# ---------------------------------------------------------------------------
# closure checking and the fully general torsion table
# ---------------------------------------------------------------------------

def verify_closure(st: StructureTable):
    """d^2 == 0 on every basis form; returns the nonzero residuals."""
    bad = {}
    for n in st.coframe.names:
        r = st.d2(n)
        if r:
            bad[n] = r
    return bad


def structure_table_general():
    """(1str) with a fully general 84-parameter torsion, curvature dropped."""
    table = SymbolTable()
    cf = bundle_coframe()
    sym_index = {}
    for n, (i, j, k) in enumerate(TRIPLES):
        name = f"T{i + 1}_{j + 1}_{k + 1}"
        table.add(name)
        sym_index[table.index[name]] = n
    conn = gamma_wedge_terms(cf, table)
    d_rules = {}
    for i in range(9):
        rule = conn[i]
        for j, k in combinations(range(9), 2):
            srt = tuple(sorted((i, j, k)))
            if len(set(srt)) != 3:
                continue
            from .torsion import _sign3
            sgn = _sign3(i, j, k)
            name = f"T{srt[0] + 1}_{srt[1] + 1}_{srt[2] + 1}"
            coeff = Poly.variable(table, name) * sgn
            rule = rule + KForm(cf, 2, {(cf.index[f"th{j + 1}"], cf.index[f"th{k + 1}"]): coeff})
        d_rules[f"th{i + 1}"] = rule
    for g, (a, b) in GAMMA_STRUCTURE.items():
        d_rules[g] = KForm.term(cf, (cf.index[a], cf.index[b]), Fraction(-1))
    symbol_rules = {table.names[v]: KForm(cf, 1) for v in sym_index}
    return StructureTable(cf, table, d_rules, symbol_rules), table, sym_index
