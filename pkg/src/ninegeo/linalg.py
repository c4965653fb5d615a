"""Exact linear algebra over the scalar rings.

Matrices are plain lists of rows; a Field adapter supplies the division
the eliminations need, so the same code runs over Q, Q(i,sqrt2), rational
functions, or floats (floats only where radical solution families force a
numeric sample).  Kernel bases are verified to be exactly annihilated.
"""

from __future__ import annotations

from fractions import Fraction

from .poly import LinExpr, Poly, RatFunc, SymbolTable
from .scalars import ExactScalar


class Field:
    zero = Fraction(0)
    one = Fraction(1)

    def is_zero(self, x) -> bool:
        return not x

    def div(self, a, b):
        return a / b

    def coerce(self, x):
        return x


class QQ(Field):
    def coerce(self, x):
        return x if isinstance(x, Fraction) else Fraction(x)


class ES(Field):
    zero = ExactScalar(0)
    one = ExactScalar(1)

    def coerce(self, x):
        return ExactScalar.coerce(x)


class RF(Field):
    def __init__(self, table: SymbolTable):
        self.table = table
        self.zero = RatFunc(Poly(table), reduce=False)
        self.one = RatFunc(Poly.const(table, 1), reduce=False)

    def coerce(self, x):
        return RatFunc.of(x, self.table)


class FL(Field):
    zero = 0.0
    one = 1.0

    def __init__(self, tol: float = 1e-12):
        self.tol = tol

    def is_zero(self, x) -> bool:
        return abs(x) <= self.tol

    def coerce(self, x):
        return float(x)


QQ_FIELD = QQ()
ES_FIELD = ES()


class LinAlgError(Exception):
    pass


# ---------------------------------------------------------------------------
# elimination
# ---------------------------------------------------------------------------

def rref(rows, ncols: int, field: Field = QQ_FIELD):
    """Reduced row echelon form on sparse row-dicts.

    Accepts rows as lists or dicts; returns (reduced row dicts, pivot cols).
    Pivots are taken in column order, first-come among rows (deterministic).
    """
    work = []
    for r in rows:
        if isinstance(r, dict):
            d = {c: field.coerce(v) for c, v in r.items() if not field.is_zero(field.coerce(v))}
        else:
            d = {c: field.coerce(v) for c, v in enumerate(r) if not field.is_zero(field.coerce(v))}
        if d:
            work.append(d)
    reduced = []
    pivots = []
    for col in range(ncols):
        hit = None
        best = None
        for i, r in enumerate(work):
            if col in r:
                k = (len(r), i)
                if best is None or k < best:
                    best = k
                    hit = i
        if hit is None:
            continue
        prow = work.pop(hit)
        inv = field.div(field.one, prow[col])
        prow = {c: v * inv for c, v in prow.items()}
        for r in reduced:
            if col in r:
                f = r.pop(col)
                for c, v in prow.items():
                    if c == col:
                        continue
                    s = r.get(c, field.zero) + (-f) * v
                    if field.is_zero(s):
                        r.pop(c, None)
                    else:
                        r[c] = s
        for r in work:
            if col in r:
                f = r.pop(col)
                for c, v in prow.items():
                    if c == col:
                        continue
                    s = r.get(c, field.zero) + (-f) * v
                    if field.is_zero(s):
                        r.pop(c, None)
                    else:
                        r[c] = s
        work = [r for r in work if r]
        reduced.append(prow)
        pivots.append(col)
        if not work:
            break
    order = sorted(range(len(pivots)), key=lambda i: pivots[i])
    return [reduced[i] for i in order], sorted(pivots)


def rank(rows, ncols: int, field: Field = QQ_FIELD) -> int:
    _, pivots = rref(rows, ncols, field)
    return len(pivots)


def kernel(rows, ncols: int, field: Field = QQ_FIELD, verify: bool = True):
    """Basis of the right kernel; rank + nullity = ncols by construction."""
    red, pivots = rref(rows, ncols, field)
    pivot_set = set(pivots)
    by_pivot = {pivots[i]: red[i] for i in range(len(pivots))}
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        v = [field.zero] * ncols
        v[free] = field.one
        for p in pivots:
            c = by_pivot[p].get(free)
            if c is not None and not field.is_zero(c):
                v[p] = -c
        basis.append(v)
    if verify:
        for v in basis:
            for r in rows:
                items = r.items() if isinstance(r, dict) else enumerate(r)
                s = field.zero
                for c, a in items:
                    av = field.coerce(a)
                    if not field.is_zero(av):
                        s = s + av * v[c]
                if not field.is_zero(s):
                    raise LinAlgError("kernel vector not annihilated")
    return basis


def solve(rows, rhs, ncols: int, field: Field = QQ_FIELD):
    """One solution of A x = rhs (free variables set to 0), or raise."""
    aug = []
    for r, b in zip(rows, rhs):
        d = dict(r) if isinstance(r, dict) else {c: v for c, v in enumerate(r)}
        d = {c: field.coerce(v) for c, v in d.items() if not field.is_zero(field.coerce(v))}
        b = field.coerce(b)
        if not field.is_zero(b):
            d[ncols] = -b
        if d:
            aug.append(d)
    # rows encode A x - b = 0 on the extended vector (x, 1)
    red, pivots = rref(aug, ncols + 1, field)
    if ncols in pivots:
        raise LinAlgError("inconsistent linear system")
    x = [field.zero] * ncols
    for i, p in enumerate(pivots):
        v = red[i].get(ncols, field.zero)
        x[p] = -v if not field.is_zero(v) else field.zero
    return x


def mat_vec(rows, v, field: Field = QQ_FIELD):
    out = []
    for r in rows:
        items = r.items() if isinstance(r, dict) else enumerate(r)
        s = field.zero
        for c, a in items:
            s = s + field.coerce(a) * v[c]
        out.append(s)
    return out


def mat_mul(a, b):
    n, m, p = len(a), len(b), len(b[0])
    out = [[Fraction(0)] * p for _ in range(n)]
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for k in range(m):
            x = ai[k]
            if not x:
                continue
            bk = b[k]
            for j in range(p):
                if bk[j]:
                    oi[j] += x * bk[j]
    return out


def mat_inverse(a, field: Field = QQ_FIELD):
    n = len(a)
    aug = []
    for i, row in enumerate(a):
        d = {j: field.coerce(v) for j, v in enumerate(row) if not field.is_zero(field.coerce(v))}
        d[n + i] = field.one
        aug.append(d)
    red, pivots = rref(aug, 2 * n, field)
    if pivots[:n] != list(range(n)):
        raise LinAlgError("singular matrix")
    inv = [[field.zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            inv[i][j] = red[i].get(n + j, field.zero)
    return inv


def transpose(a):
    return [list(col) for col in zip(*a)]


# ---------------------------------------------------------------------------
# span arithmetic
# ---------------------------------------------------------------------------

def in_span(vec, basis, ncols: int, field: Field = QQ_FIELD) -> bool:
    r0 = rank(basis, ncols, field)
    return rank(list(basis) + [vec], ncols, field) == r0


def span_equal(b1, b2, ncols: int, field: Field = QQ_FIELD) -> bool:
    r1 = rank(b1, ncols, field)
    r2 = rank(b2, ncols, field)
    if r1 != r2:
        return False
    return rank(list(b1) + list(b2), ncols, field) == r1


def span_intersection(b1, b2, ncols: int, field: Field = QQ_FIELD):
    """Basis of span(b1) & span(b2) via the kernel of [B1^T | -B2^T]."""
    n1, n2 = len(b1), len(b2)
    rows = []
    for c in range(ncols):
        d = {}
        for j in range(n1):
            v = b1[j][c] if not isinstance(b1[j], dict) else b1[j].get(c, 0)
            if not field.is_zero(field.coerce(v)):
                d[j] = field.coerce(v)
        for j in range(n2):
            v = b2[j][c] if not isinstance(b2[j], dict) else b2[j].get(c, 0)
            if not field.is_zero(field.coerce(v)):
                d[n1 + j] = -field.coerce(v)
        if d:
            rows.append(d)
    combos = kernel(rows, n1 + n2, field)
    out = []
    for w in combos:
        vec = [field.zero] * ncols
        for j in range(n1):
            if not field.is_zero(w[j]):
                for c in range(ncols):
                    v = b1[j][c] if not isinstance(b1[j], dict) else b1[j].get(c, 0)
                    vec[c] = vec[c] + w[j] * field.coerce(v)
        out.append(vec)
    red, pivots = rref(out, ncols, field)
    basis = []
    for r in red:
        vec = [field.zero] * ncols
        for c, v in r.items():
            vec[c] = v
        basis.append(vec)
    return basis


# ---------------------------------------------------------------------------
# inertia of symmetric matrices (Sylvester, by congruence reduction)
# ---------------------------------------------------------------------------

def inertia(m) -> tuple:
    n = len(m)
    a = [[Fraction(x) if not isinstance(x, Fraction) else x for x in row] for row in m]
    for i in range(n):
        for j in range(n):
            if a[i][j] != a[j][i]:
                raise LinAlgError("inertia of a non-symmetric matrix")
    pos = neg = zero = 0
    live = list(range(n))
    while live:
        # prefer a nonzero diagonal entry
        p = next((i for i in live if a[i][i] != 0), None)
        if p is None:
            pair = None
            for i in live:
                for j in live:
                    if i < j and a[i][j] != 0:
                        pair = (i, j)
                        break
                if pair:
                    break
            if pair is None:
                zero += len(live)
                break
            i, j = pair
            # symmetric row/col addition makes the diagonal entry 2*a[i][j]
            for k in range(n):
                a[i][k] += a[j][k]
            for k in range(n):
                a[k][i] += a[k][j]
            p = i
        d = a[p][p]
        if d > 0:
            pos += 1
        else:
            neg += 1
        live.remove(p)
        for i in live:
            f = a[i][p] / d
            if f:
                for k in range(n):
                    a[i][k] -= f * a[p][k]
                for k in range(n):
                    a[k][i] -= f * a[k][p]
    return pos, neg, zero


# ---------------------------------------------------------------------------
# staged elimination for systems linear in named unknowns
# ---------------------------------------------------------------------------

class StagedSolution:
    def __init__(self, assignment, free, conditions, condition_rows):
        self.assignment = assignment          # name -> Poly (may use free symbols)
        self.free = free                      # names left undetermined
        self.conditions = conditions          # Poly constraints on base symbols
        self.condition_rows = condition_rows  # originating equation indices

    def __repr__(self):
        return (f"StagedSolution(solved={len(self.assignment)}, free={self.free}, "
                f"conditions={len(self.conditions)})")


def solve_linear_exprs(equations, table: SymbolTable) -> StagedSolution:
    """Solve LinExpr == 0 equations for their unknowns.

    Nonlinearity is impossible by construction (LinExpr refuses products of
    unknowns).  Unknown coefficients must be constant rationals -- which is
    what the structure-equation eliminations produce -- so the elimination
    runs over Q with the symbolic part carried along as a Poly right-hand
    side.  Leftover unknown-free equations come back as conditions on the
    base symbols; free unknowns are reported by name and appear as fresh
    symbols inside the solved assignments.
    """
    live = [(i, e) for i, e in enumerate(equations) if e]
    names = sorted({k for _, e in live for k in e.lin})
    col = {n: i for i, n in enumerate(names)}
    rows = []
    for idx, e in live:
        d = {}
        for k, v in e.lin.items():
            if not v.is_constant():
                raise LinAlgError(f"non-constant coefficient at unknown {k!r} (eq {idx})")
            c = v.constant_value()
            if c:
                d[col[k]] = Fraction(c)
        rows.append((idx, d, e.const))
    # row reduce over Q, combining the Poly constants alongside
    reduced = []   # (pivot_col, row_dict, const_poly)
    for ci in range(len(names)):
        hit = None
        best = None
        for i, (idx, d, c) in enumerate(rows):
            if ci in d:
                k = (len(d), i)
                if best is None or k < best:
                    best, hit = k, i
        if hit is None:
            continue
        idx, d, cpoly = rows.pop(hit)
        inv = Fraction(1) / d[ci]
        d = {c: v * inv for c, v in d.items()}
        cpoly = cpoly * inv
        for group in (reduced, rows):
            for j, item in enumerate(group):
                if group is reduced:
                    pc, rd, rc = item
                else:
                    pc, rd, rc = item[0], item[1], item[2]
                if ci in rd:
                    f = rd.pop(ci)
                    for c, v in d.items():
                        if c == ci:
                            continue
                        s = rd.get(c, Fraction(0)) - f * v
                        if s:
                            rd[c] = s
                        else:
                            rd.pop(c, None)
                    rc = rc - f * cpoly
                    if group is reduced:
                        group[j] = (pc, rd, rc)
                    else:
                        group[j] = (pc, rd, rc)
        reduced.append((ci, d, cpoly))
    conditions, cond_rows = [], []
    for idx, d, c in rows:
        if d:
            raise LinAlgError("elimination left unknown coefficients behind")
        if c:
            conditions.append(c)
            cond_rows.append(idx)
    pivot_cols = {pc for pc, _, _ in reduced}
    free = [names[c] for c in range(len(names)) if c not in pivot_cols]
    for n in free:
        table.add(n)
    assignment = {}
    for pc, d, cpoly in reduced:
        p = -cpoly
        for c, v in d.items():
            if c != pc:
                p = p - v * Poly.variable(table, names[c])
        assignment[names[pc]] = p
    return StagedSolution(assignment, free, conditions, cond_rows)


def substitute_conditions(sol: StagedSolution, equations, table: SymbolTable):
    """Residuals of the original LinExpr equations under a solution."""
    out = []
    for e in equations:
        r = e.substitute_unknowns(sol.assignment)
        if r.lin:
            # free unknowns replaced by their symbols
            extra = Poly(table)
            for k, v in r.lin.items():
                table.add(k)
                extra = extra + v * Poly.variable(table, k)
            out.append(r.const + extra)
        else:
            out.append(r.const)
    return out


def solve_staged(rows, rhs, unknowns, stages, table: SymbolTable) -> StagedSolution:
    """Matrix front-end: rows of coefficients (Poly or rational) over the
    named unknowns, staged by unknown groups; later stages see earlier
    solutions substituted in.  Inconsistent systems raise with the
    offending equation indices."""
    exprs = []
    for r, b in zip(rows, rhs):
        e = LinExpr.known(table, b if isinstance(b, Poly) else Poly.const(table, b))
        items = r.items() if isinstance(r, dict) else enumerate(r)
        for c, v in items:
            coeff = v if isinstance(v, Poly) else Poly.const(table, v)
            if coeff:
                e = e + LinExpr(table, {unknowns[c]: coeff})
        exprs.append(e)
    remaining = exprs
    merged_assignment: dict = {}
    free: list = []
    conditions: list = []
    cond_rows: list = []
    for group in stages:
        group = set(group)
        stage_eqs = [e for e in remaining if set(e.lin) & group or not e.lin]
        rest = [e for e in remaining if set(e.lin) and not (set(e.lin) & group)]
        sol = solve_linear_exprs(stage_eqs, table)
        merged_assignment.update(sol.assignment)
        free.extend(sol.free)
        conditions.extend(sol.conditions)
        cond_rows.extend(sol.condition_rows)
        remaining = [e.substitute_unknowns(sol.assignment) for e in rest]
    for e in remaining:
        if e.lin:
            raise LinAlgError(f"unknowns {sorted(e.lin)} not covered by any stage")
        if e.const:
            conditions.append(e.const)
            cond_rows.append(-1)
    bad = [i for c, i in zip(conditions, cond_rows) if c.is_constant() and c.constant_value() != 0]
    if bad:
        raise LinAlgError(f"inconsistent system, contradictory equations {bad}")
    return StagedSolution(merged_assignment, sorted(set(free)), conditions, cond_rows)
