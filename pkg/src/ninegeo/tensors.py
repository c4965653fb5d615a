"""Structural tensors of the geometry and their stabilizer algebras.

Builds g, Upsilon, omega, *omega and Xi in the adapted coframe, computes
the trace-power forms, and solves the linearized stabilizer systems on the
81 components of a gl(9) matrix.  Index conventions: tensors are stored on
canonical (sorted) index tuples with a symmetry tag; `get` expands by
symmetry.  All indices 0-based internally, 1-based in dumps.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, permutations
from math import factorial

from .forms import Coframe, KForm, theta_coframe
from .linalg import kernel, rank
from .poly import Poly, SymbolTable
from .rep9 import GENERATORS, sigma


def _perm_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        clen = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            clen += 1
        if clen % 2 == 0:
            sign = -sign
    return sign


def _sort_perm(idx):
    order = sorted(range(len(idx)), key=lambda a: idx[a])
    perm_sign = _perm_sign(order)
    return tuple(idx[a] for a in order), perm_sign


class Tensor:
    """Sparse tensor over {0..8}^rank with an optional symmetry tag."""

    def __init__(self, rank: int, data: dict | None = None, sym: str = "none",
                 check: bool = True):
        self.rank = rank
        self.sym = sym
        canon: dict = {}
        for idx, v in (data or {}).items():
            if not v:
                continue
            if sym == "none":
                canon[tuple(idx)] = canon.get(tuple(idx), 0) + v
                continue
            srt, sgn = _sort_perm(tuple(idx))
            if sym == "antisym":
                if len(set(srt)) != len(srt):
                    if check and v:
                        raise ValueError("antisymmetric tensor with repeated index")
                    continue
                v = v if sgn == 1 else -v
            prev = canon.get(srt)
            if prev is None:
                canon[srt] = v
            elif check and prev != v:
                raise ValueError(f"inconsistent symmetric data at {srt}")
        self.data = {k: v for k, v in canon.items() if v}

    def get(self, idx):
        idx = tuple(idx)
        if self.sym == "none":
            return self.data.get(idx, 0)
        srt, sgn = _sort_perm(idx)
        v = self.data.get(srt, 0)
        if not v:
            return 0
        if self.sym == "antisym":
            if len(set(idx)) != len(idx):
                return 0
            return v if sgn == 1 else -v
        return v

    def items_canonical(self):
        return self.data.items()

    def __eq__(self, other):
        if not isinstance(other, Tensor) or other.rank != self.rank:
            return NotImplemented
        idxs = set(self.data) | set(other.data)
        return all(self.get(i) == other.get(i) for i in idxs) if self.sym == other.sym \
            else all(self.get(i) == other.get(i)
                     for i in {i for i in self._full_support() | other._full_support()})

    def _full_support(self):
        out = set()
        for idx in self.data:
            out.update(permutations(idx))
        return out

    def dump(self) -> str:
        lines = []
        for idx in sorted(self.data):
            key = " ".join(str(i + 1) for i in idx)
            lines.append(f"{key} : {self.data[idx]}")
        return "\n".join(lines) if lines else "0"


def tensor_from_sym_poly(poly: Poly, rank: int, weight) -> Tensor:
    """Read a totally symmetric tensor off a displayed polynomial.

    poly = (1/weight) * sum_{i1..ik} T_{i1..ik} x_{i1}..x_{ik}, so the
    coefficient c of a monomial with exponent multiplicities m_a gives
    T = c * weight * prod(m_a!) / k!.
    """
    data = {}
    for mono, c in poly.terms.items():
        idx = []
        mult = 1
        for v, e in mono:
            idx.extend([v] * e)
            mult *= factorial(e)
        if len(idx) != rank:
            raise ValueError("polynomial is not homogeneous of the right degree")
        data[tuple(idx)] = c * weight * Fraction(mult, factorial(rank))
    return Tensor(rank, data, sym="sym")


# ---------------------------------------------------------------------------
# the structural tensors in the adapted coframe (eq-(ty) normalization)
# ---------------------------------------------------------------------------

def metric_tensor() -> Tensor:
    return Tensor(2, {(i, i): Fraction(1) for i in range(9)}, sym="sym")


def upsilon_tensor() -> Tensor:
    """Total symmetrization of det(sigma(a)) = (1/6) Y_{ijk} a^i a^j a^k."""
    data = {}
    for perm in permutations(range(3)):
        sgn = _perm_sign(perm)
        idx = tuple(3 * r + perm[r] for r in range(3))
        data[idx] = Fraction(sgn)
    return Tensor(3, data, sym="sym")


OMEGA_QUADRUPLES = ((1, 2, 4, 5), (1, 2, 7, 8), (1, 3, 4, 6), (1, 3, 7, 9),
                    (2, 3, 5, 6), (2, 3, 8, 9), (4, 5, 7, 8), (4, 6, 7, 9),
                    (5, 6, 8, 9))


def omega_form(coframe: Coframe | None = None) -> KForm:
    cf = coframe or theta_coframe()
    total = KForm(cf, 4)
    for quad in OMEGA_QUADRUPLES:
        total = total + KForm.term(cf, [cf.horizontal[i - 1] for i in quad], Fraction(1))
    return total


def omega_tensor() -> Tensor:
    data = {}
    for quad in OMEGA_QUADRUPLES:
        data[tuple(i - 1 for i in quad)] = Fraction(1)
    return Tensor(4, data, sym="antisym")


def star_omega_form(coframe: Coframe | None = None) -> KForm:
    return omega_form(coframe).hodge_star()


def xi_tensor() -> Tensor:
    """The traceless invariant symmetric 4-tensor from its long display."""
    table = SymbolTable([f"x{i}" for i in range(1, 10)])
    x = [Poly.variable(table, f"x{i}") for i in range(1, 10)]
    p = (2*x[0]**4 + 4*x[0]**2*x[1]**2 + 2*x[1]**4 + 4*x[0]**2*x[2]**2
         + 4*x[1]**2*x[2]**2 + 2*x[2]**4
         + 4*x[0]**2*x[3]**2 - 7*x[1]**2*x[3]**2 - 7*x[2]**2*x[3]**2 + 2*x[3]**4
         + 22*x[0]*x[1]*x[3]*x[4]
         - 7*x[0]**2*x[4]**2 + 4*x[1]**2*x[4]**2 - 7*x[2]**2*x[4]**2
         + 4*x[3]**2*x[4]**2 + 2*x[4]**4
         + 22*x[0]*x[2]*x[3]*x[5] + 22*x[1]*x[2]*x[4]*x[5]
         - 7*x[0]**2*x[5]**2 - 7*x[1]**2*x[5]**2 + 4*x[2]**2*x[5]**2
         + 4*x[3]**2*x[5]**2 + 4*x[4]**2*x[5]**2 + 2*x[5]**4
         + 4*x[0]**2*x[6]**2 - 7*x[1]**2*x[6]**2 - 7*x[2]**2*x[6]**2
         + 4*x[3]**2*x[6]**2 - 7*x[4]**2*x[6]**2 - 7*x[5]**2*x[6]**2 + 2*x[6]**4
         + 22*x[0]*x[1]*x[6]*x[7] + 22*x[3]*x[4]*x[6]*x[7]
         - 7*x[0]**2*x[7]**2 + 4*x[1]**2*x[7]**2 - 7*x[2]**2*x[7]**2
         - 7*x[3]**2*x[7]**2 + 4*x[4]**2*x[7]**2 - 7*x[5]**2*x[7]**2
         + 4*x[6]**2*x[7]**2 + 2*x[7]**4
         + 22*x[0]*x[2]*x[6]*x[8] + 22*x[3]*x[5]*x[6]*x[8]
         + 22*x[1]*x[2]*x[7]*x[8] + 22*x[4]*x[5]*x[7]*x[8]
         - 7*x[0]**2*x[8]**2 - 7*x[1]**2*x[8]**2 + 4*x[2]**2*x[8]**2
         - 7*x[3]**2*x[8]**2 - 7*x[4]**2*x[8]**2 + 4*x[5]**2*x[8]**2
         + 4*x[6]**2*x[8]**2 + 4*x[7]**2*x[8]**2 + 2*x[8]**4)
    return tensor_from_sym_poly(p, 4, weight=24)


def build_structural_tensors():
    return (metric_tensor(), upsilon_tensor(), omega_tensor(),
            star_omega_form(), xi_tensor())


def upsilon_trace() -> list:
    """g^{ij} Y_{ijk} for each k (flat metric: a plain trace)."""
    ups = upsilon_tensor()
    return [sum(ups.get((i, i, k)) for i in range(9)) for k in range(9)]


def xi_trace():
    xi = xi_tensor()
    return [[sum(xi.get((i, i, k, l)) for i in range(9)) for l in range(9)]
            for k in range(9)]


def det_sigma_identity() -> bool:
    """det(sigma(a)) == (1/6) Y_{ijk} a^i a^j a^k as an exact polynomial."""
    table = SymbolTable([f"a{i}" for i in range(1, 10)])
    a = [Poly.variable(table, f"a{i}") for i in range(1, 10)]
    m = sigma(a)
    det = (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
           - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
           + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
    ups = upsilon_tensor()
    poly = Poly(table)
    for idx, v in ups.items_canonical():
        i, j, k = idx
        count = len(set(permutations(idx)))
        poly = poly + Fraction(count, 6) * v * a[i] * a[j] * a[k]
    return det == poly


# ---------------------------------------------------------------------------
# trace-power forms
# ---------------------------------------------------------------------------

def _sigma_theta(cf: Coframe):
    th = [KForm(cf, 1, {(cf.horizontal[i],): Fraction(1)}) for i in range(9)]
    return [[th[3 * r + c] for c in range(3)] for r in range(3)]


def _form_matmul(a, b):
    n, m, p = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(p):
            acc = None
            for k in range(m):
                t = a[i][k].wedge(b[k][j])
                acc = t if acc is None else acc + t
            row.append(acc)
        out.append(row)
    return out


def _form_trace_product(a, b):
    """Tr(a ^ b) for matrices of forms."""
    acc = None
    for i in range(len(a)):
        for k in range(len(b)):
            t = a[i][k].wedge(b[k][i])
            acc = t if acc is None else acc + t
    return acc


def trace_wedge_power(k: int, coframe: Coframe | None = None) -> KForm:
    """Tr((sigma(theta) ^ sigma(theta)^T)^k), a 2k-form."""
    cf = coframe or theta_coframe()
    st = _sigma_theta(cf)
    stt = [[st[j][i] for j in range(3)] for i in range(3)]
    a = _form_matmul(st, stt)
    power = a
    for _ in range(k - 1):
        power = _form_matmul(power, a)
    acc = None
    for i in range(3):
        acc = power[i][i] if acc is None else acc + power[i][i]
    return acc


def upsilon_matrix_form(cf: Coframe | None = None):
    """Y(theta)^i_j = g^{il} Y_{ljk} theta^k (flat metric)."""
    cf = cf or theta_coframe()
    ups = upsilon_tensor()
    out = []
    for i in range(9):
        row = []
        for j in range(9):
            coeffs = {}
            for k in range(9):
                v = ups.get((i, j, k))
                if v:
                    coeffs[(cf.horizontal[k],)] = v
            row.append(KForm(cf, 1, coeffs))
        out.append(row)
    return out


def upsilon_power_trace(k: int, cf: Coframe | None = None) -> KForm:
    cf = cf or theta_coframe()
    a = upsilon_matrix_form(cf)
    if k == 1:
        acc = None
        for i in range(9):
            acc = a[i][i] if acc is None else acc + a[i][i]
        return acc
    a2 = _form_matmul(a, a)
    if k == 2:
        return _form_trace_product(a, a)
    if k == 3:
        return _form_trace_product(a2, a)
    a4 = _form_matmul(a2, a2)
    if k == 4:
        return _form_trace_product(a2, a2)
    if k == 5:
        return _form_trace_product(a4, a)
    if k == 6:
        return _form_trace_product(a4, a2)
    a3 = _form_matmul(a2, a)
    if k == 7:
        return _form_trace_product(a4, a3)
    if k == 8:
        return _form_trace_product(a4, a4)
    if k == 9:
        a5 = _form_matmul(a4, a)
        return _form_trace_product(a4, a5)
    raise ValueError("k must be 1..9")


def proportionality_constant(form: KForm, reference: KForm):
    """c with form = c * reference, or None if not proportional."""
    if not reference.coeffs:
        raise ValueError("zero reference form")
    t0, c0 = next(iter(reference.coeffs.items()))
    c = form.coeffs.get(t0, 0)
    ratio = Fraction(c, 1) / c0 if not isinstance(c, Fraction) else c / c0
    return ratio if form == reference.scaled(ratio) else None


# ---------------------------------------------------------------------------
# stabilizer systems on the 81 components of X
# ---------------------------------------------------------------------------

def metric_invariance_rows():
    """g_{lj} X^l_i + g_{il} X^l_j = 0: X must be antisymmetric."""
    rows = []
    for i in range(9):
        for j in range(i, 9):
            d = {}
            d[9 * j + i] = d.get(9 * j + i, 0) + 1   # X^j_i entry (l=j)
            d[9 * i + j] = d.get(9 * i + j, 0) + 1   # X^i_j entry (l=i)
            rows.append({k: Fraction(v) for k, v in d.items() if v})
    return rows


def upsilon_invariance_rows():
    ups = upsilon_tensor()
    rows = []
    for i in range(9):
        for j in range(i, 9):
            for k in range(j, 9):
                d = {}
                for l in range(9):
                    v1 = ups.get((l, j, k))
                    if v1:
                        d[9 * l + i] = d.get(9 * l + i, 0) + v1
                    v2 = ups.get((i, l, k))
                    if v2:
                        d[9 * l + j] = d.get(9 * l + j, 0) + v2
                    v3 = ups.get((i, j, l))
                    if v3:
                        d[9 * l + k] = d.get(9 * l + k, 0) + v3
                d = {kk: vv for kk, vv in d.items() if vv}
                if d:
                    rows.append(d)
    return rows


def omega_invariance_rows():
    om = omega_tensor()
    rows = []
    for i, j, k, m in combinations(range(9), 4):
        d = {}
        for l in range(9):
            for slot, idx in enumerate(((l, j, k, m), (i, l, k, m),
                                        (i, j, l, m), (i, j, k, l))):
                v = om.get(idx)
                if v:
                    col = 9 * l + (i, j, k, m)[slot]
                    d[col] = d.get(col, 0) + v
        d = {kk: vv for kk, vv in d.items() if vv}
        if d:
            rows.append(d)
    return rows


def stabilizer_algebra(constraints):
    """Kernel + per-system condition counts for a subset of {g, Y, omega}.

    Returns (basis matrices, kernel vectors, rank of the stacked system).
    """
    rows = []
    for c in constraints:
        if c == "g":
            rows.extend(metric_invariance_rows())
        elif c == "Y":
            rows.extend(upsilon_invariance_rows())
        elif c == "omega":
            rows.extend(omega_invariance_rows())
        else:
            raise ValueError(f"unknown constraint {c!r}")
    basis = kernel(rows, 81)
    mats = [[[v[9 * i + j] for j in range(9)] for i in range(9)] for v in basis]
    return mats, basis, rank(rows, 81)


def generator_span_vectors():
    return [[Fraction(g[i][j]) for i in range(9) for j in range(9)]
            for g in GENERATORS]


def invariant_bilinear_forms(algebra):
    """Symmetric g with g_{lj} X^l_i + g_{il} X^l_j = 0 for all X."""
    pairs = [(i, j) for i in range(9) for j in range(i, 9)]
    col = {p: n for n, p in enumerate(pairs)}

    def gcol(i, j):
        return col[(i, j) if i <= j else (j, i)]

    rows = []
    for x in algebra:
        for i in range(9):
            for j in range(i, 9):
                d = {}
                for l in range(9):
                    if x[l][i]:
                        c = gcol(l, j)
                        d[c] = d.get(c, 0) + x[l][i]
                    if x[l][j]:
                        c = gcol(i, l)
                        d[c] = d.get(c, 0) + x[l][j]
                d = {k: Fraction(v) for k, v in d.items() if v}
                if d:
                    rows.append(d)
    vecs = kernel(rows, 45)
    mats = []
    for v in vecs:
        m = [[Fraction(0)] * 9 for _ in range(9)]
        for (i, j), n in col.items():
            m[i][j] = m[j][i] = v[n]
        mats.append(m)
    return mats
