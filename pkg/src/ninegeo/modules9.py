"""Isotypic decomposition of tensor spaces by structural operators.

Four invariant operators cut the tensor spaces into the named modules:
omega_hat on 2-tensors, the Casimir C on 2-tensors, its 3-tensor extension
C-tilde on 3-forms, and omega-tilde on 3-forms.  Spectra are taken as
candidates from the statements and proved complete by the dimension-sum
check; eigenspaces are exact kernels.

Basis bookkeeping: 2-tensors are length-81 vectors (index 9i+j); 3-forms
are length-84 vectors over sorted triples i<j<k.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations

from .forms import KForm, theta_coframe
from .linalg import kernel, mat_mul, rank, span_equal, span_intersection
from .rep9 import GENERATORS
from .tensors import Tensor, omega_tensor, _perm_sign

TRIPLES = list(combinations(range(9), 3))
TRIPLE_INDEX = {t: n for n, t in enumerate(TRIPLES)}


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------

def omega_hat_matrix():
    """omega(t)_{kl} = omega^{ij}_{kl} t_{ij} on the 81-dim 2-tensors."""
    om = omega_tensor()
    out = [[Fraction(0)] * 81 for _ in range(81)]
    for idx, v in om.items_canonical():
        for perm in permutations(range(4)):
            sgn = _perm_sign(perm)
            i, j, k, l = (idx[p] for p in perm)
            out[9 * k + l][9 * i + j] += sgn * v
    return out


def casimir_matrix():
    """C(t)_{kl} = -sum_mu (e_mu)_{ik} (e_mu)_{jl} t_{ij}.

    The Killing form of so(3)_L + so(3)_R in the generator basis is
    -2*delta, so the inverse-Killing contraction contributes the -1."""
    out = [[Fraction(0)] * 81 for _ in range(81)]
    for g in GENERATORS:
        for i in range(9):
            for k in range(9):
                gik = g[i][k]
                if not gik:
                    continue
                for j in range(9):
                    for l in range(9):
                        gjl = g[j][l]
                        if gjl:
                            out[9 * k + l][9 * i + j] -= gik * gjl
    return out


def left_casimir_matrix():
    out = [[Fraction(0)] * 81 for _ in range(81)]
    for g in GENERATORS[:3]:
        for i in range(9):
            for k in range(9):
                gik = g[i][k]
                if not gik:
                    continue
                for j in range(9):
                    for l in range(9):
                        gjl = g[j][l]
                        if gjl:
                            out[9 * k + l][9 * i + j] -= gik * gjl
    return out


def _lam3_get(vec, i, j, k):
    srt, sgn = _sort3(i, j, k)
    if sgn == 0:
        return Fraction(0)
    v = vec[TRIPLE_INDEX[srt]]
    return v if sgn == 1 else -v


def _sort3(i, j, k):
    if i == j or j == k or i == k:
        return (i, j, k), 0
    sgn = 1
    a, b, c = i, j, k
    if a > b:
        a, b, sgn = b, a, -sgn
    if b > c:
        b, c, sgn = c, b, -sgn
    if a > b:
        a, b, sgn = b, a, -sgn
    return (a, b, c), sgn


def _basis3_components(triple):
    """All six nonzero components t_{xyz} of the basis 3-form on `triple`."""
    out = {}
    for perm in permutations(triple):
        _, sgn = _sort3(*perm)
        out[perm] = Fraction(sgn)
    return out


def _extract_alternating(full: dict, col: int, out):
    """Verify a {(p,q,r): value} image is alternating; fill matrix column."""
    for (p, q, r), v in full.items():
        if not v:
            continue
        srt, sgn = _sort3(p, q, r)
        if sgn == 0:
            raise ValueError("image has a repeated-index component")
        canon = full.get(srt, Fraction(0))
        if v != sgn * canon:
            raise ValueError("image is not totally antisymmetric")
        out[TRIPLE_INDEX[srt]][col] = canon


def casimir3_matrix():
    """C~(t)_{pqr} = C^{ij}_{pq} t_{ijr} + C^{ik}_{pr} t_{iqk} + C^{jk}_{qr} t_{pjk},
    evaluated literally on each basis 3-form; the image is verified to be
    totally antisymmetric before being read back into Lambda^3."""
    cas = casimir_matrix()
    out = [[Fraction(0)] * 84 for _ in range(84)]
    for col, triple in enumerate(TRIPLES):
        comps = _basis3_components(triple)
        full: dict = {}
        for (x, y, z), tv in comps.items():
            # term 1: (i,j) = (x,y), r = z; free (p,q)
            for p in range(9):
                for q in range(9):
                    c = cas[9 * p + q][9 * x + y]
                    if c:
                        key = (p, q, z)
                        full[key] = full.get(key, Fraction(0)) + c * tv
            # term 2: (i,k) = (x,z), q = y; free (p,r)
            for p in range(9):
                for r in range(9):
                    c = cas[9 * p + r][9 * x + z]
                    if c:
                        key = (p, y, r)
                        full[key] = full.get(key, Fraction(0)) + c * tv
            # term 3: (j,k) = (y,z), p = x; free (q,r)
            for q in range(9):
                for r in range(9):
                    c = cas[9 * q + r][9 * y + z]
                    if c:
                        key = (x, q, r)
                        full[key] = full.get(key, Fraction(0)) + c * tv
        _extract_alternating(full, col, out)
    return out


def omega_tilde_matrix():
    """omega~(t)_{ijk} = 3 omega^{lm}_{[ij} t_{k]lm} on 3-forms."""
    om = omega_tensor()
    out = [[Fraction(0)] * 84 for _ in range(84)]
    half = Fraction(1, 2)  # 3 / 3!
    for col, triple in enumerate(TRIPLES):
        comps = _basis3_components(triple)
        others = {z: [w for w in triple if w != z] for z in triple}

        def g_eval(x, y, z):
            # sum_{l,m} omega_{lm x y} t_{z l m}
            if z not in triple:
                return Fraction(0)
            u, v = others[z]
            tot = Fraction(0)
            for l, m in ((u, v), (v, u)):
                ov = om.get((l, m, x, y))
                if ov:
                    tot += ov * comps[(z, l, m)]
            return tot

        for rown, (i, j, k) in enumerate(TRIPLES):
            tot = Fraction(0)
            for perm in permutations((i, j, k)):
                _, sgn = _sort3(*perm)
                tot += sgn * g_eval(*perm)
            v = half * tot
            if v:
                out[rown][col] = v
    return out


# ---------------------------------------------------------------------------
# module spaces
# ---------------------------------------------------------------------------

@dataclass
class ModuleSpace:
    name: str
    ambient: str              # "T2", "Lam2", "Lam3"
    signature: str            # defining eigen-equations, human readable
    basis: list = field(repr=False, default_factory=list)

    @property
    def dim(self):
        return len(self.basis)

    def __repr__(self):
        return f"{self.name}[{self.ambient}, {self.signature}, dim {self.dim}]"


def eigenspace(op, lam, dim_n):
    rows = []
    for i in range(dim_n):
        row = dict()
        for j, v in enumerate(op[i]):
            if v:
                row[j] = v
        if i < dim_n:
            row[i] = row.get(i, Fraction(0)) - Fraction(lam)
            if not row[i]:
                del row[i]
        if row:
            rows.append(row)
    return kernel(rows, dim_n)


OMEGA_HAT_SPECTRUM = {  # on 2-tensors; 0 holds the symmetric part
    -4: "V[0,2]", 4: "V[2,0]", 2: "V[2,4]", -2: "V[4,2]", 0: "Sym2"}
CASIMIR_SPECTRUM = {
    -4: "V[0,0]", -2: "V[2,2]", 2: "V[4,4]", -3: "W6", 0: "W30", -1: "W10"}
CASIMIR3_SPECTRUM = {-5: "Z6", -4: "Z9", -2: "Z30", 0: "Z39"}
OMEGA_TILDE_SPECTRUM = {-6: "V[0,6]", 6: "V[6,0]", 4: "Z18", -4: "Z18p", 0: "Z34"}

_OPERATORS = {}


def operator(name: str):
    if name not in _OPERATORS:
        builders = {"omega_hat": omega_hat_matrix, "C": casimir_matrix,
                    "C3": casimir3_matrix, "omega_tilde": omega_tilde_matrix,
                    "C_left": left_casimir_matrix}
        _OPERATORS[name] = builders[name]()
    return _OPERATORS[name]


def eigenspaces(op_name: str):
    """All ModuleSpaces of one operator; dimension sums prove completeness."""
    spectra = {"omega_hat": (OMEGA_HAT_SPECTRUM, 81, "T2"),
               "C": (CASIMIR_SPECTRUM, 81, "T2"),
               "C3": (CASIMIR3_SPECTRUM, 84, "Lam3"),
               "omega_tilde": (OMEGA_TILDE_SPECTRUM, 84, "Lam3")}
    spec, n, ambient = spectra[op_name]
    op = operator(op_name)
    spaces = []
    total = 0
    for lam, name in spec.items():
        basis = eigenspace(op, lam, n)
        spaces.append(ModuleSpace(name, ambient, f"{op_name}={lam}", basis))
        total += len(basis)
    if total != n:
        raise ValueError(f"{op_name}: eigenspace dims sum to {total}, ambient {n}")
    return spaces


def module(op_name: str, name: str) -> ModuleSpace:
    for s in eigenspaces(op_name):
        if s.name == name:
            return s
    raise KeyError(name)


def intersect_modules(a: ModuleSpace, b: ModuleSpace) -> ModuleSpace:
    if a.ambient != b.ambient:
        raise ValueError("modules live in different ambient spaces")
    n = 81 if a.ambient == "T2" else 84
    basis = span_intersection(a.basis, b.basis, n)
    return ModuleSpace(f"{a.name}&{b.name}", a.ambient,
                       f"{a.signature} & {b.signature}", basis)


def split_w10():
    """W10 = V[4,0] + V[0,4] by the left-only Casimir."""
    w10 = module("C", "W10")
    cl = operator("C_left")
    pieces = {}
    for lam in set(_eigenvalues_on(cl, w10.basis)):
        rows = []
        sub = _restrict(cl, w10.basis, 81)
        for i, row in enumerate(sub):
            d = {j: v for j, v in enumerate(row) if v}
            d[i] = d.get(i, Fraction(0)) - lam
            if not d[i]:
                del d[i]
            if d:
                rows.append(d)
        combo = kernel(rows, len(w10.basis))
        vecs = []
        for c in combo:
            v = [Fraction(0)] * 81
            for a, coeff in enumerate(c):
                if coeff:
                    for idx in range(81):
                        v[idx] += coeff * w10.basis[a][idx]
            vecs.append(v)
        pieces[lam] = vecs
    return pieces


def _restrict(op, basis, n):
    """Matrix of op on span(basis), exact (basis assumed invariant)."""
    from .linalg import solve
    cols = len(basis)
    bt_rows = [[basis[a][i] for a in range(cols)] for i in range(n)]
    out = [[None] * cols for _ in range(cols)]
    for a in range(cols):
        img = [sum(op[i][j] * basis[a][j] for j in range(n) if op[i][j]) for i in range(n)]
        coeffs = solve(bt_rows, img, cols)
        for b in range(cols):
            out[b][a] = coeffs[b]
    return out


def _eigenvalues_on(op, basis):
    """Eigenvalues of op restricted to basis vectors (must be eigenvectors
    or at least split by the restriction); used on W10 where the left
    Casimir acts semisimply with two rational eigenvalues."""
    sub = _restrict(op, basis, 81)
    # the restriction is semisimple with small rational spectrum; probe
    cands = [Fraction(x, 2) for x in range(-20, 21)]
    found = []
    for lam in cands:
        rows = []
        for i, row in enumerate(sub):
            d = {j: v for j, v in enumerate(row) if v}
            d[i] = d.get(i, Fraction(0)) - lam
            if not d[i]:
                del d[i]
            if d:
                rows.append(d)
        if len(kernel(rows, len(basis))) > 0:
            found.append(lam)
    return found


# ---------------------------------------------------------------------------
# the explicit 2-form bases (kappa0, lambda0, lambda0')
# ---------------------------------------------------------------------------

def _two_form(pairs):
    """Sum of +-theta^a ^ theta^b from (a, b, sign) 1-based pairs."""
    cf = theta_coframe()
    f = KForm(cf, 2)
    for a, b, s in pairs:
        f = f + KForm.term(cf, (a - 1, b - 1), Fraction(s))
    return f


KAPPA0 = {
    "k1": _two_form([(1, 4, -1), (2, 5, -1), (3, 6, -1)]),
    "k2": _two_form([(1, 7, -1), (2, 8, -1), (3, 9, -1)]),
    "k3": _two_form([(4, 7, -1), (5, 8, -1), (6, 9, -1)]),
    "k1p": _two_form([(1, 2, -1), (4, 5, -1), (7, 8, -1)]),
    "k2p": _two_form([(1, 3, -1), (4, 6, -1), (7, 9, -1)]),
    "k3p": _two_form([(2, 3, -1), (5, 6, -1), (8, 9, -1)]),
}

LAMBDA0 = {
    1: _two_form([(1, 4, 1), (3, 6, -1)]),
    2: _two_form([(1, 5, 1), (2, 4, 1)]),
    3: _two_form([(1, 6, 1), (3, 4, 1)]),
    4: _two_form([(1, 7, 1), (3, 9, -1)]),
    5: _two_form([(1, 8, 1), (2, 7, 1)]),
    6: _two_form([(1, 9, 1), (3, 7, 1)]),
    7: _two_form([(2, 5, 1), (3, 6, -1)]),
    8: _two_form([(2, 6, 1), (3, 5, 1)]),
    9: _two_form([(2, 8, 1), (3, 9, -1)]),
    10: _two_form([(2, 9, 1), (3, 8, 1)]),
    11: _two_form([(4, 7, 1), (6, 9, -1)]),
    12: _two_form([(4, 8, 1), (5, 7, 1)]),
    13: _two_form([(4, 9, 1), (6, 7, 1)]),
    14: _two_form([(5, 8, 1), (6, 9, -1)]),
    15: _two_form([(5, 9, 1), (6, 8, 1)]),
}

LAMBDA0P = {
    1: _two_form([(1, 2, 1), (7, 8, -1)]),
    2: _two_form([(1, 3, 1), (7, 9, -1)]),
    3: _two_form([(2, 3, 1), (8, 9, -1)]),
    4: _two_form([(1, 5, 1), (2, 4, -1)]),
    5: _two_form([(1, 6, 1), (3, 4, -1)]),
    6: _two_form([(2, 6, 1), (3, 5, -1)]),
    7: _two_form([(1, 8, 1), (2, 7, -1)]),
    8: _two_form([(1, 9, 1), (3, 7, -1)]),
    9: _two_form([(2, 9, 1), (3, 8, -1)]),
    10: _two_form([(4, 5, 1), (7, 8, -1)]),
    11: _two_form([(4, 6, 1), (7, 9, -1)]),
    12: _two_form([(5, 6, 1), (8, 9, -1)]),
    13: _two_form([(4, 8, 1), (5, 7, -1)]),
    14: _two_form([(4, 9, 1), (6, 7, -1)]),
    15: _two_form([(5, 9, 1), (6, 8, -1)]),
}


def two_form_to_vec(f: KForm):
    """2-form -> antisymmetric 81-vector (t_ij = coeff, t_ji = -coeff)."""
    v = [Fraction(0)] * 81
    cf = f.coframe
    hpos = {idx: n for n, idx in enumerate(cf.horizontal)}
    for (a, b), c in f.coeffs.items():
        i, j = hpos[a], hpos[b]
        v[9 * i + j] = Fraction(c)
        v[9 * j + i] = -Fraction(c)
    return v


def three_form_to_vec(f: KForm):
    v = [Fraction(0)] * 84
    cf = f.coframe
    hpos = {idx: n for n, idx in enumerate(cf.horizontal)}
    for t, c in f.coeffs.items():
        v[TRIPLE_INDEX[tuple(sorted(hpos[i] for i in t))]] = Fraction(c)
    return v


def module_basis(which: str):
    if which == "kappa0":
        return [KAPPA0[k] for k in ("k1", "k2", "k3")] + \
               [KAPPA0[k] for k in ("k1p", "k2p", "k3p")]
    if which == "lambda0":
        return [LAMBDA0[i] for i in range(1, 16)]
    if which == "lambda0p":
        return [LAMBDA0P[i] for i in range(1, 16)]
    raise ValueError(which)


def apply_op(op, vec):
    return [sum(op[i][j] * vec[j] for j in range(len(vec)) if op[i][j])
            for i in range(len(op))]


def projectors(op_name: str):
    """Lagrange projectors onto the verified spectrum."""
    spectra = {"omega_hat": OMEGA_HAT_SPECTRUM, "C": CASIMIR_SPECTRUM,
               "C3": CASIMIR3_SPECTRUM, "omega_tilde": OMEGA_TILDE_SPECTRUM}
    spec = spectra[op_name]
    op = operator(op_name)
    n = len(op)
    ident = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    out = {}
    for lam in spec:
        p = ident
        scale = Fraction(1)
        for mu in spec:
            if mu == lam:
                continue
            shifted = [[op[i][j] - (mu if i == j else 0) for j in range(n)]
                       for i in range(n)]
            p = mat_mul(p, shifted)
            scale *= Fraction(lam - mu)
        out[spec[lam]] = [[x / scale for x in row] for row in p]
    return out
