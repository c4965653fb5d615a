"""Torsion families, the nearly-integrability kernel, and the d-omega ranks.

The totally antisymmetric torsion of the characteristic connection is
parametrized in the invariant modules:

  * V[0,2]   by (t1,t2,t3)   -- the explicit nine 2-forms of the so(3)_L
                                family, transcribed term by term;
  * V[0,6]   by (u1..u7)     -- combinations of the primed lambda basis;
  * the sum  by all ten.

Coefficients may be numbers or Poly symbols; eigen-membership checks run
symbolically on the parametrized coefficients, never on samples.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, permutations

from .forms import Coframe, KForm, theta_coframe
from .linalg import kernel, rank, span_equal, span_intersection
from .modules9 import (KAPPA0, LAMBDA0P, TRIPLE_INDEX, TRIPLES, apply_op,
                       module, operator, three_form_to_vec)
from .poly import Poly, SymbolTable
from .rep9 import GENERATORS
from .tensors import Tensor, omega_form, star_omega_form, upsilon_tensor

SYM_PAIRS = list(combinations(range(9), 2))
PAIR_INDEX = {p: n for n, p in enumerate(SYM_PAIRS)}
SYM4 = [(i, j, k, l) for i in range(9) for j in range(i, 9)
        for k in range(j, 9) for l in range(k, 9)]
SYM4_INDEX = {q: n for n, q in enumerate(SYM4)}


# ---------------------------------------------------------------------------
# parametrized torsion forms
# ---------------------------------------------------------------------------

# eq-(potor) transcription: per T^i, the (a, b, symbol, coeff) terms
_POTOR = {
    1: [(2, 3, "t3", -3), (2, 6, "t2", 1), (2, 9, "t1", -1), (3, 5, "t2", -1),
        (3, 8, "t1", 1), (5, 6, "t3", -1), (8, 9, "t3", -1)],
    2: [(1, 3, "t3", 3), (1, 6, "t2", -1), (1, 9, "t1", 1), (3, 4, "t2", 1),
        (3, 7, "t1", -1), (4, 6, "t3", 1), (7, 9, "t3", 1)],
    3: [(1, 2, "t3", -3), (1, 5, "t2", 1), (1, 8, "t1", -1), (2, 4, "t2", -1),
        (2, 7, "t1", 1), (4, 5, "t3", -1), (7, 8, "t3", -1)],
    4: [(2, 3, "t2", 1), (2, 6, "t3", -1), (3, 5, "t3", 1), (5, 6, "t2", 3),
        (5, 9, "t1", -1), (6, 8, "t1", 1), (8, 9, "t2", 1)],
    5: [(1, 3, "t2", -1), (1, 6, "t3", 1), (3, 4, "t3", -1), (4, 6, "t2", -3),
        (4, 9, "t1", 1), (6, 7, "t1", -1), (7, 9, "t2", -1)],
    6: [(1, 2, "t2", 1), (1, 5, "t3", -1), (2, 4, "t3", 1), (4, 5, "t2", 3),
        (4, 8, "t1", -1), (5, 7, "t1", 1), (7, 8, "t2", 1)],
    7: [(2, 3, "t1", -1), (2, 9, "t3", -1), (3, 8, "t3", 1), (5, 6, "t1", -1),
        (5, 9, "t2", 1), (6, 8, "t2", -1), (8, 9, "t1", -3)],
    8: [(1, 3, "t1", 1), (1, 9, "t3", 1), (3, 7, "t3", -1), (4, 6, "t1", 1),
        (4, 9, "t2", -1), (6, 7, "t2", 1), (7, 9, "t1", 3)],
    9: [(1, 2, "t1", -1), (1, 8, "t3", -1), (2, 7, "t3", 1), (4, 5, "t1", -1),
        (4, 8, "t2", 1), (5, 7, "t2", -1), (7, 8, "t1", -3)],
}

# eq-(potorl): the same family against (kappa0', lambda0'); entries are
# (basis, index, coeff) with basis "k" or "l", coefficients rational
_POTORL = {
    1: [("l", 9, "t1", -1), ("l", 6, "t2", 1), ("k", 3, "t3", Fraction(5, 3)),
        ("l", 3, "t3", Fraction(-4, 3)), ("l", 12, "t3", Fraction(2, 3))],
    2: [("l", 8, "t1", 1), ("l", 5, "t2", -1), ("k", 2, "t3", Fraction(-5, 3)),
        ("l", 2, "t3", Fraction(4, 3)), ("l", 11, "t3", Fraction(-2, 3))],
    3: [("l", 7, "t1", -1), ("l", 4, "t2", 1), ("k", 1, "t3", Fraction(5, 3)),
        ("l", 1, "t3", Fraction(-4, 3)), ("l", 10, "t3", Fraction(2, 3))],
    4: [("l", 15, "t1", -1), ("k", 3, "t2", Fraction(-5, 3)),
        ("l", 3, "t2", Fraction(-2, 3)), ("l", 12, "t2", Fraction(4, 3)),
        ("l", 6, "t3", -1)],
    5: [("l", 14, "t1", 1), ("k", 2, "t2", Fraction(5, 3)),
        ("l", 2, "t2", Fraction(2, 3)), ("l", 11, "t2", Fraction(-4, 3)),
        ("l", 5, "t3", 1)],
    6: [("l", 13, "t1", -1), ("k", 1, "t2", Fraction(-5, 3)),
        ("l", 1, "t2", Fraction(-2, 3)), ("l", 10, "t2", Fraction(4, 3)),
        ("l", 4, "t3", -1)],
    7: [("k", 3, "t1", Fraction(5, 3)), ("l", 3, "t1", Fraction(2, 3)),
        ("l", 12, "t1", Fraction(2, 3)), ("l", 15, "t2", 1), ("l", 9, "t3", -1)],
    8: [("k", 2, "t1", Fraction(-5, 3)), ("l", 2, "t1", Fraction(-2, 3)),
        ("l", 11, "t1", Fraction(-2, 3)), ("l", 14, "t2", -1), ("l", 8, "t3", 1)],
    9: [("k", 1, "t1", Fraction(5, 3)), ("l", 1, "t1", Fraction(2, 3)),
        ("l", 10, "t1", Fraction(2, 3)), ("l", 13, "t2", 1), ("l", 7, "t3", -1)],
}

# eq-(mnb): the V[0,6] torsion in the primed lambda basis
_MNB = {
    1: [(3, "u1", -1), (12, "u1", 1), (15, "u2", -1), (3, "u3", -1),
        (6, "u4", -1), (9, "u5", -1), (6, "u6", -1), (9, "u7", -1)],
    2: [(2, "u1", 1), (11, "u1", -1), (14, "u2", 1), (2, "u3", 1),
        (5, "u4", 1), (8, "u5", 1), (5, "u6", 1), (8, "u7", 1)],
    3: [(1, "u1", -1), (10, "u1", 1), (13, "u2", -1), (1, "u3", -1),
        (4, "u4", -1), (7, "u5", -1), (4, "u6", -1), (7, "u7", -1)],
    4: [(6, "u1", 1), (9, "u2", -1), (3, "u4", -1), (12, "u4", 1),
        (15, "u5", 1), (3, "u6", -1)],
    5: [(5, "u1", -1), (8, "u2", 1), (2, "u4", 1), (11, "u4", -1),
        (14, "u5", -1), (2, "u6", 1)],
    6: [(4, "u1", 1), (7, "u2", -1), (1, "u4", -1), (10, "u4", 1),
        (13, "u5", 1), (1, "u6", -1)],
    7: [(6, "u2", -1), (9, "u3", 1), (3, "u5", -1), (12, "u5", 1),
        (15, "u6", 1), (3, "u7", -1)],
    8: [(5, "u2", 1), (8, "u3", -1), (2, "u5", 1), (11, "u5", -1),
        (14, "u6", -1), (2, "u7", 1)],
    9: [(4, "u2", -1), (7, "u3", 1), (1, "u5", -1), (10, "u5", 1),
        (13, "u6", 1), (1, "u7", -1)],
}

T_SYMBOLS = ("t1", "t2", "t3")
U_SYMBOLS = tuple(f"u{i}" for i in range(1, 8))


def symbolic_params(table: SymbolTable, family: str) -> dict:
    names = {"v02": T_SYMBOLS, "v06": U_SYMBOLS,
             "mixed": T_SYMBOLS + U_SYMBOLS}[family]
    out = {}
    for n in T_SYMBOLS + U_SYMBOLS:
        if n in names:
            table.add(n)
            out[n] = Poly.variable(table, n)
        else:
            out[n] = Poly.const(table, 0)
    return out


def numeric_params(table: SymbolTable, **values) -> dict:
    out = {}
    for n in T_SYMBOLS + U_SYMBOLS:
        out[n] = Poly.const(table, values.get(n, 0))
    return out


def torsion_forms(params: dict, coframe: Coframe | None = None) -> list:
    """The nine 2-forms T^i of the V[0,2] (+) V[0,6] torsion family."""
    cf = coframe or theta_coframe()
    hor = cf.horizontal
    out = []
    zero = None
    for i in range(1, 10):
        f = KForm(cf, 2)
        for a, b, sym, c in _POTOR[i]:
            v = params[sym] * c
            if v:
                f = f + KForm.term(cf, (hor[a - 1], hor[b - 1]), v)
        for lam_idx, sym, c in _MNB[i]:
            v = params[sym] * c
            if v:
                base = LAMBDA0P[lam_idx].embed_horizontal(cf)
                f = f + base.map_coefficients(lambda x, v=v: v * x)
        out.append(f)
    return out


def torsion_forms_primed_display(params: dict, coframe: Coframe | None = None) -> list:
    """The same family transcribed from the primed-basis display."""
    cf = coframe or theta_coframe()
    out = []
    for i in range(1, 10):
        f = KForm(cf, 2)
        for basis, idx, sym, c in _POTORL[i]:
            v = params[sym] * c
            if not v:
                continue
            base = (KAPPA0[f"k{idx}p"] if basis == "k" else LAMBDA0P[idx])
            f = f + base.embed_horizontal(cf).map_coefficients(lambda x, v=v: v * x)
        for lam_idx, sym, c in _MNB[i]:
            v = params[sym] * c
            if v:
                base = LAMBDA0P[lam_idx].embed_horizontal(cf)
                f = f + base.map_coefficients(lambda x, v=v: v * x)
        out.append(f)
    return out


def torsion_tensor(params: dict) -> Tensor:
    """T_{ijk} with total antisymmetry verified exactly."""
    forms = torsion_forms(params)
    cf = forms[0].coframe
    pos = {idx: a for a, idx in enumerate(cf.horizontal)}
    seen: dict = {}
    for i, f in enumerate(forms):
        for (a, b), c in f.coeffs.items():
            seen[(i, pos[a], pos[b])] = c
    # verify and canonicalize: T_{ijk} totally antisymmetric
    canon: dict = {}
    for (i, j, k), c in seen.items():
        srt = tuple(sorted((i, j, k)))
        sgn = _sign3(i, j, k)
        val = c if sgn == 1 else -c
        if srt in canon:
            if canon[srt] != val:
                raise ValueError(f"torsion not totally antisymmetric at {srt}")
        else:
            canon[srt] = val
    return Tensor(3, canon, sym="antisym", check=False)


def _sign3(i, j, k):
    s = 1
    seq = [i, j, k]
    for a in range(1, 3):
        b = a
        while b and seq[b - 1] > seq[b]:
            seq[b - 1], seq[b] = seq[b], seq[b - 1]
            s = -s
            b -= 1
    return s


def torsion_vector(params: dict):
    """84-vector over sorted triples (entries Poly or numbers)."""
    ten = torsion_tensor(params)
    return [ten.data.get(t, 0) for t in TRIPLES]


def torsion_norm(params: dict):
    """|T|^2 = T_{ijk} T^{ijk} (all ordered triples; flat metric)."""
    ten = torsion_tensor(params)
    total = None
    for t, v in ten.items_canonical():
        c = 6 * v * v
        total = c if total is None else total + c
    if total is None:
        return 0
    return total


def norm_gram_matrix():
    """Gram matrix of the 10-parameter parametrization (t1..t3,u1..u7)."""
    table = SymbolTable()
    params = symbolic_params(table, "mixed")
    n = torsion_norm(params)
    names = T_SYMBOLS + U_SYMBOLS
    gram = [[Fraction(0)] * 10 for _ in range(10)]
    for mono, c in n.terms.items():
        idx = []
        for v, e in mono:
            idx.extend([v] * e)
        i, j = (table.names[idx[0]], table.names[idx[1]])
        a, b = names.index(i), names.index(j)
        if a == b:
            gram[a][a] = c
        else:
            gram[a][b] = gram[b][a] = c / 2
    return gram


# ---------------------------------------------------------------------------
# the Upsilon' map and its kernel
# ---------------------------------------------------------------------------

def upsilon_prime_tensor(gamma) -> Tensor:
    """Y'(G)_{ijkl} = 12 G^p_{(ji} Y_{kl)p}: the literal 12-term expansion.

    `gamma` maps (i, j, k) -> G^i_{jk}; missing entries are zero.
    """
    ups = upsilon_tensor()

    def G(i, j, k):
        return gamma.get((i, j, k), 0)

    data = {}
    for quad in SYM4:
        i, j, k, l = quad
        total = 0
        for p in range(9):
            total = total + (
                G(p, j, i) * ups.get((p, k, l)) + G(p, k, i) * ups.get((j, p, l))
                + G(p, l, i) * ups.get((j, k, p))
                + G(p, i, j) * ups.get((p, k, l)) + G(p, k, j) * ups.get((i, p, l))
                + G(p, l, j) * ups.get((i, k, p))
                + G(p, i, k) * ups.get((p, j, l)) + G(p, j, k) * ups.get((i, p, l))
                + G(p, l, k) * ups.get((i, j, p))
                + G(p, i, l) * ups.get((p, j, k)) + G(p, j, l) * ups.get((i, p, k))
                + G(p, k, l) * ups.get((i, j, p)))
        if total:
            data[quad] = total
    # note: the 12 displayed terms are exactly the symmetrization over the
    # first four slots of G^p_{(ji} Y_{kl)p} evaluated on a sorted quad; on
    # non-sorted index orders the value is the same by construction
    return Tensor(4, data, sym="sym", check=False)


def _so9_col(i, j, k):
    """Column index for antisymmetric-pair connection coefficients."""
    if i < j:
        return PAIR_INDEX[(i, j)] * 9 + k, 1
    return PAIR_INDEX[(j, i)] * 9 + k, -1


def upsilon_prime_matrix():
    """The 495x324 matrix of Y' on so(9) (x) R^9."""
    rows = [dict() for _ in SYM4]
    ups = upsilon_tensor()
    # build column by column from basis connections G = E_{(ab)} (x) e_k
    for (a, b) in SYM_PAIRS:
        for k in range(9):
            col = PAIR_INDEX[(a, b)] * 9 + k
            gamma = {(a, b, k): Fraction(1), (b, a, k): Fraction(-1)}
            img = upsilon_prime_tensor(gamma)
            for quad, v in img.items_canonical():
                rows[SYM4_INDEX[quad]][col] = v
    return rows


def g_tensor_r9_basis():
    """54 kernel vectors: the generators tensored with coordinate slots."""
    vecs = []
    for g in GENERATORS:
        for k in range(9):
            v = [Fraction(0)] * 324
            for i in range(9):
                for j in range(i + 1, 9):
                    if g[i][j]:
                        v[PAIR_INDEX[(i, j)] * 9 + k] = Fraction(g[i][j])
            vecs.append(v)
    return vecs


def lambda3_basis_connections():
    """84 kernel vectors: totally antisymmetric G_{ijk} = T_{ijk}."""
    vecs = []
    for (i, j, k) in TRIPLES:
        v = [Fraction(0)] * 324
        for (x, y, z) in permutations((i, j, k)):
            if x < y:
                v[PAIR_INDEX[(x, y)] * 9 + z] = Fraction(_sign3(x, y, z))
        vecs.append(v)
    return vecs


def kernel_theorem_check():
    """dim ker Y' = 138 = 54 + 84 with trivial intersection, spans equal."""
    rows = upsilon_prime_matrix()
    ker = kernel(rows, 324)
    rk = rank(rows, 324)
    g_r9 = g_tensor_r9_basis()
    lam3 = lambda3_basis_connections()
    inter = span_intersection(g_r9, lam3, 324)
    report = {
        "rank": rk,
        "kernel_dim": len(ker),
        "g_r9_dim": rank(g_r9, 324),
        "lam3_dim": rank(lam3, 324),
        "intersection_dim": len(inter),
        "direct_sum_equals_kernel": span_equal(g_r9 + lam3, ker, 324),
    }
    return report


# ---------------------------------------------------------------------------
# group actions on the torsion
# ---------------------------------------------------------------------------

def act_on_tensor3(rho9, ten: Tensor) -> Tensor:
    """(hT)_{ijk} = h^p_i h^q_j h^r_k T_{pqr} for a 9x9 matrix h."""
    cols = [[(p, rho9[p][i]) for p in range(9) if rho9[p][i]] for i in range(9)]
    data = {}
    for (i, j, k) in TRIPLES:
        total = 0
        for p, hpi in cols[i]:
            for q, hqj in cols[j]:
                if q == p:
                    continue
                for r, hrk in cols[k]:
                    v = ten.get((p, q, r))
                    if v:
                        total = total + hpi * hqj * hrk * v
        if total:
            data[(i, j, k)] = total
    return Tensor(3, data, sym="antisym", check=False)


def extract_params(ten: Tensor, family: str, table: SymbolTable) -> dict:
    """Invert the (injective) parametrization on its image."""
    names = {"v02": T_SYMBOLS, "v06": U_SYMBOLS,
             "mixed": T_SYMBOLS + U_SYMBOLS}[family]
    cols = []
    for n in names:
        p = numeric_params(table)
        p[n] = Poly.const(table, 1)
        cols.append(torsion_vector(p))
    rows = [[Fraction(c.constant_value()) if isinstance(c, Poly) else Fraction(c)
             for c in col] for col in cols]
    rows_t = [list(x) for x in zip(*rows)]
    target = [ten.data.get(t, 0) for t in TRIPLES]
    from .linalg import solve
    target_q = [Fraction(x) if not isinstance(x, Fraction) else x for x in target]
    sol = solve(rows_t, target_q, len(names))
    # verify exact reconstruction
    rec = {}
    for n, v in zip(names, sol):
        rec[n] = v
    full = numeric_params(table, **rec)
    if torsion_tensor(full) != ten:
        raise ValueError("tensor is not in the parametrized family")
    return rec


# ---------------------------------------------------------------------------
# d(omega) and d(*omega) rank analysis
# ---------------------------------------------------------------------------

def domega_rank_analysis():
    """Ranks of T -> d(omega) and T -> d(*omega), with kernels identified.

    The differentials are computed on the bundle with all gamma terms kept
    and a fully general 84-parameter torsion; the gamma-containing part
    must cancel identically (invariance of omega under the connection
    group) before the rank is read off.  Kernels come back as 84-vector
    bases together with the four-module reference spans.
    """
    from .bianchi import structure_table_general
    st, table, sym_index = structure_table_general()
    cf = st.coframe
    om = omega_form(cf)
    som = star_omega_form().embed_horizontal(cf)
    hor = set(cf.horizontal)
    out = {}
    for tag, form in (("domega", om), ("dstar_omega", som)):
        d = st.d(form)
        mat_rows = []
        for t, c in sorted(d.coeffs.items()):
            if not set(t) <= hor:
                if c:
                    raise ValueError(f"gamma terms fail to cancel in {tag}")
                continue
            row = {}
            for mono, coeff in c.terms.items():
                (v, e), = mono
                if e != 1:
                    raise ValueError("map is not linear in the torsion")
                row[sym_index[v]] = coeff
            if row:
                mat_rows.append(row)
        out[tag] = {"rank": rank(mat_rows, 84), "kernel": kernel(mat_rows, 84)}
    # reference modules inside Lambda^3
    z6 = module("C3", "Z6")
    z18 = module("omega_tilde", "Z18")
    z18p = module("omega_tilde", "Z18p")
    v02 = span_intersection(z6.basis, z18.basis, 84)
    v20 = span_intersection(z6.basis, z18p.basis, 84)
    v06 = module("omega_tilde", "V[0,6]").basis
    v60 = module("omega_tilde", "V[6,0]").basis
    out["domega_kernel_expected"] = v02 + v20 + v06 + v60
    out["dstar_kernel_expected"] = module("omega_tilde", "Z34").basis
    return out
