"""Concrete models of the irreducible 9-dimensional representation.

The 3x3-matrix model: R^9 <-> M_3(R) by rows,
    sigma(a)[r][c] = a[3r + c],
with the group acting by  A |-> hL sigma(A) hR^{-1}.  The six so(3)+so(3)
generator matrices and the nine 16x16 Clifford matrices are kept in a
plain-text data file (`row col value` triplets, 1-based, value in
{1,-1,i,-i}) and are validated against their defining relations at load
time, so a transcription error cannot pass silently.
"""

from __future__ import annotations

import importlib.resources
from fractions import Fraction
from math import comb

from .linalg import ES_FIELD, QQ_FIELD, LinAlgError, kernel, mat_inverse, mat_mul, rank
from .scalars import ExactScalar

GEN_NAMES = ("e1", "e2", "e3", "e1p", "e2p", "e3p")
SPIN_NAMES = tuple(f"s{i}" for i in range(1, 10))

# bracket table of so(3)_L + so(3)_R in the (dwie) basis:
# [e1,e2]=e3, [e3,e1]=e2, [e2,e3]=e1 and primed copies, mixed brackets zero
BRACKETS = {("e1", "e2"): "e3", ("e3", "e1"): "e2", ("e2", "e3"): "e1",
            ("e1p", "e2p"): "e3p", ("e3p", "e1p"): "e2p", ("e2p", "e3p"): "e1p"}


def sigma(a):
    """9-vector -> 3x3 matrix (row-major)."""
    return [[a[3 * r + c] for c in range(3)] for r in range(3)]


def sigma_inv(m):
    return [m[r][c] for r in range(3) for c in range(3)]


def _parse_value(tok: str):
    if tok == "i":
        return ExactScalar(0, 0, 1, 0)
    if tok == "-i":
        return ExactScalar(0, 0, -1, 0)
    return Fraction(tok)


def _load_data():
    text = importlib.resources.files("ninegeo").joinpath("data/generators.txt").read_text()
    mats: dict = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        name, row, col, val = line.split()
        mats.setdefault(name, []).append((int(row) - 1, int(col) - 1, _parse_value(val)))
    out = {}
    for name, triples in mats.items():
        n = 16 if name.startswith("s") else 9
        m = [[Fraction(0)] * n for _ in range(n)]
        if name.startswith("s"):
            m = [[ExactScalar(0)] * n for _ in range(n)]
        for r, c, v in triples:
            m[r][c] = v if not name.startswith("s") else ExactScalar.coerce(v)
        out[name] = m
    return out


def _commutator(a, b):
    return _mat_sub(mat_mul_g(a, b), mat_mul_g(b, a))


def mat_mul_g(a, b):
    """Ring-generic matrix product (works for Fraction and ExactScalar)."""
    n, m, p = len(a), len(b), len(b[0])
    out = [[a[0][0] * 0 for _ in range(p)] for _ in range(n)]
    for i in range(n):
        for k in range(m):
            x = a[i][k]
            if not x:
                continue
            for j in range(p):
                if b[k][j]:
                    out[i][j] = out[i][j] + x * b[k][j]
    return out


def _mat_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def _mat_eq(a, b):
    return all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def _expected_bracket(gens, na, nb):
    if (na, nb) in BRACKETS:
        return gens[BRACKETS[(na, nb)]]
    if (nb, na) in BRACKETS:
        return [[-x for x in row] for row in gens[BRACKETS[(nb, na)]]]
    return [[type(gens[na][0][0])(0)] * len(gens[na]) for _ in range(len(gens[na]))]


def _validate_generators(gens):
    for i, na in enumerate(GEN_NAMES):
        a = gens[na]
        for r in range(9):
            for c in range(9):
                if a[r][c] != -a[c][r]:
                    raise ValueError(f"generator {na} is not antisymmetric")
        for nb in GEN_NAMES[i + 1:]:
            com = _commutator(a, gens[nb])
            if not _mat_eq(com, _expected_bracket(gens, na, nb)):
                raise ValueError(f"bracket [{na},{nb}] fails the (dwie) table")


_DATA = _load_data()
_validate_generators(_DATA)

E1, E2, E3 = (_DATA[n] for n in ("e1", "e2", "e3"))
E1P, E2P, E3P = (_DATA[n] for n in ("e1p", "e2p", "e3p"))
GENERATORS = (E1, E2, E3, E1P, E2P, E3P)
SPIN_E = tuple(_DATA[n] for n in SPIN_NAMES)


def generator(name: str):
    return _DATA[name]


# ---------------------------------------------------------------------------
# exact rotations
# ---------------------------------------------------------------------------

def cayley(skew):
    """(I - S)^-1 (I + S): an exact rational rotation for rational skew S."""
    n = len(skew)
    ident = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    a = [[ident[i][j] - skew[i][j] for j in range(n)] for i in range(n)]
    b = [[ident[i][j] + skew[i][j] for j in range(n)] for i in range(n)]
    return mat_mul(mat_inverse(a), b)


def random_skew3(rng, denom: int = 7):
    vals = [Fraction(rng.randint(-3, 3), rng.randint(1, denom)) for _ in range(3)]
    x, y, z = vals
    return [[0, -z, y], [z, 0, -x], [-y, x, 0]]


def random_rotation3(rng):
    return cayley(random_skew3(rng))


def rho(h_left, h_right):
    """The 9x9 matrix of A -> sigma^-1(hL sigma(A) hR^-1).

    Inputs must be (exact) rotations; orthogonality is checked.
    """
    for h in (h_left, h_right):
        ht_h = mat_mul_g([list(r) for r in zip(*h)], h)
        if not _mat_eq(ht_h, [[Fraction(int(i == j)) for j in range(3)] for i in range(3)]):
            raise ValueError("rho needs orthogonal 3x3 inputs")
    return rho_general(h_left, h_right)


def rho_general(h_left, h_right):
    """Same formula without the orthogonality check (any invertible pair)."""
    hr_inv = mat_inverse(h_right, ES_FIELD if _has_es(h_right) else QQ_FIELD)
    out = [[None] * 9 for _ in range(9)]
    for r in range(3):
        for c in range(3):
            for p in range(3):
                for q in range(3):
                    out[3 * r + c][3 * p + q] = h_left[r][p] * hr_inv[q][c]
    return out


def _has_es(m):
    return any(isinstance(x, ExactScalar) for row in m for x in row)


def random_group_element(rng):
    """A random exact element of SO(3)xSO(3) in the 9-dim representation."""
    return rho(random_rotation3(rng), random_rotation3(rng))


# ---------------------------------------------------------------------------
# commutant (Schur check)
# ---------------------------------------------------------------------------

def commutant(generators):
    """Basis of {X : [X, g] = 0 for all g}, solved on 81 unknowns."""
    rows = []
    for g in generators:
        for i in range(9):
            for j in range(9):
                # (X g - g X)_{ij} = sum_l X_il g_lj - g_il X_lj
                d = {}
                for l in range(9):
                    if g[l][j]:
                        d[9 * i + l] = d.get(9 * i + l, Fraction(0)) + g[l][j]
                    if g[i][l]:
                        d[9 * l + j] = d.get(9 * l + j, Fraction(0)) - g[i][l]
                d = {k: v for k, v in d.items() if v}
                if d:
                    rows.append(d)
    basis = kernel(rows, 81)
    mats = [[[v[9 * i + j] for j in range(9)] for i in range(9)] for v in basis]
    return mats, basis


# ---------------------------------------------------------------------------
# Peano's model on binary biquadratics
# ---------------------------------------------------------------------------

def _expand_pair_power(a, b, p):
    """Coefficients of (a*x1 + b*x2)^p against x1^(p-j) x2^j."""
    return [comb(p, j) * a ** (p - j) * b ** j for j in range(p + 1)]


def peano_action(m, mu, h_left, h_right):
    """Matrix of the coefficient action on R^((m+1)(mu+1)).

    Coefficient order: index = lam*(m+1) + l, matching the x-vector
    convention (a00, a10, a20, a01, ...) at (m,mu) = (2,2).
    """
    for h in (h_left, h_right):
        det = h[0][0] * h[1][1] - h[0][1] * h[1][0]
        if det != 1:
            raise ValueError("peano_action needs unimodular 2x2 inputs")
    dim = (m + 1) * (mu + 1)
    out = [[Fraction(0)] * dim for _ in range(dim)]
    for l in range(m + 1):
        for lam in range(mu + 1):
            src = lam * (m + 1) + l
            c0 = comb(m, l) * comb(mu, lam)
            # (hL phi)_1 = h11 phi1 + h12 phi2, etc.
            f1 = _expand_pair_power(h_left[0][0], h_left[0][1], m - l)
            f2 = _expand_pair_power(h_left[1][0], h_left[1][1], l)
            p1 = _expand_pair_power(h_right[0][0], h_right[0][1], mu - lam)
            p2 = _expand_pair_power(h_right[1][0], h_right[1][1], lam)
            phi = [0] * (m + 1)
            for j1, c1 in enumerate(f1):
                for j2, c2 in enumerate(f2):
                    phi[j1 + j2] += c1 * c2
            psi = [0] * (mu + 1)
            for j1, c1 in enumerate(p1):
                for j2, c2 in enumerate(p2):
                    psi[j1 + j2] += c1 * c2
            for lp in range(m + 1):
                for lamp in range(mu + 1):
                    v = phi[lp] * psi[lamp]
                    if v:
                        dst = lamp * (m + 1) + lp
                        out[dst][src] += Fraction(c0 * v, comb(m, lp) * comb(mu, lamp))
    return out


def peano_generator(m, mu, x2, side: str):
    """Infinitesimal coefficient action of a 2x2 algebra element.

    d/dt of x1^e1 x2^e2 along x -> x + t(X x) shifts the second exponent
    by -1, 0 or +1:
        e2 -> e2:    e1*X11 + e2*X22
        e2 -> e2+1:  e1*X12
        e2 -> e2-1:  e2*X21
    applied to the phi pair (side "L") or the psi pair (side "R").
    """
    dim = (m + 1) * (mu + 1)
    zero = x2[0][0] * Fraction(0)
    out = [[zero for _ in range(dim)] for _ in range(dim)]
    for l in range(m + 1):
        for lam in range(mu + 1):
            src = lam * (m + 1) + l
            c0 = comb(m, l) * comb(mu, lam)
            e2 = l if side == "L" else lam
            e1 = (m - l) if side == "L" else (mu - lam)
            shifts = [(0, e1 * x2[0][0] + e2 * x2[1][1]),
                      (1, e1 * x2[0][1]),
                      (-1, e2 * x2[1][0])]
            for de, coeff in shifts:
                if not coeff:
                    continue
                if side == "L":
                    lp, lamp = l + de, lam
                else:
                    lp, lamp = l, lam + de
                if not (0 <= lp <= m and 0 <= lamp <= mu):
                    raise AssertionError("exponent shift out of range")
                dst = lamp * (m + 1) + lp
                denom = comb(m, lp) * comb(mu, lamp)
                out[dst][src] = out[dst][src] + coeff * c0 * Fraction(1, denom)
    return out


def peano_to_riemannian_matrix():
    """The complex substitution x = S y as an exact 9x9 over Q(i, sqrt2)."""
    i = ExactScalar(0, 0, 1, 0)
    s = ExactScalar(0, Fraction(1, 2), 0, 0)  # 1/sqrt2
    one = ExactScalar(1)
    z = ExactScalar(0)
    rows = {
        0: {0: one, 1: i},
        8: {0: one, 1: -i},
        2: {2: one, 3: i},
        6: {2: one, 3: -i},
        1: {4: s, 5: s * i},
        7: {4: -s, 5: s * i},
        3: {6: s, 7: s * i},
        5: {6: -s, 7: s * i},
        4: {8: s},
    }
    return [[rows[r].get(c, z) for c in range(9)] for r in range(9)]


# ---------------------------------------------------------------------------
# spin model
# ---------------------------------------------------------------------------

def _half_product(a, b):
    prod = mat_mul_g(a, b)
    return [[-(x * Fraction(1, 2)) for x in row] for row in prod]


def spin_generators(corrected: bool = False):
    """The printed spin generators; `corrected` completes the visible
    pattern in E'_1 and E'_2 (e7e8 for e6e8, e7e9 for e7e3)."""
    e = {i + 1: SPIN_E[i] for i in range(9)}

    def build(pairs):
        total = None
        for a, b in pairs:
            t = _half_product(e[a], e[b])
            total = t if total is None else [[x + y for x, y in zip(r1, r2)]
                                             for r1, r2 in zip(total, t)]
        return total

    big = {
        "E1": build([(1, 4), (2, 5), (3, 6)]),
        "E2": build([(1, 7), (2, 8), (3, 9)]),
        "E3": build([(4, 7), (5, 8), (6, 9)]),
        "E3p": build([(2, 3), (5, 6), (8, 9)]),
    }
    if corrected:
        big["E1p"] = build([(1, 2), (4, 5), (7, 8)])
        big["E2p"] = build([(1, 3), (4, 6), (7, 9)])
    else:
        big["E1p"] = build([(1, 2), (4, 5), (6, 8)])
        big["E2p"] = build([(1, 3), (4, 6), (7, 3)])
    return big


def clifford_check():
    """e_i e_j + e_j e_i = 2 delta_ij on the nine 16x16 matrices."""
    failures = []
    for i in range(9):
        for j in range(i, 9):
            s = mat_mul_g(SPIN_E[i], SPIN_E[j])
            t = mat_mul_g(SPIN_E[j], SPIN_E[i])
            tot = [[x + y for x, y in zip(r1, r2)] for r1, r2 in zip(s, t)]
            want = ExactScalar(2 if i == j else 0)
            ok = all(tot[r][c] == (want if r == c else ExactScalar(0))
                     for r in range(16) for c in range(16))
            if not ok:
                failures.append((i + 1, j + 1))
    return failures


def spin_bracket_report(corrected: bool):
    """Which brackets of the spin generators fail the (dwie) table."""
    big = spin_generators(corrected)
    name_map = {"e1": "E1", "e2": "E2", "e3": "E3",
                "e1p": "E1p", "e2p": "E2p", "e3p": "E3p"}
    failures = []
    names = list(name_map)
    for i, na in enumerate(names):
        for nb in names[i + 1:]:
            a, b = big[name_map[na]], big[name_map[nb]]
            com = _commutator(a, b)
            if (na, nb) in BRACKETS:
                expect = big[name_map[BRACKETS[(na, nb)]]]
            elif (nb, na) in BRACKETS:
                expect = [[-x for x in row] for row in big[name_map[BRACKETS[(nb, na)]]]]
            else:
                expect = [[ExactScalar(0)] * 16 for _ in range(16)]
            if not _mat_eq(com, expect):
                failures.append((na, nb))
    return failures
