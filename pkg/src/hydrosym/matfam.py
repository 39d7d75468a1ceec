"""4x4 matrix realization of the symmetry algebra over polynomials in T.

Matrices are lists of lists of :class:`PolyLambda`; the Schrodinger operator
``T`` is replaced by the polynomial variable ``lam``. Fibers at a rational
``lam0`` are classified by the inertia of the Killing form, computed exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence

from .diffop import levi_civita
from .exactalg import GaussRational, PolyLambda, parse_rational

__all__ = [
    "GENERATOR_NAMES",
    "KillingSignature",
    "matrix_generators",
    "mat_mul",
    "mat_commutator",
    "verify_homomorphism",
    "rank_over_polys",
    "structure_coordinates",
    "killing_matrix",
    "inertia",
    "killing_signature",
    "ad_invariance_defects",
]

GENERATOR_NAMES = ("L1", "L2", "L3", "R1", "R2", "R3")

Matrix = List[List[PolyLambda]]


@dataclass(frozen=True)
class KillingSignature:
    n_plus: int
    n_minus: int
    n_zero: int

    def __post_init__(self):
        if self.n_plus + self.n_minus + self.n_zero != 6:
            raise ValueError("signature entries must sum to 6")

    def as_tuple(self):
        return (self.n_plus, self.n_minus, self.n_zero)


def _zero() -> Matrix:
    return [[PolyLambda() for _ in range(4)] for _ in range(4)]


def _from_entries(entries: Dict[tuple, PolyLambda]) -> Matrix:
    m = _zero()
    for (i, j), v in entries.items():
        m[i - 1][j - 1] = PolyLambda.coerce(v)
    return m


def matrix_generators() -> Dict[str, Matrix]:
    """Images of L1, L2, L3, R1, R2, R3 (1-based entry positions in comments)."""
    one = PolyLambda.const(1)
    lam = PolyLambda.lam()
    return {
        "L1": _from_entries({(2, 3): -one, (3, 2): one}),
        "L2": _from_entries({(1, 3): -one, (3, 1): one}),
        "L3": _from_entries({(1, 2): -one, (2, 1): one}),
        "R1": _from_entries({(1, 4): one, (4, 1): lam}),
        "R2": _from_entries({(2, 4): -one, (4, 2): -lam}),
        "R3": _from_entries({(3, 4): one, (4, 3): lam}),
    }


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    n = len(A)
    out = [[PolyLambda() for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for k in range(n):
            a = A[i][k]
            if a.is_zero():
                continue
            for j in range(n):
                if not B[k][j].is_zero():
                    out[i][j] = out[i][j] + a * B[k][j]
    return out


def _lin(mats: Sequence[Matrix], coeffs: Sequence) -> Matrix:
    out = _zero()
    for M, c in zip(mats, coeffs):
        c = PolyLambda.coerce(c)
        if c.is_zero():
            continue
        for i in range(4):
            for j in range(4):
                out[i][j] = out[i][j] + c * M[i][j]
    return out


def mat_commutator(A: Matrix, B: Matrix) -> Matrix:
    AB, BA = mat_mul(A, B), mat_mul(B, A)
    return [[AB[i][j] - BA[i][j] for j in range(4)] for i in range(4)]


def _is_zero(M: Matrix) -> bool:
    return all(e.is_zero() for row in M for e in row)


def _sub(A: Matrix, B: Matrix) -> Matrix:
    return [[A[i][j] - B[i][j] for j in range(4)] for i in range(4)]


def verify_homomorphism() -> list:
    """Same bracket table as the differential operators, with T -> lam.

    Also records the 𝒪-linear independence of the six images and the
    tracelessness of each generator.
    """
    G = matrix_generators()
    L = [G["L1"], G["L2"], G["L3"]]
    R = [G["R1"], G["R2"], G["R3"]]
    lam = PolyLambda.lam()
    report = []

    def entry(name, resid):
        report.append({"id": name, "residual": resid, "pass": _is_zero(resid)})

    for i in range(3):
        for j in range(3):
            eps = [levi_civita(i, j, k) for k in range(3)]
            entry(f"matrix [L{i+1},L{j+1}] = -eps L",
                  _sub(mat_commutator(L[i], L[j]), _lin(L, [-e for e in eps])))
            entry(f"matrix [R{i+1},R{j+1}] = eps lam L",
                  _sub(mat_commutator(R[i], R[j]), _lin(L, [lam * e for e in eps])))
            entry(f"matrix [L{i+1},R{j+1}] = -eps R",
                  _sub(mat_commutator(L[i], R[j]), _lin(R, [-e for e in eps])))
    for name, M in G.items():
        tr = M[0][0] + M[1][1] + M[2][2] + M[3][3]
        report.append({"id": f"tr {name} = 0", "residual": tr, "pass": tr.is_zero()})
    rank = rank_over_polys([sum(M, []) for M in G.values()])
    report.append({"id": "images independent over polynomials in T",
                   "residual": 6 - rank, "pass": rank == 6})
    return report


def rank_over_polys(rows: Sequence[Sequence[PolyLambda]]) -> int:
    """Rank over the fraction field, by division-free elimination."""
    rows = [[PolyLambda.coerce(e) for e in r] for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if not rows[i][col].is_zero()), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank][col]
        for i in range(rank + 1, len(rows)):
            a = rows[i][col]
            if a.is_zero():
                continue
            rows[i] = [p * x - a * y for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def _evaluate(M: Matrix, lam0: Fraction) -> List[List[Fraction]]:
    out = []
    for row in M:
        vals = []
        for e in row:
            v = e(lam0)
            if not v.is_real():
                raise ValueError("non-real entry at a real base point")
            vals.append(v.re)
        out.append(vals)
    return out


# entry that carries each generator's coordinate, with its sign
_COORD = [((2, 1), 1), ((2, 0), 1), ((1, 0), 1), ((0, 3), 1), ((1, 3), -1), ((2, 3), 1)]


def structure_coordinates(M: List[List[Fraction]], basis: List[List[List[Fraction]]]) -> List[Fraction]:
    """Coordinates of ``M`` in the six-element basis; exact reconstruction is checked."""
    coords = [s * M[i][j] for (i, j), s in _COORD]
    rebuilt = [[sum(c * B[i][j] for c, B in zip(coords, basis)) for j in range(4)] for i in range(4)]
    if rebuilt != M:
        raise ValueError("matrix is not in the span of the generators")
    return coords


def _num_commutator(A, B):
    n = len(A)
    AB = [[sum(A[i][k] * B[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    BA = [[sum(B[i][k] * A[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    return [[AB[i][j] - BA[i][j] for j in range(n)] for i in range(n)]


def _ad_matrices(lam0: Fraction):
    G = matrix_generators()
    basis = [_evaluate(G[n], lam0) for n in GENERATOR_NAMES]
    ads = []
    for X in basis:
        cols = [structure_coordinates(_num_commutator(X, Y), basis) for Y in basis]
        ads.append([[cols[b][a] for b in range(6)] for a in range(6)])
    return ads


def killing_matrix(lam0) -> List[List[Fraction]]:
    """B(X_a, X_b) = tr(ad X_a ad X_b) on the real span of the six generators."""
    lam0 = _as_fraction(lam0)
    ads = _ad_matrices(lam0)
    B = [[Fraction(0)] * 6 for _ in range(6)]
    for a in range(6):
        for b in range(6):
            B[a][b] = sum(ads[a][i][k] * ads[b][k][i] for i in range(6) for k in range(6))
    return B


def inertia(S: Sequence[Sequence[Fraction]]) -> tuple:
    """(n_plus, n_minus, n_zero) of a rational symmetric matrix via LDL^T.

    Uses symmetric pivoting on a nonzero diagonal entry when one exists,
    and a 2x2 block pivot otherwise; such a block has one positive and one
    negative eigenvalue.
    """
    A = [[Fraction(x) for x in row] for row in S]
    n = len(A)
    if any(A[i][j] != A[j][i] for i in range(n) for j in range(n)):
        raise ValueError("matrix is not symmetric")
    pos = neg = 0
    while A:
        n = len(A)
        d = next((i for i in range(n) if A[i][i] != 0), None)
        if d is not None:
            p = A[d][d]
            if p > 0:
                pos += 1
            else:
                neg += 1
            A = [[A[i][j] - A[i][d] * A[d][j] / p for j in range(n) if j != d]
                 for i in range(n) if i != d]
            continue
        off = next(((i, j) for i in range(n) for j in range(i + 1, n) if A[i][j] != 0), None)
        if off is None:
            break
        i0, j0 = off
        # 2x2 block [[0, b], [b, 0]] with inverse [[0, 1/b], [1/b, 0]]
        b = A[i0][j0]
        pos += 1
        neg += 1
        keep = [k for k in range(n) if k not in (i0, j0)]
        A = [[A[i][j] - (A[i][i0] * A[j0][j] + A[i][j0] * A[i0][j]) / b for j in keep]
             for i in keep]
    zero = len(S) - pos - neg
    return pos, neg, zero


def _as_fraction(x) -> Fraction:
    if isinstance(x, str):
        return parse_rational(x)
    if isinstance(x, GaussRational):
        if not x.is_real():
            raise ValueError("base point must be real")
        return x.re
    if isinstance(x, float):
        raise TypeError("base point must be an exact rational")
    return Fraction(x)


def killing_signature(lam0) -> KillingSignature:
    """Inertia of the Killing form at a real rational base point.

    Convention: negative definite (0, 6, 0) is the compact fiber so(4),
    (3, 3, 0) is so(3,1), and the contracted fiber at zero has n_zero = 3.
    """
    return KillingSignature(*inertia(killing_matrix(lam0)))


def ad_invariance_defects(lam0) -> list:
    """B([X,Y],Z) + B(Y,[X,Z]) over all basis triples; every entry should be 0."""
    lam0 = _as_fraction(lam0)
    B = killing_matrix(lam0)
    ads = _ad_matrices(lam0)
    out = []
    for x in range(6):
        ad = ads[x]
        for y in range(6):
            for z in range(6):
                # [X_x, X_y] has coordinates ad[:, y]
                t1 = sum(ad[c][y] * B[c][z] for c in range(6))
                t2 = sum(ad[c][z] * B[y][c] for c in range(6))
                out.append(t1 + t2)
    return out
