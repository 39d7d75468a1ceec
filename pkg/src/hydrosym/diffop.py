"""Exact algebra of linear differential operators on R^3 minus the origin.

Coefficients live in ``Q(i)[x1, x2, x3, r, 1/r] / (r^2 - x1^2 - x2^2 - x3^2)``.
An element of that ring is stored in the basis ``r^k x1^e x2^a x3^b`` with
``e in {0, 1}``: every occurrence of ``x1^2`` is rewritten as
``r^2 - x2^2 - x3^2``. Since the defining relation is monic in ``x1`` this
basis is free over ``Q(i)[x2, x3, r, 1/r]``, so the stored form is unique and
equality is coefficient-wise.

Operators are kept in normal order, coefficients to the left of all
derivatives, as a map from derivative multi-indices to coefficients.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import comb
from typing import Dict, Mapping, Tuple

import numpy as np

from .exactalg import ONE, GaussRational, I

__all__ = [
    "Coeff",
    "DiffOp",
    "build_generators",
    "commutator",
    "verify_structure_constants",
    "casimir_values",
    "formal_adjoint",
    "sigma",
    "sigma_prime",
    "theta",
    "centralizer_order2_check",
    "order2_centralizer_basis",
    "involution_checks",
    "multiply",
    "levi_civita",
]

Mono = Tuple[int, int, int, int]  # (k, e, a, b): r^k x1^e x2^a x3^b
Multi = Tuple[int, int, int]


def levi_civita(i: int, j: int, k: int) -> int:
    if len({i, j, k}) < 3:
        return 0
    return 1 if (i, j, k) in ((0, 1, 2), (1, 2, 0), (2, 0, 1)) else -1


def _add_into(acc: Dict, key, val: GaussRational) -> None:
    if not val:
        return
    cur = acc.get(key)
    new = val if cur is None else cur + val
    if new:
        acc[key] = new
    else:
        acc.pop(key, None)


def _reduce(k: int, e: int, a: int, b: int):
    """Yield (sign, monomial) pairs with x1-exponent at most one."""
    if e <= 1:
        yield 1, (k, e, a, b)
        return
    # x1^2 = r^2 - x2^2 - x3^2
    for s, m in _reduce(k + 2, e - 2, a, b):
        yield s, m
    for s, m in _reduce(k, e - 2, a + 2, b):
        yield -s, m
    for s, m in _reduce(k, e - 2, a, b + 2):
        yield -s, m


class Coeff:
    """Element of the coefficient ring; immutable and hashable."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Mono, GaussRational] | None = None):
        acc: Dict[Mono, GaussRational] = {}
        if terms:
            for (k, e, a, b), c in terms.items():
                c = GaussRational.coerce(c)
                for s, m in _reduce(k, e, a, b):
                    _add_into(acc, m, c if s > 0 else -c)
        object.__setattr__(self, "terms", acc)
        object.__setattr__(self, "_hash", None)

    @classmethod
    def _raw(cls, terms: Dict[Mono, GaussRational]) -> "Coeff":
        obj = cls.__new__(cls)
        object.__setattr__(obj, "terms", terms)
        object.__setattr__(obj, "_hash", None)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("Coeff is immutable")

    # constructors -----------------------------------------------------
    @classmethod
    def const(cls, c) -> "Coeff":
        c = GaussRational.coerce(c)
        return cls._raw({(0, 0, 0, 0): c} if c else {})

    @classmethod
    def x(cls, i: int) -> "Coeff":
        """Coordinate function ``x_{i+1}`` (0-based index)."""
        mono = [(0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)][i]
        return cls._raw({mono: ONE})

    @classmethod
    def r(cls, k: int = 1) -> "Coeff":
        return cls._raw({(k, 0, 0, 0): ONE})

    @classmethod
    def coerce(cls, v) -> "Coeff":
        if isinstance(v, Coeff):
            return v
        return cls.const(v)

    # ring operations ----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        o = Coeff.coerce(other)
        acc = dict(self.terms)
        for m, c in o.terms.items():
            _add_into(acc, m, c)
        return Coeff._raw(acc)

    __radd__ = __add__

    def __neg__(self):
        return Coeff._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-Coeff.coerce(other))

    def __rsub__(self, other):
        return Coeff.coerce(other) - self

    def scale(self, c) -> "Coeff":
        c = GaussRational.coerce(c)
        if not c:
            return Coeff()
        return Coeff._raw({m: v * c for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (GaussRational, int, Fraction)):
            return self.scale(other)
        o = Coeff.coerce(other)
        acc: Dict[Mono, GaussRational] = {}
        for (k1, e1, a1, b1), c1 in self.terms.items():
            for (k2, e2, a2, b2), c2 in o.terms.items():
                c = c1 * c2
                for s, m in _reduce(k1 + k2, e1 + e2, a1 + a2, b1 + b2):
                    _add_into(acc, m, c if s > 0 else -c)
        return Coeff._raw(acc)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = Coeff.const(1)
        for _ in range(n):
            out = out * self
        return out

    def conjugate(self) -> "Coeff":
        return Coeff._raw({m: c.conjugate() for m, c in self.terms.items()})

    def deriv(self, i: int) -> "Coeff":
        """Partial derivative in ``x_{i+1}`` using d(r^k) = k x_i r^(k-2)."""
        return _deriv_cached(self, i)

    def deriv_multi(self, beta: Multi) -> "Coeff":
        out = self
        for i, n in enumerate(beta):
            for _ in range(n):
                out = out.deriv(i)
        return out

    def __eq__(self, other):
        try:
            o = Coeff.coerce(other)
        except TypeError:
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash(frozenset(self.terms.items()))
            object.__setattr__(self, "_hash", h)
        return h

    def __call__(self, x1, x2, x3):
        """Numerical evaluation at points (broadcasting numpy arrays)."""
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        x3 = np.asarray(x3, dtype=float)
        r = np.sqrt(x1 * x1 + x2 * x2 + x3 * x3)
        out = np.zeros(np.broadcast(x1, x2, x3).shape, dtype=complex)
        for (k, e, a, b), c in self.terms.items():
            out = out + complex(c) * r**k * x1**e * x2**a * x3**b
        return out

    def sort_key_items(self):
        # x-graded lex, then r-exponent descending
        return sorted(
            self.terms.items(),
            key=lambda t: (-(t[0][1] + t[0][2] + t[0][3]), -t[0][1], -t[0][2], -t[0][3], -t[0][0]),
        )

    def __repr__(self):
        return f"Coeff({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (k, e, a, b), c in self.sort_key_items():
            fac = []
            for name, p in (("x1", e), ("x2", a), ("x3", b)):
                if p == 1:
                    fac.append(name)
                elif p > 1:
                    fac.append(f"{name}^{p}")
            if k == 1:
                fac.append("r")
            elif k != 0:
                fac.append(f"r^{k}")
            mono = "*".join(fac)
            cs = str(c)
            if c.im != 0 and c.re != 0:
                cs = f"({cs})"
            if not mono:
                parts.append(cs)
            elif c == ONE:
                parts.append(mono)
            elif c == -ONE:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


@lru_cache(maxsize=200_000)
def _deriv_cached(f: Coeff, i: int) -> Coeff:
    acc: Dict[Mono, GaussRational] = {}
    for (k, e, a, b), c in f.terms.items():
        exps = [e, a, b]
        # derivative of r^k
        if k:
            ex = list(exps)
            ex[i] += 1
            for s, m in _reduce(k - 2, ex[0], ex[1], ex[2]):
                _add_into(acc, m, c * (k * s))
        # derivative of the monomial in x
        if exps[i]:
            ex = list(exps)
            n = ex[i]
            ex[i] -= 1
            for s, m in _reduce(k, ex[0], ex[1], ex[2]):
                _add_into(acc, m, c * (n * s))
    return Coeff._raw(acc)


class DiffOp:
    """Normal-ordered differential operator ``sum_beta c_beta(x) d^beta``."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Multi, Coeff] | None = None):
        acc: Dict[Multi, Coeff] = {}
        if terms:
            for beta, c in terms.items():
                c = Coeff.coerce(c)
                if c:
                    acc[tuple(beta)] = c
        object.__setattr__(self, "terms", acc)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("DiffOp is immutable")

    @classmethod
    def identity(cls) -> "DiffOp":
        return cls({(0, 0, 0): Coeff.const(1)})

    @classmethod
    def mult(cls, f) -> "DiffOp":
        """Multiplication operator by a coefficient-ring element."""
        return cls({(0, 0, 0): Coeff.coerce(f)})

    @classmethod
    def partial(cls, i: int, n: int = 1) -> "DiffOp":
        beta = [0, 0, 0]
        beta[i] = n
        return cls({tuple(beta): Coeff.const(1)})

    @classmethod
    def coerce(cls, v) -> "DiffOp":
        if isinstance(v, DiffOp):
            return v
        return cls.mult(v)

    @property
    def order(self) -> int:
        """Order of the operator; ``-1`` for the zero operator."""
        return max((sum(b) for b in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def part_of_order(self, n: int) -> "DiffOp":
        return DiffOp({b: c for b, c in self.terms.items() if sum(b) == n})

    def __add__(self, other):
        o = DiffOp.coerce(other)
        acc = dict(self.terms)
        for b, c in o.terms.items():
            s = acc.get(b)
            s = c if s is None else s + c
            if s:
                acc[b] = s
            else:
                acc.pop(b, None)
        return DiffOp(acc)

    __radd__ = __add__

    def __neg__(self):
        return DiffOp({b: -c for b, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-DiffOp.coerce(other))

    def __rsub__(self, other):
        return DiffOp.coerce(other) - self

    def scale(self, c) -> "DiffOp":
        return DiffOp({b: v.scale(c) for b, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (GaussRational, int, Fraction)):
            return self.scale(other)
        return multiply(self, DiffOp.coerce(other))

    def __rmul__(self, other):
        if isinstance(other, (GaussRational, int, Fraction)):
            return self.scale(other)
        return multiply(DiffOp.coerce(other), self)

    def __pow__(self, n: int):
        out = DiffOp.identity()
        for _ in range(n):
            out = out * self
        return out

    def apply(self, f) -> Coeff:
        """Act on a coefficient-ring element viewed as a function."""
        f = Coeff.coerce(f)
        out = Coeff()
        for beta, c in self.terms.items():
            out = out + c * f.deriv_multi(beta)
        return out

    def conjugate_coeffs(self) -> "DiffOp":
        return DiffOp({b: c.conjugate() for b, c in self.terms.items()})

    def __eq__(self, other):
        try:
            o = DiffOp.coerce(other)
        except TypeError:
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash(frozenset(self.terms.items()))
            object.__setattr__(self, "_hash", h)
        return h

    def pretty(self) -> str:
        """Deterministic rendering: graded lex on d, then x, then r descending."""
        if not self.terms:
            return "0"
        lines = []
        for beta in sorted(self.terms, key=lambda b: (-sum(b), tuple(-x for x in b))):
            d = []
            for name, p in (("d1", beta[0]), ("d2", beta[1]), ("d3", beta[2])):
                if p == 1:
                    d.append(name)
                elif p > 1:
                    d.append(f"{name}^{p}")
            dpart = "*".join(d) if d else "1"
            lines.append(f"[{self.terms[beta]}] {dpart}")
        return "\n".join(lines)

    def __repr__(self):
        return "DiffOp(" + self.pretty().replace("\n", " + ") + ")"

    __str__ = pretty


def _subindices(alpha: Multi):
    return product(*(range(a + 1) for a in alpha))


def multiply(A: DiffOp, B: DiffOp) -> DiffOp:
    """Normal-ordered composition ``A o B`` by the multi-index Leibniz rule."""
    acc: Dict[Multi, Coeff] = {}
    for alpha, a in A.terms.items():
        for beta, b in B.terms.items():
            for g in _subindices(alpha):
                db = b.deriv_multi(g)
                if not db:
                    continue
                w = comb(alpha[0], g[0]) * comb(alpha[1], g[1]) * comb(alpha[2], g[2])
                key = (alpha[0] - g[0] + beta[0], alpha[1] - g[1] + beta[1], alpha[2] - g[2] + beta[2])
                term = (a * db).scale(w)
                cur = acc.get(key)
                acc[key] = term if cur is None else cur + term
    return DiffOp(acc)


def commutator(A: DiffOp, B: DiffOp) -> DiffOp:
    return multiply(A, B) - multiply(B, A)


def _gamma(gamma) -> GaussRational:
    g = GaussRational.coerce(gamma)
    if not g.is_real() or g.re <= 0:
        raise ValueError("gamma must be positive")
    return g


@lru_cache(maxsize=16)
def build_generators(gamma=1) -> Dict[str, DiffOp]:
    """The rescaled Schrodinger operator, rotations and Runge-Lenz operators.

    Returns a dict with keys ``T, L1, L2, L3, R1, R2, R3``.
    """
    g = _gamma(gamma)
    x = [DiffOp.mult(Coeff.x(i)) for i in range(3)]
    d = [DiffOp.partial(i) for i in range(3)]
    lap = d[0] * d[0] + d[1] * d[1] + d[2] * d[2]
    T = -lap - DiffOp.mult(Coeff.r(-1).scale(2 * g))
    L1 = x[1] * d[2] - x[2] * d[1]
    L2 = x[2] * d[0] - x[0] * d[2]
    L3 = x[0] * d[1] - x[1] * d[0]

    def pot(i):
        return DiffOp.mult((Coeff.x(i) * Coeff.r(-1)).scale(g))

    R1 = (L3 * d[1] - L2 * d[2] - d[0] + pot(0)).scale(I)
    R2 = (L1 * d[2] - L3 * d[0] - d[1] + pot(1)).scale(I)
    R3 = (L2 * d[0] - L1 * d[1] - d[2] + pot(2)).scale(I)
    return {"T": T, "L1": L1, "L2": L2, "L3": L3, "R1": R1, "R2": R2, "R3": R3}


def formal_adjoint(A: DiffOp) -> DiffOp:
    """Formal adjoint for the Lebesgue inner product: (f d^b)* = (-1)^|b| d^b o conj(f)."""
    out = DiffOp()
    for beta, c in A.terms.items():
        term = multiply(DiffOp({beta: Coeff.const(1)}), DiffOp.mult(c.conjugate()))
        out = out + (term if sum(beta) % 2 == 0 else -term)
    return out


def sigma(A: DiffOp) -> DiffOp:
    """Real structure X -> -X*."""
    return -formal_adjoint(A)


def sigma_prime(A: DiffOp) -> DiffOp:
    """Complex conjugation of every coefficient."""
    return A.conjugate_coeffs()


def theta(A: DiffOp) -> DiffOp:
    """Cartan involution, the composite of the two conjugations."""
    return sigma(sigma_prime(A))


def _entry(name: str, residual: DiffOp) -> dict:
    return {"id": name, "residual": residual, "pass": residual.is_zero()}


def verify_structure_constants(gamma=1) -> list:
    """Check every bracket among T, L_i, R_i against the expected table.

    Returns one record per identity with keys ``id``, ``residual`` (a DiffOp)
    and ``pass``.
    """
    G = build_generators(gamma)
    T = G["T"]
    L = [G["L1"], G["L2"], G["L3"]]
    R = [G["R1"], G["R2"], G["R3"]]

    def lin(ops, coeffs):
        out = DiffOp()
        for op, c in zip(ops, coeffs):
            if c:
                out = out + op.scale(c)
        return out

    report = []
    for i in range(3):
        for j in range(3):
            eps = [levi_civita(i, j, k) for k in range(3)]
            report.append(_entry(
                f"[L{i+1},L{j+1}] = -eps L",
                commutator(L[i], L[j]) + lin(L, eps)))
            report.append(_entry(
                f"[R{i+1},R{j+1}] = eps T L",
                commutator(R[i], R[j]) - T * lin(L, eps)))
            report.append(_entry(
                f"[L{i+1},R{j+1}] = -eps R",
                commutator(L[i], R[j]) + lin(R, eps)))
    for i in range(3):
        report.append(_entry(f"[T,L{i+1}] = 0", commutator(T, L[i])))
        report.append(_entry(f"[T,R{i+1}] = 0", commutator(T, R[i])))
    return report


def casimir_values(gamma=1) -> tuple[DiffOp, DiffOp]:
    """Residuals ``RL`` and ``T L^2 - R^2 - (T + gamma^2)``; both should vanish."""
    g = _gamma(gamma)
    G = build_generators(gamma)
    T = G["T"]
    L = [G["L1"], G["L2"], G["L3"]]
    R = [G["R1"], G["R2"], G["R3"]]
    RL = R[0] * L[0] + R[1] * L[1] + R[2] * L[2]
    L2 = L[0] * L[0] + L[1] * L[1] + L[2] * L[2]
    R2 = R[0] * R[0] + R[1] * R[1] + R[2] * R[2]
    second = T * L2 - R2 - T - DiffOp.mult(Coeff.const(g * g))
    return RL, second


def order2_centralizer_basis(gamma=1) -> Dict[str, DiffOp]:
    """The listed spanning set of the order-two part of the centralizer of T."""
    G = build_generators(gamma)
    L1, L2, L3 = G["L1"], G["L2"], G["L3"]
    out = {"I": DiffOp.identity(), "T": G["T"]}
    for name in ("L1", "L2", "L3", "R1", "R2", "R3"):
        out[name] = G[name]
    out["L^2"] = L1 * L1 + L2 * L2 + L3 * L3
    out["L1L2+L2L1"] = L1 * L2 + L2 * L1
    out["L1L3+L3L1"] = L1 * L3 + L3 * L1
    out["L2L3+L3L2"] = L2 * L3 + L3 * L2
    out["L1^2-L2^2"] = L1 * L1 - L2 * L2
    out["L2^2-L3^2"] = L2 * L2 - L3 * L3
    return out


def centralizer_order2_check(gamma=1) -> list:
    """[T, X] = 0 for each listed spanning operator, plus an x1 negative control."""
    T = build_generators(gamma)["T"]
    report = []
    for name, X in order2_centralizer_basis(gamma).items():
        report.append(_entry(f"[T,{name}] = 0", commutator(T, X)))
    ctrl = commutator(T, DiffOp.mult(Coeff.x(0)))
    report.append({"id": "[T,x1] != 0 (control)", "residual": ctrl, "pass": not ctrl.is_zero()})
    return report


def involution_checks(gamma=1) -> list:
    """sigma fixes L_i, R_i, T; theta fixes L_i and negates R_i."""
    G = build_generators(gamma)
    report = []
    for name in ("L1", "L2", "L3", "R1", "R2", "R3"):
        X = G[name]
        report.append(_entry(f"sigma({name}) = {name}", sigma(X) - X))
        sign = 1 if name[0] == "L" else -1
        report.append(_entry(f"theta({name}) = {'+' if sign > 0 else '-'}{name}",
                             theta(X) - X.scale(sign)))
    T = G["T"]
    report.append(_entry("T* = T", formal_adjoint(T) - T))
    return report
