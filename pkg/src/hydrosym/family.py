"""Intertwiner between singular and regular solution families; Jantzen analysis.

The intertwiner acts on the ``l``-th K-type by the polynomial

    A_l(lam) = prod_{n=1}^{l} (lam n^2 + gamma^2),    A_0 = 1,

with the unspecified per-K-type constants normalized to 1. At a real base
point ``lam0`` the K-type ``l`` sits in Jantzen layer ``p = ord_{lam0} A_l``
and the invariant Hermitian form on that layer has sign
``sgn [(lam - lam0)^(-p) A_l](lam0)`` on it. Signs are normalized so the
lowest K-type of each layer is positive.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence

from .exactalg import GaussRational, PolyLambda, format_rational, linear_product, poly_eval, vanishing_order

__all__ = [
    "IntertwinerDiag",
    "JantzenLayer",
    "JantzenReport",
    "SpectrumReport",
    "build_intertwiner",
    "jantzen",
    "midpoint_probes",
    "recover_spectrum",
    "physsol_descriptor",
]


def _rational(x) -> Fraction:
    if isinstance(x, GaussRational):
        if not x.is_real():
            raise ValueError("base point must be real: Hermitian forms need the real structure")
        return x.re
    if isinstance(x, str):
        g = GaussRational.parse(x)
        return _rational(g)
    if isinstance(x, (float, complex)):
        raise TypeError("exact rational required")
    return Fraction(x)


def _gamma(gamma) -> Fraction:
    g = _rational(gamma)
    if g <= 0:
        raise ValueError("gamma must be positive")
    return g


@dataclass(frozen=True)
class IntertwinerDiag:
    gamma: Fraction
    ell_max: int
    polys: tuple

    def __getitem__(self, ell: int) -> PolyLambda:
        return self.polys[ell]

    def ratio_factor(self, ell: int) -> PolyLambda:
        """``A_{l+1} / A_l = lam (l+1)^2 + gamma^2``."""
        return PolyLambda([self.gamma**2, (ell + 1) ** 2])


def build_intertwiner(gamma=1, ell_max: int = 8) -> IntertwinerDiag:
    if ell_max < 1:
        raise ValueError("ell_max must be at least 1")
    g = _gamma(gamma)
    polys = tuple(linear_product([(n * n, g * g) for n in range(1, ell + 1)])
                  for ell in range(ell_max + 1))
    return IntertwinerDiag(g, ell_max, polys)


@dataclass
class JantzenLayer:
    p: int
    k_types: List[int]
    form_signs: List[int]

    @property
    def definite(self) -> bool:
        return all(s > 0 for s in self.form_signs)

    @property
    def dimension(self) -> int:
        return sum(2 * ell + 1 for ell in self.k_types)


@dataclass
class JantzenReport:
    """Layers of the Jantzen filtration at ``lam0`` for K-types ``0..ell_max``.

    The top layer is truncated at ``ell_max``; a layer containing
    ``ell_max`` is reported as ``open`` (infinite-dimensional).
    """

    lam0: Fraction
    gamma: Fraction
    ell_max: int
    layers: List[JantzenLayer]
    sign_convention: str = "lowest K-type of each layer has sign +"

    def layer(self, p: int) -> Optional[JantzenLayer]:
        return next((L for L in self.layers if L.p == p), None)

    def is_open(self, layer: JantzenLayer) -> bool:
        return self.ell_max in layer.k_types

    @property
    def unitary_quotient(self):
        """(p, dimension) of a definite finite layer, or (p, "infinite"), or None."""
        for L in self.layers:
            if L.definite:
                return (L.p, "infinite" if self.is_open(L) else L.dimension)
        return None

    @property
    def has_definite_layer(self) -> bool:
        return self.unitary_quotient is not None


def _sign(q: Fraction) -> int:
    return 1 if q > 0 else -1


def jantzen(gamma, lam0, ell_max: int = 12) -> JantzenReport:
    """Jantzen layers and Hermitian-form signs at a rational base point."""
    g = _gamma(gamma)
    lam0 = _rational(lam0)
    A = build_intertwiner(g, ell_max)
    by_p = {}
    for ell in range(ell_max + 1):
        poly = A[ell]
        p = vanishing_order(poly, lam0)
        q = poly
        for _ in range(p):
            q, rem = q.divide_linear(lam0)
        lead = poly_eval(q, lam0)
        by_p.setdefault(p, []).append((ell, _sign(lead.re)))
    layers = []
    for p in sorted(by_p):
        entries = by_p[p]
        base = entries[0][1]
        layers.append(JantzenLayer(p, [e for e, _ in entries], [s * base for _, s in entries]))
    return JantzenReport(lam0, g, ell_max, layers)


def midpoint_probes(gamma, n_max: int) -> List[Fraction]:
    """``-gamma^2 (2n^2+2n+1) / (2 n^2 (n+1)^2)``, the midpoints of consecutive eigenvalues."""
    g = _gamma(gamma)
    return [-g * g * Fraction(2 * n * n + 2 * n + 1, 2 * n * n * (n + 1) ** 2) for n in range(1, n_max + 1)]


@dataclass
class SpectrumReport:
    gamma: Fraction
    discrete: List[Fraction]
    dimensions: List[int]
    k_types: List[List[int]]
    continuous_verified_at: List[Fraction]
    probes: List[dict] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "gamma": format_rational(self.gamma),
            "discrete": [format_rational(x) for x in self.discrete],
            "dimensions": self.dimensions,
            "k_types": self.k_types,
            "continuous_verified_at": [format_rational(x) for x in self.continuous_verified_at],
            "probes": self.probes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SpectrumReport":
        d = json.loads(text)
        return cls(
            Fraction(d["gamma"]),
            [Fraction(x) for x in d["discrete"]],
            list(d["dimensions"]),
            [list(k) for k in d["k_types"]],
            [Fraction(x) for x in d["continuous_verified_at"]],
            list(d["probes"]),
        )


def recover_spectrum(gamma=1, n_max: int = 4, lam_probe_grid: Sequence = (Fraction(1, 4), 1, 3),
                     ell_max: Optional[int] = None) -> SpectrumReport:
    """Eigenvalues detected as base points with a finite definite Jantzen quotient.

    Candidates are the zeros ``-gamma^2/n^2`` of the factors of ``A_l``;
    nonnegative probes and the negative midpoints are reported separately.
    """
    g = _gamma(gamma)
    ell_max = ell_max if ell_max is not None else n_max + 4
    discrete, dims, ktypes = [], [], []
    for n in range(1, n_max + 1):
        lam0 = -g * g / (n * n)
        rep = jantzen(g, lam0, ell_max)
        uq = rep.unitary_quotient
        if uq is not None and uq[1] != "infinite":
            discrete.append(lam0)
            dims.append(uq[1])
            ktypes.append(rep.layer(uq[0]).k_types)
    probes = []
    cont = []
    for lam in list(lam_probe_grid) + midpoint_probes(g, n_max):
        lam = _rational(lam)
        rep = jantzen(g, lam, ell_max)
        verdict = rep.has_definite_layer
        probes.append({"lambda": format_rational(lam), "definite": verdict})
        if lam >= 0 and verdict:
            cont.append(lam)
    return SpectrumReport(g, discrete, dims, ktypes, cont, probes)


def physsol_descriptor(gamma, lam0):
    """(dimension or "infinite", K-types) of the physical solution space at ``lam0``.

    For ``lam0 >= 0`` the K-type list is open-ended and is returned as the
    string ``"all"``.

    Raises
    ------
    ValueError
        If ``lam0`` is not in the spectrum.
    """
    g = _gamma(gamma)
    lam0 = _rational(lam0)
    if lam0 >= 0:
        return "infinite", "all"
    n2 = g * g / (-lam0)
    if n2.denominator != 1:
        raise ValueError(f"{format_rational(lam0)} is not in the spectrum")
    n = int(round(n2.numerator ** 0.5))
    if n * n != n2.numerator:
        raise ValueError(f"{format_rational(lam0)} is not in the spectrum")
    return n * n, list(range(n))
