"""Spherical harmonics and the action of the symmetry operators on product solutions.

A product solution ``psi = R(r) Y_lm`` is stored as ``R(r) * Q(x)`` where
``Q = N_lm * P_lm(x) * r^(-l)`` and ``P_lm`` is the exact solid harmonic
polynomial (Condon-Shortley phase). Applying a differential operator keeps
this shape: the result is ``sum_k R^(k)(r) Q_k(x)`` with exact ring elements
``Q_k``, built from

    d_i (R^(k) Q) = R^(k+1) (x_i / r) Q + R^(k) d_i Q.

Only the final evaluation on a sphere grid is numerical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Tuple

import numpy as np

from .diffop import Coeff, DiffOp, build_generators, theta
from .exactalg import GaussRational, I
from .radial import RadialSolution, regular_solution, singular_solution

__all__ = [
    "GridTooCoarseError",
    "SphericalHarmonic",
    "SphereQuadrature",
    "ProductEigenfunction",
    "spherical_harmonic",
    "sphere_quadrature",
    "radial_derivative_op",
    "lowering_runge_lenz",
    "apply_form",
    "apply_runge_lenz",
    "CouplingFit",
    "coupling_fit",
    "coupling_coefficients",
    "predicted_lowering_couplings",
    "wronskian_form",
    "twisted_equivariance_defect",
]


class GridTooCoarseError(ArithmeticError):
    """Sphere projection leaked outside the expected isotypes."""


def _legendre_coeffs(ell: int) -> list[Fraction]:
    """Coefficients of P_l(t), index = power of t."""
    out = [Fraction(0)] * (ell + 1)
    for k in range(ell // 2 + 1):
        out[ell - 2 * k] = Fraction((-1) ** k * math.comb(ell, k) * math.comb(2 * ell - 2 * k, ell), 2**ell)
    return out


@lru_cache(maxsize=None)
def _solid_polynomial(ell: int, m: int) -> Coeff:
    """Exact ``P_lm`` with ``r^l Y_lm = N_lm P_lm`` (Condon-Shortley phase)."""
    am = abs(m)
    q = _legendre_coeffs(ell)
    for _ in range(am):
        q = [j * q[j] for j in range(1, len(q))]
    # r^(l-m) q(z/r) is a polynomial in z and r^2
    poly = Coeff()
    for j, c in enumerate(q):
        if c:
            rpow = ell - am - j
            poly = poly + (Coeff.x(2) ** j * Coeff.r(rpow)).scale(c)
    xy = Coeff.x(0) + Coeff.x(1).scale(I)
    P = (xy ** am * poly).scale((-1) ** am)
    if m < 0:
        P = P.conjugate().scale((-1) ** am)
    return P


@dataclass(frozen=True)
class SphericalHarmonic:
    """Orthonormal complex harmonic ``Y_lm`` with Condon-Shortley phase."""

    ell: int
    m: int

    def __post_init__(self):
        if self.ell < 0 or abs(self.m) > self.ell:
            raise ValueError("need l >= 0 and |m| <= l")

    @property
    def norm(self) -> float:
        am = abs(self.m)
        return math.sqrt((2 * self.ell + 1) / (4 * math.pi)
                         * math.factorial(self.ell - am) / math.factorial(self.ell + am))

    @property
    def solid(self) -> Coeff:
        return _solid_polynomial(self.ell, self.m)

    def on_points(self, xyz: np.ndarray) -> np.ndarray:
        """Values at unit vectors, shape (n, 3)."""
        return self.norm * self.solid(xyz[:, 0], xyz[:, 1], xyz[:, 2])

    def __call__(self, theta, phi):
        theta = np.asarray(theta, dtype=float)
        phi = np.asarray(phi, dtype=float)
        st = np.sin(theta)
        return self.norm * self.solid(st * np.cos(phi), st * np.sin(phi), np.cos(theta))


def spherical_harmonic(ell: int, m: int) -> SphericalHarmonic:
    return SphericalHarmonic(ell, m)


@dataclass(frozen=True)
class SphereQuadrature:
    """Gauss-Legendre in cos(theta) times the trapezoid rule in phi.

    With ``L + 2`` and ``2L + 3`` nodes it integrates every product of two
    harmonics of degree at most ``L`` exactly.
    """

    L: int
    points: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    def integrate(self, values: np.ndarray) -> complex:
        return complex(np.dot(self.weights, values))


@lru_cache(maxsize=64)
def sphere_quadrature(L: int) -> SphereQuadrature:
    t, wt = np.polynomial.legendre.leggauss(L + 2)
    nphi = 2 * L + 3
    phi = 2 * np.pi * np.arange(nphi) / nphi
    T, PHI = np.meshgrid(t, phi, indexing="ij")
    S = np.sqrt(1 - T**2)
    pts = np.stack([S * np.cos(PHI), S * np.sin(PHI), T], axis=-1).reshape(-1, 3)
    w = (wt[:, None] * np.full(nphi, 2 * np.pi / nphi)[None, :]).ravel()
    pts.setflags(write=False)
    w.setflags(write=False)
    return SphereQuadrature(L, pts, w)


@lru_cache(maxsize=4096)
def _partial_form(form: Tuple[Tuple[int, Coeff], ...], i: int) -> Tuple[Tuple[int, Coeff], ...]:
    xr = Coeff.x(i) * Coeff.r(-1)
    acc: Dict[int, Coeff] = {}
    for k, Q in form:
        acc[k + 1] = acc.get(k + 1, Coeff()) + xr * Q
        acc[k] = acc.get(k, Coeff()) + Q.deriv(i)
    return tuple(sorted((k, Q) for k, Q in acc.items() if Q))


@lru_cache(maxsize=1024)
def apply_form(op: DiffOp, Q0: Coeff) -> Tuple[Tuple[int, Coeff], ...]:
    """``op(R(r) Q0) = sum_k R^(k)(r) Q_k``; returns the exact pairs (k, Q_k)."""
    base = ((0, Q0),)
    memo = {(0, 0, 0): base}

    def d(beta):
        if beta in memo:
            return memo[beta]
        i = next(j for j in range(3) if beta[j])
        prev = list(beta)
        prev[i] -= 1
        memo[beta] = _partial_form(d(tuple(prev)), i)
        return memo[beta]

    acc: Dict[int, Coeff] = {}
    for beta, c in op.terms.items():
        for k, Q in d(beta):
            acc[k] = acc.get(k, Coeff()) + c * Q
    return tuple(sorted((k, Q) for k, Q in acc.items() if Q))


def radial_derivative_op() -> DiffOp:
    """``d/dr = sum_i (x_i / r) d_i`` as an exact operator."""
    out = DiffOp()
    for i in range(3):
        out = out + DiffOp({tuple(int(j == i) for j in range(3)): Coeff.x(i) * Coeff.r(-1)})
    return out


@lru_cache(maxsize=16)
def lowering_runge_lenz(gamma=1) -> DiffOp:
    """``R_- = -i R_1 - R_2``."""
    G = build_generators(gamma)
    return G["R1"].scale(-I) - G["R2"]


def _exact_gamma(gamma) -> GaussRational:
    if isinstance(gamma, float):
        gamma = Fraction(gamma).limit_denominator(10**9)
    return GaussRational.coerce(gamma)


class ProductEigenfunction:
    """``psi = radial(r) * Y_lm``, an eigenfunction of T on R^3 minus the origin."""

    def __init__(self, radial: RadialSolution, m: int, gamma_exact=None):
        self.radial = radial
        self.harmonic = SphericalHarmonic(radial.ell, m)
        self.gamma_exact = _exact_gamma(gamma_exact if gamma_exact is not None else radial.gamma)
        if abs(complex(self.gamma_exact) - radial.gamma) > 1e-12 * radial.gamma:
            raise ValueError("exact and floating gamma disagree")

    @classmethod
    def regular(cls, ell, m, lam, gamma=1):
        return cls(regular_solution(ell, lam, float(Fraction(gamma))), m, gamma)

    @classmethod
    def singular(cls, ell, m, lam, gamma=1):
        return cls(singular_solution(ell, lam, float(Fraction(gamma))), m, gamma)

    @property
    def ell(self):
        return self.radial.ell

    @property
    def m(self):
        return self.harmonic.m

    @property
    def lam(self):
        return self.radial.lam

    @property
    def angular_factor(self) -> Coeff:
        """Exact ``P_lm r^(-l)``; the float normalization is applied at evaluation."""
        return self.harmonic.solid * Coeff.r(-self.ell)

    def evaluate_op(self, op: DiffOp, points: np.ndarray) -> np.ndarray:
        """Values of ``op psi`` at points of shape (n, 3), all on one sphere."""
        r = np.linalg.norm(points, axis=1)
        if not np.allclose(r, r[0], rtol=1e-13):
            raise ValueError("points must lie on a single sphere")
        r0 = float(r[0])
        out = np.zeros(len(points), dtype=complex)
        for k, Q in apply_form(op, self.angular_factor):
            out += self.radial.derivative(r0, k) * Q(points[:, 0], points[:, 1], points[:, 2])
        return self.harmonic.norm * out

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return self.evaluate_op(DiffOp.identity(), points)

    def eigen_residual(self, r_samples, L=None) -> float:
        """Max |(T - lam) psi| / max |psi| over sphere grids at the given radii."""
        T = build_generators(self.gamma_exact)["T"]
        quad = sphere_quadrature(L or self.ell + 2)
        worst = 0.0
        for r in np.atleast_1d(r_samples):
            pts = r * quad.points
            val = self(pts)
            res = self.evaluate_op(T, pts) - self.lam * val
            worst = max(worst, float(np.max(np.abs(res)) / np.max(np.abs(val))))
        return worst


def _project(quad: SphereQuadrature, values: np.ndarray, lmax: int) -> Dict[Tuple[int, int], complex]:
    out = {}
    for ell in range(lmax + 1):
        for m in range(-ell, ell + 1):
            Y = SphericalHarmonic(ell, m).on_points(quad.points)
            out[(ell, m)] = quad.integrate(np.conj(Y) * values)
    return out


def _resolve_op(op, gamma) -> DiffOp:
    if isinstance(op, DiffOp):
        return op
    if op in ("R-", "R_-", "Rminus"):
        return lowering_runge_lenz(gamma)
    return build_generators(gamma)[op]


def apply_runge_lenz(op, psi: ProductEigenfunction, r_samples, tol: float = 1e-10):
    """Isotypic radial profiles of ``op psi``.

    Parameters
    ----------
    op : {"R1", "R2", "R3", "R-"} or DiffOp
    psi : ProductEigenfunction
    r_samples : array_like
        Radii at which to sample.
    tol : float
        Relative bound on leakage into ``l' != l +- 1`` and on the part of
        the sampled function not captured by the projection.

    Returns
    -------
    dict
        ``{l': {m': ndarray over r_samples}}`` for ``l' in {l-1, l+1}``.

    Raises
    ------
    GridTooCoarseError
        If leakage or the unprojected remainder exceeds ``tol``.
    """
    D = _resolve_op(op, psi.gamma_exact)
    ell = psi.ell
    lmax = ell + 3
    quad = sphere_quadrature(lmax + 2)
    r_samples = np.atleast_1d(np.asarray(r_samples, dtype=float))
    profiles: Dict[int, Dict[int, list]] = {}
    for r in r_samples:
        vals = psi.evaluate_op(D, r * quad.points)
        proj = _project(quad, vals, lmax)
        total = quad.integrate(np.abs(vals) ** 2).real
        captured = sum(abs(c) ** 2 for c in proj.values())
        scale = max(total, 1e-300)
        leak = sum(abs(c) ** 2 for (lp, _), c in proj.items() if abs(lp - ell) != 1)
        if leak > tol**2 * scale or abs(total - captured) > max(tol, 1e-12) * scale:
            raise GridTooCoarseError(
                f"projection at r={r} leaks {math.sqrt(leak / scale):.2e}; "
                f"use a finer sphere grid than L={quad.L}")
        for (lp, mp), c in proj.items():
            if abs(lp - ell) == 1:
                profiles.setdefault(lp, {}).setdefault(mp, []).append(c)
    return {lp: {mp: np.array(v) for mp, v in d.items()} for lp, d in profiles.items()}


def predicted_lowering_couplings(ell: int, lam, gamma) -> Tuple[float, complex]:
    """Coefficients (down, up) of ``R_- (F_l Y_ll)`` on ``F_{l-1} Y_{l-1,l-1}`` and ``F_{l+1} Y_{l+1,l-1}``."""
    down = math.sqrt(2 * ell * (2 * ell + 1)) * ell
    up = (-math.sqrt(2) / math.sqrt((2 * ell + 3) * (2 * ell + 1))
          * (gamma**2 + complex(lam) * (ell + 1) ** 2) / ((ell + 1) * (2 * ell + 3)))
    return down, up


@dataclass
class CouplingFit:
    """Least-squares fit of a projected profile against radial basis solutions.

    ``up``/``down`` are the coefficients of the same-family basis solution
    (F for regular input, G for singular input); ``up_regular_part`` is the
    fitted F-component for singular input, which depends on the normalization
    of G and carries no invariant meaning.
    """

    family: str
    ell: int
    lam: complex
    up: complex
    down: complex
    up_regular_part: complex
    down_regular_part: complex
    residual: float
    condition: float


def _fit(profile, bases, r):
    A = np.column_stack([b.value(r) for b in bases])
    coef, *_ = np.linalg.lstsq(A, profile, rcond=None)
    res = float(np.max(np.abs(A @ coef - profile)) / np.max(np.abs(profile)))
    return coef, res, float(np.linalg.cond(A))


def coupling_fit(family: str, ell: int, lam, gamma=1, r_samples=None, tol: float = 1e-8) -> CouplingFit:
    """Measure the couplings of ``R_-`` applied to ``psi_{l,l}`` of the given family.

    Raises
    ------
    ValueError
        If ``lam`` is within ``1e-8`` of the reducibility set for ``n <= l+1``,
        or the fit residual exceeds ``tol``.
    """
    g = float(Fraction(gamma)) if not isinstance(gamma, float) else gamma
    lam = complex(lam)
    for n in range(1, ell + 2):
        if abs(lam * n * n + g * g) < 1e-8:
            raise ValueError(f"lam={lam} is at a reducibility point (n={n})")
    if r_samples is None:
        r_samples = np.linspace(0.6, 2.4, 10)
    r_samples = np.asarray(r_samples, dtype=float)
    if family == "regular":
        psi = ProductEigenfunction.regular(ell, ell, lam, gamma)
    elif family == "singular":
        psi = ProductEigenfunction.singular(ell, ell, lam, gamma)
    else:
        raise ValueError("family must be 'regular' or 'singular'")
    prof = apply_runge_lenz("R-", psi, r_samples)

    def basis(target):
        F = regular_solution(target, lam, g)
        if family == "regular":
            return [F]
        return [singular_solution(target, lam, g), F]

    coef_up, res_up, cond_up = _fit(prof[ell + 1][ell - 1], basis(ell + 1), r_samples)
    down = down_reg = 0j
    res_dn, cond_dn = 0.0, 1.0
    if ell >= 1:
        coef_dn, res_dn, cond_dn = _fit(prof[ell - 1][ell - 1], basis(ell - 1), r_samples)
        down = coef_dn[0]
        down_reg = coef_dn[1] if len(coef_dn) > 1 else 0j
    residual = max(res_up, res_dn)
    if residual > tol:
        raise ValueError(f"coupling fit residual {residual:.2e} above {tol:.1e}; "
                         "try at least 8 radii inside the series-safe range")
    return CouplingFit(family, ell, lam, complex(coef_up[0]), complex(down),
                       complex(coef_up[1]) if len(coef_up) > 1 else 0j, complex(down_reg),
                       residual, max(cond_up, cond_dn))


def coupling_coefficients(family: str, ell: int, lam, gamma=1, r_samples=None) -> Tuple[complex, complex]:
    """(up, down) couplings of ``R_-`` on ``psi_{l,l}``; see :func:`coupling_fit`."""
    fit = coupling_fit(family, ell, lam, gamma, r_samples)
    return fit.up, fit.down


def wronskian_form(phi: ProductEigenfunction, psi: ProductEigenfunction, r: float,
                   phi_op: DiffOp | None = None, psi_op: DiffOp | None = None) -> complex:
    """Sphere-averaged ``r^2 (d_r A * B - A * d_r B)`` with ``A = phi_op phi``, ``B = psi_op psi``.

    The pairing is bilinear (no complex conjugation).
    """
    Id = DiffOp.identity()
    A_op = phi_op if phi_op is not None else Id
    B_op = psi_op if psi_op is not None else Id
    Dr = radial_derivative_op()
    L = max(phi.ell, psi.ell) + 3
    quad = sphere_quadrature(L)
    pts = r * quad.points
    A = phi.evaluate_op(A_op, pts)
    Ar = phi.evaluate_op(Dr * A_op, pts)
    B = psi.evaluate_op(B_op, pts)
    Br = psi.evaluate_op(Dr * B_op, pts)
    return quad.integrate(r * r * (Ar * B - A * Br)) / (4 * np.pi)


def twisted_equivariance_defect(X: str, phi: ProductEigenfunction, psi: ProductEigenfunction,
                                r_samples=(0.7, 1.3)) -> Tuple[float, complex]:
    """``max_r |Wr(X phi, psi) + Wr(phi, theta(X) psi)|`` and the first term's value."""
    G = build_generators(phi.gamma_exact)
    Xop = G[X]
    tX = theta(Xop)
    worst = 0.0
    first = 0j
    for r in r_samples:
        a = wronskian_form(phi, psi, r, phi_op=Xop)
        b = wronskian_form(phi, psi, r, psi_op=tX)
        worst = max(worst, abs(a + b))
        first = a
    return worst, first
