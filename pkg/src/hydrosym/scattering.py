"""Spherical scattering theory for the Coulomb problem.

Everything here lives on the ``l = 0`` component. With ``u = r U`` the
eigen-equation becomes ``u'' + (k^2 + 2 gamma / r) u = 0``. The Kodaira
solution ``U_k`` is fixed by its outgoing asymptotics

    U_k(r) ~ r^(-1) exp(i (k r + (gamma/k) log r)),    Im k >= 0,

and ``a(k) = Wr(F, U_k)`` plays the role of a Jost function: its zeros on the
positive imaginary axis are the bound states and ``|a(sqrt(lam))|^2`` gives
the spectral density of the continuum.
"""

from __future__ import annotations

import cmath
import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .radial import regular_solution, wronskian_spread

__all__ = [
    "ScatteringError",
    "asymptotic_coefficients",
    "KodairaSolution",
    "kodaira_solution",
    "jost_a",
    "spectral_density",
    "density_shape",
    "DensityFit",
    "fit_density",
    "LimitingAbsorption",
    "limiting_absorption",
    "Bump",
    "Resolvent",
    "greens_apply",
    "regular_profile",
    "bound_state_profile",
    "bound_state_norm",
    "SpectralProjector",
    "spectral_projection",
    "projection_checks",
    "completeness",
    "ScatteringData",
    "scattering_data",
]

K_MIN_FACTOR = 0.05
RTOL = 1e-10
ATOL = 1e-13
MAX_ASYMPTOTIC_ORDER = 12


class ScatteringError(ArithmeticError):
    """A scattering computation is outside its validated range."""


def asymptotic_coefficients(k: complex, gamma: float, J: int) -> np.ndarray:
    """``b_0..b_J`` of ``exp(i(kr + eta log r)) sum_j b_j r^-j``, ``eta = gamma/k``.

    ``b_{j+1} = (j - i eta)(j + 1 - i eta) / (2 i k (j+1)) b_j``; the series
    terminates when ``i eta`` is a positive integer (bound states).
    """
    eta = gamma / k
    b = [1 + 0j]
    for j in range(J):
        b.append((j - 1j * eta) * (j + 1 - 1j * eta) / (2j * k * (j + 1)) * b[-1])
    return np.array(b)


def _choose_matching(k, gamma, tol=1e-12, r_floor=2.0):
    b = asymptotic_coefficients(k, gamma, MAX_ASYMPTOTIC_ORDER + 1)
    best = None
    for J in range(MAX_ASYMPTOTIC_ORDER + 1):
        nxt = abs(b[J + 1])
        ratios = [abs(b[j + 1] / b[j]) for j in range(J) if b[j] != 0]
        if nxt == 0:
            r0 = max([r_floor] + ratios)
        else:
            r0 = max([r_floor, (nxt / tol) ** (1.0 / (J + 1))] + ratios)
        if best is None or r0 < best[0]:
            best = (r0, J)
        if nxt == 0:
            break
    r0, J = best
    return r0, J, b[: J + 1]


class KodairaSolution:
    """Outgoing eigenfunction ``U_k`` with value and derivative queries.

    Seeded at ``r0`` by the asymptotic series and integrated inward with an
    adaptive embedded Runge-Kutta method (scipy DOP853) to ``r_min``.
    """

    def __init__(self, k: complex, gamma: float = 1.0, r_min: float = 0.05, tol: float = 1e-12):
        k = complex(k)
        gamma = float(gamma)
        if gamma <= 0:
            raise ValueError("gamma must be positive")
        if k.imag < -1e-14 * abs(k):
            raise ValueError("need Im k >= 0")
        if abs(k) < K_MIN_FACTOR * gamma:
            raise ScatteringError(f"|k| = {abs(k):.3g} below k_min = {K_MIN_FACTOR * gamma:.3g}")
        self.k = k
        self.gamma = gamma
        self.eta = gamma / k
        self.r_min = float(r_min)
        self.r0, self.order, self.b = _choose_matching(k, gamma, tol)
        self.r0 = max(self.r0, 2 * self.r_min)
        u0, du0 = self._asymptotic(np.array([self.r0]))
        self._scale = abs(u0[0]) or 1.0
        y0 = np.array([u0[0], du0[0]]) / self._scale
        k2 = k * k

        def rhs(r, y):
            return [y[1], -(k2 + 2 * gamma / r) * y[0]]

        sol = solve_ivp(rhs, (self.r0, self.r_min), y0, method="DOP853",
                        rtol=RTOL, atol=ATOL, dense_output=True)
        if not sol.success:
            raise ScatteringError(f"inward integration failed for k={k}: {sol.message}")
        self._sol = sol.sol
        self.n_steps = len(sol.t)

    def _asymptotic(self, r):
        phase = np.exp(1j * (self.k * r + self.eta * np.log(r)))
        j = np.arange(len(self.b))
        rp = r[:, None] ** (-j[None, :])
        s = rp @ self.b
        ds = (rp / r[:, None]) @ (-j * self.b)
        u = phase * s
        du = phase * (1j * (self.k + self.eta / r) * s + ds)
        return u, du

    def u_and_du(self, r):
        """``u = r U`` and ``u'`` at radii ``r >= r_min``."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        if np.any(r < self.r_min * (1 - 1e-12)):
            raise ScatteringError(f"radius below r_min={self.r_min}")
        u = np.empty(r.shape, dtype=complex)
        du = np.empty(r.shape, dtype=complex)
        out = r >= self.r0
        if np.any(out):
            u[out], du[out] = self._asymptotic(r[out])
        if np.any(~out):
            y = self._sol(r[~out]) * self._scale
            u[~out], du[~out] = y[0], y[1]
        return u, du

    def value(self, r):
        scalar = np.ndim(r) == 0
        u, _ = self.u_and_du(r)
        out = u / np.atleast_1d(np.asarray(r, dtype=float))
        return complex(out[0]) if scalar else out

    def deriv(self, r):
        scalar = np.ndim(r) == 0
        rr = np.atleast_1d(np.asarray(r, dtype=float))
        u, du = self.u_and_du(rr)
        out = du / rr - u / rr**2
        return complex(out[0]) if scalar else out

    __call__ = value

    def asymptotic_form(self, r):
        """Leading behavior ``r^-1 exp(i(kr + eta log r))``."""
        r = np.asarray(r, dtype=float)
        return np.exp(1j * (self.k * r + self.eta * np.log(r))) / r

    def ode_residual(self, r, h=1e-3):
        """Relative residual of ``u'' + (k^2 + 2 gamma/r) u`` by a 4th-order stencil."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        u = lambda x: self.u_and_du(x)[0]
        d2 = (-u(r + 2 * h) + 16 * u(r + h) - 30 * u(r) + 16 * u(r - h) - u(r - 2 * h)) / (12 * h * h)
        res = d2 + (self.k**2 + 2 * self.gamma / r) * u(r)
        return np.abs(res) / np.abs(u(r))


@lru_cache(maxsize=2048)
def _kodaira_cached(k: complex, gamma: float, r_min: float) -> KodairaSolution:
    return KodairaSolution(k, gamma, r_min)


def kodaira_solution(k, gamma=1.0, r_min: float = 0.05) -> KodairaSolution:
    return _kodaira_cached(complex(k), float(gamma), float(r_min))


@lru_cache(maxsize=4096)
def _jost_cached(k: complex, gamma: float, radii: tuple) -> complex:
    F = regular_solution(0, k * k, gamma)
    U = kodaira_solution(k, gamma, r_min=min(0.05, 0.5 * min(radii)))
    mean, spread = wronskian_spread(F, U, radii)
    if spread > 1e-8 * max(1.0, abs(mean)):
        raise ScatteringError(f"a(k) depends on the matching radius (spread {spread:.2e})")
    return mean


def jost_a(k, gamma=1.0, radii: Sequence[float] = (1.0, 1.5)) -> complex:
    """``a(k) = Wr(F_{0,k^2}, U_k)``, evaluated at two radii and checked for agreement."""
    k = complex(k)
    if abs(k) > 4:
        # keep the Frobenius series clear of cancellation
        radii = tuple(float(x) * 4 / abs(k) for x in radii)
    return _jost_cached(k, float(gamma), tuple(float(x) for x in radii))


def spectral_density(lam: float, gamma=1.0) -> complex:
    """``w(lam) = 2 i sqrt(lam) / |a(sqrt(lam))|^2`` for ``lam > 0``."""
    if not lam > 0:
        raise ValueError("spectral density is defined for lam > 0")
    k = math.sqrt(lam)
    return 2j * k / abs(jost_a(k, gamma)) ** 2


def density_shape(lam, gamma=1.0, sign: int = -1):
    """``(exp(sign * 2 pi gamma / sqrt(lam)) - 1)^-1``."""
    lam = np.asarray(lam, dtype=float)
    return 1.0 / np.expm1(sign * 2 * np.pi * gamma / np.sqrt(lam))


@dataclass
class DensityFit:
    """One-constant fit ``Im w = constant * density_shape(sign)``.

    ``max_rel_residual`` includes the size of ``Re w`` relative to ``|w|``.
    """

    sign: int
    constant: float
    max_rel_residual: float
    lams: np.ndarray
    w: np.ndarray
    gamma: float = 1.0


def fit_density(lams: Sequence[float], gamma=1.0, sign: Optional[int] = None) -> DensityFit:
    """Fit the measured density against the closed-form shape.

    With ``sign=None`` both exponent signs are tried and the better fit is
    returned.
    """
    lams = np.asarray(lams, dtype=float)
    w = np.array([spectral_density(x, gamma) for x in lams])
    fits = []
    for s in ([sign] if sign is not None else [-1, 1]):
        shape = density_shape(lams, gamma, s)
        C = float(np.dot(shape, w.imag) / np.dot(shape, shape))
        res = np.abs(w - 1j * C * shape) / np.abs(w)
        fits.append(DensityFit(s, C, float(np.max(res)), lams, w, float(gamma)))
    return min(fits, key=lambda f: f.max_rel_residual)


def _neville(xs, ys, x0=0.0):
    """Polynomial extrapolation of array-valued samples to ``x0``."""
    P = [np.asarray(y, dtype=complex) for y in ys]
    n = len(xs)
    for m in range(1, n):
        P = [((x0 - xs[i + m]) * P[i] + (xs[i] - x0) * P[i + 1]) / (xs[i] - xs[i + m])
             for i in range(n - m)]
    return P[0]


@dataclass
class LimitingAbsorption:
    lam: float
    r: np.ndarray
    v_plus: np.ndarray
    v_minus: np.ndarray
    difference: np.ndarray
    coefficient: complex
    w: complex
    regular_residual: float
    extrapolation_change: float

    @property
    def ratio(self) -> complex:
        return self.coefficient / self.w


def limiting_absorption(lam: float, gamma=1.0, eps: Sequence[float] = (1e-2, 1e-3, 1e-4),
                        r_samples=None, tol: float = 1e-4) -> LimitingAbsorption:
    """Boundary values ``V(lam +- i0)`` of ``U_k / a(k)`` and their difference.

    ``k`` is the square root of ``lam +- i eps`` with positive imaginary part;
    the limits are obtained by polynomial extrapolation in ``eps``.

    Raises
    ------
    ScatteringError
        If dropping the largest ``eps`` moves the extrapolated values by more
        than ``tol`` (relative).
    """
    if not lam > 0:
        raise ValueError("need lam > 0")
    r = np.asarray(r_samples if r_samples is not None else np.linspace(0.5, 3.0, 11), dtype=float)
    eps = sorted(eps, reverse=True)
    plus, minus = [], []
    for e in eps:
        kp = cmath.sqrt(lam + 1j * e)
        km = -cmath.sqrt(lam - 1j * e)
        plus.append(kodaira_solution(kp, gamma).value(r) / jost_a(kp, gamma))
        minus.append(kodaira_solution(km, gamma).value(r) / jost_a(km, gamma))
    vp = _neville(eps, plus)
    vm = _neville(eps, minus)
    change = max(np.max(np.abs(vp - _neville(eps[1:], plus[1:]))) / np.max(np.abs(vp)),
                 np.max(np.abs(vm - _neville(eps[1:], minus[1:]))) / np.max(np.abs(vm)))
    if change > tol:
        raise ScatteringError(f"extrapolation in eps not converged (change {change:.2e})")
    diff = vp - vm
    F = regular_solution(0, lam, gamma).value(r)
    c = complex(np.vdot(F, diff) / np.vdot(F, F))
    resid = float(np.max(np.abs(diff - c * F)) / np.max(np.abs(diff)))
    return LimitingAbsorption(lam, r, vp, vm, diff, c, spectral_density(lam, gamma), resid, float(change))


# ---------------------------------------------------------------------------
# resolvent and spectral projection on radial functions


class Bump:
    """Smooth compactly supported profile ``(4 (s-lo)(hi-s) / (hi-lo)^2)^power``."""

    def __init__(self, lo: float = 1.0, hi: float = 2.0, power: int = 6):
        self.lo, self.hi, self.power = float(lo), float(hi), int(power)
        self.support = (self.lo, self.hi)
        self.breakpoints = (self.lo, self.hi)
        self.decay = math.inf

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        t = 4 * (s - self.lo) * (self.hi - s) / (self.hi - self.lo) ** 2
        return np.where((s > self.lo) & (s < self.hi), np.clip(t, 0, None) ** self.power, 0.0)


def _panels(breaks: np.ndarray, h_max: float = 0.25, n_max: int = 20):
    """Gauss-Legendre nodes on each sub-panel; returns (nodes, weights, panel ids, edges)."""
    nodes, weights, ids, edges = [], [], [], [breaks[0]]
    pid = 0
    for a, b in zip(breaks[:-1], breaks[1:]):
        m = max(1, int(math.ceil((b - a) / h_max)))
        for j in range(m):
            lo = a + (b - a) * j / m
            hi = a + (b - a) * (j + 1) / m
            n = max(8, int(math.ceil(n_max * (hi - lo) / h_max)))
            x, w = _gauss(n)
            nodes.append(0.5 * (hi - lo) * x + 0.5 * (hi + lo))
            weights.append(0.5 * (hi - lo) * w)
            ids.append(np.full(n, pid))
            edges.append(hi)
            pid += 1
    return np.concatenate(nodes), np.concatenate(weights), np.concatenate(ids), np.array(edges)


@lru_cache(maxsize=64)
def _gauss(n: int):
    return np.polynomial.legendre.leggauss(n)


def _function_meta(f):
    support = getattr(f, "support", (0.0, math.inf))
    breaks = tuple(getattr(f, "breakpoints", ()))
    decay = getattr(f, "decay", 0.0)
    return float(support[0]), float(support[1]), breaks, float(decay)


class Resolvent:
    """``(T - lam)^-1`` on spherical functions via the Green's function.

    For ``Im k > 0``, ``k^2 = lam``:

        a(k) g(r) = F(r) int_r^inf U_k f s^2 ds + U_k(r) int_0^r F f s^2 ds.
    """

    def __init__(self, lam: complex, gamma: float = 1.0, near_spectrum: float = 1e-8):
        lam = complex(lam)
        k = cmath.sqrt(lam)
        if k.imag < 0:
            k = -k
        if k.imag <= 1e-12:
            raise ScatteringError(f"lam={lam} lies on the continuous spectrum")
        self.lam, self.k, self.gamma = lam, k, float(gamma)
        self.F = regular_solution(0, lam, gamma)
        self.U = kodaira_solution(k, gamma)
        self.a = jost_a(k, gamma)
        if abs(self.a) < near_spectrum:
            raise ScatteringError(f"lam={lam} is at or near an eigenvalue (|a|={abs(self.a):.2e})")

    def _truncation(self, start: float, decay: float) -> float:
        R = start + math.log(1e14) / (self.k.imag + decay)
        if R > 400:
            raise ScatteringError("Green's integral needs a truncation radius beyond 400")
        return R

    def apply(self, f: Callable, r_out) -> np.ndarray:
        """Values of ``(T - lam)^-1 f`` at the radii ``r_out``."""
        r_out = np.atleast_1d(np.asarray(r_out, dtype=float))
        lo, hi, fbreaks, decay = _function_meta(f)
        if not math.isfinite(hi):
            hi = self._truncation(max(float(np.max(r_out)), max(fbreaks, default=lo)), decay)
        inner = [x for x in np.concatenate([r_out, fbreaks]) if lo < x < hi]
        breaks = np.unique(np.concatenate([[lo, hi], inner]))
        s, w, ids, edges = _panels(breaks)
        fs = np.asarray(f(s), dtype=complex)
        npan = len(edges) - 1
        # F is needed below max(r_out), U above min(r_out)
        use_F = s <= np.max(r_out)
        use_U = s >= np.min(r_out)
        Fs = np.zeros_like(fs)
        Us = np.zeros_like(fs)
        if np.any(use_F & (fs != 0)):
            m = use_F & (fs != 0)
            Fs[m] = self.F.value(s[m])
        if np.any(use_U & (fs != 0)):
            m = use_U & (fs != 0)
            Us[m] = self.U.value(s[m])
        pan_F = np.bincount(ids, weights=(w * Fs * fs * s * s).real, minlength=npan) \
            + 1j * np.bincount(ids, weights=(w * Fs * fs * s * s).imag, minlength=npan)
        pan_U = np.bincount(ids, weights=(w * Us * fs * s * s).real, minlength=npan) \
            + 1j * np.bincount(ids, weights=(w * Us * fs * s * s).imag, minlength=npan)
        cum_F = np.concatenate([[0], np.cumsum(pan_F)])
        cum_U = np.concatenate([np.cumsum(pan_U[::-1])[::-1], [0]])
        idx = np.searchsorted(edges, np.clip(r_out, lo, hi))
        idx = np.clip(idx, 0, len(edges) - 1)
        IF = np.where(r_out <= lo, 0, cum_F[idx])
        IU = np.where(r_out >= hi, 0, cum_U[idx])
        out = np.zeros(r_out.shape, dtype=complex)
        m = IU != 0
        if np.any(m):
            out[m] += self.F.value(r_out[m]) * IU[m]
        m = IF != 0
        if np.any(m):
            out[m] += self.U.value(r_out[m]) * IF[m]
        return out / self.a

    def as_function(self, f: Callable) -> "_ResolventImage":
        return _ResolventImage(self, f)


class _ResolventImage:
    """Lazy ``(T - lam)^-1 f`` usable as input to another resolvent."""

    def __init__(self, res: Resolvent, f):
        self.res, self.f = res, f
        lo, hi, breaks, decay = _function_meta(f)
        self.support = (0.0, math.inf)
        self.breakpoints = tuple(b for b in breaks if b > 0)
        self.decay = res.k.imag

    def __call__(self, s):
        return self.res.apply(self.f, s)


def greens_apply(lam, f: Callable, gamma=1.0, r_out=None) -> np.ndarray:
    """``(T - lam)^-1 f`` for a spherical ``f`` sampled at ``r_out``."""
    r_out = np.linspace(0.5, 3.0, 26) if r_out is None else r_out
    return Resolvent(lam, gamma).apply(f, r_out)


def regular_profile(lam: float, gamma, r) -> np.ndarray:
    """``F_{0,lam}(r)`` for real ``lam > 0`` at any radius.

    Small radii use the Frobenius series; beyond ``min(4, 8/k)`` the identity
    ``F = Im(conj(a) U_k) / k`` is used, which avoids the series' cancellation.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    k = math.sqrt(lam)
    r_sw = min(4.0, 8.0 / k)
    out = np.empty(r.shape)
    near = r <= r_sw
    if np.any(near):
        out[near] = regular_solution(0, lam, gamma).value(r[near]).real
    if np.any(~near):
        a = jost_a(k, gamma)
        U = kodaira_solution(k, gamma, r_min=min(0.05, 0.5 * r_sw))
        out[~near] = (np.conj(a) * U.value(r[~near])).imag / k
    return out


def bound_state_profile(n: int, gamma, r) -> np.ndarray:
    """``F_{0,-gamma^2/n^2}(r) = exp(-gamma r/n) M(1-n, 2, 2 gamma r/n)``, exact polynomial times decay."""
    g = float(gamma)
    r = np.asarray(r, dtype=float)
    z = 2 * g * r / n
    term = np.ones_like(z)
    total = np.ones_like(z)
    for j in range(n - 1):
        term = term * (j + 1 - n) / ((j + 2) * (j + 1)) * z
        total = total + term
    return np.exp(-g * r / n) * total


def bound_state_norm(n: int, gamma) -> Fraction:
    """Exact ``int_0^inf F_{0,-gamma^2/n^2}(r)^2 r^2 dr`` for rational gamma.

    ``F = exp(-gamma r/n) M(1-n, 2, 2 gamma r/n)`` with a terminating series.
    """
    g = Fraction(gamma)
    m = [Fraction(1)]
    for j in range(n - 1):
        m.append(m[-1] * (j + 1 - n) / ((j + 2) * (j + 1)))
    total = Fraction(0)
    for i, mi in enumerate(m):
        for j, mj in enumerate(m):
            total += mi * mj * math.factorial(i + j + 2)
    return (Fraction(n) / (2 * g)) ** 3 * total


class SpectralProjector:
    """Continuous-spectrum projection onto ``(alpha, beta)`` on a radial grid.

    ``(P f)(r) = (1/pi) int F_lam(r) <F_lam, f> sqrt(lam)/|a(sqrt lam)|^2 dlam``
    with ``<g, f> = int g f s^2 ds``, Gauss-Legendre in ``lam``.
    """

    def __init__(self, alpha: float, beta: float, gamma: float = 1.0, r_max: float = 800.0,
                 n_nodes: Optional[int] = None, extra_breaks: Sequence[float] = (1.0, 2.0)):
        if not 0 < alpha < beta:
            raise ValueError("need 0 < alpha < beta")
        if math.sqrt(alpha) < K_MIN_FACTOR * gamma:
            raise ScatteringError("alpha below k_min^2")
        self.alpha, self.beta, self.gamma = float(alpha), float(beta), float(gamma)
        near = min(8.0, r_max)
        breaks = np.unique(np.array([0.0, near] + [b for b in extra_breaks if 0 < b < near]))
        s_near, w_near, _, _ = _panels(breaks)
        if r_max > near:
            # 20 nodes per unit length still resolve k <= 3 to machine precision
            s_far, w_far, _, _ = _panels(np.array([near, r_max]), h_max=1.0)
            s_near = np.concatenate([s_near, s_far])
            w_near = np.concatenate([w_near, w_far])
        self.s, self.w = s_near, w_near
        if n_nodes is None:
            # P f has a slowly decaying tail; resolving it on [0, r_max] needs
            # lam-spacing ~ 1/r_max, so the node count grows with the grid
            n_nodes = max(64, 64 * math.ceil(0.8 * r_max / 64))
        self.r_max = float(r_max)
        self.n_nodes = int(n_nodes)
        self._tables = {}

    def _table(self, n):
        if n not in self._tables:
            x, wx = _gauss(n)
            lam = 0.5 * (self.beta - self.alpha) * x + 0.5 * (self.beta + self.alpha)
            wl = 0.5 * (self.beta - self.alpha) * wx
            rho = np.array([math.sqrt(l) / abs(jost_a(math.sqrt(l), self.gamma)) ** 2 for l in lam])
            Fm = np.array([regular_profile(l, self.gamma, self.s) for l in lam])
            self._tables[n] = (lam, wl * rho / math.pi, Fm)
        return self._tables[n]

    def inner(self, f_vals, g_vals) -> complex:
        return complex(np.sum(self.w * self.s**2 * f_vals * g_vals))

    def norm(self, f_vals) -> float:
        return math.sqrt(abs(self.inner(np.conj(f_vals), f_vals)))

    def apply_values(self, f_vals: np.ndarray, n: Optional[int] = None) -> np.ndarray:
        lam, wts, Fm = self._table(n or self.n_nodes)
        coeffs = Fm @ (self.w * self.s**2 * f_vals)
        return (wts * coeffs) @ Fm

    def apply(self, f, check: bool = True, tol: float = 1e-3) -> np.ndarray:
        """``P f`` on the grid ``self.s``; ``f`` is a callable or grid values.

        Raises
        ------
        ScatteringError
            If doubling the number of lam-nodes changes the result by more than
            ``tol`` relative to ``||f||``.
        """
        f_vals = f(self.s) if callable(f) else np.asarray(f)
        out = self.apply_values(f_vals)
        if check:
            fine = self.apply_values(f_vals, 2 * self.n_nodes)
            change = self.norm(fine - out) / self.norm(f_vals)
            if change > tol:
                raise ScatteringError(f"lam-quadrature not converged (change {change:.2e})")
            out = fine
        return out

    def spectral_mass(self, f, n: Optional[int] = None) -> float:
        """``<P f, f>`` computed directly as ``(1/pi) int |<F, f>|^2 rho dlam``."""
        f_vals = f(self.s) if callable(f) else np.asarray(f)
        lam, wts, Fm = self._table(n or self.n_nodes)
        coeffs = Fm @ (self.w * self.s**2 * f_vals)
        return float(np.sum(wts * np.abs(coeffs) ** 2))


def spectral_projection(alpha, beta, f, gamma=1.0, n_nodes: Optional[int] = None,
                        r_max: float = 800.0):
    """Grid and values of ``P_(alpha, beta) f``."""
    P = SpectralProjector(alpha, beta, gamma, r_max=r_max, n_nodes=n_nodes,
                          extra_breaks=getattr(f, "breakpoints", ()))
    return P.s, P.apply(f)


def projection_checks(f=None, alpha: float = 0.2, beta: float = 5.0, gamma: float = 1.0,
                      r_max: float = 800.0, n_bound: int = 3) -> dict:
    """Idempotence and bound-state orthogonality of the quadrature projector.

    Returns ``idempotence = ||P^2 f - P f|| / ||f||`` and the largest
    normalized overlap ``|<P f, F_n>| / (||P f|| ||F_n||)`` over ``n <= n_bound``.
    The first application runs the lam-node doubling check.
    """
    f = f if f is not None else Bump(1.0, 3.0, 4)
    P = SpectralProjector(alpha, beta, gamma, r_max=r_max,
                          extra_breaks=getattr(f, "breakpoints", ()))
    fv = f(P.s)
    Pf = P.apply(fv, check=True)
    PPf = P.apply(Pf, check=False)
    overlaps = []
    for n in range(1, n_bound + 1):
        Fn = bound_state_profile(n, gamma, P.s)
        overlaps.append(abs(P.inner(Pf, Fn)) / (P.norm(Pf) * P.norm(Fn)))
    return {
        "idempotence": P.norm(PPf - Pf) / P.norm(fv),
        "orthogonality": max(overlaps),
        "overlaps": overlaps,
        "r_max": P.r_max,
        "n_nodes": P.n_nodes,
    }


def completeness(f=None, gamma=1, n_bound: int = 6, lam_max: float = 50.0,
                 n_nodes: int = 64) -> dict:
    """Parseval check: bound-state sum plus continuum mass on ``(k_min^2, lam_max)``.

    Bound states use the exact norms of :func:`bound_state_norm`; the
    continuum is split at 1 and 10 so each Gauss-Legendre panel sees a
    smooth integrand. ``ratio`` is the recovered fraction of ``||f||^2``.
    """
    f = f if f is not None else Bump(1.0, 3.0, 4)
    g = float(gamma)
    lo, hi = getattr(f, "support", (0.0, 10.0))
    lam_min = (K_MIN_FACTOR * g) ** 2
    breaks = [b for b in (lam_min, 1.0, 10.0) if b < lam_max] + [lam_max]
    grid = SpectralProjector(lam_min, lam_max, g, r_max=hi + 1, n_nodes=n_nodes,
                             extra_breaks=getattr(f, "breakpoints", ()))
    fv = f(grid.s)
    norm2 = grid.inner(fv, fv).real
    continuum = sum(SpectralProjector(a, b, g, r_max=hi + 1, n_nodes=n_nodes,
                                      extra_breaks=getattr(f, "breakpoints", ())).spectral_mass(fv)
                    for a, b in zip(breaks[:-1], breaks[1:]))
    bound = []
    for n in range(1, n_bound + 1):
        Fn = bound_state_profile(n, g, grid.s)
        c = grid.inner(Fn, fv).real
        bound.append(c * c / float(bound_state_norm(n, Fraction(gamma))))
    total = continuum + sum(bound)
    return {"norm2": norm2, "continuum": continuum, "bound": bound,
            "total": total, "ratio": total / norm2}


@dataclass
class ScatteringData:
    """Rows of (k, a(k), lam = k^2, w(lam), residual)."""

    k: list = field(default_factory=list)
    a: list = field(default_factory=list)
    lam: list = field(default_factory=list)
    w: list = field(default_factory=list)
    residual: list = field(default_factory=list)

    COLUMNS = ("k_re", "k_im", "a_re", "a_im", "lambda", "w_re", "w_im", "residual")

    def rows(self):
        for k, a, lam, w, res in zip(self.k, self.a, self.lam, self.w, self.residual):
            yield (k.real, k.imag, a.real, a.imag, lam, w.real, w.imag, res)

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(self.COLUMNS)
        for row in self.rows():
            wr.writerow([f"{x:.17g}" for x in row])
        return buf.getvalue()


def scattering_data(lams: Sequence[float], gamma=1.0) -> ScatteringData:
    """a(k) and w(lam) on a grid of positive energies.

    The residual column is ``|a(-k) - conj(a(k))|``.
    """
    data = ScatteringData()
    for lam in lams:
        k = math.sqrt(lam)
        a = jost_a(k, gamma)
        data.k.append(complex(k))
        data.a.append(a)
        data.lam.append(float(lam))
        data.w.append(spectral_density(lam, gamma))
        data.residual.append(abs(jost_a(-k, gamma) - a.conjugate()))
    return data
