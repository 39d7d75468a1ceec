"""Radial eigenfunctions of the rescaled Schrodinger operator.

On the ``l``-isotypic component the eigen-equation ``T psi = lam psi`` reads

    r^2 psi'' + 2 r psi' - l(l+1) psi + 2 gamma r psi + lam r^2 psi = 0,

which has a regular singular point at ``r = 0`` with indicial roots ``l`` and
``-(l+1)``. The regular solution ``F`` is normalized by ``F ~ r^l`` and the
singular solution ``G`` by ``G ~ r^(-(l+1))``; the resonance of the two
roots forces a logarithm into ``G``.

Evaluation is by direct summation of the Frobenius series in double
precision, cross-checked against the Kummer and Bessel closed forms.
"""

from __future__ import annotations

import cmath
import math
from typing import Sequence

import numpy as np
from scipy import special

__all__ = [
    "RadialSeriesError",
    "RadialSolution",
    "regular_solution",
    "singular_solution",
    "kummer_m",
    "kummer_closed_form",
    "bessel_closed_form",
    "radial_residual",
    "wronskian",
    "wronskian_spread",
]

MAX_TERMS = 4000
CANCELLATION_LIMIT = 1e6


class RadialSeriesError(ArithmeticError):
    """A series cannot be summed reliably at the requested radius.

    Attributes
    ----------
    radius : float
        Radius at which the evaluation was refused.
    safe_radius : float or None
        Largest radius found below ``radius`` where the series is usable.
    """

    def __init__(self, message, radius=None, safe_radius=None):
        super().__init__(message)
        self.radius = radius
        self.safe_radius = safe_radius


def _fsum_complex(vals) -> complex:
    vals = list(vals)
    return complex(math.fsum(v.real for v in vals), math.fsum(v.imag for v in vals))


def _falling(x: float, n: int) -> float:
    out = 1.0
    for j in range(n):
        out *= x - j
    return out


class _Series:
    """Coefficients of sum_m a_m r^(m + shift), extended on demand."""

    def __init__(self, first, step, shift: int):
        self.coeffs = list(first)
        self._step = step
        self.shift = shift
        # exact zeros (seeded coefficients, falling factorials) end before this
        self._min_terms = len(self.coeffs) + abs(shift)

    def coeff(self, m: int) -> complex:
        while len(self.coeffs) <= m:
            n = len(self.coeffs)
            self.coeffs.append(self._step(n, self.coeffs))
        return self.coeffs[m]

    def sum_derivative(self, r: float, n: int, tol: float, start: int = 0):
        """n-th derivative at r; returns (value, largest partial-sum magnitude)."""
        terms = []
        partial = 0j
        running = 0.0
        small = 0
        m = start
        while True:
            c = self.coeff(m)
            p = m + self.shift
            try:
                t = c * _falling(p, n) * r ** (p - n) if c else 0j
            except OverflowError:
                raise RadialSeriesError(f"series terms overflow at r={r}", radius=r) from None
            terms.append(t)
            partial += t
            running = max(running, abs(partial))
            if abs(t) < tol * running:
                small += 1
            else:
                small = 0
            m += 1
            if small >= 3 and m > start + self._min_terms + n + 3:
                break
            if m - start > MAX_TERMS:
                raise RadialSeriesError(f"series did not converge at r={r}", radius=r)
        return _fsum_complex(terms), running

    def sum_derivative_array(self, r: np.ndarray, n: int, tol: float):
        """Vectorized ``sum_derivative``; the term count is set by the largest radius."""
        rmax = float(np.max(r))
        self.sum_derivative(rmax, n, tol)
        nterms = len(self.coeffs)
        total = np.zeros(r.shape, dtype=complex)
        running = np.zeros(r.shape)
        for m in range(nterms):
            c = self.coeffs[m]
            if not c:
                continue
            p = m + self.shift
            total += c * _falling(p, n) * r ** (p - n)
            running = np.maximum(running, np.abs(total))
        return total, running


class RadialSolution:
    """Frobenius solution of the radial equation with value/derivative queries.

    Parameters are fixed at construction; the coefficient cache only ever
    grows, so evaluation is effectively pure.

    Attributes
    ----------
    kind : str
        ``"regular"`` or ``"singular"``.
    ell : int
    lam : complex
    gamma : float
    tol : float
        Truncation tolerance, relative to the running maximum of partial sums.
    log_coeff : complex
        Coefficient of ``log(r) F`` in the singular solution (0 for regular).
    """

    def __init__(self, kind, ell, lam, gamma, tol, power: _Series, log_coeff=0j, regular=None):
        self.kind = kind
        self.ell = int(ell)
        self.lam = complex(lam)
        self.gamma = float(gamma)
        self.tol = float(tol)
        self._power = power
        self.log_coeff = complex(log_coeff)
        self._regular = regular

    def __repr__(self):
        return f"RadialSolution({self.kind}, ell={self.ell}, lam={self.lam}, gamma={self.gamma})"

    def coefficients(self, n: int) -> np.ndarray:
        """First ``n`` power-series coefficients (excluding the log part)."""
        return np.array([self._power.coeff(m) for m in range(n)], dtype=complex)

    @property
    def leading_exponent(self) -> int:
        return self._power.shift

    def _derivative_scalar(self, r: float, n: int) -> complex:
        if r <= 0:
            raise ValueError("radius must be positive")
        try:
            val, running = self._power.sum_derivative(r, n, self.tol)
        except RadialSeriesError as exc:
            raise RadialSeriesError(str(exc), radius=r, safe_radius=self.safe_radius(r)) from None
        scale_max = running
        if self.log_coeff and self._regular is not None:
            # d^n [log(r) F] by Leibniz; d^j log r = (-1)^(j-1) (j-1)! r^(-j)
            parts = [math.log(r) * self._regular._derivative_scalar(r, n)]
            for j in range(1, n + 1):
                dlog = (-1) ** (j - 1) * math.factorial(j - 1) * r ** (-j)
                parts.append(math.comb(n, j) * dlog * self._regular._derivative_scalar(r, n - j))
            logpart = self.log_coeff * _fsum_complex(parts)
            scale_max = max(scale_max, abs(logpart))
            val = val + logpart
        if scale_max > CANCELLATION_LIMIT * abs(val):
            amp = self._local_amplitude(np.array([r]), n)[0]
            if scale_max > CANCELLATION_LIMIT * max(abs(val), amp):
                raise RadialSeriesError(
                    f"cancellation too severe at r={r} (derivative order {n})",
                    radius=r, safe_radius=self.safe_radius(r),
                )
        return val

    def _local_amplitude(self, r: np.ndarray, n: int) -> np.ndarray:
        """Amplitude scale near a zero: ``|psi^(n+1)| r / (1 + kappa r)``.

        An oscillating solution passes through zeros where the relative error
        is meaningless; measuring loss against the local amplitude instead
        keeps the guard aimed at genuine digit loss.
        """
        kappa = abs(cmath.sqrt(self.lam)) + self.gamma
        d = np.array([self._power.sum_derivative(x, n + 1, self.tol)[0] for x in r])
        return np.abs(d) * r / (1 + kappa * r)

    def derivative(self, r, n: int = 0):
        """n-th radial derivative at ``r`` (scalar or array).

        Arrays longer than a few dozen points of a regular solution are summed
        with numpy instead of ``math.fsum``; the cancellation guard still
        applies pointwise.
        """
        if np.ndim(r) == 0:
            return self._derivative_scalar(float(r), n)
        r = np.asarray(r, dtype=float)
        if r.size > 32 and not self.log_coeff:
            if np.any(r <= 0):
                raise ValueError("radius must be positive")
            try:
                val, running = self._power.sum_derivative_array(r, n, self.tol)
            except RadialSeriesError as exc:
                r_top = float(np.max(r))
                raise RadialSeriesError(str(exc), radius=r_top, safe_radius=self.safe_radius(r_top)) from None
            bad = running > CANCELLATION_LIMIT * np.abs(val)
            if np.any(bad):
                amp = self._local_amplitude(r[bad], n)
                still = running[bad] > CANCELLATION_LIMIT * np.maximum(np.abs(val[bad]), amp)
                bad[np.flatnonzero(bad)[~still]] = False
            if np.any(bad):
                r_bad = float(np.min(r[bad]))
                raise RadialSeriesError(f"cancellation too severe at r={r_bad}",
                                        radius=r_bad, safe_radius=self.safe_radius(r_bad))
            return val
        return np.array([self._derivative_scalar(x, n) for x in r.ravel()]).reshape(r.shape)

    def value(self, r):
        return self.derivative(r, 0)

    def deriv(self, r):
        return self.derivative(r, 1)

    __call__ = value

    def safe_radius(self, r: float) -> float:
        """Largest radius below ``r`` (on a geometric grid) with acceptable cancellation."""
        x = float(r)
        for _ in range(200):
            x *= 0.9
            try:
                val, running = self._power.sum_derivative(x, 0, self.tol)
            except RadialSeriesError:
                continue
            if running <= CANCELLATION_LIMIT * abs(val):
                return x
        return 0.0

    def residual(self, r) -> np.ndarray:
        return radial_residual(self, self.ell, self.lam, self.gamma, r)


def _check_tol(tol):
    if not tol > 0:
        raise ValueError("tol must be positive")


def regular_solution(ell: int, lam, gamma=1.0, tol: float = 1e-17) -> RadialSolution:
    """Regular solution ``F = sum_m c_m r^(l+m)`` with ``c_0 = 1``.

    The coefficients obey ``m (m + 2l + 1) c_m = -(2 gamma c_{m-1} + lam c_{m-2})``.
    """
    _check_tol(tol)
    lam = complex(lam)
    g = float(gamma)
    N = 2 * ell + 1

    def step(m, c):
        prev2 = c[m - 2] if m >= 2 else 0j
        return -(2 * g * c[m - 1] + lam * prev2) / (m * (m + N))

    return RadialSolution("regular", ell, lam, g, tol, _Series([1 + 0j], step, ell))


def singular_solution(ell: int, lam, gamma=1.0, tol: float = 1e-17,
                      resonant_coeff: complex = 0j) -> RadialSolution:
    """Singular solution ``G = sum_m d_m r^(m-l-1) + C log(r) F`` with ``d_0 = 1``.

    ``C`` is forced by the recurrence at the resonant index ``m = 2l+1``; the
    free coefficient ``d_{2l+1}`` defaults to 0, which pins ``G`` down up to
    the choice of an additive multiple of ``F``.
    """
    _check_tol(tol)
    lam = complex(lam)
    g = float(gamma)
    N = 2 * ell + 1
    reg = regular_solution(ell, lam, g, tol)

    d = [1 + 0j]
    for m in range(1, N):
        prev2 = d[m - 2] if m >= 2 else 0j
        d.append(-(2 * g * d[m - 1] + lam * prev2) / (m * (m - N)))
    prev2 = d[N - 2] if N >= 2 else 0j
    C = -(2 * g * d[N - 1] + lam * prev2) / (2 * ell + 1)
    d.append(complex(resonant_coeff))

    def step(m, dd):
        src = C * (2 * m - 2 * ell - 1) * reg._power.coeff(m - N)
        return -(2 * g * dd[m - 1] + lam * dd[m - 2] + src) / (m * (m - N))

    return RadialSolution("singular", ell, lam, g, tol, _Series(d, step, -ell - 1),
                          log_coeff=C, regular=reg)


def kummer_m(a: complex, b: float, z: complex, tol: float = 1e-17) -> complex:
    """Confluent hypergeometric M(a, b, z) by its power series.

    When ``Re z < 0`` the series is summed as ``e^z M(b-a, b, -z)`` to avoid
    alternating cancellation.

    Raises
    ------
    RadialSeriesError
        If the series terms overflow or lose more than six digits.
    """
    if z.real < 0:
        return cmath.exp(z) * kummer_m(b - a, b, -z, tol)
    if abs(z) > 600:
        raise RadialSeriesError(f"|z|={abs(z):.3g} too large for the M-series",
                                safe_radius=None)
    terms = []
    t = 1 + 0j
    running = 1.0
    partial = 0j
    small = 0
    n = 0
    while True:
        terms.append(t)
        partial += t
        running = max(running, abs(partial))
        small = small + 1 if abs(t) < tol * running else 0
        if small >= 3:
            break
        t = t * (a + n) / (b + n) * z / (n + 1)
        n += 1
        if n > MAX_TERMS or not cmath.isfinite(t):
            raise RadialSeriesError("M-series overflow; reduce r")
    val = _fsum_complex(terms)
    if running > CANCELLATION_LIMIT * abs(val) and abs(val) > 0:
        raise RadialSeriesError("M-series cancellation; reduce r")
    return val


def kummer_closed_form(ell: int, lam, gamma, r, branch: int = 1) -> complex:
    """``r^l exp(-s r) M(l+1-gamma/s, 2l+2, 2 s r)`` with ``s = branch * sqrt(-lam)``.

    The principal square root is used for ``branch=1``; the value does not
    depend on the branch.
    """
    lam = complex(lam)
    if lam == 0:
        raise ValueError("Kummer form requires lam != 0; use bessel_closed_form")
    if r <= 0:
        raise ValueError("radius must be positive")
    s = branch * cmath.sqrt(-lam)
    a = ell + 1 - gamma / s
    return r**ell * cmath.exp(-s * r) * kummer_m(a, 2 * ell + 2, 2 * s * r)


def bessel_closed_form(ell: int, gamma, r):
    """Zero-energy regular solution via the Bessel function J_{2l+1}."""
    r = np.asarray(r, dtype=float)
    pref = math.factorial(2 * ell + 1) / (2**ell * gamma**ell)
    return pref * (2 * gamma * r) ** -0.5 * special.jv(2 * ell + 1, np.sqrt(8 * gamma * r))


def radial_residual(sol, ell, lam, gamma, r) -> np.ndarray:
    """``r^2 psi'' + 2 r psi' + (-l(l+1) + 2 gamma r + lam r^2) psi`` at each radius."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    out = []
    for x in r:
        f0 = sol.derivative(x, 0)
        f1 = sol.derivative(x, 1)
        f2 = sol.derivative(x, 2)
        out.append(x * x * f2 + 2 * x * f1 + (-ell * (ell + 1) + 2 * gamma * x + lam * x * x) * f0)
    return np.array(out)


def _samples(phi, psi, r_samples: Sequence[float]) -> np.ndarray:
    vals = []
    for x in np.atleast_1d(r_samples):
        x = float(x)
        vals.append(x * x * (phi.deriv(x) * psi.value(x) - phi.value(x) * psi.deriv(x)))
    return np.array(vals)


def wronskian_spread(phi, psi, r_samples) -> tuple[complex, float]:
    """Mean of ``r^2 (phi' psi - phi psi')`` over the samples and its spread."""
    w = _samples(phi, psi, r_samples)
    return complex(w.mean()), float(np.max(np.abs(w - w.mean())))


def wronskian(phi, psi, r_samples=(0.5, 1.0, 2.0), tol: float = 1e-10) -> complex:
    """Modified Wronskian, checked for constancy in r.

    Raises
    ------
    RadialSeriesError
        If the spread across samples exceeds ``10 * tol`` (relative to
        ``max(1, |W|)``), which signals a truncation or matching problem.
    """
    mean, spread = wronskian_spread(phi, psi, r_samples)
    if spread > 10 * tol * max(1.0, abs(mean)):
        raise RadialSeriesError(f"Wronskian not constant: spread {spread:.3g}")
    return mean
