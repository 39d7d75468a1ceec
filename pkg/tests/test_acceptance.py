"""Acceptance gate: the twelve primary criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline; a
summary table is also written to the terminal at the end of the module.
"""

import time
from fractions import Fraction

import pytest

from hydrosym import checks as C
from hydrosym import matfam

RESULTS = {}

MATRIX_REFS = {"4x4 matrix family over polynomials in T", "fiber classification by Killing form",
               "contracted fiber at lam=0", "ad-invariance of the Killing form"}


@pytest.fixture(scope="module", autouse=True)
def summary(request):
    yield
    tr = request.config.pluginmanager.getplugin("terminalreporter")
    if tr is None:
        return
    tr.write_line("")
    tr.write_line("acceptance summary")
    for n in sorted(RESULTS):
        tr.write_line(RESULTS[n])


def record(n, title, rows, elapsed, limit=None):
    failed = [r for r in rows if not r.passed]
    ok = bool(rows) and not failed and (limit is None or elapsed < limit)
    timing = f"{elapsed:.1f}s" + (f" (limit {limit:.0f}s)" if limit else "")
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {title} [{len(rows)} checks, {timing}]"
    if failed:
        line += f"; first failure: {failed[0].id} got {failed[0].got}"
    RESULTS[n] = line
    print(line)
    assert rows, "no checks ran"
    assert not failed, "\n".join(f"{r.id}: expected {r.expected}, got {r.got}" for r in failed)
    if limit is not None:
        assert elapsed < limit, f"runtime {elapsed:.1f}s over {limit}s"


def timed(fn, *args, **kwargs):
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t0


def test_criterion_01_exact_algebra():
    t0 = time.perf_counter()
    rows = []
    for g in (Fraction(1), Fraction(3, 2)):
        rows += [r for r in C.algebra_checks(g) if r.ref not in MATRIX_REFS]
    record(1, "brackets, centralizer, involutions, Casimirs exact at gamma 1 and 3/2",
           rows, time.perf_counter() - t0, 30)


def test_criterion_02_matrix_family():
    def run():
        rows = []
        for e in matfam.verify_homomorphism():
            rows.append(C._exact_row(e, "4x4 matrix family over polynomials in T"))
        table = {Fraction(-2): (0, 6, 0), Fraction(-1): (0, 6, 0), Fraction(-1, 4): (0, 6, 0),
                 Fraction(1, 4): (3, 3, 0), Fraction(1): (3, 3, 0), Fraction(2): (3, 3, 0)}
        for lam0, sig in table.items():
            got = matfam.killing_signature(lam0).as_tuple()
            rows.append(C.Check(f"signature at {lam0}", "Killing signature", sig, got, 0.0, got == sig))
        nz = matfam.killing_signature(0).as_tuple()[2]
        rows.append(C.Check("n_zero at 0", "Killing signature", 3, nz, 0.0, nz == 3))
        return rows

    rows, dt = timed(run)
    record(2, "homomorphism, independence, Killing signatures (exact)", rows, dt, 5)


def test_criterion_03_radial_solutions():
    rows, dt = timed(C.radial_checks, 1.0)
    ids = " ".join(r.id for r in rows)
    assert "closed form" in ids and "exp(-gamma r)" in ids and "spread" in ids
    record(3, "series vs Kummer/Bessel 1e-10, e^{-r} 1e-12, Wronskian spread 1e-9", rows, dt)


def test_criterion_04_twisted_equivariance():
    rows, dt = timed(C.equivariance_checks, 1)
    assert len(rows) == 5
    assert any("j" in r.id for r in rows)
    record(4, "|Wr(R3 phi, psi) + Wr(phi, theta(R3) psi)| < 1e-8 on five samples", rows, dt)


def test_criterion_05_explicit_action():
    rows, dt = timed(C.action_checks, 1, (1, 2, 3), (0, 1, -0.5), 1e-8)
    assert len(rows) == 18
    record(5, "R_- couplings match the closed-form action to 1e-8", rows, dt)


def test_criterion_06_intertwiner():
    rows, dt = timed(C.intertwiner_checks, 1, 3)
    assert sum("constant" in r.id for r in rows) == 4
    record(6, "f_l/g_l proportional to lam (l+1)^2 + gamma^2, residual < 1e-6", rows, dt)


def test_criterion_07_spectrum():
    from hydrosym.family import recover_spectrum

    rep, dt = timed(recover_spectrum, 1, 4)
    assert rep.discrete == [Fraction(-1), Fraction(-1, 4), Fraction(-1, 9), Fraction(-1, 16)]
    rows = C.spectrum_checks(1, 4, report=rep)
    record(7, "spectrum {-1,-1/4,-1/9,-1/16}, dims 1,4,9,16, probe verdicts (exact)", rows, dt)


def test_criterion_08_scattering():
    rows, dt = timed(C.scatter_checks, 1.0, (0.5, 1.0, 2.0))
    record(8, "Wr(U_k,U_-k)=2ik, a(-k)=conj a(k), F reconstruction, bound-state zeros", rows, dt)


def test_criterion_09_limiting_absorption():
    rows, dt = timed(C.absorption_checks, 1.0, (0.25, 1.0, 4.0), 1e-4)
    record(9, "(V+ - V-)/F = w to 1e-4, regular residual < 1e-6", rows, dt)


def test_criterion_10_spectral_measure():
    (rows, fit), dt = timed(C.density_checks, 1.0, (0.25, 0.5, 1.0, 2.0, 4.0, 9.0), 1e-4)
    print(f"    fitted sign {fit.sign:+d}, constant {fit.constant:.12g}")
    record(10, "w matches the closed-form density shape up to one constant, 1e-4", rows, dt)


def test_criterion_11_resolvent():
    rows, dt = timed(C.resolvent_checks, 1.0, (1 + 1j, 2 + 1j))
    assert any("resolvent identity" in r.id for r in rows)
    record(11, "(T-lam) R(lam) f = f to 1e-6, first resolvent identity 1e-5", rows, dt)


def test_criterion_12_spectral_projection():
    rows, dt = timed(C.projection_rows, 1.0)
    for r in rows:
        print(f"    {r.id}: {r.got}")
    record(12, "idempotence < 5e-3, orthogonality < 5e-3, completeness within 5%", rows, dt, 300)
