"""Symmetry algebra, radial solutions and spectral theory of the Coulomb operator.

Modules
-------
exactalg    exact rationals, Gaussian rationals, polynomials in lam
diffop      differential operators with exact coefficients; T, L_i, R_i
matfam      4x4 matrix family and Killing-form classification of fibers
radial      Frobenius solutions F, G and closed-form cross-checks
angular     spherical harmonics, sphere quadrature, the action of R on products
family      intertwiner polynomials, Jantzen layers, spectrum recovery
scattering  Kodaira solutions, a(k), spectral density, resolvent, projection
checks      verification suites shared by the CLI and the tests
cli         command-line front end
"""

__version__ = "0.1.0"
