"""Characteristic polynomial, eigenvalues and exponential of the linear symbol.

sympy computes det(lambda I - A) by cofactor expansion; mpmath gives
high-precision eigenvalues and scipy the matrix exponential. Prints values
frozen in test_spectral.cpp.
"""
import mpmath as mp
import numpy as np
import scipy.linalg as sla
import sympy as sp

lam, xi, c2, rs, ns = sp.symbols("lambda xi c2 rho_s n_s")
I = sp.I
A = sp.Matrix([
    [0, -I * xi, 0, 0],
    [-I * xi * c2, -ns, 0, rs],
    [0, 0, 0, -I * xi],
    [0, ns, -I * xi, -rs - xi**2],
])
poly = sp.Poly(sp.expand((lam * sp.eye(4) - A).det(method="berkowitz")), lam)
print("coefficients:", [sp.factor(c) for c in poly.all_coeffs()])

# a = 1.3, gamma = 1.7, rho* = 0.8, n* = 1.5, xi = 0.6
a, g, r, n, x = 1.3, 1.7, 0.8, 1.5, 0.6
c2v = a * g * r ** (g - 1)
vals = {xi: x, c2: c2v, rs: r, ns: n}
print("general coeffs:", [f"{float(c.subs(vals)):.17g}" for c in poly.all_coeffs()])

mp.mp.dps = 40
def A_num(x, c2v=1.0, r=1.0, n=1.0):
    return np.array([
        [0, -1j * x, 0, 0],
        [-1j * x * c2v, -n, 0, r],
        [0, 0, 0, -1j * x],
        [0, n, -1j * x, -r - x * x],
    ])
for xv in (0.3, 2.0):
    M = mp.matrix(A_num(xv).tolist())
    ev = mp.eig(M)[0]
    print(f"eigs xi={xv}:", sorted([complex(e) for e in ev], key=lambda z: (z.real, z.imag)))

E = sla.expm(2.0 * A_num(0.7))
print("expm(2 A(0.7)) row 1:", [f"({z.real:.17g}, {z.imag:.17g})" for z in E[1]])
