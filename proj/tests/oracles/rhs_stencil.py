"""Reference semi-discrete right-hand side on a 16-cell periodic grid.

Independent numpy implementation of the Rusanov / minmod-MUSCL flux with the
viscous face flux and the drag pair. Prints values frozen in test_solver.cpp.
"""
import numpy as np

a, gamma = 1.0, 1.4
N, L = 16, 16.0
dx = L / N
x = (np.arange(N) + 0.5) * dx
k = 2 * np.pi / L
rho = 1 + 0.1 * np.sin(k * x)
m = 0.05 * np.cos(k * x)
n = 1 + 0.08 * np.cos(2 * k * x)
M = 0.03 * np.sin(k * x)


def minmod(p, q):
    return np.where(p * q <= 0, 0.0, np.where(np.abs(p) < np.abs(q), p, q))


def slopes(f, muscl):
    if not muscl:
        return np.zeros_like(f)
    return minmod(f - np.roll(f, 1), np.roll(f, -1) - f)


def rhs(muscl):
    sr, sm, sn, sM = (slopes(f, muscl) for f in (rho, m, n, M))
    R = lambda f, s: np.roll(f - 0.5 * s, -1)
    Lf = lambda f, s: f + 0.5 * s
    rl, rr = Lf(rho, sr), R(rho, sr)
    ml, mr = Lf(m, sm), R(m, sm)
    ul, ur = ml / rl, mr / rr
    pl, pr = a * rl**gamma, a * rr**gamma
    cl, cr = np.sqrt(gamma * pl / rl), np.sqrt(gamma * pr / rr)
    al = np.maximum(abs(ul) + cl, abs(ur) + cr)
    Fr = 0.5 * (ml + mr) - 0.5 * al * (rr - rl)
    Fm = 0.5 * (ml * ul + pl + mr * ur + pr) - 0.5 * al * (mr - ml)
    nl, nr = Lf(n, sn), R(n, sn)
    Ml, Mr = Lf(M, sM), R(M, sM)
    wl, wr = Ml / nl, Mr / nr
    be = np.maximum(abs(wl), abs(wr)) + 1
    w = M / n
    visc = 0.5 * (n + np.roll(n, -1)) * (np.roll(w, -1) - w) / dx
    Fn = 0.5 * (Ml + Mr) - 0.5 * be * (nr - nl)
    FM = 0.5 * (Ml * wl + nl + Mr * wr + nr) - 0.5 * be * (Mr - Ml) - visc
    drag = rho * n * (M / n - m / rho)
    d = lambda F: -(F - np.roll(F, 1)) / dx
    return d(Fr), d(Fm) + drag, d(Fn), d(FM) - drag


for muscl in (False, True):
    out = rhs(muscl)
    print("muscl" if muscl else "first-order")
    for i in (0, 5, 11):
        print(f"  cell {i}: " + ", ".join(f"{v[i]:.17g}" for v in out))
