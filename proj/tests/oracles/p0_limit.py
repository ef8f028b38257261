"""I - P_4(xi) - P0 for the normalized symbol at small xi, in 50-digit arithmetic.

The first three eigenprojections sum to I - P_4, so this is the deviation
of sum_{j<=3} P_j(xi) from P0. The leading term is first order in xi.
"""
import mpmath as mp

mp.mp.dps = 50


def A(x):
    return mp.matrix([[0, -1j * x, 0, 0], [-1j * x, -1, 0, 1],
                      [0, 0, 0, -1j * x], [0, 1, -1j * x, -1 - x * x]])


P0 = mp.matrix([[1, 0, 0, 0], [0, .5, 0, .5], [0, 0, 1, 0], [0, .5, 0, .5]])
for x in (mp.mpf("1e-3"), mp.mpf("1e-4")):
    E, R = mp.eig(A(x))
    k = min(range(4), key=lambda i: abs(E[i] + 2))
    L = mp.inverse(R)
    D = mp.eye(4) - R[:, k] * L[k, :] - P0
    print(f"xi={mp.nstr(x, 3)}  max |entry| = {mp.nstr(max(abs(D[i, j]) for i in range(4) for j in range(4)), 8)}")
