"""Dense reference diagonalization of the truncated O(3) rotor Hamiltonian.

Matrix elements come from sympy's exact Wigner 3j symbols, independently of
the Rust implementation. Prints E0/L, E1/L and gap for a few settings.
"""
import itertools
import sys

import numpy as np
from sympy import sqrt as ssqrt
from sympy.physics.wigner import wigner_3j


def x_elem(l1, m1, M, l2, m2):
    if abs(l1 - l2) != 1 or -m1 + M + m2 != 0:
        return 0.0
    v = (-1) ** m1 * ssqrt((2 * l1 + 1) * (2 * l2 + 1)) * wigner_3j(l1, 1, l2, 0, 0, 0) * wigner_3j(l1, 1, l2, -m1, M, m2)
    return float(v)


def site_states(lmax):
    return [(l, m) for l in range(lmax + 1) for m in range(-l, l + 1)]


def hamiltonian(L, g2, lmax, radius_sq=None, onsite=0.0):
    loc = site_states(lmax)
    d = len(loc)
    # n.n = -X_{+1}X_{-1} - X_{-1}X_{+1} + X_0 X_0
    X = {M: np.array([[x_elem(l1, m1, M, l2, m2) for (l2, m2) in loc] for (l1, m1) in loc]) for M in (-1, 0, 1)}
    ndotn = -np.kron(X[1], X[-1]) - np.kron(X[-1], X[1]) + np.kron(X[0], X[0])
    kin = np.diag([l * (l + 1) / (2 * g2) for (l, m) in loc])
    I = np.eye(d)
    dim = d ** L
    H = np.zeros((dim, dim))
    coupling = g2 if radius_sq is None else radius_sq

    def embed(ops):
        out = np.array([[1.0]])
        for o in ops:
            out = np.kron(out, o)
        return out

    for x in range(L):
        ops = [I] * L
        ops[x] = kin
        H += embed(ops)
    for x in range(L):
        y = (x + 1) % L
        # two-site operator on (x, y)
        if y == x + 1:
            ops = [I] * (L - 1)
            ops[x] = ndotn
            # build with kron placing 2-site op at x
            left = embed([I] * x)
            right = embed([I] * (L - x - 2))
            H -= coupling * np.kron(np.kron(left, ndotn), right)
        else:
            # periodic wrap: sites L-1 and 0
            for M, c in ((1, -1.0), (-1, -1.0), (0, 1.0)):
                Mo = -M
                ops = [I] * L
                ops[x] = X[M]
                ops[y] = X[Mo]
                H -= coupling * c * embed(ops)
    H += onsite * np.eye(dim)
    return H


if __name__ == "__main__":
    for (L, g2, lmax) in [(2, 1.0, 3), (2, 1.0, 2), (2, 0.5, 3), (2, 2.0, 3), (2, 4.0, 3), (2, 0.5, 2), (2, 2.0, 2), (2, 4.0, 2), (2, 0.1, 3), (2, 0.1, 2), (2, 10.0, 3), (2, 10.0, 2), (3, 1.0, 2)]:
        H = hamiltonian(L, g2, lmax)
        assert np.allclose(H, H.T)
        w = np.linalg.eigvalsh(H)
        print(f"L={L} g2={g2} lmax={lmax} dim={H.shape[0]} E0/L={w[0]/L:.12f} E1/L={w[1]/L:.12f} gap={w[1]-w[0]:.12f} w[:5]={np.round(w[:5],10)}")
