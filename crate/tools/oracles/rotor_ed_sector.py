"""Total-M=0 sector diagonalization for two sites at larger l_max (reference values)."""
import sys
import numpy as np
from rotor_ed import x_elem, site_states


def sector_h(g2, lmax):
    loc = site_states(lmax)
    states = [(a, b) for a in loc for b in loc if a[1] + b[1] == 0]
    idx = {s: i for i, s in enumerate(states)}
    n = len(states)
    H = np.zeros((n, n))
    for i, ((l0, m0), (l1, m1)) in enumerate(states):
        H[i, i] = l0 * (l0 + 1) / (2 * g2) + l1 * (l1 + 1) / (2 * g2)
    for i, s in enumerate(states):
        for j, t in enumerate(states):
            (l0, m0), (l1, m1) = t
            (k0, n0), (k1, n1) = s
            v = 0.0
            for M, c in ((1, -1.0), (-1, -1.0), (0, 1.0)):
                v += c * x_elem(l0, m0, M, k0, n0) * x_elem(l1, m1, -M, k1, n1)
            H[j, i] -= 2 * g2 * v  # two links between the same pair of sites
    return H


if __name__ == "__main__":
    for g2 in [4.0, 10.0]:
        for lmax in [3, 5, 7, 9, 10]:
            w = np.linalg.eigvalsh(sector_h(g2, lmax))
            print(f"g2={g2} lmax={lmax} E0/2={w[0]/2:.10f} gap={w[1]-w[0]:.10f}")
