"""Return probability |<Omega|e^{-itH}|Omega>|^2: fixed radius vs radial average (2D Gauss quadrature)."""
import numpy as np
from rotor_ed_sector import sector_h
from rotor_ed import site_states


def parts(g2, lmax):
    H = sector_h(g2, lmax)
    kin = np.diag(np.diag(H))
    nn = -(H - kin) / (2 * g2)  # n0.n1 matrix (single link)
    return kin, nn


def amp(kin, nn, g2, r0, r1, t):
    # two links: sum [ (r0^2+r1^2)/2 - g2 - r0 r1 n.n ] doubled
    H = kin + 2 * (0.5 * (r0 ** 2 + r1 ** 2) - g2) * np.eye(len(kin)) - 2 * r0 * r1 * nn
    w, v = np.linalg.eigh(H)
    return np.sum(np.abs(v[0, :]) ** 2 * np.exp(-1j * t * w))


def radial_nodes(lam, g, n=200):
    # Gauss-Legendre on a window around g for density r^2 exp(-lam^2 (r^2-g^2)^2/(4g^2))
    lo = max(0.0, g - 10.0 / lam * g - 2.0 / lam); hi = g + 10.0 / lam * g + 2.0 / lam
    if lam < 3:
        lo, hi = 0.0, g + 8.0
    x, w = np.polynomial.legendre.leggauss(n)
    r = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
    w = 0.5 * (hi - lo) * w
    d = r ** 2 * np.exp(-lam ** 2 * (r ** 2 - g ** 2) ** 2 / (4 * g ** 2))
    p = w * d
    return r, p / p.sum()


if __name__ == "__main__":
    g2 = 1.0; g = 1.0
    kin, nn = parts(g2, 3)
    assert kin.shape[0] == 44
    for t in [0.5, 1.0, 2.0, 4.0]:
        a3 = amp(kin, nn, g2, g, g, t)
        line = f"t={t} O3={abs(a3)**2:.6f}"
        for lam in [3.2, 10.0, 20.0]:
            r, p = radial_nodes(lam, g, 120)
            A = 0
            for i in range(len(r)):
                for j in range(len(r)):
                    A += p[i] * p[j] * amp(kin, nn, g2, r[i], r[j], t)
            line += f" lam{lam}={abs(A)**2:.6f}"
        print(line)
