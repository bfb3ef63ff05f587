"""Radial moments (50-digit quadrature) and finite-cutoff two-site ED reference values."""
import mpmath as mp
import numpy as np
from rotor_ed_sector import sector_h

mp.mp.dps = 50


def moments(lam, g):
    lam = mp.mpf(lam); g = mp.mpf(g)
    w = lambda r: mp.e ** (-lam ** 2 * (r ** 2 - g ** 2) ** 2 / (4 * g ** 2))
    pts = [0, g - 6 * g / lam if g - 6 * g / lam > 0 else g / 2, g, g + 6 * g / lam, g + 40 * g / lam + 10]
    out = {}
    for k in (0, 1, 2, 4):
        out[k] = mp.quad(lambda r: r ** (2 + k) * w(r), pts)
    return out


def vac_overlap(lam, g):
    """<0_Fock|omega(lam)> for one site (normalized states)."""
    lam = mp.mpf(lam); g = mp.mpf(g)
    m0 = moments(lam, g)[0]
    I = mp.quad(lambda r: r ** 2 * mp.e ** (-r ** 2 / 2) * mp.e ** (-lam ** 2 * (r ** 2 - g ** 2) ** 2 / (8 * g ** 2)), [0, g, g + 40 * g / lam + 10])
    return mp.pi ** (-0.75) * 4 * mp.pi * I / mp.sqrt(4 * mp.pi * m0)


if __name__ == "__main__":
    for lam in ["1", "3.2", "10", "20"]:
        m = moments(lam, 1)
        print(f"lam={lam} m0={mp.nstr(m[0],20)} m1={mp.nstr(m[1],20)} m2={mp.nstr(m[2],20)} m4={mp.nstr(m[4],20)} r2={mp.nstr(m[2]/m[0],15)} r1sq={mp.nstr((m[1]/m[0])**2,15)} r4={mp.nstr(m[4]/m[0],15)} vac_amp={mp.nstr(vac_overlap(lam,1),15)}")
    g2 = 1.0
    ref = np.linalg.eigvalsh(sector_h(g2, 3))
    print("O3 lmax3", ref[0] / 2, ref[1] - ref[0])
    for lam in ["1", "3.2", "10"]:
        m = moments(lam, 1)
        r1sq = float((m[1] / m[0]) ** 2); r2 = float(m[2] / m[0])
        H = sector_h(g2, 3)
        # interaction part scales with <r>^2 / g^2; kinetic unchanged
        kin = np.diag(np.diag(H))
        inter = H - kin
        Hl = kin + inter * (r1sq / g2) + 2 * (r2 - g2) * np.eye(len(H))
        w = np.linalg.eigvalsh(Hl)
        print(f"lam={lam} E0/2={w[0]/2:.10f} gap={w[1]-w[0]:.10f} dE0={abs(w[0]/2-ref[0]/2):.3e} dgap={abs((w[1]-w[0])-(ref[1]-ref[0])):.3e}")
