"""High-precision minimization of the two-site coupled-cluster closed forms."""
import mpmath as mp

mp.mp.dps = 40


def e0(g2, a):
    g2 = mp.mpf(g2); a = mp.mpf(a)
    return -1 / (4 * g2) + 1 / (2 * a) + (a - 2 * g2) / 2 * mp.coth(2 * g2 * a)


def e1(g2, a):
    g2 = mp.mpf(g2); a = mp.mpf(a)
    y = 4 * g2 * a
    num = -a + 4 * g2 * (1 + 2 * g2 * a - a ** 2) + mp.e ** y * (-4 * g2 + a + 8 * g2 ** 2 * (a + a ** 3))
    den = 4 * g2 * a * (1 + mp.e ** y * (-1 + 4 * g2 * a))
    return -g2 + num / den


def argmin(f, lo, hi):
    # golden section at 40 digits, then polish with findroot on the derivative
    gr = (mp.sqrt(5) - 1) / 2
    a, b = mp.mpf(lo), mp.mpf(hi)
    c = b - gr * (b - a); d = a + gr * (b - a)
    for _ in range(200):
        if f(c) < f(d):
            b = d
        else:
            a = c
        c = b - gr * (b - a); d = a + gr * (b - a)
    x = (a + b) / 2
    return x, f(x)


if __name__ == "__main__":
    for g2 in ["0.05", "0.1", "0.5", "1", "2", "4", "10"]:
        a0, v0 = argmin(lambda a: e0(g2, a), mp.mpf("1e-12"), 4 * mp.mpf(g2))
        a1, v1 = argmin(lambda a: e1(g2, a), mp.mpf("1e-6"), 4 * mp.mpf(g2))
        print(f"g2={g2} alpha0*={mp.nstr(a0,12)} E0/2={mp.nstr(v0,15)} alpha1*={mp.nstr(a1,12)} E1/2={mp.nstr(v1,15)} gap={mp.nstr(2*(v1-v0),12)}")
    print("e0(10,1)=", mp.nstr(e0(10, 1), 15), "e1(10,1)=", mp.nstr(e1(10, 1), 15))
    for a in ["0.2", "0.5", "0.839", "1.5"]:
        for g2 in ["0.5", "1", "4"]:
            print(f"e0({g2},{a})={mp.nstr(e0(g2,a),15)} e1={mp.nstr(e1(g2,a),15)}")
    print("e1 small alpha g2=1:", [mp.nstr(e1(1, mp.mpf(10) ** -k), 15) for k in range(1, 8)])
    print("e1 small alpha g2=0.1:", [mp.nstr(e1("0.1", mp.mpf(10) ** -k), 15) for k in range(1, 8)])
