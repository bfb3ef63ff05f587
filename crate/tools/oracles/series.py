"""Taylor coefficients (in alpha) of the two-site closed forms, for the small-alpha branch."""
import sympy as sp
a, g = sp.symbols('alpha g2', positive=True)
e0 = -1/(4*g) + 1/(2*a) + (a - 2*g)/2*sp.coth(2*g*a)
y = 4*g*a
e1 = -g + (-a + 4*g*(1 + 2*g*a - a**2) + sp.exp(y)*(-4*g + a + 8*g**2*(a + a**3)))/(4*g*a*(1 + sp.exp(y)*(-1 + 4*g*a)))
for name, e in (("e0", e0), ("e1", e1)):
    s = sp.series(e, a, 0, 6).removeO()
    print(name, [sp.factor(s.coeff(a, k)) for k in range(6)])
