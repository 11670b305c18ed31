"""max over primitive chi mod 959 = 7 * 137 of |L(1/2, chi)| / 959^(1/6), via mpmath Hurwitz zeta."""
import numpy as np
from mpmath import mp, zeta, mpf
from sympy import primitive_root
from math import gcd

mp.dps = 20
q, p1, p2 = 959, 7, 137
g1, g2 = primitive_root(p1), primitive_root(p2)
def dlog(p, g):
    d, x = {}, 1
    for k in range(p - 1):
        d[x] = k
        x = x * g % p
    return d
d1, d2 = dlog(p1, g1), dlog(p2, g2)
units = [a for a in range(1, q) if gcd(a, q) == 1]
Z = np.array([complex(zeta(mpf(1) / 2, mpf(a) / q)) for a in units])
e1 = np.array([d1[a % p1] for a in units])
e2 = np.array([d2[a % p2] for a in units])
best = 0.0
for x in range(1, p1 - 1 + 1):
    if x % (p1 - 1) == 0:
        continue
    for y in range(1, p2 - 1):
        vals = np.exp(2j * np.pi * (x * e1 / (p1 - 1) + y * e2 / (p2 - 1)))
        best = max(best, abs(vals @ Z) * q ** -0.5 / q ** (1 / 6))
print(repr(best))
