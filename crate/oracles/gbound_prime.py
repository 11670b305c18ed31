"""Brute-force max |g(chi, psi)| / p over primitive chi and all psi mod p, p <= 61.

Characters are built from a primitive root independently of the Rust code.
"""
import numpy as np
from sympy import primerange, primitive_root

best = (0.0, None)
for p in primerange(3, 62):
    g = primitive_root(p)
    dlog = np.zeros(p, dtype=np.int64)
    x = 1
    for k in range(p - 1):
        dlog[x] = k
        x = x * g % p
    unit = np.arange(p) % p != 0
    t = np.arange(p)
    for a in range(1, p - 1):  # chi nontrivial, hence primitive mod a prime
        def chi(v, a=a):
            v = v % p
            out = np.exp(2j * np.pi * a * dlog[v] / (p - 1))
            return np.where(v % p != 0, out, 0)
        A = chi(t) * np.conj(chi(t + 1))
        B = np.conj(chi(t)) * chi(t + 1)
        arg = (np.outer(t, t) - 1) % p
        for b in range(p - 1):
            M = np.where(arg != 0, np.exp(2j * np.pi * b * dlog[arg] / (p - 1)), 0)
            val = abs(A @ M @ B) / p
            if val > best[0]:
                best = (val, (p, a, b))
print(repr(best[0]), best[1])
