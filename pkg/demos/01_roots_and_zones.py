"""Characteristic roots across the three frequency zones.

Prints the two root pairs for a = 1 and a = 2 on a log sweep and compares
them with the small- and large-frequency expansions.  The slow pair at
large xi is what separates the two wave-speed regimes: its real part stays
near -1/4 when a = 1 and collapses like xi^-2 otherwise.
"""
import numpy as np

from timoshenko_lab import expand_roots_large, expand_roots_small, solve_quartic

for a in (1.0, 2.0):
    print(f"a = {a:g}")
    print(f"{'xi':>10} {'pair 1':>26} {'pair 2':>26}")
    for xi in np.geomspace(1e-2, 1e2, 9):
        q = solve_quartic(a, xi)
        p1 = complex(q.lam_R1, q.lam_I1)
        p2 = complex(q.lam_R2, q.lam_I2)
        print(f"{xi:10.3g} {p1.real:12.5g}{p1.imag:+12.5g}j {p2.real:12.5g}{p2.imag:+12.5g}j")
    small = expand_roots_small(a, 0.05)
    large = expand_roots_large(a, 50.0)
    qs, ql = solve_quartic(a, 0.05), solve_quartic(a, 50.0)
    print(f"  slow pair at xi=0.05: exact {qs.lam_R2:.6e}, expansion {small.lam_R2:.6e}")
    print(f"  pair 2 at xi=50:      exact {ql.lam_R2:.6e}, expansion {large.lam_R2:.6e}")
    print()
