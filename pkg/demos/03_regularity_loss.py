"""High-frequency decay with equal and unequal wave speeds.

For a = 1 every frequency decays at a rate near 1/4.  For a = 2 the slow
branch decays at a rate proportional to xi^-2, so doubling xi divides the
rate by about four.
"""
from timoshenko_lab.experiments import frequency_envelope_rate

for a in (1.0, 2.0):
    print(f"a = {a:g}")
    prev = None
    for xi in (10.0, 20.0, 40.0, 80.0):
        r = frequency_envelope_rate(a, xi).exponent
        ratio = "" if prev is None else f"   ratio to previous {prev / r:6.3f}"
        print(f"  xi = {xi:5.1f}: envelope rate {r:.5e}{ratio}")
        prev = r
