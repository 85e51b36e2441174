"""Growth of w and psi and convergence to the diffusion-plate profiles.

With a Gaussian initial velocity (non-zero mean) the displacement grows
like t^(3/4) and the rotation like t^(1/4).  The distance to the profile
built from the kernel G grows only like t^(-1/4) relative to t^(3/4),
so the profile captures the leading behaviour.
"""
from timoshenko_lab import ExperimentConfig, Generator, InitialData
from timoshenko_lab.experiments import run_cancellation_energy, run_growth, run_profile_error

cfg = ExperimentConfig(a=1.0, data=InitialData(w1=Generator("gaussian")), n_times=13)

g = run_growth(cfg)
print("t          ||w||        ||psi||")
for t, w, p in zip(g.times, g.series["norm_w_l2"], g.series["norm_psi_l2"]):
    print(f"{t:9.1f}  {w:11.5g}  {p:11.5g}")
for k, r in g.rates.items():
    print(f"{k:14s} {r.exponent:+.4f} +- {r.stderr:.1e}")

pe = run_profile_error(cfg)
print("\nprofile error exponents")
for k, r in pe.rates.items():
    print(f"{k:20s} {r.exponent:+.4f}")

ce = run_cancellation_energy(cfg)
print("\nenergy components: the shear combination decays although w_x and psi grow")
for k in ("shear", "w_x", "psi", "w_t", "a_psi_x", "psi_t", "energy_l2"):
    print(f"{k:10s} {ce.rates[k + '_exponent'].exponent:+.4f}")
