"""Single-photon pulse hitting a two-transition cavity: who comes out where.

A Gaussian pulse drives the left port.  Depending on coupling strength and
pulse length, the photon leaves through the right port with its polarization
flipped (the useful channel) or bounces back unflipped.
"""

import numpy as np

from cavnet import (
    PulseParams,
    adiabatic_output_coefficients,
    flip_probability_sweep,
    integrate_pulse,
)

# One well-resolved working point: strong coupling, long pulse
params = PulseParams(g_L=5.0, g_R=5.0, kappa=1.0, tau=10.0)
res = integrate_pulse(params)
print("matched couplings, g = 5 kappa, kappa tau = 10")
print(f"  P(flip)    = {res.P_flip:.6f}")
print(f"  P(no flip) = {res.P_noflip:.6f}")
print(f"  total      = {res.P_flip + res.P_noflip:.9f}   (flux conservation)")

# The trajectory itself: cavity and atom amplitudes around the pulse peak
grid_times = res.time_grid
peak = np.argmax(np.abs(res.f_in))
print("\namplitudes near the pulse peak (t = 0):")
for offset in (-400, 0, 400):
    i = peak + offset
    print(
        f"  t={grid_times[i]:+7.2f}  |c_L|={abs(res.c_L[i]):.4f}"
        f"  |c_R|={abs(res.c_R[i]):.4f}  |c_e|={abs(res.c_e[i]):.4f}"
    )

# Slow-pulse limit: the integrator lands on the steady-state coefficients
slow = PulseParams(g_L=1.0, g_R=2.0, kappa=1.0, tau=50.0)
r, t = adiabatic_output_coefficients(slow)
res_slow = integrate_pulse(slow)
print("\nmismatched couplings g_L=1, g_R=2, very long pulse:")
print(f"  steady-state prediction: P(flip) = t^2 = {t * t:.6f}")
print(f"  integrated trajectory:   P(flip) =       {res_slow.P_flip:.6f}")

# A small sweep: flip probability grows monotonically with pulse length
print("\nflip probability versus pulse length:")
taus = [0.5, 1.0, 2.0, 5.0, 10.0, 20.0]
rows = flip_probability_sweep([1.0], taus)
for row in rows:
    bar = "#" * int(50 * row.P_flip)
    print(f"  kappa tau = {row.kappa_tau:5.1f}  P = {row.P_flip:.4f}  {bar}")
