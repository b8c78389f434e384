"""Why the power-tail members of the non-radiative space still carry energy
outside the cone at finite times.

f_0 = min(1, R/r) in three dimensions is a static solution, so at time t
the energy in |x| > t + R is the energy of the tail r > t + R, a fraction
R / (t + R) of the whole.  This tends to zero, but slowly; on the grid the
tail is cut at r_max, which changes the fraction to
(1/(t+R) - 1/r_max) / (1/R - 1/r_max).
"""

from lightcone import Grid, ModeIndex, exterior_energy_formula, measure_free_evolution
from lightcone.suites import plr_member

R = 1.0
grid = Grid(2048, 64.0)
f0 = plr_member(grid, ModeIndex(3, 0), R, {0: 1.0})
norm2 = f0.h_norm() ** 2
print(f"|f_0|^2 = {norm2:.6f}, exterior energy from the profile {exterior_energy_formula(f0, R).formula:.2e}")

rep = measure_free_evolution(f0, R, [5.0, 10.0, 20.0, 40.0])
for t, e in zip(rep.times, rep.measured):
    truncated = (1 / (t + R) - 1 / grid.s_max) / (1 / R - 1 / grid.s_max)
    print(f"t = {t:4.0f}: measured fraction {e / norm2:.5f}, expected {truncated:.5f}, untruncated R/(t+R) {R / (t + R):.5f}")
