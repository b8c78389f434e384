"""Exterior energy of a velocity shell in three dimensions.

Data (0, 1 on 1 < |x| < 2).  The energy that stays outside |x| > |t| + R
tends to 2 pi (8 - max(1, R)^3) / 3.  This prints the closed form, the
value from the radiation profile, and the energy measured at finite t.
The measurement converges like 1/t.
"""

import math

from lightcone import Grid, measure_free_evolution
from lightcone.suites import indicator_state

grid = Grid(16384, 128.0)
shell = indicator_state(grid)

for R in (1.0, 1.5):
    exact = 2 * math.pi * (8 - max(1.0, R) ** 3) / 3
    rep = measure_free_evolution(shell, R, [5.0, 10.0, 20.0, 40.0, 60.0])
    print(f"R = {R}: closed form {exact:.8f}, from the profile {rep.formula:.8f}")
    for t, e in zip(rep.times, rep.measured):
        print(f"  t = {t:5.1f}  measured {e:.6f}  gap {e / rep.formula - 1:+.3%}  t*gap {t * (e - rep.formula):.4f}")
