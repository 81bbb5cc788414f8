"""Small-mass decay toward the constant state.

With chi m = 1/2 the deviation u - m decays like exp(-(1 - chi m) t).  The
fitted late-time rates are printed next to that prediction.
"""
import numpy as np

from fracks.dynamics import ModelParams
from fracks.experiments import run_decay_experiment
from fracks.spectral import Field, make_grid
from fracks.timestepper import StepperConfig

g = make_grid(256)
p = ModelParams(alpha_diff=1.0, chi=1.0, mass=0.5)
u0 = Field(g, 0.5 + 0.5 * np.cos(g.points))
rep = run_decay_experiment(u0, p, StepperConfig(t_end=20.0), window=(10.0, 20.0))

print(f"predicted rate           {rep.theoretical_rate(0.0):+.4f}")
print(f"|u - m| in L2            {rep.fitted_rate_l2:+.4f}  (r2 {rep.r_squared:.6f})")
print(f"|u - m| sup              {rep.fitted_rate_sup:+.4f}")
print(f"|W| in L2                {rep.fitted_rate_w:+.4f}  (r2 {rep.r_squared_w:.6f})")
print(f"|Lambda^1/2 (u - m)|     {rep.fitted_rate_h_half:+.4f}  (predicted {rep.theoretical_rate(0.5):+.4f})")
print("passes:", rep.passes())
