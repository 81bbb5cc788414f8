"""A modulus of continuity for a large datum.

The primitive of u0 = 0.5 + 50 cos x is evolved under the Burgers flow.  A
certificate is built from the state at t0 = 0.01 and the solution is scanned
against it at every monitored time.  The modulus constants are huge, so they
are reported through their logarithms.
"""
import numpy as np

from fracks.dynamics import ModelParams
from fracks.experiments import run_certificate_experiment
from fracks.spectral import Field, make_grid
from fracks.timestepper import StepperConfig

g = make_grid(512)
u0 = Field(g, 0.5 + 50 * np.cos(g.points))
p = ModelParams(alpha_diff=1.0, chi=1.0, mass=0.5)
cert, cond, rep, mon = run_certificate_experiment(u0, p, StepperConfig(t_end=5.0), t0=0.01)

print(f"K = {cert.K:.6f}  ln B = {cert.log_B:.2f}  ln xi0 = {cert.log_xi0:.2f}  ln N = {cert.log_N:.2f}")
print(f"conditions hold: {cond.all_ok}")
for name, m in cond.margins.items():
    print(f"  {name:<24s} log margin {m:.3g}")
print(f"run status {rep.status.value}, {len(mon.margins)} scans, min margin {mon.min_margin:.4g}")
