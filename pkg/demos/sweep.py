"""Phase sweep over diffusion order and amplitude.

Each cell runs u0 = 1 + A cos x to T = 1 on 512 points and is classified
as regular or blowup.  Larger amplitudes and weaker diffusion tip cells into
blowup.
"""
from fracks.dynamics import ModelParams
from fracks.experiments import run_phase_sweep
from fracks.timestepper import StepperConfig

cells = run_phase_sweep([0.5, 1.0, 1.5], [1.0, 10.0, 50.0],
                        ModelParams(alpha_diff=1.0, chi=1.0, mass=1.0),
                        StepperConfig(t_end=1.0), n=512)
print(f"{'alpha':>6s} {'A':>6s}  {'class':<16s} {'max grad':>10s} {'t end':>8s}")
for c in cells:
    print(f"{c.alpha_diff:6.2f} {c.amplitude:6.1f}  {c.classification.value:<16s} "
          f"{c.max_grad:10.3g} {c.t_terminal:8.4f}{'  review' if c.review else ''}")
