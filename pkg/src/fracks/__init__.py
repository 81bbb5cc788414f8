"""Pseudospectral simulation and verification engine for the periodic critical
fractional Keller-Segel system and its modified Burgers reduction."""
from .spectral import (Field, Grid, NormSet, antiderivative, derivative,
                       fractional_laplacian, hilbert, lambda_kernel_quadrature,
                       make_grid, norms, solve_poisson_zero_mean)
from .dynamics import Model, ModelParams, State, rhs
from .report import RunReport, Status
from .timestepper import StepperConfig, adapt_dt, integrate, phi_functions, step
from .correspondence import CorrespondencePack, primitive_datum, recover_v, roundtrip_error
from .certificate import (ModulusCertificate, build_certificate, check_conditions,
                          modulus_eval, radial_stationary, scan_violation)
from .experiments import (DecayReport, SweepCell, fit_decay_rate, monitor_inequalities,
                          run_decay_experiment, run_phase_sweep)
from .config import RunConfig, parse_config
from .cli import cli_main

__version__ = "0.1.0"
