"""Boundary local time of drifted reflected random walks in the quarter plane.

The package computes the full distribution of the number of boundary
contacts (visits to the axes) of a reflected walk with positive drift:
exactly, through the compensation series built on the kernel level set,
and approximately, through a certified Monte Carlo oracle.  See the
README for the model classes and the pipeline layout.
"""

from .compensation import (
    CompensationSeries,
    HatTildeQuantities,
    TailAsymptotics,
    build_sequence,
    coefficient_products,
    evaluate_G,
    extract_pmf,
    far_field_estimate,
    far_field_profiles,
    hat_tilde_quantities,
    tail_asymptotics,
)
from .coupling import F0Table, cdf_via_convolution, pmf_layers, recursion_step, tail_bounds
from .kernel import (
    AxisFixedPoints,
    KernelCurve,
    axis_fixed_points,
    branch_inverse_u_star,
    branch_inverse_v_star,
    find_branch_maximizers,
    kernel_eval,
)
from .model import (
    Jump,
    ModelClass,
    QuadrantModel,
    StepDistribution,
    atom,
    convolve_power,
    drift,
    load_model,
    parse_model_config,
    save_model,
    step,
    validate,
)
from .montecarlo import (
    SimConfig,
    SimEstimate,
    estimate_conditional_next,
    estimate_splitting,
    simulate_contacts,
)
from .pipeline import ContactPmf, Solver
from . import registry

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
