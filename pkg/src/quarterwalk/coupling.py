"""Identical-reflections machinery: layer recursion, CDF, tail bounds.

When the three boundary laws coincide (call the common law eta), the
contact pmfs satisfy a first-order recursion in n:

    f_1(x)     = E f_0(x + eta) - f_0(x),
    f_{n+1}(x) = E f_n(x + eta),            n >= 1,

and the distribution function telescopes into a single expectation
P(Z_x <= n) = E f_0(x + eta_1 + ... + eta_n).  Everything here works on
rectangular tables anchored at the origin; each application of the
recursion consumes the table margin by the maximal jump offsets, so the
caller must supply f_0 on an enlarged rectangle.

None of this survives differing horizontal/vertical reflections; such
models are rejected outright.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IdenticalReflectionsRequired, MarginExhausted
from .kernel import AxisFixedPoints
from .model import QuadrantModel, StepDistribution, convolve_power

PROVENANCES = ("ClosedForm", "Compensation", "MonteCarlo")


@dataclass(frozen=True)
class F0Table:
    """No-contact probabilities f_0 on the rectangle [0..I] x [0..J].

    Values vanish on the axes (a start on the boundary is itself a
    contact) and are nondecreasing in each coordinate.
    """

    values: np.ndarray
    provenance: str

    def __post_init__(self):
        if self.values.ndim != 2:
            raise ValueError("f0 table must be 2-dimensional")
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")

    @property
    def imax(self) -> int:
        return self.values.shape[0] - 1

    @property
    def jmax(self) -> int:
        return self.values.shape[1] - 1

    def at(self, i: int, j: int) -> float:
        if not (0 <= i <= self.imax and 0 <= j <= self.jmax):
            raise MarginExhausted(
                f"f0 value at ({i},{j}) outside the trusted rectangle "
                f"[0..{self.imax}]x[0..{self.jmax}]")
        return float(self.values[i, j])


def check_identical(model: QuadrantModel) -> StepDistribution:
    if not model.has_identical_reflections:
        raise IdenticalReflectionsRequired(
            "the coupling recursion does not hold when horizontal and "
            "vertical reflections differ")
    return model.origin


def required_f0_shape(imax: int, jmax: int, boundary_law: StepDistribution,
                      n_max: int) -> tuple[int, int]:
    """Rectangle of f_0 values needed to produce n_max layers on
    [0..imax] x [0..jmax]."""
    koff, loff = boundary_law.max_offsets()
    return imax + n_max * koff, jmax + n_max * loff


def recursion_step(f_prev: np.ndarray, boundary_law: StepDistribution,
                   first_step: bool = False) -> np.ndarray:
    """One layer of the recursion; the output rectangle shrinks by the
    maximal jump offsets of the boundary law."""
    koff, loff = boundary_law.max_offsets()
    kmin, lmin = boundary_law.min_offsets()
    if kmin < 0 or lmin < 0:
        raise IdenticalReflectionsRequired(
            "boundary law with negative components is outside the "
            "coupling setting")
    ni = f_prev.shape[0] - koff
    nj = f_prev.shape[1] - loff
    if ni <= 0 or nj <= 0:
        raise MarginExhausted(
            "table too small for another recursion step "
            f"(shape {f_prev.shape}, offsets ({koff},{loff}))")
    out = np.zeros((ni, nj))
    for j, w in boundary_law.items():
        out += w * f_prev[j.k:j.k + ni, j.l:j.l + nj]
    if first_step:
        out -= f_prev[:ni, :nj]
    return out


def pmf_layers(f0: F0Table, boundary_law: StepDistribution,
               n_max: int) -> list[np.ndarray]:
    """Tables f_0, f_1, ..., f_{n_max}; layer n covers the rectangle that
    remains after eating n margins."""
    layers = [np.array(f0.values, dtype=float)]
    for n in range(1, n_max + 1):
        layers.append(recursion_step(layers[-1], boundary_law,
                                     first_step=(n == 1)))
    return layers


def cdf_via_convolution(f0: F0Table, boundary_law: StepDistribution,
                        x: tuple[int, int], n: int) -> float:
    """P(Z_x <= n) = E f_0(x + eta_1 + ... + eta_n), evaluated exactly
    under the n-fold convolution of the boundary law."""
    i, j = x
    conv = convolve_power(boundary_law, n)
    return float(np.sum([w * f0.at(i + jp.k, j + jp.l)
                         for jp, w in conv.items()]))


def projection_rates(fixed_points: AxisFixedPoints,
                     boundary_law: StepDistribution) -> tuple[float, float]:
    """r_1 = E alpha_1^{k-component of eta}, r_2 = E beta_{-1}^{l-component}."""
    a1, bm1 = fixed_points
    r1 = sum(w * a1 ** jp.k for jp, w in boundary_law.items())
    r2 = sum(w * bm1 ** jp.l for jp, w in boundary_law.items())
    return r1, r2


def tail_bounds(fixed_points: AxisFixedPoints,
                boundary_law: StepDistribution,
                x: tuple[int, int], n: int) -> tuple[float, float]:
    """Two-sided sandwich for P(Z_x > n):

        (1/2) (alpha_1^i r_1^n + beta_-1^j r_2^n) <= P(Z_x > n)
                                  <= alpha_1^i r_1^n + beta_-1^j r_2^n.
    """
    i, j = x
    r1, r2 = projection_rates(fixed_points, boundary_law)
    upper = fixed_points.alpha_1 ** i * r1 ** n + fixed_points.beta_minus1 ** j * r2 ** n
    return 0.5 * upper, upper
