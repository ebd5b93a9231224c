"""Method selection and table assembly on top of the core modules.

The `Solver` wraps one validated model and exposes the quantities the
CLI and the test-suite need: pmf tables over start-point rectangles,
generating-function values, tail and far-field asymptotics, and the
pair-sequence export.  Truncation orders are chosen adaptively: the
compensation context starts at order 8 and doubles until every
requested entry carries a truncation bound below the tolerance.

Method preference for pmf tables, exactness first:

    FiniteGroupSum > ClosedFormIdentical > CompensationSeries
                   > CouplingRecursion > MonteCarlo
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import compensation as comp
from . import coupling, montecarlo, registry
from .errors import (
    NumericError,
    TruncationInsufficient,
    ValidationFailure,
)
from .kernel import AxisFixedPoints, KernelCurve, axis_fixed_points, find_branch_maximizers
from .model import ModelClass, QuadrantModel, validate

MAX_ORDER = 512
METHODS = ("FiniteGroupSum", "ClosedFormIdentical", "CompensationSeries",
           "CouplingRecursion", "MonteCarlo")


@dataclass
class ContactPmf:
    """Table of f_n(i,j) over start points with per-entry error bounds."""

    entries: dict[tuple[int, int, int], float] = field(default_factory=dict)
    truncation_error: dict[tuple[int, int, int], float] = field(default_factory=dict)
    method: dict[tuple[int, int], str] = field(default_factory=dict)

    def probability(self, i, j, n):
        return self.entries[(i, j, n)]

    def bound(self, i, j, n):
        return self.truncation_error[(i, j, n)]

    def add_rows(self, i, j, probs, bounds, method):
        for n, (p, b) in enumerate(zip(probs, bounds)):
            self.entries[(i, j, n)] = float(p)
            self.truncation_error[(i, j, n)] = float(b)
        self.method[(i, j)] = method

    def to_csv(self, cumulative: bool = False) -> str:
        lines = ["i,j,n,p,err_bound,method"]
        for (i, j, n) in sorted(self.entries):
            p = self.entries[(i, j, n)]
            if cumulative and n > 0:
                p = sum(self.entries[(i, j, k)] for k in range(n + 1))
            lines.append(f"{i},{j},{n},{p!r},"
                         f"{self.truncation_error[(i, j, n)]!r},"
                         f"{self.method[(i, j)]}")
        return "\n".join(lines) + "\n"


def _is_small_step(dist) -> bool:
    mk, ml = dist.max_offsets()
    return mk <= 1 and ml <= 1


class Solver:
    """One validated model plus the cached analytic machinery."""

    def __init__(self, model: QuadrantModel, tol: float = 1e-12,
                 require_usable: bool = True):
        self.model = model
        self.tol = tol
        self.report = validate(model)
        if require_usable and not self.report.usable:
            failed = ", ".join(c.name for c in self.report.failures())
            raise ValidationFailure(
                f"model fails its {model.model_class.value}-class "
                f"assumptions: {failed}")
        self._curve: KernelCurve | None = None
        self._fp: AxisFixedPoints | None = None
        self._contexts: dict[int, tuple] = {}
        self._finite_ctx = None
        self._row_cache: dict[tuple[int, int, int], comp.PmfRows] = {}

    # -- shared ingredients -------------------------------------------

    @property
    def fixed_points(self) -> AxisFixedPoints:
        if self._fp is None:
            self._fp = axis_fixed_points(self.model.interior)
        return self._fp

    @property
    def curve(self) -> KernelCurve:
        if self._curve is None:
            self._curve = find_branch_maximizers(self.model.interior)
        return self._curve

    @property
    def analytic_method(self) -> str:
        """Best exact/analytic route for this model."""
        if self.report.compensation_ok:
            return ("ClosedFormIdentical"
                    if self.model.has_identical_reflections
                    else "CompensationSeries")
        if (self.model.has_identical_reflections
                and _is_small_step(self.model.interior)):
            try:
                self._finite_context()
                return "FiniteGroupSum"
            except NumericError:
                pass
        if self.report.coupling_ok:
            return "CouplingRecursion"
        return "MonteCarlo"

    def _finite_context(self):
        if self._finite_ctx is None:
            seq = comp.build_sequence(self.model.interior)
            quant = comp.hat_tilde_quantities(seq, self.model)
            prod = comp.coefficient_products(seq, quant, identical=True)
            self._finite_ctx = (seq, quant, prod)
        return self._finite_ctx

    def _context(self, order: int):
        if order not in self._contexts:
            seq = comp.build_sequence(self.curve, order)
            quant = comp.hat_tilde_quantities(seq, self.model)
            prod = comp.coefficient_products(
                seq, quant, identical=self.model.has_identical_reflections)
            self._contexts[order] = (seq, quant, prod)
        return self._contexts[order]

    def compensation_context(self):
        """Context at the smallest adapted order (finite group: exact)."""
        if self.analytic_method == "FiniteGroupSum":
            return self._finite_context()
        return self._context(self._adapted_order or 8)

    _adapted_order: int | None = None

    def _with_adaptive_order(self, fn):
        """Run fn(seq, quantities, products), doubling the truncation
        order on TruncationInsufficient."""
        if self.analytic_method == "FiniteGroupSum":
            return fn(*self._finite_context())
        order = self._adapted_order or 8
        while True:
            try:
                out = fn(*self._context(order))
                self._adapted_order = order
                return out
            except TruncationInsufficient:
                if order >= MAX_ORDER:
                    raise
                order *= 2

    # -- public computations -------------------------------------------

    def sequence(self, order: int = 16) -> comp.CompensationSeries:
        if self.analytic_method == "FiniteGroupSum":
            return self._finite_context()[0]
        return self._context(order)[0]

    def pmf_rows(self, i: int, j: int, n_max: int) -> comp.PmfRows:
        """Analytic pmf row at one start point (origin included)."""
        key = (i, j, n_max)
        if key in self._row_cache:
            return self._row_cache[key]
        if (i, j) == (0, 0):
            row = self._origin_rows(n_max)
        else:
            method = self.analytic_method
            if method in ("FiniteGroupSum", "ClosedFormIdentical",
                          "CompensationSeries"):
                row = self._with_adaptive_order(
                    lambda s, q, p: comp.extract_pmf(s, p, i, j, n_max,
                                                     tol=self.tol))
            elif method == "CouplingRecursion":
                row = self._coupling_rows(i, j, n_max)
            else:
                row = self._montecarlo_rows(i, j, n_max)
        self._row_cache[key] = row
        return row

    def _origin_rows(self, n_max: int) -> comp.PmfRows:
        # one-step rule at the origin: f_0 = 0 (the start is a contact),
        # f_n(0,0) = sum_q q_{k,l} f_{n-1}(k,l)
        probs = np.zeros(n_max + 1)
        bounds = np.zeros(n_max + 1)
        parts = {}
        for jmp, w in self.model.origin.items():
            parts[jmp] = (w, self.pmf_rows(jmp.k, jmp.l, max(n_max - 1, 0)))
        method = None
        for n in range(1, n_max + 1):
            for jmp, (w, row) in parts.items():
                probs[n] += w * row.probabilities[n - 1]
                bounds[n] += w * row.bounds[n - 1]
                method = row.method
        return comp.PmfRows(0, 0, probs, bounds, method or self.analytic_method)

    def _coupling_rows(self, i: int, j: int, n_max: int) -> comp.PmfRows:
        law = coupling.check_identical(self.model)
        f0 = self.f0_table(*coupling.required_f0_shape(i, j, law, n_max))
        layers = coupling.pmf_layers(f0, law, n_max)
        probs = np.array([layers[n][i, j] for n in range(n_max + 1)])
        err0 = 1e-14 if f0.provenance == "ClosedForm" else self.tol
        bounds = np.full(n_max + 1, 2.0 * err0)
        return comp.PmfRows(i, j, probs, bounds, "CouplingRecursion")

    def _montecarlo_rows(self, i: int, j: int, n_max: int,
                         paths: int = 200_000) -> comp.PmfRows:
        cfg = montecarlo.SimConfig(paths=paths)
        est = montecarlo.simulate_contacts(self.model, (i, j), cfg,
                                           self.fixed_points)
        probs = np.zeros(n_max + 1)
        bounds = np.zeros(n_max + 1)
        for n in range(n_max + 1):
            p, se = est.pmf_hat.get(n, (0.0, 0.0))
            probs[n] = p
            bounds[n] = 3.0 * se + 1.0 / paths + cfg.escape_epsilon
        return comp.PmfRows(i, j, probs, bounds, "MonteCarlo")

    def f0_table(self, imax: int, jmax: int) -> coupling.F0Table:
        """No-contact table, sourced in the order
        closed form > compensation > Monte Carlo."""
        ref = registry.lookup_by_hash(self.model)
        values = np.zeros((imax + 1, jmax + 1))
        if ref is not None and ref.known_f0 is not None:
            for i in range(imax + 1):
                for j in range(jmax + 1):
                    values[i, j] = ref.known_f0(i, j)
            return coupling.F0Table(values, "ClosedForm")
        if self.report.compensation_ok or self.analytic_method == "FiniteGroupSum":
            for i in range(imax + 1):
                for j in range(jmax + 1):
                    if (i, j) == (0, 0) or i == 0 or j == 0:
                        continue  # f_0 vanishes on the axes
                    row = self._with_adaptive_order(
                        lambda s, q, p, i=i, j=j: comp.extract_pmf(
                            s, p, i, j, 0, tol=self.tol))
                    values[i, j] = row.probabilities[0]
            return coupling.F0Table(values, "Compensation")
        cfg = montecarlo.SimConfig(paths=100_000)
        for i in range(1, imax + 1):
            for j in range(1, jmax + 1):
                est = montecarlo.simulate_contacts(self.model, (i, j), cfg,
                                                   self.fixed_points)
                values[i, j] = est.pmf_hat.get(0, (0.0, 0.0))[0]
        return coupling.F0Table(values, "MonteCarlo")

    def contact_table(self, rect: tuple[int, int, int, int], n_max: int,
                      method: str | None = None) -> ContactPmf:
        """pmf table over the start rectangle [i0..i1] x [j0..j1]."""
        i0, i1, j0, j1 = rect
        if i1 < i0 or j1 < j0:
            raise ValueError("empty start-point rectangle")
        table = ContactPmf()
        for i in range(i0, i1 + 1):
            for j in range(j0, j1 + 1):
                row = (self.pmf_rows(i, j, n_max) if method is None
                       else self._rows_with_method(i, j, n_max, method))
                table.add_rows(i, j, row.probabilities, row.bounds, row.method)
        return table

    def _rows_with_method(self, i, j, n_max, method) -> comp.PmfRows:
        if method not in METHODS:
            raise ValueError(f"unknown method {method!r}")
        if method == self.analytic_method or (i, j) == (0, 0):
            return self.pmf_rows(i, j, n_max)
        if method in ("FiniteGroupSum", "ClosedFormIdentical",
                      "CompensationSeries"):
            want_finite = method == "FiniteGroupSum"
            if want_finite != (self.analytic_method == "FiniteGroupSum"):
                raise ValidationFailure(
                    f"method {method} does not apply to this model")
            return self._with_adaptive_order(
                lambda s, q, p: comp.extract_pmf(s, p, i, j, n_max, tol=self.tol))
        if method == "CouplingRecursion":
            return self._coupling_rows(i, j, n_max)
        return self._montecarlo_rows(i, j, n_max)

    def generating_function(self, i: int, j: int, z: float) -> comp.SeriesValue:
        if (i, j) == (0, 0):
            # one-step origin rule carried to the transform:
            # F(0,0,z) = z * sum q_{k,l} F(k,l,z)
            total, bound = 0.0, 0.0
            for jmp, w in self.model.origin.items():
                val = self.generating_function(jmp.k, jmp.l, z)
                total += w * val.value
                bound += w * val.bound
            return comp.SeriesValue(z * total, abs(z) * bound)
        return self._with_adaptive_order(
            lambda s, q, p: comp.evaluate_G(s, p, i, j, z, tol=self.tol))

    def tail(self, i: int, j: int) -> comp.TailAsymptotics:
        return self._with_adaptive_order(
            lambda s, q, p: comp.tail_asymptotics(s, p, i, j))

    def two_term_tail(self, i: int, j: int):
        return self._with_adaptive_order(
            lambda s, q, p: comp.two_term_refinement(s, p, i, j))

    def far_field(self, i: int, j: int, n: int) -> float:
        seq, quant, prod = self.compensation_context()
        return comp.far_field_estimate(self.fixed_points, quant, i, j, n)

    def cdf(self, i: int, j: int, n_max: int) -> np.ndarray:
        rows = self.pmf_rows(i, j, n_max)
        return np.cumsum(rows.probabilities)

    def tail_bounds(self, i: int, j: int, n: int) -> tuple[float, float]:
        law = coupling.check_identical(self.model)
        return coupling.tail_bounds(self.fixed_points, law, (i, j), n)
