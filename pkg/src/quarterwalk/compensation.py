"""Compensation series: sequence, coefficient products, pmf extraction.

The generating function of the boundary contact count from (i, j) is an
alternating sum of product terms

    G(i,j,z) = sum_m [ c_m(z) a_m^i b_m^j + d_{m+1}(z) a_{m+1}^i b_m^j ],

where the pairs (a_m, b_m) walk down the kernel level set via the
branch inverses, and the rational coefficients c_m, d_m obey

    c_0 = 1,
    d_{m+1} = -c_m (1 - vhat_m z) / (1 - vtilde_{m+1} z),
    c_m     = -d_m (1 - htilde_m z) / (1 - hhat_m z),

with the hat/tilde quantities being boundary-law expectations of
a^k b^l at neighbouring pairs.  Every coefficient is a signed product
of first-order factors (1 - a z)/(1 - b z); they are kept in that
factored form throughout, which makes evaluation, Taylor extraction
(one linear pass per factor) and pole bookkeeping exact and cheap.

Three concrete regimes:

* general singular walks: two-sided infinite sum, truncated at order M
  with a certified geometric tail bound;
* identical reflections: the products telescope to single-factor
  ratios, giving the closed geometric form per term;
* finite group (identical reflections, non-singular small-step walks):
  the pair sequence is periodic and one period is an exact finite sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    BranchEscape,
    NumericError,
    PoleAtEvaluation,
    PoleCollision,
    TruncationInsufficient,
)
from .kernel import AxisFixedPoints, KernelCurve, conjugate_alpha, conjugate_beta
from .model import ModelClass, QuadrantModel, StepDistribution

FINITE_GROUP_TOL = 1e-10    # return distance to (1,1) that closes the group
FINITE_GROUP_CAP = 128      # iterations before giving up on closure
TIE_TOL = 1e-12             # |vtilde_1 - htilde_0| below this is a tie
POLE_GAP = 1e-9             # minimum pole separation from 1/rate
_EPS = np.finfo(float).eps


# -- the pair sequence -----------------------------------------------------


@dataclass(frozen=True)
class CompensationSeries:
    """Pairs (alpha_m, beta_m) on the kernel level set.

    Infinite regime: pairs for m in [-M, M+1], strictly decreasing away
    from (alpha_0, beta_0) = (1, 1) with a geometric decay certificate.
    Finite-group regime: pairs for one period m in [0, P], period P.
    """

    pairs: Mapping[int, tuple[float, float]]
    order: int
    decay_ratio: float | None = None
    decay_constant: float | None = None
    period: int | None = None

    @property
    def finite_group(self) -> bool:
        return self.period is not None

    def pair(self, m: int) -> tuple[float, float]:
        if self.period is not None:
            return self.pairs[m % self.period]
        return self.pairs[m]

    def alpha(self, m: int) -> float:
        return self.pair(m)[0]

    def beta(self, m: int) -> float:
        return self.pair(m)[1]

    def m_range(self) -> range:
        """Index range of the G-sum terms."""
        if self.period is not None:
            return range(0, self.period)
        return range(-self.order, self.order + 1)

    def to_csv(self) -> str:
        lines = ["m,alpha,beta"]
        if self.period is not None:
            ms: Sequence[int] = range(0, self.period + 1)
        else:
            ms = range(-self.order, self.order + 2)
        for m in ms:
            a, b = self.pairs[m]
            lines.append(f"{m},{a!r},{b!r}")
        return "\n".join(lines) + "\n"


def _build_from_curve(curve: KernelCurve, order: int) -> CompensationSeries:
    pairs: dict[int, tuple[float, float]] = {0: (1.0, 1.0)}
    a_hi = curve.alpha_hat + 1e-9
    b_hi = curve.beta_tilde + 1e-9
    beta_prev = 1.0
    for m in range(1, order + 2):
        a = curve.u_star(beta_prev)
        b = curve.v_star(a)
        if not (0.0 <= a <= a_hi and 0.0 <= b <= b_hi):
            raise BranchEscape(f"iterate m={m} left the branch rectangle")
        if a >= pairs[m - 1][0] + 1e-15 or b >= beta_prev + 1e-15:
            raise BranchEscape(f"iterate m={m} is not strictly decreasing")
        pairs[m] = (a, b)
        beta_prev = b
    alpha_next = 1.0
    for m in range(-1, -order - 1, -1):
        b = curve.v_star(alpha_next)
        a = curve.u_star(b)
        if not (0.0 <= a <= a_hi and 0.0 <= b <= b_hi):
            raise BranchEscape(f"iterate m={m} left the branch rectangle")
        pairs[m] = (a, b)
        alpha_next = a
    ratio = curve.decay_ratio
    const = max(1.0, curve.alpha_tilde / curve.beta_tilde,
                curve.beta_hat / curve.alpha_hat)
    return CompensationSeries(pairs, order, ratio, const, None)


def _build_finite_group(weights: StepDistribution,
                        cap: int = FINITE_GROUP_CAP) -> CompensationSeries:
    pairs: dict[int, tuple[float, float]] = {0: (1.0, 1.0)}
    a_prev, b_prev = 1.0, 1.0
    for m in range(1, cap + 1):
        a = conjugate_alpha(weights, b_prev, a_prev)
        b = conjugate_beta(weights, a, b_prev)
        if not (0.0 < a < 1.0 + 1e-9 and 0.0 < b < 1.0 + 1e-9):
            raise BranchEscape(
                f"conjugate iterate m={m} left (0,1]^2: ({a!r},{b!r})")
        if abs(a - 1.0) <= FINITE_GROUP_TOL and abs(b - 1.0) <= FINITE_GROUP_TOL:
            pairs[m] = (1.0, 1.0)
            return CompensationSeries(pairs, m, None, None, m)
        pairs[m] = (a, b)
        a_prev, b_prev = a, b
    raise NumericError(
        f"pair sequence did not return to (1,1) within {cap} steps; "
        "only finite-group walks are supported outside the singular class")


def build_sequence(source, order: int = 8) -> CompensationSeries:
    """Generate the pair sequence.

    ``source`` is either a KernelCurve (singular walks: two-sided
    monotone sequence of length ``order``) or a StepDistribution /
    QuadrantModel interior law (non-singular identical-reflection
    walks: conjugate-root iteration that must close into a finite
    group).
    """
    if isinstance(source, KernelCurve):
        if order < 1:
            raise ValueError("order must be >= 1")
        return _build_from_curve(source, order)
    weights = source.interior if isinstance(source, QuadrantModel) else source
    return _build_finite_group(weights)


# -- hat / tilde quantities ------------------------------------------------


@dataclass(frozen=True)
class HatTildeQuantities:
    """Boundary-law expectations of a^k b^l at neighbouring pairs.

    hat uses the pair (a_m, b_m); tilde uses (a_m, b_{m-1}).  These are
    the pole locations of the coefficient products and the decay rates
    of the contact distribution; in particular the tail rate is
    vtilde_1 or htilde_0, whichever is larger.
    """

    v_hat: Mapping[int, float]
    v_tilde: Mapping[int, float]
    h_hat: Mapping[int, float]
    h_tilde: Mapping[int, float]


def hat_tilde_quantities(seq: CompensationSeries,
                         model: QuadrantModel) -> HatTildeQuantities:
    v, h = model.vertical, model.horizontal
    v_hat, v_tilde, h_hat, h_tilde = {}, {}, {}, {}
    if seq.finite_group:
        hat_ms = range(0, seq.period + 1)
        tilde_ms = range(0, seq.period + 2)
    else:
        hat_ms = range(-seq.order, seq.order + 2)
        tilde_ms = range(-seq.order + 1, seq.order + 2)
    for m in hat_ms:
        a, b = seq.pair(m)
        v_hat[m] = v.power_sum(a, b)
        h_hat[m] = h.power_sum(a, b)
    for m in tilde_ms:
        a = seq.alpha(m)
        b_prev = seq.beta(m - 1)
        v_tilde[m] = v.power_sum(a, b_prev)
        h_tilde[m] = h.power_sum(a, b_prev)
    return HatTildeQuantities(v_hat, v_tilde, h_hat, h_tilde)


# -- factored rational coefficients ---------------------------------------


@dataclass(frozen=True)
class FactorRatio:
    """sign * prod (1 - a z) / prod (1 - b z), kept in factored form."""

    sign: float
    num: tuple[float, ...] = ()
    den: tuple[float, ...] = ()

    def times(self, sign: float = 1.0, num: Sequence[float] = (),
              den: Sequence[float] = ()) -> "FactorRatio":
        return FactorRatio(self.sign * sign, self.num + tuple(num),
                           self.den + tuple(den)).cancelled()

    def cancelled(self, tol: float = 1e-12) -> "FactorRatio":
        num = list(self.num)
        den = list(self.den)
        out_den = []
        for b in den:
            for idx, a in enumerate(num):
                if abs(a - b) <= tol:
                    num.pop(idx)
                    break
            else:
                out_den.append(b)
        return FactorRatio(self.sign, tuple(num), tuple(out_den))

    def eval(self, z: float) -> float:
        out = self.sign
        for a in self.num:
            out *= 1.0 - a * z
        for b in self.den:
            q = 1.0 - b * z
            if abs(q) < 1e-12:
                raise PoleAtEvaluation(f"factor (1 - {b!r} z) vanishes at z={z!r}")
            out /= q
        return out

    def taylor(self, n_max: int) -> np.ndarray:
        """Coefficients of z^0 .. z^n_max."""
        coeff = np.zeros(n_max + 1)
        coeff[0] = self.sign
        for a in self.num:
            coeff[1:] -= a * coeff[:-1].copy()
        for b in self.den:
            for n in range(1, n_max + 1):
                coeff[n] += b * coeff[n - 1]
        return coeff

    def poles(self) -> tuple[float, ...]:
        """Denominator roots expressed as decay rates b (pole at 1/b)."""
        return self.den


class CoefficientProducts:
    """The families c_m, d_m as factored ratios, plus cached Taylor rows."""

    def __init__(self, c: dict[int, FactorRatio], d: dict[int, FactorRatio],
                 quantities: HatTildeQuantities, identical: bool):
        self.c = c
        self.d = d
        self.quantities = quantities
        self.identical = identical
        self._taylor_cache: dict[int, tuple[dict[int, np.ndarray],
                                            dict[int, np.ndarray]]] = {}

    def taylor_rows(self, n_max: int):
        if n_max not in self._taylor_cache:
            c_rows = {m: r.taylor(n_max) for m, r in self.c.items()}
            d_rows = {m: r.taylor(n_max) for m, r in self.d.items()}
            self._taylor_cache[n_max] = (c_rows, d_rows)
        return self._taylor_cache[n_max]


def coefficient_products(seq: CompensationSeries,
                         quantities: HatTildeQuantities,
                         identical: bool) -> CoefficientProducts:
    """Build c_m for the G-sum range and d_m for the shifted range.

    Identical reflections short-circuit to the telescoped closed form
    c_m = (1-z)/(1 - vhat_m z), d_m = -(1-z)/(1 - vtilde_m z); the
    general chain multiplies the factored recursion in both directions.
    """
    q = quantities
    c: dict[int, FactorRatio] = {}
    d: dict[int, FactorRatio] = {}
    ms = seq.m_range()
    lo, hi = ms.start, ms.stop - 1
    if identical:
        for m in ms:
            c[m] = FactorRatio(1.0, (1.0,), (q.v_hat[m],)).cancelled()
        for m in range(lo + 1, hi + 2):
            d[m] = FactorRatio(-1.0, (1.0,), (q.v_tilde[m],)).cancelled()
        if 0 in q.v_tilde:
            d[0] = FactorRatio(-1.0, (1.0,), (q.v_tilde[0],)).cancelled()
        return CoefficientProducts(c, d, q, True)

    c[0] = FactorRatio(1.0)
    for m in range(0, hi + 1):
        d[m + 1] = c[m].times(-1.0, (q.v_hat[m],), (q.v_tilde[m + 1],))
        if m + 1 <= hi:
            c[m + 1] = d[m + 1].times(-1.0, (q.h_tilde[m + 1],), (q.h_hat[m + 1],))
    # downward: d_m = -c_m (1 - hhat_m z)/(1 - htilde_m z),
    #           c_{m-1} = -d_m (1 - vtilde_m z)/(1 - vhat_{m-1} z)
    for m in range(0, lo, -1):
        d[m] = c[m].times(-1.0, (q.h_hat[m],), (q.h_tilde[m],))
        c[m - 1] = d[m].times(-1.0, (q.v_tilde[m],), (q.v_hat[m - 1],))
    return CoefficientProducts(c, d, q, False)


# -- series summation with a tail certificate ------------------------------


def _tail_bound(term_sizes: Sequence[float], exact: bool) -> float:
    """Geometric tail estimate from the outermost term magnitudes.

    ``term_sizes`` lists |t_m| from the centre outwards (one side).  The
    empirically measured per-step ratio of the last few terms drives the
    bound; a ratio at or above 1 yields an infinite bound, which callers
    convert into TruncationInsufficient.
    """
    if exact or not term_sizes:
        return 0.0
    last = term_sizes[-1]
    if last == 0.0:
        return 0.0
    ratios = []
    for a, b in zip(term_sizes[-4:], term_sizes[-3:]):
        if a > 0.0:
            ratios.append(b / a)
    r = max(ratios) if ratios else 1.0
    if r >= 0.999:
        return math.inf
    # factor 2 absorbs drift of the measured ratio towards its limit
    return 2.0 * last * r / (1.0 - r)


@dataclass(frozen=True)
class SeriesValue:
    value: float
    bound: float


def evaluate_G(seq: CompensationSeries, products: CoefficientProducts,
               i: int, j: int, z: float,
               tol: float | None = None) -> SeriesValue:
    """Truncated G(i,j,z) with its truncation-error bound.

    z = 1 is the exact terminal value 1; otherwise |z| <= 1 - 1e-9.
    Raises TruncationInsufficient when ``tol`` is given and exceeded.
    """
    if (i, j) == (0, 0):
        raise ValueError("G is defined for start points (i,j) != (0,0)")
    if z == 1.0:
        return SeriesValue(1.0, 0.0)
    if abs(z) > 1.0 - 1e-9:
        raise ValueError("z must satisfy |z| <= 1 - 1e-9 (or z = 1 exactly)")
    pos_sizes, neg_sizes = [], []
    total = 0.0
    scale = 0.0
    for m in seq.m_range():
        am, bm = seq.pair(m)
        am1 = seq.alpha(m + 1)
        t = (products.c[m].eval(z) * am**i * bm**j
             + products.d[m + 1].eval(z) * am1**i * bm**j)
        total += t
        scale += abs(t)
        if not seq.finite_group:
            (pos_sizes if m >= 0 else neg_sizes).append((m, abs(t)))
    if seq.finite_group:
        bound = 4.0 * _EPS * max(scale, 1.0)
    else:
        neg_sizes.sort()  # ascending m: most negative first -> reverse
        tail_pos = _tail_bound([s for _, s in pos_sizes], False)
        tail_neg = _tail_bound([s for _, s in reversed(neg_sizes)], False)
        bound = tail_pos + tail_neg + 4.0 * _EPS * max(scale, 1.0)
    if tol is not None and bound > tol:
        raise TruncationInsufficient(
            f"truncation bound {bound:.3e} exceeds tol {tol:.3e} at order "
            f"{seq.order}")
    return SeriesValue(total, bound)


@dataclass(frozen=True)
class PmfRows:
    """f_n(i, j) for n = 0..n_max with per-entry truncation bounds."""

    i: int
    j: int
    probabilities: np.ndarray
    bounds: np.ndarray
    method: str


def extract_pmf(seq: CompensationSeries, products: CoefficientProducts,
                i: int, j: int, n_max: int,
                tol: float | None = None) -> PmfRows:
    """Power-series coefficients of the truncated G(i,j,.).

    Each coefficient ratio contributes its Taylor row (a linear
    recurrence per factor); rows are combined with the pair powers.
    The per-n truncation bound comes from the measured geometric decay
    of the outermost per-m contributions.
    """
    if (i, j) == (0, 0):
        raise ValueError("extract_pmf is defined for (i,j) != (0,0); "
                         "the origin row follows from the one-step origin rule")
    c_rows, d_rows = products.taylor_rows(n_max)
    values = np.zeros(n_max + 1)
    scale = np.zeros(n_max + 1)
    pos_terms: list[tuple[int, np.ndarray]] = []
    neg_terms: list[tuple[int, np.ndarray]] = []
    for m in seq.m_range():
        am, bm = seq.pair(m)
        am1 = seq.alpha(m + 1)
        contrib = c_rows[m] * (am**i * bm**j) + d_rows[m + 1] * (am1**i * bm**j)
        values += contrib
        scale += np.abs(contrib)
        if not seq.finite_group:
            (pos_terms if m >= 0 else neg_terms).append((m, np.abs(contrib)))
    eps_floor = 4.0 * _EPS * np.maximum(scale, 1.0)
    if seq.finite_group:
        method = "FiniteGroupSum"
        bounds = eps_floor
    else:
        method = "ClosedFormIdentical" if products.identical else "CompensationSeries"
        neg_terms.sort(reverse=True)  # m = -1, -2, ... moving outwards
        bounds = eps_floor.copy()
        for n in range(n_max + 1):
            bounds[n] += _tail_bound([t[n] for _, t in pos_terms], False)
            bounds[n] += _tail_bound([t[n] for _, t in neg_terms], False)
    if tol is not None and np.any(np.asarray(bounds) > tol):
        worst = float(np.max(bounds))
        raise TruncationInsufficient(
            f"truncation bound {worst:.3e} exceeds tol {tol:.3e} at order "
            f"{seq.order}")
    return PmfRows(i, j, values, np.asarray(bounds), method)


# -- tail asymptotics -------------------------------------------------------


@dataclass(frozen=True)
class TailAsymptotics:
    """f_n(i,j) ~ constant * rate^n as n grows."""

    rate: float
    constant: float
    regime: str            # "VDominant" | "Tie" | "HDominant"
    i: int
    j: int


def _ratio_sum_up(seq, q, i, j, z):
    """S_1(z) = sum_{m>=1} [ (d_m/d_1) a_m^i b_{m-1}^j + (c_m/d_1) a_m^i b_m^j ]."""
    ratio = FactorRatio(1.0)   # d_1 / d_1
    total = 0.0
    hi = seq.m_range().stop - 1
    for m in range(1, hi + 1):
        c_over_d1 = ratio.times(-1.0, (q.h_tilde[m],), (q.h_hat[m],))
        total += (ratio.eval(z) * seq.alpha(m)**i * seq.beta(m - 1)**j
                  + c_over_d1.eval(z) * seq.alpha(m)**i * seq.beta(m)**j)
        ratio = ratio.times(
            1.0, (q.h_tilde[m], q.v_hat[m]), (q.h_hat[m], q.v_tilde[m + 1]))
    return total


def _ratio_sum_down(seq, q, i, j, z):
    """S_0(z) = sum_{m<=0} [ (d_m/d_0) a_m^i b_{m-1}^j + (c_{m-1}/d_0) a_{m-1}^i b_{m-1}^j ]."""
    ratio = FactorRatio(1.0)   # d_0 / d_0
    total = 0.0
    lo = seq.m_range().start
    for m in range(0, lo, -1):
        c_over_d0 = ratio.times(-1.0, (q.v_tilde[m],), (q.v_hat[m - 1],))
        total += (ratio.eval(z) * seq.alpha(m)**i * seq.beta(m - 1)**j
                  + c_over_d0.eval(z) * seq.alpha(m - 1)**i * seq.beta(m - 1)**j)
        if m - 1 > lo:
            # d_{m-1}/d_m = (1 - hhat_{m-1} z)(1 - vtilde_m z)
            #             / [(1 - htilde_{m-1} z)(1 - vhat_{m-1} z)]
            ratio = ratio.times(
                1.0, (q.h_hat[m - 1], q.v_tilde[m]),
                (q.h_tilde[m - 1], q.v_hat[m - 1]))
    return total


def tail_asymptotics(seq: CompensationSeries, products: CoefficientProducts,
                     i: int, j: int) -> TailAsymptotics:
    """Dominant-pole rate and constant of f_n(i,j) as n -> infinity.

    rate = max(vtilde_1, htilde_0); the constant is the (sign-fixed)
    residue of G at 1/rate, assembled from S_1/S_0 partial sums whose
    remaining poles all sit strictly beyond 1/rate.
    """
    if (i, j) == (0, 0):
        raise ValueError("tail asymptotics defined for (i,j) != (0,0)")
    q = products.quantities
    vt1 = q.v_tilde[1]
    ht0 = q.h_tilde[0]
    rate = max(vt1, ht0)
    if abs(vt1 - ht0) <= TIE_TOL:
        regime = "Tie"
    elif vt1 > ht0:
        regime = "VDominant"
    else:
        regime = "HDominant"
    if rate <= 0.0:
        raise NumericError("degenerate tail rate 0")
    z_star = 1.0 / rate

    if seq.finite_group:
        # finite sum of single-pole terms: scan the terms whose pole is
        # exactly the dominant one
        c_sum = 0.0
        competing = []
        for m in seq.m_range():
            am, bm = seq.pair(m)
            am1 = seq.alpha(m + 1)
            for ratio, x in ((products.c[m], am**i * bm**j),
                             (products.d[m + 1], am1**i * bm**j)):
                for b in ratio.poles():
                    if abs(b - rate) <= TIE_TOL:
                        c_sum -= ratio.sign * x
                    else:
                        competing.append(b)
        _check_pole_gap(rate, competing)
        return TailAsymptotics(rate, (z_star - 1.0) * c_sum, regime, i, j)

    competing = []
    lo = seq.m_range().start
    hi = seq.m_range().stop - 1
    for m in range(2, hi + 2):
        competing.append(q.v_tilde[m])
    for m in range(1, hi + 1):
        competing.append(q.h_hat[m])
    for m in range(lo + 1, 0):
        competing.append(q.h_tilde[m])
    for m in range(lo, 0):
        competing.append(q.v_hat[m])
    if regime == "VDominant":
        competing.append(ht0)
    elif regime == "HDominant":
        competing.append(vt1)
    _check_pole_gap(rate, competing)

    if regime == "VDominant":
        constant = (z_star - 1.0) * _ratio_sum_up(seq, q, i, j, z_star)
    elif regime == "HDominant":
        constant = (z_star - 1.0) * _ratio_sum_down(seq, q, i, j, z_star)
    else:
        constant = (z_star - 1.0) * (_ratio_sum_up(seq, q, i, j, z_star)
                                     + _ratio_sum_down(seq, q, i, j, z_star))
    return TailAsymptotics(rate, constant, regime, i, j)


def _check_pole_gap(rate: float, competing: Sequence[float]):
    z_star = 1.0 / rate
    for b in competing:
        if b <= 0.0:
            continue
        if b >= rate or abs(1.0 / b - z_star) < POLE_GAP:
            raise PoleCollision(
                f"competing pole 1/{b!r} within {POLE_GAP:g} of the dominant "
                f"pole {z_star!r}; asymptotics withheld")


def two_term_refinement_available(seq: CompensationSeries,
                                  products: CoefficientProducts) -> bool:
    """Condition for the sharper two-pole expansion: both vtilde_1 and
    htilde_0 must beat every other retained pole (hhat_1, vhat_{-1} in
    particular)."""
    q = products.quantities
    if seq.finite_group:
        return False
    small = min(q.v_tilde[1], q.h_tilde[0])
    return small > max(q.h_hat[1], q.v_hat[-1])


def two_term_refinement(seq: CompensationSeries, products: CoefficientProducts,
                        i: int, j: int) -> tuple[TailAsymptotics, TailAsymptotics]:
    """f_n ~ (1-vt1) S_1(1/vt1) vt1^{n-1} + (1-ht0) S_0(1/ht0) ht0^{n-1}."""
    if not two_term_refinement_available(seq, products):
        raise NumericError(
            "two-term refinement requires vtilde_1 ^ htilde_0 > hhat_1 v vhat_-1")
    q = products.quantities
    vt1, ht0 = q.v_tilde[1], q.h_tilde[0]
    cv = (1.0 / vt1 - 1.0) * _ratio_sum_up(seq, q, i, j, 1.0 / vt1)
    ch = (1.0 / ht0 - 1.0) * _ratio_sum_down(seq, q, i, j, 1.0 / ht0)
    return (TailAsymptotics(vt1, cv, "VDominant", i, j),
            TailAsymptotics(ht0, ch, "HDominant", i, j))


# -- far-field profiles ------------------------------------------------------


def far_field_profiles(quantities: HatTildeQuantities,
                       n: int) -> tuple[float, float]:
    """Geometric profiles multiplying alpha_1^i and beta_{-1}^j as
    i + j -> infinity: ((1-vt1) vt1^(n-1), (1-ht0) ht0^(n-1)) for n >= 1."""
    if n < 1:
        raise ValueError("profiles are defined for n >= 1")
    vt1 = quantities.v_tilde[1]
    ht0 = quantities.h_tilde[0]
    return ((1.0 - vt1) * vt1 ** (n - 1), (1.0 - ht0) * ht0 ** (n - 1))


def far_field_estimate(fixed_points: AxisFixedPoints,
                       quantities: HatTildeQuantities,
                       i: int, j: int, n: int) -> float:
    cv, ch = far_field_profiles(quantities, n)
    return cv * fixed_points.alpha_1**i + ch * fixed_points.beta_minus1**j
