"""The kernel K(alpha, beta), its level-set branches and fixed points.

For an interior law p the kernel is

    K(alpha, beta) = sum_{k,l >= -1} p_{k,l} alpha^(k+1) beta^(l+1) - alpha*beta,

a polynomial with nonnegative coefficients apart from the -alpha*beta
term, hence convex in each variable separately.  Its zero level set in
the closed positive quadrant is a lens through (0,0) and (1,1) whose
upper boundary is the graph of u(alpha) and whose right boundary is the
graph alpha = v(beta).  The monotone restrictions of u and v below
their maximizers (alpha_hat, beta_hat) and (beta_tilde, alpha_tilde)
are inverted numerically here; everything downstream (the compensation
sequence in particular) is built from these two inverses.

All scalar roots are isolated by convexity: the smaller root of a
convex section lies left of its argmin, so a sign-change bracket always
exists and Brent's method finishes the job at machine precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from scipy.optimize import brentq, minimize_scalar

from .errors import (
    MaximizerNotBracketed,
    NoInteriorRoot,
    NoNegativeJumps,
    NumericError,
    OutOfBranch,
)
from .model import Jump, StepDistribution

BRACKET_TOL = 1e-300    # effectively pure-relative bracketing (rtol drives it)
RESIDUAL_TOL = 1e-12     # |K| at any reported root
_RTOL = 8.9e-16          # tightest relative tolerance brentq accepts
CLAMP_TOL = 1e-12        # slack above the branch maximum that is clamped


def kernel_eval(weights: StepDistribution, alpha: float, beta: float) -> float:
    """K(alpha, beta); exact finite sum, K(1,1) = 0 by normalization."""
    s = math.fsum(w * alpha ** (j.k + 1) * beta ** (j.l + 1)
                  for j, w in weights.items())
    return s - alpha * beta


def exp_transform_eval(weights: StepDistribution, x: float, y: float) -> float:
    """L(x, y) = exp(-(x+y)) K(e^x, e^y) = sum p e^(kx+ly) - 1."""
    return math.fsum(w * math.exp(j.k * x + j.l * y)
                     for j, w in weights.items()) - 1.0


def _d_alpha(weights, alpha, beta):
    return math.fsum(w * (j.k + 1) * alpha ** j.k * beta ** (j.l + 1)
                     for j, w in weights.items() if j.k + 1 > 0) - beta


def _d_beta(weights, alpha, beta):
    return math.fsum(w * (j.l + 1) * alpha ** (j.k + 1) * beta ** j.l
                     for j, w in weights.items() if j.l + 1 > 0) - alpha


def _dd_alpha(weights, alpha, beta):
    return math.fsum(w * (j.k + 1) * j.k * alpha ** (j.k - 1) * beta ** (j.l + 1)
                     for j, w in weights.items() if j.k >= 1)


def _dd_alpha_beta(weights, alpha, beta):
    return math.fsum(w * (j.k + 1) * (j.l + 1) * alpha ** j.k * beta ** j.l
                     for j, w in weights.items()
                     if j.k + 1 > 0 and j.l + 1 > 0) - 1.0


def _argmin_section(f_prime, hi0=1.0):
    """Root of an increasing derivative; 0.0 if already nonnegative there."""
    if f_prime(0.0) >= 0.0:
        return 0.0
    hi = hi0
    for _ in range(200):
        if f_prime(hi) > 0.0:
            return brentq(f_prime, 0.0, hi, xtol=BRACKET_TOL, rtol=_RTOL, maxiter=256)
        hi *= 2.0
    raise NumericError("section derivative never changes sign")


def _smaller_root(section, d_section):
    """Smaller nonnegative root of a convex section, or None if none exists.

    section(0) must be >= 0.  Returns the argmin itself when the section
    only touches zero there (top of the branch).  All degeneracy tests
    are relative to the section scale: deep in the pair sequence the
    kernel sections live at scales like alpha*beta ~ 1e-14 and absolute
    thresholds would misclassify them.
    """
    xmin = _argmin_section(d_section)
    gmin = section(xmin)
    g0 = section(0.0)
    scale = max(abs(g0), abs(gmin))
    if scale == 0.0:
        return 0.0
    if g0 < -1e-9 * scale:
        raise NumericError("convex section negative at 0")
    if gmin >= 0.0:
        # no sign change: the section either touches the level set only
        # at its minimum (branch top) or misses it entirely
        return xmin if gmin <= 1e-9 * scale else None
    if g0 <= 0.0:
        return 0.0
    return brentq(section, 0.0, xmin, xtol=BRACKET_TOL, rtol=_RTOL, maxiter=256)


def _larger_root(section, d_section):
    """Larger root of a convex section (section -> +inf); None if none."""
    xmin = _argmin_section(d_section)
    gmin = section(xmin)
    hi = max(2.0 * xmin, 1.0)
    ghi = section(hi)
    for _ in range(200):
        if ghi > 0.0:
            break
        hi *= 2.0
        ghi = section(hi)
    else:
        raise NumericError("convex section never recrosses zero")
    scale = max(abs(gmin), ghi)
    if gmin >= 0.0:
        return xmin if gmin <= 1e-9 * scale else None
    return brentq(section, xmin, hi, xtol=BRACKET_TOL, rtol=_RTOL, maxiter=256)


def smaller_alpha_root(weights, beta):
    if beta == 0.0:
        # K(alpha, 0) = sum_k p_{k,-1} alpha^(k+1) vanishes only at 0
        # for singular walks
        return 0.0
    return _smaller_root(lambda a: kernel_eval(weights, a, beta),
                         lambda a: _d_alpha(weights, a, beta))


def smaller_beta_root(weights, alpha):
    if alpha == 0.0:
        return 0.0
    return _smaller_root(lambda b: kernel_eval(weights, alpha, b),
                         lambda b: _d_beta(weights, alpha, b))


def larger_beta_root(weights, alpha):
    return _larger_root(lambda b: kernel_eval(weights, alpha, b),
                        lambda b: _d_beta(weights, alpha, b))


def larger_alpha_root(weights, beta):
    return _larger_root(lambda a: kernel_eval(weights, a, beta),
                        lambda a: _d_alpha(weights, a, beta))


class AxisFixedPoints(NamedTuple):
    """Solutions in (0,1) of alpha = sum p alpha^(k+1), beta = sum p beta^(l+1).

    alpha_1^i is the probability that the free (unreflected) walk started
    i steps right of the vertical axis ever hits it; beta_minus1^j the
    analogue for the horizontal axis.
    """

    alpha_1: float
    beta_minus1: float


def _axis_root(marginal: dict[int, float], drift: float, which: str) -> float:
    # defect(a) = a - sum_k P_k a^(k+1): strictly concave, defect(1) = 0
    if marginal.get(-1, 0.0) <= 0.0:
        raise NoNegativeJumps(
            f"no mass on {which} = -1: the walk never reaches that axis")
    if drift <= 0.0:
        raise NoInteriorRoot(f"nonpositive drift {drift:.6g} along {which}")

    def defect(a):
        return a - math.fsum(w * a ** (k + 1) for k, w in marginal.items())

    def d_defect(a):
        return 1.0 - math.fsum(w * (k + 1) * a ** k
                               for k, w in marginal.items() if k + 1 > 0)

    # concave defect: locate its interior maximum, then bracket the root
    # between 0 (defect < 0 there) and the maximizer
    if d_defect(0.0) <= 0.0 or d_defect(1.0) >= 0.0:
        raise NoInteriorRoot("defect function not unimodal on (0,1)")
    amax = brentq(d_defect, 0.0, 1.0, xtol=BRACKET_TOL, rtol=_RTOL, maxiter=256)
    if defect(amax) <= 0.0:
        raise NoInteriorRoot("defect function never positive on (0,1)")
    root = brentq(defect, 0.0, amax, xtol=BRACKET_TOL, rtol=_RTOL, maxiter=256)
    if not 0.0 < root < 1.0 or abs(defect(root)) > RESIDUAL_TOL:
        raise NoInteriorRoot(f"axis root {root!r} failed the residual check")
    return root


def axis_fixed_points(weights: StepDistribution) -> AxisFixedPoints:
    kx: dict[int, float] = {}
    ly: dict[int, float] = {}
    for j, w in weights.items():
        kx[j.k] = kx.get(j.k, 0.0) + w
        ly[j.l] = ly.get(j.l, 0.0) + w
    mx, my = weights.drift()
    return AxisFixedPoints(_axis_root(kx, mx, "k"), _axis_root(ly, my, "l"))


@dataclass(frozen=True)
class KernelCurve:
    """Kernel level set with its two branch maximizers.

    (alpha_hat, beta_hat) is the top of the u-branch, (alpha_tilde,
    beta_tilde) the right end of the v-branch.  Note beta_hat and
    alpha_tilde exceed 1 whenever the interior drift is positive: u(1) = 1
    and u still increases to the left of 1.
    """

    weights: StepDistribution
    alpha_hat: float
    beta_hat: float
    alpha_tilde: float
    beta_tilde: float

    def u(self, alpha: float) -> float:
        """Upper branch beta = u(alpha) for alpha in [0, 1]."""
        if alpha == 0.0:
            return 0.0
        root = larger_beta_root(self.weights, alpha)
        if root is None:
            raise OutOfBranch(f"no branch point above alpha={alpha!r}")
        return root

    def v(self, beta: float) -> float:
        if beta == 0.0:
            return 0.0
        root = larger_alpha_root(self.weights, beta)
        if root is None:
            raise OutOfBranch(f"no branch point right of beta={beta!r}")
        return root

    def u_star(self, beta: float) -> float:
        """Inverse of u restricted to [0, alpha_hat]; monotone in beta."""
        if not 0.0 <= beta <= self.beta_hat + CLAMP_TOL:
            raise OutOfBranch(
                f"beta={beta!r} outside [0, beta_hat={self.beta_hat!r}]")
        beta = min(beta, self.beta_hat)
        root = smaller_alpha_root(self.weights, beta)
        if root is None:
            # can only happen within rounding of the branch top
            return self.alpha_hat
        return min(root, self.alpha_hat)

    def v_star(self, alpha: float) -> float:
        """Inverse of v restricted to [0, beta_tilde]; monotone in alpha."""
        if not 0.0 <= alpha <= self.alpha_tilde + CLAMP_TOL:
            raise OutOfBranch(
                f"alpha={alpha!r} outside [0, alpha_tilde={self.alpha_tilde!r}]")
        alpha = min(alpha, self.alpha_tilde)
        root = smaller_beta_root(self.weights, alpha)
        if root is None:
            return self.beta_tilde
        return min(root, self.beta_tilde)

    @property
    def decay_ratio(self) -> float:
        return (self.alpha_hat / self.beta_hat) * (self.beta_tilde / self.alpha_tilde)

    def samples(self, count: int = 200) -> list[tuple[float, float]]:
        """(alpha, u(alpha)) pairs on a uniform alpha grid, for plotting."""
        return [(a, self.u(a))
                for a in (i / (count - 1) for i in range(count))]


def branch_inverse_u_star(curve: KernelCurve, beta: float) -> float:
    return curve.u_star(beta)


def branch_inverse_v_star(curve: KernelCurve, alpha: float) -> float:
    return curve.v_star(alpha)


def _swap(weights: StepDistribution) -> StepDistribution:
    return StepDistribution({Jump(j.l, j.k): w for j, w in weights.items()})


def _u_branch_maximizer(weights) -> tuple[float, float]:
    lo, hi = 1e-9, 1.0 - 1e-9

    def neg_u(a):
        root = larger_beta_root(weights, a)
        if root is None:
            return math.inf
        return -root

    res = minimize_scalar(neg_u, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-10})
    a0 = float(res.x)
    if not res.success or not math.isfinite(res.fun):
        raise MaximizerNotBracketed("search for the u-branch maximizer failed")
    if a0 < 10 * lo or a0 > 1.0 - 1e-6:
        raise MaximizerNotBracketed(
            f"u-branch maximizer search hit the interval edge at {a0!r}")
    b0 = -res.fun
    # Newton polish on (K, dK/dalpha) = (0, 0): quadratic convergence to
    # machine precision; the golden-section result seeds it
    a, b = a0, b0
    for _ in range(60):
        f1 = kernel_eval(weights, a, b)
        f2 = _d_alpha(weights, a, b)
        j11 = _d_alpha(weights, a, b)
        j12 = _d_beta(weights, a, b)
        j21 = _dd_alpha(weights, a, b)
        j22 = _dd_alpha_beta(weights, a, b)
        det = j11 * j22 - j12 * j21
        if det == 0.0:
            break
        da = (f1 * j22 - f2 * j12) / det
        db = (f2 * j11 - f1 * j21) / det
        a, b = a - da, b - db
        if not (0.0 < a < 1.0 and 0.0 < b < 16.0):
            a, b = a0, b0
            break
        if abs(da) < 1e-15 and abs(db) < 1e-15:
            break
    if abs(kernel_eval(weights, a, b)) > 1e-10:
        raise MaximizerNotBracketed(
            "branch maximizer failed the level-set residual check "
            "(the model likely violates the singular-walk assumptions)")
    return a, b


def find_branch_maximizers(weights: StepDistribution) -> KernelCurve:
    """Locate (alpha_hat, beta_hat) and (beta_tilde, alpha_tilde).

    Requires a singular-walk interior law (the level set must be a lens
    reaching the origin); on anything else the search reports
    MaximizerNotBracketed.
    """
    alpha_hat, beta_hat = _u_branch_maximizer(weights)
    beta_tilde, alpha_tilde = _u_branch_maximizer(_swap(weights))
    return KernelCurve(weights, alpha_hat, beta_hat, alpha_tilde, beta_tilde)


# -- conjugate roots (finite-group construction) --------------------------


def _quadratic_coeffs_alpha(weights, beta):
    a2 = a1 = a0 = 0.0
    for j, w in weights.items():
        term = w * beta ** (j.l + 1)
        if j.k == 1:
            a2 += term
        elif j.k == 0:
            a1 += term
        else:
            a0 += term
    return a2, a1 - beta, a0


def conjugate_alpha(weights: StepDistribution, beta: float,
                    alpha_prev: float) -> float:
    """The other root of K(., beta) = 0, for kernels quadratic in alpha.

    This is the level-set step used by the finite-group construction:
    from a point (alpha_prev, beta) on the curve, move to the second
    crossing of the horizontal line through it.
    """
    if weights.max_offsets().k > 1:
        raise NumericError(
            "conjugate root undefined: kernel has alpha-degree > 2")
    a2, _, a0 = _quadratic_coeffs_alpha(weights, beta)
    if a2 == 0.0 or alpha_prev == 0.0:
        raise NumericError("conjugate root undefined: degenerate quadratic")
    other = a0 / (a2 * alpha_prev)
    if abs(kernel_eval(weights, other, beta)) > 1e-9:
        raise NumericError("conjugate alpha root failed the residual check")
    return other


def conjugate_beta(weights: StepDistribution, alpha: float,
                   beta_prev: float) -> float:
    return conjugate_alpha(_swap(weights), alpha, beta_prev)


def curve_samples_csv(curve: KernelCurve, count: int = 200) -> str:
    lines = ["alpha,u_alpha"]
    lines += [f"{a!r},{b!r}" for a, b in curve.samples(count)]
    return "\n".join(lines) + "\n"
