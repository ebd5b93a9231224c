"""Walk models as data: step distributions, quadrant models, validation.

A model is a set of finite step distributions: one interior law and one
boundary law per axis (plus the origin).  Two model classes are handled:

* ``IDENTICAL``  -- the three boundary laws coincide (coupling recursion
  applies),
* ``SINGULAR``   -- the interior law forbids the jumps (-1,0), (0,-1),
  (-1,-1) (compensation series applies, boundary laws arbitrary).

Weights are plain floats; normalization is enforced to 1e-12 at
construction time, so every downstream sum is an exact finite sum over
an explicitly enumerated support.
"""

from __future__ import annotations

import enum
import hashlib
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple

from .errors import (
    ConfigError,
    EmptySupport,
    NotNormalized,
    SupportOverflow,
)

NORMALIZATION_TOL = 1e-12
# Support coordinates are capped: huge positive jumps degrade the
# root-finding conditioning downstream and never occur in practice.
SUPPORT_COORD_CAP = 64
# Drift components below this are refused: branch maximizers collapse
# towards (1,1) and the branch inverses become ill-conditioned.
MIN_DRIFT = 1e-6
CONVOLVE_ATOM_CAP = 10**7


class Jump(NamedTuple):
    k: int
    l: int


class ModelClass(enum.Enum):
    IDENTICAL = "identical"
    SINGULAR = "singular"


class MomentSummary(NamedTuple):
    mean_x: float
    mean_y: float


@dataclass(frozen=True)
class StepDistribution:
    """Finite pmf on lattice jumps.

    ``weights`` maps (k, l) -> probability.  All weights are >= 0, sum to
    1 within ``NORMALIZATION_TOL``, and |k|, |l| <= ``SUPPORT_COORD_CAP``.
    """

    weights: Mapping[Jump, float]

    def __post_init__(self):
        cleaned = {}
        for jump, w in self.weights.items():
            k, l = int(jump[0]), int(jump[1])
            if w < 0:
                raise NotNormalized(f"negative weight {w} at jump ({k},{l})")
            if abs(k) > SUPPORT_COORD_CAP or abs(l) > SUPPORT_COORD_CAP:
                raise NotNormalized(
                    f"jump ({k},{l}) outside the supported coordinate cap "
                    f"{SUPPORT_COORD_CAP}"
                )
            if w > 0.0:
                cleaned[Jump(k, l)] = float(w)
        if not cleaned:
            raise EmptySupport("step distribution has no positive weight")
        total = math.fsum(cleaned.values())
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise NotNormalized(f"weights sum to {total!r}, not 1")
        object.__setattr__(self, "weights", cleaned)

    # -- basic queries ----------------------------------------------------

    def items(self):
        return self.weights.items()

    @property
    def support(self) -> tuple[Jump, ...]:
        return tuple(sorted(self.weights))

    def weight(self, k: int, l: int) -> float:
        return self.weights.get(Jump(k, l), 0.0)

    def min_offsets(self) -> Jump:
        return Jump(min(j.k for j in self.weights), min(j.l for j in self.weights))

    def max_offsets(self) -> Jump:
        return Jump(max(j.k for j in self.weights), max(j.l for j in self.weights))

    def drift(self) -> MomentSummary:
        mx = math.fsum(j.k * w for j, w in self.weights.items())
        my = math.fsum(j.l * w for j, w in self.weights.items())
        return MomentSummary(mx, my)

    def power_sum(self, alpha: float, beta: float) -> float:
        """sum_{k,l} w_{k,l} alpha^k beta^l (exponents may be negative)."""
        return math.fsum(
            w * alpha**j.k * beta**j.l for j, w in self.weights.items()
        )

    def __eq__(self, other):
        if not isinstance(other, StepDistribution):
            return NotImplemented
        return self.weights == other.weights

    def __hash__(self):
        return hash(tuple(sorted(self.weights.items())))


def step(weights: Mapping[tuple, float]) -> StepDistribution:
    """Shorthand constructor from a {(k, l): weight} mapping."""
    return StepDistribution({Jump(*j): w for j, w in weights.items()})


def atom(k: int, l: int) -> StepDistribution:
    return StepDistribution({Jump(k, l): 1.0})


def drift(dist: StepDistribution) -> MomentSummary:
    """Expected jump per coordinate, as an exact finite sum."""
    return dist.drift()


def convolve(a: StepDistribution, b: StepDistribution,
             atom_cap: int = CONVOLVE_ATOM_CAP) -> StepDistribution:
    out: dict[Jump, float] = {}
    for ja, wa in a.items():
        for jb, wb in b.items():
            key = Jump(ja.k + jb.k, ja.l + jb.l)
            out[key] = out.get(key, 0.0) + wa * wb
            if len(out) > atom_cap:
                raise SupportOverflow(f"convolution support exceeds {atom_cap} atoms")
    return StepDistribution(out)


def convolve_power(dist: StepDistribution, n: int,
                   atom_cap: int = CONVOLVE_ATOM_CAP) -> StepDistribution:
    """Exact pmf of the sum of n independent copies (n = 0: unit atom)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    result = atom(0, 0)
    base = dist
    # binary exponentiation; supports stay small for the boundary laws
    # this is used with, so the repeated squaring is comfortably exact
    while n:
        if n & 1:
            result = convolve(result, base, atom_cap)
        n >>= 1
        if n:
            base = convolve(base, base, atom_cap)
    return result


# -- quadrant models ------------------------------------------------------


@dataclass(frozen=True)
class QuadrantModel:
    """Interior plus boundary step laws and a model-class tag."""

    interior: StepDistribution
    horizontal: StepDistribution
    vertical: StepDistribution
    origin: StepDistribution
    model_class: ModelClass

    @staticmethod
    def identical_reflections(interior: StepDistribution,
                              boundary: StepDistribution) -> "QuadrantModel":
        return QuadrantModel(interior, boundary, boundary, boundary,
                             ModelClass.IDENTICAL)

    @staticmethod
    def singular(interior: StepDistribution, horizontal: StepDistribution,
                 vertical: StepDistribution,
                 origin: StepDistribution) -> "QuadrantModel":
        return QuadrantModel(interior, horizontal, vertical, origin,
                             ModelClass.SINGULAR)

    @property
    def has_identical_reflections(self) -> bool:
        return self.horizontal == self.vertical == self.origin

    def boundary_law(self) -> StepDistribution:
        if not self.has_identical_reflections:
            from .errors import IdenticalReflectionsRequired
            raise IdenticalReflectionsRequired(
                "model does not have identical boundary reflections")
        return self.origin

    def content_hash(self) -> str:
        """Stable hash of the model data, used in run manifests."""
        parts = [self.model_class.value]
        for dist in (self.interior, self.horizontal, self.vertical, self.origin):
            for j in sorted(dist.weights):
                parts.append(f"{j.k},{j.l}:{dist.weights[j]!r}")
        return hashlib.sha256("|".join(parts).encode()).hexdigest()[:16]


# -- validation -----------------------------------------------------------


@dataclass(frozen=True)
class AssumptionCheck:
    name: str
    passed: bool
    detail: str = ""

    def __str__(self):
        mark = "PASS" if self.passed else "FAIL"
        return f"{mark} {self.name}" + (f": {self.detail}" if self.detail else "")


@dataclass(frozen=True)
class ValidationReport:
    model_class: ModelClass
    checks: tuple[AssumptionCheck, ...]

    def check(self, name: str) -> AssumptionCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def family_ok(self, prefix: str) -> bool:
        return all(c.passed for c in self.checks if c.name.startswith(prefix))

    @property
    def coupling_ok(self) -> bool:
        """Usable by the coupling recursion (identical reflections, A1-A6)."""
        return self.check("identical-reflections").passed and self.family_ok("A")

    @property
    def compensation_ok(self) -> bool:
        """Usable by the compensation series (singular walk, B1-B8)."""
        return self.family_ok("B") and self.check("interior-drift").passed

    @property
    def usable(self) -> bool:
        if self.model_class is ModelClass.IDENTICAL:
            return self.coupling_ok
        return self.compensation_ok

    def failures(self) -> tuple[AssumptionCheck, ...]:
        return tuple(c for c in self.checks if not c.passed)

    def lines(self) -> list[str]:
        out = [str(c) for c in self.checks]
        out.append(f"model class: {self.model_class.value}")
        out.append("usable for its declared pipeline: %s" % ("yes" if self.usable else "no"))
        return out


def _offending(dist: StepDistribution, pred) -> str:
    bad = [(j.k, j.l, w) for j, w in dist.items() if pred(j)]
    return "; ".join(f"p({k},{l})={w:g}" for k, l, w in bad[:4])


def _nonneg_boundary(dist: StepDistribution) -> tuple[bool, str]:
    bad = _offending(dist, lambda j: j.k < 0 or j.l < 0)
    return (bad == "", bad)


def validate(model: QuadrantModel) -> ValidationReport:
    """Check every standing assumption of both model classes.

    The A-family governs the identical-reflections pipeline, the
    B-family the singular/compensation pipeline.  Both families are
    always reported so that, e.g., an identical-reflections model is
    flagged non-singular rather than silently rejected downstream.
    validate() is pure: it never mutates the model and a given model
    always produces the same report.
    """
    p = model.interior
    checks: list[AssumptionCheck] = []
    add = checks.append

    identical = model.has_identical_reflections
    if model.model_class is ModelClass.IDENTICAL and not identical:
        add(AssumptionCheck("identical-reflections", False,
                            "declared identical but boundary laws differ"))
    else:
        add(AssumptionCheck("identical-reflections", identical,
                            "" if identical else "boundary laws differ"))

    # A-family (single boundary law eta; for differing laws each boundary
    # law is held to the same constraint)
    boundaries = {"horizontal": model.horizontal, "vertical": model.vertical,
                  "origin": model.origin}

    add(AssumptionCheck("A1-normalization", True))  # enforced at construction
    bad2 = _offending(p, lambda j: j.k <= -2 or j.l <= -2)
    add(AssumptionCheck("A2-small-negative-jumps", bad2 == "", bad2))
    has_down = any(j.l == -1 for j in p.weights)
    has_left = any(j.k == -1 for j in p.weights)
    add(AssumptionCheck("A3-negative-jumps-exist", has_down and has_left,
                        "" if has_down and has_left else
                        f"mass at k=-1: {has_left}, at l=-1: {has_down}"))
    mx, my = p.drift()
    drift_ok = mx >= MIN_DRIFT and my >= MIN_DRIFT
    add(AssumptionCheck("A4-interior-drift-positive", drift_ok,
                        f"drift=({mx:.6g},{my:.6g}), minimum {MIN_DRIFT:g}"))

    a5_bad = [name for name, d in boundaries.items() if not _nonneg_boundary(d)[0]]
    add(AssumptionCheck("A5-boundary-nonnegative", not a5_bad,
                        "" if not a5_bad else
                        "; ".join(f"{n}: {_nonneg_boundary(boundaries[n])[1]}"
                                  for n in a5_bad)))
    a6_bad = []
    for name, d in boundaries.items():
        bx, by = d.drift()
        if not (bx >= MIN_DRIFT and by >= MIN_DRIFT):
            a6_bad.append(f"{name} drift=({bx:.6g},{by:.6g})")
    add(AssumptionCheck("A6-boundary-drift-positive", not a6_bad,
                        "; ".join(a6_bad)))

    # B-family
    add(AssumptionCheck("B1-normalization", True))
    add(AssumptionCheck("B2-small-negative-jumps", bad2 == "", bad2))
    b3_bad = _offending(p, lambda j: (j.k, j.l) in {(-1, -1), (-1, 0), (0, -1)})
    add(AssumptionCheck("B3-singular-walk", b3_bad == "", b3_bad))
    b4 = p.weight(-1, 1) > 0 and p.weight(1, -1) > 0
    add(AssumptionCheck("B4-nondegenerate", b4,
                        "" if b4 else "needs p(-1,1) > 0 and p(1,-1) > 0"))
    b5 = any(j.k + j.l > 0 for j in p.weights)
    add(AssumptionCheck("B5-positive-sum-jump", b5,
                        "" if b5 else "no jump with k+l > 0"))
    add(AssumptionCheck("B6-moment-assumption", True,
                        "automatically satisfied: finite support"))
    # B7: boundary jumps must re-enter the quadrant and leave the boundary
    # eventually; we require nonnegative components with no (0,0) atom
    # (the hat/tilde expectations downstream need this monotonicity).
    b7_bad = []
    for name, d in boundaries.items():
        ok, detail = _nonneg_boundary(d)
        if not ok:
            b7_bad.append(f"{name}: {detail}")
        elif d.weight(0, 0) > 0:
            b7_bad.append(f"{name}: atom at (0,0)")
    add(AssumptionCheck("B7-boundary-jumps", not b7_bad, "; ".join(b7_bad)))
    hx, hy = model.horizontal.drift()
    vx, vy = model.vertical.drift()
    qx, qy = model.origin.drift()
    b8_bad = []
    if hy < MIN_DRIFT:
        b8_bad.append(f"horizontal l-drift {hy:.6g}")
    if vx < MIN_DRIFT:
        b8_bad.append(f"vertical k-drift {vx:.6g}")
    if qx < MIN_DRIFT or qy < MIN_DRIFT:
        b8_bad.append(f"origin drift ({qx:.6g},{qy:.6g})")
    add(AssumptionCheck("B8-boundary-drifts", not b8_bad, "; ".join(b8_bad)))
    # Not in the B list of the source model, but required by every
    # numerical routine downstream (finiteness of the local time and a
    # lens-shaped kernel level set both need interior drift in the cone).
    add(AssumptionCheck("interior-drift", drift_ok,
                        f"drift=({mx:.6g},{my:.6g}), minimum {MIN_DRIFT:g}"))

    return ValidationReport(model.model_class, tuple(checks))


# -- config file format ----------------------------------------------------
#
#   class = identical | singular
#   [interior]
#   k l weight
#   ...
#   [horizontal] / [vertical] / [origin]
#
# For class = identical a single boundary section may be given; missing
# boundary sections are copied from it.  Duplicate jumps are rejected.

_SECTIONS = ("interior", "horizontal", "vertical", "origin")


def parse_model_config(text: str) -> QuadrantModel:
    sections: dict[str, dict[Jump, float]] = {}
    model_class: ModelClass | None = None
    current: dict[Jump, float] | None = None
    current_name = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip().lower()
            if name not in _SECTIONS:
                raise ConfigError(f"line {lineno}: unknown section [{name}]")
            if name in sections:
                raise ConfigError(f"line {lineno}: duplicate section [{name}]")
            sections[name] = {}
            current, current_name = sections[name], name
            continue
        if "=" in line:
            key, _, value = line.partition("=")
            if key.strip().lower() != "class":
                raise ConfigError(f"line {lineno}: unknown key {key.strip()!r}")
            if model_class is not None:
                raise ConfigError(f"line {lineno}: duplicate class line")
            value = value.strip().lower()
            try:
                model_class = ModelClass(value)
            except ValueError:
                raise ConfigError(
                    f"line {lineno}: class must be identical or singular, "
                    f"got {value!r}") from None
            continue
        parts = line.split()
        if current is None:
            raise ConfigError(f"line {lineno}: jump triple outside any section")
        if len(parts) != 3:
            raise ConfigError(f"line {lineno}: expected 'k l weight'")
        try:
            k, l, w = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise ConfigError(f"line {lineno}: malformed triple {line!r}") from None
        if Jump(k, l) in current:
            raise ConfigError(
                f"line {lineno}: duplicate jump ({k},{l}) in [{current_name}]")
        current[Jump(k, l)] = w

    if model_class is None:
        raise ConfigError("missing 'class = identical | singular' line")
    if "interior" not in sections:
        raise ConfigError("missing [interior] section")

    def build(name):
        try:
            return StepDistribution(sections[name])
        except (EmptySupport, NotNormalized) as exc:
            raise ConfigError(f"[{name}]: {exc}") from exc

    interior = build("interior")
    boundary_names = [n for n in _SECTIONS[1:] if n in sections]
    if model_class is ModelClass.IDENTICAL:
        if not boundary_names:
            raise ConfigError("identical model needs at least one boundary section")
        laws = {n: build(n) for n in boundary_names}
        first = laws[boundary_names[0]]
        if any(laws[n] != first for n in boundary_names[1:]):
            raise ConfigError("identical model has differing boundary sections")
        return QuadrantModel.identical_reflections(interior, first)
    missing = [n for n in _SECTIONS[1:] if n not in sections]
    if missing:
        raise ConfigError(f"singular model needs sections: {', '.join(missing)}")
    return QuadrantModel.singular(interior, build("horizontal"),
                                  build("vertical"), build("origin"))


def dump_model_config(model: QuadrantModel) -> str:
    lines = [f"class = {model.model_class.value}"]
    for name in _SECTIONS:
        lines.append("")
        lines.append(f"[{name}]")
        dist = getattr(model, name)
        for j in sorted(dist.weights):
            lines.append(f"{j.k} {j.l} {dist.weights[j]!r}")
    return "\n".join(lines) + "\n"


def load_model(path) -> QuadrantModel:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_model_config(fh.read())


def save_model(model: QuadrantModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_model_config(model))
