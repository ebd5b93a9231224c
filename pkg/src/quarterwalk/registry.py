"""Built-in reference models with their exact known values.

Four walks ship as regression anchors:

* ``fibonacci-identical`` -- singular walk p(-1,1)=p(1,-1)=p(1,1)=1/3
  with the deterministic reflection (1,1) everywhere; the reciprocal
  pair sequence runs through every other Fibonacci number
  (1, 2, 5, 13, 34, ...) and the contact pmf has a closed geometric
  form per term.
* ``fibonacci-mixed`` -- same interior, but vertical reflection (1,0)
  and horizontal reflection (1,1): the coefficient products no longer
  telescope; the first few factor chains are recorded verbatim for
  regression.
* ``finite-group-simple`` -- biased simple walk p(1,0)=p(0,1)=3/8,
  p(-1,0)=p(0,-1)=1/8 with reflection (1,1): non-singular, but its pair
  sequence closes after one period through (1/3,1) and (1/3,1/3), so
  the generating function is an exact four-term sum.
* ``generic-singular-demo`` -- five-jump singular walk with genuinely
  different boundary laws; no closed forms, used for property checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import UnknownModel
from .model import QuadrantModel, StepDistribution, atom, step

_SQRT5 = math.sqrt(5.0)
_RHO = (1.0 + _SQRT5) / 2.0
_TRUNC_M = 40   # |m| cap for the reference series; terms beyond are < 1e-40


@dataclass(frozen=True)
class ReferenceModel:
    name: str
    model: QuadrantModel
    known_sequence: Callable[[int], tuple[float, float]] | None = None
    known_f0: Callable[[int, int], float] | None = None
    known_fn: Callable[[int, int, int], float] | None = None
    # (kind, m) -> (sign, numerator roots, denominator roots) of the
    # coefficient ratio, for the models whose factor chains are known
    known_factor_terms: dict | None = None
    sequence_period: int | None = None


def _fib_pair(m: int) -> tuple[float, float]:
    a = _SQRT5 / (_RHO ** (4 * m - 1) + _RHO ** (1 - 4 * m))
    b = _SQRT5 / (_RHO ** (4 * m + 1) + _RHO ** (-4 * m - 1))
    return a, b


def _fib_f0(i: int, j: int) -> float:
    s = 0.0
    for m in range(-_TRUNC_M, _TRUNC_M + 1):
        am, bm = _fib_pair(m)
        am1, _ = _fib_pair(m + 1)
        s += am**i * bm**j - am1**i * bm**j
    return s


def _fib_fn(i: int, j: int, n: int) -> float:
    if n == 0:
        return _fib_f0(i, j)
    s = 0.0
    for m in range(-_TRUNC_M, _TRUNC_M + 1):
        am, bm = _fib_pair(m)
        am1, _ = _fib_pair(m + 1)
        vhat = am * bm          # reflection is the atom (1,1)
        vtil = am1 * bm
        s += -(1.0 - vhat) * vhat ** (n - 1) * am**i * bm**j
        s += (1.0 - vtil) * vtil ** (n - 1) * am1**i * bm**j
    return s


def _fgs_f0(i: int, j: int) -> float:
    return (1.0 - 3.0 ** -i) * (1.0 - 3.0 ** -j)


def _fgs_fn(i: int, j: int, n: int) -> float:
    if n == 0:
        return _fgs_f0(i, j)
    return (2.0 / (3.0 ** n * 3.0 ** i) - 8.0 / (9.0 ** n * 3.0 ** (i + j))
            + 2.0 / (3.0 ** n * 3.0 ** j))


def _fgs_pair(m: int) -> tuple[float, float]:
    return (1.0, 1.0) if m % 2 == 0 else (1.0 / 3.0, 1.0 / 3.0)


_FIB_INTERIOR = step({(-1, 1): 1 / 3, (1, -1): 1 / 3, (1, 1): 1 / 3})

# Coefficient ratios of the mixed-reflection Fibonacci walk, as signed
# factor lists (root a stands for a factor (1 - a z)).  These are the
# seven displayed terms around m = 0.
_FIB_MIXED_TERMS = {
    ("d", -1): (-1.0, (1.0, 1.0, 1 / 10), (1 / 2, 1 / 5, 1 / 65)),
    ("c", -1): (1.0, (1.0, 1.0), (1 / 2, 1 / 5)),
    ("d", 0): (-1.0, (1.0,), (1 / 2,)),
    ("c", 0): (1.0, (), ()),
    ("d", 1): (-1.0, (1.0,), (1 / 2,)),
    ("c", 1): (1.0, (1.0,), (1 / 10,)),
    ("d", 2): (-1.0, (1.0, 1 / 2), (1 / 10, 1 / 13)),
}


def _build() -> dict[str, ReferenceModel]:
    fib_identical = ReferenceModel(
        name="fibonacci-identical",
        model=QuadrantModel.identical_reflections(_FIB_INTERIOR, atom(1, 1)),
        known_sequence=_fib_pair,
        known_f0=_fib_f0,
        known_fn=_fib_fn,
    )
    fib_mixed = ReferenceModel(
        name="fibonacci-mixed",
        model=QuadrantModel.singular(
            _FIB_INTERIOR,
            horizontal=atom(1, 1),
            vertical=atom(1, 0),
            origin=atom(1, 1),
        ),
        known_sequence=_fib_pair,
        known_factor_terms=_FIB_MIXED_TERMS,
    )
    finite_group = ReferenceModel(
        name="finite-group-simple",
        model=QuadrantModel.identical_reflections(
            step({(1, 0): 3 / 8, (0, 1): 3 / 8, (-1, 0): 1 / 8, (0, -1): 1 / 8}),
            atom(1, 1)),
        known_sequence=_fgs_pair,
        known_f0=_fgs_f0,
        known_fn=_fgs_fn,
        sequence_period=2,
    )
    generic = ReferenceModel(
        name="generic-singular-demo",
        model=QuadrantModel.singular(
            step({(1, -1): 1 / 5, (-1, 1): 1 / 5, (1, 0): 1 / 5,
                  (0, 1): 1 / 5, (1, 1): 1 / 5}),
            horizontal=step({(0, 1): 1 / 2, (1, 1): 1 / 2}),
            vertical=step({(1, 0): 1 / 2, (1, 1): 1 / 2}),
            origin=atom(1, 1),
        ),
    )
    return {m.name: m for m in (fib_identical, fib_mixed, finite_group, generic)}


_REGISTRY = _build()


def names() -> tuple[str, ...]:
    return tuple(sorted(_REGISTRY))


def get(name: str) -> ReferenceModel:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise UnknownModel(
            f"unknown registry model {name!r}; available: {', '.join(names())}"
        ) from None


def lookup_by_hash(model: QuadrantModel) -> ReferenceModel | None:
    """Registry entry with identical model data, if any."""
    h = model.content_hash()
    for ref in _REGISTRY.values():
        if ref.model.content_hash() == h:
            return ref
    return None
