"""Brute-force oracle: simulate reflected walks and count axis contacts.

Paths are simulated in fixed-size blocks, each block driven by its own
counter-based Philox stream keyed (seed, block index).  Blocks can
therefore run on any number of worker threads, in any order, and the
merged tallies are bit-identical for a given seed and config.

A path is finalized ("escaped") once it sits at an interior point
(i, j) with alpha_1^i + beta_{-1}^j <= escape_epsilon: that quantity
bounds the probability that the free walk ever returns to an axis, so
declaring the contact count final there biases each path by at most
escape_epsilon.  This turns the simulator into a certified oracle
rather than a heuristic one.  Paths hitting the step cap are reported
separately and excluded from the pmf normalization.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import UnreachableOrigin
from .kernel import AxisFixedPoints, axis_fixed_points
from .model import ModelClass, QuadrantModel, StepDistribution

AXIS_NONE, AXIS_V, AXIS_H = 0, 1, 2


@dataclass(frozen=True)
class SimConfig:
    paths: int
    escape_epsilon: float = 1e-9
    seed: int = 2024
    max_steps: int = 10_000_000
    block_size: int = 1 << 16
    threads: int = 1

    def __post_init__(self):
        if not 0.0 < self.escape_epsilon < 1.0:
            raise ValueError("escape_epsilon must lie in (0,1)")
        if self.paths <= 0:
            raise ValueError("paths must be positive")


class _Sampler:
    """Inverse-cdf jump sampler over a finite support."""

    def __init__(self, dist: StepDistribution):
        jumps = sorted(dist.weights)
        w = np.array([dist.weights[j] for j in jumps])
        self.cum = np.cumsum(w)
        self.cum[-1] = 1.0  # guard against rounding in the last bin
        self.kx = np.array([j.k for j in jumps], dtype=np.int64)
        self.ky = np.array([j.l for j in jumps], dtype=np.int64)

    def draw(self, u, out_x, out_y, mask):
        idx = np.searchsorted(self.cum, u[mask], side="right")
        out_x[mask] = self.kx[idx]
        out_y[mask] = self.ky[idx]


class _Tallies:
    def __init__(self):
        self.hist = np.zeros(8, dtype=np.int64)     # finalized contact counts
        self.first_axis = np.zeros(3, dtype=np.int64)   # none / v / h
        self.trans = np.zeros((2, 2), dtype=np.int64)   # v/h -> v/h successors
        self.last_no_more = np.zeros(2, dtype=np.int64)
        self.truncated = 0

    def add_hist(self, counts: np.ndarray):
        binned = np.bincount(counts)
        if binned.size > self.hist.size:
            self.hist = np.concatenate(
                [self.hist, np.zeros(binned.size - self.hist.size, dtype=np.int64)])
        self.hist[:binned.size] += binned

    def merge(self, other: "_Tallies"):
        if other.hist.size > self.hist.size:
            self.hist = np.concatenate(
                [self.hist, np.zeros(other.hist.size - self.hist.size,
                                     dtype=np.int64)])
        self.hist[:other.hist.size] += other.hist
        self.first_axis += other.first_axis
        self.trans += other.trans
        self.last_no_more += other.last_no_more
        self.truncated += other.truncated


def _axis_codes(ix, iy):
    return np.where(ix == 0, AXIS_V, np.where(iy == 0, AXIS_H, AXIS_NONE))


def _run_block(model: QuadrantModel, samplers, x, cfg: SimConfig,
               log_a1: float, log_bm1: float, block_idx: int,
               n_paths: int) -> _Tallies:
    rng = np.random.Generator(
        np.random.Philox(key=np.array([cfg.seed, block_idx], dtype=np.uint64)))
    tal = _Tallies()
    singular = model.model_class is ModelClass.SINGULAR
    started_at_origin = x == (0, 0)

    ix = np.full(n_paths, x[0], dtype=np.int64)
    iy = np.full(n_paths, x[1], dtype=np.int64)
    axis = _axis_codes(ix, iy).astype(np.int8)
    contacts = (axis > 0).astype(np.int64)
    first_axis = axis.copy()
    last_axis = axis.copy()

    interior_s, horiz_s, vert_s, origin_s = samplers
    steps = 0
    while ix.size:
        if steps >= cfg.max_steps:
            tal.truncated += ix.size
            break
        steps += 1
        u = rng.random(ix.size)
        dx = np.empty(ix.size, dtype=np.int64)
        dy = np.empty(ix.size, dtype=np.int64)
        on_v = ix == 0
        on_h = (iy == 0) & ~on_v
        on_o = on_v & (iy == 0)
        on_v = on_v & ~on_o
        inside = ~(on_v | on_h | on_o)
        if inside.any():
            interior_s.draw(u, dx, dy, inside)
        if on_h.any():
            horiz_s.draw(u, dx, dy, on_h)
        if on_v.any():
            vert_s.draw(u, dx, dy, on_v)
        if on_o.any():
            origin_s.draw(u, dx, dy, on_o)
        ix += dx
        iy += dy
        if singular:
            at_origin = (ix == 0) & (iy == 0)
            if at_origin.any() and not (started_at_origin and steps == 0):
                raise UnreachableOrigin(
                    "singular walk reached the origin from outside; "
                    "model invariant broken")

        axis = _axis_codes(ix, iy).astype(np.int8)
        contacted = axis > 0
        if contacted.any():
            follow = contacted & (last_axis > 0)
            if follow.any():
                pair = (last_axis[follow].astype(np.int64) - 1) * 2 + (
                    axis[follow].astype(np.int64) - 1)
                tal.trans += np.bincount(pair, minlength=4).reshape(2, 2)
            fresh = contacted & (first_axis == 0)
            first_axis[fresh] = axis[fresh]
            last_axis[contacted] = axis[contacted]
            contacts[contacted] += 1

        escaped = (~contacted
                   & (np.exp(ix * log_a1) + np.exp(iy * log_bm1)
                      <= cfg.escape_epsilon))
        if escaped.any():
            tal.add_hist(contacts[escaped])
            tal.first_axis += np.bincount(first_axis[escaped], minlength=3)
            had = escaped & (last_axis > 0)
            if had.any():
                tal.last_no_more += np.bincount(
                    last_axis[had].astype(np.int64) - 1, minlength=2)
            keep = ~escaped
            ix, iy = ix[keep], iy[keep]
            contacts = contacts[keep]
            first_axis, last_axis = first_axis[keep], last_axis[keep]
    return tal


@dataclass
class SimEstimate:
    """Merged simulation tallies with their binomial standard errors."""

    paths: int
    seed: int
    escape_epsilon: float
    pmf_hat: dict[int, tuple[float, float]]
    splitting: tuple[float, float]       # (f_v_hat, f_h_hat)
    truncated_paths: int
    hist: np.ndarray = field(repr=False)
    first_axis_counts: np.ndarray = field(repr=False)
    transitions: np.ndarray = field(repr=False)
    last_no_more: np.ndarray = field(repr=False)

    @property
    def effective_paths(self) -> int:
        return self.paths - self.truncated_paths

    def to_csv(self) -> str:
        lines = ["n,p_hat,stderr"]
        for n in sorted(self.pmf_hat):
            p, se = self.pmf_hat[n]
            lines.append(f"{n},{p!r},{se!r}")
        return "\n".join(lines) + "\n"


def _binomial(count: int, n: int) -> tuple[float, float]:
    p = count / n
    return p, math.sqrt(max(p * (1.0 - p), 0.0) / n)


def simulate_contacts(model: QuadrantModel, x: tuple[int, int],
                      cfg: SimConfig,
                      fixed_points: AxisFixedPoints | None = None) -> SimEstimate:
    """Estimated pmf of the contact count from x, plus splitting tallies.

    Deterministic for a fixed (seed, paths, block_size): per-block
    Philox streams make the result independent of thread scheduling.
    """
    if fixed_points is None:
        fixed_points = axis_fixed_points(model.interior)
    samplers = (_Sampler(model.interior), _Sampler(model.horizontal),
                _Sampler(model.vertical), _Sampler(model.origin))
    log_a1 = math.log(fixed_points.alpha_1)
    log_bm1 = math.log(fixed_points.beta_minus1)

    sizes = []
    remaining = cfg.paths
    while remaining > 0:
        sizes.append(min(cfg.block_size, remaining))
        remaining -= sizes[-1]

    def run(idx_size):
        idx, size = idx_size
        return _run_block(model, samplers, x, cfg, log_a1, log_bm1, idx, size)

    tal = _Tallies()
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            for block in pool.map(run, enumerate(sizes)):
                tal.merge(block)
    else:
        for idx_size in enumerate(sizes):
            tal.merge(run(idx_size))

    eff = cfg.paths - tal.truncated
    pmf = {}
    if eff > 0:
        for n, count in enumerate(tal.hist):
            if count:
                pmf[n] = _binomial(int(count), eff)
    f_v = tal.first_axis[AXIS_V] / eff if eff else 0.0
    f_h = tal.first_axis[AXIS_H] / eff if eff else 0.0
    return SimEstimate(cfg.paths, cfg.seed, cfg.escape_epsilon, pmf,
                       (f_v, f_h), tal.truncated, tal.hist,
                       tal.first_axis, tal.trans, tal.last_no_more)


@dataclass(frozen=True)
class SplittingEstimate:
    f_v_hat: tuple[float, float]
    f_h_hat: tuple[float, float]
    f_0_hat: tuple[float, float]
    low_information: bool


def estimate_splitting(model: QuadrantModel, x: tuple[int, int],
                       cfg: SimConfig,
                       estimate: SimEstimate | None = None) -> SplittingEstimate:
    """First-contact classification: vertical axis, horizontal axis, or
    escape without any contact.  A first contact at the origin counts as
    vertical (only reachable for non-singular walks)."""
    est = estimate or simulate_contacts(model, x, cfg)
    eff = est.effective_paths
    nv = int(est.first_axis_counts[AXIS_V])
    nh = int(est.first_axis_counts[AXIS_H])
    n0 = int(est.first_axis_counts[AXIS_NONE])
    low = min(nv, nh) < 25
    return SplittingEstimate(_binomial(nv, eff), _binomial(nh, eff),
                             _binomial(n0, eff), low)


@dataclass(frozen=True)
class ConditionalNextEstimate:
    """Empirical next-contact probabilities conditioned on the axis of
    the current contact, pooled over contact indices."""

    next_given_v: tuple[float, float]
    next_given_h: tuple[float, float]
    same_axis_given_v: tuple[float, float]
    same_axis_given_h: tuple[float, float]
    cross_axis_given_v: tuple[float, float]
    cross_axis_given_h: tuple[float, float]
    events_v: int
    events_h: int
    low_sample_count: bool


def estimate_conditional_next(model: QuadrantModel, x: tuple[int, int],
                              cfg: SimConfig,
                              estimate: SimEstimate | None = None
                              ) -> ConditionalNextEstimate:
    est = estimate or simulate_contacts(model, x, cfg)
    trans = est.transitions
    rows = []
    events = []
    for a in (0, 1):  # v, h
        followed = int(trans[a, 0] + trans[a, 1])
        total = followed + int(est.last_no_more[a])
        events.append(total)
        if total == 0:
            rows.append(((0.0, 0.0), (0.0, 0.0), (0.0, 0.0)))
            continue
        rows.append((_binomial(followed, total),
                     _binomial(int(trans[a, a]), total),
                     _binomial(int(trans[a, 1 - a]), total)))
    low = min(events) < 200
    (nv, sv, cv), (nh, sh, ch) = rows
    return ConditionalNextEstimate(nv, nh, sv, sh, cv, ch,
                                   events[0], events[1], low)


def run_manifest(model: QuadrantModel, x: tuple[int, int], cfg: SimConfig,
                 est: SimEstimate) -> dict:
    """Everything needed to reproduce a run, as a JSON-friendly dict."""
    return {
        "model_hash": model.content_hash(),
        "model_class": model.model_class.value,
        "start": list(x),
        "seed": cfg.seed,
        "paths": cfg.paths,
        "escape_epsilon": cfg.escape_epsilon,
        "max_steps": cfg.max_steps,
        "block_size": cfg.block_size,
        "truncated_paths": est.truncated_paths,
    }


def manifest_json(model, x, cfg, est) -> str:
    return json.dumps(run_manifest(model, x, cfg, est), indent=2) + "\n"
