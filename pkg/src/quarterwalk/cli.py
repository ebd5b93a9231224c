"""Command-line front end.

    quarterwalk validate    --model <file|registry-name>
    quarterwalk sequence    --model ... --order M --out seq.csv
    quarterwalk pmf         --model ... --i 1 --j 1 --nmax 10 [--method ...]
    quarterwalk cdf         --model ... (same switches as pmf)
    quarterwalk asymptotics --model ... [--two-term]
    quarterwalk simulate    --model ... --paths 1e6 --seed 7 [--manifest m.json]
    quarterwalk compare     --model ... --paths 1e6 --nmax 20

Models are loaded from a config file (sections [interior], [horizontal],
[vertical], [origin] of `k l weight` triples plus a `class =` line) or
by registry name.  Exit codes: 0 ok, 2 validation failure, 3 numeric
failure, 4 I/O failure; errors are emitted as one JSON record on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

from . import montecarlo, registry
from .errors import ConfigError, ModelError, NumericError
from .kernel import curve_samples_csv
from .model import QuadrantModel, load_model, validate
from .pipeline import METHODS, Solver

EXIT_VALIDATION = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


@dataclass
class RunSpec:
    command: str
    model_source: str
    rect: tuple[int, int, int, int]
    n_max: int
    tol: float
    method: str | None
    order: int
    paths: int
    seed: int
    escape_epsilon: float
    max_steps: int
    threads: int
    out: str | None
    manifest: str | None
    two_term: bool
    z: float | None

    def __post_init__(self):
        i0, i1, j0, j1 = self.rect
        if i1 < i0 or j1 < j0:
            raise ValueError("empty start-point rectangle")
        if self.n_max < 0:
            raise ValueError("nmax must be >= 0")
        if self.tol <= 0:
            raise ValueError("tol must be positive")


def _load(source: str) -> QuadrantModel:
    if os.path.exists(source):
        return load_model(source)
    return registry.get(source).model


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _spec_from_args(args) -> RunSpec:
    if args.i is not None:
        i0 = i1 = args.i
    else:
        i0, i1 = args.i0, args.i1
    if args.j is not None:
        j0 = j1 = args.j
    else:
        j0, j1 = args.j0, args.j1
    threads = args.threads or int(os.environ.get("QUARTERWALK_THREADS", "1"))
    return RunSpec(
        command=args.command,
        model_source=args.model,
        rect=(i0, i1, j0, j1),
        n_max=args.nmax,
        tol=args.tol,
        method=getattr(args, "method", None),
        order=getattr(args, "order", 16),
        paths=int(float(getattr(args, "paths", 1e5))),
        seed=getattr(args, "seed", 2024),
        escape_epsilon=getattr(args, "escape_epsilon", 1e-9),
        max_steps=int(float(getattr(args, "max_steps", 1e7))),
        threads=threads,
        out=args.out,
        manifest=getattr(args, "manifest", None),
        two_term=getattr(args, "two_term", False),
        z=getattr(args, "z", None),
    )


def run(spec: RunSpec) -> int:
    model = _load(spec.model_source)

    if spec.command == "validate":
        report = validate(model)
        print("\n".join(report.lines()))
        return 0 if report.usable else EXIT_VALIDATION

    solver = Solver(model, tol=spec.tol)

    if spec.command == "sequence":
        _emit(solver.sequence(spec.order).to_csv(), spec.out)
        return 0

    if spec.command == "curve":
        _emit(curve_samples_csv(solver.curve), spec.out)
        return 0

    if spec.command in ("pmf", "cdf"):
        table = solver.contact_table(spec.rect, spec.n_max, method=spec.method)
        _emit(table.to_csv(cumulative=spec.command == "cdf"), spec.out)
        return 0

    if spec.command == "asymptotics":
        i0, i1, j0, j1 = spec.rect
        lines = ["i,j,rate,constant,regime"]
        for i in range(i0, i1 + 1):
            for j in range(j0, j1 + 1):
                if (i, j) == (0, 0):
                    continue
                if spec.two_term:
                    tv, th = solver.two_term_tail(i, j)
                    lines.append(f"{i},{j},{tv.rate!r},{tv.constant!r},two-term-v")
                    lines.append(f"{i},{j},{th.rate!r},{th.constant!r},two-term-h")
                else:
                    t = solver.tail(i, j)
                    lines.append(f"{i},{j},{t.rate!r},{t.constant!r},{t.regime}")
        _emit("\n".join(lines) + "\n", spec.out)
        return 0

    if spec.command == "simulate":
        cfg = montecarlo.SimConfig(paths=spec.paths, seed=spec.seed,
                                   escape_epsilon=spec.escape_epsilon,
                                   max_steps=spec.max_steps,
                                   threads=spec.threads)
        x = (spec.rect[0], spec.rect[2])
        est = montecarlo.simulate_contacts(model, x, cfg, solver.fixed_points)
        _emit(est.to_csv(), spec.out)
        if spec.manifest:
            with open(spec.manifest, "w", encoding="utf-8") as fh:
                fh.write(montecarlo.manifest_json(model, x, cfg, est))
        return 0

    if spec.command == "compare":
        return _compare(solver, model, spec)

    raise ValueError(f"unhandled command {spec.command!r}")


def _compare(solver: Solver, model: QuadrantModel, spec: RunSpec) -> int:
    cfg = montecarlo.SimConfig(paths=spec.paths, seed=spec.seed,
                               escape_epsilon=spec.escape_epsilon,
                               max_steps=spec.max_steps, threads=spec.threads)
    x = (spec.rect[0], spec.rect[2])
    est = montecarlo.simulate_contacts(model, x, cfg, solver.fixed_points)
    n_top = max(spec.n_max, max(est.pmf_hat, default=0))
    rows = solver.pmf_rows(x[0], x[1], n_top)
    eff = est.effective_paths
    lines = ["n,p,p_hat,stderr,z"]
    max_z = 0.0
    tv = 0.0
    for n in range(n_top + 1):
        p = float(rows.probabilities[n])
        p_hat, se = est.pmf_hat.get(n, (0.0, 0.0))
        if se == 0.0:
            se = math.sqrt(max(p * (1 - p), 1e-12) / eff)
        z = (p_hat - p) / se if se > 0 else 0.0
        tv += abs(p_hat - p)
        if p >= 1e-4:
            max_z = max(max_z, abs(z))
        lines.append(f"{n},{p!r},{p_hat!r},{se!r},{z:.3f}")
    lines.append(f"# max |z| over p >= 1e-4: {max_z:.3f}")
    lines.append(f"# total variation distance: {0.5 * tv:.6f}")
    _emit("\n".join(lines) + "\n", spec.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quarterwalk",
        description="Boundary contact distributions of reflected walks "
                    "in the quarter plane")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, rect=True):
        p.add_argument("--model", required=True,
                       help="model config file or registry name "
                            f"({', '.join(registry.names())})")
        p.add_argument("--out", default=None, help="output file (default stdout)")
        p.add_argument("--tol", type=float, default=1e-12)
        p.add_argument("--threads", type=int, default=0)
        if rect:
            p.add_argument("--i", type=int, default=None)
            p.add_argument("--j", type=int, default=None)
            p.add_argument("--i0", type=int, default=1)
            p.add_argument("--i1", type=int, default=1)
            p.add_argument("--j0", type=int, default=1)
            p.add_argument("--j1", type=int, default=1)
        p.add_argument("--nmax", type=int, default=10)

    common(sub.add_parser("validate", help="check the standing assumptions"))
    p = sub.add_parser("sequence", help="export the pair sequence as CSV")
    common(p)
    p.add_argument("--order", type=int, default=16)
    common(sub.add_parser("curve", help="export (alpha, u(alpha)) samples"))
    p = sub.add_parser("pmf", help="contact pmf table")
    common(p)
    p.add_argument("--method", choices=METHODS, default=None)
    p = sub.add_parser("cdf", help="cumulative contact table")
    common(p)
    p.add_argument("--method", choices=METHODS, default=None)
    p = sub.add_parser("asymptotics", help="dominant-pole tail asymptotics")
    common(p)
    p.add_argument("--two-term", dest="two_term", action="store_true")
    for name in ("simulate", "compare"):
        p = sub.add_parser(name)
        common(p)
        p.add_argument("--paths", type=float, default=1e5)
        p.add_argument("--seed", type=int, default=2024)
        p.add_argument("--escape-epsilon", dest="escape_epsilon",
                       type=float, default=1e-9)
        p.add_argument("--max-steps", dest="max_steps", type=float, default=1e7)
        if name == "simulate":
            p.add_argument("--manifest", default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = _spec_from_args(args)
        return run(spec)
    except (ConfigError, OSError) as exc:
        _error_record(exc)
        return EXIT_IO
    except ModelError as exc:
        _error_record(exc)
        return EXIT_VALIDATION
    except (NumericError, ValueError) as exc:
        _error_record(exc)
        return EXIT_NUMERIC


def _error_record(exc: Exception):
    record = {"error": type(exc).__name__, "message": str(exc)}
    print(json.dumps(record), file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
