"""Command-line front end.

Exit codes: 0 pass, 1 fail, 2 usage or config error, 3 internal or solver
error, 4 inconclusive.
"""

from __future__ import annotations

import argparse
import inspect
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import spaces as sp
from .config import Tolerances
from .errors import FormatError, NotExtendable, WassRigidError
from .experiments import FAIL, INCONCLUSIVE, PASS, REGISTRY, make_rng
from .formats import format_csv, format_plan, format_result, read_config, read_measure, write_csv
from .geometry import WassersteinGeodesic, flatness_residual, geodesic_speed_residual, strict_convexity_residual
from .measures import dirac, random_measure, uniform_mesh_measure
from .transport import solve_kantorovich

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL, EXIT_INCONCLUSIVE = 0, 1, 2, 3, 4
_STATUS_EXIT = {PASS: EXIT_PASS, FAIL: EXIT_FAIL, INCONCLUSIVE: EXIT_INCONCLUSIVE}

SWEEP_HELP = """\
CSV columns per sweep kind:
  flatness   family,t,length,residual,analytic  (family from [params] family:
             'random' or 'pole_equator'; analytic is t(1-t)L^2 for the pole family)
  convexity  trial,t,residual   (mesh source vs two random deltas, [params] mesh_n, n)
  speed      s,t,residual       (geodesic between [params] mu0/mu1 files or random measures)
"""


class ConfigError(WassRigidError):
    pass


@dataclass
class RunConfig:
    space: sp.Space | None = None
    p: float = 2.0
    tol: Tolerances = field(default_factory=Tolerances)
    seed: int = 0
    out: Path | None = None
    params: dict = field(default_factory=dict)
    base_dir: Path = Path(".")

    def __post_init__(self):
        if not (1.0 < self.p < math.inf):
            raise ConfigError(f"p={self.p} must lie in (1, inf)")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")


def load_run_config(path, args) -> RunConfig:
    run, params, base = {}, {}, Path(".")
    if path is not None:
        cp = read_config(path)
        base = Path(path).parent
        if cp.has_section("run"):
            run = dict(cp["run"])
        if cp.has_section("params"):
            params = dict(cp["params"])
    try:
        space = sp.parse_space(run["space"]) if "space" in run else None
        p = args.p if args.p is not None else float(run.get("p", 2.0))
        seed = args.seed if args.seed is not None else int(run.get("seed", 0))
        # a config-relative output directory, like the measure paths in [params]
        out = args.out if args.out is not None else (base / run["out"] if "out" in run else None)
        tol = Tolerances(
            float(run.get("tol_distance", 1e-9)), float(run.get("tol_mass", 1e-10)), float(run.get("tol_lp", 1e-9))
        ).with_overrides(distance=args.tol_distance, mass=args.tol_mass, lp=args.tol_lp)
    except (ValueError, FormatError) as exc:
        raise ConfigError(str(exc)) from exc
    return RunConfig(space, p, tol, seed, Path(out) if out else None, params, base)


# ---------------------------------------------------------------------------
# experiment parameter parsing

_INTS = {"mesh_n", "candidate_n", "n_pairs", "n_configs", "n_points", "n_samples", "lambda_n", "configs", "grid", "locus_samples"}
_FLOATS = {"t0"}
_POINTS = {"x", "y", "pole"}
_MEASURES = {"mu", "mu0", "mu1", "target"}


def _floats(text):
    return [float(v) for v in text.replace(",", " ").split()]


def parse_isometry(text: str, space: sp.Space) -> sp.Isometry:
    """``identity``, ``reflection``, ``circle_rotation A``, ``circle_reflection A``,
    ``rotation AX AY AZ ANGLE`` or ``permutation i0 i1 ...``."""
    parts = text.split()
    kind, vals = parts[0].lower(), parts[1:]
    if kind == "identity":
        return sp.Identity()
    if kind == "reflection":
        return sp.IntervalReflection()
    if kind == "circle_rotation":
        return sp.CircleRotation(float(vals[0]))
    if kind == "circle_reflection":
        return sp.CircleReflection(float(vals[0]) if vals else 0.0)
    if kind == "rotation":
        v = [float(x) for x in vals]
        return sp.Rotation.about_axis(v[:3], v[3])
    if kind == "permutation":
        return sp.Permutation(int(x) for x in vals)
    raise ConfigError(f"unknown isometry {kind!r}")


def _experiment_kwargs(name, cfg: RunConfig) -> dict:
    fn = REGISTRY[name]
    accepted = set(inspect.signature(fn).parameters)
    space = cfg.space
    kw = {"seed": cfg.seed}
    if "p" in accepted:
        kw["p"] = cfg.p
    if "tol" in accepted and name != "exp_shell_invariance":
        kw["tol"] = cfg.tol
    if space is not None and "space" in accepted:
        kw["space"] = space
    measures = {}
    for key, raw in cfg.params.items():
        try:
            if key in _INTS:
                kw[key] = int(raw)
            elif key in _FLOATS:
                kw[key] = float(raw)
            elif key in _POINTS:
                kw[key] = space.point(*_floats(raw))
            elif key in _MEASURES:
                measures[key] = read_measure(cfg.base_dir / raw)
            elif key == "mesh_sizes":
                kw[key] = [int(v) for v in _floats(raw)]
            elif key == "isometry":
                kw["g"] = parse_isometry(raw, space)
            elif key == "gamma":
                ends = [space.point(*_floats(s)) for s in raw.split(";")[:2]]
                branch = _floats(raw.split(";")[2]) if raw.count(";") >= 2 else None
                kw["gamma"] = space.geodesic(*ends, branch=branch)
            elif key == "atoms":
                kw["atoms"] = [space.point(*_floats(s)) for s in raw.split(";")]
            elif key == "weights":
                kw["weights"] = _floats(raw)
            elif key == "weighting":
                kw[key] = raw.strip()
            else:
                raise ConfigError(f"unknown parameter {key!r} for {name}")
        except (ValueError, IndexError, AttributeError, FormatError) as exc:
            raise ConfigError(f"parameter {key!r}: {exc}") from exc
    kw.update(measures)
    unknown = set(kw) - accepted
    if unknown:
        raise ConfigError(f"{name} does not take {sorted(unknown)}")
    return kw


def _run_one(name, cfg: RunConfig, subdir: bool = False):
    """Worker entry point; returns (name, exit code, message)."""
    try:
        kw = _experiment_kwargs(name, cfg)
        out = None
        if cfg.out is not None:
            out = cfg.out / name if subdir else cfg.out
        rep = REGISTRY[name](out=out, **kw)
    except ConfigError as exc:
        return name, EXIT_USAGE, f"config error: {exc}"
    except NotExtendable as exc:
        return name, EXIT_USAGE, f"instance skipped: {exc}"
    except (WassRigidError, ValueError) as exc:
        return name, EXIT_INTERNAL, f"error: {exc}"
    margins = ", ".join(f"{m.name}={m.value!r}" for m in rep.margins)
    return name, _STATUS_EXIT[rep.status], f"{rep.status} {margins}"


def _worst(codes):
    for c in (EXIT_INTERNAL, EXIT_USAGE, EXIT_FAIL, EXIT_INCONCLUSIVE):
        if c in codes:
            return c
    return EXIT_PASS


# ---------------------------------------------------------------------------
# subcommands


def cmd_solve(args) -> int:
    try:
        mu = read_measure(args.mu)
        nu = read_measure(args.nu)
    except (FormatError, OSError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    tol = Tolerances().with_overrides(distance=args.tol_distance, mass=args.tol_mass, lp=args.tol_lp)
    try:
        res = solve_kantorovich(mu, nu, args.p if args.p is not None else 2.0, check_unique=not args.no_unique, tol=tol, seed=args.seed or 0)
    except WassRigidError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    sys.stdout.write(format_result(res))
    if args.plan:
        sys.stdout.write(format_plan(res.plan))
    return EXIT_PASS


def cmd_geodesic(args) -> int:
    try:
        mu = read_measure(args.mu)
        nu = read_measure(args.nu)
        times = _floats(args.times)
    except (FormatError, OSError, ValueError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        res = solve_kantorovich(mu, nu, args.p if args.p is not None else 2.0, seed=args.seed or 0)
        geo = WassersteinGeodesic.from_result(res)
        rows = []
        for t in times:
            for k, (atom, w) in enumerate(geo(t)):
                rows.append([t, k, w] + list(atom.coords))
    except WassRigidError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    header = ["t", "atom", "weight"] + [f"c{k}" for k in range(mu.space.dim)]
    if args.out:
        write_csv(args.out, header, rows)
    else:
        sys.stdout.write(format_csv(header, rows))
    print(f"unique = {res.unique}", file=sys.stderr)
    return EXIT_PASS


def _sweep_rows(kind, cfg: RunConfig):
    rng = make_rng(cfg.seed)
    prm = cfg.params
    n = int(prm.get("n", 100))
    space = cfg.space or sp.Interval(1.0)
    if kind == "flatness":
        family = prm.get("family", "random")
        header = ["family", "t", "length", "residual", "analytic"]
        rows = []
        if family == "pole_equator":
            if not isinstance(space, sp.Sphere2):
                raise ConfigError("pole_equator family needs a sphere2 space")
            R = space.radius
            N = space.point(0, 0, 1)
            for _ in range(n):
                L, t = float(rng.uniform(0, math.pi)) * R, float(rng.uniform())
                a = L / R
                g = space.geodesic(space.point(1, 0, 0), space.point(math.cos(a), math.sin(a), 0), branch=(0, 1, 0))
                rows.append([family, t, g.length, flatness_residual(space, N, g, t), t * (1 - t) * g.length**2])
        elif family == "random":
            for _ in range(n):
                x, a, b = (space.random_point(rng) for _ in range(3))
                g = space.geodesic(a, b)
                t = float(rng.uniform())
                rows.append([family, t, g.length, flatness_residual(space, x, g, t), ""])
        else:
            raise ConfigError(f"unknown flatness family {family!r}")
        return header, rows
    if kind == "convexity":
        mesh = uniform_mesh_measure(space, int(prm.get("mesh_n", 50)))
        rows = []
        for k in range(n):
            nu0, nu1 = dirac(space, space.random_point(rng)), dirac(space, space.random_point(rng))
            t = float(rng.uniform(0.05, 0.95))
            rows.append([k, t, strict_convexity_residual(mesh, nu0, nu1, t, cfg.p, cfg.tol)])
        return ["trial", "t", "residual"], rows
    if kind == "speed":
        if "mu0" in prm and "mu1" in prm:
            mu0, mu1 = read_measure(cfg.base_dir / prm["mu0"]), read_measure(cfg.base_dir / prm["mu1"])
        else:
            k = int(prm.get("n_atoms", 3))
            mu0, mu1 = random_measure(space, rng, k), random_measure(space, rng, k)
        res = solve_kantorovich(mu0, mu1, cfg.p, tol=cfg.tol, seed=cfg.seed)
        geo = WassersteinGeodesic.from_result(res)
        ts = np.linspace(0.0, 1.0, int(prm.get("grid", 5)))
        rows = []
        for s in ts:
            for t in ts:
                if s < t:
                    rows.append([float(s), float(t), geodesic_speed_residual(geo, [(float(s), float(t))], cfg.tol)])
        return ["s", "t", "residual"], rows
    raise ConfigError(f"unknown sweep kind {kind!r}")


def cmd_sweep(args) -> int:
    try:
        cfg = load_run_config(args.config, args)
        header, rows = _sweep_rows(args.kind, cfg)
    except (ConfigError, FormatError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except WassRigidError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    out = cfg.out or Path(".")
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"sweep_{args.kind}.csv"
    write_csv(path, header, rows)
    print(path)
    return EXIT_PASS


def cmd_experiment(args) -> int:
    names = list(REGISTRY) if args.names == ["all"] else args.names
    unknown = [n for n in names if n not in REGISTRY]
    if unknown:
        print(f"unknown experiment(s) {unknown}; registered: {', '.join(REGISTRY)}", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = load_run_config(args.config, args)
    except (ConfigError, FormatError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    subdir = len(names) > 1
    jobs = max(1, args.jobs)
    if jobs == 1 or len(names) == 1:
        results = [_run_one(n, cfg, subdir) for n in names]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_one, names, [cfg] * len(names), [subdir] * len(names)))
    for name, code, msg in results:
        print(f"[{name}] {msg}", flush=True)
    return _worst([code for _, code, _ in results])


def cmd_list(args) -> int:
    for name, fn in REGISTRY.items():
        doc = (fn.__doc__ or "").strip().splitlines()[0] if fn.__doc__ else ""
        print(f"{name}\t{doc}")
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=float, default=None, help="transport exponent in (1, inf); default 2")
    common.add_argument("--seed", type=int, default=None, help="64-bit seed for the PCG64 generator")
    common.add_argument("--jobs", type=int, default=1, help="parallel experiment jobs")
    common.add_argument("--out", type=Path, default=None, help="output directory (file for geodesic)")
    common.add_argument("--tol-distance", type=float, default=None)
    common.add_argument("--tol-mass", type=float, default=None)
    common.add_argument("--tol-lp", type=float, default=None)

    ap = argparse.ArgumentParser(prog="wassrigid", description="Discrete optimal transport on compact geodesic spaces.")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", parents=[common], help="solve a transport instance between two measure files")
    s.add_argument("mu", type=Path)
    s.add_argument("nu", type=Path)
    s.add_argument("--plan", action="store_true", help="also print the plan block")
    s.add_argument("--no-unique", action="store_true", help="skip the uniqueness re-solves")
    s.set_defaults(func=cmd_solve)

    g = sub.add_parser("geodesic", parents=[common], help="evaluate the displacement interpolation as CSV")
    g.add_argument("mu", type=Path)
    g.add_argument("nu", type=Path)
    g.add_argument("--times", default="0,0.25,0.5,0.75,1")
    g.set_defaults(func=cmd_geodesic)

    w = sub.add_parser(
        "sweep", parents=[common], help="residual sweep to CSV", epilog=SWEEP_HELP, formatter_class=argparse.RawDescriptionHelpFormatter
    )
    w.add_argument("kind", choices=["flatness", "convexity", "speed"])
    w.add_argument("--config", type=Path, default=None)
    w.set_defaults(func=cmd_sweep)

    e = sub.add_parser("experiment", parents=[common], help="run registered experiments ('all' for every one)")
    e.add_argument("names", nargs="+")
    e.add_argument("--config", type=Path, default=None)
    e.set_defaults(func=cmd_experiment)

    ls = sub.add_parser("list-experiments", help="list registered experiments")
    ls.set_defaults(func=cmd_list)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
