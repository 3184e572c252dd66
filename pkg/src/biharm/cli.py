"""Command line front end: ``biharm verify|sweep|identities``.

Exit codes: 0 success, 1 internal error or failed check, 2 configuration
error, 3 the map is not a Riemannian submersion.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import itertools
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import biharmonic as bh
from . import catalog
from .bcv import BCVParams, bcv_connection_oracle, bcv_curvature_oracle, bcv_frame, bcv_metric, classify_bcv
from .errors import BiharmError, ConfigError, InvalidSubmersion, OutOfDomain, SingularMetric
from .expr import parse_expression
from .geometry import ChartDomain, MetricField, as_coords, levi_civita, riemann_component
from .submersion import SubmersionSpec, build_frame, integrability_data

log = logging.getLogger("biharm")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_INVALID = 0, 1, 2, 3
PARAM_NAMES = ("m", "l", "a", "b")
SWEEP_HEADER = ("entry", "m", "l", "a", "b", "model", "verdict", "expected", "max_r1", "max_r2",
                "max_tension", "max_jacobi", "max_rc", "error")
IDENTITY_TOLS = {
    "jacobi": 1e-8,
    "rc": 1e-7,
    "fiber_constancy": 1e-7,
    "base_curvature": 1e-7,
    "structure": 1e-8,
    "oracle_data": 1e-9,
    "bcv_connection": 1e-9,
    "bcv_curvature": 1e-9,
}


@dataclass
class RunConfig:
    command: str
    entry: str | None = None
    params: dict = field(default_factory=dict)  # name -> list of floats
    custom: dict | None = None
    points: int = 50
    seed: int = 0
    tol_h: float = 1e-7
    tol_b: float = 1e-6
    fmt: str | None = None
    out: str | None = None
    jobs: int = 1
    bcv: tuple | None = None

    def __post_init__(self):
        if self.points < 1:
            raise ConfigError("--points must be >= 1")
        if self.tol_h <= 0 or self.tol_b <= 0:
            raise ConfigError("tolerances must be positive")
        if self.jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        if any(len(v) == 0 for v in self.params.values()):
            raise ConfigError("parameter grid is empty")

    @property
    def plan(self) -> bh.SamplePlan:
        return bh.SamplePlan(self.points, self.seed)

    @property
    def tolerances(self) -> bh.Tolerances:
        return bh.Tolerances(self.tol_h, self.tol_b)

    def single_params(self) -> dict:
        out = {}
        for k, v in self.params.items():
            if len(v) != 1:
                raise ConfigError(f"--{k} takes a single value for {self.command}")
            out[k] = v[0]
        return out


# -- config files ---------------------------------------------------------------


def read_config_file(path: str) -> dict:
    """Flat ``key = value`` file (``#`` comments); returns a plain dict."""
    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#",), inline_comment_prefixes=("#",))
    try:
        with open(path) as fh:
            parser.read_string("[run]\n" + fh.read())
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from None
    return dict(parser["run"])


def _floats(text: str, key: str) -> list[float]:
    try:
        return [float(t) for t in text.replace(";", ",").split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"{key}: expected comma-separated numbers, got {text!r}") from None


METRIC_KEYS = {f"g{i + 1}{j + 1}": (i, j) for i in range(3) for j in range(i, 3)}
BASE_KEYS = {"h11": (0, 0), "h12": (0, 1), "h22": (1, 1)}


def custom_spec(cfg: dict) -> SubmersionSpec:
    """Submersion from expression strings: pi1, pi2, g11..g33, h11..h22 over (u, v),
    eta1_u, eta1_v, eta2_u, eta2_v, lower, upper, optional constraints and param_*."""
    params = {k[len("param_"):]: float(v) for k, v in cfg.items() if k.startswith("param_")}
    M = lambda key, default=None: parse_expression(cfg.get(key, default), ("x", "y", "z"), params)  # noqa: E731
    B = lambda key, default=None: parse_expression(cfg.get(key, default), ("u", "v"), params)  # noqa: E731
    missing = [k for k in ("pi1", "pi2", "eta1_u", "eta1_v", "eta2_u", "eta2_v") if k not in cfg]
    if missing:
        raise ConfigError(f"custom spec is missing {', '.join(missing)}")

    lower = tuple(_floats(cfg.get("lower", "-1,-1,-1"), "lower"))
    upper = tuple(_floats(cfg.get("upper", "1,1,1"), "upper"))
    if len(lower) != 3 or len(upper) != 3 or any(lo >= hi for lo, hi in zip(lower, upper)):
        raise ConfigError("lower/upper must be three increasing bounds")
    cons_text = [t for t in cfg.get("constraints", "").split(";") if t.strip()]
    cons = tuple(
        (lambda P, f=parse_expression(t, ("x", "y", "z"), params): np.broadcast_to(
            np.asarray(f((P[:, 0], P[:, 1], P[:, 2])), float), P.shape[:1]))
        for t in cons_text
    )
    domain = ChartDomain(cfg.get("domain", "custom"), lower, upper, cons)

    diag = {"g11", "g22", "g33"}
    g_entries = {ij: M(k, "1" if k in diag else "0") for k, ij in METRIC_KEYS.items()}
    h_entries = {ij: B(k, "1" if k in ("h11", "h22") else "0") for k, ij in BASE_KEYS.items()}
    g = MetricField.from_entries(3, g_entries, domain, cfg.get("name", "custom"))
    h = MetricField.from_entries(2, h_entries, None, "custom-base")
    pi1, pi2 = M("pi1"), M("pi2")
    e = {k: B(k) for k in ("eta1_u", "eta1_v", "eta2_u", "eta2_v")}
    spec = SubmersionSpec(
        name=cfg.get("name", "custom"),
        projection=lambda c: (pi1(c), pi2(c)),
        metric=g,
        base_metric=h,
        base_frame=(lambda c: (e["eta1_u"](c), e["eta1_v"](c)), lambda c: (e["eta2_u"](c), e["eta2_v"](c))),
        domain=domain,
        params=params,
    )
    probe = domain.sample(1, 0)
    try:
        g.check_spd(probe)
    except SingularMetric as exc:
        raise ConfigError(f"custom metric: {exc}") from None
    return spec


# -- argument parsing -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="biharm", description="Biharmonicity checks for Riemannian submersions M^3 -> N^2.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("entry", nargs="?", help=f"catalog entry: {', '.join(catalog.BUILDERS)}")
        for name in PARAM_NAMES:
            sp.add_argument(f"--{name}", help=f"parameter {name} (comma list for sweep; use --{name}=-1 for negatives)")
        sp.add_argument("--points", type=int, help="sample points (default 50)")
        sp.add_argument("--seed", type=int, help="sampling seed (default 0)")
        sp.add_argument("--tol-h", type=float, help="harmonic tolerance (default 1e-7)")
        sp.add_argument("--tol-b", type=float, help="biharmonic tolerance (default 1e-6)")
        sp.add_argument("--format", choices=("json", "csv"), dest="fmt")
        sp.add_argument("--out", help="output path (default stdout)")
        sp.add_argument("--jobs", type=int, help="worker processes for sweeps")
        sp.add_argument("--config", help="flat key = value file; command-line options win")

    common(sub.add_parser("verify", help="classify one submersion"))
    common(sub.add_parser("sweep", help="classify over a parameter grid ('catalog' for every entry)"))
    ident = sub.add_parser("identities", help="structure identities and closed-form cross-checks")
    common(ident)
    ident.add_argument("--bcv", nargs=2, type=float, metavar=("M", "L"), help="check a BCV space directly")
    return p


def resolve(args: argparse.Namespace) -> RunConfig:
    cfg = read_config_file(args.config) if getattr(args, "config", None) else {}

    def pick(name, conv, default):
        v = getattr(args, name, None)
        if v is not None:
            return v
        if name.replace("_", "-") in cfg or name in cfg:
            raw = cfg.get(name, cfg.get(name.replace("_", "-")))
            try:
                return conv(raw)
            except ValueError:
                raise ConfigError(f"{name}: bad value {raw!r}") from None
        return default

    params = {}
    for name in PARAM_NAMES:
        raw = getattr(args, name, None)
        raw = raw if raw is not None else cfg.get(name)
        if raw is not None:
            params[name] = _floats(str(raw), name)
    entry = args.entry or cfg.get("entry")
    custom = cfg if "pi1" in cfg else None
    if entry is None and custom is None and not getattr(args, "bcv", None) and args.command != "sweep":
        raise ConfigError("name a catalog entry, pass --config with a custom spec, or use --bcv")
    return RunConfig(
        command=args.command,
        entry=entry,
        params=params,
        custom=custom,
        points=pick("points", int, 50),
        seed=pick("seed", int, 0),
        tol_h=pick("tol_h", float, 1e-7),
        tol_b=pick("tol_b", float, 1e-6),
        fmt=pick("fmt", str, None),
        out=pick("out", str, None),
        jobs=pick("jobs", int, 1),
        bcv=tuple(args.bcv) if getattr(args, "bcv", None) else None,
    )


# -- commands -------------------------------------------------------------------


def _entry(name: str, params: dict) -> catalog.CatalogEntry:
    try:
        builder, defaults = catalog.BUILDERS[name]
    except KeyError:
        raise ConfigError(f"unknown entry {name!r}; choose from {', '.join(catalog.BUILDERS)}") from None
    extra = set(params) - set(defaults)
    if extra:
        raise ConfigError(f"entry {name!r} takes no parameter {', '.join(sorted(extra))}")
    try:
        return catalog.get_entry(name, **params)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _target(config: RunConfig):
    """(spec, entry name, expected verdict or None)."""
    if config.custom is not None and config.entry in (None, "custom"):
        spec = custom_spec(config.custom)
        return spec, spec.name, None
    e = _entry(config.entry, config.single_params())
    return e.spec, e.name, e.expected_verdict


def _emit(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def cmd_verify(config: RunConfig) -> int:
    spec, name, expected = _target(config)
    report = bh.classify_map(spec, config.plan, config.tolerances, entry=name, expected_verdict=expected)
    if config.fmt == "csv":
        _emit(_csv(bh.BiharmonicReport.CSV_HEADER, report.csv_rows()), config.out)
    else:
        _emit(json.dumps(report.to_dict(), indent=2) + "\n", config.out)
    verdict = report.verdict
    log.info("%s %s: %s", name, report.params, verdict)
    if expected is None:
        return EXIT_OK if verdict != catalog.INCONCLUSIVE else EXIT_FAIL
    return EXIT_OK if verdict == expected else EXIT_FAIL


def sweep_cells(config: RunConfig) -> list[tuple[str, dict]]:
    names = list(catalog.BUILDERS) if config.entry in (None, "catalog") else [config.entry]
    cells = []
    for name in names:
        if name not in catalog.BUILDERS:
            raise ConfigError(f"unknown entry {name!r}; choose from catalog, {', '.join(catalog.BUILDERS)}")
        grid = dict(catalog.DEFAULT_GRIDS[name])
        for k, v in config.params.items():
            if k not in catalog.BUILDERS[name][1]:
                raise ConfigError(f"entry {name!r} takes no parameter {k}")
            grid[k] = tuple(v)
        keys = list(grid)
        for combo in itertools.product(*(grid[k] for k in keys)):
            cells.append((name, dict(zip(keys, combo))))
    return cells


def sweep_row(name: str, params: dict, plan: bh.SamplePlan, tol: bh.Tolerances) -> tuple:
    """One grid cell; failures are recorded in the row instead of raised."""
    cols = [params.get(k, "") for k in PARAM_NAMES]
    try:
        e = catalog.get_entry(name, **params)
        r = bh.classify_map(e.spec, plan, tol, entry=name, expected_verdict=e.expected_verdict)
        a = r.aggregate()
        return (name, *cols, str(e.model), r.verdict, e.expected_verdict, a["max_r1"], a["max_r2"],
                a["max_tension"], a["max_jacobi"], a["max_rc"], "")
    except (BiharmError, ValueError, ArithmeticError) as exc:
        return (name, *cols, "", "error", "", "", "", "", "", "", f"{type(exc).__name__}: {exc}")


def cmd_sweep(config: RunConfig) -> int:
    cells = sweep_cells(config)
    args = [(n, p, config.plan, config.tolerances) for n, p in cells]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            rows = list(pool.map(sweep_row, *zip(*args)))  # map keeps grid order
    else:
        rows = [sweep_row(*a) for a in args]
    if config.fmt == "json":
        doc = {"schema_version": bh.SCHEMA_VERSION, "command": "sweep",
               "rows": [dict(zip(SWEEP_HEADER, r)) for r in rows]}
        _emit(json.dumps(doc, indent=2) + "\n", config.out)
    else:
        _emit(_csv(SWEEP_HEADER, rows), config.out)
    bad = [r for r in rows if r[6] == "error" or r[6] != r[7]]
    return EXIT_OK if not bad else EXIT_FAIL


def _check(checks: dict, name: str, value: float) -> None:
    prev = checks.get(name, {}).get("max_residual", 0.0)
    worst = max(prev, float(value))
    checks[name] = {"max_residual": worst, "tol": IDENTITY_TOLS[name], "ok": worst < IDENTITY_TOLS[name]}


def spec_identities(spec: SubmersionSpec, points, oracle=None) -> dict:
    checks = {}
    frame = build_frame(spec)
    g = spec.metric
    c = as_coords(points)
    data = integrability_data(frame, g)
    _check(checks, "structure", data.structure_residual(c))
    _check(checks, "jacobi", np.max(np.abs(bh.jacobi_residuals(frame, data, g, c))))
    _check(checks, "rc", np.max(np.abs(bh.rc_residuals(frame, data, g, c))))
    _check(checks, "fiber_constancy", np.max(np.abs(bh.fiber_constancy_residual(frame, data, c))))
    _check(checks, "base_curvature", bh.base_curvature_mismatch(spec, c))
    if oracle is not None:
        got, want = data.at(c), oracle(points)
        _check(checks, "oracle_data", max(np.max(np.abs(got[k] - want[k])) for k in want))
    return checks


def bcv_identities(params: BCVParams, points) -> dict:
    checks = {}
    g, E = bcv_metric(params), bcv_frame(params)
    for i in range(3):
        for j in range(3):
            err = levi_civita(g, E[i], E[j], points) - bcv_connection_oracle(params, i + 1, j + 1)(points)
            _check(checks, "bcv_connection", np.max(np.abs(err)))
    for idx in itertools.product(range(1, 4), repeat=4):
        err = riemann_component(g, E, *idx, points) - bcv_curvature_oracle(params, idx)
        _check(checks, "bcv_curvature", np.max(np.abs(err)))
    return checks


def cmd_identities(config: RunConfig) -> int:
    if config.bcv is not None:
        params = BCVParams(*config.bcv)
        target = {"bcv": {"m": params.m, "l": params.l}, "model": str(classify_bcv(params))}
        points = params.domain.sample(config.points, config.seed)
        checks = bcv_identities(params, points)
        e = catalog.bcv_z_projection(params.m, params.l)
        checks.update(spec_identities(e.spec, points, e.oracle))
    else:
        spec, name, _ = _target(config)
        oracle = None
        if config.custom is None or config.entry not in (None, "custom"):
            oracle = _entry(config.entry, config.single_params()).oracle
        target = {"entry": name, "params": dict(spec.params)}
        points = config.plan.points(spec)
        checks = spec_identities(spec, points, oracle)
    ok = all(c["ok"] for c in checks.values())
    if config.fmt == "csv":
        rows = [(k, v["max_residual"], v["tol"], v["ok"]) for k, v in checks.items()]
        _emit(_csv(("check", "max_residual", "tol", "ok"), rows), config.out)
    else:
        doc = {"schema_version": bh.SCHEMA_VERSION, "command": "identities", **target,
               "n_points": int(len(points)), "checks": checks, "ok": ok}
        _emit(json.dumps(doc, indent=2) + "\n", config.out)
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {"verify": cmd_verify, "sweep": cmd_sweep, "identities": cmd_identities}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with status 2
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = resolve(args)
        return COMMANDS[config.command](config)
    except ConfigError as exc:
        print(f"biharm: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvalidSubmersion as exc:
        print(f"biharm: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OutOfDomain as exc:
        print(f"biharm: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001
        log.debug("internal error", exc_info=True)
        print(f"biharm: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
