"""
Command-line front end.

    moving-picture list-checks [--module NAME]
    moving-picture verify   [--system free|harmonic] [--times 0.3,0.7] [--checks all|a,b] ...
    moving-picture tabulate WHAT [...]

Options may also come from ``--config FILE``, a flat ``key = value`` file
whose keys mirror the long flag names; flags on the command line win.

Exit codes: 0 success, 1 at least one check failed, 2 bad configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import hamilton_jacobi as hj
from . import kernels as kn
from .checks import MODULES, REGISTRY, Context, list_checks
from .errors import MovingPictureError
from .hilbert import Grid, SystemParams

log = logging.getLogger("moving_picture")

TABULATE_WHAT = ("kernel", "moving_number", "moving_coherent", "moving_momentum", "action")
DEFAULT_GRID = (-12.0, 12.0, 256)
VERIFY_KEYS = ("system", "m", "omega", "hbar", "grid", "times", "checks", "seed", "format")


class ConfigError(MovingPictureError):
    pass


@dataclass(frozen=True)
class RunConfig:
    system: str = "harmonic"
    m: float = 1.0
    omega: float = 1.0
    hbar: float = 1.0
    grid: tuple = DEFAULT_GRID
    times: tuple = (0.3, 0.7)
    checks: tuple = ("all",)
    seed: int = 0
    out: Optional[str] = None
    format: str = "json"
    # tabulate-only settings
    representation: str = "position"
    x: float = 0.0
    n_max: int = 4
    z: complex = 1.0 + 0.5j
    p: float = 1.0
    points: int = 201
    range: tuple = (-5.0, 5.0)
    part: str = "re"

    def params(self) -> SystemParams:
        if self.system == "free":
            return SystemParams.free(m=self.m, hbar=self.hbar)
        return SystemParams.harmonic(m=self.m, omega=self.omega, hbar=self.hbar)

    def make_grid(self) -> Grid:
        q_min, q_max, n = self.grid
        return Grid(q_min, q_max, int(n))

    def echo(self) -> dict:
        """Settings that determine a verify report; the output path is left out so reports compare equal."""
        d = {key: getattr(self, key) for key in VERIFY_KEYS}
        for key in ("grid", "times", "checks"):
            d[key] = list(d[key])
        d["grid"][2] = int(d["grid"][2])
        if self.system == "free":
            d["omega"] = None
        return d


def _floats(text: str, count: Optional[int] = None) -> tuple:
    try:
        vals = tuple(float(v) for v in str(text).split(",") if v.strip())
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from exc
    if count is not None and len(vals) != count:
        raise ConfigError(f"expected {count} numbers, got {text!r}")
    return vals


_PARSERS = {
    "system": lambda v: v.strip().lower(),
    "m": float,
    "omega": float,
    "hbar": float,
    "grid": lambda v: _floats(v, 3),
    "times": _floats,
    "checks": lambda v: tuple(s.strip() for s in str(v).split(",") if s.strip()),
    "seed": int,
    "out": str,
    "format": lambda v: v.strip().lower(),
    "representation": str,
    "x": float,
    "n_max": int,
    "z": lambda v: complex(str(v).replace(" ", "")),
    "p": float,
    "points": int,
    "range": lambda v: _floats(v, 2),
    "part": str,
}


def parse_config_text(text: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment; dashes in keys read as underscores."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = value
    return values


def build_config(file_values: dict, flag_values: dict) -> RunConfig:
    merged = {**file_values, **{k: v for k, v in flag_values.items() if v is not None}}
    kwargs = {}
    for key, raw in merged.items():
        try:
            kwargs[key] = _PARSERS[key](raw)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key}: {raw!r}") from exc
    cfg = RunConfig(**kwargs)
    if cfg.system not in ("free", "harmonic"):
        raise ConfigError(f"unknown system {cfg.system!r}")
    if cfg.format not in ("json", "csv"):
        raise ConfigError(f"unknown format {cfg.format!r}")
    if cfg.points < 2:
        raise ConfigError("points must be at least 2")
    try:
        cfg.params()
        cfg.make_grid()
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


# ---------------------------------------------------------------------------
# verify


def select_checks(names: Sequence[str]) -> list:
    if list(names) == ["all"]:
        return list(REGISTRY.values())
    unknown = [n for n in names if n not in REGISTRY]
    if unknown:
        raise ConfigError(f"unknown check(s): {', '.join(unknown)}")
    return [REGISTRY[n] for n in names]


def run_verify(cfg: RunConfig) -> dict:
    """Run the configured checks; returns the report document plus a timing sidecar under ``_timing``."""
    params = cfg.params()
    ctx = Context(params, cfg.make_grid(), cfg.seed)
    rows, notices, timing = [], [], []
    skipped = 0
    for check in select_checks(cfg.checks):
        if params.system.value not in check.systems:
            notices.append(f"{check.name}: not applicable to the {params.system.value} system")
            skipped += 1
            continue
        times = cfg.times if check.time_dependent else (None,)
        for t in times:
            if t is not None and check.guard is not None:
                reason = check.guard(ctx, t)
                if reason:
                    msg = f"{check.name}: skipped, {reason} (caustic window)"
                    log.warning(msg)
                    notices.append(msg)
                    skipped += 1
                    continue
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                reports = check.run(ctx, t)
            for r in reports:
                rows.append((r.check_name, -np.inf if t is None else t, t, r))
    rows.sort(key=lambda row: (row[0], row[1]))
    out_reports = []
    for _, _, t, r in rows:
        d = r.to_dict()
        d["t"] = t
        out_reports.append(d)
        timing.append({"check_name": r.check_name, "t": t, "runtime_ms": r.runtime_ms})
    passed = sum(1 for r in out_reports if r["passed"])
    return {
        "config_echo": cfg.echo(),
        "rng": {"generator": "PCG64", "seed": cfg.seed},
        "reports": out_reports,
        "notices": notices,
        "summary": {"passed": passed, "failed": len(out_reports) - passed, "skipped": skipped},
        "_timing": {"generated_unix": time.time(), "runtimes": timing},
    }


def render_report(doc: dict, fmt: str) -> str:
    body = {k: v for k, v in doc.items() if not k.startswith("_")}
    if fmt == "json":
        return json.dumps(body, indent=2, ensure_ascii=False) + "\n"
    buf = io.StringIO()
    buf.write("# moving-picture verify report\n")
    buf.write("# config " + json.dumps(body["config_echo"], sort_keys=True) + "\n")
    buf.write("# summary " + json.dumps(body["summary"], sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["check_name", "system", "t", "residual", "tolerance", "passed", "metadata"])
    for r in body["reports"]:
        writer.writerow([r["check_name"], r["system"], "" if r["t"] is None else repr(r["t"]),
                         repr(r["residual"]), repr(r["tolerance"]), r["passed"],
                         json.dumps(r["metadata"], sort_keys=True)])
    return buf.getvalue()


def cmd_verify(cfg: RunConfig) -> int:
    doc = run_verify(cfg)
    text = render_report(doc, cfg.format)
    if cfg.out:
        path = Path(cfg.out)
        path.write_text(text, encoding="utf-8")
        sidecar = path.with_name(path.name + ".timing.json")
        sidecar.write_text(json.dumps(doc["_timing"], indent=2) + "\n", encoding="utf-8")
    else:
        sys.stdout.write(text)
    s = doc["summary"]
    print(f"passed {s['passed']}, failed {s['failed']}, skipped {s['skipped']}", file=sys.stderr)
    return 0 if s["failed"] == 0 else 1


# ---------------------------------------------------------------------------
# tabulate


def _fmt(v) -> str:
    return format(float(v), ".17g")


def _part(values, part: str):
    if part == "re":
        return np.real(values)
    if part == "im":
        return np.imag(values)
    if part == "abs":
        return np.abs(values)
    if part == "arg":
        return np.angle(values)
    raise ConfigError(f"unknown part {part!r}")


def tabulate(cfg: RunConfig, what: str) -> str:
    """CSV text for one tabulation; deterministic given the configuration."""
    if what not in TABULATE_WHAT:
        raise ConfigError(f"unknown tabulation {what!r}; choose from {', '.join(TABULATE_WHAT)}")
    params = cfg.params()
    t = cfg.times[0]
    axis = np.linspace(cfg.range[0], cfg.range[1], cfg.points)
    p = params.as_dict()
    head = f"# what={what} system={p['system']} m={p['m']} hbar={p['hbar']} omega={p['omega']} t={t!r}"
    rows: list[list] = []

    if what == "kernel":
        spec = kn.KernelSpec(params, cfg.representation)
        second = "Q" if spec.representation is kn.Representation.POSITION else "P"
        relation = "<q|Q;t> = <q|T(t)|Q>" if second == "Q" else "<q|P;t> = <q|T(t)|P>"
        header = ["q", second, "re", "im"]
        qq, xx = np.meshgrid(axis, axis, indexing="ij")
        K = kn.kernel(spec, qq.ravel(), xx.ravel(), t)
        rows = [[_fmt(a), _fmt(b), _fmt(c.real), _fmt(c.imag)] for a, b, c in zip(qq.ravel(), xx.ravel(), K)]
    elif what == "moving_number":
        relation = f"<Q;t|n> for n=0..{cfg.n_max}, part={cfg.part}"
        header = ["Q"] + [f"n{n}" for n in range(cfg.n_max + 1)]
        cols = [_part(kn.moving_number_state(params, axis, n, t), cfg.part) for n in range(cfg.n_max + 1)]
        rows = [[_fmt(a)] + [_fmt(c[i]) for c in cols] for i, a in enumerate(axis)]
    elif what == "moving_coherent":
        relation = f"<Q;t|z> with z={cfg.z!r}"
        header = ["Q", "re", "im"]
        vals = kn.moving_coherent_state(params, axis, cfg.z, t)
        rows = [[_fmt(a), _fmt(v.real), _fmt(v.imag)] for a, v in zip(axis, vals)]
    elif what == "moving_momentum":
        relation = f"<Q;t|p> with p={cfg.p!r}"
        header = ["Q", "re", "im"]
        vals = kn.moving_momentum_state(params, axis, cfg.p, t)
        rows = [[_fmt(a), _fmt(v.real), _fmt(v.imag)] for a, v in zip(axis, vals)]
    else:
        rep = "qP" if cfg.representation in ("qP", "momentum") else "qQ"
        W = hj.generating(params, rep)
        action = hj.quantum_action(W, cfg.x)
        relation = f"S = W + i hbar int F dt for W(q,{rep[1]},t) at {rep[1]}={cfg.x!r}"
        header = ["q", "W", "F", "ReS", "ImS"]
        Wv = W.W(axis, cfg.x, t)
        F = action.F(t)
        S = action.S(axis, t)
        rows = [[_fmt(a), _fmt(w), _fmt(F), _fmt(s.real), _fmt(s.imag)] for a, w, s in zip(axis, Wv, S)]

    buf = io.StringIO()
    buf.write(f"{head} relation: {relation}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def cmd_tabulate(cfg: RunConfig, what: str) -> int:
    text = tabulate(cfg, what)
    if len(cfg.times) > 1:
        log.warning("tabulate uses only the first time, t=%r", cfg.times[0])
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_list_checks(module: Optional[str] = None, stream=None) -> int:
    stream = stream or sys.stdout
    if module is not None and module not in MODULES:
        log.warning("unknown module %r; known modules: %s", module, ", ".join(MODULES))
    for c in list_checks(module):
        stream.write(f"{c.name} [{c.module}] - {c.anchor}\n")
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key = value file; flags override it")
    parser.add_argument("--system", help="free or harmonic (default harmonic)")
    parser.add_argument("--m", help="mass (default 1)")
    parser.add_argument("--omega", help="oscillator frequency (default 1)")
    parser.add_argument("--hbar", help="reduced Planck constant (default 1)")
    parser.add_argument("--grid", help="qmin,qmax,n (default -12,12,256)")
    parser.add_argument("--times", help="comma-separated times (default 0.3,0.7)")
    parser.add_argument("--seed", help="seed for random sample points (default 0)")
    parser.add_argument("--out", help="output path (default stdout)")
    parser.add_argument("--format", help="json or csv (verify only; default json)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="moving-picture", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list-checks", help="list registered checks")
    p.add_argument("--module", help="only checks of this module")

    p = sub.add_parser("verify", help="run checks and write a report")
    _common(p)
    p.add_argument("--checks", help="'all' or comma-separated check names")

    p = sub.add_parser("tabulate", help="write plot-ready CSV")
    p.add_argument("what", help=", ".join(TABULATE_WHAT))
    _common(p)
    p.add_argument("--representation", help="position|momentum (kernel) or qQ|qP (action)")
    p.add_argument("--x", help="fixed Q or P for kernel/action tables (default 0)")
    p.add_argument("--n-max", dest="n_max", help="highest number state (default 4)")
    p.add_argument("--z", help="coherent amplitude, e.g. 1+0.5j")
    p.add_argument("--p", help="momentum for moving_momentum (default 1)")
    p.add_argument("--points", help="samples per axis (default 201)")
    p.add_argument("--range", help="axis range a,b (default -5,5)")
    p.add_argument("--part", help="re|im|abs|arg for moving_number columns (default re)")
    return parser


def _load_config(args: argparse.Namespace) -> RunConfig:
    file_values = {}
    if getattr(args, "config", None):
        try:
            file_values = parse_config_text(Path(args.config).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
    flags = {k: getattr(args, k, None) for k in _PARSERS}
    return build_config(file_values, flags)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    if args.command == "list-checks":
        return cmd_list_checks(args.module)
    try:
        cfg = _load_config(args)
        if args.command == "verify":
            select_checks(cfg.checks)
            return cmd_verify(cfg)
        return cmd_tabulate(cfg, args.what)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MovingPictureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
