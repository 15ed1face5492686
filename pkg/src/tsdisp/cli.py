"""``tsd`` command-line front end.

Subcommands ``tietjens``, ``solve``, ``neutral``, ``asym`` and ``oracle``.
Settings come from defaults, then a JSON config file (``--config``), then
flags.  Distinct nu values run in a process pool (``--jobs``); output order
follows the nu grid regardless of completion order.

Exit codes: 0 success, 2 configuration error, 3 solver failure (partial
outputs are still written).
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .asymptotics import predict
from .dispersion import (
    STRIP_CONVENTIONS,
    NoUnstableBandError,
    SweepAbortedError,
    lower_branch_seed,
    max_growth_rate,
    neutral_points,
    sweep_alpha,
)
from .oscheck import MIN_NU, os_eigenvalue
from .profiles import PROFILES, Domain, make_profile
from .specfun import ASYM_MIN, tietjens, tietjens_asymptotic

log = logging.getLogger("tsdisp")

SCHEMA_VERSION = 1
EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 2, 3

POINT_COLUMNS = ("alpha", "re_c", "im_c", "growth_rate", "residual", "converged")
TIETJENS_COLUMNS = ("y", "re_ti", "im_ti", "regime", "asym3_re", "asym3_im")
CURVE_FIELDS = (
    "nu", "alpha_minus", "alpha_plus", "c_at_minus", "c_at_plus",
    "predicted_alpha_minus", "predicted_alpha_plus", "deviation_minus", "deviation_plus",
    "max_growth_rate", "flags",
)
DEFAULT_PROFILE = {Domain.HALF_SPACE.value: "exponential", Domain.STRIP.value: "parabolic"}

DEFAULTS = {
    "geometry": "half_space",
    "profile": {"name": None, "params": {}},
    "nu_grid": [],
    "alpha_grid": {"min_scale": 0.1, "max_scale": 10.0, "count": 64, "spacing": "log"},
    "solver": {"rtol": 1e-6, "maxiter": 100, "ftol": 1e-10, "convention": "mirrored"},
    "oracle": {"alphas": None, "tol": 1e-10},
    "outputs": {"dir": None, "format": None},
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    geometry: str
    profile: dict
    nu_grid: tuple
    alpha_grid: dict
    solver: dict
    oracle: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)

    def make_profile(self):
        return make_profile(self.profile["name"], **self.profile["params"])

    def solver_kwargs(self) -> dict:
        kw = {"maxiter": int(self.solver["maxiter"]), "ftol": float(self.solver["ftol"])}
        if self.geometry == Domain.STRIP.value:
            kw["convention"] = self.solver["convention"]
        return kw

    def alpha_grid_for(self, nu: float) -> np.ndarray:
        """Grid from min_scale * nu^p_lower to max_scale * nu^p_upper."""
        lo_p, hi_p = (0.25, 1 / 6) if self.geometry == Domain.HALF_SPACE.value else (1 / 7, 1 / 11)
        grid = self.alpha_grid
        lo = grid["min_scale"] * nu ** lo_p
        hi = grid["max_scale"] * nu ** hi_p
        if lo >= hi:
            raise ConfigError(f"empty alpha grid at nu={nu:g}")
        if grid["spacing"] == "log":
            return np.geomspace(lo, hi, grid["count"])
        return np.linspace(lo, hi, grid["count"])

    def _predict_kw(self) -> dict:
        if self.geometry == Domain.STRIP.value:
            return {"convention": self.solver["convention"]}
        return {}

    def to_dict(self) -> dict:
        return {
            "geometry": self.geometry, "profile": self.profile, "nu_grid": list(self.nu_grid),
            "alpha_grid": self.alpha_grid, "solver": self.solver, "oracle": self.oracle,
            "outputs": self.outputs,
        }


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for key, val in over.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = val
    return out


def _positive(x, name: str) -> float:
    try:
        x = float(x)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a number") from None
    if not (x > 0 and math.isfinite(x)):
        raise ConfigError(f"{name} must be positive and finite")
    return x


def build_config(file_data: dict | None = None, overrides: dict | None = None) -> RunConfig:
    """Defaults < file < overrides, validated."""
    raw = _merge(DEFAULTS, file_data or {})
    raw = _merge(raw, overrides or {})
    unknown = set(raw) - set(DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    geometry = raw["geometry"]
    if geometry not in DEFAULT_PROFILE:
        raise ConfigError(f"geometry must be one of {sorted(DEFAULT_PROFILE)}")
    prof = dict(raw["profile"])
    prof["name"] = prof.get("name") or DEFAULT_PROFILE[geometry]
    prof["params"] = dict(prof.get("params") or {})
    if prof["name"] not in PROFILES:
        raise ConfigError(f"unknown profile {prof['name']!r}")
    try:
        domain = make_profile(prof["name"], **prof["params"]).domain
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad profile parameters: {exc}") from None
    if domain.value != geometry:
        raise ConfigError(f"profile {prof['name']!r} is not a {geometry} profile")

    nus = raw["nu_grid"]
    if not isinstance(nus, (list, tuple)) or len(nus) == 0:
        raise ConfigError("nu_grid must be a non-empty list")
    nus = tuple(_positive(v, "nu") for v in nus)
    d = np.diff(nus)
    if not (np.all(d > 0) or np.all(d < 0)):
        raise ConfigError("nu_grid must be strictly monotone")

    ag = dict(raw["alpha_grid"])
    ag["min_scale"] = _positive(ag["min_scale"], "alpha_grid.min_scale")
    ag["max_scale"] = _positive(ag["max_scale"], "alpha_grid.max_scale")
    if not isinstance(ag["count"], int) or ag["count"] < 2:
        raise ConfigError("alpha_grid.count must be an integer >= 2")
    if ag["spacing"] not in ("log", "linear"):
        raise ConfigError("alpha_grid.spacing must be 'log' or 'linear'")

    sv = dict(raw["solver"])
    sv["rtol"] = _positive(sv["rtol"], "solver.rtol")
    sv["ftol"] = _positive(sv["ftol"], "solver.ftol")
    if not isinstance(sv["maxiter"], int) or sv["maxiter"] < 1:
        raise ConfigError("solver.maxiter must be a positive integer")
    if sv["convention"] not in STRIP_CONVENTIONS:
        raise ConfigError(f"solver.convention must be one of {STRIP_CONVENTIONS}")

    orc = dict(raw["oracle"])
    if orc.get("alphas") is not None:
        if not isinstance(orc["alphas"], (list, tuple)) or not orc["alphas"]:
            raise ConfigError("oracle.alphas must be a non-empty list")
        orc["alphas"] = [_positive(a, "oracle.alphas") for a in orc["alphas"]]
    orc["tol"] = _positive(orc["tol"], "oracle.tol")

    out = dict(raw["outputs"])
    if out.get("format") not in (None, "csv", "json"):
        raise ConfigError("outputs.format must be 'csv' or 'json'")
    return RunConfig(geometry, prof, nus, ag, sv, orc, out)


# ---------------------------------------------------------------- formatting

def fmt(x) -> str:
    """Number to text with 17 significant digits (exact round trip)."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def _json_ready(obj):
    # JSON has no inf/nan; complex numbers become [re, im]
    if isinstance(obj, dict):
        return {k: _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, complex):
        return [_json_ready(obj.real), _json_ready(obj.imag)]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return float(fmt(v)) if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def to_json(payload: dict) -> str:
    return json.dumps(_json_ready({"schema_version": SCHEMA_VERSION, **payload}), indent=2, sort_keys=True) + "\n"


def to_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    return buf.getvalue()


def _csv_with_schema(columns, rows) -> str:
    return f"# schema_version={SCHEMA_VERSION}\n" + to_csv(columns, rows)


# ---------------------------------------------------------------- workers

def _neutral_record(cfg: RunConfig, nu: float) -> tuple[dict, list]:
    """CurveRecord for one nu, plus the swept FlowPoints."""
    profile = cfg.make_profile()
    pred = predict(profile, nu, **cfg._predict_kw())
    rec = {k: None for k in CURVE_FIELDS}
    rec.update(nu=nu, predicted_alpha_minus=pred.alpha_minus, predicted_alpha_plus=pred.alpha_plus, flags=[])
    try:
        res = neutral_points(profile, nu, cfg.alpha_grid_for(nu), rtol=cfg.solver["rtol"], **cfg.solver_kwargs())
    except NoUnstableBandError:
        rec["flags"] = ["no_unstable_band"]
        return rec, []
    except SweepAbortedError:
        rec["flags"] = ["sweep_aborted"]
        return rec, []
    flags = list(res.flags)
    lo, hi = res.alpha_minus, res.alpha_plus
    if lo is not None:
        rec.update(alpha_minus=lo.alpha, c_at_minus=lo.c, deviation_minus=lo.alpha / pred.alpha_minus - 1)
    else:
        flags.append("missing_alpha_minus")
    if hi is not None:
        rec.update(alpha_plus=hi.alpha, c_at_plus=hi.c, deviation_plus=hi.alpha / pred.alpha_plus - 1)
    else:
        flags.append("missing_alpha_plus")
    try:
        rec["max_growth_rate"] = max_growth_rate(profile, nu, res.sweep, **cfg.solver_kwargs()).growth_rate
    except ValueError:
        flags.append("no_growth_rate")
    rec["flags"] = sorted(set(flags))
    return rec, res.sweep


def _solve_worker(args):
    cfg, nu = args
    rec, pts = _neutral_record(cfg, nu)
    rows = [(f.alpha, f.c.real, f.c.imag, f.growth_rate, f.residual_norm, f.converged) for f in pts]
    return rec, rows


def _disp_root(cfg: RunConfig, nu: float, alpha: float):
    """Asymptotic root at alpha, reached by continuation from the lower-branch seed."""
    profile = cfg.make_profile()
    a0, c0 = lower_branch_seed(profile, nu)
    grid = np.geomspace(a0, alpha, 16) if not math.isclose(a0, alpha) else [alpha]
    return sweep_alpha(profile, nu, grid, c0, abort_fraction=1.0, **cfg.solver_kwargs())[-1]


def band_center(cfg: RunConfig, nu: float) -> float:
    """Geometric mean of the predicted neutral wavenumbers."""
    pred = predict(cfg.make_profile(), nu, **cfg._predict_kw())
    return math.sqrt(pred.alpha_minus * pred.alpha_plus)


def _oracle_worker(args):
    cfg, nu = args
    profile = cfg.make_profile()
    alphas = cfg.oracle["alphas"] or [band_center(cfg, nu)]
    out = []
    for a in alphas:
        entry = {"nu": nu, "alpha": a, "c_disp": None, "c_os": None, "gap": None, "flags": []}
        fd = _disp_root(cfg, nu, a)
        if not fd.converged:
            entry["flags"].append("disp_unconverged")
            out.append(entry)
            continue
        entry["c_disp"] = fd.c
        try:
            fo = os_eigenvalue(profile, a, nu, fd.c, tol=cfg.oracle["tol"])
        except (OverflowError, ArithmeticError) as exc:
            log.warning("oracle failed at nu=%.3g alpha=%.6g: %s", nu, a, exc)
            entry["flags"].append("os_failed")
            out.append(entry)
            continue
        entry["c_os"] = fo.c
        entry["gap"] = abs(fo.c - fd.c) / abs(fd.c)
        if not fo.converged:
            entry["flags"].append("os_unconverged")
        out.append(entry)
    return out


def _run_pool(fn, cfg: RunConfig, jobs: int) -> list:
    tasks = [(cfg, nu) for nu in cfg.nu_grid]
    if jobs <= 1 or len(tasks) == 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
        return list(pool.map(fn, tasks))  # map preserves grid order


# ---------------------------------------------------------------- commands

def _emit(text: str, out_dir: Path | None, name: str) -> None:
    if out_dir is None:
        sys.stdout.write(text)
        return
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / name).write_text(text)


def cmd_tietjens(y_min: float, y_max: float, n: int) -> list[tuple]:
    if not (0 < y_min < y_max):
        raise ConfigError("need 0 < y_min < y_max")
    if n < 2:
        raise ConfigError("need n >= 2")
    rows = []
    for y in np.linspace(y_min, y_max, n):
        s = tietjens(y)
        if y >= ASYM_MIN:
            a = tietjens_asymptotic(y, 3)
            asym = (a.real, a.imag)
        else:
            asym = ("", "")
        rows.append((s.y, s.value.real, s.value.imag, s.regime.value, *asym))
    return rows


def _tietjens_main(args, out_dir, fmt_) -> int:
    rows = cmd_tietjens(args.y_min, args.y_max, args.n)
    if fmt_ == "json":
        recs = [dict(zip(TIETJENS_COLUMNS, (r if r != "" else None for r in row))) for row in rows]
        _emit(to_json({"tietjens": recs}), out_dir, "tietjens.json")
    else:
        _emit(to_csv(TIETJENS_COLUMNS, rows), out_dir, "tietjens.csv")
    return EXIT_OK


def _curve_csv(records) -> str:
    rows = []
    for r in records:
        row = []
        for k in CURVE_FIELDS:
            v = r[k]
            if k == "flags":
                row.append(";".join(v))
            elif isinstance(v, complex):
                row.append(f"{fmt(v.real)}{'+' if v.imag >= 0 else ''}{fmt(v.imag)}j")
            else:
                row.append(fmt(v))
        rows.append(row)
    return _csv_with_schema(CURVE_FIELDS, rows)


def _all_endpoints(records) -> bool:
    return all(r["alpha_minus"] is not None and r["alpha_plus"] is not None for r in records)


def cmd_solve(cfg: RunConfig, out_dir: Path, jobs: int = 1, fmt_: str = "json") -> int:
    results = _run_pool(_solve_worker, cfg, jobs)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = []
    for i, (rec, rows) in enumerate(results):
        (out_dir / f"points_{i:03d}.csv").write_text(_csv_with_schema(POINT_COLUMNS, rows))
        records.append(rec)
    if fmt_ == "csv":
        (out_dir / "summary.csv").write_text(_curve_csv(records))
    else:
        (out_dir / "summary.json").write_text(to_json({"config": cfg.to_dict(), "curves": records}))
    return EXIT_OK if _all_endpoints(records) else EXIT_SOLVER


def cmd_neutral(cfg: RunConfig, out_dir: Path | None, jobs: int = 1, fmt_: str = "json") -> int:
    records = [rec for rec, _ in _run_pool(_solve_worker, cfg, jobs)]
    if fmt_ == "csv":
        _emit(_curve_csv(records), out_dir, "neutral.csv")
    else:
        _emit(to_json({"config": cfg.to_dict(), "curves": records}), out_dir, "neutral.json")
    return EXIT_OK if _all_endpoints(records) else EXIT_SOLVER


ASYM_COLUMNS = ("nu", "alpha_minus", "alpha_plus", "re_c_lower", "im_c_lower", "has_band")


def cmd_asym(cfg: RunConfig, out_dir: Path | None, fmt_: str = "csv") -> int:
    profile = cfg.make_profile()
    rows = []
    for nu in cfg.nu_grid:
        p = predict(profile, nu, **cfg._predict_kw())
        cl = p.c_lower(p.alpha_minus)
        rows.append((nu, p.alpha_minus, p.alpha_plus, cl.real, cl.imag, p.has_band))
    if fmt_ == "json":
        recs = [dict(zip(ASYM_COLUMNS, r)) for r in rows]
        _emit(to_json({"predictions": recs}), out_dir, "asym.json")
    else:
        _emit(_csv_with_schema(ASYM_COLUMNS, rows), out_dir, "asym.csv")
    return EXIT_OK


def gap_monotone(entries) -> bool | None:
    """True when the gap shrinks at every step toward smaller nu (one alpha per nu)."""
    by_nu = sorted(((e["nu"], e["gap"]) for e in entries), reverse=True)
    gaps = [g for _, g in by_nu]
    if len(gaps) < 2 or any(g is None for g in gaps) or len(set(n for n, _ in by_nu)) != len(gaps):
        return None
    return all(b < a for a, b in zip(gaps, gaps[1:]))


def cmd_oracle_compare(cfg: RunConfig, out_dir: Path | None, jobs: int = 1) -> int:
    low = [nu for nu in cfg.nu_grid if nu < MIN_NU]
    if low:
        raise ConfigError(f"oracle needs nu >= {MIN_NU:g}; got {low}")
    entries = [e for group in _run_pool(_oracle_worker, cfg, jobs) for e in group]
    expected = len(cfg.nu_grid) * len(cfg.oracle["alphas"] or [None])
    report = {
        "config": cfg.to_dict(),
        "entries": entries,
        "expected_entries": expected,
        "gap_monotone": gap_monotone(entries),
    }
    _emit(to_json(report), out_dir, "oracle.json")
    ok = len(entries) == expected and all(not e["flags"] for e in entries)
    return EXIT_OK if ok else EXIT_SOLVER


# ---------------------------------------------------------------- entry point

def _parse_nu(values) -> list[float] | None:
    if not values:
        return None
    out = []
    for v in values:
        for part in v.split(","):
            part = part.strip()
            if part:
                try:
                    out.append(float(part))
                except ValueError:
                    raise ConfigError(f"bad --nu value {part!r}") from None
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON config file")
    common.add_argument("--geometry", choices=sorted(DEFAULT_PROFILE))
    common.add_argument("--nu", action="append", help="viscosity values (comma-separated or repeated)")
    common.add_argument("--out", type=Path, help="output directory (default: stdout where possible)")
    common.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="worker processes over nu")
    common.add_argument("--format", choices=("csv", "json"))

    p = argparse.ArgumentParser(prog="tsd", description="Tollmien-Schlichting dispersion toolkit")
    sub = p.add_subparsers(dest="command", required=True)
    t = sub.add_parser("tietjens", parents=[common], help="tabulate the Tietjens function")
    t.add_argument("--y-min", type=float, default=0.5)
    t.add_argument("--y-max", type=float, default=30.0)
    t.add_argument("-n", type=int, default=60)
    sub.add_parser("solve", parents=[common], help="alpha sweeps and neutral points per nu")
    sub.add_parser("neutral", parents=[common], help="neutral-curve summary per nu")
    sub.add_parser("asym", parents=[common], help="closed-form predictions per nu")
    sub.add_parser("oracle", parents=[common], help="Orr-Sommerfeld cross-check")
    return p


def _setup_logging() -> None:
    level = os.environ.get("TSD_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        if args.jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        if args.command == "tietjens":
            return _tietjens_main(args, args.out, args.format or "csv")
        file_data = {}
        if args.config is not None:
            try:
                file_data = json.loads(args.config.read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot read config: {exc}") from None
            if not isinstance(file_data, dict):
                raise ConfigError("config file must hold a JSON object")
        over: dict = {}
        if args.geometry:
            over["geometry"] = args.geometry
            if args.geometry != file_data.get("geometry", DEFAULTS["geometry"]):
                over["profile"] = {"name": None, "params": {}}
        nus = _parse_nu(args.nu)
        if nus is not None:
            over["nu_grid"] = nus
        cfg = build_config(file_data, over)
        fmt_ = args.format or cfg.outputs.get("format")
        out_dir = args.out or (Path(cfg.outputs["dir"]) if cfg.outputs.get("dir") else None)
        if args.command == "solve":
            return cmd_solve(cfg, out_dir or Path("tsd_out"), args.jobs, fmt_ or "json")
        if args.command == "neutral":
            return cmd_neutral(cfg, out_dir, args.jobs, fmt_ or "json")
        if args.command == "asym":
            return cmd_asym(cfg, out_dir, fmt_ or "csv")
        return cmd_oracle_compare(cfg, out_dir, args.jobs)
    except ConfigError as exc:
        print(f"tsd: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
