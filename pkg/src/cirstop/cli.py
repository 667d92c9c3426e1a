"""Command-line interface: solve, validate, density and sweep subcommands.

Configs are flat key=value text files (JSON also accepted); every key has a
default reproducing the baseline numerical example, so an empty config runs
the reference case.  All outputs are plain CSV/JSON written with full
precision; rerunning with the same config and seed reproduces the files
byte for byte.

Exit codes: 0 success, 1 validation failure, 2 config error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import hitting, mc, stopping
from .chf import SeriesControl
from .errors import CirstopError, ConfigError, NumericalError, ValidationFailure
from .housing import HousingSpec, buy_payoff, sell_payoff
from .hitting import ConvolvedDensity, HittingKind
from .mc import Direction, Scheme, SimConfig
from .rates import CirParams, DiscountMode, DiscountSpec, fundamental_pair, transform_g

__all__ = ["RunConfig", "SolveResult", "run_solve", "run_validate", "main"]

ENV_OUTPUT_DIR = "CIRSTOP_OUTPUT_DIR"

_DEFAULTS = {
    "kappa": 0.9,
    "theta": 0.08 / 0.9,
    "sigma": math.sqrt(0.033),
    "chi": 0.6,
    "gamma": 0.4,
    "discount_mode": "stochastic",
    "C": 100_000.0,
    "rho": 0.01,
    "T_years": 30.0,
    "delta_b": 0.06,
    "delta_s": 0.06,
    "K_b": 5000.0,
    "K_s": 5000.0,
    "r0": 0.08,
    "n_terms": 100,
    "threshold_decimals": 3,
    "grid": (1e-3, 1.0, 200),
    "t_grid": (0.01, 50.0, 500),
    "mc_enabled": True,
    "mc_paths": 100_000,
    "mc_dt": 1e-3,
    "mc_horizon": 200.0,
    "mc_seed": 20_240_801,
    "mc_scheme": "exact_transition",
    "output_dir": "cirstop_out",
    "max_terms": 500,
    "rel_tol": 1e-15,
    "quad_nodes": 96,
}


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run configuration."""

    cir: CirParams
    discount: DiscountSpec
    housing: HousingSpec
    r0: float
    n_terms: int
    threshold_decimals: int | None
    grid: tuple
    t_grid: tuple
    mc: SimConfig | None
    output_dir: Path
    ctl: SeriesControl
    raw: dict = field(repr=False)

    @staticmethod
    def from_mapping(data: dict) -> "RunConfig":
        unknown = set(data) - set(_DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        merged = {**_DEFAULTS, **data}
        mode = str(merged["discount_mode"]).lower()
        if mode not in ("stochastic", "constant"):
            raise ConfigError(f"discount_mode must be stochastic|constant, got {mode!r}")
        cir = CirParams(
            kappa=float(merged["kappa"]),
            theta=float(merged["theta"]),
            sigma=float(merged["sigma"]),
        )
        disc = DiscountSpec(
            mode=DiscountMode(mode),
            chi=float(merged["chi"]),
            gamma_wage=float(merged["gamma"]),
        )
        spec = HousingSpec(
            cash_scale=float(merged["C"]),
            spread=float(merged["rho"]),
            term=float(merged["T_years"]),
            prop_buy=float(merged["delta_b"]),
            prop_sell=float(merged["delta_s"]),
            fixed_buy=float(merged["K_b"]),
            fixed_sell=float(merged["K_s"]),
        )
        grid = _as_grid(merged["grid"], "grid")
        t_grid = _as_grid(merged["t_grid"], "t_grid")
        if grid[0] <= 0:
            raise ConfigError("grid r_min must be positive")
        if t_grid[0] < hitting.T_MIN:
            raise ConfigError(f"t_grid t_min must be >= {hitting.T_MIN} years")
        sim = None
        if _as_bool(merged["mc_enabled"]):
            scheme = str(merged["mc_scheme"]).lower()
            try:
                scheme_val = Scheme(scheme)
            except ValueError:
                raise ConfigError(
                    f"mc_scheme must be exact_transition|full_truncation_euler, got {scheme!r}"
                ) from None
            sim = SimConfig(
                n_paths=int(merged["mc_paths"]),
                dt=float(merged["mc_dt"]),
                horizon=float(merged["mc_horizon"]),
                seed=int(merged["mc_seed"]),
                scheme=scheme_val,
            )
        td = merged["threshold_decimals"]
        td = None if td in (None, "none", "None", "") else int(td)
        out_dir = Path(os.environ.get(ENV_OUTPUT_DIR) or str(merged["output_dir"]))
        r0 = float(merged["r0"])
        if r0 <= 0:
            raise ConfigError("r0 must be positive")
        ctl = SeriesControl(
            max_terms=int(merged["max_terms"]),
            rel_tol=float(merged["rel_tol"]),
            quad_nodes=int(merged["quad_nodes"]),
        )
        resolved = dict(merged)
        resolved["output_dir"] = str(out_dir)
        return RunConfig(
            cir=cir,
            discount=disc,
            housing=spec,
            r0=r0,
            n_terms=int(merged["n_terms"]),
            threshold_decimals=td,
            grid=grid,
            t_grid=t_grid,
            mc=sim,
            output_dir=out_dir,
            ctl=ctl,
            raw=resolved,
        )


def _as_bool(x) -> bool:
    if isinstance(x, bool):
        return x
    s = str(x).strip().lower()
    if s in ("true", "1", "yes", "on"):
        return True
    if s in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {x!r}")


def _as_grid(x, name: str) -> tuple:
    if isinstance(x, str):
        parts = [p.strip() for p in x.split(",")]
    elif isinstance(x, (list, tuple)):
        parts = list(x)
    else:
        raise ConfigError(f"{name} must be 'min, max, points'")
    if len(parts) != 3:
        raise ConfigError(f"{name} must have exactly three entries")
    lo, hi, n = float(parts[0]), float(parts[1]), int(float(parts[2]))
    if not (lo < hi) or n < 2:
        raise ConfigError(f"{name} must satisfy min < max and points >= 2")
    return (lo, hi, n)


def load_config(path: str | None) -> RunConfig:
    """Read a flat key=value or JSON config file; None means all defaults."""
    if path is None:
        return RunConfig.from_mapping({})
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {path}")
    text = p.read_text()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            return RunConfig.from_mapping(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON config: {exc}") from exc
    data: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = body.split("=", 1)
        data[key.strip()] = value.strip()
    return RunConfig.from_mapping(data)


@dataclass
class SolveResult:
    """Everything the solve pipeline produced, ready for reporting."""

    config: RunConfig
    pair: object
    payoff_sell: object
    payoff_buy: object
    thr_sell: stopping.ThresholdResult
    thr_buy: stopping.ThresholdResult
    j_sell: stopping.ValueFunction
    j_buy: stopping.ValueFunction
    limit_sell: stopping.LimitCheck
    limit_buy: stopping.LimitCheck
    level_sell: float
    level_buy: float
    dens_buy: hitting.DensitySeries
    dens_sell: hitting.DensitySeries
    dens_buy_norm: hitting.DensitySeries
    dens_sell_norm: hitting.DensitySeries
    conv: ConvolvedDensity
    expectations: dict


def _density_levels(config: RunConfig, thr_sell, thr_buy):
    """Barrier levels used by the waiting-time stage.

    The baseline report quotes thresholds to three decimals and computes
    expected waits at those quoted levels; threshold_decimals = none keeps
    full precision.
    """
    d = config.threshold_decimals
    if d is None:
        return thr_sell.r_star, thr_buy.r_star
    return round(thr_sell.r_star, d), round(thr_buy.r_star, d)


@contextmanager
def _stage(name: str):
    """Tag any pipeline error with the stage it came from (same type, same code)."""
    try:
        yield
    except CirstopError as exc:
        raise type(exc)(f"stage '{name}': {exc}") from exc


def solve_thresholds(config: RunConfig):
    """Stage 1: fundamental pair, limit checks, both thresholds, both values."""
    with _stage("fundamental pair"):
        pair = fundamental_pair(config.cir, config.discount, config.ctl)
    payoff_sell = sell_payoff(config.housing)
    with _stage("sell limit check"):
        limit_sell = stopping.check_limits(pair, payoff_sell)
        if not limit_sell.passed:
            raise NumericalError("selling payoff fails the boundary limit conditions")
    with _stage("sell threshold"):
        thr_sell = stopping.solve_sell_threshold(pair, payoff_sell)
    j_sell = stopping.make_value_function(pair, payoff_sell, thr_sell, "sell")
    with _stage("buy payoff"):
        payoff_buy = buy_payoff(config.housing, j_sell)
    with _stage("buy limit check"):
        limit_buy = stopping.check_limits(pair, payoff_buy)
        if not limit_buy.passed:
            raise NumericalError("buying payoff fails the boundary limit conditions")
    with _stage("buy threshold"):
        thr_buy = stopping.solve_buy_threshold(pair, payoff_buy, thr_sell)
    j_buy = stopping.make_value_function(pair, payoff_buy, thr_buy, "buy")
    return pair, payoff_sell, payoff_buy, limit_sell, limit_buy, thr_sell, thr_buy, j_sell, j_buy


def solve_model(config: RunConfig) -> SolveResult:
    """Full pipeline: thresholds, value functions, densities, expectations."""
    (
        pair,
        payoff_sell,
        payoff_buy,
        limit_sell,
        limit_buy,
        thr_sell,
        thr_buy,
        j_sell,
        j_buy,
    ) = solve_thresholds(config)

    level_sell, level_buy = _density_levels(config, thr_sell, thr_buy)
    params = pair.params
    kappa = config.cir.kappa

    with _stage("buy waiting density"):
        eig_buy = hitting.find_eigenvalues(
            HittingKind.BUY_UP, level_buy, config.n_terms, params, config.ctl
        )
        dens_buy = hitting.density(
            HittingKind.BUY_UP, eig_buy, config.r0, kappa, config.ctl
        )
    with _stage("sell waiting density"):
        eig_sell = hitting.find_eigenvalues(
            HittingKind.SELL_DOWN, level_sell, config.n_terms, params, config.ctl
        )
        dens_sell = hitting.density(
            HittingKind.SELL_DOWN, eig_sell, level_buy, kappa, config.ctl
        )

    with _stage("density normalization"):
        dens_buy_norm = hitting.density_with_mass_control(
            HittingKind.BUY_UP, level_buy, config.r0, kappa, params, config.ctl,
            initial=dens_buy,
        )
        dens_sell_norm = hitting.density_with_mass_control(
            HittingKind.SELL_DOWN, level_sell, level_buy, kappa, params, config.ctl,
            initial=dens_sell,
        )
        conv = ConvolvedDensity(dens_buy_norm, dens_sell_norm)

    expectations = {
        "n_terms": config.n_terms,
        "wait_buy_years": dens_buy.mean,
        "wait_sell_years": dens_sell.mean,
        "wait_total_years": dens_buy.mean + dens_sell.mean,
        "density_level_buy": level_buy,
        "density_level_sell": level_sell,
        "mass_buy": dens_buy_norm.mass(),
        "mass_sell": dens_sell_norm.mass(),
        "mass_terms_buy": dens_buy_norm.eigen.n_terms,
        "mass_terms_sell": dens_sell_norm.eigen.n_terms,
    }
    return SolveResult(
        config=config,
        pair=pair,
        payoff_sell=payoff_sell,
        payoff_buy=payoff_buy,
        thr_sell=thr_sell,
        thr_buy=thr_buy,
        j_sell=j_sell,
        j_buy=j_buy,
        limit_sell=limit_sell,
        limit_buy=limit_buy,
        level_sell=level_sell,
        level_buy=level_buy,
        dens_buy=dens_buy,
        dens_sell=dens_sell,
        dens_buy_norm=dens_buy_norm,
        dens_sell_norm=dens_sell_norm,
        conv=conv,
        expectations=expectations,
    )


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _write_csv(path: Path, header: list[str], columns: list[np.ndarray]) -> None:
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\r\n".join(lines) + "\r\n", encoding="ascii")


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="ascii")


def _value_curves(result: SolveResult):
    lo, hi, n = result.config.grid
    r = np.geomspace(lo, hi, n)
    pair = result.pair
    out = {}
    for kind, payoff, vf in (
        ("sell", result.payoff_sell, result.j_sell),
        ("buy", result.payoff_buy, result.j_buy),
    ):
        j = np.array([vf.evaluate(x) for x in r])
        f = np.array([payoff.value(x) for x in r])
        u = np.array([pair.u_plus(x) for x in r])
        q = np.array([transform_g(pair, x) for x in r])
        out[kind] = (r, j, f, q, f / u, j / u)  # h = f/u+, hhat = J/u+
    return out


def write_solve_outputs(result: SolveResult) -> dict:
    out_dir = result.config.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)

    thresholds = {
        "r_sell": result.thr_sell.r_star,
        "r_buy": result.thr_buy.r_star,
        "q_sell": result.thr_sell.q_star,
        "q_buy": result.thr_buy.q_star,
        "q_sell_inflection": result.thr_sell.q_inflect,
        "q_buy_inflection": result.thr_buy.q_inflect,
        "residual_sell": result.thr_sell.residual,
        "residual_buy": result.thr_buy.residual,
        "bracket_sell": list(result.thr_sell.bracket),
        "bracket_buy": list(result.thr_buy.bracket),
        "density_level_sell": result.level_sell,
        "density_level_buy": result.level_buy,
        "limits": {
            "sell": [result.limit_sell.ell_x, result.limit_sell.ell_y],
            "buy": [result.limit_buy.ell_x, result.limit_buy.ell_y],
        },
        "config": result.config.raw,
    }
    _write_json(out_dir / "thresholds.json", thresholds)

    curves = _value_curves(result)
    for kind in ("sell", "buy"):
        r, j, f, q, h, hhat = curves[kind]
        _write_csv(out_dir / f"value_{kind}.csv", ["r", "J", "f"], [r, j, f])
        _write_csv(out_dir / f"h_{kind}.csv", ["q", "h", "hhat"], [q, h, hhat])

    t0, t1, nt = result.config.t_grid
    t = np.linspace(t0, t1, nt)
    _write_csv(
        out_dir / "density_buy.csv", ["t", "p"], [t, result.dens_buy_norm.evaluate(t)]
    )
    _write_csv(
        out_dir / "density_sell.csv", ["t", "p"], [t, result.dens_sell_norm.evaluate(t)]
    )
    _write_csv(out_dir / "density_total.csv", ["t", "p"], [t, result.conv.evaluate(t)])

    expectations = dict(result.expectations)
    expectations["config"] = result.config.raw
    _write_json(out_dir / "expectations.json", expectations)
    return thresholds


def run_solve(config: RunConfig) -> SolveResult:
    """Execute the full pipeline and write all solve reports."""
    result = solve_model(config)
    write_solve_outputs(result)
    return result


def _check(name, passed, **stats):
    entry = {"name": name, "passed": bool(passed)}
    entry.update(stats)
    return entry


def run_validate(config: RunConfig, result: SolveResult | None = None) -> dict:
    """Monte Carlo cross-validation suite; writes validation.json."""
    out_dir = config.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    if config.mc is None:
        report = {"skipped": True, "reason": "mc section absent", "config": config.raw}
        _write_json(out_dir / "validation.json", report)
        return report

    result = result or solve_model(config)
    pair = result.pair
    cfg = config.mc
    checks = []

    # hitting runs double as the Lambda-identity and KS/means evidence
    up = mc.simulate_hitting(
        config.cir, config.r0, result.level_buy, Direction.UP, cfg, disc=config.discount
    )
    down = mc.simulate_hitting(
        config.cir, result.level_buy, result.level_sell, Direction.DOWN, cfg,
        disc=config.discount,
    )

    ident_up = pair.u_plus(config.r0) / pair.u_plus(result.level_buy)
    checks.append(
        _check(
            "lambda_identity_up",
            abs(up.lambda_factor_mean - ident_up) <= 3.0 * up.lambda_factor_se,
            observed=up.lambda_factor_mean,
            expected=ident_up,
            se=up.lambda_factor_se,
        )
    )
    ident_down = pair.u_minus(result.level_buy) / pair.u_minus(result.level_sell)
    checks.append(
        _check(
            "lambda_identity_down",
            abs(down.lambda_factor_mean - ident_down) <= 3.0 * down.lambda_factor_se,
            observed=down.lambda_factor_mean,
            expected=ident_down,
            se=down.lambda_factor_se,
        )
    )
    checks.append(
        _check(
            "mean_wait_buy",
            abs(up.mean_hitting_time - result.dens_buy.mean) <= 3.0 * up.se_hitting_time,
            observed=up.mean_hitting_time,
            expected=result.dens_buy.mean,
            se=up.se_hitting_time,
            hit_fraction=up.hit_fraction,
        )
    )
    checks.append(
        _check(
            "mean_wait_sell",
            abs(down.mean_hitting_time - result.dens_sell.mean)
            <= 3.0 * down.se_hitting_time,
            observed=down.mean_hitting_time,
            expected=result.dens_sell.mean,
            se=down.se_hitting_time,
            hit_fraction=down.hit_fraction,
        )
    )
    ks_buy = mc.ks_statistic(up.hitting_times, result.dens_buy_norm.cdf, cfg.n_paths)
    checks.append(_check("ks_buy", ks_buy < 0.02, observed=ks_buy, limit=0.02))
    ks_sell = mc.ks_statistic(
        down.hitting_times, result.dens_sell_norm.cdf, cfg.n_paths
    )
    checks.append(_check("ks_sell", ks_sell < 0.02, observed=ks_sell, limit=0.02))

    strategy = mc.estimate_strategy_value(
        config.cir,
        config.discount,
        config.housing,
        config.r0,
        result.thr_sell.r_star,
        result.thr_buy.r_star,
        cfg,
    )
    j_b = result.j_buy.evaluate(config.r0)
    checks.append(
        _check(
            "strategy_value",
            abs(strategy.discounted_payoff_mean - j_b)
            <= 3.0 * strategy.discounted_payoff_se,
            observed=strategy.discounted_payoff_mean,
            expected=j_b,
            se=strategy.discounted_payoff_se,
        )
    )
    for shift in (0.02, -0.02):
        pert = mc.estimate_strategy_value(
            config.cir,
            config.discount,
            config.housing,
            config.r0,
            result.thr_sell.r_star,
            result.thr_buy.r_star + shift,
            cfg,
        )
        combined_se = math.hypot(
            strategy.discounted_payoff_se, pert.discounted_payoff_se
        )
        checks.append(
            _check(
                f"perturbed_buy_{'+' if shift > 0 else '-'}0.02",
                pert.discounted_payoff_mean
                <= strategy.discounted_payoff_mean + 3.0 * combined_se,
                observed=pert.discounted_payoff_mean,
                optimum=strategy.discounted_payoff_mean,
                se=combined_se,
            )
        )

    report = {
        "skipped": False,
        "passed": all(c["passed"] for c in checks),
        "checks": checks,
        "config": config.raw,
    }
    _write_json(out_dir / "validation.json", report)
    return report


def _cmd_solve(args) -> int:
    config = load_config(args.config)
    result = run_solve(config)
    print(f"r_sell = {result.thr_sell.r_star:.6f}")
    print(f"r_buy  = {result.thr_buy.r_star:.6f}")
    print(
        "expected waits (years): buy {wait_buy_years:.3f}, sell {wait_sell_years:.3f}, "
        "total {wait_total_years:.3f}".format(**result.expectations)
    )
    print(f"reports written to {config.output_dir}")
    return 0


def _cmd_validate(args) -> int:
    config = load_config(args.config)
    report = run_validate(config)
    if report.get("skipped"):
        print("validation skipped: mc section absent")
        return 0
    for c in report["checks"]:
        print(f"[{'PASS' if c['passed'] else 'FAIL'}] {c['name']}")
    if not report["passed"]:
        failed = [c["name"] for c in report["checks"] if not c["passed"]]
        raise ValidationFailure(f"failed checks: {', '.join(failed)}")
    print(f"all {len(report['checks'])} checks passed")
    return 0


def _cmd_density(args) -> int:
    config = load_config(args.config)
    result = solve_model(config)
    out_dir = config.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    t0, t1, nt = config.t_grid
    t = np.linspace(t0, t1, nt)
    series = {
        "buy": result.dens_buy_norm.evaluate,
        "sell": result.dens_sell_norm.evaluate,
        "total": result.conv.evaluate,
    }[args.kind]
    _write_csv(out_dir / f"density_{args.kind}.csv", ["t", "p"], [t, series(t)])
    means = {
        "buy": result.dens_buy.mean,
        "sell": result.dens_sell.mean,
        "total": result.dens_buy.mean + result.dens_sell.mean,
    }
    print(f"density_{args.kind}.csv written; mean wait = {means[args.kind]:.3f} years")
    return 0


def _cmd_sweep(args) -> int:
    config = load_config(args.config)
    if args.param not in _DEFAULTS:
        raise ConfigError(f"unknown sweep parameter {args.param!r}")
    values = np.linspace(args.from_, args.to, args.steps)
    rows = []
    for v in values:
        data = dict(config.raw)
        data[args.param] = v
        data.pop("output_dir", None)
        sub = RunConfig.from_mapping({**data, "output_dir": str(config.output_dir)})
        (_, _, _, _, _, thr_sell, thr_buy, _, _) = solve_thresholds(sub)
        rows.append((v, thr_sell.r_star, thr_buy.r_star))
    out_dir = config.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    cols = [np.array([r[i] for r in rows]) for i in range(3)]
    _write_csv(out_dir / f"sweep_{args.param}.csv", [args.param, "r_sell", "r_buy"], cols)
    print(f"sweep_{args.param}.csv written ({args.steps} points)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cirstop",
        description="Optimal home buy/sell rate thresholds under CIR interest rates",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve thresholds, values and densities")
    p_solve.add_argument("config", nargs="?", default=None)
    p_solve.set_defaults(func=_cmd_solve)

    p_val = sub.add_parser("validate", help="run the Monte Carlo cross-checks")
    p_val.add_argument("config", nargs="?", default=None)
    p_val.set_defaults(func=_cmd_validate)

    p_den = sub.add_parser("density", help="write one waiting-time density table")
    p_den.add_argument("config", nargs="?", default=None)
    p_den.add_argument("--kind", choices=("buy", "sell", "total"), required=True)
    p_den.set_defaults(func=_cmd_density)

    p_sweep = sub.add_parser("sweep", help="threshold sensitivity table")
    p_sweep.add_argument("config", nargs="?", default=None)
    p_sweep.add_argument("--param", required=True)
    p_sweep.add_argument("--from", dest="from_", type=float, required=True)
    p_sweep.add_argument("--to", type=float, required=True)
    p_sweep.add_argument("--steps", type=int, required=True)
    p_sweep.set_defaults(func=_cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationFailure as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return 1
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except CirstopError as exc:
        print(f"numerical failure [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
