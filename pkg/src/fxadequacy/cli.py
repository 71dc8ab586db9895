"""Command line front end.

Every subcommand writes a JSON report (``--out`` or stdout); ``report``
renders any of them as a plain-text table. Exit codes: 0 success, 2 bad
input, 3 bad spec, 4 numerical failure, 5 anything else.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .adequacy_filter import NoiseConfig, run_filter
from .datasets import REFERENCE_FACTORS, STATE_COLUMNS
from .errors import AdequacyError, InputError, SchemaError, SpecError
from .linear_model import ModelSpec, build_design, fit
from .monetary import (
    MODEL_KINDS, MonetaryParams, builtin_spec, forecast_exchange, golden, golden_checksum,
    monetary_identity_check, monetary_panel, prepare_panel, synthetic_panel,
    velocity_lagged, velocity_static,
)
from .timeseries import dump_panel, load_panel, parse_schema

DEFAULT_SEED = 0


def _existing(path: str | None, what: str) -> Path:
    if path is None:
        raise InputError(f"missing --{what}")
    p = Path(path)
    if not p.is_file():
        raise InputError(f"{what} file not found: {path}")
    return p


def _read_json(path: str, what: str) -> dict:
    p = _existing(path, what)
    try:
        return json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None


def _emit(report: dict | str, out: str | None) -> None:
    text = report if isinstance(report, str) else json.dumps(report, indent=2, ensure_ascii=False) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _params(ref: str) -> tuple[MonetaryParams, str]:
    if ref.startswith("golden:"):
        g = golden(ref.split(":", 1)[1])
        return g.params, f"golden:{g.label}"
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return MonetaryParams.from_dict(_read_json(ref, "params")), ref


def cmd_regress(args) -> dict:
    raw = load_panel(_existing(args.input, "input"))
    if args.spec.startswith("builtin:"):
        kind = args.spec.split(":", 1)[1]
        if kind not in MODEL_KINDS:
            raise SpecError(f"unknown builtin model {kind!r}; expected one of {MODEL_KINDS}")
        panel = prepare_panel(kind, raw)
        spec = builtin_spec(kind, args.y0)
        if spec.response_lags and not spec.initial_response_values:
            # no y0 given: the first observation serves as y0
            spec = builtin_spec(kind, float(panel[spec.response].values[0]))
            panel = panel.slice(1)
        label = kind
    else:
        spec = ModelSpec.from_dict(_read_json(args.spec, "spec"))
        panel, label = raw, args.spec
    design, y = build_design(spec, panel)
    result = fit(design, y, spec.fixed_coefficients)
    report = {"model": label, "spec": spec.to_dict(), **result.to_report(), "seed": args.seed}
    return report


def cmd_filter(args) -> dict:
    panel_path = _existing(args.input, "input")
    states_path = _existing(args.states, "states") if args.states else panel_path
    state_cols = [c.strip() for c in args.state_columns.split(",")]
    if len(state_cols) != 2:
        raise SpecError(f"need exactly 2 state columns, got {state_cols}")
    if args.columns:
        schema = parse_schema(args.columns)
        panel = load_panel(panel_path, schema)
    else:
        panel = load_panel(panel_path)
        if all(name in panel for name in REFERENCE_FACTORS):
            panel = panel.select(REFERENCE_FACTORS)
        else:
            panel = panel.select([n for n in panel.names if n not in state_cols])
    states_panel = load_panel(states_path, state_cols)
    if states_panel.periods != panel.periods:
        raise InputError("state and factor files cover different periods")
    noise = None
    if args.config:
        try:
            noise = NoiseConfig.from_dict(_read_json(args.config, "config"))
        except KeyError as exc:
            raise SpecError(f"noise config lacks {exc}") from None
    traj = run_filter(panel, states_panel.matrix(state_cols), noise,
                      scale_factors=not args.no_scale)
    report = traj.to_report()
    report["state_labels"] = state_cols
    return report


def _monetary_inputs(args, raw):
    return raw[args.price], raw[args.gdp], raw[args.rate]


def cmd_velocity(args) -> dict:
    params, label = _params(args.params)
    raw = load_panel(_existing(args.input, "input"))
    P, G, R = _monetary_inputs(args, raw)
    if args.model == "static":
        v = velocity_static(P, G, R, params)
    else:
        v = velocity_lagged(P, G.slice(1), R.slice(1), params)
    if args.normalize:
        v = v.normalized()
    return {
        "kind": "velocity",
        "model": args.model,
        "params": label,
        "normalized": bool(args.normalize),
        "periods": list(v.periods),
        "values": v.values.tolist(),
    }


def cmd_forecast(args) -> dict:
    ref = args.params or (f"golden:{args.golden}" if args.golden else "golden:monetary_lagged")
    params, label = _params(ref)
    if params.kind != "monetary_lagged":
        raise SpecError(f"forecast needs a monetary_lagged parameter set, got {params.kind}")
    panel = monetary_panel(load_panel(_existing(args.panel, "panel")))
    x = panel.matrix(["m1-m2", "g1-g2", "r1-r2"])
    y = panel["y"].values
    last = forecast_exchange(params, x[-1], y[-2])
    ahead = forecast_exchange(params, x[-1], y[-1])
    return {
        "kind": "forecast",
        "params": label,
        "period": panel.periods[-1],
        "fitted_log": last,
        "fitted_level": float(np.exp(last)),
        "observed_log": float(y[-1]),
        "next_log": ahead,
        "next_level": float(np.exp(ahead)),
        "note": "next_* holds the factors at their last observed values",
    }


def cmd_identity(args) -> dict:
    try:
        a, k, lam = (float(v) for v in args.params.split(","))
    except ValueError:
        raise SpecError(f"--params must be a,k,lambda; got {args.params!r}") from None
    panel = load_panel(_existing(args.input, "input"))
    report = monetary_identity_check(panel, a, k, lam).to_report()
    report["params"] = {"a": a, "k": k, "lambda": lam}
    return report


def cmd_synth(args) -> str:
    panel = synthetic_panel(args.kind, n=args.n, seed=args.seed)
    header = f"# synthetic demonstration panel: kind={args.kind} n={args.n} seed={args.seed}\n"
    return header + dump_panel(panel)


def _rate(v) -> str:
    return "" if v is None else f"{v:.2f}"


def _coef(v: float) -> str:
    return f"{v:.5g}"


def render_report(data: dict) -> str:
    kind = data.get("kind")
    lines: list[str] = []
    if kind == "trajectory":
        periods, observed, steps = data.get("periods"), data.get("observed"), data.get("steps")
        if not periods or not observed or not steps:
            raise SchemaError("trajectory report is empty")
        labels = data.get("state_labels", ["inflation", "fx"])
        forecasts = {s["forecast_period"]: s["forecast"] for s in steps}
        nxt = [s["forecast"] for s in steps if s["forecast_period"] is None]
        lines.append("Forecast of the exchange and inflation rates")
        lines.append(f"{'':8} | {'Statistical data':^21} | {'Forecast':^21}")
        lines.append(f"{'period':8} | {labels[0]:>10} {labels[1]:>10} | {labels[0]:>10} {labels[1]:>10}")
        lines.append("-" * 57)
        for period, obs in zip(periods, observed):
            f = forecasts.get(period)
            fc = f"{_rate(f[0]):>10} {_rate(f[1]):>10}" if f else " " * 21
            lines.append(f"{period:8} | {_rate(obs[0]):>10} {_rate(obs[1]):>10} | {fc}".rstrip())
        if nxt:
            lines.append(f"{'next':8} | {'':21} | {_rate(nxt[0][0]):>10} {_rate(nxt[0][1]):>10}")
    elif kind == "fit":
        coefs = data.get("coefficients")
        if not coefs:
            raise SchemaError("fit report has no coefficients")
        exact = data.get("coefficient_text", {})
        fixed = data.get("fixed", {})
        lines.append(f"model: {data.get('model', '')}")
        for name, value in coefs.items():
            shown = exact.get(name) or _coef(value)
            lines.append(f"  {name:>12} = {shown}{'  (fixed)' if name in fixed else ''}")
        for key in ("r_squared", "sigma", "sigma2", "fisher"):
            value = data.get(key)
            if key in exact:
                lines.append(f"  {key:>12} = {exact[key]}")
            elif value is not None:
                lines.append(f"  {key:>12} = {_coef(value)}")
    elif kind == "velocity":
        if not data.get("values"):
            raise SchemaError("velocity report is empty")
        lines.append(f"velocity ({data['model']}, {data['params']}"
                     f"{', normalized' if data.get('normalized') else ''})")
        for period, v in zip(data["periods"], data["values"]):
            lines.append(f"{period:8} {_coef(v):>10}")
    elif kind == "forecast":
        lines.append(f"exchange-rate forecast ({data['params']})")
        lines.append(f"  {data['period']}: fitted {_rate(data['fitted_level'])} "
                     f"(log {data['fitted_log']:.5f}), observed log {data['observed_log']:.5f}")
        lines.append(f"  next period: {_rate(data['next_level'])} (log {data['next_log']:.5f})")
    elif kind == "identity":
        if not data.get("residuals"):
            raise SchemaError("identity report is empty")
        lines.append(f"identity residual: mean {_coef(data['mean'])}, "
                     f"variance {_coef(data['variance'])}")
        for period, r in zip(data["periods"], data["residuals"]):
            lines.append(f"{period:8} {_coef(r):>10}")
    else:
        raise SchemaError(f"unrecognised report kind {kind!r}")
    return "\n".join(lines) + "\n"


def golden_report(label: str) -> dict:
    g = golden(label)
    text = dict(g.text)
    names = ["b0", "b1", "b2", "b3", "b4", "b5"]
    coefs = {n: float(text[n]) for n in names if n in text}
    exact = {n: text[n] for n in coefs}
    exact.update(r_squared=text["r2"], sigma=text["sigma"])
    return {
        "kind": "fit",
        "model": f"golden:{g.label}",
        "coefficients": coefs,
        "coefficient_text": exact,
        "fixed": {"b1": 1.0} if g.label.startswith("monetary") else {},
        "r_squared": g.reported_r2,
        "sigma": g.reported_sigma,
    }


def cmd_report(args) -> str:
    if args.path.startswith("golden:"):
        data = golden_report(args.path.split(":", 1)[1])
    else:
        data = _read_json(args.path, "report")
    if not isinstance(data, dict):
        raise SchemaError("report file must hold a JSON object")
    try:
        return render_report(data)
    except (KeyError, TypeError, IndexError) as exc:
        raise SchemaError(f"malformed {data.get('kind')} report: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fxadequacy", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version",
                        version=f"fxadequacy {__version__} golden-checksum {golden_checksum()}")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("regress", help="fit a regression model")
    p.add_argument("--spec", required=True, help="builtin:<kind> or a JSON model spec")
    p.add_argument("--input", required=True)
    p.add_argument("--y0", type=float, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_regress)

    p = sub.add_parser("filter", help="run the adequacy Kalman filter")
    p.add_argument("--input", required=True)
    p.add_argument("--states")
    p.add_argument("--columns", help="factor columns as name:unit,... (default: the reference "
                   "factor set if present, else every non-state column)")
    p.add_argument("--state-columns", default=",".join(STATE_COLUMNS))
    p.add_argument("--config", help="JSON with 'process' and 'observation' variances")
    p.add_argument("--no-scale", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("velocity", help="money-circulation velocity")
    p.add_argument("--model", choices=("static", "lagged"), default="static")
    p.add_argument("--params", default="golden:monetary_static")
    p.add_argument("--input", required=True)
    p.add_argument("--price", default="cpi_ua")
    p.add_argument("--gdp", default="gdp_ua")
    p.add_argument("--rate", default="rate_ua")
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_velocity)

    p = sub.add_parser("forecast", help="exchange-rate forecast from the lagged model")
    p.add_argument("--golden")
    p.add_argument("--params")
    p.add_argument("--panel", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_forecast)

    p = sub.add_parser("identity-check", help="residual of the monetary exchange-rate identity")
    p.add_argument("--params", required=True, help="a,k,lambda")
    p.add_argument("--input", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_identity)

    p = sub.add_parser("synth", help="write a seeded synthetic demonstration panel")
    p.add_argument("--kind", choices=MODEL_KINDS, required=True)
    p.add_argument("--n", type=int, default=40)
    p.add_argument("--out")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("report", help="render a report file as a table")
    p.add_argument("path", help="report JSON or golden:<label>")
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)
    return parser


def _normalize_argv(argv: list[str]) -> list[str]:
    out = []
    for tok in argv:
        if tok.startswith("--golden:"):
            out.extend(["--golden", tok.split(":", 1)[1]])
        else:
            out.append(tok)
    return out


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(_normalize_argv(list(sys.argv[1:] if argv is None else argv)))
    try:
        result = args.func(args)
        _emit(result, args.out)
        return 0
    except AdequacyError as exc:
        code, category = exc.exit_code, exc.category
        message = str(exc)
    except OSError as exc:
        code, category, message = 2, "input", str(exc)
    except Exception as exc:  # noqa: BLE001
        code, category, message = 5, "internal", f"{type(exc).__name__}: {exc}"
    sys.stderr.write(json.dumps({"error": category, "message": message}) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
