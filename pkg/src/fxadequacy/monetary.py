"""Monetary models of the hryvnia/dollar rate and money-circulation velocity.

Four regressions are packaged as ready-made :class:`ModelSpec` objects:

``monetary_static``
    ``y = b0 + (m1 - m2) + b2 (g1 - g2) + b3 (r1 - r2)``
``monetary_lagged``
    the same plus ``b4 y[-1]``
``internal_factors``
    ``log fx`` on inflation, state deficit, energy price, money supply, lagged ``log fx``
``inflation``
    ``log inflation`` on exchange rate, state deficit, trade deficit

Lower-case ``m, g, r`` are logs; the foreign money and GDP are converted to
home currency at the current rate before taking logs. The money-demand
equation and velocity formulas hold "up to a constant multiplier" which is
fixed to 1 here, so levels are index-like.
"""

from __future__ import annotations

import hashlib
import json
import warnings
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Mapping, Sequence

import numpy as np

from .errors import AlignmentError, DomainError, NumericalError, ShapeError, SpecError
from .linear_model import ModelSpec, RegressionFit
from .timeseries import (
    FactorPanel, Series, diff_series, log_series, period_range, scale_product_log,
)

MODEL_KINDS = ("monetary_static", "monetary_lagged", "internal_factors", "inflation")
MONETARY_KINDS = ("monetary_static", "monetary_lagged")

MONETARY_FACTORS = ("m1-m2", "g1-g2", "r1-r2")
INTERNAL_FACTORS = ("inflation", "deficit", "energy", "money_supply")
INFLATION_FACTORS = ("fx", "deficit", "trade_deficit")
RESPONSE = "y"

LOG_FLOAT_MAX = float(np.log(np.finfo(float).max))

COEF_NAMES = ("b0", "b1", "b2", "b3", "b4", "b5")


@dataclass(frozen=True)
class MonetaryParams:
    kind: str
    b0: float
    b1: float
    b2: float
    b3: float
    b4: float | None = None
    b5: float | None = None
    y0: float | None = None

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise SpecError(f"unknown model kind {self.kind!r}; expected one of {MODEL_KINDS}")
        if self.kind in MONETARY_KINDS:
            if self.b1 != 1.0:
                raise SpecError(f"{self.kind} requires b1 = 1 exactly, got {self.b1}")
            if self.b2 >= 0 or self.b3 <= 0:
                warnings.warn(
                    f"{self.kind}: expected b2 < 0 and b3 > 0, got b2={self.b2}, b3={self.b3}",
                    stacklevel=3,
                )
        if self.kind in ("monetary_lagged", "internal_factors") and self.b4 is None:
            raise SpecError(f"{self.kind} needs b4")
        if self.kind == "internal_factors" and self.b5 is None:
            raise SpecError("internal_factors needs b5")

    @property
    def vector(self) -> np.ndarray:
        """Coefficients in design-column order."""
        return np.array([v for v in (self.b0, self.b1, self.b2, self.b3, self.b4, self.b5)
                         if v is not None], dtype=float)

    def as_dict(self) -> dict:
        d = {"kind": self.kind}
        for name in (*COEF_NAMES, "y0"):
            value = getattr(self, name)
            if value is not None:
                d[name] = value
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> MonetaryParams:
        try:
            return cls(**{k: (v if k == "kind" else float(v)) for k, v in d.items()})
        except TypeError as exc:
            raise SpecError(f"bad parameter set: {exc}") from None

    @classmethod
    def from_fit(cls, kind: str, fit: RegressionFit, y0: float | None = None) -> MonetaryParams:
        coef = list(fit.coef)
        return cls(kind, *coef, y0=y0)


@dataclass(frozen=True)
class GoldenParameterSet:
    label: str
    params: MonetaryParams
    reported_r2: float
    reported_sigma: float
    text: Mapping[str, str] = field(repr=False, default_factory=dict)


# Published coefficient values, kept as the printed strings.
GOLDEN_TEXT: dict[str, dict[str, str]] = {
    "monetary_static": {
        "b0": "0.67707", "b1": "1", "b2": "-1.15037", "b3": "0.39375",
        "r2": "0.76750", "sigma": "0.031653",
    },
    "monetary_lagged": {
        "b0": "-1.61447", "b1": "1", "b2": "-0.46690", "b3": "0.21907", "b4": "1.53031",
        "y0": "2.068", "r2": "0.95280", "sigma": "0.0070095",
    },
    "internal_factors": {
        "b0": "3.8", "b1": "3.3", "b2": "-1.4e-7", "b3": "5.1e-3", "b4": "4.7e-8",
        "b5": "-1.6e-1", "y0": "6.68", "r2": "0.99", "sigma": "4.1e-4",
    },
    "inflation": {
        "b0": "-2.6e-1", "b1": "3.3e-4", "b2": "-4.7e-8", "b3": "-1.8e-7",
        "r2": "0.99", "sigma": "3.5e-5",
    },
}

# section labels accepted as aliases on the command line
GOLDEN_ALIASES = {"§5": "monetary_static", "§6": "monetary_lagged",
                  "§7": "internal_factors", "§8": "inflation"}


def canonical_decimal(text: str) -> str:
    """Canonical decimal form: ``"3.3e-4"`` and ``"0.000330"`` both give ``"0.00033"``."""
    d = Decimal(text).normalize()
    return format(d, "f")


def _make_golden(kind: str) -> GoldenParameterSet:
    text = GOLDEN_TEXT[kind]
    values = {k: float(v) for k, v in text.items()}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        params = MonetaryParams(kind, **{k: v for k, v in values.items() if k not in ("r2", "sigma")})
    return GoldenParameterSet(kind, params, values["r2"], values["sigma"], dict(text))


GOLDEN = {kind: _make_golden(kind) for kind in MODEL_KINDS}


def golden(label: str) -> GoldenParameterSet:
    key = GOLDEN_ALIASES.get(label) or GOLDEN_ALIASES.get("§" + label, label)
    if key not in GOLDEN:
        raise SpecError(f"no golden parameter set {label!r}; known: {sorted(GOLDEN)} or {sorted(GOLDEN_ALIASES)}")
    return GOLDEN[key]


def golden_checksum() -> str:
    canon = {kind: {k: canonical_decimal(v) for k, v in sorted(text.items())}
             for kind, text in sorted(GOLDEN_TEXT.items())}
    blob = json.dumps(canon, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def builtin_spec(kind: str, y0: float | None = None) -> ModelSpec:
    """Ready-made regression spec; lagged kinds take ``y0`` as the pre-sample response."""
    if kind == "monetary_static":
        return ModelSpec(RESPONSE, MONETARY_FACTORS, fixed_coefficients={"m1-m2": 1.0})
    if kind == "monetary_lagged":
        return ModelSpec(RESPONSE, MONETARY_FACTORS, response_lags=(1,),
                         fixed_coefficients={"m1-m2": 1.0},
                         initial_response_values=() if y0 is None else (y0,))
    if kind == "internal_factors":
        return ModelSpec(RESPONSE, INTERNAL_FACTORS, response_lags=(1,),
                         initial_response_values=() if y0 is None else (y0,))
    if kind == "inflation":
        return ModelSpec(RESPONSE, INFLATION_FACTORS)
    raise SpecError(f"unknown model kind {kind!r}; expected one of {MODEL_KINDS}")


def monetary_panel(
    raw: FactorPanel,
    fx: str = "fx",
    money: tuple[str, str] = ("m2_ua", "m2_us"),
    gdp: tuple[str, str] = ("gdp_ua", "gdp_us"),
    rate: tuple[str, str] = ("rate_ua", "rate_us"),
) -> FactorPanel:
    """Log response and the three home-minus-foreign log factors."""
    rate_fx = raw[fx]
    y = log_series(rate_fx).renamed(RESPONSE)
    m = diff_series(log_series(raw[money[0]]), scale_product_log(rate_fx, raw[money[1]])).renamed("m1-m2")
    g = diff_series(log_series(raw[gdp[0]]), scale_product_log(rate_fx, raw[gdp[1]])).renamed("g1-g2")
    r = diff_series(log_series(raw[rate[0]]), log_series(raw[rate[1]])).renamed("r1-r2")
    return FactorPanel((y, m, g, r))


def prepare_panel(kind: str, raw: FactorPanel) -> FactorPanel:
    """Turn a raw level panel into the columns :func:`builtin_spec` expects."""
    if kind in MONETARY_KINDS:
        return monetary_panel(raw)
    if kind == "internal_factors":
        return FactorPanel((log_series(raw["fx"]).renamed(RESPONSE),
                            *(raw[name] for name in INTERNAL_FACTORS)))
    if kind == "inflation":
        return FactorPanel((log_series(raw["inflation"]).renamed(RESPONSE),
                            *(raw[name] for name in INFLATION_FACTORS)))
    raise SpecError(f"unknown model kind {kind!r}; expected one of {MODEL_KINDS}")


@dataclass(frozen=True)
class VelocitySeries:
    periods: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if not np.all(v > 0):
            raise DomainError("velocity must be strictly positive")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "periods", tuple(self.periods))

    def normalized(self) -> VelocitySeries:
        """Rescale so the first period equals 1."""
        return VelocitySeries(self.periods, self.values / self.values[0])

    def as_series(self, name: str = "velocity") -> Series:
        return Series(name, self.periods, self.values)


def _values(s) -> np.ndarray:
    return s.values if isinstance(s, Series) else np.atleast_1d(np.asarray(s, dtype=float))


def _periods(*series) -> tuple[str, ...]:
    for s in series:
        if isinstance(s, Series):
            return s.periods
    n = len(_values(series[0]))
    return tuple(str(i) for i in range(n))


def _positive(name: str, v: np.ndarray) -> np.ndarray:
    if not np.all(v > 0):
        i = int(np.flatnonzero(~(v > 0))[0])
        raise DomainError(f"{name}: non-positive value {v[i]!r} at position {i}")
    return v


def _aligned(*named) -> list[np.ndarray]:
    arrays = [_positive(name, _values(s)) for name, s in named]
    lengths = {len(a) for a in arrays}
    if len(lengths) != 1:
        raise AlignmentError(f"series lengths differ: {[len(a) for a in arrays]}")
    periods = [s.periods for _, s in named if isinstance(s, Series)]
    if any(p != periods[0] for p in periods[1:]):
        raise AlignmentError("series have different periods")
    return arrays


def money_demand(P, G, R, params: MonetaryParams) -> Series:
    """``M = P * G^(-b2) * R^(-b3)``."""
    p, g, r = _aligned(("P", P), ("G", G), ("R", R))
    return Series("money_demand", _periods(P, G, R), p * g ** (-params.b2) * r ** (-params.b3))


def velocity_static(P, G, R, params: MonetaryParams) -> VelocitySeries:
    """``V = R^b3 / (P * G^(-b2-1))``, which equals ``G / M``."""
    p, g, r = _aligned(("P", P), ("G", G), ("R", R))
    return VelocitySeries(_periods(P, G, R), r ** params.b3 / (p * g ** (-params.b2 - 1.0)))


def velocity_lagged(P, G, R, params: MonetaryParams) -> VelocitySeries:
    """``V_i = P_{i-1}^b4 P_i^-1 G_i^(b2+1) R_i^b3``.

    ``P`` carries one more leading value than ``G`` and ``R``.
    """
    if params.b4 is None:
        raise SpecError("velocity_lagged needs b4")
    p = _positive("P", _values(P))
    g, r = _aligned(("G", G), ("R", R))
    if len(p) != len(g) + 1:
        raise AlignmentError(f"P needs one leading value: got {len(p)} prices for {len(g)} periods")
    if isinstance(P, Series) and isinstance(G, Series) and P.periods[1:] != G.periods:
        raise AlignmentError("P[1:] is not aligned with G")
    v = p[:-1] ** params.b4 / p[1:] * g ** (params.b2 + 1.0) * r ** params.b3
    return VelocitySeries(_periods(G, R), v)


def price_recursion(P0: float, M, G, R, params: MonetaryParams) -> Series:
    """``P_i = P_{i-1}^b4 * M_i * G_i^b2 * R_i^b3`` starting from ``P0``."""
    if not P0 > 0:
        raise DomainError(f"P0 must be positive, got {P0}")
    if params.b4 is None:
        raise SpecError("price_recursion needs b4")
    m, g, r = _aligned(("M", M), ("G", G), ("R", R))
    # log space keeps long recursions from overflowing
    drive = np.log(m) + params.b2 * np.log(g) + params.b3 * np.log(r)
    log_p = np.empty(len(m))
    prev = np.log(P0)
    for i, d in enumerate(drive):
        prev = params.b4 * prev + d
        log_p[i] = prev
    if log_p.max() > LOG_FLOAT_MAX:
        i = int(np.argmax(log_p > LOG_FLOAT_MAX))
        raise NumericalError(f"price path overflows at step {i + 1}; b4 = {params.b4} is explosive")
    return Series("price", _periods(M, G, R), np.exp(log_p))


def _coef_vector(model) -> np.ndarray:
    if isinstance(model, RegressionFit):
        return model.coef
    if isinstance(model, MonetaryParams):
        return model.vector
    return np.asarray(model, dtype=float)


def forecast_exchange(model, latest_factors: Sequence[float], y_prev: float) -> float:
    """Log exchange-rate forecast ``b0 + b1 x1 + b2 x2 + b3 x3 + b4 y_prev``.

    ``model`` is a lagged monetary fit, a :class:`MonetaryParams` or a raw
    coefficient vector in the order (b0, b1, b2, b3, b4).
    """
    coef = _coef_vector(model)
    x = np.asarray(latest_factors, dtype=float).reshape(-1)
    if coef.size != 5 or x.size != 3:
        raise ShapeError(f"need 5 coefficients and 3 factors, got {coef.size} and {x.size}")
    return float(coef[0] + coef[1:4] @ x + coef[4] * y_prev)


@dataclass(frozen=True)
class IdentityReport:
    residuals: Series
    mean: float
    variance: float

    @property
    def std(self) -> float:
        return float(np.sqrt(self.variance))

    def to_report(self) -> dict:
        return {
            "kind": "identity",
            "periods": list(self.residuals.periods),
            "residuals": self.residuals.values.tolist(),
            "mean": self.mean,
            "variance": self.variance,
            "std": self.std,
        }


IDENTITY_COLUMNS = ("s", "m", "m_star", "y", "y_star", "i", "i_star")


def monetary_identity_check(panel: FactorPanel, a: float, k: float, lam: float,
                            columns: Mapping[str, str] | None = None) -> IdentityReport:
    """Residual ``s - (a + m - m* - k (y - y*) + lam (i - i*))``.

    All inputs are logs. ``columns`` renames the expected columns
    ``s, m, m_star, y, y_star, i, i_star``.
    """
    names = {c: c for c in IDENTITY_COLUMNS}
    names.update(columns or {})
    missing = [names[c] for c in IDENTITY_COLUMNS if names[c] not in panel]
    if missing:
        raise SpecError(f"identity check needs columns {missing}")
    v = {c: panel[names[c]].values for c in IDENTITY_COLUMNS}
    rhs = a + v["m"] - v["m_star"] - k * (v["y"] - v["y_star"]) + lam * (v["i"] - v["i_star"])
    resid = v["s"] - rhs
    var = float(np.var(resid, ddof=1)) if len(resid) > 1 else 0.0
    return IdentityReport(Series("identity_residual", panel.periods, resid), float(resid.mean()), var)


def synthetic_panel(kind: str, n: int = 40, seed: int = 0, start: str = "2005Q1",
                    params: MonetaryParams | None = None, noise: float | None = None) -> FactorPanel:
    """Raw level panel generated from ``params`` (default: the golden set).

    Factor scales are chosen to be plausible for the published coefficient
    magnitudes; the output is demonstration data only.
    """
    rng = np.random.default_rng(seed)
    gset = GOLDEN[kind] if kind in GOLDEN else None
    if gset is None:
        raise SpecError(f"unknown model kind {kind!r}")
    params = params or gset.params
    sigma = gset.reported_sigma if noise is None else noise
    periods = period_range(start, n)
    eps = rng.normal(0.0, sigma, n)

    if kind == "internal_factors":
        inflation = 1.0 + rng.gamma(4.0, 0.25, n)
        deficit = np.abs(rng.normal(5e6, 2e6, n))
        energy = rng.uniform(60.0, 120.0, n)
        money = np.linspace(6e6, 9e6, n) * rng.uniform(0.97, 1.03, n)
        y = np.empty(n)
        prev = params.y0 if params.y0 is not None else gset.params.y0
        for i in range(n):
            prev = (params.b0 + params.b1 * inflation[i] + params.b2 * deficit[i]
                    + params.b3 * energy[i] + params.b4 * money[i] + params.b5 * prev + eps[i])
            y[i] = prev
        cols = {"fx": np.exp(y), "inflation": inflation, "deficit": deficit,
                "energy": energy, "money_supply": money}
    elif kind == "inflation":
        fx = rng.uniform(800.0, 2800.0, n)
        deficit = np.abs(rng.normal(5e6, 2e6, n))
        trade = np.abs(rng.normal(2e6, 1e6, n))
        y = params.b0 + params.b1 * fx + params.b2 * deficit + params.b3 * trade + eps
        cols = {"inflation": np.exp(y), "fx": fx, "deficit": deficit, "trade_deficit": trade}
    else:
        fx = 800.0 * np.exp(np.cumsum(rng.normal(0.0, 0.02, n)))
        m_us = 1e4 * np.exp(np.cumsum(rng.normal(0.01, 0.005, n)))
        gdp_us = 1.6e4 * np.exp(np.cumsum(rng.normal(0.008, 0.004, n)))
        gdp_ua = 350.0 * np.exp(np.cumsum(rng.normal(0.01, 0.05, n)))
        rate_ua = rng.uniform(6.0, 15.0, n)
        rate_us = rng.uniform(0.05, 0.5, n)
        # choose home money so the model equation holds for the drawn rate path
        y = np.log(fx)
        g = np.log(gdp_ua) - np.log(fx * gdp_us)
        r = np.log(rate_ua) - np.log(rate_us)
        lag = 0.0
        if kind == "monetary_lagged":
            y_prev = np.concatenate([[params.y0 if params.y0 is not None else y[0]], y[:-1]])
            lag = params.b4 * y_prev
        m = y - params.b0 - params.b2 * g - params.b3 * r - lag - eps
        m_ua = np.exp(m) * fx * m_us
        cols = {"fx": fx, "m2_ua": m_ua, "m2_us": m_us, "gdp_ua": gdp_ua,
                "gdp_us": gdp_us, "rate_ua": rate_ua, "rate_us": rate_us}
    return FactorPanel(tuple(Series(name, periods, values) for name, values in cols.items()))

