"""Least-squares regression with fixed coefficients, lagged responses and
the determination / dispersion / Snedecor-Fisher diagnostics.

The estimate is the usual ``b = (X'X)^-1 X'y``; it is computed from a QR
factorisation of the free columns so the condition number is not squared.
Coefficients held fixed are moved to the left-hand side (``y - x_j b_j``)
and the reduced system is solved for the rest.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.linalg import solve_triangular

from .errors import DegenerateError, ShapeError, SingularityError, SpecError
from .timeseries import FactorPanel

RANK_RTOL = 1e-10
INTERCEPT = "const"

SIGMA_DEFINITION = "sigma = sqrt(<y - X b, y - X b> / n), maximum-likelihood residual scale"
FISHER_DEFINITION = (
    "<e,(I-P)e> / <e,Pe> * (k+1)/(n-k-1) with P the hat matrix and e the response "
    "standardised by sigma (zero-mean null); this is the reciprocal of the textbook F ratio"
)


@dataclass(frozen=True)
class ModelSpec:
    """Declarative description of one regression.

    ``response_lags`` lists the lag orders of the response that enter as
    regressors; ``initial_response_values`` supplies the pre-sample values
    ``(..., y_{-1}, y_0)`` they need, last element being ``y_0``.
    """

    response: str
    factors: tuple[str, ...]
    include_intercept: bool = True
    response_lags: tuple[int, ...] = ()
    fixed_coefficients: Mapping[str, float] = field(default_factory=dict)
    initial_response_values: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        object.__setattr__(self, "response_lags", tuple(int(p) for p in self.response_lags))
        object.__setattr__(
            self, "initial_response_values",
            tuple(float(v) for v in self.initial_response_values or ()),
        )
        object.__setattr__(
            self, "fixed_coefficients",
            {str(k): float(v) for k, v in dict(self.fixed_coefficients).items()},
        )
        unknown = set(self.fixed_coefficients) - set(self.factors)
        if unknown:
            raise SpecError(f"fixed coefficients {sorted(unknown)} are not factors")
        if any(p < 1 for p in self.response_lags):
            raise SpecError(f"lag orders must be >= 1, got {self.response_lags}")
        if len(set(self.response_lags)) != len(self.response_lags):
            raise SpecError("repeated lag order")

    @property
    def lag_labels(self) -> list[str]:
        return [lag_label(self.response, p) for p in self.response_lags]

    @property
    def column_labels(self) -> list[str]:
        head = [INTERCEPT] if self.include_intercept else []
        return head + list(self.factors) + self.lag_labels

    @classmethod
    def from_dict(cls, d: Mapping) -> ModelSpec:
        known = {"response", "factors", "include_intercept", "response_lags",
                 "fixed_coefficients", "initial_response_values"}
        extra = set(d) - known
        if extra:
            raise SpecError(f"unknown spec keys {sorted(extra)}")
        try:
            return cls(**d)
        except TypeError as exc:
            raise SpecError(f"bad model spec: {exc}") from None

    def to_dict(self) -> dict:
        return {
            "response": self.response,
            "factors": list(self.factors),
            "include_intercept": self.include_intercept,
            "response_lags": list(self.response_lags),
            "fixed_coefficients": dict(self.fixed_coefficients),
            "initial_response_values": list(self.initial_response_values),
        }


def lag_label(response: str, p: int) -> str:
    return f"{response}[-{p}]"


@dataclass(frozen=True)
class DesignMatrix:
    matrix: np.ndarray
    labels: tuple[str, ...]
    intercept: bool = True
    periods: tuple[str, ...] = ()

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2:
            raise ShapeError("design must be a 2-d matrix")
        labels = tuple(self.labels) if self.labels else tuple(f"x{j}" for j in range(m.shape[1]))
        if len(labels) != m.shape[1]:
            raise ShapeError(f"{len(labels)} labels for {m.shape[1]} columns")
        if self.intercept and not np.all(m[:, 0] == 1.0):
            raise ShapeError("intercept requested but first column is not all ones")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "labels", labels)

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def cols(self) -> int:
        return self.matrix.shape[1]

    @classmethod
    def with_intercept(cls, factors, labels: Sequence[str] | None = None) -> DesignMatrix:
        """Prepend a column of ones to ``factors`` (n x k)."""
        factors = np.atleast_2d(np.asarray(factors, dtype=float))
        if factors.shape[0] == 1 and factors.shape[1] > 1:
            factors = factors.T
        n, k = factors.shape
        labels = list(labels) if labels is not None else [f"x{j}" for j in range(1, k + 1)]
        return cls(np.column_stack([np.ones(n), factors]), (INTERCEPT, *labels), True)


def _as_design(design) -> DesignMatrix:
    if isinstance(design, DesignMatrix):
        return design
    m = np.asarray(design, dtype=float)
    return DesignMatrix(m, (), intercept=bool(m.ndim == 2 and np.all(m[:, 0] == 1.0)))


def build_design(spec: ModelSpec, panel: FactorPanel) -> tuple[DesignMatrix, np.ndarray]:
    missing = [name for name in (spec.response, *spec.factors) if name not in panel]
    if missing:
        raise SpecError(f"panel has no column(s) {missing}; available: {panel.names}")
    y = panel[spec.response].values.copy()
    n = len(y)

    columns = []
    if spec.include_intercept:
        columns.append(np.ones(n))
    columns.extend(panel[name].values for name in spec.factors)

    if spec.response_lags:
        need = max(spec.response_lags)
        init = spec.initial_response_values
        if len(init) < need:
            raise SpecError(
                f"lag {need} needs {need} initial response value(s), got {len(init)}"
            )
        history = np.concatenate([np.asarray(init[len(init) - need:], dtype=float), y])
        for p in spec.response_lags:
            columns.append(history[need - p: need - p + n])

    matrix = np.column_stack(columns)
    if n <= matrix.shape[1]:
        raise SpecError(f"underdetermined: {n} observations for {matrix.shape[1]} parameters")
    design = DesignMatrix(matrix, tuple(spec.column_labels), spec.include_intercept, panel.periods)
    return design, y


@dataclass(frozen=True)
class RegressionFit:
    labels: tuple[str, ...]
    coef: np.ndarray
    residuals: np.ndarray
    fitted: np.ndarray
    offset: np.ndarray
    r_squared: float | None
    sigma: float
    fisher: float | None
    std_errors: np.ndarray
    fixed: Mapping[str, float]
    periods: tuple[str, ...] = ()

    @property
    def coefficients(self) -> dict[str, float]:
        return dict(zip(self.labels, (float(c) for c in self.coef)))

    @property
    def n(self) -> int:
        return len(self.residuals)

    @property
    def sigma2(self) -> float:
        return self.sigma ** 2

    def __getitem__(self, label: str) -> float:
        return self.coefficients[label]

    def to_report(self) -> dict:
        return {
            "kind": "fit",
            "labels": list(self.labels),
            "coefficients": self.coefficients,
            "fixed": dict(self.fixed),
            "std_errors": dict(zip(self.labels, map(float, self.std_errors))),
            "r_squared": self.r_squared,
            "sigma": self.sigma,
            "sigma2": self.sigma2,
            "sigma_definition": SIGMA_DEFINITION,
            "fisher": self.fisher,
            "fisher_definition": FISHER_DEFINITION,
            "n": self.n,
            "periods": list(self.periods),
            "residuals": [float(r) for r in self.residuals],
        }


def _check_rank(x: np.ndarray, labels: Sequence[str]) -> None:
    if x.shape[1] == 0:
        return
    _, s, vt = np.linalg.svd(x, full_matrices=False)
    if s[-1] <= RANK_RTOL * s[0]:
        weights = np.abs(vt[-1])
        involved = [labels[j] for j in np.flatnonzero(weights > 1e-6 * weights.max())]
        raise SingularityError(
            f"free columns are rank deficient (singular value ratio {s[-1] / s[0]:.3e}); "
            f"near-dependent columns: {involved}",
            involved,
        )


def _project(x: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Orthogonal projection of ``v`` onto the column space of ``x``."""
    q, _ = np.linalg.qr(x)
    return q @ (q.T @ v)


def fit(design, response, fixed: Mapping[str, float] | None = None) -> RegressionFit:
    design = _as_design(design)
    x = design.matrix
    y = np.asarray(response, dtype=float)
    if y.shape != (design.rows,):
        raise ShapeError(f"response has shape {y.shape}, design has {design.rows} rows")
    fixed = {str(k): float(v) for k, v in (fixed or {}).items()}
    unknown = set(fixed) - set(design.labels)
    if unknown:
        raise SpecError(f"fixed coefficients {sorted(unknown)} are not design columns")

    fixed_idx = [design.labels.index(k) for k in fixed]
    free_idx = [j for j in range(design.cols) if j not in fixed_idx]
    free_labels = [design.labels[j] for j in free_idx]
    offset = x[:, fixed_idx] @ np.array([fixed[design.labels[j]] for j in fixed_idx]) \
        if fixed_idx else np.zeros(design.rows)
    target = y - offset
    xf = x[:, free_idx]
    _check_rank(xf, free_labels)

    coef = np.empty(design.cols)
    for j in fixed_idx:
        coef[j] = fixed[design.labels[j]]
    std_errors = np.zeros(design.cols)
    if free_idx:
        q, r = np.linalg.qr(xf)
        b_free = solve_triangular(r, q.T @ target)
        coef[free_idx] = b_free
    fitted = x @ coef
    residuals = y - fitted
    n = design.rows
    ssr = float(residuals @ residuals)
    sigma = float(np.sqrt(ssr / n))

    if free_idx:
        dof = n - len(free_idx)
        r_inv = solve_triangular(r, np.eye(len(free_idx)))
        cov_unscaled = r_inv @ r_inv.T
        s2 = ssr / dof if dof > 0 else np.nan
        std_errors[free_idx] = np.sqrt(np.diag(cov_unscaled) * s2)

    free_design = DesignMatrix(xf, tuple(free_labels), intercept=False)
    has_intercept = design.intercept and INTERCEPT in free_labels
    try:
        r2 = _r_squared(target, fitted - offset, has_intercept)
    except DegenerateError:
        r2 = None
    try:
        scale = sigma if sigma > 0 else 1.0
        fisher = fisher_statistic(free_design, target / scale) if free_idx else None
    except DegenerateError:
        fisher = None

    coef.setflags(write=False)
    return RegressionFit(
        labels=design.labels,
        coef=coef,
        residuals=residuals,
        fitted=fitted,
        offset=offset,
        r_squared=r2,
        sigma=sigma,
        fisher=fisher,
        std_errors=std_errors,
        fixed=fixed,
        periods=design.periods,
    )


def fit_model(spec: ModelSpec, panel: FactorPanel) -> RegressionFit:
    design, y = build_design(spec, panel)
    return fit(design, y, spec.fixed_coefficients)


def _centered_ss(v: np.ndarray) -> float:
    c = v - v.mean()
    return float(c @ c)


def _r_squared(observed, fitted, has_intercept: bool = True) -> float:
    observed = np.asarray(observed, dtype=float)
    fitted = np.asarray(fitted, dtype=float)
    if np.ptp(observed) <= 1e-14 * max(1.0, float(np.abs(observed).max())):
        raise DegenerateError("response has zero variance; determination coefficient undefined")
    if has_intercept:
        return explained_ratio_r2(observed, fitted)
    return correlation_r2(observed, fitted)


def r_squared(fit: RegressionFit, response=None) -> float:
    """Determination coefficient: explained over total centred sum of squares.

    For fits with fixed coefficients both series are taken net of the fixed
    part, i.e. on the system that was actually solved. Without an intercept
    the ratio is not bounded by 1, so the squared correlation is returned.
    """
    y = fit.fitted + fit.residuals if response is None else np.asarray(response, dtype=float)
    has_intercept = INTERCEPT in fit.labels and INTERCEPT not in fit.fixed
    return _r_squared(y - fit.offset, fit.fitted - fit.offset, has_intercept)


def correlation_r2(observed, fitted) -> float:
    """Squared sample correlation between observations and fitted values."""
    a = np.asarray(observed, dtype=float)
    b = np.asarray(fitted, dtype=float)
    a = a - a.mean()
    b = b - b.mean()
    denom = float(a @ a) * float(b @ b)
    if denom == 0.0:
        raise DegenerateError("zero variance in correlation")
    return float(a @ b) ** 2 / denom


def explained_ratio_r2(observed, fitted) -> float:
    total = _centered_ss(np.asarray(observed, dtype=float))
    if total == 0.0:
        raise DegenerateError("response has zero variance; determination coefficient undefined")
    return _centered_ss(np.asarray(fitted, dtype=float)) / total


def quadratic_form_r2(factors, observed) -> float:
    """R^2 as ``<yc, X1 A1^-1 X1' yc> / <yc, yc>`` with centred factors X1.

    ``factors`` excludes the intercept column.
    """
    x1 = np.asarray(factors, dtype=float)
    if x1.ndim == 1:
        x1 = x1[:, None]
    x1 = x1 - x1.mean(axis=0)
    yc = np.asarray(observed, dtype=float)
    yc = yc - yc.mean()
    total = float(yc @ yc)
    if total == 0.0:
        raise DegenerateError("response has zero variance; determination coefficient undefined")
    return float(yc @ _project(x1, yc)) / total


def sigma_mle(design, response, fit: RegressionFit) -> float:
    """Residual scale ``sqrt(SSR / n)``; see :data:`SIGMA_DEFINITION`."""
    x = _as_design(design).matrix
    r = np.asarray(response, dtype=float) - x @ fit.coef
    return float(np.sqrt(r @ r / len(r)))


def fisher_statistic(design, residuals) -> float:
    """``<e,(I-P)e> / <e,Pe> * (k+1)/(n-k-1)``, P the hat matrix of ``design``.

    The ratio is invariant to rescaling ``e``, so standardising by sigma
    beforehand is optional. Note the degrees-of-freedom factor is the
    reciprocal of the one in the conventional F(k+1, n-k-1) statistic.
    """
    x = _as_design(design).matrix
    e = np.asarray(residuals, dtype=float)
    n, cols = x.shape
    if e.shape != (n,):
        raise ShapeError(f"residual vector has shape {e.shape}, design has {n} rows")
    if n <= cols:
        raise SpecError(f"need n > k+1, got n={n}, k+1={cols}")
    pe = _project(x, e)
    explained = float(e @ pe)
    total = float(e @ e)
    if explained <= 1e-14 * total or total == 0.0:
        raise DegenerateError("residuals are orthogonal to the design; statistic undefined")
    unexplained = max(float(e @ (e - pe)), 0.0)
    return unexplained / explained * cols / (n - cols)


def predict(fit: RegressionFit | Sequence[float], design_row) -> float:
    coef = fit.coef if isinstance(fit, RegressionFit) else np.asarray(fit, dtype=float)
    row = np.asarray(design_row, dtype=float)
    if row.shape != coef.shape:
        raise ShapeError(f"row has {row.size} entries, model has {coef.size} coefficients")
    return float(coef @ row)
