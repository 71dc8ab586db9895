"""Kalman filter for the unobservable "adequate" inflation / exchange-rate pair.

The state is ``x = (inflation, exchange rate)`` and evolves as a random walk
(transition matrix fixed to the 2x2 identity). The ``n`` observed factors
``Y`` load on the state through a matrix ``H_k`` which is refitted at every
step by least squares on two consecutive observed state/factor pairs.

Index convention: the factor vector ``Y_{k+1}`` corrects the state estimate
at step ``k`` (``Y_{k+1} = H_k x_k + v_k``), one period ahead of the more
common ``Y_k = H x_k`` layout.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AlignmentError, DegenerateError, ShapeError, SpecError
from .timeseries import FactorPanel

PINV_RTOL = 1e-10
STATE_LABELS = ("inflation", "fx")


def _sym(p: np.ndarray) -> np.ndarray:
    return 0.5 * (p + p.T)


@dataclass(frozen=True)
class StateEstimate:
    x_hat: np.ndarray
    P: np.ndarray
    k: int = 0

    def __post_init__(self):
        x = np.asarray(self.x_hat, dtype=float).reshape(-1)
        p = np.asarray(self.P, dtype=float)
        if x.shape != (2,) or p.shape != (2, 2):
            raise ShapeError(f"state must be a 2-vector with 2x2 covariance, got {x.shape}, {p.shape}")
        object.__setattr__(self, "x_hat", x)
        object.__setattr__(self, "P", p)

    def is_healthy(self, sym_tol: float = 1e-12, psd_tol: float = 1e-10) -> bool:
        """Symmetric and positive semidefinite within tolerances relative to ``||P||``."""
        scale = np.linalg.norm(self.P)
        if abs(self.P[0, 1] - self.P[1, 0]) > sym_tol * scale:
            return False
        return bool(np.linalg.eigvalsh(_sym(self.P)).min() >= -psd_tol * scale)

    def to_dict(self) -> dict:
        return {"k": self.k, "x": self.x_hat.tolist(), "P": self.P.tolist()}


@dataclass(frozen=True)
class NoiseConfig:
    """Diagonal process noise (2 entries) and observation noise (n entries).

    Process variances may be zero, which turns the filter into recursive
    least squares for a static state.
    """

    process: np.ndarray
    observation: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.process, dtype=float).reshape(-1)
        b = np.asarray(self.observation, dtype=float).reshape(-1)
        if a.shape != (2,):
            raise ShapeError(f"process noise needs 2 entries, got {a.size}")
        if not (np.all(np.isfinite(a)) and np.all(a >= 0)):
            raise SpecError("process noise variances must be finite and non-negative")
        if b.size == 0 or not (np.all(np.isfinite(b)) and np.all(b > 0)):
            raise SpecError("observation noise variances must be finite and strictly positive")
        object.__setattr__(self, "process", a)
        object.__setattr__(self, "observation", b)

    @property
    def Q(self) -> np.ndarray:
        return np.diag(self.process)

    @property
    def R(self) -> np.ndarray:
        return np.diag(self.observation)

    def to_dict(self) -> dict:
        return {"process": self.process.tolist(), "observation": self.observation.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> NoiseConfig:
        return cls(d["process"], d["observation"])


@dataclass(frozen=True)
class ObservationMap:
    H: np.ndarray
    k: int = 0

    def __post_init__(self):
        h = np.asarray(self.H, dtype=float)
        if h.ndim != 2 or h.shape[1] != 2:
            raise ShapeError(f"observation matrix must be n x 2, got {h.shape}")
        if not np.all(np.isfinite(h)):
            raise DegenerateError(f"observation matrix at step {self.k} has non-finite entries")
        object.__setattr__(self, "H", h)


@dataclass
class FilterTrajectory:
    priors: list[StateEstimate] = field(default_factory=list)
    posteriors: list[StateEstimate] = field(default_factory=list)
    gains: list[np.ndarray] = field(default_factory=list)
    forecasts: list[np.ndarray] = field(default_factory=list)
    maps: list[ObservationMap] = field(default_factory=list)
    periods: tuple[str, ...] = ()
    observed_states: np.ndarray | None = None
    noise: NoiseConfig | None = None
    factor_names: tuple[str, ...] = ()
    scaling: dict | None = None

    def __len__(self) -> int:
        return len(self.posteriors)

    def forecast_periods(self) -> list[str | None]:
        """Target period of each forecast (``None`` past the end of the panel)."""
        out = []
        for k in range(len(self.forecasts)):
            j = k + 2
            out.append(self.periods[j] if j < len(self.periods) else None)
        return out

    def to_report(self) -> dict:
        steps = []
        for k, (pri, post, g, f) in enumerate(zip(self.priors, self.posteriors, self.gains, self.forecasts)):
            steps.append({
                "k": k,
                "prior": pri.to_dict(),
                "posterior": post.to_dict(),
                "gain_norm": float(np.linalg.norm(g, 2)),
                "forecast": f.tolist(),
                "forecast_period": self.forecast_periods()[k],
            })
        observed = [] if self.observed_states is None else self.observed_states.tolist()
        return {
            "kind": "trajectory",
            "state_labels": list(STATE_LABELS),
            "periods": list(self.periods),
            "observed": observed,
            "factors": list(self.factor_names),
            "noise": None if self.noise is None else self.noise.to_dict(),
            "scaling": self.scaling,
            "steps": steps,
        }


def fit_observation_matrix(y_k, y_k1, x_k, x_k1, k: int = 0) -> ObservationMap:
    """Row-wise least-squares loading of ``n`` factors on the 2-d state.

    For every factor ``i`` the pair ``(h_i1, h_i2)`` minimises
    ``(y_i^k - h_i . x^k)^2 + (y_i^{k+1} - h_i . x^{k+1})^2``. Two independent
    state vectors give an exact solve; collinear ones give the minimum-norm
    minimiser.
    """
    y_k = np.asarray(y_k, dtype=float).reshape(-1)
    y_k1 = np.asarray(y_k1, dtype=float).reshape(-1)
    if y_k.shape != y_k1.shape:
        raise ShapeError(f"factor vectors differ in length: {y_k.size} vs {y_k1.size}")
    states = np.vstack([np.asarray(x_k, dtype=float).reshape(2), np.asarray(x_k1, dtype=float).reshape(2)])
    if not np.any(states):
        raise DegenerateError(f"step {k}: both state vectors are zero, loading undefined")
    rhs = np.vstack([y_k, y_k1])
    h = np.linalg.pinv(states, rcond=PINV_RTOL) @ rhs
    return ObservationMap(h.T, k)


def predict_step(prev: StateEstimate, noise: NoiseConfig) -> StateEstimate:
    # transition is the identity
    return StateEstimate(prev.x_hat.copy(), prev.P + noise.Q, prev.k + 1)


def update_step(prior: StateEstimate, H: ObservationMap | np.ndarray, y_next,
                noise: NoiseConfig) -> tuple[StateEstimate, np.ndarray]:
    h = H.H if isinstance(H, ObservationMap) else np.asarray(H, dtype=float)
    y = np.asarray(y_next, dtype=float).reshape(-1)
    if h.ndim != 2 or h.shape != (y.size, 2):
        raise ShapeError(f"observation matrix {h.shape} does not match {y.size} factors")
    if noise.observation.size != y.size:
        raise ShapeError(f"noise config has {noise.observation.size} factor variances, got {y.size} factors")

    p = prior.P
    ph = p @ h.T
    s = _sym(h @ ph + noise.R)
    try:
        gain = np.linalg.solve(s, ph.T).T
    except np.linalg.LinAlgError as exc:
        raise DegenerateError(f"innovation covariance is singular at step {prior.k}") from exc
    innovation = y - h @ prior.x_hat
    x = prior.x_hat + gain @ innovation
    p_post = _sym((np.eye(2) - gain @ h) @ p)
    return StateEstimate(x, p_post, prior.k), gain


def rescale(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Divide each column by its sample standard deviation.

    Columns are not centred: the observation equation has no intercept, so
    shifting a factor would change the fitted loadings, while pure rescaling
    leaves the filtered state unchanged.
    """
    std = values.std(axis=0, ddof=1)
    std = np.where(std > 0, std, 1.0)
    return values / std, std


def default_noise(factors: np.ndarray, states: np.ndarray) -> NoiseConfig:
    """Scale-aware noise levels taken from the data.

    Process variance of each state component is the sample variance of its
    first differences; observation variance of each factor is the sample
    variance of its residual after regressing it on the observed states.
    """
    factors = np.asarray(factors, dtype=float)
    states = np.asarray(states, dtype=float)
    a = np.var(np.diff(states, axis=0), axis=0, ddof=1)
    a = np.where(a > 0, a, np.finfo(float).eps * np.maximum(1.0, np.abs(states).max(axis=0)) ** 2)
    x = np.column_stack([np.ones(len(states)), states])
    coef, *_ = np.linalg.lstsq(x, factors, rcond=None)
    resid = factors - x @ coef
    b = np.var(resid, axis=0, ddof=1)
    b = np.where(b > 0, b, np.finfo(float).eps * np.maximum(1.0, np.abs(factors).max(axis=0)) ** 2)
    return NoiseConfig(a, b)


def default_init(states: np.ndarray) -> StateEstimate:
    """First observed state as mean, diagonal of sample variances as covariance."""
    states = np.asarray(states, dtype=float)
    var = np.var(states, axis=0, ddof=1)
    var = np.where(var > 0, var, 1.0)
    return StateEstimate(states[0], np.diag(var), 0)


def run_filter(
    panel: FactorPanel | np.ndarray,
    observed_states,
    noise: NoiseConfig | None = None,
    init: StateEstimate | None = None,
    scale_factors: bool = True,
) -> FilterTrajectory:
    """Run the recursion over every consecutive pair of periods.

    Step ``k`` (``k = 0 .. N-2``) fits ``H_k`` from periods ``k`` and ``k+1``,
    predicts, and corrects with the factors of period ``k+1``. The posterior
    mean is the forecast for period ``k+2``, so the first two periods carry
    no forecast.

    ``noise`` defaults to :func:`default_noise` computed on the (rescaled)
    factors; ``init`` defaults to :func:`default_init`.
    """
    if isinstance(panel, FactorPanel):
        raw = panel.matrix()
        periods, names = panel.periods, tuple(panel.names)
    else:
        raw = np.asarray(panel, dtype=float)
        if raw.ndim == 1:
            raw = raw[:, None]
        periods, names = tuple(str(i) for i in range(len(raw))), tuple(f"Y{i + 1}" for i in range(raw.shape[1]))
    states = np.asarray(observed_states, dtype=float)
    if states.ndim != 2 or states.shape[1] != 2:
        raise ShapeError(f"observed states must be N x 2, got {states.shape}")
    if len(states) != len(raw):
        raise AlignmentError(f"{len(states)} observed states for {len(raw)} factor rows")
    if len(raw) < 3:
        raise AlignmentError(f"filter needs at least 3 periods, got {len(raw)}")

    if scale_factors:
        y, std = rescale(raw)
        scaling = {"std": std.tolist()}
    else:
        y, scaling = raw, None
    noise = default_noise(y, states) if noise is None else noise
    if noise.observation.size != y.shape[1]:
        raise ShapeError(f"noise config has {noise.observation.size} factor variances, panel has {y.shape[1]}")
    est = default_init(states) if init is None else init

    traj = FilterTrajectory(periods=periods, observed_states=states, noise=noise,
                            factor_names=names, scaling=scaling)
    for k in range(len(y) - 1):
        h = fit_observation_matrix(y[k], y[k + 1], states[k], states[k + 1], k)
        prior = predict_step(est, noise)
        prior = StateEstimate(prior.x_hat, prior.P, k)
        est, gain = update_step(prior, h, y[k + 1], noise)
        traj.priors.append(prior)
        traj.posteriors.append(est)
        traj.gains.append(gain)
        traj.maps.append(h)
        traj.forecasts.append(est.x_hat.copy())
    return traj


def run_fixed_h(observations, H, noise: NoiseConfig, init: StateEstimate) -> FilterTrajectory:
    """Filter with a constant observation matrix; ``observations`` is T x n."""
    obs = np.asarray(observations, dtype=float)
    h = ObservationMap(H)
    traj = FilterTrajectory(noise=noise)
    est = init
    for k, y in enumerate(obs):
        prior = predict_step(est, noise)
        prior = StateEstimate(prior.x_hat, prior.P, k)
        est, gain = update_step(prior, h, y, noise)
        traj.priors.append(prior)
        traj.posteriors.append(est)
        traj.gains.append(gain)
        traj.forecasts.append(est.x_hat.copy())
    return traj
