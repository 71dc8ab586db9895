"""Adequacy filtering and monetary regressions for exchange and inflation rates."""

__version__ = "0.1.0"

from .adequacy_filter import (  # noqa: E402
    FilterTrajectory, NoiseConfig, ObservationMap, StateEstimate, fit_observation_matrix,
    predict_step, run_filter, update_step,
)
from .linear_model import (  # noqa: E402
    DesignMatrix, ModelSpec, RegressionFit, build_design, fisher_statistic, fit, fit_model,
    predict, r_squared, sigma_mle,
)
from .monetary import (  # noqa: E402
    GOLDEN, MonetaryParams, VelocitySeries, builtin_spec, forecast_exchange, golden,
    monetary_identity_check, money_demand, price_recursion, velocity_lagged, velocity_static,
)
from .timeseries import (  # noqa: E402
    FactorPanel, Series, diff_series, dump_panel, load_panel, log_series, scale_product_log,
)
