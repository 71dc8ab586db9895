"""
Recovering model coefficients from synthetic panels
===================================================

Each built-in model kind has a seeded generator that draws factor paths at
plausible scales and builds the response from the published coefficients.
Refitting should land close to the generating values.
"""

# %%
import numpy as np

from fxadequacy.linear_model import fit_model
from fxadequacy.monetary import GOLDEN, builtin_spec, forecast_exchange, prepare_panel, synthetic_panel

for kind, gset in GOLDEN.items():
    data = prepare_panel(kind, synthetic_panel(kind, n=400, seed=2))
    result = fit_model(builtin_spec(kind, y0=gset.params.y0), data)
    z = (result.coef - gset.params.vector) / np.where(result.std_errors > 0, result.std_errors, np.inf)
    print(f"{kind:17} R^2 {result.r_squared:.4f}  max |error| / se {np.abs(z).max():.2f}")

# %%
# One-step forecast with the lagged model: log rate from the latest factors
# and the previous log rate.
params = GOLDEN["monetary_lagged"].params
print("log forecast, zero factors:", forecast_exchange(params, [0.0, 0.0, 0.0], params.y0))
print("log forecast, unit factors:", forecast_exchange(params, [1.0, 1.0, 1.0], params.y0))
