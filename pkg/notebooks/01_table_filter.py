"""
Filtering the adequate exchange and inflation rates
===================================================

Run the Kalman filter over the bundled 2012-2014 quarterly panel and print
the observed-vs-forecast table. The forecast for period k+2 is the posterior
after the update with the factors of period k+1, so the first two rows are
warm-up and the last forecast lands one quarter past the data.
"""

# %%
# Load the reference panel. The two state columns are exact; the factor
# columns are approximate illustrative figures.
import numpy as np

from fxadequacy.adequacy_filter import run_filter
from fxadequacy.datasets import REFERENCE_FACTORS, load_reference_panel

panel = load_reference_panel()
states = panel.matrix(["inflation", "fx"])
factors = panel.select(REFERENCE_FACTORS)
print(f"{panel.n} quarters, {factors.k} factors: {', '.join(factors.names)}")

# %%
# Default noise levels come from the data: first-difference variance of each
# state and the residual variance of each factor regressed on the states.
traj = run_filter(factors, states)
print("process variances", np.round(traj.noise.process, 4))

# %%
# Observed rates next to the forecasts they are compared with.
forecast = dict(zip(traj.forecast_periods(), traj.forecasts))
print(f"{'period':8} {'infl':>6} {'fx':>9} | {'f.infl':>7} {'f.fx':>9}")
for period, (infl, fx) in zip(panel.periods, states):
    f = forecast.get(period)
    tail = f"{f[0]:7.2f} {f[1]:9.2f}" if f is not None else ""
    print(f"{period:8} {infl:6.2f} {fx:9.2f} | {tail}")
print(f"{'next':8} {'':6} {'':9} | {forecast[None][0]:7.2f} {forecast[None][1]:9.2f}")

# %%
# The peg holds the observed rate flat through 2013 while the forecast is
# already drifting; once the peg breaks the forecast chases the devaluation.
gap = [forecast[p][1] / fx - 1 for p, fx in zip(panel.periods, states[:, 1]) if p in forecast]
print("relative forecast gap per quarter:", np.round(gap, 3))
