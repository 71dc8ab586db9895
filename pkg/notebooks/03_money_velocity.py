"""
Money-circulation velocity from the published coefficients
==========================================================

Velocity is GDP over money demand. Under the lagged model it depends on the
previous price level as well, so the price series carries one extra leading
quarter.
"""

# %%
from fxadequacy.datasets import load_reference_panel
from fxadequacy.monetary import golden, money_demand, velocity_lagged, velocity_static

panel = load_reference_panel()
static, lagged = golden("monetary_static").params, golden("monetary_lagged").params
P, G, R = panel["cpi_ua"], panel["gdp_ua"], panel["rate_ua"]

# %%
# Static form: V * M = G holds to rounding.
v = velocity_static(P, G, R, static)
m = money_demand(P, G, R, static)
print("max |V*M/G - 1|:", max(abs(v.values * m.values / G.values - 1)))

# %%
# Lagged form, normalised to the first quarter. Levels are only defined up
# to a constant, so the shape of the path is what carries information.
vl = velocity_lagged(P, G.slice(1, None), R.slice(1, None), lagged).normalized()
for period, value in zip(vl.periods, vl.values):
    print(f"{period}  {value:6.3f}  {'#' * int(20 * value)}")
print("first-year mean", vl.values[:4].mean(), "last-year mean", vl.values[-4:].mean())
