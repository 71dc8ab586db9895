"""
Regression diagnostics on a constrained fit
===========================================

Fit the static monetary exchange-rate model with the money coefficient pinned
to one, then look at the three equivalent determination coefficients, the
residual scale and the variance-ratio statistic.
"""

# %%
from fxadequacy.linear_model import (
    FISHER_DEFINITION, INTERCEPT, SIGMA_DEFINITION, build_design, correlation_r2,
    explained_ratio_r2, fit, quadratic_form_r2,
)
from fxadequacy.monetary import builtin_spec, prepare_panel, synthetic_panel

raw = synthetic_panel("monetary_static", n=60, seed=1)
data = prepare_panel("monetary_static", raw)
spec = builtin_spec("monetary_static")
design, y = build_design(spec, data)
result = fit(design, y, spec.fixed_coefficients)

for label, b, se in zip(result.labels, result.coef, result.std_errors):
    note = "fixed" if label in result.fixed else f"se {se:.3g}"
    print(f"{label:>6} = {b: .5f}  ({note})")

# %%
# The fixed column is moved to the left-hand side, so every R^2 form is
# evaluated on the response net of that offset.
observed = y - result.offset
fitted = result.fitted - result.offset
free = [i for i, lab in enumerate(design.labels) if lab != INTERCEPT and lab not in result.fixed]
print("R^2 stored      ", result.r_squared)
print("R^2 correlation ", correlation_r2(observed, fitted))
print("R^2 ratio       ", explained_ratio_r2(observed, fitted))
print("R^2 quadratic   ", quadratic_form_r2(design.matrix[:, free], observed))

# %%
print("sigma:", result.sigma, "-", SIGMA_DEFINITION)
print("variance ratio:", result.fisher)
print(FISHER_DEFINITION)
