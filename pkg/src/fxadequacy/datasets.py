"""Bundled reference data."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .timeseries import FactorPanel, load_panel

STATE_COLUMNS = ("inflation", "fx")
# exchange-rate determinants named for the adequacy model: energy prices,
# current account, trade balance, money supply, reserves, refinancing rate, GDP
REFERENCE_FACTORS = ("energy", "current_account", "trade_balance", "m2_ua",
                     "reserves", "rate_ua", "gdp_ua")


def reference_panel_path() -> Path:
    return Path(str(resources.files("fxadequacy") / "data" / "reference_panel.csv"))


def load_reference_panel() -> FactorPanel:
    return load_panel(reference_panel_path())
