import io
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fxadequacy.errors import (
    AlignmentError, DataValueError, DomainError, IntegrityError, ParseError,
)
from fxadequacy.timeseries import (
    FactorPanel, Series, diff_series, dump_panel, exp_series, load_panel, log_series,
    parse_schema, period_range, scale_product_log,
)

mp.mp.dps = 30
LOG_798_90 = float(mp.log(mp.mpf("798.90")))
LOG_2 = float(mp.log(2))
LOG_8 = float(mp.log(8))


def csv_bytes(text):
    return io.BytesIO(text.encode("utf-8"))


def s(values, start="2012Q1", name="s"):
    return Series(name, period_range(start, len(values)), values)


class TestLoadPanel:
    def test_two_rows(self):
        src = csv_bytes("period,inflation,fx\n2012Q1,2.82,798.90\n2012Q2,1.89,799.00\n")
        panel = load_panel(src, {"inflation": "%", "fx": "UAH per 100 USD"})
        assert panel.n == 2
        assert panel.k == 2
        assert panel["inflation"].values[0] == 2.82
        assert panel["fx"].values[0] == 798.90
        assert panel["fx"].unit == "UAH per 100 USD"

    def test_header_only(self):
        with pytest.raises(IntegrityError):
            load_panel(csv_bytes("period,fx\n"), ["fx"])

    def test_duplicate_period(self):
        src = csv_bytes("period,fx\n2012Q1,1\n2012Q2,2\n2012Q2,3\n")
        with pytest.raises(IntegrityError, match="2012Q2"):
            load_panel(src, ["fx"])

    def test_unordered_periods(self):
        with pytest.raises(IntegrityError):
            load_panel(csv_bytes("period,fx\n2012Q2,1\n2012Q1,2\n"), ["fx"])

    def test_non_numeric_cell_names_column_and_row(self):
        src = csv_bytes("period,a,b\n2012Q1,1,2\n2012Q2,x,3\n")
        with pytest.raises(DataValueError, match=r"'a'.*2012Q2"):
            load_panel(src, ["a", "b"])

    def test_ragged_row_reports_line(self):
        src = csv_bytes("period,a\n2012Q1,1\n2012Q2,1,2\n")
        with pytest.raises(ParseError, match="line 3"):
            load_panel(src, ["a"])

    def test_bad_period_label(self):
        with pytest.raises(ParseError, match="line 2"):
            load_panel(csv_bytes("period,a\n2012-01,1\n2012Q2,2\n"), ["a"])

    def test_comments_skipped_and_subset_selected(self):
        src = csv_bytes("# note\nperiod,a,b\n# another\n2012Q1,1,2\n2012Q2,3,4\n")
        panel = load_panel(src, ["b"])
        assert panel.names == ["b"]
        np.testing.assert_array_equal(panel["b"].values, [2, 4])

    def test_incomplete_row_dropped(self):
        src = csv_bytes("period,a,b\n2012Q1,1,2\n2012Q2,,4\n2012Q3,5,6\n2012Q4,7,8\n")
        with pytest.warns(UserWarning, match="2012Q2"):
            panel = load_panel(src, ["a", "b"])
        assert panel.periods == ("2012Q1", "2012Q3", "2012Q4")

    def test_unknown_schema_column(self):
        with pytest.raises(ParseError):
            load_panel(csv_bytes("period,a\n2012Q1,1\n2012Q2,2\n"), ["zz"])

    def test_column_access_is_one_based(self):
        panel = load_panel(csv_bytes("period,a,b\n2012Q1,1,2\n2012Q2,3,4\n"))
        assert panel.column(2).name == "b"
        with pytest.raises(IndexError):
            panel.column(3)

    def test_misaligned_series_rejected(self):
        with pytest.raises(AlignmentError):
            FactorPanel((s([1, 2]), s([1, 2], start="2013Q1", name="t")))

    def test_round_trip_is_bit_exact(self):
        text = "period,a,b\n2012Q1,798.90,0.000001\n2012Q2,1442.13,-3.141593\n2012Q3,1e3,2\n"
        panel = load_panel(csv_bytes(text))
        again = load_panel(io.StringIO(dump_panel(panel)))
        for name in panel.names:
            assert again[name].values.tobytes() == panel[name].values.tobytes()


@settings(max_examples=50, deadline=None)
@given(st.lists(st.decimals(min_value=-1e6, max_value=1e6, places=6, allow_nan=False,
                            allow_infinity=False), min_size=2, max_size=12))
def test_round_trip_property(decimals):
    periods = period_range("2000Q1", len(decimals))
    body = "".join(f"{p},{d}\n" for p, d in zip(periods, decimals))
    panel = load_panel(io.StringIO("period,v\n" + body))
    again = load_panel(io.StringIO(dump_panel(panel)))
    assert again["v"].values.tobytes() == panel["v"].values.tobytes()
    np.testing.assert_array_equal(panel["v"].values, [float(d) for d in decimals])


class TestLog:
    def test_exact_logs(self):
        out = log_series(s([1.0, math.e, math.e ** 2]))
        np.testing.assert_allclose(out.values, [0, 1, 2], rtol=0, atol=1e-15)

    def test_reference_value(self):
        assert log_series(s([798.90])).values[0] == pytest.approx(LOG_798_90, rel=1e-15)

    def test_negative(self):
        with pytest.raises(DomainError, match="2012Q1"):
            log_series(s([-1.0]))

    def test_periods_kept(self):
        x = s([1.0, 2.0], start="2014Q3")
        assert log_series(x).periods == ("2014Q3", "2014Q4")


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-30, 30), min_size=1, max_size=20))
def test_log_exp_round_trip(logs):
    x = s(logs)
    back = log_series(exp_series(x))
    np.testing.assert_allclose(back.values, x.values, rtol=1e-12, atol=1e-12)


class TestDiff:
    def test_simple(self):
        np.testing.assert_array_equal(diff_series(s([3, 5]), s([1, 2])).values, [2, 3])

    def test_identity(self):
        a = s([0.3, -7.1, 1e9])
        out = diff_series(a, a)
        assert np.all(out.values == 0.0)

    def test_logs(self):
        out = diff_series(s([math.log(2)]), s([math.log(1)]))
        assert out.values[0] == pytest.approx(LOG_2, rel=1e-15)

    def test_mismatched(self):
        with pytest.raises(AlignmentError):
            diff_series(s([1, 2]), s([1, 2], start="2013Q1"))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1e12, 1e12), min_size=1, max_size=20))
def test_diff_self_is_zero(values):
    a = s(values)
    assert np.all(diff_series(a, a).values == 0.0)


class TestScaleProductLog:
    def test_unit(self):
        np.testing.assert_array_equal(scale_product_log(s([1, 1]), s([1, 1])).values, [0, 0])

    def test_value(self):
        assert scale_product_log(s([2]), s([4])).values[0] == pytest.approx(LOG_8, rel=1e-15)

    def test_zero(self):
        with pytest.raises(DomainError):
            scale_product_log(s([0]), s([5]))


def test_series_rejects_nan():
    with pytest.raises(DataValueError):
        s([1.0, float("nan")])


def test_series_values_read_only():
    x = s([1.0, 2.0])
    with pytest.raises(ValueError):
        x.values[0] = 3.0


def test_parse_schema():
    assert parse_schema("fx:UAH per 100 USD, inflation:%,m2") == {
        "fx": "UAH per 100 USD", "inflation": "%", "m2": ""}
