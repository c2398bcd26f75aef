"""Raw loading, nearby construction, unit conversion and alignment."""

import numpy as np
import pytest

from conftest import business_days
from crossvol.exceptions import DataError
from crossvol.series import (
    KG_PER_BUSHEL,
    AlignedPanel,
    FxSeries,
    RawContractSeries,
    SpotSeries,
    align,
    build_nearby,
    convert_to_usd_per_bushel,
    load_series,
    read_panel_csv,
    returns,
    split_subperiods,
    write_panel_csv,
)


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestLoadSeries:
    def test_spot_roundtrip(self, tmp_path):
        p = _write(
            tmp_path,
            "spot.csv",
            "# location=inland\ndate,price\n2020-01-02,10.5\n2020-01-03,11.25\n",
        )
        s = load_series(p, "spot")
        assert s.location == "inland"
        assert list(np.datetime_as_string(s.dates)) == ["2020-01-02", "2020-01-03"]
        np.testing.assert_allclose(s.prices, [10.5, 11.25])

    def test_unsorted_rows_are_sorted(self, tmp_path):
        p = _write(tmp_path, "s.csv", "date,price\n2020-01-03,2\n2020-01-02,1\n")
        s = load_series(p, "spot")
        np.testing.assert_allclose(s.prices, [1.0, 2.0])

    def test_duplicate_date_rejected(self, tmp_path):
        p = _write(tmp_path, "s.csv", "date,price\n2020-01-02,1\n2020-01-02,2\n")
        with pytest.raises(DataError, match="duplicate date"):
            load_series(p, "spot")

    def test_bad_price_names_line(self, tmp_path):
        p = _write(tmp_path, "s.csv", "date,price\n2020-01-02,1\n2020-01-03,oops\n")
        with pytest.raises(DataError, match="row 3"):
            load_series(p, "spot")

    def test_missing_column(self, tmp_path):
        p = _write(tmp_path, "s.csv", "date,close\n2020-01-02,1\n")
        with pytest.raises(DataError, match="price"):
            load_series(p, "spot")

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError, match="not found"):
            load_series(tmp_path / "absent.csv", "spot")

    def test_nonpositive_price(self, tmp_path):
        p = _write(tmp_path, "s.csv", "date,price\n2020-01-02,0\n")
        with pytest.raises(DataError, match="nonpositive"):
            load_series(p, "spot")

    def test_contract_needs_metadata(self, tmp_path):
        p = _write(tmp_path, "c.csv", "date,price,volume\n2020-01-02,4,100\n")
        with pytest.raises(DataError, match="metadata"):
            load_series(p, "contract")

    def test_contract_roundtrip(self, tmp_path):
        p = _write(
            tmp_path,
            "c.csv",
            "# contract=h20 expiry=2020-03\ndate,price,volume\n2020-01-02,4.0,100\n",
        )
        c = load_series(p, "contract")
        assert c.contract_id == "h20"
        assert c.expiry == np.datetime64("2020-03")
        assert c.volumes.dtype == np.int64

    def test_fx(self, tmp_path):
        p = _write(tmp_path, "fx.csv", "date,rate\n2020-01-02,5.2\n")
        fx = load_series(p, "fx")
        np.testing.assert_allclose(fx.rates, [5.2])


def _contract(cid, expiry, dates, prices, volumes):
    return RawContractSeries(
        contract_id=cid, expiry=expiry, dates=dates, prices=prices, volumes=volumes
    )


class TestBuildNearby:
    def test_rolls_at_first_volume_crossover(self):
        d = business_days("2020-01-06", 6)
        front = _contract("a", "2020-02", d[:5], [10, 11, 12, 13, 14], [500, 400, 300, 100, 50])
        back = _contract("b", "2020-03", d[1:], [20, 21, 22, 23, 24], [100, 200, 350, 600, 700])
        nearby = build_nearby([front, back])
        # first strict crossover is on d3 (350 > 100): back supplies d3 onward
        np.testing.assert_allclose(nearby.prices, [10, 11, 12, 22, 23, 24])
        assert nearby.dates.shape[0] == 6

    def test_never_rolls_back(self):
        d = business_days("2020-01-06", 5)
        front = _contract("a", "2020-02", d, [10] * 5, [500, 100, 500, 500, 500])
        back = _contract("b", "2020-03", d, [20] * 5, [400, 200, 100, 100, 100])
        nearby = build_nearby([front, back])
        # once on b (day 2: 200 > 100) the series stays on b
        np.testing.assert_allclose(nearby.prices, [10, 20, 20, 20, 20])

    def test_forced_roll_on_expiring_last_date(self):
        d = business_days("2020-01-06", 4)
        front = _contract("a", "2020-02", d[:2], [10, 11], [500, 500])
        back = _contract("b", "2020-03", d[1:], [21, 22, 23], [10, 20, 30])
        nearby = build_nearby([front, back])
        # volume never crosses, so the roll happens on the front's last
        # trading date, taking the back price from that date on
        np.testing.assert_allclose(nearby.prices, [10, 21, 22, 23])

    def test_identical_prices_make_roll_invisible(self):
        d = business_days("2020-01-06", 8)
        base = np.linspace(10, 12, 8)
        front = _contract("a", "2020-02", d[:6], base[:6], [500] * 4 + [300, 100])
        back = _contract("b", "2020-03", d[2:], base[2:], [50, 50, 400, 600, 700, 800])
        nearby = build_nearby([front, back])
        np.testing.assert_allclose(nearby.prices, base, rtol=0, atol=0)

    def test_expiry_order_enforced(self):
        d = business_days("2020-01-06", 3)
        c1 = _contract("a", "2020-03", d, [1, 2, 3], [1, 1, 1])
        c2 = _contract("b", "2020-03", d, [1, 2, 3], [1, 1, 1])
        with pytest.raises(DataError, match="expiry"):
            build_nearby([c1, c2])


class TestConvert:
    def test_bag_to_bushel_factor(self):
        # 60 local units per bag at rate 5 equals 25.4012/5 reference units
        s = SpotSeries(location="x", dates=["2020-01-02"], prices=[60.0])
        fx = FxSeries(dates=["2020-01-02"], rates=[5.0])
        out = convert_to_usd_per_bushel(
            s, fx, kg_per_local_unit=60.0, kg_per_bushel=KG_PER_BUSHEL["corn"]
        )
        np.testing.assert_allclose(out.prices, [5.0802399999999999], rtol=0, atol=0)

    def test_backward_fill_within_stale_limit(self):
        d = business_days("2020-01-06", 4)
        s = SpotSeries(location="x", dates=d, prices=[60.0] * 4)
        fx = FxSeries(dates=[d[0]], rates=[5.0])
        out = convert_to_usd_per_bushel(
            s, fx, kg_per_local_unit=60.0, kg_per_bushel=25.4012, stale_limit=5
        )
        assert len(out) == 4
        np.testing.assert_allclose(out.prices, 5.08024)

    def test_stale_rate_errors_by_default(self):
        d = business_days("2020-01-06", 10)
        s = SpotSeries(location="x", dates=d, prices=[60.0] * 10)
        fx = FxSeries(dates=[d[0]], rates=[5.0])
        with pytest.raises(DataError, match="no fx rate"):
            convert_to_usd_per_bushel(
                s, fx, kg_per_local_unit=60.0, kg_per_bushel=25.4012, stale_limit=5
            )

    def test_stale_rate_dropped_on_request(self):
        d = business_days("2020-01-06", 10)
        s = SpotSeries(location="x", dates=d, prices=[60.0] * 10)
        fx = FxSeries(dates=[d[0]], rates=[5.0])
        out = convert_to_usd_per_bushel(
            s,
            fx,
            kg_per_local_unit=60.0,
            kg_per_bushel=25.4012,
            stale_limit=5,
            on_missing="drop",
        )
        # ages are calendar days: the Mon..Fri run keeps 5 dates
        assert len(out) == 5

    def test_no_prior_rate(self):
        s = SpotSeries(location="x", dates=["2020-01-02"], prices=[60.0])
        fx = FxSeries(dates=["2020-01-03"], rates=[5.0])
        with pytest.raises(DataError):
            convert_to_usd_per_bushel(s, fx, kg_per_local_unit=60.0, kg_per_bushel=25.4012)


class TestAlignSplit:
    def _panel(self):
        d1 = business_days("2020-01-06", 6)
        d2 = business_days("2020-01-07", 6)
        br = SpotSeries(location="br", dates=d1, prices=np.linspace(2, 3, 6))
        us = SpotSeries(location="us", dates=d2, prices=np.linspace(4, 5, 6))
        return align(br, us)

    def test_inner_join_and_logs(self):
        panel = self._panel()
        assert len(panel) == 5  # one non-common date on each side
        assert panel.subperiod == "Full"
        assert np.all(np.isfinite(panel.br)) and np.all(panel.us > 1.0)

    def test_no_overlap(self):
        br = SpotSeries(location="br", dates=["2020-01-02"], prices=[2.0])
        us = SpotSeries(location="us", dates=["2021-01-04"], prices=[4.0])
        with pytest.raises(DataError, match="no trading dates"):
            align(br, us)

    def test_split_strictly_before_cut(self):
        panel = self._panel()
        cut = panel.dates[2]
        pre, post = split_subperiods(panel, cut)
        assert pre.subperiod == "Pre" and post.subperiod == "Post"
        assert len(pre) == 2 and len(post) == 3
        assert pre.dates[-1] < np.datetime64(cut) <= post.dates[0]

    def test_split_empty_side_rejected(self):
        panel = self._panel()
        with pytest.raises(DataError):
            split_subperiods(panel, panel.dates[0])
        with pytest.raises(DataError):
            split_subperiods(panel, panel.dates[-1] + np.timedelta64(5, "D"))

    def test_returns_are_log_differences(self):
        panel = self._panel()
        r = returns(panel)
        assert len(r) == len(panel) - 1
        np.testing.assert_allclose(r.dbr, np.diff(panel.br), atol=0)
        assert r.dates[0] == panel.dates[1]

    def test_panel_csv_roundtrip(self, tmp_path):
        panel = self._panel()
        path = tmp_path / "panel.csv"
        write_panel_csv(panel, path)
        header = path.read_text().splitlines()[0]
        assert header == "date,br_log,us_log"
        back = read_panel_csv(path)
        np.testing.assert_allclose(back.br, panel.br, atol=1e-10)
        np.testing.assert_allclose(back.us, panel.us, atol=1e-10)
        assert np.array_equal(back.dates, panel.dates)


class TestPanelValidation:
    def test_dates_must_increase(self):
        with pytest.raises(DataError):
            AlignedPanel(
                dates=["2020-01-03", "2020-01-02"], br=[1.0, 1.0], us=[1.0, 1.0]
            )

    def test_length_mismatch(self):
        with pytest.raises(DataError):
            AlignedPanel(dates=["2020-01-02"], br=[1.0, 2.0], us=[1.0])
