"""Price series construction: loading, nearby-contract rolling, currency
conversion, alignment, and subperiod splitting.

All containers are frozen dataclasses holding float64/datetime64 numpy
arrays, validated on construction. Operations are pure functions.

File formats are comma-separated with one header row and ISO-8601 dates:

* spot files: ``date,price``
* fx files: ``date,rate``
* contract files: a metadata line ``# contract=<id> expiry=<YYYY-MM>``
  followed by a ``date,price,volume`` table

Unit-conversion defaults live here as constants but every operation takes
them as arguments; nothing is hard-wired to a commodity.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DataError
from .validation import as_dates, as_vector, check_lengths

# kg per Winchester bushel by commodity, and the 60-kg bag used for
# Brazilian spot quotes. Configuration defaults, not model constants.
KG_PER_BUSHEL = {"corn": 25.4012, "soybeans": 27.2155}
KG_PER_BAG = 60.0

_SCHEMA_COLUMNS = {
    "contract": ("date", "price", "volume"),
    "spot": ("date", "price"),
    "fx": ("date", "rate"),
}


@dataclass(frozen=True)
class RawContractSeries:
    """Settlement history of one futures contract."""

    contract_id: str
    expiry: np.datetime64  # contract month
    dates: np.ndarray
    prices: np.ndarray
    volumes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "expiry", np.datetime64(self.expiry, "M"))
        object.__setattr__(self, "dates", as_dates(self.dates, "dates"))
        object.__setattr__(self, "prices", as_vector(self.prices, "prices"))
        vols = np.asarray(self.volumes, dtype=np.int64)
        check_lengths("dates", self.dates, "prices", self.prices)
        check_lengths("dates", self.dates, "volumes", vols)
        if np.any(self.prices <= 0.0):
            bad = int(np.argmax(self.prices <= 0.0))
            raise DataError(f"nonpositive price for contract {self.contract_id} at {self.dates[bad]}")
        if np.any(vols < 0):
            bad = int(np.argmax(vols < 0))
            raise DataError(f"negative volume for contract {self.contract_id} at {self.dates[bad]}")
        object.__setattr__(self, "volumes", vols)

    def __len__(self):
        return self.dates.shape[0]


@dataclass(frozen=True)
class SpotSeries:
    """Daily prices for one location (or a constructed nearby series)."""

    location: str
    dates: np.ndarray
    prices: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dates", as_dates(self.dates, "dates"))
        object.__setattr__(self, "prices", as_vector(self.prices, "prices"))
        check_lengths("dates", self.dates, "prices", self.prices)
        if np.any(self.prices <= 0.0):
            bad = int(np.argmax(self.prices <= 0.0))
            raise DataError(f"nonpositive price in series {self.location!r} at {self.dates[bad]}")

    def __len__(self):
        return self.dates.shape[0]


@dataclass(frozen=True)
class FxSeries:
    """Daily exchange rates, local-currency units per reference unit."""

    dates: np.ndarray
    rates: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dates", as_dates(self.dates, "dates"))
        object.__setattr__(self, "rates", as_vector(self.rates, "rates"))
        check_lengths("dates", self.dates, "rates", self.rates)
        if np.any(self.rates <= 0.0):
            bad = int(np.argmax(self.rates <= 0.0))
            raise DataError(f"nonpositive fx rate at {self.dates[bad]}")

    def __len__(self):
        return self.dates.shape[0]


@dataclass(frozen=True)
class AlignedPanel:
    """Two markets on a common calendar, in log price units.

    ``br`` and ``us`` are natural logs of prices in a common currency/unit
    (conventionally US$/bu). ``subperiod`` labels the sample segment.
    """

    dates: np.ndarray
    br: np.ndarray
    us: np.ndarray
    subperiod: str = "Full"

    def __post_init__(self):
        object.__setattr__(self, "dates", as_dates(self.dates, "dates"))
        object.__setattr__(self, "br", as_vector(self.br, "br"))
        object.__setattr__(self, "us", as_vector(self.us, "us"))
        check_lengths("dates", self.dates, "br", self.br)
        check_lengths("dates", self.dates, "us", self.us)
        if self.subperiod not in ("Pre", "Post", "Full"):
            raise DataError(f"subperiod must be Pre, Post or Full, got {self.subperiod!r}")

    def __len__(self):
        return self.dates.shape[0]

    def values(self) -> np.ndarray:
        """(T, 2) array, column 0 = br, column 1 = us."""
        return np.column_stack([self.br, self.us])


@dataclass(frozen=True)
class ReturnsPanel:
    """First differences of an AlignedPanel's log prices."""

    dates: np.ndarray
    dbr: np.ndarray
    dus: np.ndarray
    subperiod: str = "Full"

    def __post_init__(self):
        object.__setattr__(self, "dates", as_dates(self.dates, "dates"))
        object.__setattr__(self, "dbr", as_vector(self.dbr, "dbr"))
        object.__setattr__(self, "dus", as_vector(self.dus, "dus"))
        check_lengths("dates", self.dates, "dbr", self.dbr)
        check_lengths("dates", self.dates, "dus", self.dus)

    def __len__(self):
        return self.dates.shape[0]

    def values(self) -> np.ndarray:
        return np.column_stack([self.dbr, self.dus])


def _parse_date(text: str, path, line_no: int) -> np.datetime64:
    try:
        return np.datetime64(text.strip(), "D")
    except ValueError:
        raise DataError(f"{path}: row {line_no}: unparseable date {text!r}") from None


def _parse_float(text: str, path, line_no: int, column: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise DataError(f"{path}: row {line_no}: unparseable {column} {text!r}") from None
    if not math.isfinite(value):
        raise DataError(f"{path}: row {line_no}: non-finite {column}")
    return value


def load_series(path, schema: str):
    """Load a CSV file as the given schema.

    Parameters
    ----------
    path : path-like
    schema : {"contract", "spot", "fx"}

    Returns
    -------
    RawContractSeries, SpotSeries or FxSeries

    Rows are sorted by date; duplicate dates, nonpositive prices and
    malformed fields are rejected with the file and row number named.
    """
    if schema not in _SCHEMA_COLUMNS:
        raise ValueError(f"unknown schema {schema!r}")
    wanted = _SCHEMA_COLUMNS[schema]

    try:
        with open(path, "r", newline="") as fh:
            raw_lines = fh.readlines()
    except FileNotFoundError:
        raise DataError(f"input file not found: {path}") from None

    meta: dict[str, str] = {}
    header = None
    col_index: dict[str, int] = {}
    rows: list[tuple[int, list[str]]] = []
    for line_no, line in enumerate(raw_lines, start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            for token in stripped.lstrip("#").split():
                if "=" in token:
                    key, _, val = token.partition("=")
                    meta[key.strip()] = val.strip()
            continue
        cells = next(csv.reader([line]))
        if header is None:
            header = [c.strip().lower() for c in cells]
            missing = [c for c in wanted if c not in header]
            if missing:
                raise DataError(f"{path}: header {header} lacks required columns {missing}")
            col_index = {c: header.index(c) for c in wanted}
            continue
        rows.append((line_no, cells))

    if header is None:
        raise DataError(f"{path}: empty file, expected a header row")

    dates = []
    prices = []
    volumes = []
    rates = []
    for line_no, cells in rows:
        if len(cells) < len(header):
            raise DataError(f"{path}: row {line_no}: expected {len(header)} fields, got {len(cells)}")
        d = _parse_date(cells[col_index["date"]], path, line_no)
        dates.append(d)
        if schema == "fx":
            rates.append(_parse_float(cells[col_index["rate"]], path, line_no, "rate"))
        else:
            prices.append(_parse_float(cells[col_index["price"]], path, line_no, "price"))
        if schema == "contract":
            cell = cells[col_index["volume"]].strip()
            try:
                vol = int(cell)
            except ValueError:
                raise DataError(f"{path}: row {line_no}: unparseable volume {cell!r}") from None
            volumes.append(vol)

    if not dates:
        raise DataError(f"{path}: no data rows")

    date_arr = np.array(dates, dtype="datetime64[D]")
    order = np.argsort(date_arr, kind="stable")
    date_arr = date_arr[order]
    dup = np.flatnonzero(date_arr[1:] == date_arr[:-1])
    if dup.size:
        raise DataError(f"{path}: duplicate date {date_arr[dup[0]]}")

    if schema == "fx":
        return FxSeries(dates=date_arr, rates=np.asarray(rates)[order])
    if schema == "spot":
        location = meta.get("location", str(path))
        return SpotSeries(location=location, dates=date_arr, prices=np.asarray(prices)[order])

    if "contract" not in meta or "expiry" not in meta:
        raise DataError(f"{path}: contract files need a '# contract=<id> expiry=<YYYY-MM>' metadata line")
    try:
        expiry = np.datetime64(meta["expiry"], "M")
    except ValueError:
        raise DataError(f"{path}: unparseable expiry {meta['expiry']!r}") from None
    return RawContractSeries(
        contract_id=meta["contract"],
        expiry=expiry,
        dates=date_arr,
        prices=np.asarray(prices)[order],
        volumes=np.asarray(volumes, dtype=np.int64)[order],
    )


def build_nearby(contracts, label: str = "nearby") -> SpotSeries:
    """Splice contracts into one continuous nearby series.

    The active contract hands over to the next-to-expire contract on the
    first date the successor's traded volume strictly exceeds the incumbent's,
    and never hands back. If that crossover never happens, the roll is forced
    on the incumbent's final trading date.

    Parameters
    ----------
    contracts : sequence of RawContractSeries, ordered by expiry
    label : location label for the output series
    """
    contracts = list(contracts)
    if not contracts:
        raise DataError("build_nearby needs at least one contract")
    for prev, cur in zip(contracts, contracts[1:]):
        if cur.expiry <= prev.expiry:
            raise DataError(
                f"contracts must be ordered by strictly increasing expiry; "
                f"{cur.contract_id} ({cur.expiry}) follows {prev.contract_id} ({prev.expiry})"
            )

    out_dates: list[np.datetime64] = []
    out_prices: list[float] = []
    active_from = contracts[0].dates[0]
    for i, cur in enumerate(contracts):
        if i + 1 < len(contracts):
            nxt = contracts[i + 1]
            common, cur_idx, nxt_idx = np.intersect1d(cur.dates, nxt.dates, return_indices=True)
            if common.size == 0:
                raise DataError(
                    f"no overlapping trading dates between {cur.contract_id} and "
                    f"{nxt.contract_id}; nearby series would have a gap"
                )
            cross = np.flatnonzero(nxt.volumes[nxt_idx] > cur.volumes[cur_idx])
            roll_date = common[cross[0]] if cross.size else cur.dates[-1]
        else:
            roll_date = None  # last contract never rolls

        if roll_date is None:
            mask = cur.dates >= active_from
        else:
            mask = (cur.dates >= active_from) & (cur.dates < roll_date)
        out_dates.extend(cur.dates[mask])
        out_prices.extend(cur.prices[mask])

        if roll_date is not None:
            nxt = contracts[i + 1]
            if roll_date not in nxt.dates and roll_date in cur.dates:
                # forced roll on a date the successor does not trade: the
                # incumbent still prices that one date
                j = int(np.searchsorted(cur.dates, roll_date))
                out_dates.append(cur.dates[j])
                out_prices.append(cur.prices[j])
                roll_date = roll_date + np.timedelta64(1, "D")
            active_from = roll_date

    if not out_dates:
        raise DataError("nearby construction produced an empty series")
    return SpotSeries(location=label, dates=np.array(out_dates, dtype="datetime64[D]"),
                      prices=np.asarray(out_prices))


def convert_to_usd_per_bushel(
    s: SpotSeries,
    fx: FxSeries,
    kg_per_local_unit: float,
    kg_per_bushel: float,
    stale_limit: int = 5,
    on_missing: str = "error",
) -> SpotSeries:
    """Convert local-currency-per-local-unit prices to US$/bu.

    price_out = (price_in / fx_rate) * (kg_per_bushel / kg_per_local_unit)

    A date with no exchange-rate quote uses the most recent quote up to
    ``stale_limit`` calendar days old. Beyond the window the date is either
    rejected (``on_missing="error"``, naming the first offending date) or
    dropped from the output (``on_missing="drop"``).
    """
    if kg_per_local_unit <= 0 or kg_per_bushel <= 0:
        raise DataError("unit masses must be positive")
    if stale_limit < 0:
        raise DataError("stale_limit must be nonnegative")
    if on_missing not in ("error", "drop"):
        raise ValueError(f"on_missing must be 'error' or 'drop', got {on_missing!r}")

    # index of the latest fx date <= each price date
    pos = np.searchsorted(fx.dates, s.dates, side="right") - 1
    have = pos >= 0
    age = np.full(len(s), np.iinfo(np.int64).max, dtype=np.int64)
    age[have] = (s.dates[have] - fx.dates[pos[have]]).astype("timedelta64[D]").astype(np.int64)
    usable = have & (age <= stale_limit)

    if not np.all(usable):
        first = int(np.argmin(usable))
        if on_missing == "error":
            raise DataError(
                f"no fx rate within {stale_limit} days of {s.dates[first]} "
                f"for series {s.location!r}"
            )
    rate = fx.rates[np.clip(pos, 0, None)]
    factor = kg_per_bushel / kg_per_local_unit
    prices = (s.prices / rate) * factor
    return SpotSeries(location=s.location, dates=s.dates[usable], prices=prices[usable])


def align(br: SpotSeries, us: SpotSeries, subperiod: str = "Full") -> AlignedPanel:
    """Inner-join two series on date and move to log prices."""
    if len(br) == 0 or len(us) == 0:
        raise DataError("cannot align empty series")
    common, bi, ui = np.intersect1d(br.dates, us.dates, return_indices=True)
    if common.size == 0:
        raise DataError(
            f"series {br.location!r} and {us.location!r} share no trading dates"
        )
    return AlignedPanel(
        dates=common,
        br=np.log(br.prices[bi]),
        us=np.log(us.prices[ui]),
        subperiod=subperiod,
    )


def returns(p: AlignedPanel) -> ReturnsPanel:
    """Log returns: first differences of the panel's log prices."""
    if len(p) < 2:
        raise DataError(f"panel of length {len(p)} is too short for returns")
    return ReturnsPanel(
        dates=p.dates[1:],
        dbr=np.diff(p.br),
        dus=np.diff(p.us),
        subperiod=p.subperiod,
    )


def split_subperiods(p: AlignedPanel, cut_date) -> tuple[AlignedPanel, AlignedPanel]:
    """Split a panel at ``cut_date``: Pre takes dates strictly before the
    cut, Post takes the cut date onward. Both segments must be nonempty."""
    cut = np.datetime64(cut_date, "D")
    before = p.dates < cut
    n_pre = int(before.sum())
    if n_pre == 0 or n_pre == len(p):
        raise DataError(
            f"cut date {cut} does not split the panel range "
            f"[{p.dates[0]}, {p.dates[-1]}]"
        )
    pre = AlignedPanel(dates=p.dates[:n_pre], br=p.br[:n_pre], us=p.us[:n_pre], subperiod="Pre")
    post = AlignedPanel(dates=p.dates[n_pre:], br=p.br[n_pre:], us=p.us[n_pre:], subperiod="Post")
    return pre, post


def write_panel_csv(p: AlignedPanel, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["date", "br_log", "us_log"])
        for d, b, u in zip(p.dates, p.br, p.us):
            writer.writerow([str(d), f"{b:.10f}", f"{u:.10f}"])


def read_panel_csv(path, subperiod: str = "Full") -> AlignedPanel:
    try:
        with open(path, "r", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [c.strip() for c in header] != ["date", "br_log", "us_log"]:
                raise DataError(f"{path}: expected header date,br_log,us_log")
            dates, br, us = [], [], []
            for line_no, cells in enumerate(reader, start=2):
                if not cells:
                    continue
                dates.append(_parse_date(cells[0], path, line_no))
                br.append(_parse_float(cells[1], path, line_no, "br_log"))
                us.append(_parse_float(cells[2], path, line_no, "us_log"))
    except FileNotFoundError:
        raise DataError(f"input file not found: {path}") from None
    if not dates:
        raise DataError(f"{path}: no data rows")
    return AlignedPanel(dates=np.array(dates, dtype="datetime64[D]"),
                        br=np.asarray(br), us=np.asarray(us), subperiod=subperiod)
