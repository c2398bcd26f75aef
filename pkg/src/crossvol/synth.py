"""Synthetic two-market dataset generator.

Builds raw input files (futures contract histories, a local-currency spot
series, an exchange-rate series) from a known data-generating process so
the full pipeline can be exercised end to end with a known answer.

The log-price panel has two segments joined at a boundary date:

* an early segment where both markets follow independent-innovation
  random walks in levels (no long-run link, conditional covariance from
  a diagonal dynamic model), and
* a later segment where log prices share a long-run equilibrium
  ``br - |beta1|*us + beta2`` with error-correction loadings ``alpha``
  and innovations from a cross-linked conditional-covariance process.

The two markets are anchored to the equilibrium at the boundary, and the
early segment is generated backward from that anchor, so the joined path
has no artificial jump.

The US leg is written as overlapping futures contract files whose traded
volumes cross over part-way through each overlap; rolling them into a
nearby series recovers the underlying path exactly. The BR leg is written
in local currency per 60-kg bag together with a flat exchange-rate file,
so the unit conversion also round-trips.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import bekk
from .config import SimulateConfig
from .exceptions import ConfigError
from .series import KG_PER_BUSHEL


@dataclass(frozen=True)
class SynthDataset:
    """Paths and true path of a generated dataset."""

    contract_paths: list
    spot_path: str
    fx_path: str
    boundary: np.datetime64
    dates: np.ndarray
    br_log: np.ndarray
    us_log: np.ndarray

    def all_paths(self) -> list:
        return [*self.contract_paths, self.spot_path, self.fx_path]


def _simulate_panel(sim: SimulateConfig):
    """Return (dates, levels) for the joined log-price panel."""
    n = sim.pre_obs + sim.post_obs
    start = np.busday_offset(sim.start_date, 0, roll="forward")
    dates = np.busday_offset(start, np.arange(n), roll="forward")

    root = np.random.SeedSequence(sim.seed)
    ss_pre, ss_post = root.spawn(2)

    anchor = sim.pre_obs - 1
    us_anchor = np.log(sim.us_start_price)
    # equilibrium error br + beta1*us + beta2 is zero at the anchor
    br_anchor = -sim.beta[1] * us_anchor - sim.beta[2]

    levels = np.empty((n, 2))
    levels[anchor] = (br_anchor, us_anchor)

    gamma = sim.lag_coef

    eps_pre = bekk.simulate(sim.bekk_pre, sim.pre_obs - 1, seed=ss_pre)
    r = np.empty_like(eps_pre)
    prev = np.zeros(2)
    for t in range(eps_pre.shape[0]):
        prev = gamma @ prev + eps_pre[t]
        r[t] = prev
    for t in range(anchor, 0, -1):
        levels[t - 1] = levels[t] - r[t - 1]

    eps_post = bekk.simulate(sim.bekk_post, sim.post_obs, seed=ss_post)
    d_prev = levels[anchor] - levels[anchor - 1]
    for i in range(sim.post_obs):
        t = anchor + 1 + i
        y_prev = levels[t - 1]
        z_prev = sim.beta[0] * y_prev[0] + sim.beta[1] * y_prev[1] + sim.beta[2]
        d = sim.alpha * z_prev + gamma @ d_prev + eps_post[i]
        levels[t] = y_prev + d
        d_prev = d
    if not np.all(np.isfinite(levels)):
        raise ConfigError("simulate: generated path is not finite, check alpha/lag_coef")
    return dates, levels


def _contract_windows(n: int, length: int, overlap: int) -> list:
    if length < 2 * overlap + 1:
        raise ConfigError("simulate.contract_days must exceed twice contract_overlap")
    windows = []
    s = 0
    while True:
        e = min(s + length - 1, n - 1)
        windows.append((s, e))
        if e == n - 1:
            break
        s = e - overlap + 1
    return windows

def _contract_volumes(i: int, n_contracts: int, size: int, overlap: int) -> np.ndarray:
    vols = np.full(size, 5000, dtype=np.int64)
    if i > 0:
        vols[:overlap] = 1000 * (np.arange(overlap) + 1)
    if i < n_contracts - 1:
        vols[size - overlap :] = 1000 * (overlap - np.arange(overlap))
    return vols


def _write_rows(path: str, header: str, meta: list, rows) -> None:
    with open(path, "w", newline="") as fh:
        for line in meta:
            fh.write(f"# {line}\n")
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def generate_dataset(sim: SimulateConfig, out_dir: str) -> SynthDataset:
    """Simulate the panel and write all raw input files under out_dir."""
    os.makedirs(out_dir, exist_ok=True)
    dates, levels = _simulate_panel(sim)
    n = dates.shape[0]
    br_log = levels[:, 0]
    us_log = levels[:, 1]
    date_text = np.datetime_as_string(dates, unit="D")

    us_price = np.exp(us_log)
    windows = _contract_windows(n, sim.contract_days, sim.contract_overlap)
    expiries = []
    for _, e in windows:
        expiry = np.datetime64(dates[e], "M")
        if expiries and expiry <= expiries[-1]:
            expiry = expiries[-1] + np.timedelta64(1, "M")
        expiries.append(expiry)
    prefix = sim.commodity[0]
    contract_paths = []
    for i, (s, e) in enumerate(windows):
        cid = f"{prefix}{i + 1:03d}"
        expiry = expiries[i]
        vols = _contract_volumes(i, len(windows), e - s + 1, sim.contract_overlap)
        path = os.path.join(out_dir, f"us_{sim.commodity}_{cid}.csv")
        rows = (
            (date_text[t], f"{us_price[t]:.8f}", str(vols[t - s]))
            for t in range(s, e + 1)
        )
        _write_rows(path, "date,price,volume", [f"contract={cid} expiry={expiry}"], rows)
        contract_paths.append(path)

    bag_factor = sim.kg_per_unit / KG_PER_BUSHEL[sim.commodity]
    br_local = np.exp(br_log) * bag_factor * sim.fx_rate
    spot_path = os.path.join(out_dir, f"br_{sim.commodity}_spot.csv")
    _write_rows(
        spot_path,
        "date,price",
        [f"location=br_{sim.commodity}"],
        ((date_text[t], f"{br_local[t]:.8f}") for t in range(n)),
    )

    fx_path = os.path.join(out_dir, "brl_usd.csv")
    _write_rows(
        fx_path,
        "date,rate",
        [],
        ((date_text[t], f"{sim.fx_rate:.6f}") for t in range(n)),
    )

    return SynthDataset(
        contract_paths=contract_paths,
        spot_path=spot_path,
        fx_path=fx_path,
        boundary=dates[sim.pre_obs],
        dates=dates,
        br_log=br_log,
        us_log=us_log,
    )
