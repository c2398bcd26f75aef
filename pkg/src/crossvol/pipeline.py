"""End-to-end orchestration of the two-market volatility study.

``run`` drives, for every configured pair: raw loading, nearby
construction, currency conversion, alignment, the subperiod split, and
then per subperiod the integration checks, the trace test, the mean
model chosen by cointegration rank, the conditional-covariance fit and
the spillover exports. Pairs and subperiods execute concurrently; a
failure in one pair is recorded and the others still complete.

``simulate`` materializes the bundled synthetic dataset. ``summarize``
turns a finished run report back into fixed-width text tables.

All output paths inside the report are relative to the output directory,
so a report plus its directory relocate together and repeated runs are
byte-comparable.
"""

from __future__ import annotations

import glob
import json
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .bekk import BekkGarch
from .cointegration import johansen_test
from .config import PairConfig, PipelineConfig, SideConfig
from .exceptions import (
    ConfigError,
    CrossvolError,
    DataError,
    EstimationError,
)
from .meanmodel import ErrorCorrectionModel, VectorAutoregression, select_lag_bic
from .reporting import (
    bekk_report,
    bekk_table,
    cointegration_table,
    coefficient_table,
    mean_model_report,
    summary_stats,
    summary_table,
)
from .series import (
    align,
    build_nearby,
    convert_to_usd_per_bushel,
    load_series,
    read_panel_csv,
    returns,
    split_subperiods,
    write_panel_csv,
)
from .spillover import compute_spillovers, decompose, export_spillover
from .synth import generate_dataset
from .unitroot import integration_order

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_ESTIMATION = 2
EXIT_INTERNAL = 3

OUT_DIR_ENV = "CROSSVOL_OUT_DIR"

SUBPERIODS = ("Pre", "Post")


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, (ConfigError, DataError)):
        return EXIT_INPUT
    if isinstance(exc, EstimationError):
        return EXIT_ESTIMATION
    return EXIT_INTERNAL


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, np.datetime64):
        return str(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def resolve_out_dir(cfg: PipelineConfig, override: str | None = None) -> str:
    """Output directory priority: explicit override, environment, config."""
    if override:
        return override
    env = os.environ.get(OUT_DIR_ENV)
    if env:
        return env
    return cfg.resolve(cfg.out_dir)


def _expand_side(cfg: PipelineConfig, pair: str, side_name: str, side: SideConfig) -> SideConfig:
    contracts = []
    for entry in side.contracts:
        resolved = cfg.resolve(entry)
        if glob.has_magic(resolved):
            matches = sorted(glob.glob(resolved))
            if not matches:
                raise DataError(f"pair.{pair}.{side_name}.contracts: no files match {resolved}")
            contracts.extend(matches)
        else:
            contracts.append(resolved)
    return SideConfig(
        spot=cfg.resolve(side.spot) if side.spot else None,
        contracts=contracts,
        fx=cfg.resolve(side.fx) if side.fx else None,
        kg_per_unit=side.kg_per_unit,
    )


def _check_inputs(cfg: PipelineConfig) -> dict:
    """Resolve every input path up front so nothing is written on bad input."""
    expanded = {}
    for pair in cfg.pairs:
        sides = {}
        for side_name in ("br", "us"):
            side = _expand_side(cfg, pair.name, side_name, getattr(pair, side_name))
            for path in side.input_paths():
                if not os.path.isfile(path):
                    raise DataError(f"pair.{pair.name}.{side_name}: input file not found: {path}")
            sides[side_name] = side
        expanded[pair.name] = sides
    return expanded


def _load_side(pair: PairConfig, name: str, side: SideConfig, stale_days: int):
    if side.contracts:
        contracts = [load_series(p, "contract") for p in side.contracts]
        series = build_nearby(contracts, label=f"{pair.name}_{name}")
    else:
        series = load_series(side.spot, "spot")
    if side.fx:
        fx = load_series(side.fx, "fx")
        series = convert_to_usd_per_bushel(
            series,
            fx,
            kg_per_local_unit=side.kg_per_unit,
            kg_per_bushel=pair.kg_per_bushel,
            stale_limit=stale_days,
            on_missing="drop",
        )
    return series


def _analyze_subperiod(panel, cfg: PipelineConfig, pair_name: str, out_dir: str) -> tuple:
    """Run tests, mean model, covariance fit and spillovers on one segment."""
    name = panel.subperiod
    r = returns(panel)
    integration = integration_order(panel, level=cfg.level)
    lags = select_lag_bic(r, max_lag=cfg.max_lag)
    jo = johansen_test(panel, lags=lags, level=cfg.level)
    if jo.rank >= 1:
        model = ErrorCorrectionModel(lags=lags, beta=jo.beta, dummy=cfg.dummy, label=name)
        model.fit(panel)
        kind = "VECM"
    else:
        model = VectorAutoregression(lags=lags, dummy=cfg.dummy, label=name)
        model.fit(r)
        kind = "VAR"
    resid_dates, resid = model.residuals()

    est = BekkGarch(max_iter=cfg.bekk.max_iter, gtol=cfg.bekk.gtol, ftol=cfg.bekk.ftol)
    est.fit(resid, dates=resid_dates)
    est.require_convergence()

    d = decompose(est.params_, est.path_, resid)
    spill = compute_spillovers(est.params_, est.path_, resid, label=name)

    cov_name = f"{pair_name}_{name.lower()}_cov.csv"
    est.path_.to_csv(os.path.join(out_dir, cov_name))

    record = {
        "subperiod": name,
        "nobs": len(panel),
        "start": str(panel.dates[0]),
        "end": str(panel.dates[-1]),
        "integration": integration,
        "lags": lags,
        "johansen": jo.to_dict(),
        "model_kind": kind,
        "mean_model": mean_model_report(model),
        "bekk": {
            "params": est.params_.to_dict(),
            "loglik": est.loglik_,
            "n_iter": est.n_iter_,
            "spectral_radius": est.params_.spectral_radius(),
            "table": bekk_report(est),
        },
        "spillover": {
            "mean_us_to_br": float(spill.sr_us_to_br.mean()),
            "mean_br_to_us": float(spill.sr_br_to_us.mean()),
            "max_us_to_br": float(spill.sr_us_to_br.max()),
            "max_br_to_us": float(spill.sr_br_to_us.max()),
            "n": len(spill),
        },
        "outputs": {"covariance": cov_name},
    }
    return record, (spill, d)


def _process_pair(pair: PairConfig, sides: dict, cfg: PipelineConfig, out_dir: str) -> dict:
    br = _load_side(pair, "br", sides["br"], cfg.stale_days)
    us = _load_side(pair, "us", sides["us"], cfg.stale_days)
    panel = align(br, us)
    panel_name = f"{pair.name}_panel.csv"
    write_panel_csv(panel, os.path.join(out_dir, panel_name))
    pre, post = split_subperiods(panel, cfg.cut_date)

    with ThreadPoolExecutor(max_workers=2) as pool:
        futures = [
            pool.submit(_analyze_subperiod, seg, cfg, pair.name, out_dir)
            for seg in (pre, post)
        ]
        results = [f.result() for f in futures]

    spill_paths = export_spillover(
        [artifacts for _, artifacts in results],
        out_dir,
        stem=pair.name,
        boundary=cfg.cut_date,
        ylim=cfg.plot_ylim,
        smooth_window=cfg.smooth_window,
    )
    return {
        "commodity": pair.commodity,
        "kg_per_bushel": pair.kg_per_bushel,
        "outputs": {
            "panel": panel_name,
            "spillover": os.path.basename(spill_paths["ratios"]),
            "decomposition": os.path.basename(spill_paths["decomposition"]),
            "figure": os.path.basename(spill_paths["plot"]),
        },
        "subperiods": {rec["subperiod"]: rec for rec, _ in results},
    }


def run(cfg: PipelineConfig, out_dir: str | None = None) -> tuple[dict, int]:
    """Execute the full study; returns (report, exit_code).

    The report is also written to ``report.json`` in the output
    directory. A failing pair is recorded under its name with an
    ``error`` entry while the remaining pairs complete.
    """
    if not cfg.pairs:
        raise ConfigError("config defines no pairs")
    out = resolve_out_dir(cfg, out_dir)
    expanded = _check_inputs(cfg)
    os.makedirs(out, exist_ok=True)

    names = sorted(expanded)
    with ThreadPoolExecutor(max_workers=min(4, len(names))) as pool:
        futures = {
            name: pool.submit(
                _process_pair,
                next(p for p in cfg.pairs if p.name == name),
                expanded[name],
                cfg,
                out,
            )
            for name in names
        }
        pairs = {}
        exit_code = EXIT_OK
        for name in names:
            try:
                pairs[name] = futures[name].result()
            except CrossvolError as exc:
                pairs[name] = {"error": {"type": type(exc).__name__, "message": str(exc)}}
                exit_code = max(exit_code, exit_code_for(exc))
            except Exception as exc:  # pragma: no cover - defensive
                pairs[name] = {"error": {"type": type(exc).__name__, "message": str(exc)}}
                exit_code = max(exit_code, EXIT_INTERNAL)

    report = {
        "version": __version__,
        "config": dict(cfg.raw),
        "config_source": os.path.basename(cfg.source),
        "seed": cfg.seed,
        "cut_date": str(cfg.cut_date),
        "level": cfg.level,
        "pairs": pairs,
    }
    report_path = os.path.join(out, "report.json")
    with open(report_path, "w") as fh:
        json.dump(_jsonable(report), fh, indent=2)
        fh.write("\n")
    return report, exit_code


def simulate(cfg: PipelineConfig, out_dir: str | None = None) -> dict:
    """Generate the synthetic dataset described by the config's simulate
    section; returns a manifest of written files."""
    if cfg.simulate is None:
        raise ConfigError("config has no simulate.* section")
    target = out_dir or cfg.resolve(cfg.simulate.out_dir)
    ds = generate_dataset(cfg.simulate, target)
    return {
        "out_dir": target,
        "files": [os.path.basename(p) for p in ds.all_paths()],
        "n_contracts": len(ds.contract_paths),
        "observations": int(ds.dates.shape[0]),
        "first_date": str(ds.dates[0]),
        "boundary": str(ds.boundary),
        "last_date": str(ds.dates[-1]),
    }


def _commodity_sort_key(item):
    name, record = item
    return (record.get("commodity") or "~", name)


def summarize(report_path) -> str:
    """Render a run report as the study's four fixed-width tables."""
    try:
        with open(report_path, "r") as fh:
            report = json.load(fh)
    except FileNotFoundError:
        raise DataError(f"report not found: {report_path}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"unreadable report {report_path}: {exc}") from None
    out_dir = os.path.dirname(os.path.abspath(report_path))

    ok_pairs = [
        (name, rec)
        for name, rec in sorted(report.get("pairs", {}).items(), key=_commodity_sort_key)
        if "error" not in rec
    ]

    stat_rows = []
    for name, rec in ok_pairs:
        panel = read_panel_csv(os.path.join(out_dir, rec["outputs"]["panel"]))
        r = returns(panel)
        stat_rows.append((f"{name} br", summary_stats(r.dbr)))
        stat_rows.append((f"{name} us", summary_stats(r.dus)))

    coint_rows = []
    model_rows = []
    bekk_rows = []
    for name, rec in ok_pairs:
        for sub in SUBPERIODS:
            srec = rec["subperiods"].get(sub)
            if srec is None:
                continue
            label = f"{name} {sub}"
            coint_rows.append((label, srec["johansen"]))
            model_rows.append((f"{label} ({srec['model_kind']})", srec["mean_model"]))
            bekk_rows.append((label, srec["bekk"]["table"]))

    sections = [summary_table(stat_rows)]
    if coint_rows:
        sections.append(cointegration_table(coint_rows))
    if model_rows:
        sections.append(coefficient_table(model_rows))
    if bekk_rows:
        sections.append(bekk_table(bekk_rows))

    failed = [
        (name, rec["error"]) for name, rec in sorted(report.get("pairs", {}).items())
        if "error" in rec
    ]
    for name, err in failed:
        sections.append(f"pair {name}: {err['type']}: {err['message']}")
    return "\n\n".join(sections) + "\n"
