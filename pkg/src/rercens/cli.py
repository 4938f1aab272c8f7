"""Config-driven command-line entry point.

One JSON config document drives every subcommand; unknown keys are rejected so
typos in scientific configs fail loudly.  All outputs land under --out with
fixed filenames and are written atomically (temp file + rename).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict

import numpy as np

from . import __version__
from .bandwidth import BandwidthGrid, cv_select
from .errors import ConfigError
from .experiments import (GridSpec, mc_replicate, rate_study, run_experiment)
from .kernels import KernelSpec
from .regression import EstimatorKind
from .simgen import (ContaminationSpec, Model, OutlierSpec, ScenarioConfig,
                     calibrate_censoring, gen_process)
from .survival import km_censoring_survival

_SCENARIO_KEYS = {"model", "c", "rho", "n", "censor_a", "seed", "outliers",
                  "contamination"}
_EXPERIMENT_KEYS = {"grid", "bandwidth_grid", "R", "kinds", "ns", "target_cp",
                    "mc_n", "h"}


def _require(cond, field, message):
    if not cond:
        raise ConfigError(field, message)


def _check_keys(doc, allowed, context=""):
    for key in doc:
        if key not in allowed:
            prefix = f"{context}." if context else ""
            raise ConfigError(f"{prefix}{key}", "unknown configuration key")


def parse_config(doc: dict) -> dict:
    """Validate the raw JSON document; returns it with defaults materialized."""
    _require(isinstance(doc, dict), "config", "document must be a JSON object")
    _check_keys(doc, _SCENARIO_KEYS | _EXPERIMENT_KEYS)
    out = dict(doc)
    out.setdefault("censor_a", 100.0)  # effectively uncensored by default
    out.setdefault("seed", 0)
    out.setdefault("grid", {"lo": 1.0, "hi": 4.0, "step": 0.05})
    out.setdefault("bandwidth_grid", {"lo": 0.01, "hi": 2.0, "step": 0.01})
    out.setdefault("R", 1)
    out.setdefault("kinds", ["RER_hat", "CR"])
    return out


def build_scenario(doc: dict) -> ScenarioConfig:
    for key in ("model", "c", "rho", "n"):
        _require(key in doc, key, "required field missing")
    try:
        model = Model(doc["model"])
    except ValueError:
        raise ConfigError("model", f"unknown model {doc['model']!r}") from None
    outliers = None
    if doc.get("outliers") is not None:
        o = doc["outliers"]
        _check_keys(o, {"count", "factor", "target"}, "outliers")
        try:
            outliers = OutlierSpec(count=int(o["count"]), factor=float(o["factor"]),
                                   target=o.get("target", "lifetime"))
        except (KeyError, ValueError) as exc:
            raise ConfigError("outliers", str(exc)) from None
    contamination = None
    if doc.get("contamination") is not None:
        ccfg = doc["contamination"]
        _check_keys(ccfg, {"beta", "lambda"}, "contamination")
        try:
            contamination = ContaminationSpec(beta=float(ccfg["beta"]),
                                              lambda_=float(ccfg["lambda"]))
        except (KeyError, ValueError) as exc:
            raise ConfigError("contamination", str(exc)) from None
    try:
        return ScenarioConfig(model=model, c=float(doc["c"]), rho=float(doc["rho"]),
                              n=int(doc["n"]), censor_a=float(doc["censor_a"]),
                              seed=int(doc["seed"]), outliers=outliers,
                              contamination=contamination)
    except ValueError as exc:
        msg = str(exc)
        field = next((k for k in ("rho", "n", "seed", "outlier") if k in msg), "scenario")
        raise ConfigError(field, msg) from None


def _grid_spec(doc, key):
    g = doc[key]
    _check_keys(g, {"lo", "hi", "step"}, key)
    try:
        if key == "grid":
            return GridSpec(float(g["lo"]), float(g["hi"]), float(g["step"]))
        return BandwidthGrid(float(g["lo"]), float(g["hi"]), float(g["step"]))
    except (KeyError, ValueError) as exc:
        raise ConfigError(key, str(exc)) from None


def _kinds(doc):
    try:
        return [EstimatorKind[name] for name in doc["kinds"]]
    except KeyError as exc:
        raise ConfigError("kinds", f"unknown estimator kind {exc}") from None


def atomic_write(path: str, text: str):
    tmp = f"{path}.tmp-{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _write_json(path, obj):
    atomic_write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _csv_to_json_records(text: str):
    lines = text.strip().splitlines()
    header = lines[0].split(",")
    records = []
    for line in lines[1:]:
        rec = {}
        for col, raw in zip(header, line.split(",")):
            rec[col] = None if raw == "" else (float(raw) if _is_number(raw) else raw)
        records.append(rec)
    return records


def _is_number(s):
    try:
        float(s)
        return True
    except ValueError:
        return False


def _emit_table(out_dir, name, csv_text, as_json):
    atomic_write(os.path.join(out_dir, name), csv_text)
    if as_json:
        _write_json(os.path.join(out_dir, name.replace(".csv", ".json")),
                    _csv_to_json_records(csv_text))


def _manifest(out_dir, doc, args, scenario=None):
    manifest = {
        "tool": "rercens",
        "version": __version__,
        "subcommand": args.subcommand,
        "config": doc,
        "seed_override": args.seed,
        "weighted_cv": bool(args.weighted_cv),
        "jobs": args.jobs,
    }
    if scenario is not None:
        manifest["resolved_scenario"] = _scenario_dict(scenario)
    _write_json(os.path.join(out_dir, "manifest.json"), manifest)


def _scenario_dict(s: ScenarioConfig):
    d = {"model": s.model.value, "c": s.c, "rho": s.rho, "n": s.n,
         "censor_a": s.censor_a, "seed": s.seed}
    if s.outliers:
        d["outliers"] = {"count": s.outliers.count, "factor": s.outliers.factor,
                         "target": s.outliers.target}
    if s.contamination:
        d["contamination"] = {"beta": s.contamination.beta,
                              "lambda": s.contamination.lambda_}
    return d


def _cmd_simulate(doc, args, out_dir):
    scenario = build_scenario(doc)
    data = gen_process(scenario)
    _emit_table(out_dir, "data.csv", data.to_csv(), args.format == "json")
    _manifest(out_dir, doc, args, scenario)
    return 0


def _cmd_estimate(doc, args, out_dir):
    scenario = build_scenario(doc)
    data = gen_process(scenario)
    sample = data.to_sample()
    gbar = km_censoring_survival(sample)
    kinds = _kinds(doc)
    spec = KernelSpec()
    if doc.get("h") is not None:
        h = float(doc["h"])
    else:
        h, _, _ = cv_select(sample, gbar, spec, _grid_spec(doc, "bandwidth_grid"),
                            weighted=args.weighted_cv)
    from .experiments import DEFAULT_GRID  # noqa: F401 (kept local to cli flow)
    from .regression import evaluate_on_grid
    from .simgen import true_censoring_survival, true_regression

    pts = _grid_spec(doc, "grid").points().reshape(-1, 1)
    truth = true_regression(scenario.model, scenario.c, scenario.rho, pts[:, 0])
    gbar_true = (true_censoring_survival(scenario.censor_a)
                 if EstimatorKind.RER_pseudo in kinds else None)
    grid = evaluate_on_grid(sample, gbar, spec, h, pts, kinds, truth=truth,
                            gbar_true=gbar_true)
    _emit_table(out_dir, "grid.csv", grid.to_csv(), args.format == "json")
    _emit_table(out_dir, "gbar.csv", gbar.to_csv(), args.format == "json")
    _manifest(out_dir, doc, args, scenario)
    return 0


def _cmd_cv(doc, args, out_dir):
    scenario = build_scenario(doc)
    data = gen_process(scenario)
    sample = data.to_sample()
    gbar = km_censoring_survival(sample)
    grid = _grid_spec(doc, "bandwidth_grid")
    h_opt, cv_values, skipped = cv_select(sample, gbar, KernelSpec(), grid,
                                          weighted=args.weighted_cv)
    lines = ["h,cv,n_skipped"]
    for h, cv, sk in zip(grid.values(), cv_values, skipped):
        cv_txt = "" if np.isnan(cv) else f"{cv:.17g}"
        lines.append(f"{h:.17g},{cv_txt},{sk}")
    _emit_table(out_dir, "cv_curve.csv", "\n".join(lines) + "\n",
                args.format == "json")
    _write_json(os.path.join(out_dir, "summary.json"), {"h_opt": h_opt})
    _manifest(out_dir, doc, args, scenario)
    return 0


def _cmd_experiment(doc, args, out_dir):
    scenario = build_scenario(doc)
    result = run_experiment(scenario, _grid_spec(doc, "grid"),
                            _grid_spec(doc, "bandwidth_grid"), _kinds(doc),
                            weighted_cv=args.weighted_cv)
    _emit_table(out_dir, "grid.csv", result.grid.to_csv(), args.format == "json")
    _write_json(os.path.join(out_dir, "summary.json"), {
        "h_opt": result.h_opt,
        "realized_cp": result.realized_cp,
        "wall_time_ms": result.wall_time_ms,
        "sup_error": {k.name: v for k, v in result.sup_error.items()},
        "iae": {k.name: v for k, v in result.iae.items()},
    })
    _manifest(out_dir, doc, args, scenario)
    return 0


def _cmd_compare(doc, args, out_dir):
    scenario = build_scenario(doc)
    kinds = _kinds(doc)
    if EstimatorKind.CR not in kinds:
        kinds = kinds + [EstimatorKind.CR]
    summary, results = mc_replicate(scenario, int(doc["R"]),
                                    _grid_spec(doc, "grid"),
                                    _grid_spec(doc, "bandwidth_grid"), kinds,
                                    weighted_cv=args.weighted_cv, jobs=args.jobs)
    lines = ["replicate,kind,sup_error,iae,h_opt,realized_cp"]
    for r, res in enumerate(results):
        for k in kinds:
            lines.append(f"{r},{k.name},{res.sup_error[k]:.17g},"
                         f"{res.iae[k]:.17g},{res.h_opt:.17g},"
                         f"{res.realized_cp:.17g}")
    _emit_table(out_dir, "replicates.csv", "\n".join(lines) + "\n",
                args.format == "json")
    summary["per_kind"] = summary["per_kind"]
    _write_json(os.path.join(out_dir, "summary.json"), summary)
    _manifest(out_dir, doc, args, scenario)
    return 0


def _cmd_rate(doc, args, out_dir):
    scenario = build_scenario(doc)
    _require("ns" in doc, "ns", "required field missing for rate study")
    result = rate_study(scenario, doc["ns"], int(doc["R"]),
                        _grid_spec(doc, "grid"))
    _write_json(os.path.join(out_dir, "rate.json"), {
        "ns": result.ns,
        "median_sup_errors": result.median_sup_errors,
        "slope": result.slope,
    })
    _manifest(out_dir, doc, args, scenario)
    return 0


def _cmd_calibrate(doc, args, out_dir):
    scenario_keys_present = all(k in doc for k in ("model", "c", "rho"))
    _require(scenario_keys_present, "model", "calibrate needs model, c and rho")
    _require("target_cp" in doc, "target_cp", "required field missing")
    try:
        model = Model(doc["model"])
    except ValueError:
        raise ConfigError("model", f"unknown model {doc['model']!r}") from None
    contamination = None
    if doc.get("contamination") is not None:
        contamination = ContaminationSpec(beta=float(doc["contamination"]["beta"]),
                                          lambda_=float(doc["contamination"]["lambda"]))
    a = calibrate_censoring(model, float(doc["c"]), float(doc["rho"]),
                            float(doc["target_cp"]), int(doc.get("mc_n", 10000)),
                            seed=int(doc["seed"]), contamination=contamination)
    _write_json(os.path.join(out_dir, "summary.json"),
                {"censor_a": a, "target_cp": doc["target_cp"]})
    _manifest(out_dir, doc, args)
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "estimate": _cmd_estimate,
    "cv": _cmd_cv,
    "experiment": _cmd_experiment,
    "rate": _cmd_rate,
    "compare": _cmd_compare,
    "calibrate": _cmd_calibrate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rercens",
                                     description=__doc__.splitlines()[0])
    parser.add_argument("subcommand", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True, help="JSON config path")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--jobs", type=int, default=1,
                        help="parallelism cap for replicates")
    parser.add_argument("--weighted-cv", action="store_true",
                        help="use IPCW-weighted cross-validation")
    parser.add_argument("--quiet", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.config, encoding="utf-8") as fh:
            raw = json.load(fh)
        doc = parse_config(raw)
        if args.seed is not None:
            doc["seed"] = args.seed
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"error: invalid config: {exc}", file=sys.stderr)
        return 2
    os.makedirs(args.out, exist_ok=True)
    try:
        code = _COMMANDS[args.subcommand](doc, args, args.out)
    except ConfigError as exc:
        print(f"error: invalid config: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - runtime failure contract
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if not args.quiet:
        print(f"{args.subcommand}: outputs written to {args.out}")
    return code


if __name__ == "__main__":
    sys.exit(main())
