"""Command-line front end: fit, predict, reproduce published tables, run the
mining demo, list datasets, serve the HTTP API.

Exit codes: 0 ok, 1 usage, 2 data/model error, 3 convergence warning
(escalated to 2 under --strict).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import dataio, mining, predictive, reality, regression
from .dataio import canonical_json
from .distributions import RandomStream
from .errors import ConvergenceError, EcbayesError

USAGE_ERROR = 1
DATA_ERROR = 2
CONVERGENCE_SOFT = 3

TABLE1_EXPECTED = (("beta0", 1.23, 0.46), ("beta1", 12.06, 2.62), ("sigma", 0.59, 0.12))
TABLE1_RHO = -0.95
TABLE2_EXPECTED = {
    "virtually_certain": {0.66: (2.19, 3.43), 0.90: (1.59, 4.04), 0.95: (1.23, 4.36)},
    "very_likely": {0.66: (2.09, 3.53), 0.90: (1.36, 4.28), 0.95: (0.91, 4.70)},
    "likely": {0.66: (1.81, 3.79), 0.90: (0.81, 4.75), 0.95: (0.20, 5.35)},
    "coin_flip": {0.66: (1.56, 4.05), 0.90: (0.32, 5.25), 0.95: (-0.45, 5.97)},
}
TABLE4_EXPECTED = {
    "sherwood": {"reference": (3.59, 5.02), "virtually_certain": (3.42, 5.18),
                 "very_likely": (3.19, 5.48), "likely": (2.61, 6.04)},
    "brient_schneider": {"reference": (3.10, 4.31), "virtually_certain": (3.06, 4.37),
                         "very_likely": (2.90, 4.55), "likely": (2.52, 4.88)},
    "tian": {"reference": (2.66, 4.14), "virtually_certain": (2.65, 4.17),
             "very_likely": (2.56, 4.25), "likely": (2.27, 4.54)},
    "zhai": {"reference": (2.52, 4.33), "virtually_certain": (2.52, 4.33),
             "very_likely": (2.53, 4.30), "likely": (2.48, 4.35)},
}
TABLE2_TOL = 0.06
TABLE4_TOL = 0.06
TABLE4_SIGNS = {"sherwood": "positive", "brient_schneider": "negative",
                "tian": "positive", "zhai": "negative"}


@dataclass
class CommandOutcome:
    exit_code: int
    payload_path: str = ""
    warnings: list[str] = field(default_factory=list)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def _parse_floats(text: str, what: str, counts: tuple[int, ...]) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise SystemExit_usage(f"{what} must be comma-separated numbers, got {text!r}")
    if len(vals) not in counts:
        raise SystemExit_usage(
            f"{what} expects {' or '.join(map(str, counts))} values, got {len(vals)}")
    return vals


def SystemExit_usage(message: str) -> SystemExit:
    print(f"error: {message}", file=sys.stderr)
    return SystemExit(USAGE_ERROR)


def _data_dir(args) -> Path:
    return Path(getattr(args, "data", None) or os.environ.get("EC_DATA_DIR", "data"))


def _model_prior(args) -> regression.ModelPrior:
    if args.prior == "reference":
        return regression.ModelPrior.reference()
    mu = _parse_floats(args.mu, "--mu", (2,))
    sb = _parse_floats(args.Sb, "--Sb", (2,))
    if args.sigma_s is None:
        raise SystemExit_usage("subjective prior requires --sigma-s")
    return regression.ModelPrior.subjective(mu, np.diag(sb), args.sigma_s)


def _fit(ensemble, args):
    rng = RandomStream(args.seed, stream=0)
    prior = _model_prior(args)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if prior.kind == "reference":
            post = regression.fit_reference(ensemble, draws=args.draws, rng=rng)
        else:
            post = regression.fit_subjective(ensemble, prior, draws=args.draws,
                                             chains=args.chains, rng=rng,
                                             workers=args.workers)
    notes = [str(w.message) for w in caught]
    return post, notes


def _print_summary(summary: regression.PosteriorSummary) -> None:
    print(f"{'parameter':<10}{'mean':>10}{'sd':>10}")
    print(f"{'beta0':<10}{summary.beta0_hat:>10.4f}{summary.sd_beta0:>10.4f}")
    print(f"{'beta1':<10}{summary.beta1_hat:>10.4f}{summary.sd_beta1:>10.4f}")
    print(f"{'sigma':<10}{summary.sigma_mean:>10.4f}{summary.sigma_sd:>10.4f}")
    print(f"coefficient correlation: {summary.rho:.4f}")


def _write_payload(path: Path, doc: dict, fmt: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        path.write_text(canonical_json(doc) + "\n", encoding="utf-8")
    else:
        flat = _flatten(doc)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["key", "value"])
            for key, value in flat:
                writer.writerow([key, value])


def _flatten(doc, prefix="") -> list[tuple[str, str]]:
    rows: list[tuple[str, str]] = []
    if isinstance(doc, dict):
        for k in sorted(doc):
            rows.extend(_flatten(doc[k], f"{prefix}{k}." if prefix else f"{k}."))
    elif isinstance(doc, list):
        for i, v in enumerate(doc):
            rows.extend(_flatten(v, f"{prefix}{i}."))
    else:
        rows.append((prefix[:-1], repr(doc) if isinstance(doc, float) else str(doc)))
    return rows


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_fit(args) -> CommandOutcome:
    ensemble = dataio.load_ensemble_csv(args.ensemble)
    post, notes = _fit(ensemble, args)
    summary = regression.summarize(post)
    shape = regression.laplace_check(post)
    doc = {
        "summary": summary.to_json_dict(),
        "laplace": {"skewness": shape.skewness,
                    "excess_kurtosis": shape.excess_kurtosis,
                    "normal_flag": shape.normal_flag},
        "diagnostics": post.diagnostics,
        "draws": post.n_draws,
        "seed": args.seed,
    }
    out = Path(args.out)
    _write_payload(out, doc, args.format)
    _print_summary(summary)
    if args.dump_draws:
        with open(args.dump_draws, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["beta0", "beta1", "sigma"])
            for row in post.draws:
                writer.writerow([repr(float(v)) for v in row])
    for note in notes:
        print(f"warning: {note}", file=sys.stderr)
    soft = post.diagnostics and post.diagnostics.get("warnings")
    code = CONVERGENCE_SOFT if soft else 0
    if soft and args.strict:
        code = DATA_ERROR
    return CommandOutcome(code, str(out), notes)


def _reality_spec(args) -> reality.RealitySpec:
    if args.reality == "collapsed":
        return reality.RealitySpec.collapsed()
    if args.reality == "manual":
        if args.Sb_star is None or args.xi is None:
            raise SystemExit_usage("manual reality requires --Sb-star and --xi")
        vals = _parse_floats(args.Sb_star, "--Sb-star", (2, 3))
        off = vals[2] if len(vals) == 3 else 0.0
        return reality.RealitySpec.manual(
            np.array([[vals[0], off], [off, vals[1]]]), args.xi)
    if args.confidence is None and args.alpha is None:
        raise SystemExit_usage("guided reality requires --confidence or --alpha")
    if args.mu_y is None or args.sigma_y is None:
        raise SystemExit_usage("guided reality requires --mu-y and --sigma-y")
    level = (reality.ConfidenceLevel.custom(args.alpha) if args.alpha is not None
             else reality.ConfidenceLevel.from_label(args.confidence))
    return reality.RealitySpec.guided(reality.GuidedJudgements(
        level, mu_y_star=args.mu_y, sigma_y_star=args.sigma_y,
        constraint_sign=args.sign))


def _resolve_ensemble(args) -> tuple[dataio.Ensemble, dataio.CatalogEntry | None]:
    if args.ensemble:
        return dataio.load_ensemble_csv(args.ensemble), None
    if not args.builtin:
        raise SystemExit_usage("provide --ensemble PATH or --builtin NAME")
    entry = dataio.catalog_lookup(args.builtin)
    if args.builtin == "cox" and args.synthetic_cox:
        return dataio.cox_like_ensemble(), entry
    path = _data_dir(args) / f"{entry.name}.csv"
    if not path.exists():
        raise FileNotFoundError(
            f"external data required: {path} not found (set EC_DATA_DIR or --data; "
            "for a synthetic stand-in of 'cox' pass --synthetic-cox)")
    return dataio.load_ensemble_csv(path), entry


def cmd_predict(args) -> CommandOutcome:
    ensemble, entry = _resolve_ensemble(args)
    if args.z is not None or args.sigma_z is not None:
        if args.z is None or args.sigma_z is None:
            raise SystemExit_usage("--z and --sigma-z must be given together")
        obs = dataio.ObservationSpec(args.z, args.sigma_z)
    elif entry is not None:
        obs = entry.observation
    else:
        raise SystemExit_usage("custom ensembles require --z and --sigma-z")

    if args.x_prior == "normal":
        mu_x, sigma_x = args.mu_x, args.sigma_x
        if (mu_x is None or sigma_x is None) and entry is not None \
                and entry.predictor_prior.kind == "normal":
            mu_x = entry.predictor_prior.mu_x if mu_x is None else mu_x
            sigma_x = entry.predictor_prior.sigma_x if sigma_x is None else sigma_x
        if mu_x is None or sigma_x is None:
            raise SystemExit_usage("--x-prior normal requires --mu-x and --sigma-x")
        predictor_prior = dataio.PredictorPrior.normal(mu_x, sigma_x)
    else:
        predictor_prior = dataio.PredictorPrior.flat()

    levels = tuple(_parse_floats(args.levels, "--levels", (1, 2, 3, 4, 5)))
    cfg = dataio.AnalysisConfig(
        observation=obs, model_prior=_model_prior(args),
        reality=_reality_spec(args), predictor_prior=predictor_prior,
        sampler=dataio.SamplerSettings(args.draws, args.chains, args.seed),
        levels=levels, interval_method="hdi" if args.hdi else "equal_tailed")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        result = predictive.run_constraint(cfg, ensemble)
    notes = [str(w.message) for w in caught]

    out = Path(args.out)
    _write_payload(out, result.to_json_dict(), args.format)
    if args.density_csv:
        with open(args.density_csv, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["y", "density"])
            for xval, dval in result.density:
                writer.writerow([repr(float(xval)), repr(float(dval))])
    print(f"median: {result.median:.4f}")
    for lv in levels:
        lo, hi = result.intervals[lv]
        print(f"{int(round(lv * 100))}% interval: [{lo:.4f}, {hi:.4f}]")
    for note in notes:
        print(f"warning: {note}", file=sys.stderr)
    return CommandOutcome(0, str(out), notes)


def _compare(label: str, got: float, expected: float, tol: float) -> tuple[bool, str]:
    ok = abs(got - expected) <= tol
    mark = "PASS" if ok else "FAIL"
    return ok, (f"  [{mark}] {label}: computed {got:+.4f}, published {expected:+.4f}, "
                f"tolerance {tol}")


def _reproduce_table1(args, lines: list[str]) -> bool:
    ensemble = _table_ensemble("cox", args, lines)
    if ensemble is None:
        return False
    post, _ = _fit_reference_for_tables(ensemble, args)
    s = regression.summarize(post)
    got = {"beta0": (s.beta0_hat, s.sd_beta0), "beta1": (s.beta1_hat, s.sd_beta1),
           "sigma": (s.sigma_mean, s.sigma_sd)}
    all_ok = True
    lines.append("table 1: posterior means and sds (tolerance 0.02; correlation 0.01)")
    for name, mean, sd in TABLE1_EXPECTED:
        ok1, msg1 = _compare(f"{name} mean", got[name][0], mean, 0.02)
        ok2, msg2 = _compare(f"{name} sd", got[name][1], sd, 0.02)
        lines.extend((msg1, msg2))
        all_ok &= ok1 and ok2
    ok3, msg3 = _compare("rho", s.rho, TABLE1_RHO, 0.01)
    lines.append(msg3)
    return all_ok and ok3


def _fit_reference_for_tables(ensemble, args):
    rng = RandomStream(args.seed, stream=0)
    post = regression.fit_reference(ensemble, draws=args.draws, rng=rng)
    return post, regression.summarize(post)


def _table_ensemble(name: str, args, lines: list[str]):
    if name == "cox" and args.synthetic_cox:
        lines.append("  note: using the synthetic stand-in ensemble for 'cox'")
        return dataio.cox_like_ensemble()
    path = _data_dir(args) / f"{name}.csv"
    if not path.exists():
        lines.append(f"  [SKIP] {name}: external data required ({path} missing)")
        return None
    return dataio.load_ensemble_csv(path)


def _predict_for_table(ensemble, entry, spec, args, levels):
    cfg = dataio.AnalysisConfig(
        observation=entry.observation, model_prior=regression.ModelPrior.reference(),
        reality=spec, predictor_prior=entry.predictor_prior,
        sampler=dataio.SamplerSettings(args.draws, 4, args.seed), levels=levels)
    return predictive.run_constraint(cfg, ensemble)


def _reproduce_table2(args, lines: list[str]) -> bool:
    ensemble = _table_ensemble("cox", args, lines)
    if ensemble is None:
        return False
    entry = dataio.catalog_lookup("cox")
    lines.append(f"table 2: prediction intervals, 4 confidence levels "
                 f"(tolerance {TABLE2_TOL})")
    all_ok = True
    for label, expected in TABLE2_EXPECTED.items():
        spec = reality.RealitySpec.guided(reality.GuidedJudgements(
            reality.ConfidenceLevel.from_label(label), mu_y_star=3.0,
            sigma_y_star=1.5))
        result = _predict_for_table(ensemble, entry, spec, args, (0.66, 0.90, 0.95))
        for lv, (elo, ehi) in expected.items():
            lo, hi = result.intervals[lv]
            ok1, msg1 = _compare(f"{label} {int(lv * 100)}% lo", lo, elo, TABLE2_TOL)
            ok2, msg2 = _compare(f"{label} {int(lv * 100)}% hi", hi, ehi, TABLE2_TOL)
            lines.extend((msg1, msg2))
            all_ok &= ok1 and ok2
    return all_ok


def _reproduce_table4(args, lines: list[str]) -> tuple[bool, bool]:
    lines.append(f"table 4: 66% intervals for the four published constraints "
                 f"(tolerance {TABLE4_TOL})")
    all_ok = True
    any_ran = False
    for name, rows in TABLE4_EXPECTED.items():
        ensemble = _table_ensemble(name, args, lines)
        if ensemble is None:
            continue
        any_ran = True
        entry = dataio.catalog_lookup(name)
        for label, (elo, ehi) in rows.items():
            if label == "reference":
                spec = reality.RealitySpec.collapsed()
            else:
                spec = reality.RealitySpec.guided(reality.GuidedJudgements(
                    reality.ConfidenceLevel.from_label(label), mu_y_star=3.0,
                    sigma_y_star=1.5, constraint_sign=TABLE4_SIGNS[name]))
            result = _predict_for_table(ensemble, entry, spec, args, (0.66,))
            lo, hi = result.intervals[0.66]
            ok1, msg1 = _compare(f"{name} {label} lo", lo, elo, TABLE4_TOL)
            ok2, msg2 = _compare(f"{name} {label} hi", hi, ehi, TABLE4_TOL)
            lines.extend((msg1, msg2))
            all_ok &= ok1 and ok2
    return all_ok, any_ran


def cmd_reproduce(args) -> CommandOutcome:
    lines: list[str] = []
    missing_is_error = False
    if args.table == 1:
        ok = _reproduce_table1(args, lines)
        ran = any("SKIP" not in ln for ln in lines[1:]) and len(lines) > 1
    elif args.table == 2:
        ok = _reproduce_table2(args, lines)
        ran = len(lines) > 1
    else:
        ok, ran = _reproduce_table4(args, lines)
        missing_is_error = not ran
    print("\n".join(lines))
    skips = [ln for ln in lines if "[SKIP]" in ln]
    if not ran or (args.table != 4 and skips):
        print("external data required: supply ensemble CSVs via --data/EC_DATA_DIR "
              "(or --synthetic-cox for the cox stand-in)")
        return CommandOutcome(DATA_ERROR, "", [s.strip() for s in skips])
    if args.out:
        Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    code = 0 if ok else DATA_ERROR
    if missing_is_error:
        code = DATA_ERROR
    return CommandOutcome(code, args.out or "", [s.strip() for s in skips])


def cmd_mine(args) -> CommandOutcome:
    cfg = mining.MiningConfig(members=args.members, outputs=args.outputs,
                              mode=args.mode, seed=args.seed,
                              inject_duplicate=args.inject_duplicate)
    start = time.time()
    result = mining.correlation_mining_demo(cfg)
    elapsed = time.time() - start
    doc = result.to_json_dict()
    doc["elapsed_seconds"] = round(elapsed, 3)
    doc["members"] = cfg.members
    doc["outputs"] = cfg.outputs
    doc["seed"] = cfg.seed
    out = Path(args.out)
    _write_payload(out, doc, args.format)
    print(f"mode {result.mode}: max |corr| = {result.max_abs_corr:.6f} at columns "
          f"{result.argmax} ({elapsed:.1f}s)")
    return CommandOutcome(0, str(out))


def cmd_datasets(args) -> CommandOutcome:
    doc = [{"name": c.name, "z": c.observation.z, "sigma_z": c.observation.sigma_z,
            "predictor_prior": ({"kind": "flat"} if c.predictor_prior.kind == "flat"
                                else {"kind": "normal", "mu_x": c.predictor_prior.mu_x,
                                      "sigma_x": c.predictor_prior.sigma_x}),
            "notes": c.notes} for c in dataio.builtin_catalog()]
    print(canonical_json(doc))
    return CommandOutcome(0)


def cmd_serve(args) -> CommandOutcome:
    import uvicorn

    from .service import create_app
    if args.data:
        os.environ["EC_DATA_DIR"] = args.data
    uvicorn.run(create_app(), host=args.host, port=args.port)
    return CommandOutcome(0)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_sampler_flags(p: argparse.ArgumentParser, draws: int = 20000) -> None:
    p.add_argument("--draws", type=int, default=draws)
    p.add_argument("--chains", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)


def _add_prior_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--prior", choices=("reference", "subjective"), default="reference")
    p.add_argument("--mu", default="0,0", help="subjective prior mean, e.g. 0,0")
    p.add_argument("--Sb", default=None,
                   help="subjective prior variance diagonal, e.g. 25,1156")
    p.add_argument("--sigma-s", dest="sigma_s", type=float, default=None,
                   help="half-normal prior scale on the residual sd")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ecbayes",
                     description="Bayesian emergent-constraints toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit the ensemble regression")
    p.add_argument("--ensemble", required=True)
    _add_prior_flags(p)
    _add_sampler_flags(p)
    p.add_argument("--out", default="fit_summary.json")
    p.add_argument("--dump-draws", default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("predict", help="posterior-predictive constraint")
    p.add_argument("--ensemble", default=None)
    p.add_argument("--builtin", default=None)
    p.add_argument("--data", default=None)
    p.add_argument("--synthetic-cox", action="store_true",
                   help="use the engineered stand-in for the 'cox' ensemble")
    _add_prior_flags(p)
    p.add_argument("--reality", choices=("collapsed", "manual", "guided"),
                   default="collapsed")
    p.add_argument("--confidence", choices=tuple(reality.CONFIDENCE_ALPHAS),
                   default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--mu-y", dest="mu_y", type=float, default=None)
    p.add_argument("--sigma-y", dest="sigma_y", type=float, default=None)
    p.add_argument("--sign", choices=("positive", "negative"), default="positive")
    p.add_argument("--Sb-star", dest="Sb_star", default=None,
                   help="manual discrepancy variances v00,v11[,cov]")
    p.add_argument("--xi", type=float, default=None)
    p.add_argument("--z", type=float, default=None)
    p.add_argument("--sigma-z", dest="sigma_z", type=float, default=None)
    p.add_argument("--x-prior", dest="x_prior", choices=("flat", "normal"),
                   default="flat")
    p.add_argument("--mu-x", dest="mu_x", type=float, default=None)
    p.add_argument("--sigma-x", dest="sigma_x", type=float, default=None)
    p.add_argument("--levels", default="0.66,0.9,0.95")
    p.add_argument("--hdi", action="store_true",
                   help="shortest (highest-density) intervals instead of "
                        "equal-tailed")
    _add_sampler_flags(p)
    p.add_argument("--out", default="predictive.json")
    p.add_argument("--density-csv", default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("reproduce", help="compare against published tables")
    p.add_argument("--table", type=int, choices=(1, 2, 4), required=True)
    p.add_argument("--data", default=None)
    p.add_argument("--synthetic-cox", action="store_true")
    p.add_argument("--draws", type=int, default=200000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("mine", help="maximum spurious correlation in noise")
    p.add_argument("--members", type=int, default=43)
    p.add_argument("--outputs", type=int, default=10000)
    p.add_argument("--mode", choices=("one_vs_rest", "all_pairs"),
                   default="one_vs_rest")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--inject-duplicate", action="store_true")
    p.add_argument("--out", default="mining.json")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("datasets", help="list the built-in observation catalog")
    p.set_defaults(func=cmd_datasets)

    p = sub.add_parser("serve", help="run the HTTP API")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8710)
    p.add_argument("--data", default=None)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE_ERROR
    try:
        outcome = args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE_ERROR
    except ConvergenceError as err:
        print(f"error: {err} (rhat={err.rhat}, ess={err.ess})", file=sys.stderr)
        return DATA_ERROR
    except (EcbayesError, FileNotFoundError, LookupError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return DATA_ERROR
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
