"""Command-line interface.

Subcommands:

* ``test`` — run one hypothesis test on CSV data and emit a JSON
  TestResult plus a human-readable summary;
* ``simulate`` — reproduce a simulation table at a chosen replication
  count, emitting an ExperimentReport;
* ``power`` — local-power curves over a kappa grid for several weights;
* ``transform`` — convert a density CSV into functional regressors.

Options may come from a ``key = value`` config file (``--config``);
flags override the file.  The environment variable ``FUNFLIR_SEED`` is
used as a seed fallback.  Exit codes: 0 ok, 1 domain error, 2 usage
error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import critical, dataio, simlab, testkit, transforms, weights
from .hilbert import Curve, Grid, zero_curve
from .lrv import KERNELS
from .moments import SingularCovariatesError
from .weights import DegenerateWeightError

__all__ = ["main"]


class UsageError(Exception):
    pass


def parse_weight(text: str) -> weights.WeightSpec:
    text = text.strip().lower()
    if text in ("endpoint", "inf", "pinf", "p=inf"):
        return weights.endpoint_weight()
    if text.startswith("p"):
        try:
            return weights.power_weight(float(text[1:].lstrip("=")))
        except ValueError:
            pass
    raise UsageError(f"cannot parse weight {text!r}; use p<power> or endpoint")


def parse_kernel(text: str):
    key = text.strip().lower().replace("_", "-")
    if key not in KERNELS:
        raise UsageError(f"unknown kernel {text!r}; choose from {sorted(KERNELS)}")
    return KERNELS[key]


def read_config_file(path) -> dict:
    """Parse a config file of ``key = value`` lines."""
    out = {}
    for i, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}: line {i}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = val
    return out


_CONFIG_KEYS = {
    "variant": str, "weight": str, "kernel": str, "alpha": float,
    "dT": int, "bandwidth": float, "draws": int, "seed": int,
    "theta0": str, "reps": int, "table": str,
}


def _resolve(args, config: dict):
    """Fill unset args from the config file, then the environment."""
    for key, cast in _CONFIG_KEYS.items():
        if getattr(args, key, None) is None and key in config:
            try:
                setattr(args, key, cast(config[key]))
            except ValueError:
                raise UsageError(f"config key {key!r}: bad value {config[key]!r}")
    if config and (unknown := set(config) - set(_CONFIG_KEYS)):
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    if getattr(args, "seed", None) is None:
        env = os.environ.get("FUNFLIR_SEED")
        if env is not None:
            try:
                args.seed = int(env)
            except ValueError:
                raise UsageError(f"FUNFLIR_SEED={env!r} is not an integer")
        else:
            args.seed = 0


def _load_theta0(spec: str, grid: Grid) -> Curve:
    if spec is None or spec == "zero":
        return zero_curve(grid)
    pts = np.asarray(dataio._read_header(spec))
    rows = dataio._read_body(spec, pts.size)
    if len(rows) != 1:
        raise dataio.DataFormatError(f"{spec}: expected exactly one value row")
    theta_grid = Grid(pts)
    if theta_grid != grid:
        raise dataio.DataFormatError(f"{spec}: grid differs from the data grid")
    return Curve(theta_grid, np.asarray(rows[0]))


def _load_covariates(path):
    vals = np.atleast_2d(np.loadtxt(path, delimiter=",", dtype=float))
    from .hilbert import ScalarSeries

    return [ScalarSeries(vals[:, j]) for j in range(vals.shape[1])]


def _build_config(args) -> testkit.TestConfig:
    return testkit.TestConfig(
        variant=args.variant or "plain",
        weight=parse_weight(args.weight or "endpoint"),
        kernel=parse_kernel(args.kernel or "bartlett"),
        alpha=args.alpha if args.alpha is not None else 0.05,
        d_T=args.dT,
        bandwidth=args.bandwidth,
        mc_draws=args.draws if args.draws is not None else 500000,
        seed=args.seed,
    )


def cmd_test(args) -> int:
    Z = dataio.load_curves(args.z) if args.z else None
    y = dataio.load_scalars(args.y)
    X = dataio.load_curves(args.x)
    config = _build_config(args)
    if Z is None and config.variant != testkit.EXOGENEITY_BENCHMARK:
        raise UsageError("--z is required except for the benchmark variant")
    theta0 = _load_theta0(args.theta0, X.grid)
    covariates = _load_covariates(args.covariates) if args.covariates else None
    result = testkit.run_test(config, Z, y, X, theta0, covariates)
    out = Path(args.out or "test_result.json")
    out.write_text(json.dumps(result.to_dict(), indent=2) + "\n")
    print(f"statistic      {result.statistic:.6g}")
    print(f"critical value {result.critical_value:.6g}  (alpha={config.alpha:g})")
    print(f"p-value        {result.p_value:.6g}")
    print(f"decision       {'reject' if result.reject else 'do not reject'}")
    print(f"bandwidth={result.bandwidth:.3f}  d_T={result.d_T}  "
          f"kernel={config.kernel.family}  weight={config.weight.label}")
    _write_manifest(args, "test", {"y": args.y, "x": args.x,
                                   **({"z": args.z} if args.z else {})},
                    config_dict(config), out)
    return 0


def config_dict(config: testkit.TestConfig) -> dict:
    return {
        "variant": config.variant,
        "weight": config.weight.label,
        "kernel": config.kernel.family,
        "alpha": config.alpha,
        "d_T": config.d_T,
        "bandwidth": config.bandwidth,
        "mc_draws": config.mc_draws,
        "seed": config.seed,
    }


def _write_manifest(args, command, inputs, config, *outputs):
    manifest = dataio.RunManifest(command, inputs, config, args.seed)
    for path in outputs:
        manifest.add_output(Path(path).name, path)
    target = Path(outputs[0]).with_suffix(".manifest.json") if outputs else \
        Path(f"{command}.manifest.json")
    manifest.write(target)


def _table_cells(table: str, T_list):
    """DGP/config grids for the built-in simulation tables."""
    ep = weights.endpoint_weight()
    powers = [ep] + [weights.power_weight(p) for p in (7.0, 3.0, 1.0, 0.0)]
    bart, parz = KERNELS["bartlett"], KERNELS["parzen"]
    if table == "1":
        dgps = [simlab.DgpSpec("baseline", T, bu, "informative", 0.0)
                for bu in (0.0, 0.1, 0.25) for T in T_list]
        cfgs = [testkit.TestConfig(variant="benchmark", weight=ep, kernel=k)
                for k in (bart, parz)]
    elif table == "2":
        dgps = [simlab.DgpSpec("baseline", T, bu, design, kappa)
                for design in ("informative", "weak") for bu in (0.1, 0.25)
                for T in T_list for kappa in (0.0, 5.0, 10.0, 20.0)]
        cfgs = [testkit.TestConfig(variant="plain", weight=w, kernel=k)
                for w in powers for k in (bart, parz)]
    elif table == "3":
        dgps = [simlab.DgpSpec("seong", T, design=design, kappa=k2**0.5)
                for design in ("informative", "weak") for T in T_list
                for k2 in (0.0, 0.05, 0.1, 0.15)]
        # The comparison model carries an intercept, so the centered
        # variant is the appropriate pipeline here.
        cfgs = [testkit.TestConfig(variant="intercept", weight=ep, kernel=parz)]
    elif table.lower() == "a4":
        dgps = [simlab.DgpSpec("baseline_intercept", T, bu, design, kappa)
                for design in ("informative", "weak") for bu in (0.1, 0.25)
                for T in T_list for kappa in (0.0, 5.0, 10.0, 20.0)]
        cfgs = [testkit.TestConfig(variant="intercept", weight=w, kernel=k)
                for w in powers for k in (bart, parz)]
    else:
        raise UsageError(f"unknown table {table!r}; choose 1, 2, 3 or A4")
    return dgps, cfgs


def cmd_simulate(args) -> int:
    T_list = [int(t) for t in (args.T or "100,200,400").split(",")]
    reps = args.reps if args.reps is not None else 2000
    dgps, cfgs = _table_cells(args.table or "2", T_list)
    report = simlab.run_experiment(dgps, cfgs, reps, args.seed)
    out = Path(args.out or f"table{args.table or '2'}_report.json")
    out.write_text(report.to_json() + "\n")
    print(report.to_text())
    _write_manifest(args, "simulate", {},
                    {"table": args.table, "T": T_list, "reps": reps}, out)
    return 0


def cmd_power(args) -> int:
    weight_specs = [parse_weight(w) for w in (args.weights or "p0,p7,endpoint").split(",")]
    kappas = [float(k) for k in (args.kappas or "0,2,5,10,15,20").split(",")]
    spec = simlab.DgpSpec("baseline", 400, args.beta_u, args.design or "informative",
                          0.0, seed=args.seed)
    est, cxz_psi, _ = simlab.baseline_local_ingredients(
        spec, T_long=args.T_long, kernel=parse_kernel(args.kernel or "bartlett"))
    draws = args.draws if args.draws is not None else 100000
    curves = {}
    for w in weight_specs:
        Dw = weights.drift_factor(w)
        pi = []
        for kappa in kappas:
            shift = Curve(cxz_psi.grid, kappa * Dw * cxz_psi.values)
            pi.append(critical.local_power(
                est.eigenvalues, est.eigenvectors, shift,
                args.alpha if args.alpha is not None else 0.05,
                draws, args.seed))
        curves[w.label] = pi
    out = Path(args.out or "local_power.json")
    out.write_text(json.dumps({"kappa": kappas, "power": curves}, indent=2) + "\n")
    header = "kappa".rjust(8) + "".join(lbl.rjust(12) for lbl in curves)
    print(header)
    for i, kappa in enumerate(kappas):
        print(f"{kappa:8g}" + "".join(f"{curves[lbl][i]:12.3f}" for lbl in curves))
    _write_manifest(args, "power", {},
                    {"weights": [w.label for w in weight_specs], "kappas": kappas},
                    out)
    return 0


def cmd_transform(args) -> int:
    density = dataio.load_density_sample(
        args.input,
        support=tuple(float(s) for s in args.support.split(",")) if args.support
        else None,
    )
    kind = (args.kind or "clr").lower()
    series = transforms.transform(density, kind)
    out = Path(args.out or f"{kind}_curves.csv")
    dataio.save_curves(out, series)
    print(f"wrote {len(series)} {kind.upper()} curves to {out}")
    _write_manifest(args, "transform", {"input": args.input},
                    {"kind": kind, "support": density.support}, out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="funflir",
        description="Identification-robust tests for functional linear regression",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key = value config file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", help="output path")

    p_test = sub.add_parser("test", help="run one hypothesis test on CSV data")
    common(p_test)
    p_test.add_argument("--z", help="auxiliary-curve CSV")
    p_test.add_argument("--y", required=True, help="response CSV (single column)")
    p_test.add_argument("--x", required=True, help="regressor-curve CSV")
    p_test.add_argument("--covariates", help="scalar-covariate CSV (one column each)")
    p_test.add_argument("--variant", choices=testkit.VARIANTS, default=None)
    p_test.add_argument("--weight", default=None, help="p<power> or endpoint")
    p_test.add_argument("--kernel", default=None,
                        help="bartlett | parzen | tukey-hanning")
    p_test.add_argument("--alpha", type=float, default=None)
    p_test.add_argument("--dT", type=int, default=None)
    p_test.add_argument("--bandwidth", type=float, default=None)
    p_test.add_argument("--draws", type=int, default=None)
    p_test.add_argument("--theta0", default=None, help="'zero' or curve CSV")

    p_sim = sub.add_parser("simulate", help="reproduce a simulation table")
    common(p_sim)
    p_sim.add_argument("--table", default=None, help="1 | 2 | 3 | A4")
    p_sim.add_argument("--reps", type=int, default=None)
    p_sim.add_argument("--T", default=None, help="comma-separated sample sizes")

    p_pow = sub.add_parser("power", help="local-power curves over kappa")
    common(p_pow)
    p_pow.add_argument("--weights", default=None,
                       help="comma-separated, e.g. p0,p7,endpoint")
    p_pow.add_argument("--kappas", default=None, help="comma-separated kappa grid")
    p_pow.add_argument("--kernel", default=None)
    p_pow.add_argument("--alpha", type=float, default=None)
    p_pow.add_argument("--draws", type=int, default=None)
    p_pow.add_argument("--beta-u", dest="beta_u", type=float, default=0.1)
    p_pow.add_argument("--design", default=None)
    p_pow.add_argument("--T-long", dest="T_long", type=int, default=20000)

    p_tr = sub.add_parser("transform", help="convert a density CSV")
    common(p_tr)
    p_tr.add_argument("--input", required=True, help="density CSV")
    p_tr.add_argument("--kind", default=None,
                      help="clr | lhr | lrhr | lcdf | pdf | qf")
    p_tr.add_argument("--support", default=None, help="a,b overriding the header")

    return parser


_COMMANDS = {
    "test": cmd_test,
    "simulate": cmd_simulate,
    "power": cmd_power,
    "transform": cmd_transform,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 2
    try:
        config = read_config_file(args.config) if args.config else {}
        _resolve(args, config)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (dataio.DataFormatError, critical.DegenerateSpectrumError,
            DegenerateWeightError, SingularCovariatesError, OSError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
