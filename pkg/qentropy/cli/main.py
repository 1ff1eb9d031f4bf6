import argparse
import logging
import sys

from qentropy.cli.certify_utils import SUITES, certify
from qentropy.cli.scaling_utils import AXES, CORRECTIONS, InsufficientPointsError, fit_scaling
from qentropy.cli.sweep_utils import read_rows, run_sweep, success_rate
from qentropy.config.sim_args import SweepConfig
from qentropy.config.utils import ConfigurationError, load_flat_config
from qentropy.distributions import FAMILIES, make_distribution, read_distribution_file
from qentropy.estimator import EntropyEstimationModel
from qentropy.lowerbound import (
    build_hard_instance,
    entropy_relation_check,
    instance_frame,
    read_bit_matrix,
    reduction_estimate,
)
from qentropy.polyapprox import (
    PolynomialConstructionError,
    approx_sqrt_log,
    export_poly,
    make_Sk,
    make_step_poly,
)
from qentropy.separation import threshold

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2

# CLI flag -> SweepConfig field
FLAG_FIELDS = {
    "boost_rounds": "boost_rounds",
    "cost_constant": "cost_constant",
    "eps_values": "eps_values",
    "exact_qae": "exact_qae",
    "families": "families",
    "fit_axis": "fit_axis",
    "folklore": "folklore",
    "n_values": "n_values",
    "out": "output_path",
    "process_count": "process_count",
    "seed": "seed0",
    "trials": "trials",
}


def _comma_list(cast):
    def parse(raw):
        try:
            return [cast(item) for item in raw.split(",") if item.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"'{raw}' is not a comma separated list.")

    return parse


def _add_common(parser):
    parser.add_argument("--config", help="Flat key=value config file; flags override its values.")
    parser.add_argument("--verbose", action="store_true", help="Log at INFO level.")
    parser.add_argument("--cost-constant", dest="cost_constant", type=float, default=None)
    parser.add_argument("--boost-rounds", dest="boost_rounds", type=int, default=None)
    parser.add_argument(
        "--exact-qae",
        dest="exact_qae",
        action="store_const",
        const=True,
        default=None,
        help="Replace sampled amplitude estimates by exact amplitudes.",
    )
    parser.add_argument(
        "--folklore", action="store_const", const=True, default=None, help="Also run the single-polynomial baseline."
    )
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", default=None, help="CSV output path.")


def build_parser():
    parser = argparse.ArgumentParser(prog="qentropy", description="Simulated quantum entropy estimation.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Single entropy estimate.")
    _add_common(run)
    run.add_argument("--dist", choices=[f for f in FAMILIES if f != "explicit"], default=None)
    run.add_argument("--dist-file", dest="dist_file", default=None, help="One probability per line.")
    run.add_argument("--n", type=int, default=None)
    run.add_argument("--eps", type=float, default=None)
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="Sweep over families, n, eps and trials; writes CSV rows.")
    _add_common(sweep)
    sweep.add_argument("--families", type=_comma_list(str), default=None)
    sweep.add_argument("--n", dest="n_values", type=_comma_list(int), default=None)
    sweep.add_argument("--eps", dest="eps_values", type=_comma_list(float), default=None)
    sweep.add_argument("--trials", type=int, default=None)
    sweep.add_argument("--process-count", dest="process_count", type=int, default=None)
    sweep.add_argument("--no-multiprocessing", dest="use_multiprocessing", action="store_false", default=None)
    sweep.set_defaults(func=cmd_sweep)

    fit = sub.add_parser("fit", help="Log-log slope of ledger totals from sweep rows.")
    fit.add_argument("rows", help="Sweep CSV.")
    fit.add_argument("--config")
    fit.add_argument("--verbose", action="store_true")
    fit.add_argument("--axis", dest="fit_axis", choices=AXES, default=None)
    fit.add_argument("--column", default="queries_total", choices=["queries_total", "queries_folklore"])
    fit.add_argument("--correction", choices=CORRECTIONS, default="m2")
    fit.add_argument(
        "--expect",
        nargs=2,
        type=float,
        metavar=("LOW", "HIGH"),
        default=None,
        help="Exit 1 unless LOW <= slope <= HIGH.",
    )
    fit.set_defaults(func=cmd_fit)

    cert = sub.add_parser("certify", help="Run an invariant suite.")
    cert.add_argument("what", choices=SUITES)
    cert.add_argument("--config")
    cert.add_argument("--verbose", action="store_true")
    cert.add_argument("--poly-file", dest="poly_file", default=None, help="Certify a coefficient file instead.")
    cert.add_argument("--m", type=int, default=None)
    cert.add_argument("--eps", type=float, default=None)
    cert.add_argument("--out", default=None)
    cert.set_defaults(func=cmd_certify)

    hard = sub.add_parser("hard-instance", help="Build a bit-string hard instance and check the entropy relation.")
    _add_common(hard)
    hard.add_argument("--bits", default=None, help="Bit matrix file: n lines of k characters in {0,1}.")
    hard.add_argument("--n", type=int, default=None)
    hard.add_argument("--k", type=int, default=None)
    hard.add_argument("--t", type=float, default=None)
    hard.add_argument(
        "--estimate",
        type=float,
        default=None,
        metavar="C",
        help="Also estimate H(p) through q with recovered error C.",
    )
    hard.set_defaults(func=cmd_hard_instance)

    export = sub.add_parser("export-poly", help="Write a certified polynomial's coefficients.")
    export.add_argument("kind", choices=["step", "level", "sqrt_log"])
    export.add_argument("out")
    export.add_argument("--config")
    export.add_argument("--verbose", action="store_true")
    export.add_argument("--j", type=int, default=1, help="Threshold level (step).")
    export.add_argument("--k", type=int, default=1, help="Level (level).")
    export.add_argument("--eps", type=float, default=0.1)
    export.add_argument("--eta", type=float, default=0.05)
    export.add_argument("--beta", type=float, default=0.1)
    export.set_defaults(func=cmd_export_poly)
    return parser


def load_config(args):
    """SweepConfig from defaults, then the --config file, then explicit flags."""
    cfg = SweepConfig()
    if getattr(args, "config", None):
        cfg.update_from_dict(load_flat_config(args.config, SweepConfig))
    overrides = {
        field: getattr(args, flag)
        for flag, field in FLAG_FIELDS.items()
        if getattr(args, flag, None) is not None
    }
    if getattr(args, "use_multiprocessing", None) is not None:
        overrides["use_multiprocessing"] = args.use_multiprocessing
    cfg.update_from_dict(overrides)
    cfg.silent = cfg.silent or not getattr(args, "verbose", False)
    try:
        cfg.validate()
    except ValueError as e:
        raise ConfigurationError(str(e))
    return cfg


def cmd_run(args, cfg):
    if args.dist_file:
        dist = read_distribution_file(args.dist_file)
    else:
        family = args.dist or cfg.families[0]
        n = args.n if args.n is not None else cfg.n_values[0]
        dist = make_distribution(family, n)
    eps = args.eps if args.eps is not None else cfg.eps_values[0]
    model = EntropyEstimationModel(cfg)
    report = model.estimate(dist, eps, seed=cfg.seed0)
    print(report.to_text())
    if model.baseline is not None:
        print(model.baseline.to_text())
    if cfg.output_path:
        report.to_csv(cfg.output_path)
    return EXIT_OK


def cmd_sweep(args, cfg):
    frame = run_sweep(cfg)
    if not cfg.output_path:
        print(frame.to_csv(index=False), end="")
    print(success_rate(frame).to_string(index=False), file=sys.stderr)
    return EXIT_OK


def cmd_fit(args, cfg):
    rows = read_rows(args.rows)
    try:
        fit = fit_scaling(rows, cfg.fit_axis, column=args.column, correction=args.correction)
    except InsufficientPointsError as e:
        raise ConfigurationError(str(e))
    print(
        f"axis={fit.axis} slope={fit.slope:.4f} intercept={fit.intercept:.4f} r2={fit.r2:.4f} "
        f"correction={args.correction} points={fit.points}"
    )
    if args.expect is not None:
        low, high = args.expect
        if not low <= fit.slope <= high:
            print(f"slope {fit.slope:.4f} outside [{low}, {high}]", file=sys.stderr)
            return EXIT_FAILURE
    return EXIT_OK


def cmd_certify(args, cfg):
    kwargs = {}
    if args.what == "polys" and not args.poly_file:
        if args.m is not None:
            kwargs["m"] = args.m
        if args.eps is not None:
            kwargs["eps"] = args.eps
    elif args.what == "cascade":
        if args.m is not None:
            kwargs["m"] = args.m
        if args.eps is not None:
            kwargs["eps_values"] = (args.eps,)
        kwargs["concentration_constant"] = cfg.concentration_constant
    report = certify(args.what, poly_file=args.poly_file, silent=cfg.silent, **kwargs)
    print(report.summary())
    if args.out:
        report.to_frame().to_csv(args.out, index=False)
    return EXIT_OK if report.passed else EXIT_FAILURE


def cmd_hard_instance(args, cfg):
    if args.bits:
        inst = read_bit_matrix(args.bits)
    else:
        if args.n is None or args.k is None:
            raise ConfigurationError("hard-instance needs --bits or both --n and --k.")
        inst = build_hard_instance(n=args.n, k=args.k, t=args.t, seed=cfg.seed0)
    frame = instance_frame(inst)
    print(frame.to_string(index=False))
    lhs, rhs, dev = entropy_relation_check(inst)
    print(f"t={inst.t} k={inst.k} H(p)={lhs:.12f} recovered={rhs:.12f} max_dev={dev:.3g}")
    if cfg.output_path:
        frame.to_csv(cfg.output_path, index=False)
    if args.estimate is not None:
        result = reduction_estimate(
            inst,
            args.estimate,
            seed=cfg.seed0,
            boost_rounds=cfg.boost_rounds,
            exact_qae=cfg.exact_qae,
            cost_constant=cfg.cost_constant,
        )
        print(
            f"estimated H(p)={result.h_p_estimate:.6f} (eps on q={result.eps:.4g}, "
            f"queries={result.report.queries_total})"
        )
    return EXIT_OK if dev <= 1e-10 else EXIT_FAILURE


def cmd_export_poly(args, cfg):
    if args.kind == "step":
        poly = make_step_poly(threshold(args.j), args.eps)
    elif args.kind == "level":
        poly = make_Sk(args.k, args.eta)
    else:
        poly = approx_sqrt_log(args.beta, args.eta)
    export_poly(poly, args.out)
    print(f"{poly.kind} degree {poly.degree} (degree ratio {poly.degree_ratio:.3g}) -> {args.out}")
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        cfg = load_config(args)
        return args.func(args, cfg)
    except (ConfigurationError, OSError) as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except PolynomialConstructionError as e:
        print(f"polynomial construction failed: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
