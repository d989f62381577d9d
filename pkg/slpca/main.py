import argparse
import logging
import signal
import sys
from typing import List, Optional

import numpy as np
import pandas as pd
from pydantic import ValidationError

from . import __version__
from .models.data_matrix import DataMatrix
from .models.generator import HAT_NOISE, HAT_SIGMA_X, HELIX_NOISE, HELIX_SIGMA_X, GeneratorKind, GeneratorSpec
from .models.projection import AxesSource
from .models.regression import RegressionSpec
from .models.run_config import Command, RunConfig
from .models.slpca_model import ModelFamily, SelectionReport, SlpcaModel
from .services import axes_service, pslaam_service, regression_service
from .services.data_core import center_standardize, load_csv, total_covariance, write_csv
from .services.model_store import axes_from_document, load_axes, load_model, save_axes, save_model
from .services.selection_service import ModelSelectionServiceFactory
from .services.synthgen_service import generate
from .utils.config_manager import config_manager, get_config
from .utils.errors import DimensionMismatchError, ParameterRangeError, SlpcaError, UsageError
from .utils.regression_routing import get_regression_kind

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_MODEL_ERROR = 1
EXIT_USAGE = 2


def setup_logging(config, verbosity: int = 0):
    """Setup logging configuration; stdout is kept for reports"""
    level = getattr(logging, config.log_level.upper())
    if verbosity > 0:
        level = logging.DEBUG
    elif verbosity < 0:
        level = logging.WARNING
    handlers = [logging.StreamHandler(sys.stderr)]
    if config.log_file:
        handlers.append(logging.FileHandler(config.log_file))
    logging.basicConfig(level=level, format=config.log_format, handlers=handlers, force=True)


def _emit(line: str = ""):
    print(line, file=sys.stdout)


def _write_table(frame: pd.DataFrame, path: str, sep: str = "\t"):
    frame.to_csv(path, sep=sep, index=False, float_format=get_config().float_format)
    logger.info(f"Wrote {len(frame)} rows to {path}")


def _load_input(config: RunConfig) -> DataMatrix:
    if not config.input_path:
        raise UsageError("--input is required")
    return load_csv(config.input_path, has_header=config.has_header, delimiter=config.delimiter)


def _resolve_axes(config: RunConfig, data: DataMatrix, d_max: int):
    """Axes from --axes-file, or estimated inline with the first --method"""
    if config.axes_path:
        document = load_axes(config.axes_path)
        if len(document.column_names) != data.p:
            raise DimensionMismatchError(
                f"Axes file has {len(document.column_names)} columns, data has {data.p}"
            )
        if document.standardized != config.standardize:
            logger.warning("Axes were estimated with a different standardization setting")
        return axes_from_document(document)
    centered, _ = center_standardize(data, config.standardize)
    return axes_service.estimate_axes(centered, config.methods[0], d_max, config.k)


def cmd_simulate(config: RunConfig, generator: GeneratorSpec) -> int:
    """Generate a synthetic data set and write it as CSV"""
    data = generate(generator)
    write_csv(data, config.output_path, float_format=get_config().float_format)
    variances = data.values.var(axis=0)
    _emit(f"n\t{data.n}")
    _emit(f"p\t{data.p}")
    for name, variance in zip(data.column_names, variances):
        _emit(f"var_{name}\t{variance:.6g}")
    return EXIT_OK


def cmd_axes(config: RunConfig, graph_path: Optional[str], scores_path: Optional[str]) -> int:
    """Estimate axes, write them and print the correlation table"""
    data = _load_input(config)
    method = config.methods[0]
    d_max = config.d_max or data.p
    if d_max > data.p:
        raise ParameterRangeError(f"--d-max {d_max} exceeds the {data.p} data columns")
    if method == AxesSource.CONTIGUITY and not 1 <= config.k <= data.n - 1:
        raise ParameterRangeError(f"--k must be in [1, {data.n - 1}], got {config.k}")

    centered, _ = center_standardize(data, config.standardize)
    axes = axes_service.estimate_axes(centered, method, d_max, config.k)
    if config.output_path:
        save_axes(axes, data.column_names, config.output_path, config.standardize, config.k)

    X = centered.values @ axes.axes.T
    correlations = axes_service.axis_correlations(X, data)
    variances = axes_service.projected_variances(X)
    labels = [f"Proj{i + 1}" for i in range(axes.d_max)]

    _emit("\t".join(["axis"] + data.column_names + ["projected_variance"]))
    for label, row, variance in zip(labels, correlations, variances):
        _emit("\t".join([label] + [f"{c:.10f}" for c in row] + [f"{variance:.6g}"]))

    if method == AxesSource.CONTIGUITY:
        M = axes_service.knn_contiguity(centered, config.k)
        Vstar = axes_service.local_covariance(centered, M, config.k)
        V = total_covariance(centered)
        index = axes_service.contiguity_index(axes.axes, Vstar, V)
        _emit("\t".join(["contiguity_index"] + [f"{v:.6g}" for v in index]))
        if graph_path:
            edges = pd.DataFrame(axes_service.neighbor_edges(M), columns=["from", "to"])
            _write_table(edges, graph_path)
    elif graph_path:
        logger.warning("--graph-out applies only to contiguity analysis")

    if scores_path:
        _write_table(pd.DataFrame(X, columns=labels), scores_path)
    return EXIT_OK


def _fit_report(model: SlpcaModel):
    stats = model.statistics
    _emit(f"d\t{model.d}")
    _emit(f"kind\t{model.kind.value}")
    if model.m is not None:
        _emit(f"m\t{model.m}")
    _emit(f"gamma\t{stats.gamma}")
    _emit(f"log_likelihood\t{'NA' if stats.log_likelihood is None else f'{stats.log_likelihood:.10g}'}")
    _emit(f"bic\t{'NA' if stats.bic is None else f'{stats.bic:.10g}'}")
    _emit(f"sigma2\t{stats.sigma2:.10g}")
    _emit(f"total_inertia\t{stats.total_inertia:.10g}")
    for i, variance in enumerate(stats.projected_variances):
        _emit(f"projected_variance_{i + 1}\t{variance:.10g}")
    if stats.degenerate:
        _emit("degenerate\ttrue")


def cmd_fit(config: RunConfig) -> int:
    """Fit one model and write the model file"""
    data = _load_input(config)
    d = config.d or 1
    axes = _resolve_axes(config, data, min(d, data.p))
    spec = RegressionSpec(kind=config.kind, m=config.m, degree=config.degree)
    model = pslaam_service.fit(data, axes, d, spec, config.standardize)
    if config.output_path:
        save_model(model, config.output_path)
    _fit_report(model)
    return EXIT_OK


def _selection_frame(report: SelectionReport) -> pd.DataFrame:
    records = []
    for i, row in enumerate(report.rows):
        records.append(
            {
                "axes": row.axes_source.value,
                "d": row.d,
                "kind": row.kind.value,
                "m": "" if row.m is None else row.m,
                "gamma": row.gamma,
                "log_likelihood": row.log_likelihood,
                "bic": row.bic,
                "sigma2": row.residual_variance,
                "selected": i == report.selected,
                "error": row.error or "",
            }
        )
    return pd.DataFrame.from_records(records)


def cmd_select(config: RunConfig) -> int:
    """Fit the candidate grid and keep the minimal-BIC model"""
    data = _load_input(config)
    family = ModelFamily(
        axes_sources=config.methods,
        k=config.k,
        d_max=config.d_max or max(1, data.p - 1),
        include_linear=config.include_linear,
        m_values=config.m_values,
        degree=config.degree,
        standardize=config.standardize,
    )
    service = ModelSelectionServiceFactory.create_with_config(get_config())
    report = service.select(data, family)

    frame = _selection_frame(report)
    if config.report_path:
        _write_table(frame, config.report_path)
    _emit(frame.to_csv(sep="\t", index=False, float_format="%.10g").rstrip("\n"))
    if config.output_path and report.best_model is not None:
        save_model(report.best_model, config.output_path)
    return EXIT_OK


def cmd_predict(config: RunConfig) -> int:
    """Reconstruct every input row and report residual norms"""
    model = load_model(config.model_path)
    data = _load_input(config)
    if data.p != model.p:
        raise DimensionMismatchError(f"Input has {data.p} columns, model expects {model.p}")
    reconstruction = pslaam_service.reconstruct(model, data)
    norms = np.linalg.norm(data.values - reconstruction.values, axis=1)

    if config.output_path:
        frame = pd.DataFrame(reconstruction.values, columns=model.column_names)
        frame["residual_norm"] = norms
        _write_table(frame, config.output_path, sep=config.delimiter)
    _emit(f"n\t{data.n}")
    _emit(f"mean_squared_residual\t{np.mean(norms**2):.17g}")
    return EXIT_OK


def curve_grid(lo: float, hi: float, size: int) -> np.ndarray:
    """size points over [lo, hi]; a single point sits at the midpoint"""
    if size == 1:
        return np.array([(lo + hi) / 2])
    return np.linspace(lo, hi, size)


def cmd_curves(config: RunConfig) -> int:
    """Write the additive component curves of a spline model"""
    model = load_model(config.model_path)
    if model.m is None:
        raise ParameterRangeError("Component curves need an additive spline model; this one is linear")
    width = model.p - model.d
    frames = []
    for j, basis in enumerate(model.regression.bases):
        grid = curve_grid(basis.lo, basis.hi, config.grid_size)
        values = regression_service.component_curve(model.regression, j, grid)
        frame = pd.DataFrame(values, columns=[f"component_{c + model.d + 1}" for c in range(width)])
        frame.insert(0, "t", grid)
        frame.insert(0, "axis", j + 1)
        frames.append(frame)
    _write_table(pd.concat(frames, ignore_index=True), config.output_path)
    _emit(f"axes\t{model.d}")
    _emit(f"grid_size\t{config.grid_size}")
    return EXIT_OK


def cmd_sample(config: RunConfig) -> int:
    """Draw from a saved model"""
    model = load_model(config.model_path)
    data = pslaam_service.sample(model, config.n or model.n_train, config.seed)
    write_csv(data, config.output_path, float_format=get_config().float_format)
    _emit(f"n\t{data.n}")
    _emit(f"seed\t{config.seed}")
    if config.refit_path:
        refitted = pslaam_service.refit(model, data, seed=config.seed)
        save_model(refitted, config.refit_path)
        _emit(f"sigma2\t{model.sigma2:.10g}")
        _emit(f"refit_sigma2\t{refitted.sigma2:.10g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    defaults = get_config()
    parser = argparse.ArgumentParser(
        prog="slpca", description="Probabilistic semi-linear auto-associative models"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_const", const=1, default=0, dest="verbosity")
    parser.add_argument("-q", "--quiet", action="store_const", const=-1, dest="verbosity")
    sub = parser.add_subparsers(dest="command", required=True)

    def data_flags(p, standardize=True):
        p.add_argument("--input", "-i", required=True, dest="input_path")
        p.add_argument("--no-header", action="store_false", dest="has_header")
        p.add_argument("--delimiter", default=",", choices=[",", ";", "\t"])
        if standardize:
            p.add_argument("--standardize", action="store_true")

    def axes_flags(p, multiple=False):
        p.add_argument(
            "--method",
            nargs="+" if multiple else None,
            choices=["pca", "contiguity"],
            default=["contiguity"] if multiple else "contiguity",
        )
        p.add_argument("--k", type=int, default=defaults.default_neighbors)

    sim = sub.add_parser("simulate", help="generate a synthetic data set")
    sim.add_argument("generator", choices=[kind.value for kind in GeneratorKind])
    sim.add_argument("--n", type=int, default=1000)
    sim.add_argument("--sigma-x", type=float, nargs="+", default=None)
    sim.add_argument("--sigma", type=float, default=None)
    sim.add_argument("--seed", type=int, required=True)
    sim.add_argument("--output", "-o", required=True, dest="output_path")

    ax = sub.add_parser("axes", help="estimate projection axes")
    data_flags(ax)
    axes_flags(ax)
    ax.add_argument("--d-max", type=int, default=None)
    ax.add_argument("--output", "-o", dest="output_path")
    ax.add_argument("--graph-out", dest="graph_path")
    ax.add_argument("--scores-out", dest="scores_path")

    fit = sub.add_parser("fit", help="fit one model")
    data_flags(fit)
    axes_flags(fit)
    fit.add_argument("--axes-file", dest="axes_path")
    fit.add_argument("--d", type=int, default=1)
    fit.add_argument("--kind", default="spline")
    fit.add_argument("--m", type=int, default=None)
    fit.add_argument("--degree", type=int, default=defaults.default_degree)
    fit.add_argument("--output", "-o", dest="output_path")

    sel = sub.add_parser("select", help="select a model by BIC")
    data_flags(sel)
    axes_flags(sel, multiple=True)
    sel.add_argument("--d-max", type=int, default=None)
    sel.add_argument("--m-list", type=int, nargs="+", default=[], dest="m_values")
    sel.add_argument("--no-linear", action="store_false", dest="include_linear")
    sel.add_argument("--degree", type=int, default=defaults.default_degree)
    sel.add_argument("--report", dest="report_path")
    sel.add_argument("--output", "-o", dest="output_path")

    pred = sub.add_parser("predict", help="reconstruct data with a model")
    pred.add_argument("--model", required=True, dest="model_path")
    data_flags(pred, standardize=False)
    pred.add_argument("--output", "-o", dest="output_path")

    cur = sub.add_parser("curves", help="export additive component curves")
    cur.add_argument("--model", required=True, dest="model_path")
    cur.add_argument("--grid-size", type=int, default=defaults.default_grid_size)
    cur.add_argument("--output", "-o", required=True, dest="output_path")

    smp = sub.add_parser("sample", help="draw data from a model")
    smp.add_argument("--model", required=True, dest="model_path")
    smp.add_argument("--n", type=int, default=None)
    smp.add_argument("--seed", type=int, required=True)
    smp.add_argument("--output", "-o", required=True, dest="output_path")
    smp.add_argument("--refit-out", dest="refit_path", help="refit the drawn data and write that model")
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    fields = {name: value for name, value in vars(args).items() if name in RunConfig.model_fields}
    method = getattr(args, "method", None)
    if method is not None:
        fields["methods"] = [method] if isinstance(method, str) else method
    if getattr(args, "kind", None) is not None:
        fields["kind"] = get_regression_kind(args.kind)
    return RunConfig(**fields)


def _generator_spec(args: argparse.Namespace) -> GeneratorSpec:
    kind = GeneratorKind(args.generator)
    if kind == GeneratorKind.HELIX:
        x_sigma = HELIX_SIGMA_X if args.sigma_x is None else args.sigma_x
        if isinstance(x_sigma, list):
            if len(x_sigma) != 1:
                raise UsageError("helix takes a single --sigma-x value")
            x_sigma = x_sigma[0]
        noise = HELIX_NOISE if args.sigma is None else args.sigma
    else:
        values = args.sigma_x
        if values is None:
            x_sigma = HAT_SIGMA_X
        elif len(values) == 2:
            x_sigma = [[values[0], 0.0], [0.0, values[1]]]
        elif len(values) == 4:
            x_sigma = [values[0:2], values[2:4]]
        else:
            raise UsageError("hat takes --sigma-x as 2 standard deviations or a 2 x 2 scale matrix (4 values)")
        noise = HAT_NOISE if args.sigma is None else args.sigma
    return GeneratorSpec(kind=kind, n=args.n, noise_sigma=noise, x_sigma=x_sigma, seed=args.seed)


def main(argv: Optional[List[str]] = None) -> int:
    """Main application entry point; returns the process exit code"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK

    config = get_config()
    setup_logging(config, args.verbosity)
    if not config_manager.validate_config():
        logger.error("Invalid configuration. Exiting.")
        return EXIT_USAGE

    try:
        run = _run_config(args)
        command = run.command
        if command == Command.SIMULATE:
            return cmd_simulate(run, _generator_spec(args))
        if command == Command.AXES:
            return cmd_axes(run, args.graph_path, args.scores_path)
        if command == Command.FIT:
            return cmd_fit(run)
        if command == Command.SELECT:
            return cmd_select(run)
        if command == Command.PREDICT:
            return cmd_predict(run)
        if command == Command.CURVES:
            return cmd_curves(run)
        return cmd_sample(run)
    except ValidationError as e:
        logger.error(f"Invalid arguments: {e}")
        return EXIT_USAGE
    except SlpcaError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except np.linalg.LinAlgError as e:
        logger.error(f"Linear algebra failure: {e}")
        return EXIT_MODEL_ERROR
    except ValueError as e:
        logger.error(f"Invalid value: {e}")
        return EXIT_USAGE
    except (ArithmeticError, OSError) as e:
        logger.error(f"Run failed: {e}")
        return EXIT_MODEL_ERROR


def signal_handler(signum, frame):
    """Handle shutdown signals"""
    logger.info(f"Received signal {signum}")
    sys.exit(130)


if __name__ == "__main__":
    signal.signal(signal.SIGINT, signal_handler)
    signal.signal(signal.SIGTERM, signal_handler)
    sys.exit(main())
