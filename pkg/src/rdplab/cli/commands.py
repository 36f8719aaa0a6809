"""
The rdplab command line tool.

Results go to stdout, logs to stderr. Exit codes: 0 when every requested
computation succeeded, 1 when a cross-check or converse diagnostic failed,
2 on usage errors, 3 on an invalid or infeasible channel specification,
4 when an iterative solver did not converge.
"""

import functools
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, List, Optional, Tuple

import click
from loguru import logger
from tqdm import tqdm

from rdplab.cli.config import (
    SCHEMA_VERSION,
    CurveConfig,
    OracleCheckConfig,
    SpectrumConfig,
    load_simulation_config,
)
from rdplab.cli.output import dump_json, write_table
from rdplab.cli.specs import ChannelSpecError, parse_channel, parse_distortion
from rdplab.coding_engine import (
    design_greedy_quantizer,
    simulate_fixed_length,
    simulate_variable_length,
)
from rdplab.logger import LoggerConfig, configure_logger
from rdplab.nletter_oracle import (
    best_deterministic_encoder,
    exact_min_entropy_2x2,
    grid_min_entropy,
)
from rdplab.rdp_solvers import (
    DistortionSpec,
    bound_type_for,
    default_spectrum_length,
    min_output_entropy,
    min_output_entropy_excess,
    resolve_method,
    rfa_evaluate,
)
from rdplab.source_models import (
    Pmf,
    SourceModel,
    block_pmf,
    block_support,
    parse_source,
)
from rdplab.spectrum import f_spectrum_with_radius
from rdplab.utils import (
    ConvergenceFailureError,
    ConverseViolationError,
    InfeasibleConstraintError,
    config_hash,
)
from rdplab.version import version

__all__ = [
    "EXIT_CHECK_FAILED",
    "EXIT_USAGE",
    "EXIT_INFEASIBLE",
    "EXIT_SOLVER_FAILED",
    "main",
]

EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_SOLVER_FAILED = 4

CURVE_COLUMNS = [
    "D",
    "S",
    "R_va_surrogate",
    "R_fa",
    "BA_component",
    "spectrum_floor",
    "method",
    "bound_type",
]
SPECTRUM_COLUMNS = ["R", "F_n", "radius"]
ORACLE_COLUMNS = ["D", "S", "H_exact", "H_closed_form", "H_grid", "abs_diff", "ok"]

_LOG_LEVELS = [
    "TRACE",
    "DEBUG",
    "INFO",
    "SUCCESS",
    "WARNING",
    "METRIC",
    "ERROR",
    "CRITICAL",
]


def _exit_codes(command: Callable) -> Callable:
    """
    Translate domain errors raised inside a command into the tool's exit codes
    """

    @functools.wraps(command)
    def wrapped(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except (ChannelSpecError, InfeasibleConstraintError) as err:
            logger.error(str(err))
            raise click.exceptions.Exit(EXIT_INFEASIBLE)
        except ConverseViolationError as err:
            logger.error(str(err))
            raise click.exceptions.Exit(EXIT_CHECK_FAILED)
        except ConvergenceFailureError as err:
            logger.error(str(err))
            raise click.exceptions.Exit(EXIT_SOLVER_FAILED)
        except ValueError as err:
            raise click.UsageError(str(err))

    return wrapped


def _map_cells(
    function: Callable[[Tuple[float, float]], Dict[str, Any]],
    cells: List[Tuple[float, float]],
    workers: int,
    show_progress: bool,
) -> List[Dict[str, Any]]:
    with ThreadPoolExecutor(max_workers=workers) as executor:
        # rows come back in grid order whatever the worker count
        return list(
            tqdm(
                executor.map(function, cells),
                total=len(cells),
                desc="grid",
                disable=not show_progress,
            )
        )


@click.group()
@click.version_option(version, prog_name="rdplab")
@click.option(
    "--log-level",
    type=click.Choice(_LOG_LEVELS, case_sensitive=False),
    default=None,
    help="console log level, logs are written to stderr",
)
def main(log_level: Optional[str]):
    """
    Rate, distortion and perception tradeoffs of finite-alphabet sources
    """
    if log_level is not None:
        configure_logger(LoggerConfig(console_log_level=log_level.upper()))


def _va_problem(
    source: SourceModel, delta: DistortionSpec, n: int
) -> Tuple[Pmf, DistortionSpec]:
    # n = 1 keeps the single-letter law, the first-symbol law for Markov sources
    return block_pmf(source, n), delta.for_blocks(n)


@main.command()
@click.option("--source", required=True, help="iid:p0,p1,... or markov:... or a file")
@click.option("--distortion", default="hamming", show_default=True)
@click.option("--d", "d_grid", required=True, help="distortion grid start:stop:step")
@click.option("--s", "s_grid", required=True, help="perception grid start:stop:step")
@click.option("--base", default=2.0, show_default=True, type=float)
@click.option(
    "--method",
    type=click.Choice(["auto", "exact", "grid", "multistart"]),
    default="auto",
    show_default=True,
)
@click.option("--va-n", default=1, show_default=True, type=int)
@click.option(
    "--fa-n",
    default=None,
    type=int,
    help="spectrum block length of R_fa, default 64, capped for Markov sources "
    "at 2**16 blocks",
)
@click.option("--eps", default=None, type=float, help="adds an R_vm_surrogate column")
@click.option("--starts", default=None, type=int, help="multistart starts")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--workers", default=1, show_default=True, type=int)
@click.option("--progress", is_flag=True, default=False)
@_exit_codes
def curve(workers: int, progress: bool, **options):
    """
    Tradeoff surrogates over a (D, S) grid as CSV
    """
    config = CurveConfig.model_validate(
        {key: value for key, value in options.items() if value is not None}
    )
    source = parse_source(config.source)
    delta = parse_distortion(config.distortion, source.alphabet_size)
    p_va, delta_va = _va_problem(source, delta, config.va_n)
    if config.fa_n is None:
        config = config.model_copy(update={"fa_n": default_spectrum_length(source)})
    method = resolve_method(config.method, len(p_va))
    solver_options = dict(
        method=method, base=config.base, starts=config.starts, seed=config.seed
    )

    def cell(point: Tuple[float, float]) -> Dict[str, Any]:
        D, S = point
        row: Dict[str, Any] = {"D": D, "S": S, "method": method}
        row["bound_type"] = bound_type_for(method)
        try:
            row["R_va_surrogate"] = min_output_entropy(
                p_va, delta_va, D, S, **solver_options
            )[0]
        except InfeasibleConstraintError:
            row["R_va_surrogate"] = float("inf")
        if config.eps is not None:
            try:
                row["R_vm_surrogate"] = min_output_entropy_excess(
                    p_va, delta_va, D, config.eps, S, **solver_options
                )[0]
            except InfeasibleConstraintError:
                row["R_vm_surrogate"] = float("inf")
        if delta.zero_diagonal:
            fa_point = rfa_evaluate(
                source, delta, D, S, n=config.fa_n, base=config.base
            )
            row.update(
                R_fa=fa_point.R,
                BA_component=fa_point.ba_component,
                spectrum_floor=fa_point.spectrum_floor,
            )
        return row

    cells = [(D, S) for D in config.d_grid for S in config.s_grid]
    rows = _map_cells(cell, cells, workers, progress)
    if not delta.zero_diagonal:
        logger.warning("distortion has a nonzero diagonal, R_fa columns are left empty")

    columns = CURVE_COLUMNS + (["R_vm_surrogate"] if config.eps is not None else [])
    write_table(
        sys.stdout,
        "curve",
        SCHEMA_VERSION,
        config.model_dump(),
        config.seed,
        columns,
        rows,
    )


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--source", default=None)
@click.option(
    "--channel",
    default=None,
    help="identity, bsc:q, constant:label, rows=[[..]] or a CSV path",
)
@click.option(
    "--per-letter/--block-channel",
    "per_letter_product",
    default=None,
    help="apply the channel letter by letter, or read it as a channel on n-blocks",
)
@click.option("--distortion", default=None)
@click.option("--n", default=None, type=int)
@click.option("--trials", default=None, type=int)
@click.option("--seed", default=None, type=int)
@click.option("--k", default=None, type=int)
@click.option("--mode", type=click.Choice(["va", "fa"]), default=None)
@click.option("--codebook-size", default=None, type=int)
@click.option("--eps", default=None, type=float)
@click.option("--workers", default=None, type=int)
@click.option("--progress", is_flag=True, default=False)
@_exit_codes
def simulate(config_path: Optional[str], progress: bool, **overrides):
    """
    Simulate a variable-length (va) or fixed-length (fa) code and print the
    report as JSON
    """
    config = load_simulation_config(config_path, **overrides)
    source = parse_source(config.source)
    delta = parse_distortion(config.distortion, source.alphabet_size)
    run_options = dict(
        seed=config.seed,
        K=config.k,
        eps=config.eps,
        workers=config.workers,
        show_progress=progress,
    )

    if config.mode == "va":
        if config.per_letter_product:
            letter = parse_channel(config.channel, source.alphabet)
            channel = letter.per_letter_product(config.n)
        else:
            blocks = block_support(source.alphabet, config.n)
            channel = parse_channel(config.channel, blocks)
        report = simulate_variable_length(
            source, channel, delta, config.n, config.trials, **run_options
        )
    else:
        delta_n = delta.for_blocks(config.n)
        quantizer, reproduction = design_greedy_quantizer(
            block_pmf(source, config.n), delta_n, config.codebook_size
        )
        report = simulate_fixed_length(
            source,
            quantizer,
            reproduction,
            delta_n,
            config.n,
            config.trials,
            **run_options,
        )

    payload = report.model_dump(exclude={"decoded_counts"})
    payload.update(
        delta_rate=report.avg_len_per_symbol - report.theory_rate,
        delta_distortion=report.empirical_distortion - report.theory_distortion,
        delta_tv=report.empirical_tv - report.theory_tv,
        schema_version=SCHEMA_VERSION,
        tool_version=version,
        config_hash=config_hash(config.hashed_fields()),
    )
    click.echo(dump_json(payload))


@main.command()
@click.option("--source", required=True)
@click.option("--n", required=True, type=int)
@click.option("--r", "r_grid", required=True, help="rate grid start:stop:step")
@click.option("--base", default=2.0, show_default=True, type=float)
@click.option(
    "--mode", type=click.Choice(["exact", "mc"]), default="exact", show_default=True
)
@click.option("--trials", default=100_000, show_default=True, type=int)
@click.option("--seed", default=None, type=int, help="required in mc mode")
@_exit_codes
def spectrum(**options):
    """
    Tail of the normalized self-information, F_n(R), as CSV
    """
    config = SpectrumConfig.model_validate(
        {key: value for key, value in options.items() if value is not None}
    )
    source = parse_source(config.source)

    rows = []
    for R in config.r_grid:
        value, radius = f_spectrum_with_radius(
            source,
            config.n,
            R,
            base=config.base,
            mode=config.mode,
            trials=config.trials,
            seed=config.seed or 0,
        )
        rows.append({"R": R, "F_n": value, "radius": radius})

    write_table(
        sys.stdout,
        "spectrum",
        SCHEMA_VERSION,
        config.model_dump(),
        config.seed,
        SPECTRUM_COLUMNS,
        rows,
    )


@main.command("oracle-check")
@click.option(
    "--source", required=True, help="an i.i.d. source on at most three symbols"
)
@click.option("--distortion", default="hamming", show_default=True)
@click.option("--d", "d_grid", required=True)
@click.option("--s", "s_grid", required=True)
@click.option("--resolution", default=None, type=float)
@click.option("--tol", default=None, type=float)
@click.option(
    "--deterministic",
    is_flag=True,
    default=False,
    help="add the best deterministic encoder and its gap to the channel optimum",
)
@click.option("--workers", default=1, show_default=True, type=int)
@click.option("--progress", is_flag=True, default=False)
@_exit_codes
def oracle_check(workers: int, progress: bool, **options):
    """
    Cross-check the vertex solver against the brute-force oracles. Exits
    with 1 when any cell disagrees by more than the tolerance.
    """
    config = OracleCheckConfig.model_validate(
        {key: value for key, value in options.items() if value is not None}
    )
    source = parse_source(config.source)
    if source.kind != "iid" or source.alphabet_size > 3:
        raise ValueError(
            "oracle checks run on i.i.d. sources with at most three symbols"
        )
    delta = parse_distortion(config.distortion, source.alphabet_size)
    p_x = source.symbol_pmf

    def solve(function: Callable, *args, **kwargs) -> float:
        try:
            return function(p_x, delta, *args, **kwargs)[0]
        except InfeasibleConstraintError:
            return float("inf")

    def cell(point: Tuple[float, float]) -> Dict[str, Any]:
        D, S = point
        row: Dict[str, Any] = {"D": D, "S": S}
        row["H_exact"] = solve(min_output_entropy, D, S, method="exact")
        row["H_grid"] = solve(grid_min_entropy, D, S, resolution=config.resolution)
        values = [row["H_grid"]]
        if len(p_x) == 2:
            row["H_closed_form"] = solve(exact_min_entropy_2x2, D, S)
            values.append(row["H_closed_form"])
        row["abs_diff"] = max(_difference(row["H_exact"], value) for value in values)
        row["ok"] = row["abs_diff"] <= config.tol
        if config.deterministic:
            found = best_deterministic_encoder(p_x, delta, D, S)
            row["H_deterministic"] = float("inf") if found is None else found[0]
            if math.isinf(row["H_exact"]):
                row["gap"] = None
            else:
                row["gap"] = row["H_deterministic"] - row["H_exact"]
        return row

    cells = [(D, S) for D in config.d_grid for S in config.s_grid]
    rows = _map_cells(cell, cells, workers, progress)
    columns = list(ORACLE_COLUMNS)
    if config.deterministic:
        columns += ["H_deterministic", "gap"]
    write_table(
        sys.stdout,
        "oracle-check",
        SCHEMA_VERSION,
        config.model_dump(),
        None,
        columns,
        rows,
    )

    failed = [row for row in rows if not row["ok"]]
    if failed:
        logger.error(
            f"{len(failed)} of {len(rows)} cells disagree by more than {config.tol}, "
            f"first at D={failed[0]['D']}, S={failed[0]['S']}"
        )
        raise click.exceptions.Exit(EXIT_CHECK_FAILED)


def _difference(first: float, second: float) -> float:
    if first == second:
        return 0.0
    return abs(first - second)
