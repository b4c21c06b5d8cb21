"""The wshift command line

    wshift analyze --family 'beauzamy(1, 2)' --p 2
    wshift classify --spec-file weights.json --p inf --format csv
    wshift approximate --family 'supexp(1)' --k 1 --n 2 --eps 0.1
    wshift families

Exit codes: 0 on completion (whatever the verdicts), 2 on invalid input,
3 on I/O failure, 4 when a constructed certificate fails its own checks.
"""
from __future__ import annotations

import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Sequence

from . import __version__
from .classify import NODES, classify
from .constructor import (
    CertificateError,
    NotFound,
    approximate_transition,
    direct_sum_cyclic_vector,
)
from .criteria import (
    Budgets,
    CriterionReport,
    Rho,
    aag_cyclic,
    direct_sum_lq,
    fixed_power_ratio,
    quasinilpotent,
    root_product_infimum,
    salas_hypercyclic,
    salas_supercyclic,
    sc_witness,
)
from .parser import ArgumentParser
from .report import (
    analysis_rows,
    approximation_row,
    criterion_row,
    dumps_csv,
    dumps_json,
    p_label,
    status_row,
    summary,
    write_output,
)
from .type_ import parse_family
from .utils import render_float
from .weights import FAMILIES, WeightSequence, from_spec, load_weight_spec

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_IO = 3
EXIT_CERT = 4


@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs, resolved from the parsed arguments"""

    command: str
    family: Mapping[str, Any] | str | None = None
    spec_file: Path | None = None
    p: float = 2.0
    budgets: Budgets = Budgets()
    format: str = "json"
    out: Path | None = None
    workers: int = 1
    seed: int = 0
    k: int | None = None
    n: int | None = None
    eps: float | None = None
    rho: Rho | None = None
    aag_k: float = 1.0
    fixed_j: int = 1
    direct_sum: int | None = None

    @classmethod
    def from_args(cls, args: Any) -> RunConfig:
        get = lambda name, default=None: getattr(args, name, default)  # noqa: E731
        budgets = Budgets.from_config(
            {
                "tol_log": get("tol", Budgets.tol_log),
                "m_max": get("m_max", Budgets.m_max),
                "n_max": get("n_max", Budgets.n_max),
                "j_max": get("j_max", Budgets.j_max),
                "a_max": get("a_max", Budgets.a_max),
                "support_radius": get("support_radius", Budgets.support_radius),
                "lq_m": get("lq_m", Budgets.lq_m),
            }
        )
        return cls(
            command=args.COMMAND,
            family=get("family"),
            spec_file=get("spec_file"),
            p=get("p", 2.0),
            budgets=budgets,
            format=get("format", "json"),
            out=get("out"),
            workers=get("workers", 1),
            seed=get("seed", 0),
            k=get("k"),
            n=get("n"),
            eps=get("eps"),
            rho=get("rho"),
            aag_k=get("aag_k", 1.0),
            fixed_j=get("fixed_j", 1),
            direct_sum=get("direct_sum"),
        )

    def weights(self) -> WeightSequence:
        """The weight sequence from --spec-file or --family"""
        if self.spec_file is not None:
            return load_weight_spec(self.spec_file)
        if self.family is None:
            raise ValueError("One of --family or --spec-file is required")
        spec = self.family
        if not isinstance(spec, Mapping):
            spec = parse_family(str(spec))
        return from_spec(spec)


def _header(ws: WeightSequence, config: RunConfig) -> Dict[str, Any]:
    return {
        "family": ws.label,
        "spec": _plain(ws.to_spec()),
        "p": p_label(config.p),
        "budgets": {
            key: render_float(value) if isinstance(value, float) else value
            for key, value in config.budgets.to_dict().items()
        },
    }


def _plain(value: Any) -> Any:
    if isinstance(value, float):
        return render_float(value)
    if isinstance(value, Mapping):
        return {key: _plain(val) for key, val in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(val) for val in value]
    return value


def analysis_reports(ws: WeightSequence, config: RunConfig) -> List[CriterionReport]:
    """Every criterion applicable at the configured p and budgets"""
    b = config.budgets
    tol = b.tol_log
    workers = config.workers
    reports = [
        salas_hypercyclic(ws, b.m_max, b.n_max, tol, workers=workers),
        salas_supercyclic(ws, b.m_max, b.n_max, tol, workers=workers),
        sc_witness(ws, b.support_radius, b.n_max, tol),
        quasinilpotent(ws, b.n_max, tol),
    ]
    for a in range(1, b.a_max + 1):
        reports.append(
            root_product_infimum(
                ws, a, b.j_max, max(b.m_max, a), tol, workers=workers
            )
        )
    for a in range(1, b.a_max + 1):
        reports.append(fixed_power_ratio(ws, config.fixed_j, a, b.m_max, tol))
    reports.append(direct_sum_lq(ws, config.p, config.p, b.lq_m, b.n_max, tol))
    if config.rho is not None:
        reports.append(aag_cyclic(ws, config.p, config.aag_k, config.rho, b.n_max, tol))
    return reports


def cmd_analyze(config: RunConfig) -> int:
    ws = config.weights()
    reports = analysis_reports(ws, config)
    if config.format == "csv":
        text = dumps_csv(analysis_rows(ws.label, config.p, reports))
    else:
        data = _header(ws, config)
        data["reports"] = [report.to_dict() for report in reports]
        data["summary"] = summary(reports)
        text = dumps_json(data)
    write_output(text, config.out)
    return EXIT_OK


def cmd_classify(config: RunConfig) -> int:
    ws = config.weights()
    result = classify(
        ws,
        config.p,
        config.budgets,
        rho=config.rho,
        k=config.aag_k,
        workers=config.workers,
    )
    if config.format == "csv":
        rows = [criterion_row(ws.label, config.p, r) for r in result.reports]
        rows.extend(
            status_row(ws.label, config.p, node, result.statuses[node])
            for node in NODES
        )
        text = dumps_csv(rows)
    else:
        data = _header(ws, config)
        data.update(result.to_dict())
        text = dumps_json(data)
    write_output(text, config.out)
    return EXIT_OK


def cmd_approximate(config: RunConfig) -> int:
    if config.k is None or config.n is None or config.eps is None:
        raise ValueError("approximate needs --k, --n and --eps")
    ws = config.weights()
    result = approximate_transition(
        ws,
        config.k,
        config.n,
        config.eps,
        config.budgets,
        p=config.p,
        workers=config.workers,
    )
    certificate = None
    if config.direct_sum is not None and not isinstance(result, NotFound):
        certificate = direct_sum_cyclic_vector(
            ws, result.u, config.direct_sum, seed=config.seed
        )

    if config.format == "csv":
        row = approximation_row(
            ws.label,
            config.p,
            result,
            config.budgets.j_max,
            config.budgets.m_max,
        )
        text = dumps_csv([row])
    else:
        data = _header(ws, config)
        data.update({"k": config.k, "n": config.n, "eps": render_float(config.eps)})
        data["result"] = result.to_json()
        if certificate is not None:
            data["direct_sum"] = certificate.to_json()
        text = dumps_json(data)
    write_output(text, config.out)
    return EXIT_OK


def cmd_families(config: RunConfig) -> int:
    rows = []
    for name, cls in sorted(FAMILIES.items()):
        rows.append(
            {
                "family": name,
                "params": ", ".join(cls.params),
                "description": (cls.__doc__ or "").strip().splitlines()[0],
            }
        )
    if config.format == "csv":
        text = dumps_csv(rows, columns=("family", "params", "description"))
    else:
        text = dumps_json({"families": rows})
    write_output(text, config.out)
    return EXIT_OK


COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    "analyze": cmd_analyze,
    "classify": cmd_classify,
    "approximate": cmd_approximate,
    "families": cmd_families,
}


def _add_output_arguments(command: ArgumentParser) -> None:
    command.add_argument(
        "--format",
        choices=("json", "csv"),
        default="json",
        help="Report format",
    )
    command.add_argument(
        "--out",
        type="path",
        help="Output file, stdout if omitted",
    )


def _add_run_arguments(command: ArgumentParser) -> None:
    source = command.add_mutually_exclusive_group()
    source.add_argument(
        "--family",
        type="family",
        help="Inline weights, e.g. 'beauzamy(1, 2)' or a JSON object",
    )
    source.add_argument(
        "--spec-file",
        type="path",
        help="A weight spec file (JSON or TOML)",
    )
    command.add_argument(
        "--p",
        type="p",
        default="2",
        help="The exponent of l_p, 'inf' for c_0",
    )
    command.add_argument(
        "--tol",
        type="tol",
        default="1e-6",
        help="Witnessing tolerance, as a magnitude",
    )
    command.add_argument("--m-max", type="posint", default=Budgets.m_max)
    command.add_argument("--n-max", type="posint", default=Budgets.n_max)
    command.add_argument("--j-max", type="posint", default=Budgets.j_max)
    command.add_argument(
        "--a-max",
        type="posint",
        default=Budgets.a_max,
        help="Root-product tests run for a = 1..a-max",
    )
    command.add_argument(
        "--support-radius",
        type="nonneg",
        default=Budgets.support_radius,
        help="Basis vectors e_s, |s| <= radius, for the criterion witness",
    )
    command.add_argument(
        "--lq-m",
        type="nonneg",
        default=Budgets.lq_m,
        help="The m of the direct sum obstruction sequence a_n",
    )
    command.add_argument(
        "--workers",
        type="posint",
        default=1,
        help="Worker processes for grid searches (output does not depend on it)",
    )
    command.add_argument(
        "--seed",
        type="nonneg",
        default=0,
        help="Seed for sampled verifications",
    )
    _add_output_arguments(command)


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="wshift",
        description="Cyclicity criteria and constructions for weighted "
        "bilateral shifts.",
        exit_on_void=True,
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="More logging (repeat for debug output)",
    )

    analyze = parser.add_command(
        "analyze",
        help="Evaluate every criterion",
        description="Evaluate every criterion over the given budgets.",
    )
    _add_run_arguments(analyze)
    analyze.add_argument(
        "--rho",
        type="rho",
        help="rho for the alpha_n test: constant:c, power:d or subexp:c,beta",
    )
    analyze.add_argument(
        "--aag-k",
        type=float,
        default=1.0,
        help="The polynomial order k for the alpha_n test",
    )
    analyze.add_argument(
        "--fixed-j",
        type="posint",
        default=1,
        help="The power j of the fixed-power ratio test",
    )

    classify_ = parser.add_command(
        "classify",
        help="Report the status of C1-C6",
        description="Propagate criterion verdicts to the conditions C1-C6.",
    )
    _add_run_arguments(classify_)
    classify_.add_argument("--rho", type="rho", help="rho for the alpha_n test")
    classify_.add_argument("--aag-k", type=float, default=1.0)

    approximate = parser.add_command(
        "approximate",
        help="Construct a certified transition f_-k -> f_-n",
        description="Construct u near f_-k and a polynomial q with q(T)u "
        "near f_-n.",
    )
    _add_run_arguments(approximate)
    approximate.add_argument("--k", type="posint", required=True)
    approximate.add_argument("--n", type="posint", required=True)
    approximate.add_argument("--eps", type="posfloat", required=True)
    approximate.add_argument(
        "--direct-sum",
        type="posint",
        help="Also verify (u, ..., u) for the direct sum of this many rotated copies",
    )

    families = parser.add_command("families", help="List the built-in families")
    _add_output_arguments(families)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=max(logging.DEBUG, logging.WARNING - 10 * args.verbose),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        config = RunConfig.from_args(args)
        return COMMANDS[config.command](config)
    except OSError as exc:
        logger.error("%s", exc)
        print(f"wshift: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        logger.debug("Invalid input", exc_info=True)
        print(f"wshift: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CertificateError as exc:
        logger.debug("Certificate failed", exc_info=True)
        print(f"wshift: certificate failed: {exc}", file=sys.stderr)
        return EXIT_CERT
