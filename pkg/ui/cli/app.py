"""Command-line front door: load JSON artifacts, run an operation, print JSON."""

import argparse
import json
import logging
from typing import Any, Callable, Dict, List, Optional, Sequence

from core.config import Settings, load_settings
from core.io.artifacts import ArtifactError, dump_json, load_artifact, write_output
from core.io.random_gen import RANDOM_KINDS, gen_random
from core.measure.diagbox import BoxUnion, diag_length, diag_length_by_subdivision
from core.measure.grade2 import grade2_report, inverse_roundtrip_check, reconstruct
from core.measure.interference import SetFunction, delta, grade_of, interference, is_grade_additive
from core.measure.kernel import (
    KernelMatrix, format_report_table, kernel_semivariation_lower_bound, kernel_variation,
    variation_growth_report
)
from core.measure.polymeasure import (
    SEMIVARIATION_MODES, PolyMeasure, RawCylinderTable, check_separate_additivity, diagonal,
    marginal, permutation_sum, polarization_recover, symmetrize, tensor_semivariation, variation
)
from core.measure.scalar import format_scalar
from core.measure.space import FiniteSpace, MSet
from core.monitoring.logging_config import setup_logging
from core.monitoring.metrics import export_metrics
from core.security.input_validation import ValidationError, validate_grade

logger = logging.getLogger(__name__)

COMMANDS = (
    "check-grade", "interference", "delta", "reconstruct", "roundtrip", "diagonal",
    "symmetrize", "polarize", "marginal", "variation", "semivariation",
    "separate-additivity", "diag-length", "kernel-demo", "gen-random",
)

EMPTY_SET_TOKENS = ("", "-", "{}")


def _with_meta(result: Dict[str, Any], **meta: Any) -> Dict[str, Any]:
    """Attach the parameters a report was computed with."""
    result["meta"] = meta
    return result


def _parse_sets(space: FiniteSpace, keys: Sequence[str]) -> List[MSet]:
    """Set keys from the command line; "-" or "{}" also mean the empty set."""
    return [MSet.from_key(space, "" if key in EMPTY_SET_TOKENS else key) for key in keys]


def _load(args: argparse.Namespace, *types: type) -> Any:
    artifact = load_artifact(args.input)
    if not isinstance(artifact, types):
        names = " or ".join(t.__name__ for t in types)
        raise ValidationError(f"{args.command} expects a {names} artifact, got {type(artifact).__name__}")
    return artifact


# Command handlers: each returns the text written to the output.

def _check_grade(args: argparse.Namespace, settings: Settings) -> str:
    mu = _load(args, SetFunction)
    limit = settings.enumeration_limit
    if args.max_grade is not None:
        grade = grade_of(mu, args.max_grade, limit)
        return dump_json(_with_meta(
            {"grade_of": grade, "max_grade": args.max_grade},
            enumeration_limit=limit,
        ))
    report = is_grade_additive(mu, args.grade, limit)
    return dump_json(_with_meta(report.to_dict(), enumeration_limit=limit))


def _interference(args: argparse.Namespace, settings: Settings) -> str:
    mu = _load(args, SetFunction)
    sets = _parse_sets(mu.space, args.sets)
    value = interference(mu, sets)
    return dump_json({"grade": len(sets) - 1, "sets": [s.key for s in sets], "interference": format_scalar(value)})


def _delta(args: argparse.Namespace, settings: Settings) -> str:
    nu = _load(args, SetFunction)
    (s,) = _parse_sets(nu.space, [args.set])
    return dump_json(delta(nu, s).to_dict())


def _reconstruct(args: argparse.Namespace, settings: Settings) -> str:
    return dump_json(reconstruct(_load(args, SetFunction)).to_dict())


def _roundtrip(args: argparse.Namespace, settings: Settings) -> str:
    artifact = _load(args, SetFunction, PolyMeasure)
    if isinstance(artifact, SetFunction):
        return dump_json(grade2_report(artifact).to_dict())
    return dump_json({"inverse_roundtrip": inverse_roundtrip_check(artifact)})


def _diagonal(args: argparse.Namespace, settings: Settings) -> str:
    return dump_json(diagonal(_load(args, PolyMeasure)).to_dict())


def _symmetrize(args: argparse.Namespace, settings: Settings) -> str:
    return dump_json(symmetrize(_load(args, PolyMeasure)).to_dict())


def _polarize(args: argparse.Namespace, settings: Settings) -> str:
    artifact = _load(args, SetFunction, PolyMeasure)
    if isinstance(artifact, PolyMeasure):
        mu = diagonal(artifact)
        sets = _parse_sets(mu.space, args.sets)
        value = polarization_recover(mu, sets, len(sets))
        oracle = permutation_sum(artifact, sets)
        return dump_json({
            "d": len(sets),
            "sets": [s.key for s in sets],
            "polarization": format_scalar(value),
            "permutation_sum": format_scalar(oracle),
            "agrees": value == oracle,
        })
    sets = _parse_sets(artifact.space, args.sets)
    value = polarization_recover(artifact, sets, len(sets))
    return dump_json({"d": len(sets), "sets": [s.key for s in sets], "polarization": format_scalar(value)})


def _marginal(args: argparse.Namespace, settings: Settings) -> str:
    return dump_json(marginal(_load(args, PolyMeasure), args.slot).to_dict())


def _variation(args: argparse.Namespace, settings: Settings) -> str:
    artifact = _load(args, PolyMeasure, KernelMatrix)
    value = variation(artifact) if isinstance(artifact, PolyMeasure) else kernel_variation(artifact)
    return dump_json({"variation": format_scalar(value)})


def _semivariation(args: argparse.Namespace, settings: Settings) -> str:
    artifact = _load(args, PolyMeasure, KernelMatrix)
    tensor = artifact.tensor if isinstance(artifact, PolyMeasure) else artifact.entries
    report = tensor_semivariation(tensor, args.mode, args.seed, args.trials, settings.semivariation_limit)
    return dump_json(_with_meta(
        report.to_dict(),
        mode=args.mode, seed=args.seed, trials=args.trials,
        semivariation_limit=settings.semivariation_limit,
    ))


def _separate_additivity(args: argparse.Namespace, settings: Settings) -> str:
    raw = _load(args, RawCylinderTable)
    report = check_separate_additivity(raw, settings.enumeration_limit)
    return dump_json(_with_meta(report.to_dict(), enumeration_limit=settings.enumeration_limit))


def _diag_length(args: argparse.Namespace, settings: Settings) -> str:
    t = _load(args, BoxUnion)
    result = {"length": format_scalar(diag_length(t))}
    if args.oracle:
        result["oracle_length"] = format_scalar(diag_length_by_subdivision(t))
    return dump_json(result)


def _kernel_demo(args: argparse.Namespace, settings: Settings) -> str:
    rows = variation_growth_report(args.blocks, args.trials, args.seed, settings.kernel_max_size)
    if args.format == "table":
        return format_report_table(rows) + "\n"
    meta = {"meta": {"blocks": args.blocks, "trials": args.trials, "seed": args.seed}}
    lines = [json.dumps(meta)] + [json.dumps(row.to_dict()) for row in rows]
    return "\n".join(lines) + "\n"


def _gen_random(args: argparse.Namespace, settings: Settings) -> str:
    return dump_json(gen_random(args.kind, args.k, args.d, args.seed, args.bound))


HANDLERS: Dict[str, Callable[[argparse.Namespace, Settings], str]] = {
    "check-grade": _check_grade,
    "interference": _interference,
    "delta": _delta,
    "reconstruct": _reconstruct,
    "roundtrip": _roundtrip,
    "diagonal": _diagonal,
    "symmetrize": _symmetrize,
    "polarize": _polarize,
    "marginal": _marginal,
    "variation": _variation,
    "semivariation": _semivariation,
    "separate-additivity": _separate_additivity,
    "diag-length": _diag_length,
    "kernel-demo": _kernel_demo,
    "gen-random": _gen_random,
}


def _grade(value: str) -> int:
    try:
        return validate_grade(int(value))
    except (ValueError, ValidationError) as e:
        raise argparse.ArgumentTypeError(str(e))


def _non_negative(value: str) -> int:
    number = int(value)
    if number < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return number


def _positive(value: str) -> int:
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return number


def create_parser() -> argparse.ArgumentParser:
    """Build the argument parser with one subcommand per operation."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", help="Output file (default stdout)")
    common.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")
    common.add_argument("--log-dir", help="Directory for JSON log files")
    common.add_argument("--metrics-file", help="Write Prometheus metrics to this file")

    with_input = argparse.ArgumentParser(add_help=False, parents=[common])
    with_input.add_argument("--input", required=True, help="JSON artifact to read")

    seeded = argparse.ArgumentParser(add_help=False)
    seeded.add_argument("--seed", type=_non_negative, default=0)
    seeded.add_argument("--trials", type=_positive, default=64)

    parser = argparse.ArgumentParser(
        prog="qmeasure",
        description="Exact computations with grade-d measures and polymeasures on finite spaces",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    p = sub.add_parser("check-grade", parents=[with_input], help="Exhaustive grade-d additivity check")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--grade", type=_grade, default=2)
    group.add_argument("--max-grade", type=_grade, help="Report the smallest additive grade up to this")

    p = sub.add_parser("interference", parents=[with_input], help="Interference of pairwise-disjoint sets")
    p.add_argument("--sets", nargs="+", required=True, metavar="KEY", help='Set keys such as "0,1"; "-" is empty')

    p = sub.add_parser("delta", parents=[with_input], help="Difference operator on the complement of a set")
    p.add_argument("--set", required=True, metavar="KEY")

    sub.add_parser("reconstruct", parents=[with_input], help="Symmetric bimeasure of a grade-2 measure")
    sub.add_parser("roundtrip", parents=[with_input], help="Grade-2 round trip and positivity checks")
    sub.add_parser("diagonal", parents=[with_input], help="Diagonal set function of a polymeasure")
    sub.add_parser("symmetrize", parents=[with_input], help="Average over slot permutations")

    p = sub.add_parser("polarize", parents=[with_input], help="Recover symmetrized values from a diagonal")
    p.add_argument("--sets", nargs="+", required=True, metavar="KEY")

    p = sub.add_parser("marginal", parents=[with_input], help="Marginal measure in one slot")
    p.add_argument("--slot", type=_non_negative, default=0)

    sub.add_parser("variation", parents=[with_input], help="Exact variation")

    p = sub.add_parser("semivariation", parents=[with_input, seeded], help="Semivariation, exact or sampled")
    p.add_argument("--mode", choices=SEMIVARIATION_MODES, default="exact")

    sub.add_parser("separate-additivity", parents=[with_input], help="Check a cylinder table")

    p = sub.add_parser("diag-length", parents=[with_input], help="Diagonal length of a box union")
    p.add_argument("--oracle", action="store_true", help="Also run the subdivision cross-check")

    p = sub.add_parser("kernel-demo", parents=[common, seeded], help="Variation growth of Walsh block kernels")
    p.add_argument("--blocks", type=_positive, default=6)
    p.add_argument("--format", choices=("json", "table"), default="json")

    p = sub.add_parser("gen-random", parents=[common], help="Seeded random artifact")
    p.add_argument("--kind", choices=RANDOM_KINDS, default="setfn")
    p.add_argument("--k", type=_positive, default=3)
    p.add_argument("--d", type=_positive, default=2)
    p.add_argument("--seed", type=_non_negative, default=0)
    p.add_argument("--bound", type=_positive, default=3)

    return parser


def _error(message: str, **position: Optional[int]) -> str:
    payload: Dict[str, Any] = {"error": message}
    payload.update({k: v for k, v in position.items() if v is not None})
    return dump_json(payload)


def run(argv: Optional[Sequence[str]] = None, settings: Optional[Settings] = None) -> int:
    """
    Parse arguments, run one command and write its output.

    Returns:
        0 on success, 1 on domain or input errors, 2 on usage errors
    """
    parser = create_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        settings = settings or load_settings()
    except ValidationError as e:
        write_output(_error(str(e)))
        return 1

    setup_logging(log_level=args.log_level or settings.log_level, log_dir=args.log_dir or settings.log_dir)
    metrics_file = args.metrics_file or settings.metrics_file

    try:
        text = HANDLERS[args.command](args, settings)
    except ArtifactError as e:
        logger.error(f"{args.command}: {e}")
        write_output(_error(str(e), line=e.line, column=e.column))
        return 1
    except ValidationError as e:
        logger.error(f"{args.command}: {e}")
        write_output(_error(str(e)))
        return 1

    if metrics_file:
        try:
            export_metrics(metrics_file)
        except OSError as e:
            logger.error(f"Cannot write metrics to {metrics_file}: {e}")
            write_output(_error(f"Cannot write {metrics_file}: {e.strerror}"))
            return 1

    try:
        write_output(text, args.output)
    except OSError as e:
        write_output(_error(f"Cannot write {args.output}: {e.strerror}"))
        return 1

    return 0
