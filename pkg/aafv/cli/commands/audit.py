import argparse
import logging
from pathlib import Path
from typing import List, Sequence, Tuple

from aafv.core.config import settings
from aafv.core.errors import AuditViolationError, ParameterError, ReportError
from aafv.core.seeding import SeedStream
from aafv.privacy.audit import MIN_AUDIT_SAMPLES, audit_epsilon, mechanism_for
from aafv.privacy.piecewise import check_epsilon
from aafv.schemas.schemas import AuditPair, AuditReport, Mechanism

logger = logging.getLogger(__name__)

AUDIT_FILE = "audit.json"

# the extreme pair first; the last pair checks identical inputs
INPUT_PAIRS: List[Tuple[float, float]] = [(-1.0, 1.0), (-1.0, 0.0), (0.0, 1.0), (-0.5, 0.5), (0.3, 0.3)]


def register(subparsers) -> None:
    parser = subparsers.add_parser("audit-ldp", help="Empirically audit a perturbation mechanism")
    parser.add_argument("--epsilon", type=float, required=True, help="Privacy budget")
    parser.add_argument(
        "--mechanism",
        choices=[m.value for m in Mechanism],
        default=Mechanism.PIECEWISE.value,
        help="Mechanism under test (passthrough is the negative control)",
    )
    parser.add_argument("--samples", type=int, default=1_000_000, help="Draws per input")
    parser.add_argument("--bins", type=int, default=20, help="Histogram bins on the mechanism output range")
    parser.add_argument("--slack", type=float, default=None, help=f"Binning slack (default {settings.AUDIT_SLACK})")
    parser.add_argument("--seed", type=int, default=0, help="Master seed of the audit draws")
    parser.add_argument("--out-dir", default=None, help="Directory for audit.json")
    parser.set_defaults(handler=cmd_audit_ldp)


def run_audit(
    epsilon: float,
    mechanism: Mechanism,
    samples: int,
    bins: int,
    slack: float,
    seed: int = 0,
    pairs: Sequence[Tuple[float, float]] = INPUT_PAIRS
) -> AuditReport:
    """
    Audit `mechanism` over a grid of input pairs against epsilon + slack.

    Raises:
    - ParameterError: Non-positive epsilon, too few samples, bad bins, or a
      piecewise epsilon too large to represent
    """
    epsilon = check_epsilon(epsilon)
    if slack < 0:
        raise ParameterError("audit slack must be >= 0")
    if samples < MIN_AUDIT_SAMPLES:
        raise ParameterError(f"audit needs at least {MIN_AUDIT_SAMPLES} samples, got {samples}")
    mechanism = Mechanism(mechanism)
    release = mechanism_for(mechanism, epsilon)
    streams = SeedStream(seed)
    bound = epsilon + slack

    audited = []
    for index, (t_a, t_b) in enumerate(pairs):
        result = audit_epsilon(
            release, t_a, t_b, samples, bins, streams.derive("audit", mechanism.value, index)
        )
        audited.append(
            AuditPair(
                t_a=result.t_a,
                t_b=result.t_b,
                bin_edges=result.bin_edges.tolist(),
                density_a=result.density_a.tolist(),
                density_b=result.density_b.tolist(),
                max_log_ratio=result.max_log_ratio,
                unbounded_bins=result.unbounded_bins,
                one_sided_peak=result.one_sided_peak,
                passed=result.passes(bound),
            )
        )
        logger.info(
            f"{mechanism.value} ({t_a}, {t_b}): max log ratio {result.max_log_ratio}, "
            f"one-sided bins {result.unbounded_bins}, bound {bound:.4f}"
        )
    return AuditReport(
        mechanism=mechanism,
        epsilon=epsilon,
        samples=samples,
        bins=bins,
        slack=slack,
        bound=bound,
        pairs=audited,
        passed=all(p.passed for p in audited),
    )


def cmd_audit_ldp(args: argparse.Namespace) -> int:
    """
    Write audit.json and fail with AuditViolationError (exit 3) when any
    input pair exceeds the bound.
    """
    slack = args.slack if args.slack is not None else settings.AUDIT_SLACK
    report = run_audit(args.epsilon, Mechanism(args.mechanism), args.samples, args.bins, slack, args.seed)
    out_dir = Path(args.out_dir or settings.OUTPUT_DIR)
    path = out_dir / AUDIT_FILE
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        path.write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
    except OSError as exc:
        raise ReportError(f"cannot write {path}: {exc}") from exc
    if not report.passed:
        failed = [f"({p.t_a}, {p.t_b})" for p in report.pairs if not p.passed]
        raise AuditViolationError(
            f"{report.mechanism.value} exceeded epsilon + slack = {report.bound:.4f} for pairs {', '.join(failed)}"
        )
    logger.info(f"Audit passed, report at {path}")
    return 0
