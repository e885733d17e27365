"""
Empirical epsilon audit.

Both inputs are pushed through the mechanism many times; the outputs are
histogrammed on the mechanism's output range and the largest absolute log
ratio of bin counts is compared against epsilon. A bin that is populated for
one input but empty for the other is one-sided; it breaks the bound when its
count alone, set against a single draw on the empty side, exceeds it.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from aafv.core.errors import ParameterError
from aafv.privacy.laplace import laplace_perturb
from aafv.privacy.piecewise import check_epsilon, piecewise_params, piecewise_perturb
from aafv.schemas.schemas import Mechanism

logger = logging.getLogger(__name__)

MIN_AUDIT_SAMPLES = 100_000
# Laplace outputs are histogrammed on the input range widened by this many noise scales
LAPLACE_RANGE_SCALES = 3.0

ReleaseFn = Callable[[np.ndarray, np.random.Generator], np.ndarray]


@dataclass(frozen=True)
class AuditedMechanism:
    kind: Mechanism
    epsilon: float
    release: ReleaseFn
    output_range: Tuple[float, float]

    def __call__(self, t: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        return self.release(t, rng)


@dataclass(frozen=True)
class AuditResult:
    t_a: float
    t_b: float
    bin_edges: np.ndarray
    density_a: np.ndarray
    density_b: np.ndarray
    max_log_ratio: Optional[float]
    unbounded_bins: int
    one_sided_peak: int = 0

    def passes(self, bound: float) -> bool:
        if self.max_log_ratio is not None and self.max_log_ratio > bound:
            return False
        return self.one_sided_peak == 0 or math.log(self.one_sided_peak) <= bound


def mechanism_for(kind: Mechanism, epsilon: float) -> AuditedMechanism:
    """
    Mechanisms under test, all taking inputs in [-1, 1].

    Piecewise is histogrammed on [-T, T]. Laplace uses sensitivity 2 (the
    width of the input range) and is histogrammed on [-1, 1] widened by
    LAPLACE_RANGE_SCALES noise scales. Passthrough releases the input
    unchanged on [-1, 1] and serves as a negative control.

    Raises:
    - ParameterError: Invalid epsilon, or piecewise at an epsilon too large to represent
    """
    kind = Mechanism(kind)
    epsilon = check_epsilon(epsilon)
    if kind == Mechanism.PIECEWISE:
        params = piecewise_params(epsilon)
        return AuditedMechanism(
            kind, epsilon, lambda t, rng: piecewise_perturb(t, params, rng), (-params.T, params.T)
        )
    if kind == Mechanism.LAPLACE:
        reach = 1.0 + LAPLACE_RANGE_SCALES * 2.0 / epsilon
        return AuditedMechanism(
            kind, epsilon, lambda t, rng: laplace_perturb(t, 2.0, epsilon, rng), (-reach, reach)
        )
    return AuditedMechanism(
        kind, epsilon, lambda t, rng: np.array(t, dtype=np.float64, copy=True), (-1.0, 1.0)
    )


def audit_epsilon(
    mechanism: AuditedMechanism,
    t_a: float,
    t_b: float,
    n_samples: int,
    n_bins: int,
    rng: np.random.Generator
) -> AuditResult:
    """
    Measure the worst binned log-density ratio between two inputs.

    Parameters:
    - mechanism: Release function with its output range
    - t_a, t_b: Inputs in [-1, 1]
    - n_samples: Draws per input, at least 1e5
    - n_bins: Histogram bins on the output range
    - rng: Generator shared by both runs

    Returns:
    - AuditResult: Per-bin densities, the max ratio over commonly populated
      bins, the number of one-sided bins and the largest one-sided count

    Raises:
    - ParameterError: Bad inputs, or no bin populated at all
    """
    if abs(t_a) > 1.0 or abs(t_b) > 1.0:
        raise ParameterError("audit inputs must lie in [-1, 1]")
    if n_samples < MIN_AUDIT_SAMPLES:
        raise ParameterError(f"audit needs at least {MIN_AUDIT_SAMPLES} samples, got {n_samples}")
    if n_bins < 1:
        raise ParameterError("audit needs at least one bin")

    low, high = mechanism.output_range
    edges = np.linspace(low, high, n_bins + 1)
    out_a = np.asarray(mechanism(np.full(n_samples, float(t_a)), rng))
    out_b = np.asarray(mechanism(np.full(n_samples, float(t_b)), rng))
    counts_a, _ = np.histogram(out_a, bins=edges)
    counts_b, _ = np.histogram(out_b, bins=edges)

    both = (counts_a > 0) & (counts_b > 0)
    one_sided = (counts_a > 0) ^ (counts_b > 0)
    if not both.any() and not one_sided.any():
        raise ParameterError(f"degenerate audit: no output fell inside [{low}, {high}]")
    max_ratio = None
    if both.any():
        ratios = np.abs(np.log(counts_a[both] / counts_b[both]))
        max_ratio = float(ratios.max())
    peak = int(np.maximum(counts_a, counts_b)[one_sided].max()) if one_sided.any() else 0

    width = edges[1] - edges[0]
    result = AuditResult(
        t_a=float(t_a),
        t_b=float(t_b),
        bin_edges=edges,
        density_a=counts_a / (n_samples * width),
        density_b=counts_b / (n_samples * width),
        max_log_ratio=max_ratio,
        unbounded_bins=int(one_sided.sum()),
        one_sided_peak=peak,
    )
    logger.debug(
        f"Audit t_a={t_a} t_b={t_b}: max log ratio {max_ratio} one-sided bins {result.unbounded_bins}"
    )
    return result
