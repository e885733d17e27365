from aafv.privacy.audit import AuditedMechanism, AuditResult, audit_epsilon, mechanism_for
from aafv.privacy.laplace import clip_and_perturb, laplace_perturb
from aafv.privacy.piecewise import (
    PiecewiseParams,
    interval,
    perturb_predictions,
    piecewise_params,
    piecewise_perturb,
)

__all__ = [
    "AuditResult",
    "AuditedMechanism",
    "PiecewiseParams",
    "audit_epsilon",
    "clip_and_perturb",
    "interval",
    "laplace_perturb",
    "mechanism_for",
    "perturb_predictions",
    "piecewise_params",
    "piecewise_perturb",
]
