"""Decide and certify herdability of linear systems ``x' = A x + B u``.

A pair is herdable when its reachable directions contain a strictly positive
vector.  :func:`herdable` answers exactly; the structural checks in
:mod:`herdkit.unisign`, :mod:`herdkit.leaders` and :mod:`herdkit.trees` give
certified answers from sign patterns alone.
"""

__version__ = "0.1.0"

from .errors import HerdkitError
from .herding import HerdingPlan, simulate, synthesize_plan
from .linalg import SignClass, as_matrix, controllability_matrix
from .oracle import HerdabilityVerdict, Status, herdable, positive_image_feasible, verify_certificate, verify_witness

__all__ = [
    "HerdabilityVerdict",
    "HerdingPlan",
    "HerdkitError",
    "SignClass",
    "Status",
    "as_matrix",
    "controllability_matrix",
    "herdable",
    "positive_image_feasible",
    "simulate",
    "synthesize_plan",
    "verify_certificate",
    "verify_witness",
]
