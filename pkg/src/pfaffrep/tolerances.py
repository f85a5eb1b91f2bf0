"""Global tolerance policy for all numerical comparisons.

All arithmetic is complex double precision; every operation that decides
"is this zero / singular / equal" consults a :class:`TolerancePolicy`
rather than a hard-coded constant.  The three thresholds are ordered:
``zero_tol`` prunes coefficients, ``rank_tol`` drives rank decisions,
``match_tol`` accepts or rejects residuals of identities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TolerancePolicy:
    zero_tol: float = 1e-9
    rank_tol: float = 1e-8
    match_tol: float = 1e-6

    def __post_init__(self):
        if not (0 < self.zero_tol <= self.rank_tol <= self.match_tol):
            raise ValueError(
                "tolerances must satisfy 0 < zero_tol <= rank_tol <= match_tol, "
                f"got {self.zero_tol}, {self.rank_tol}, {self.match_tol}"
            )


DEFAULT_POLICY = TolerancePolicy()


def require_finite(*values: complex) -> None:
    """Reject NaN or infinite components before they propagate."""
    for z in values:
        z = complex(z)
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise ValueError(f"non-finite scalar {z!r}")


def require_finite_array(a: np.ndarray) -> None:
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValueError("array contains non-finite entries")
