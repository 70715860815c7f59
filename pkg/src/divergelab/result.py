"""Tagged numeric result shared by the classical and quantum quantifiers.

Infinite values always come from an explicit support check, never from float
overflow, so a non-finite result is meaningful and safe to report.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NumericalConsistencyError

# Roundoff slightly below zero is clipped; anything below this is a bug.
NEGATIVE_CLIP = -1e-9


@dataclass(frozen=True)
class QuantifierResult:
    """Value of a distinguishability quantifier, possibly +inf.

    ``value`` is ``math.inf`` exactly when ``finite`` is False.
    """

    value: float
    finite: bool = True

    @classmethod
    def infinite(cls) -> "QuantifierResult":
        return cls(math.inf, finite=False)

    @classmethod
    def of(cls, value: float) -> "QuantifierResult":
        """Wrap a finite value, clipping tiny negative roundoff to 0."""
        value = float(value)
        if not math.isfinite(value):
            raise NumericalConsistencyError(
                f"non-finite value {value} reached result construction; "
                "infinite results must come from an explicit support check"
            )
        if value < 0.0:
            if value < NEGATIVE_CLIP:
                raise NumericalConsistencyError(
                    f"value {value} below the negativity clip {NEGATIVE_CLIP}"
                )
            value = 0.0
        return cls(value)

    def __float__(self) -> float:
        return self.value
