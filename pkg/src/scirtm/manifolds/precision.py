"""
Working precision for the manifold computations.

Each PrecisionContext owns a private mpmath context, so jobs at different
precisions never disturb each other or the global ``mpmath.mp``.
"""

import dataclasses
import functools
import math

import mpmath

from ..errors import DomainError

MIN_BITS = 64
MAX_BITS = 2048


@dataclasses.dataclass(frozen=True)
class PrecisionContext:
    mantissa_bits: int = 256

    def __post_init__(self):
        if not MIN_BITS <= int(self.mantissa_bits) <= MAX_BITS:
            raise DomainError(
                f"mantissa_bits must lie in [{MIN_BITS}, {MAX_BITS}], got {self.mantissa_bits}"
            )

    def __reduce__(self):
        return (PrecisionContext, (self.mantissa_bits,))

    @functools.cached_property
    def ctx(self) -> mpmath.ctx_mp.MPContext:
        ctx = mpmath.MPContext()
        ctx.prec = int(self.mantissa_bits)
        return ctx

    @property
    def dps(self) -> int:
        return self.ctx.dps

    @property
    def residual_target(self):
        """10^(-0.8 * bits * log10 2): the conjugacy residual a series must reach."""
        return self.ctx.mpf(10) ** (-0.8 * self.mantissa_bits * math.log10(2))

    def doubled(self) -> "PrecisionContext":
        return PrecisionContext(min(2 * self.mantissa_bits, MAX_BITS))
