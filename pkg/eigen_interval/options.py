import os
from typing import Any

from pydantic import BaseModel, Field, model_validator

__all__ = [
    "PsiOptions",
    "SamplingOptions",
    "psi_options",
    "sampling_options",
]


class PsiOptions(BaseModel):
    """Numerical settings of the exact evaluations."""

    model_config = {"frozen": True}

    initial_precision: int = Field(256, ge=64)
    bits_per_dimension: int = Field(12, ge=0)
    max_precision: int = Field(8192, ge=64)
    guard_bits: int = Field(64, ge=16)
    tolerance: float = Field(1e-12, gt=0)
    normalization_tolerance: float = Field(1e-9, gt=0)
    degenerate_sigma_ratio: float = Field(1e-3, ge=0)

    # 0 selects the adaptive ladder
    precision: int = Field(0, ge=0)

    @model_validator(mode="after")
    def check_fixed_precision(self) -> "PsiOptions":
        if 0 < self.precision < 64:
            raise ValueError("Fixed precision must be at least 64 bits.")
        return self

    def start_precision(self, dim: int) -> int:
        if self.precision:
            return self.precision
        return max(self.initial_precision, self.bits_per_dimension * dim)

    def precision_cap(self, dim: int) -> int:
        return max(self.max_precision, 2 * self.start_precision(dim))


def _default_workers() -> int:
    return min(8, os.cpu_count() or 1)


class SamplingOptions(BaseModel):
    """Monte Carlo sharding settings."""

    model_config = {"frozen": True}

    shard_size: int = Field(50_000, ge=1)
    workers: int = Field(default_factory=_default_workers, ge=1)


def psi_options(options: PsiOptions | None = None, **kwargs: Any) -> PsiOptions:
    if options is None:
        return PsiOptions(**kwargs)
    if kwargs:
        return PsiOptions.model_validate(options.model_dump() | kwargs)
    return options


def sampling_options(options: SamplingOptions | None = None) -> SamplingOptions:
    return options if options is not None else SamplingOptions()

