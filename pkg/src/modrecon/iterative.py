"""Relaxation iteration around the sample/interpolate/reconstruct chain.

The forward operator ``D`` re-samples a candidate signal, interpolates it
with the same kernel and runs the modular reconstruction. Given the
observation ``y`` (the modular reconstruction of the measured interpolated
waveform) the iteration is

    x_0 = lam * y,    x_{k+1} = x_k + lam * (y - D(x_k)).

In the DFT domain each in-band bin evolves by the factor ``1 - lam * G(k)``,
where ``G`` is the replica gain of the bank in use. The hybrid variants put
the (classical or optimized) mixer inside ``D``, which pulls ``G`` toward 1
and speeds up convergence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import DivergenceError
from .interpolators import Kernel, decimate, decimate_2d, interpolate_1d, interpolate_2d
from .modular import (
    ModuleBank,
    ModuleBank2D,
    modular_reconstruct_1d,
    modular_reconstruct_2d,
    zero_bank,
)

__all__ = [
    "IterativeConfig",
    "distortion_operator",
    "distortion_operator_2d",
    "iterates",
    "iterates_2d",
    "iterative_reconstruct",
    "iterative_reconstruct_2d",
]

VARIANTS = ("plain", "hybrid_classical", "hybrid_optimized")
DIVERGENCE_RATIO = 1e6


@dataclass(frozen=True)
class IterativeConfig:
    iterations: int = 10
    relaxation: float = 1.0
    variant: str = "plain"
    bank: ModuleBank | ModuleBank2D | None = None

    def __post_init__(self):
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if not 0.0 < self.relaxation < 2.0:
            raise ValueError("relaxation must lie in (0, 2)")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.variant != "plain" and self.bank is None:
            raise ValueError(f"variant {self.variant!r} needs a module bank")


def distortion_operator(x, kernel: Kernel, bank: ModuleBank | None, cutoff_bin: int) -> np.ndarray:
    """``D(x)``: decimate, interpolate, modular reconstruction (``bank=None`` is plain lowpass)."""
    bank = zero_bank(kernel.period) if bank is None else bank
    s = interpolate_1d(decimate(x, kernel.period), kernel)
    return modular_reconstruct_1d(s, bank, cutoff_bin)


def distortion_operator_2d(
    x, kernels: tuple[Kernel, Kernel], bank: ModuleBank2D | None, cutoffs: tuple[int, int]
) -> np.ndarray:
    periods = (kernels[0].period, kernels[1].period)
    bank = ModuleBank2D.zero(periods) if bank is None else bank
    s = interpolate_2d(decimate_2d(x, periods), kernels)
    return modular_reconstruct_2d(s, bank, cutoffs)


def _relax(y: np.ndarray, forward, cfg: IterativeConfig) -> Iterator[np.ndarray]:
    lam = cfg.relaxation
    limit = DIVERGENCE_RATIO * max(float(np.sum(y**2)), np.finfo(float).tiny)
    x = lam * y
    yield x
    for k in range(cfg.iterations):
        x = x + lam * (y - forward(x))
        if not float(np.sum(x**2)) <= limit:
            raise DivergenceError(f"iterate energy exceeded {DIVERGENCE_RATIO:g}x observation at step {k + 1}")
        yield x


def iterates(s_observed, kernel: Kernel, cfg: IterativeConfig, cutoff_bin: int) -> Iterator[np.ndarray]:
    """Yield ``x_0, x_1, ..., x_iterations``."""
    bank = None if cfg.variant == "plain" else cfg.bank
    if bank is not None and bank.period != kernel.period:
        raise ValueError(f"bank period {bank.period} != kernel period {kernel.period}")
    obs_bank = zero_bank(kernel.period) if bank is None else bank
    y = modular_reconstruct_1d(s_observed, obs_bank, cutoff_bin)
    return _relax(y, lambda x: distortion_operator(x, kernel, bank, cutoff_bin), cfg)


def iterative_reconstruct(s_observed, kernel: Kernel, cfg: IterativeConfig, cutoff_bin: int) -> np.ndarray:
    x = None
    for x in iterates(s_observed, kernel, cfg, cutoff_bin):
        pass
    return x


def iterates_2d(
    s_observed, kernels: tuple[Kernel, Kernel], cfg: IterativeConfig, cutoffs: tuple[int, int]
) -> Iterator[np.ndarray]:
    periods = (kernels[0].period, kernels[1].period)
    bank = None if cfg.variant == "plain" else cfg.bank
    if bank is not None and bank.periods != periods:
        raise ValueError(f"bank periods {bank.periods} != kernel periods {periods}")
    obs_bank = ModuleBank2D.zero(periods) if bank is None else bank
    y = modular_reconstruct_2d(s_observed, obs_bank, cutoffs)
    return _relax(y, lambda x: distortion_operator_2d(x, kernels, bank, cutoffs), cfg)


def iterative_reconstruct_2d(
    s_observed, kernels: tuple[Kernel, Kernel], cfg: IterativeConfig, cutoffs: tuple[int, int]
) -> np.ndarray:
    x = None
    for x in iterates_2d(s_observed, kernels, cfg, cutoffs):
        pass
    return x
