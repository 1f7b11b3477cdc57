"""Cosine module banks and the modular reconstruction operator.

A bank with coefficients ``c_1..c_M`` for period ``T`` multiplies the
interpolated waveform by the mixer

    m[n] = 1 + sum_j 2 c_j cos(2 pi j n / T)

before an ideal DFT lowpass. Cosines at ``j > floor(T/2)`` alias onto
``(-1)^n`` times lower modules, so such banks are rejected outright.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ModuleCountError
from .signals import fft_lowpass_1d, fft_lowpass_2d

__all__ = [
    "ModuleBank",
    "ModuleBank2D",
    "classical_bank",
    "impulse_train_bank",
    "max_modules",
    "mixer_1d",
    "mixer_2d",
    "modular_reconstruct_1d",
    "modular_reconstruct_2d",
    "modulate_1d",
    "modulate_2d",
    "zero_bank",
]


def max_modules(period: int) -> int:
    if period < 1:
        raise DimensionError(f"period must be >= 1, got {period}")
    return period // 2


def _check_count(m: int, period: int) -> None:
    if m > max_modules(period):
        raise ModuleCountError(
            f"{m} modules requested but at most floor(T/2) = {max_modules(period)} "
            f"can be applied for T={period}; higher cosines alias onto lower ones"
        )


@dataclass(frozen=True)
class ModuleBank:
    period: int
    coeffs: tuple[float, ...]

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coeffs)
        if not all(np.isfinite(coeffs)):
            raise ValueError("bank coefficients must be finite")
        _check_count(len(coeffs), self.period)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def modules(self) -> int:
        return len(self.coeffs)


def zero_bank(period: int) -> ModuleBank:
    """The identity mixer (no modules)."""
    return ModuleBank(period, ())


def classical_bank(period: int, modules: int) -> ModuleBank:
    return ModuleBank(period, (1.0,) * modules)


def impulse_train_bank(period: int) -> ModuleBank:
    """Coefficients ``(1, ..., 1, 1/2)`` whose mixer is ``T`` times an impulse train."""
    if period < 2 or period % 2:
        raise DimensionError(
            f"impulse-train bank needs an even period, got {period}; for odd T the "
            "all-ones bank with (T-1)/2 modules already equals the impulse train"
        )
    half = period // 2
    return ModuleBank(period, (1.0,) * (half - 1) + (0.5,))


def _cosine_rows(period: int, modules: int, n: int) -> np.ndarray:
    """Row ``j`` holds ``cos(2 pi j t / T)`` for ``t = 0..n-1``.

    The argument is reduced modulo ``T`` in integers first, so equal residues
    give bit-identical values.
    """
    j = np.arange(modules + 1)[:, None]
    t = np.arange(n)[None, :]
    return np.cos(2.0 * np.pi * ((j * t) % period) / period)


def mixer_1d(n: int, bank: ModuleBank) -> np.ndarray:
    weights = np.concatenate(([1.0], 2.0 * np.asarray(bank.coeffs)))
    return weights @ _cosine_rows(bank.period, bank.modules, n)


def _check_divisible(n: int, period: int) -> None:
    if n % period:
        raise DimensionError(f"length {n} is not divisible by period {period}")


def modulate_1d(s, bank: ModuleBank) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    _check_divisible(s.size, bank.period)
    return s * mixer_1d(s.size, bank)


def _check_cutoff(n: int, period: int, cutoff_bin: int) -> None:
    # strict: replicas shifted by N/T must not fold into the passband
    if not 0 <= cutoff_bin or 2 * period * cutoff_bin >= n:
        raise DimensionError(
            f"cutoff bin {cutoff_bin} must satisfy 0 <= K < N/(2T) = {n / (2 * period):g}"
        )


def modular_reconstruct_1d(s, bank: ModuleBank, cutoff_bin: int) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    _check_divisible(s.size, bank.period)
    _check_cutoff(s.size, bank.period, cutoff_bin)
    return fft_lowpass_1d(modulate_1d(s, bank), cutoff_bin)


@dataclass(frozen=True)
class ModuleBank2D:
    """Lattice bank: ``coeffs[j1, j2]`` weights the pair of cosines at ``(j1, j2)``.

    ``coeffs[0, 0]`` is the unity path and must be 1.
    """

    periods: tuple[int, int]
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=float, copy=True)
        if coeffs.ndim != 2:
            raise DimensionError("2-D bank coefficients must form a matrix")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("bank coefficients must be finite")
        if coeffs[0, 0] != 1.0:
            raise ValueError("coeffs[0, 0] is the unity path and must equal 1")
        periods = tuple(int(T) for T in self.periods)
        for m, T in zip(coeffs.shape, periods):
            _check_count(m - 1, T)
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "periods", periods)

    @property
    def modules(self) -> tuple[int, int]:
        return (self.coeffs.shape[0] - 1, self.coeffs.shape[1] - 1)

    @classmethod
    def separable(cls, first: ModuleBank, second: ModuleBank) -> ModuleBank2D:
        a = np.concatenate(([1.0], first.coeffs))
        b = np.concatenate(([1.0], second.coeffs))
        return cls((first.period, second.period), np.outer(a, b))

    @classmethod
    def zero(cls, periods: tuple[int, int], modules: tuple[int, int] = (0, 0)) -> ModuleBank2D:
        coeffs = np.zeros((modules[0] + 1, modules[1] + 1))
        coeffs[0, 0] = 1.0
        return cls(periods, coeffs)

    @classmethod
    def classical(cls, periods: tuple[int, int], modules: tuple[int, int]) -> ModuleBank2D:
        return cls(periods, np.ones((modules[0] + 1, modules[1] + 1)))


def mixer_2d(shape: tuple[int, int], bank: ModuleBank2D) -> np.ndarray:
    """``sum_{j1,j2} w_j1 w_j2 c[j1,j2] cos(2 pi j1 n1/T1) cos(2 pi j2 n2/T2)``
    with ``w_0 = 1`` and ``w_j = 2`` otherwise."""
    (m1, m2), (T1, T2) = bank.modules, bank.periods
    rows = _cosine_rows(T1, m1, shape[0])
    cols = _cosine_rows(T2, m2, shape[1])
    rows[1:] *= 2.0
    cols[1:] *= 2.0
    return rows.T @ bank.coeffs @ cols


def modulate_2d(s, bank: ModuleBank2D) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if s.ndim != 2:
        raise DimensionError("modulate_2d expects a 2-D grid")
    for n, T in zip(s.shape, bank.periods):
        _check_divisible(n, T)
    return s * mixer_2d(s.shape, bank)


def modular_reconstruct_2d(s, bank: ModuleBank2D, cutoffs: tuple[int, int]) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if s.ndim != 2:
        raise DimensionError("modular_reconstruct_2d expects a 2-D grid")
    for n, T, k in zip(s.shape, bank.periods, cutoffs):
        _check_divisible(n, T)
        _check_cutoff(n, T, k)
    return fft_lowpass_2d(modulate_2d(s, bank), cutoffs)
