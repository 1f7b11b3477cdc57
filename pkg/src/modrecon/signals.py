"""Signal containers, bandlimited test signals, DFT lowpass filtering and metrics.

Band limits are expressed as a *centered bin* ``K``: the lowpass keeps DFT
bins ``k`` and ``N - k`` for ``0 <= k <= K`` and zeroes everything else,
including the Nyquist bin ``N/2``, so filtered real signals stay real.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, LengthMismatchError

__all__ = [
    "MetricOptions",
    "Signal1D",
    "Signal2D",
    "add_awgn",
    "centered_bins",
    "fft_lowpass_1d",
    "fft_lowpass_2d",
    "generate_bandlimited_1d",
    "generate_bandlimited_2d",
    "psnr_db",
    "snr_db",
]


def _check_length(n: int) -> None:
    if n < 2 or n % 2:
        raise DimensionError(f"record length must be even and >= 2, got {n}")


def _check_cutoff(n: int, cutoff_bin: int) -> None:
    if not 0 <= cutoff_bin < n // 2:
        raise DimensionError(
            f"cutoff bin {cutoff_bin} outside [0, {n // 2 - 1}] for length {n}"
        )


def _rng(seed: int) -> np.random.Generator:
    # accept negative or oversized seeds by folding into the 64-bit range
    return np.random.default_rng(int(seed) % 2**64)


def centered_bins(n: int) -> np.ndarray:
    """Signed integer frequency of each DFT bin, ``-N/2 .. N/2 - 1``."""
    return np.fft.fftfreq(n, d=1.0 / n).round().astype(np.int64)


@dataclass(frozen=True)
class Signal1D:
    samples: np.ndarray
    band_bin: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 1:
            raise DimensionError("Signal1D samples must be one-dimensional")
        _check_length(samples.size)
        _check_cutoff(samples.size, self.band_bin)
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return self.samples.size


@dataclass(frozen=True)
class Signal2D:
    samples: np.ndarray
    band_bins: tuple[int, int]

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 2:
            raise DimensionError("Signal2D samples must be two-dimensional")
        for n, k in zip(samples.shape, self.band_bins):
            _check_length(n)
            _check_cutoff(n, k)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "band_bins", tuple(int(k) for k in self.band_bins))

    @property
    def shape(self) -> tuple[int, int]:
        return self.samples.shape


@dataclass(frozen=True)
class MetricOptions:
    """Options shared by :func:`snr_db` and :func:`psnr_db`.

    ``trim_fraction_per_end`` is removed from *each* end before the SNR sums,
    so the default 0.05 ignores 10% of the record in total.
    """

    trim_fraction_per_end: float = 0.05
    peak_value: float = 255.0
    snr_cap_db: float = 300.0

    def __post_init__(self):
        if not 0.0 <= self.trim_fraction_per_end <= 0.45:
            raise ValueError("trim_fraction_per_end must lie in [0, 0.45]")
        if not self.peak_value > 0:
            raise ValueError("peak_value must be positive")

    def interior(self, n: int) -> slice:
        cut = math.ceil(self.trim_fraction_per_end * n - 1e-9)
        if n - 2 * cut < 2:
            raise DimensionError(f"trimming {cut} samples per end leaves < 2 of {n}")
        return slice(cut, n - cut)


def _lowpass_mask(n: int, cutoff_bin: int) -> np.ndarray:
    return np.abs(centered_bins(n)) <= cutoff_bin


def fft_lowpass_1d(x, cutoff_bin: int) -> np.ndarray:
    """Ideal DFT lowpass: keep centered bins ``|k| <= cutoff_bin``, unit gain."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    _check_cutoff(n, cutoff_bin)
    spectrum = np.fft.fft(x, axis=-1)
    spectrum[..., ~_lowpass_mask(n, cutoff_bin)] = 0.0
    return np.fft.ifft(spectrum, axis=-1).real


def fft_lowpass_2d(x, cutoffs: tuple[int, int]) -> np.ndarray:
    """Separable rectangular version of :func:`fft_lowpass_1d`."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise DimensionError("fft_lowpass_2d expects a 2-D array")
    (n1, n2), (k1, k2) = x.shape, cutoffs
    _check_cutoff(n1, k1)
    _check_cutoff(n2, k2)
    mask = np.outer(_lowpass_mask(n1, k1), _lowpass_mask(n2, k2))
    spectrum = np.fft.fft2(x)
    spectrum[~mask] = 0.0
    return np.fft.ifft2(spectrum).real


def generate_bandlimited_1d(n: int, cutoff_bin: int, seed: int) -> Signal1D:
    """Lowpass-filtered unit-variance white Gaussian noise."""
    _check_length(n)
    _check_cutoff(n, cutoff_bin)
    noise = _rng(seed).standard_normal(n)
    return Signal1D(fft_lowpass_1d(noise, cutoff_bin), cutoff_bin)


def generate_bandlimited_2d(
    shape: tuple[int, int], cutoffs: tuple[int, int], seed: int
) -> Signal2D:
    for n, k in zip(shape, cutoffs):
        _check_length(n)
        _check_cutoff(n, k)
    noise = _rng(seed).standard_normal(tuple(shape))
    return Signal2D(fft_lowpass_2d(noise, cutoffs), tuple(cutoffs))


def snr_db(reference, estimate, opts: MetricOptions = MetricOptions()) -> float:
    """Trimmed SNR ``10 log10(sum ref^2 / sum (ref - est)^2)`` in dB.

    For 2-D inputs the trim is applied along both axes.
    """
    ref = np.asarray(reference, dtype=float)
    est = np.asarray(estimate, dtype=float)
    if ref.shape != est.shape:
        raise LengthMismatchError(f"shape mismatch {ref.shape} vs {est.shape}")
    window = tuple(opts.interior(n) for n in ref.shape)
    ref, est = ref[window], est[window]
    err = float(np.sum((ref - est) ** 2))
    if err == 0.0:
        return opts.snr_cap_db
    return 10.0 * math.log10(float(np.sum(ref**2)) / err)


def psnr_db(reference, estimate, opts: MetricOptions = MetricOptions()) -> float:
    ref = np.asarray(reference, dtype=float)
    est = np.asarray(estimate, dtype=float)
    if ref.shape != est.shape:
        raise LengthMismatchError(f"shape mismatch {ref.shape} vs {est.shape}")
    mse = float(np.mean((ref - est) ** 2))
    if mse == 0.0:
        return opts.snr_cap_db
    return 10.0 * math.log10(opts.peak_value**2 / mse)


def add_awgn(x, target_snr_db: float, seed: int) -> np.ndarray:
    """Add white Gaussian noise scaled so the realized SNR is exactly the target."""
    x = np.asarray(x, dtype=float)
    energy = float(np.sum(x**2))
    if energy == 0.0:
        raise ValueError("cannot set an SNR relative to a zero-energy signal")
    noise = _rng(seed).standard_normal(x.shape)
    noise *= math.sqrt(energy / 10.0 ** (target_snr_db / 10.0) / float(np.sum(noise**2)))
    return x + noise
