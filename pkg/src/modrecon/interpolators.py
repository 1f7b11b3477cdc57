"""Interpolation kernels and the decimate / interpolate operators.

All operators are circular: a record of length ``N`` is treated as one
period, so the time-domain convolution here agrees exactly with products
of ``N``-point DFTs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, KernelError

__all__ = [
    "Kernel",
    "SampledSeries",
    "circular_taps",
    "custom_kernel",
    "decimate",
    "decimate_2d",
    "interpolate_1d",
    "interpolate_2d",
    "make_kernel",
    "parse_kernel",
]

KINDS = ("sample_hold", "linear", "nth_order_hold", "cubic_keys", "custom")


@dataclass(frozen=True)
class Kernel:
    """Impulse response ``h[n]`` with ``taps[i]`` sitting at ``n = anchor + i``.

    ``interpolating`` records whether ``h[iT] = delta[i]`` holds on the
    sampling lattice; it is computed at construction.
    """

    kind: str
    taps: tuple[float, ...]
    anchor: int
    period: int
    order: int | None = None
    a: float | None = None
    interpolating: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise KernelError(f"unknown kernel kind {self.kind!r}")
        if self.period < 1:
            raise KernelError(f"period must be >= 1, got {self.period}")
        if len(self.taps) < 1:
            raise KernelError("kernel needs at least one tap")
        taps = tuple(float(t) for t in self.taps)
        object.__setattr__(self, "taps", taps)
        object.__setattr__(self, "interpolating", _lattice_property(taps, self.anchor, self.period))

    @property
    def label(self) -> str:
        """Short name used on the command line and in coefficient tables."""
        if self.kind == "sample_hold":
            return "sh"
        if self.kind == "linear":
            return "linear"
        if self.kind == "nth_order_hold":
            return f"hold:{self.order}"
        if self.kind == "cubic_keys":
            return f"cubic:{self.a!r}"
        return "custom"

    def positions(self) -> np.ndarray:
        return self.anchor + np.arange(len(self.taps))


def _lattice_property(taps, anchor: int, period: int, tol: float = 1e-12) -> bool:
    seen_origin = False
    for i, value in enumerate(taps):
        pos = anchor + i
        if pos % period:
            continue
        if pos == 0:
            seen_origin = True
            if abs(value - 1.0) > tol:
                return False
        elif abs(value) > tol:
            return False
    return seen_origin


def _keys(x: np.ndarray, a: float) -> np.ndarray:
    ax = np.abs(x)
    near = ((a + 2) * ax - (a + 3)) * ax**2 + 1
    far = ((a * ax - 5 * a) * ax + 8 * a) * ax - 4 * a
    return np.where(ax <= 1, near, np.where(ax < 2, far, 0.0))


def make_kernel(kind: str, period: int, order: int | None = None, a: float = -0.5) -> Kernel:
    """Build one of the built-in kernels for sampling period ``period``.

    Parameters
    ----------
    kind : str
        ``"sample_hold"``, ``"linear"``, ``"nth_order_hold"`` or ``"cubic_keys"``.
    period : int
        Samples between retained points (``T``).
    order : int, optional
        Hold order for ``"nth_order_hold"``; order 0 is sample-and-hold and
        order 1 is linear interpolation.
    a : float
        Free parameter of the Keys cubic kernel.
    """
    if period < 1:
        raise KernelError(f"period must be >= 1, got {period}")
    T = period
    if kind == "sample_hold":
        return Kernel(kind, (1.0,) * T, 0, T)
    if kind == "linear":
        n = np.arange(-(T - 1), T)
        return Kernel(kind, tuple(1.0 - np.abs(n) / T), -(T - 1), T)
    if kind == "nth_order_hold":
        if order is None or order < 0:
            raise KernelError(f"hold order must be a non-negative integer, got {order}")
        taps = np.ones(T)
        for _ in range(order):
            taps = np.convolve(taps, np.ones(T))
        taps /= float(T) ** order
        anchor = 0 if order == 0 else -((len(taps) - 1) // 2)
        return Kernel(kind, tuple(taps), anchor, T, order=order)
    if kind == "cubic_keys":
        n = np.arange(-(2 * T - 1), 2 * T)
        return Kernel(kind, tuple(_keys(n / T, a)), -(2 * T - 1), T, a=float(a))
    raise KernelError(f"unknown kernel kind {kind!r}")


def custom_kernel(taps, anchor: int, period: int) -> Kernel:
    return Kernel("custom", tuple(np.asarray(taps, dtype=float)), int(anchor), int(period))


def parse_kernel(text: str, period: int) -> Kernel:
    """Parse ``sh``, ``linear``, ``hold:<n>`` or ``cubic[:a]``."""
    name, _, param = text.partition(":")
    if name == "sh" and not param:
        return make_kernel("sample_hold", period)
    if name == "linear" and not param:
        return make_kernel("linear", period)
    if name == "hold" and param:
        try:
            order = int(param)
        except ValueError:
            raise KernelError(f"bad hold order in {text!r}") from None
        return make_kernel("nth_order_hold", period, order=order)
    if name == "cubic":
        try:
            a = float(param) if param else -0.5
        except ValueError:
            raise KernelError(f"bad cubic parameter in {text!r}") from None
        return make_kernel("cubic_keys", period, a=a)
    raise KernelError(f"unrecognised kernel spec {text!r}")


def circular_taps(kernel: Kernel, n: int) -> np.ndarray:
    """The kernel wrapped into one period of length ``n``."""
    if len(kernel.taps) >= n:
        raise KernelError(f"kernel with {len(kernel.taps)} taps does not fit in {n} points")
    h = np.zeros(n)
    np.add.at(h, kernel.positions() % n, kernel.taps)
    return h


@dataclass(frozen=True)
class SampledSeries:
    values: np.ndarray
    period: int
    origin_length: int

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if self.origin_length % self.period or values.size * self.period != self.origin_length:
            raise DimensionError(
                f"{values.size} samples at period {self.period} do not span {self.origin_length}"
            )
        object.__setattr__(self, "values", values)


def decimate(x, period: int) -> SampledSeries:
    """Keep every ``period``-th sample starting at index 0."""
    samples = np.asarray(getattr(x, "samples", x), dtype=float)
    n = samples.size
    if period < 1 or n % period:
        raise DimensionError(f"length {n} is not divisible by period {period}")
    return SampledSeries(samples[::period].copy(), period, n)


def decimate_2d(x, periods: tuple[int, int]) -> np.ndarray:
    samples = np.asarray(getattr(x, "samples", x), dtype=float)
    for n, T in zip(samples.shape, periods):
        if T < 1 or n % T:
            raise DimensionError(f"length {n} is not divisible by period {T}")
    return samples[:: periods[0], :: periods[1]].copy()


def _interpolate_axis(values: np.ndarray, kernel: Kernel, axis: int) -> np.ndarray:
    values = np.moveaxis(np.asarray(values, dtype=float), axis, 0)
    T = kernel.period
    m = values.shape[0]
    n = m * T
    if len(kernel.taps) >= n:
        raise KernelError(f"kernel with {len(kernel.taps)} taps does not fit in {n} points")
    out = np.zeros((n,) + values.shape[1:])
    base = np.arange(m) * T
    for pos, tap in zip(kernel.positions(), kernel.taps):
        if tap != 0.0:
            out[(base + pos) % n] += tap * values
    return np.moveaxis(out, 0, axis)


def interpolate_1d(y: SampledSeries, kernel: Kernel) -> np.ndarray:
    """``s[n] = sum_k y[k] h[(n - kT) mod N]``.

    Works tap by tap in the time domain, so interpolating kernels reproduce
    the retained samples bit-exactly.
    """
    if kernel.period != y.period:
        raise DimensionError(f"kernel period {kernel.period} != series period {y.period}")
    return _interpolate_axis(y.values, kernel, 0)


def interpolate_2d(y, kernels: tuple[Kernel, Kernel]) -> np.ndarray:
    """Separable 2-D interpolation of a decimated grid (axis 0, then axis 1)."""
    y = np.asarray(y, dtype=float)
    if y.ndim != 2:
        raise DimensionError("interpolate_2d expects a 2-D grid")
    rows = _interpolate_axis(y, kernels[0], 0)
    return _interpolate_axis(rows, kernels[1], 1)
