"""Least-squares design of module coefficients.

With the kernel spectrum normalized as ``Hbar = DFT_N(h) / T``, the modular
reconstruction scales every in-band bin of the original signal by

    G(k) = sum_{j=-M..M} c_|j| Hbar((k - j N/T) mod N),   c_0 = 1,

so exact recovery means ``G(k) = 1`` across the passband. Writing
``G(k) - 1 = sum_j c_j Hbar_j(k) - (1 - Hbar(k))`` gives an overdetermined
linear system in the real unknowns ``c_1..c_M``. ``Hbar`` is complex for
asymmetric kernels (sample-and-hold), so real and imaginary parts are
stacked into one real system.

When ``T`` is even the shifts ``+T/2`` and ``-T/2`` land on the same bin;
the column for ``j = T/2`` is ``2 Hbar(k - N/2)``, which is exactly what the
mixer's ``2 c cos(pi n)`` term contributes. The impulse-train bank
``(1, ..., 1, 1/2)`` is therefore an exact zero-residual point for every
interpolating kernel.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import (
    DegenerateSystemError,
    DimensionError,
    KeyNotFoundError,
    LengthMismatchError,
    MalformedFileError,
    ModuleCountError,
)
from .interpolators import Kernel, circular_taps
from .modular import ModuleBank, ModuleBank2D, max_modules

__all__ = [
    "CoeffRecord",
    "DesignSystem",
    "DesignSystem2D",
    "assemble_system_1d",
    "assemble_system_2d",
    "build_hj",
    "default_passband",
    "find_record",
    "kernel_spectrum",
    "load_coeff_table",
    "replica_gain",
    "residual_error",
    "save_coeff_table",
    "solve_coefficients_1d",
    "solve_coefficients_2d",
    "solve_least_squares",
    "update_coeff_table",
]

RANK_TOL = 1e-10
TABLE_ENV = "MODRECON_COEFF_TABLE"


def kernel_spectrum(kernel: Kernel, n: int) -> np.ndarray:
    """Normalized ``n``-point kernel spectrum ``DFT(h) / T`` (complex array)."""
    if n % kernel.period:
        raise DimensionError(f"length {n} is not divisible by period {kernel.period}")
    return np.fft.fft(circular_taps(kernel, n)) / kernel.period


def build_hj(spectrum: np.ndarray, j: int, period: int) -> np.ndarray:
    """``Hbar((k - jN/T) mod N) + Hbar((k + jN/T) mod N)`` for every bin ``k``."""
    spectrum = np.asarray(spectrum)
    n = spectrum.size
    if n % period:
        raise DimensionError(f"length {n} is not divisible by period {period}")
    if not 0 <= j <= max_modules(period):
        raise DimensionError(f"shift index {j} outside [0, {max_modules(period)}]")
    shift = j * n // period
    # np.roll(a, s)[k] == a[k - s]
    return np.roll(spectrum, shift) + np.roll(spectrum, -shift)


def replica_gain(spectrum: np.ndarray, coeffs, period: int) -> np.ndarray:
    """Per-bin gain ``G(k)`` the bank applies to an in-band signal."""
    gain = np.array(spectrum, dtype=complex)
    for j, c in enumerate(coeffs, start=1):
        gain += c * build_hj(spectrum, j, period)
    return gain


def default_passband(n: int, period: int) -> int:
    """Highest bin strictly below ``N/(2T)`` (``N/(2T) - 1`` when that is whole)."""
    return -(-n // (2 * period)) - 1


def _check_passband(n: int, period: int, k_pass: int, wide: bool) -> None:
    limit = n / period if wide else n / (2 * period)
    if k_pass < 0 or k_pass >= limit or k_pass >= n // 2:
        raise DimensionError(
            f"passband bin {k_pass} must lie below {limit:g} for N={n}, T={period}"
        )


@dataclass(frozen=True)
class DesignSystem:
    """Stacked real system ``matrix @ c ~= rhs``; rows are real parts of
    bins ``0..passband_max_bin`` followed by their imaginary parts."""

    matrix: np.ndarray
    rhs: np.ndarray
    passband_max_bin: int

    @property
    def modules(self) -> int:
        return self.matrix.shape[1]


def _stack(z: np.ndarray) -> np.ndarray:
    return np.concatenate([z.real, z.imag], axis=0)


def assemble_system_1d(
    kernel: Kernel,
    n: int,
    modules: int,
    passband_max_bin: int | None = None,
    wide_passband: bool = False,
) -> DesignSystem:
    """Build the passband least-squares system for ``modules`` coefficients.

    ``wide_passband`` admits rows up to ``N/T`` (the wider row range some
    derivations use) instead of stopping strictly below ``N/(2T)``.
    """
    T = kernel.period
    if modules > max_modules(T):
        raise ModuleCountError(
            f"{modules} modules requested but floor(T/2) = {max_modules(T)} for T={T}"
        )
    if modules < 0:
        raise ModuleCountError("module count must be non-negative")
    k_pass = default_passband(n, T) if passband_max_bin is None else passband_max_bin
    _check_passband(n, T, k_pass, wide_passband)
    spectrum = kernel_spectrum(kernel, n)
    bins = np.arange(k_pass + 1)
    columns = [build_hj(spectrum, j, T)[bins] for j in range(1, modules + 1)]
    matrix = _stack(np.stack(columns, axis=1)) if columns else np.zeros((2 * bins.size, 0))
    rhs = _stack(1.0 - spectrum[bins])
    return DesignSystem(matrix, rhs, k_pass)


def solve_least_squares(system: DesignSystem) -> np.ndarray:
    """Minimum-norm least-squares solution via a truncated SVD.

    Singular values at or below ``1e-10`` times the largest column norm are
    treated as zero, so rank-deficient systems still get a unique answer.
    """
    A, b = system.matrix, system.rhs
    if A.shape[1] == 0:
        return np.zeros(0)
    col_norm = float(np.max(np.linalg.norm(A, axis=0)))
    if col_norm == 0.0:
        raise DegenerateSystemError("design matrix is identically zero")
    u, s, vt = np.linalg.svd(A, full_matrices=False)
    keep = s > RANK_TOL * col_norm
    return vt[keep].T @ ((u[:, keep].T @ b) / s[keep])


def residual_error(system: DesignSystem, coeffs) -> float:
    """Squared norm ``||matrix @ c - rhs||^2``."""
    c = np.asarray(coeffs, dtype=float)
    if c.shape != (system.modules,):
        raise LengthMismatchError(f"expected {system.modules} coefficients, got {c.shape}")
    r = system.matrix @ c - system.rhs
    return float(r @ r)


@dataclass(frozen=True)
class CoeffRecord:
    kernel: str
    period: int
    n: int
    modules: int
    passband_max_bin: int
    coeffs: tuple[float, ...]
    residual_error: float

    @property
    def key(self) -> tuple[str, int, int, int, int]:
        return (self.kernel, self.period, self.n, self.modules, self.passband_max_bin)

    def bank(self) -> ModuleBank:
        return ModuleBank(self.period, self.coeffs)


def solve_coefficients_1d(
    kernel: Kernel,
    n: int,
    modules: int,
    passband_max_bin: int | None = None,
    wide_passband: bool = False,
) -> CoeffRecord:
    system = assemble_system_1d(kernel, n, modules, passband_max_bin, wide_passband)
    c = solve_least_squares(system)
    return CoeffRecord(
        kernel=kernel.label,
        period=kernel.period,
        n=n,
        modules=modules,
        passband_max_bin=system.passband_max_bin,
        coeffs=tuple(float(v) for v in c),
        residual_error=residual_error(system, c),
    )


# -- 2-D ------------------------------------------------------------------


@dataclass(frozen=True)
class DesignSystem2D:
    """Joint lattice system. ``pairs`` lists the ``(j1, j2)`` index of each
    column; ``(0, 0)`` is the fixed unity path and is folded into ``rhs``."""

    matrix: np.ndarray
    rhs: np.ndarray
    pairs: tuple[tuple[int, int], ...]
    passbands: tuple[int, int]

    @property
    def modules(self) -> int:
        return self.matrix.shape[1]


def _axis_terms(kernel: Kernel, n: int, modules: int, bins: np.ndarray) -> list[np.ndarray]:
    # index 0 is the unshifted spectrum, j >= 1 the two-sided replica pair
    spectrum = kernel_spectrum(kernel, n)
    terms = [spectrum[bins % n]]
    terms += [build_hj(spectrum, j, kernel.period)[bins % n] for j in range(1, modules + 1)]
    return terms


def assemble_system_2d(
    kernels: tuple[Kernel, Kernel],
    dims: tuple[int, int],
    modules: tuple[int, int],
    passbands: tuple[int, int] | None = None,
) -> DesignSystem2D:
    """Rows cover ``0 <= k1 <= K1`` and ``-K2 <= k2 <= K2``; the other half of
    the passband rectangle is the complex conjugate and adds nothing."""
    for kern, n, m in zip(kernels, dims, modules):
        if m < 0 or m > max_modules(kern.period):
            raise ModuleCountError(
                f"{m} modules requested but floor(T/2) = {max_modules(kern.period)} "
                f"for T={kern.period}"
            )
        if n % kern.period:
            raise DimensionError(f"length {n} is not divisible by period {kern.period}")
    if passbands is None:
        passbands = tuple(default_passband(n, k.period) for k, n in zip(kernels, dims))
    for kern, n, k in zip(kernels, dims, passbands):
        _check_passband(n, kern.period, k, False)
    k1, k2 = passbands
    g1 = _axis_terms(kernels[0], dims[0], modules[0], np.arange(k1 + 1))
    g2 = _axis_terms(kernels[1], dims[1], modules[1], np.arange(-k2, k2 + 1))
    pairs = tuple(
        (j1, j2)
        for j1 in range(modules[0] + 1)
        for j2 in range(modules[1] + 1)
        if (j1, j2) != (0, 0)
    )
    rows = 2 * g1[0].size * g2[0].size
    if len(pairs) > rows:
        raise DimensionError(f"{len(pairs)} unknowns exceed {rows} equations")
    columns = [np.outer(g1[j1], g2[j2]).ravel() for j1, j2 in pairs]
    matrix = _stack(np.stack(columns, axis=1)) if columns else np.zeros((rows, 0))
    rhs = _stack(1.0 - np.outer(g1[0], g2[0]).ravel())
    return DesignSystem2D(matrix, rhs, pairs, (k1, k2))


def _bank_from_pairs(system: DesignSystem2D, periods, modules, c) -> ModuleBank2D:
    grid = np.zeros((modules[0] + 1, modules[1] + 1))
    grid[0, 0] = 1.0
    for (j1, j2), value in zip(system.pairs, c):
        grid[j1, j2] = value
    return ModuleBank2D(periods, grid)


def solve_coefficients_2d(
    kernels: tuple[Kernel, Kernel],
    dims: tuple[int, int],
    modules: tuple[int, int],
    passbands: tuple[int, int] | None = None,
    mode: str = "joint",
) -> tuple[ModuleBank2D, float]:
    """Optimal lattice bank and its residual.

    ``mode="joint"`` solves for every ``c[j1, j2]`` at once; ``"separable"``
    solves each axis in 1-D and takes the outer product.
    """
    system = assemble_system_2d(kernels, dims, modules, passbands)
    periods = (kernels[0].period, kernels[1].period)
    if mode == "joint":
        c = solve_least_squares(system)
        bank = _bank_from_pairs(system, periods, modules, c)
    elif mode == "separable":
        banks = [
            solve_coefficients_1d(kern, n, m, k).bank()
            for kern, n, m, k in zip(kernels, dims, modules, system.passbands)
        ]
        bank = ModuleBank2D.separable(*banks)
        c = np.array([bank.coeffs[j1, j2] for j1, j2 in system.pairs])
    else:
        raise ValueError(f"mode must be 'joint' or 'separable', got {mode!r}")
    return bank, residual_error(system, c)


# -- lookup table -----------------------------------------------------------


def _format_record(rec: CoeffRecord) -> str:
    coeffs = ",".join(format(c, ".17g") for c in rec.coeffs)
    return (
        f"kernel={rec.kernel} T={rec.period} N={rec.n} M={rec.modules} "
        f"Kpass={rec.passband_max_bin} e={rec.residual_error:.17g} c={coeffs}"
    )


def _parse_record(line: str, lineno: int) -> CoeffRecord:
    try:
        fields = dict(item.split("=", 1) for item in line.split())
        coeffs = tuple(float(v) for v in fields["c"].split(",") if v)
        rec = CoeffRecord(
            kernel=fields["kernel"],
            period=int(fields["T"]),
            n=int(fields["N"]),
            modules=int(fields["M"]),
            passband_max_bin=int(fields["Kpass"]),
            coeffs=coeffs,
            residual_error=float(fields["e"]),
        )
    except (KeyError, ValueError) as exc:
        raise MalformedFileError(f"line {lineno}: cannot parse {line!r} ({exc})") from None
    if len(rec.coeffs) != rec.modules:
        raise MalformedFileError(f"line {lineno}: M={rec.modules} but {len(coeffs)} coefficients")
    return rec


def save_coeff_table(records: Iterable[CoeffRecord], path) -> None:
    lines = ["# modrecon coefficient table"]
    lines += [_format_record(r) for r in records]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_coeff_table(path=None) -> dict[tuple, CoeffRecord]:
    """Read a table into an insertion-ordered dict keyed by :attr:`CoeffRecord.key`.

    With no path, the file named by ``$MODRECON_COEFF_TABLE`` is used.
    """
    if path is None:
        path = os.environ.get(TABLE_ENV)
        if not path:
            raise FileNotFoundError(f"no table path given and ${TABLE_ENV} is unset")
    table: dict[tuple, CoeffRecord] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        rec = _parse_record(line, lineno)
        table[rec.key] = rec
    return table


def update_coeff_table(path, records: Iterable[CoeffRecord]) -> dict[tuple, CoeffRecord]:
    """Merge ``records`` into the table at ``path``, replacing equal keys in place."""
    path = Path(path)
    table = load_coeff_table(path) if path.exists() else {}
    for rec in records:
        table[rec.key] = rec
    save_coeff_table(table.values(), path)
    return table


def find_record(
    table: dict[tuple, CoeffRecord],
    kernel: str,
    period: int,
    n: int,
    modules: int,
    passband_max_bin: int,
) -> CoeffRecord:
    key = (kernel, period, n, modules, passband_max_bin)
    try:
        return table[key]
    except KeyError:
        raise KeyNotFoundError(f"no coefficients stored for {key}") from None
