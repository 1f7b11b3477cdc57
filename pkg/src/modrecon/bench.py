"""Seeded Monte-Carlo sweeps and the image upscaling pipeline.

Every sweep is a pure function of its :class:`ExperimentConfig`: trial ``t``
draws its signal from seed ``seed_base + t`` and its noise from the same
index folded with a fixed salt, so CSV output is byte-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionError
from .interpolators import (
    Kernel,
    decimate,
    decimate_2d,
    interpolate_1d,
    interpolate_2d,
    make_kernel,
    parse_kernel,
)
from .iterative import IterativeConfig, iterates, iterates_2d
from .modular import (
    ModuleBank,
    ModuleBank2D,
    classical_bank,
    max_modules,
    modular_reconstruct_1d,
    modular_reconstruct_2d,
)
from .optimizer import (
    CoeffRecord,
    default_passband,
    solve_coefficients_1d,
    solve_coefficients_2d,
)
from .signals import (
    MetricOptions,
    add_awgn,
    fft_lowpass_2d,
    generate_bandlimited_1d,
    generate_bandlimited_2d,
    psnr_db,
    snr_db,
)

__all__ = [
    "MODULES_HEADER",
    "NOISE_HEADER",
    "ITERATIVE_HEADER",
    "IMAGE_METHODS",
    "ExperimentConfig",
    "bench_iterative",
    "bench_iterative_2d",
    "bench_modules",
    "bench_modules_2d",
    "bench_noise",
    "format_csv",
    "image_round_trip",
    "optimized_bank",
    "to_pixels",
    "upscale_image",
    "write_csv",
]

MODULES_HEADER = ("modules", "snr_classical_db", "snr_optimized_db")
NOISE_HEADER = ("input_snr_db", "output_snr_classical_db", "output_snr_optimized_db")
ITERATIVE_HEADER = ("iteration", "snr_plain_db", "snr_hybrid_db", "snr_hybrid_opt_db")
IMAGE_METHODS = ("bilinear", "bicubic", "iterative", "hybrid", "opt_hybrid")

_NOISE_SALT = 0x9E3779B97F4A7C15


@dataclass(frozen=True)
class ExperimentConfig:
    kernel: str = "sh"
    n: int = 1000
    period: int = 10
    modules: tuple[int, ...] | None = None  # None: 0..floor(T/2)
    fixed_modules: int | None = None  # None: 5 for noise sweeps, 1 for iterative
    trials: int = 100
    seed_base: int = 0
    input_snrs_db: tuple[float, ...] = (0.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 80.0, 100.0)
    iterations: int = 10
    relaxation: float = 1.0
    metric: MetricOptions = field(default_factory=MetricOptions)
    coeff_table: dict | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trial count must be >= 1")
        if self.n % self.period:
            raise DimensionError(f"N={self.n} is not divisible by T={self.period}")
        top = max_modules(self.period)
        fixed = () if self.fixed_modules is None else (self.fixed_modules,)
        for m in self.module_range + fixed:
            if not 0 <= m <= top:
                raise ValueError(f"module count {m} outside [0, floor(T/2) = {top}]")

    @property
    def module_range(self) -> tuple[int, ...]:
        if self.modules is None:
            return tuple(range(max_modules(self.period) + 1))
        return tuple(self.modules)

    @property
    def cutoff(self) -> int:
        return default_passband(self.n, self.period)

    def modules_or(self, default: int) -> int:
        if self.fixed_modules is not None:
            return self.fixed_modules
        return min(default, max_modules(self.period))

    def make_kernel(self) -> Kernel:
        return parse_kernel(self.kernel, self.period)


def optimized_bank(kernel: Kernel, n: int, modules: int, table: dict | None = None) -> ModuleBank:
    """Least-squares bank, taken from ``table`` when it holds a matching record."""
    k_pass = default_passband(n, kernel.period)
    rec: CoeffRecord | None = None
    if table is not None:
        rec = table.get((kernel.label, kernel.period, n, modules, k_pass))
    if rec is None:
        rec = solve_coefficients_1d(kernel, n, modules, k_pass)
    return rec.bank()


def _observe(x: np.ndarray, kernel: Kernel) -> np.ndarray:
    return interpolate_1d(decimate(x, kernel.period), kernel)


def bench_modules(cfg: ExperimentConfig) -> list[tuple]:
    """Mean trimmed SNR of classical and optimized banks per module count."""
    kernel = cfg.make_kernel()
    cut = cfg.cutoff
    banks = [
        (m, classical_bank(cfg.period, m), optimized_bank(kernel, cfg.n, m, cfg.coeff_table))
        for m in cfg.module_range
    ]
    sums = np.zeros((len(banks), 2))
    for t in range(cfg.trials):
        x = generate_bandlimited_1d(cfg.n, cut, cfg.seed_base + t).samples
        s = _observe(x, kernel)
        for i, (_, classical, optimized) in enumerate(banks):
            sums[i, 0] += snr_db(x, modular_reconstruct_1d(s, classical, cut), cfg.metric)
            sums[i, 1] += snr_db(x, modular_reconstruct_1d(s, optimized, cut), cfg.metric)
    means = sums / cfg.trials
    return [(m, float(c), float(o)) for (m, _, _), (c, o) in zip(banks, means)]


def bench_noise(cfg: ExperimentConfig) -> list[tuple]:
    """Output SNR (against the clean signal) versus input SNR at ``fixed_modules``.

    Noise is added to the bandlimited signal before it is sampled.
    """
    kernel = cfg.make_kernel()
    cut = cfg.cutoff
    m = cfg.modules_or(5)
    classical = classical_bank(cfg.period, m)
    optimized = optimized_bank(kernel, cfg.n, m, cfg.coeff_table)
    sums = np.zeros((len(cfg.input_snrs_db), 2))
    for t in range(cfg.trials):
        seed = cfg.seed_base + t
        x = generate_bandlimited_1d(cfg.n, cut, seed).samples
        for i, target in enumerate(cfg.input_snrs_db):
            s = _observe(add_awgn(x, target, seed ^ _NOISE_SALT), kernel)
            sums[i, 0] += snr_db(x, modular_reconstruct_1d(s, classical, cut), cfg.metric)
            sums[i, 1] += snr_db(x, modular_reconstruct_1d(s, optimized, cut), cfg.metric)
    means = sums / cfg.trials
    return [(float(v), float(c), float(o)) for v, (c, o) in zip(cfg.input_snrs_db, means)]


def _iterative_configs(cfg: ExperimentConfig, classical, optimized) -> list[IterativeConfig]:
    return [
        IterativeConfig(cfg.iterations, cfg.relaxation, "plain"),
        IterativeConfig(cfg.iterations, cfg.relaxation, "hybrid_classical", classical),
        IterativeConfig(cfg.iterations, cfg.relaxation, "hybrid_optimized", optimized),
    ]


def bench_iterative(cfg: ExperimentConfig) -> list[tuple]:
    """Mean SNR per iteration (0..iterations) for the three iteration variants."""
    kernel = cfg.make_kernel()
    cut = cfg.cutoff
    m = cfg.modules_or(1)
    configs = _iterative_configs(
        cfg, classical_bank(cfg.period, m), optimized_bank(kernel, cfg.n, m, cfg.coeff_table)
    )
    sums = np.zeros((cfg.iterations + 1, 3))
    for t in range(cfg.trials):
        x = generate_bandlimited_1d(cfg.n, cut, cfg.seed_base + t).samples
        s = _observe(x, kernel)
        for v, icfg in enumerate(configs):
            for k, xk in enumerate(iterates(s, kernel, icfg, cut)):
                sums[k, v] += snr_db(x, xk, cfg.metric)
    means = sums / cfg.trials
    return [(k, *map(float, row)) for k, row in enumerate(means)]


# -- 2-D sweeps over n x n grids with period T on both axes --------------------


def _setup_2d(cfg: ExperimentConfig):
    kernel = cfg.make_kernel()
    kernels = (kernel, kernel)
    dims = (cfg.n, cfg.n)
    periods = (cfg.period, cfg.period)
    cutoffs = (cfg.cutoff, cfg.cutoff)
    return kernels, dims, periods, cutoffs


def bench_modules_2d(cfg: ExperimentConfig) -> list[tuple]:
    """As :func:`bench_modules` on square grids, ``M`` modules on each axis; the
    optimized lattice bank comes from the joint least-squares solve."""
    kernels, dims, periods, cutoffs = _setup_2d(cfg)
    banks = [
        (
            m,
            ModuleBank2D.classical(periods, (m, m)),
            solve_coefficients_2d(kernels, dims, (m, m), cutoffs, mode="joint")[0],
        )
        for m in cfg.module_range
    ]
    sums = np.zeros((len(banks), 2))
    for t in range(cfg.trials):
        x = generate_bandlimited_2d(dims, cutoffs, cfg.seed_base + t).samples
        s = interpolate_2d(decimate_2d(x, periods), kernels)
        for i, (_, classical, optimized) in enumerate(banks):
            sums[i, 0] += snr_db(x, modular_reconstruct_2d(s, classical, cutoffs), cfg.metric)
            sums[i, 1] += snr_db(x, modular_reconstruct_2d(s, optimized, cutoffs), cfg.metric)
    means = sums / cfg.trials
    return [(m, float(c), float(o)) for (m, _, _), (c, o) in zip(banks, means)]


def bench_iterative_2d(cfg: ExperimentConfig) -> list[tuple]:
    kernels, dims, periods, cutoffs = _setup_2d(cfg)
    m = cfg.modules_or(1)
    optimized, _ = solve_coefficients_2d(kernels, dims, (m, m), cutoffs, mode="joint")
    configs = _iterative_configs(cfg, ModuleBank2D.classical(periods, (m, m)), optimized)
    sums = np.zeros((cfg.iterations + 1, 3))
    for t in range(cfg.trials):
        x = generate_bandlimited_2d(dims, cutoffs, cfg.seed_base + t).samples
        s = interpolate_2d(decimate_2d(x, periods), kernels)
        for v, icfg in enumerate(configs):
            for k, xk in enumerate(iterates_2d(s, kernels, icfg, cutoffs)):
                sums[k, v] += snr_db(x, xk, cfg.metric)
    means = sums / cfg.trials
    return [(k, *map(float, row)) for k, row in enumerate(means)]


# -- CSV -------------------------------------------------------------------


def _cell(value) -> str:
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return f"{float(value):.6f}"


def format_csv(header: Sequence[str], rows) -> str:
    lines = [",".join(header)]
    lines += [",".join(_cell(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def write_csv(header: Sequence[str], rows, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_csv(header, rows))


# -- images ------------------------------------------------------------------


def upscale_image(
    low,
    method: str,
    iterations: int = 2,
    modules: int = 1,
    kernel: str = "sh",
    relaxation: float = 1.0,
) -> np.ndarray:
    """Upscale a grayscale image by 2 on each axis (float output, unclamped).

    ``bilinear`` and ``bicubic`` are plain kernel interpolation. The other
    methods interpolate with ``kernel`` and run the relaxation iteration with
    no modules, the all-ones bank, or the least-squares lattice bank.
    """
    low = np.asarray(low, dtype=float)
    if low.ndim != 2:
        raise DimensionError("expected a 2-D grayscale image")
    if method == "bilinear":
        k = make_kernel("linear", 2)
        return interpolate_2d(low, (k, k))
    if method == "bicubic":
        k = make_kernel("cubic_keys", 2)
        return interpolate_2d(low, (k, k))
    if method not in IMAGE_METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {IMAGE_METHODS}")
    if not 0 <= modules <= max_modules(2):
        raise ValueError(f"module count {modules} outside [0, floor(T/2) = 1] for T=2")
    kern = parse_kernel(kernel, 2)
    kernels = (kern, kern)
    dims = (low.shape[0] * 2, low.shape[1] * 2)
    for n in dims:
        if n % 4:
            raise DimensionError(f"upscaled size {n} must be a multiple of 4")
    cutoffs = (dims[0] // 4 - 1, dims[1] // 4 - 1)
    s = interpolate_2d(low, kernels)
    if method == "iterative":
        cfg = IterativeConfig(iterations, relaxation, "plain")
    elif method == "hybrid":
        cfg = IterativeConfig(
            iterations, relaxation, "hybrid_classical", ModuleBank2D.classical((2, 2), (modules, modules))
        )
    else:
        bank, _ = solve_coefficients_2d(kernels, dims, (modules, modules), cutoffs, mode="joint")
        cfg = IterativeConfig(iterations, relaxation, "hybrid_optimized", bank)
    out = None
    for out in iterates_2d(s, kernels, cfg, cutoffs):
        pass
    return out


def to_pixels(image) -> np.ndarray:
    """Round and clamp to 0..255 uint8; applied once, after the last stage."""
    return np.clip(np.round(np.asarray(image, dtype=float)), 0, 255).astype(np.uint8)


def image_round_trip(
    reference,
    method: str,
    iterations: int = 2,
    modules: int = 1,
    kernel: str = "sh",
    decimation: str = "bandlimit",
    metric: MetricOptions = MetricOptions(),
) -> tuple[np.ndarray, float]:
    """Halve ``reference``, upscale it back and score the result by PSNR.

    ``decimation="bandlimit"`` lowpasses to the half band before keeping even
    pixels (sampling a bandlimited image); ``"pick"`` keeps even pixels of
    the raw image, aliasing included.
    """
    ref = np.asarray(reference, dtype=float)
    if ref.ndim != 2 or ref.shape[0] % 2 or ref.shape[1] % 2:
        raise DimensionError(f"reference must be 2-D with even sides, got {ref.shape}")
    if decimation == "bandlimit":
        if ref.shape[0] % 4 or ref.shape[1] % 4:
            raise DimensionError("bandlimited decimation needs sides divisible by 4")
        src = fft_lowpass_2d(ref, (ref.shape[0] // 4 - 1, ref.shape[1] // 4 - 1))
    elif decimation == "pick":
        src = ref
    else:
        raise ValueError(f"decimation must be 'bandlimit' or 'pick', got {decimation!r}")
    low = decimate_2d(src, (2, 2))
    out = to_pixels(upscale_image(low, method, iterations, modules, kernel))
    return out, psnr_db(ref, out, metric)
