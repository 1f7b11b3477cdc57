"""Modular reconstruction of bandlimited signals from interpolated samples,
with least-squares optimized module coefficients (1-D and 2-D)."""

from .errors import (
    DegenerateSystemError,
    DimensionError,
    DivergenceError,
    KernelError,
    KeyNotFoundError,
    LengthMismatchError,
    MalformedFileError,
    ModreconError,
    ModuleCountError,
)
from .interpolators import (
    Kernel,
    SampledSeries,
    custom_kernel,
    decimate,
    decimate_2d,
    interpolate_1d,
    interpolate_2d,
    make_kernel,
    parse_kernel,
)
from .iterative import IterativeConfig, distortion_operator, iterative_reconstruct, iterative_reconstruct_2d
from .modular import (
    ModuleBank,
    ModuleBank2D,
    classical_bank,
    impulse_train_bank,
    max_modules,
    mixer_1d,
    mixer_2d,
    modular_reconstruct_1d,
    modular_reconstruct_2d,
    modulate_1d,
    modulate_2d,
    zero_bank,
)
from .optimizer import (
    CoeffRecord,
    assemble_system_1d,
    build_hj,
    kernel_spectrum,
    load_coeff_table,
    residual_error,
    save_coeff_table,
    solve_coefficients_1d,
    solve_coefficients_2d,
    solve_least_squares,
)
from .signals import (
    MetricOptions,
    Signal1D,
    Signal2D,
    add_awgn,
    fft_lowpass_1d,
    fft_lowpass_2d,
    generate_bandlimited_1d,
    generate_bandlimited_2d,
    psnr_db,
    snr_db,
)

__version__ = "0.1.0"
