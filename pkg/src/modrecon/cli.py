"""Command-line entry point: ``modrecon {gen-coeffs, bench, image}``.

Exit codes: 0 success, 2 usage error, 3 I/O error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import bench
from .errors import DivergenceError, MalformedFileError, ModreconError
from .interpolators import parse_kernel
from .modular import max_modules
from .optimizer import TABLE_ENV, load_coeff_table, solve_coefficients_1d, update_coeff_table
from .pgm import read_pgm, write_pgm
from .signals import MetricOptions, psnr_db

EXIT_USAGE = 2
EXIT_IO = 3
EXIT_NUMERIC = 4


class UsageError(Exception):
    pass


def _module_list(text: str) -> tuple[int, ...]:
    """``"5"``, ``"0-5"`` or ``"1,3,5"``."""
    try:
        if "-" in text:
            lo, hi = (int(v) for v in text.split("-", 1))
            return tuple(range(lo, hi + 1))
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad module list {text!r}") from None


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from None


def _check_modules(modules, period: int) -> None:
    top = max_modules(period)
    for m in modules:
        if not 0 <= m <= top:
            raise UsageError(
                f"{m} modules requested, but at most floor(T/2) = {top} modules can be "
                f"applied for T={period}"
            )


def _common(p: argparse.ArgumentParser, n: int | None = 1000, period: int | None = 10) -> None:
    p.add_argument("--kernel", default="sh", help="sh | linear | hold:<n> | cubic[:a]")
    p.add_argument("--T", type=int, default=period, dest="period", help="sampling period")
    p.add_argument("--N", type=int, default=n, dest="n", help="record length")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0, help="seed base; trial t uses seed + t")
    p.add_argument("--trim", type=float, default=0.05, help="fraction trimmed per end")
    p.add_argument("--out", help="output path (stdout when omitted)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="modrecon", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen-coeffs", help="solve and store optimal module coefficients")
    gen.add_argument("--kernel", default="sh")
    gen.add_argument("--T", type=int, default=10, dest="period")
    gen.add_argument("--N", type=int, default=1000, dest="n")
    gen.add_argument("--modules", type=_module_list, default=None)
    gen.add_argument("--kpass", type=int, default=None, help="highest passband bin")
    gen.add_argument("--wide-passband", action="store_true", help="allow rows up to N/T")
    gen.add_argument("--out", default=os.environ.get(TABLE_ENV))

    b = sub.add_parser("bench", help="Monte-Carlo sweeps written as CSV")
    bsub = b.add_subparsers(dest="bench", required=True)
    mod = bsub.add_parser("modules", help="SNR versus module count")
    _common(mod, n=None, period=None)
    mod.add_argument("--modules", type=_module_list, default=None)
    mod.add_argument("--two-d", action="store_true", help="square grids of side N")
    noise = bsub.add_parser("noise", help="output SNR versus input SNR")
    _common(noise)
    noise.add_argument("--modules", type=int, default=5)
    noise.add_argument("--input-snrs", type=_float_list, default=None)
    it = bsub.add_parser("iterative", help="SNR versus iteration for the three variants")
    _common(it, n=None, period=None)
    it.add_argument("--modules", type=int, default=1)
    it.add_argument("--iterations", type=int, default=None)
    it.add_argument("--relaxation", type=float, default=1.0)
    it.add_argument("--two-d", action="store_true", help="square grids of side N")

    img = sub.add_parser("image", help="image pipeline")
    isub = img.add_subparsers(dest="image", required=True)
    up = isub.add_parser("upscale", help="2x upscale of a grayscale PGM")
    up.add_argument("--input", help="low-resolution PGM to upscale")
    up.add_argument("--reference", help="full-resolution PGM; halved first when --input is absent")
    up.add_argument("--method", choices=bench.IMAGE_METHODS, default="opt_hybrid")
    up.add_argument("--iterations", type=int, default=2)
    up.add_argument("--modules", type=int, default=1)
    up.add_argument("--kernel", default="sh", help="kernel for the iterative methods")
    up.add_argument("--decimation", choices=("bandlimit", "pick"), default="bandlimit")
    up.add_argument("--out", required=True)
    return parser


def _emit(header, rows, out) -> None:
    text = bench.format_csv(header, rows)
    if out:
        try:
            with open(out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write {out}: {exc}") from exc
    else:
        sys.stdout.write(text)


def _coeff_table():
    path = os.environ.get(TABLE_ENV)
    if path and os.path.exists(path):
        return load_coeff_table(path)
    return None


def _gen_coeffs(args) -> None:
    if not args.out:
        raise UsageError(f"--out is required when ${TABLE_ENV} is unset")
    kernel = parse_kernel(args.kernel, args.period)
    modules = args.modules or (max_modules(args.period),)
    _check_modules(modules, args.period)
    records = [
        solve_coefficients_1d(kernel, args.n, m, args.kpass, args.wide_passband) for m in modules
    ]
    update_coeff_table(args.out, records)
    for rec in records:
        coeffs = ",".join(f"{c:.10g}" for c in rec.coeffs)
        print(f"{rec.kernel} T={rec.period} N={rec.n} M={rec.modules} e={rec.residual_error:.6g} c={coeffs}")


def _config(args, **extra) -> bench.ExperimentConfig:
    return bench.ExperimentConfig(
        kernel=args.kernel,
        n=args.n,
        period=args.period,
        trials=args.trials,
        seed_base=args.seed,
        metric=MetricOptions(trim_fraction_per_end=args.trim),
        coeff_table=_coeff_table(),
        **extra,
    )


def _bench(args) -> None:
    two_d = getattr(args, "two_d", False)
    if args.n is None:
        args.n = 64 if two_d else 1000
    if args.period is None:
        args.period = 4 if two_d else 10
    if args.bench == "modules":
        if args.modules is not None:
            _check_modules(args.modules, args.period)
        cfg = _config(args, modules=args.modules)
        rows = bench.bench_modules_2d(cfg) if two_d else bench.bench_modules(cfg)
        _emit(bench.MODULES_HEADER, rows, args.out)
    elif args.bench == "noise":
        _check_modules((args.modules,), args.period)
        extra = {"fixed_modules": args.modules}
        if args.input_snrs:
            extra["input_snrs_db"] = args.input_snrs
        _emit(bench.NOISE_HEADER, bench.bench_noise(_config(args, **extra)), args.out)
    else:
        _check_modules((args.modules,), args.period)
        iterations = args.iterations if args.iterations is not None else (13 if two_d else 10)
        cfg = _config(
            args, fixed_modules=args.modules, iterations=iterations, relaxation=args.relaxation
        )
        rows = bench.bench_iterative_2d(cfg) if two_d else bench.bench_iterative(cfg)
        _emit(bench.ITERATIVE_HEADER, rows, args.out)


def _image(args) -> None:
    if not args.input and not args.reference:
        raise UsageError("give --input, --reference, or both")
    _check_modules((args.modules,), 2)
    if args.input:
        low = read_pgm(args.input)
        ref = read_pgm(args.reference) if args.reference else None
        if ref is not None and ref.shape != (2 * low.shape[0], 2 * low.shape[1]):
            raise UsageError(f"reference {ref.shape} is not twice the input {low.shape}")
        out = bench.to_pixels(
            bench.upscale_image(low, args.method, args.iterations, args.modules, args.kernel)
        )
        score = psnr_db(ref, out) if ref is not None else None
    else:
        ref = read_pgm(args.reference)
        if ref.shape[0] % 2 or ref.shape[1] % 2:
            raise UsageError(f"reference dimensions {ref.shape} must be even")
        out, score = bench.image_round_trip(
            ref, args.method, args.iterations, args.modules, args.kernel, args.decimation
        )
    write_pgm(out, args.out)
    if score is not None:
        print(f"{args.method},{score:.6f}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_USAGE
    try:
        if args.command == "gen-coeffs":
            _gen_coeffs(args)
        elif args.command == "bench":
            _bench(args)
        else:
            _image(args)
    except DivergenceError as exc:
        print(f"modrecon: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (MalformedFileError, OSError) as exc:
        print(f"modrecon: {exc}", file=sys.stderr)
        return EXIT_IO
    except (UsageError, ModreconError, ValueError) as exc:
        print(f"modrecon: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
