import numpy as np
import pytest

from modrecon.errors import (
    DegenerateSystemError,
    DimensionError,
    KeyNotFoundError,
    LengthMismatchError,
    MalformedFileError,
    ModuleCountError,
)
from modrecon.interpolators import circular_taps, custom_kernel, make_kernel, parse_kernel
from modrecon.modular import classical_bank, max_modules
from modrecon.optimizer import (
    CoeffRecord,
    DesignSystem,
    assemble_system_1d,
    assemble_system_2d,
    build_hj,
    default_passband,
    find_record,
    kernel_spectrum,
    load_coeff_table,
    replica_gain,
    residual_error,
    save_coeff_table,
    solve_coefficients_1d,
    solve_coefficients_2d,
    solve_least_squares,
    update_coeff_table,
)
from oracles import brute_residual, direct_dft

KERNELS = ["sh", "linear", "hold:2", "cubic"]


class TestSpectrum:
    def test_delta(self):
        np.testing.assert_allclose(kernel_spectrum(make_kernel("sample_hold", 1), 12), 1.0)

    def test_sample_hold_t2(self):
        k = np.arange(8)
        want = (1 + np.exp(-1j * np.pi * k / 4)) / 2
        H = kernel_spectrum(make_kernel("sample_hold", 2), 8)
        np.testing.assert_allclose(H, want, atol=1e-14)
        assert H[0] == pytest.approx(1.0) and abs(H[4]) < 1e-15

    def test_linear_t2_real(self):
        k = np.arange(8)
        H = kernel_spectrum(make_kernel("linear", 2), 8)
        np.testing.assert_allclose(H, (1 + np.cos(np.pi * k / 4)) / 2, atol=1e-14)

    @pytest.mark.parametrize("spec", KERNELS)
    def test_against_direct_dft(self, spec):
        kern = parse_kernel(spec, 4)
        H = kernel_spectrum(kern, 40)
        np.testing.assert_allclose(H, direct_dft(circular_taps(kern, 40)) / 4, atol=1e-12)
        np.testing.assert_allclose(H[1:][::-1], np.conj(H[1:]), atol=1e-13)
        assert H[0] == pytest.approx(1.0)

    def test_indivisible(self):
        with pytest.raises(DimensionError):
            kernel_spectrum(make_kernel("linear", 3), 10)


class TestBuildHj:
    def test_j0_doubles(self, rng):
        H = rng.standard_normal(12) + 1j * rng.standard_normal(12)
        np.testing.assert_allclose(build_hj(H, 0, 4), 2 * H)

    def test_coincident_shift(self, rng):
        H = rng.standard_normal(12) + 1j * rng.standard_normal(12)
        np.testing.assert_allclose(build_hj(H, 2, 4), 2 * np.roll(H, 6))

    def test_sample_hold_t2(self):
        k = np.arange(8)
        H = kernel_spectrum(make_kernel("sample_hold", 2), 8)
        np.testing.assert_allclose(build_hj(H, 1, 2), 1 - np.exp(-1j * np.pi * k / 4), atol=1e-14)

    @pytest.mark.parametrize("T", [3, 4, 5])
    def test_modulated_kernel_form(self, T, rng):
        n = 6 * T
        taps = rng.standard_normal(2 * T + 1)
        kern = custom_kernel(taps, -T, T)
        H = kernel_spectrum(kern, n)
        h = circular_taps(kern, n)
        t = np.arange(n)
        for j in range(max_modules(T) + 1):
            want = direct_dft(h * 2 * np.cos(2 * np.pi * j * t / T)) / T
            got = build_hj(H, j, T)
            assert np.max(np.abs(got - want)) <= 1e-9 * np.max(np.abs(want))

    def test_out_of_range(self):
        with pytest.raises(DimensionError):
            build_hj(np.ones(12), 3, 4)


class TestAssemble:
    def test_default_passband(self):
        assert default_passband(1000, 10) == 49
        assert default_passband(1000, 8) == 62
        assert default_passband(64, 4) == 7

    def test_delta_kernel_has_no_modules(self):
        kern = make_kernel("sample_hold", 1)
        assert assemble_system_1d(kern, 10, 0, 3).matrix.shape == (8, 0)
        with pytest.raises(ModuleCountError):
            assemble_system_1d(kern, 10, 1, 3)

    def test_sample_hold_t2_small(self):
        kern = make_kernel("sample_hold", 2)
        sys_ = assemble_system_1d(kern, 8, 1, 1)
        assert sys_.matrix.shape == (4, 1)
        H1 = 1 - np.exp(-1j * np.pi * np.arange(2) / 4)
        np.testing.assert_allclose(sys_.matrix[:, 0], np.concatenate([H1.real, H1.imag]), atol=1e-14)
        assert sys_.rhs[0] == 0.0 and sys_.rhs[2] == 0.0

    @pytest.mark.parametrize("spec", KERNELS)
    def test_row_count(self, spec):
        sys_ = assemble_system_1d(parse_kernel(spec, 10), 1000, 3)
        assert sys_.matrix.shape == (100, 3)

    def test_passband_limits(self):
        kern = make_kernel("linear", 10)
        with pytest.raises(DimensionError):
            assemble_system_1d(kern, 1000, 2, 50)
        wide = assemble_system_1d(kern, 1000, 2, 99, wide_passband=True)
        assert wide.matrix.shape == (200, 2)
        with pytest.raises(DimensionError):
            assemble_system_1d(kern, 1000, 2, 100, wide_passband=True)


class TestSolve:
    def test_zero_rhs(self):
        sys_ = DesignSystem(np.full((6, 1), 2.0), np.zeros(6), 2)
        assert solve_least_squares(sys_).tolist() == [0.0]

    def test_twin_columns_split(self, rng):
        col = rng.standard_normal(10)
        sys_ = DesignSystem(np.stack([col, col], axis=1), 3 * col, 4)
        np.testing.assert_allclose(solve_least_squares(sys_), [1.5, 1.5], atol=1e-12)

    def test_matches_normal_equations_when_full_rank(self, rng):
        A = rng.standard_normal((30, 4))
        b = rng.standard_normal(30)
        c = solve_least_squares(DesignSystem(A, b, 14))
        np.testing.assert_allclose(c, np.linalg.solve(A.T @ A, A.T @ b), atol=1e-12)

    def test_degenerate(self):
        with pytest.raises(DegenerateSystemError):
            solve_least_squares(DesignSystem(np.zeros((4, 2)), np.ones(4), 1))

    def test_sample_hold_t10_is_impulse_bank(self):
        rec = solve_coefficients_1d(make_kernel("sample_hold", 10), 1000, 5, 49)
        np.testing.assert_allclose(rec.coeffs, [1, 1, 1, 1, 0.5], atol=1e-6)
        assert rec.residual_error <= 1e-12

    def test_linear_t10_is_impulse_bank(self):
        rec = solve_coefficients_1d(make_kernel("linear", 10), 1000, 5, 49)
        np.testing.assert_allclose(rec.coeffs, [1, 1, 1, 1, 0.5], atol=1e-6)

    def test_odd_period_divisibility(self):
        kern = make_kernel("sample_hold", 9)
        with pytest.raises(DimensionError):
            solve_coefficients_1d(kern, 1000, 4)
        rec = solve_coefficients_1d(kern, 990, 4)
        np.testing.assert_allclose(rec.coeffs, [1, 1, 1, 1], atol=1e-6)
        assert rec.passband_max_bin == 54


class TestResidual:
    def test_classical_worse_than_optimal(self):
        kern = make_kernel("sample_hold", 10)
        sys_ = assemble_system_1d(kern, 1000, 5)
        opt = solve_least_squares(sys_)
        assert residual_error(sys_, np.ones(5)) > residual_error(sys_, opt)

    def test_flat_spectrum_zero(self):
        kern = custom_kernel([0, 0, 1, 0, 0], -2, 4)  # Hbar = 1/4 everywhere
        sys_ = assemble_system_1d(kern, 40, 2)
        assert residual_error(sys_, [1.0, 0.5]) == pytest.approx(0.0, abs=1e-25)
        delta_t1 = make_kernel("sample_hold", 1)
        assert residual_error(assemble_system_1d(delta_t1, 10, 0, 4), []) == 0.0

    def test_length_mismatch(self):
        sys_ = assemble_system_1d(make_kernel("linear", 4), 40, 2)
        with pytest.raises(LengthMismatchError):
            residual_error(sys_, [1.0])

    @pytest.mark.parametrize("spec", KERNELS)
    @pytest.mark.parametrize("T", [3, 4])
    def test_brute_force_oracle(self, spec, T, rng):
        kern = parse_kernel(spec, T)
        n = 12 * T
        for m in range(max_modules(T) + 1):
            sys_ = assemble_system_1d(kern, n, m)
            c = rng.standard_normal(m)
            want = brute_residual(kern.taps, kern.anchor, T, n, c, sys_.passband_max_bin)
            assert residual_error(sys_, c) == pytest.approx(want, rel=1e-12, abs=1e-14)

    def test_replica_gain_matches_stacking(self, rng):
        kern = make_kernel("cubic_keys", 6)
        sys_ = assemble_system_1d(kern, 120, 3)
        c = rng.standard_normal(3)
        g = replica_gain(kernel_spectrum(kern, 120), c, 6)[: sys_.passband_max_bin + 1]
        assert residual_error(sys_, c) == pytest.approx(np.sum(np.abs(g - 1) ** 2), rel=1e-12)


class TestLeastSquaresProperties:
    @pytest.mark.parametrize("spec", KERNELS)
    @pytest.mark.parametrize("T", [4, 7, 10])
    def test_optimality_and_stationarity(self, spec, T, rng):
        kern = parse_kernel(spec, T)
        n = 100 * T
        for m in range(1, max_modules(T) + 1):
            sys_ = assemble_system_1d(kern, n, m)
            c = solve_least_squares(sys_)
            e = residual_error(sys_, c)
            grad = sys_.matrix.T @ (sys_.matrix @ c - sys_.rhs)
            assert np.linalg.norm(grad) <= 1e-8 * np.linalg.norm(sys_.matrix.T @ sys_.rhs)
            assert e <= residual_error(sys_, np.ones(m)) + 1e-12
            deltas = rng.standard_normal((100, m))
            deltas /= np.maximum(1.0, np.linalg.norm(deltas, axis=1))[:, None]
            for d in deltas:
                assert residual_error(sys_, c + d) >= e - 1e-12

    @pytest.mark.parametrize("spec", ["sh", "linear", "cubic"])
    @pytest.mark.parametrize("T", [2, 4, 6, 10])
    def test_exactness_even(self, spec, T):
        rec = solve_coefficients_1d(parse_kernel(spec, T), 60 * T, T // 2)
        assert rec.residual_error <= 1e-10
        assert rec.coeffs[-1] == pytest.approx(0.5, abs=1e-6)

    @pytest.mark.parametrize("spec", ["sh", "linear", "cubic"])
    @pytest.mark.parametrize("T", [3, 5, 9])
    def test_exactness_odd_classical(self, spec, T):
        m = (T - 1) // 2
        sys_ = assemble_system_1d(parse_kernel(spec, T), 60 * T, m)
        assert residual_error(sys_, np.ones(m)) <= 1e-10

    @pytest.mark.parametrize("spec", ["sh", "linear"])
    @pytest.mark.parametrize("T", [4, 7, 10])
    def test_classical_monotone(self, spec, T):
        kern = parse_kernel(spec, T)
        errs = [
            residual_error(assemble_system_1d(kern, 100 * T, m), np.ones(m))
            for m in range(max_modules(T) + 1)
        ]
        assert all(b <= a + 1e-12 for a, b in zip(errs, errs[1:]))


class Test2D:
    def test_joint_and_separable_agree_at_full_modules(self):
        kern = make_kernel("sample_hold", 4)
        ks = (kern, make_kernel("linear", 4))
        joint, ej = solve_coefficients_2d(ks, (64, 64), (2, 2), mode="joint")
        sep, es = solve_coefficients_2d(ks, (64, 64), (2, 2), mode="separable")
        assert ej <= 1e-10 and es <= 1e-10
        np.testing.assert_allclose(joint.coeffs, sep.coeffs, atol=1e-6)
        np.testing.assert_allclose(sep.coeffs, np.outer([1, 1, 0.5], [1, 1, 0.5]), atol=1e-6)

    def test_no_modules(self):
        k1, k2 = make_kernel("sample_hold", 4), make_kernel("linear", 2)
        bank, e = solve_coefficients_2d((k1, k2), (32, 16), (0, 0))
        H1 = kernel_spectrum(k1, 32)[:4]
        H2 = kernel_spectrum(k2, 16)[np.arange(-3, 4) % 16]
        assert e == pytest.approx(np.sum(np.abs(1 - np.outer(H1, H2)) ** 2), rel=1e-12)
        assert bank.coeffs.shape == (1, 1)

    def test_flat_spectra_give_zero_coefficients(self):
        box = custom_kernel([1.0, 1.0], 0, 2)
        flat = custom_kernel([2.0], 0, 2)  # Hbar = 1 everywhere
        bank, e = solve_coefficients_2d((flat, flat), (16, 16), (1, 1))
        np.testing.assert_allclose(bank.coeffs, [[1, 0], [0, 0]], atol=1e-12)
        assert e == 0.0
        assert not flat.interpolating and box.interpolating

    def test_joint_dominates_separable(self):
        ks = (make_kernel("sample_hold", 4), make_kernel("sample_hold", 4))
        _, ej = solve_coefficients_2d(ks, (64, 64), (1, 1), mode="joint")
        _, es = solve_coefficients_2d(ks, (64, 64), (1, 1), mode="separable")
        assert ej <= es + 1e-12

    def test_joint_columns_are_replica_products(self):
        k1 = make_kernel("sample_hold", 4)
        sys_ = assemble_system_2d((k1, k1), (16, 16), (1, 1), (1, 1))
        H = kernel_spectrum(k1, 16)
        rows_k1, rows_k2 = np.arange(2), np.arange(-1, 2) % 16
        col = np.outer(build_hj(H, 1, 4)[rows_k1], build_hj(H, 1, 4)[rows_k2]).ravel()
        idx = sys_.pairs.index((1, 1))
        np.testing.assert_allclose(sys_.matrix[:, idx], np.concatenate([col.real, col.imag]))

    def test_bad_mode(self):
        k = make_kernel("linear", 2)
        with pytest.raises(ValueError):
            solve_coefficients_2d((k, k), (8, 8), (1, 1), mode="tensor")


class TestTable:
    def records(self):
        out = []
        for spec in ["sh", "linear"]:
            kern = parse_kernel(spec, 10)
            out += [solve_coefficients_1d(kern, 1000, m) for m in range(1, 6)]
        return out

    def test_round_trip_bit_exact(self, tmp_path):
        recs = self.records()
        save_coeff_table(recs, tmp_path / "c.tbl")
        table = load_coeff_table(tmp_path / "c.tbl")
        assert list(table.values()) == recs
        assert len(table) == 10
        assert [r.key for r in table.values()] == [r.key for r in recs]

    def test_line_format(self, tmp_path):
        rec = CoeffRecord("sh", 10, 1000, 2, 49, (0.1, 1 / 3), 1e-3)
        save_coeff_table([rec], tmp_path / "t")
        line = (tmp_path / "t").read_text().splitlines()[1]
        assert line == "kernel=sh T=10 N=1000 M=2 Kpass=49 e=0.001 c=0.10000000000000001,0.33333333333333331"

    def test_lookup(self, tmp_path):
        save_coeff_table(self.records(), tmp_path / "c.tbl")
        table = load_coeff_table(tmp_path / "c.tbl")
        rec = find_record(table, "linear", 10, 1000, 3, 49)
        assert rec.modules == 3
        with pytest.raises(KeyNotFoundError):
            find_record(table, "cubic:-0.5", 10, 1000, 3, 49)

    def test_env_default(self, tmp_path, monkeypatch):
        save_coeff_table(self.records()[:1], tmp_path / "env.tbl")
        monkeypatch.setenv("MODRECON_COEFF_TABLE", str(tmp_path / "env.tbl"))
        assert len(load_coeff_table()) == 1

    def test_update_replaces_by_key(self, tmp_path):
        path = tmp_path / "c.tbl"
        recs = self.records()
        update_coeff_table(path, recs[:3])
        first = path.read_bytes()
        update_coeff_table(path, recs[1:2])
        assert path.read_bytes() == first

    @pytest.mark.parametrize(
        "text",
        [
            "kernel=sh T=10 N=1000 M=2 Kpass=49 e=0 c=1\n",
            "kernel=sh T=ten N=1000 M=1 Kpass=49 e=0 c=1\n",
            "garbage\n",
            "kernel=sh T=10 N=1000 M=1 Kpass=49 c=1\n",
        ],
    )
    def test_malformed(self, tmp_path, text):
        (tmp_path / "bad").write_text(text)
        with pytest.raises(MalformedFileError):
            load_coeff_table(tmp_path / "bad")

    def test_comments_and_empty_coeffs(self, tmp_path):
        (tmp_path / "t").write_text("# hi\n\nkernel=sh T=1 N=10 M=0 Kpass=4 e=0 c=\n")
        (rec,) = load_coeff_table(tmp_path / "t").values()
        assert rec.coeffs == () and rec.bank().modules == 0
