"""
Least-squares module weights
============================

With fewer than floor(T/2) modules the all-ones bank is not the best
choice. Solving for the weights that flatten the passband gain gives much
better reconstructions, and the results can be stored in a lookup table.
"""

import tempfile
from pathlib import Path

import numpy as np

from modrecon import (
    assemble_system_1d,
    classical_bank,
    decimate,
    generate_bandlimited_1d,
    interpolate_1d,
    load_coeff_table,
    make_kernel,
    modular_reconstruct_1d,
    residual_error,
    save_coeff_table,
    snr_db,
    solve_coefficients_1d,
)

N, T = 1000, 10
K = N // (2 * T) - 1
kern = make_kernel("sample_hold", T)
x = generate_bandlimited_1d(N, K, seed=2).samples
s = interpolate_1d(decimate(x, T), kern)

records = []
for m in range(1, T // 2 + 1):
    rec = solve_coefficients_1d(kern, N, m)
    records.append(rec)
    e_ones = residual_error(assemble_system_1d(kern, N, m), np.ones(m))
    snr_c = snr_db(x, modular_reconstruct_1d(s, classical_bank(T, m), K))
    snr_o = snr_db(x, modular_reconstruct_1d(s, rec.bank(), K))
    print(f"M={m}: residual {e_ones:9.3e} -> {rec.residual_error:9.3e}, SNR {snr_c:6.2f} -> {snr_o:6.2f} dB")
    print("      weights", np.round(rec.coeffs, 4))

# %%
# Round-trip through the on-disk table format.
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "coeffs.tbl"
    save_coeff_table(records, path)
    print(path.read_text().splitlines()[1])
    assert list(load_coeff_table(path).values()) == records
