"""
Modular reconstruction
======================

Multiply the interpolated waveform by a sum of cosines at multiples of the
sampling rate, then lowpass. Each module pulls one pair of spectral replicas
back into the band. With all floor(T/2) modules and the last weight halved,
the mixer is an impulse train and recovery is exact.
"""

import numpy as np

from modrecon import (
    classical_bank,
    decimate,
    generate_bandlimited_1d,
    impulse_train_bank,
    interpolate_1d,
    make_kernel,
    mixer_1d,
    modular_reconstruct_1d,
    snr_db,
)

N, T = 1000, 10
K = N // (2 * T) - 1
kern = make_kernel("sample_hold", T)
x = generate_bandlimited_1d(N, K, seed=1).samples
s = interpolate_1d(decimate(x, T), kern)

# %%
# One period of the mixer for a growing classical bank.
for m in range(T // 2 + 1):
    print(f"M={m}: mixer {np.round(mixer_1d(T, classical_bank(T, m)), 3) + 0.0}")
print("impulse-train bank:", np.round(mixer_1d(T, impulse_train_bank(T)), 12) + 0.0)

# %%
# Classical banks help, but only the halved last weight gives exact recovery.
for m in range(T // 2 + 1):
    print(f"classical M={m}: {snr_db(x, modular_reconstruct_1d(s, classical_bank(T, m), K)):7.2f} dB")
print(f"impulse train : {snr_db(x, modular_reconstruct_1d(s, impulse_train_bank(T), K)):7.2f} dB")
