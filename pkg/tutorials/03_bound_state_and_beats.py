"""
Bound state, frequency pulling and phase beats
==============================================

With the emitter at a node the response has a pole exactly on the real axis,
so a fraction of the excitation never decays. Detuning the cavity by delta_c
moves that pole off zero; the emitter phase then winds at the pulled
frequency.
"""

import math

import numpy as np

from atomcav import extract_phase_beats, frequency_pulling, integrate_collective, placed, poles_muller
from atomcav.residue import plateau_from_pole
from atomcav.spectral import coupling_saturation_scan

###############################################################################
# Plateau of the bound state from its pole weight, for short and long cavities

for eta in (1e-5, 0.1, 1.0):
    plateau = plateau_from_pole(poles_muller(placed("node", 100, eta)))
    print(f"eta = {eta:g}: trapped population {plateau:.4f}")

###############################################################################
# Coupling grows as sqrt(N) in a short cavity but saturates in a long one

ns = [25, 100, 400]
table = coupling_saturation_scan(ns, [1e-5, 1.0])
for n, row in zip(ns, table):
    print(f"N = {n:3d}: |omega_p| = {row[0]:7.3f} (eta=1e-5)  {row[1]:6.3f} (eta=1)")

###############################################################################
# Cavity detuning pulls the bound-state line; at a quarter of the free
# spectral range the emitter ends up at an antinode and the line splits

for dc in (0.0, 0.25, math.pi / 2):
    res = frequency_pulling(placed("node", 100, 1.0, delta_c=dc))
    label = f"doublet {np.round(res.doublet, 4)}" if res.is_doublet else f"{res.omega:+.5f}"
    print(f"delta_c = {dc:.3f}: {label}")

###############################################################################
# The dynamical phase winds at the pulled frequency, giving a slow beat

p = placed("node", 100, 1.0, delta_c=0.25)
beats = extract_phase_beats(integrate_collective(p, 400.0, record_every=20), t_start=20.0)
pulled = frequency_pulling(p).omega
print(f"beat period {beats.period:.2f} vs 2 pi / |omega_0'| = {2 * math.pi / abs(pulled):.2f}")
