"""
Spectral density, characteristic frequencies and poles
======================================================

The emitter amplitude is the Fourier transform of a response function F0.
Its peaks on the real axis are the characteristic frequencies, and its
complex poles rebuild c0(t) as a sum of damped exponentials.
"""

import math

import numpy as np

from atomcav import (characteristic_frequencies, integrate_collective, placed, poles_muller,
                     reconstruct, response_f0)
from atomcav.spectral import closed_form_splitting

###############################################################################
# Short cavity: one mirror mode, so the density is a Rabi doublet

short = placed("antinode", 100, 1e-5)
freqs = characteristic_frequencies(short)
print("single-mode peaks:", np.round(freqs, 4))
print("expected +-sqrt(4N-1)/(2 sqrt 2):", round(math.sqrt(399) / (2 * math.sqrt(2)), 4))

###############################################################################
# Long cavity: the doublet is pulled in and a ladder of cavity modes appears,
# spaced by the half-cavity free spectral range pi / eta

long_ = placed("antinode", 100, 1.0)
freqs = characteristic_frequencies(long_)
outer = freqs[freqs > np.min(np.abs(freqs)) + 1e-6]
print(f"{freqs.size} peaks; mean outer spacing {np.mean(np.diff(outer)):.4f} vs pi")

omega = np.linspace(-10, 10, 4001)
dens = response_f0(omega, long_).density
print(f"density at resonance (antinode, exact zero): {dens[2000]:.1e}")

###############################################################################
# The delay slows the splitting; compare the poles with the closed forms

for eta in (1e-4, 1e-3, 1e-2):
    p = placed("antinode", 100, eta)
    poles = poles_muller(p).poles
    split = poles.real.max() - poles.real.min() if poles.size == 2 else np.nan
    lo, hi = closed_form_splitting(p, form="resummed")
    print(f"eta = {eta:g}: pole splitting {split:.3f}, resummed closed form {hi - lo:.3f}")

###############################################################################
# Residue reconstruction: a handful of poles reproduce the time evolution

ps = poles_muller(long_)
traj = integrate_collective(long_, t_max=10.0, record_every=20)
for per_side in (1, 3, 8):
    rec = reconstruct(ps, traj.times, per_side, reference=traj.c0)
    print(f"{per_side} poles per side: max |c0_approx - c0| = {rec.max_error:.4f}")
