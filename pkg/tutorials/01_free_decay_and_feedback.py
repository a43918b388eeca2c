"""
Free decay and the first echo from the mirrors
==============================================

An excited emitter sits between two atomic mirrors a distance d away on each
side. Time is in units of 1/gamma and eta = gamma d / v is the one-way delay.
Until the emitted light has made a round trip the emitter decays as if it
were alone; afterwards the mirrors feed the excitation back.
"""

import math

import numpy as np

from atomcav import integrate_collective, placed
from atomcav.dde import free_decay_reference

# 100 atoms per mirror, one delay unit away, emitter at an antinode
params = placed("antinode", 100, 1.0)
traj = integrate_collective(params, t_max=10.0, steps_per_delay=2000, record_every=20)

###############################################################################
# Before the first round trip (t < 2 eta) the light has not come back

early = traj.times < 2 * params.eta
gap = np.max(np.abs(np.abs(traj.c0[early]) - np.abs(free_decay_reference(traj.times[early]))))
print(f"max deviation from e^(-t/2) before the echo: {gap:.2e}")

###############################################################################
# The mirror amplitudes switch on just after t = eta and stay equal by symmetry

first = traj.times[np.argmax(np.abs(traj.c_lm) > 0)]
print(f"mirrors first excited at t = {first:.3f}")
print(f"left and right mirrors identical: {np.array_equal(traj.c_lm, traj.c_rm)}")

###############################################################################
# Populations at a few times. The sum stays below one; the rest is in the field.

for t in (0.5, 2.5, 5.0, 10.0):
    i = np.argmin(np.abs(traj.times - t))
    total = traj.p0[i] + traj.p_lm[i] + traj.p_rm[i]
    print(f"t = {t:5.1f}   |c0|^2 = {traj.p0[i]:.4f}   2|cM|^2 = {2 * traj.p_lm[i]:.4f}   sum = {total:.4f}")

###############################################################################
# At a node the emitter does not fully decay: part of the excitation is trapped
# in an atom-photon bound state

node = integrate_collective(placed("node", 100, 1.0), t_max=200.0, record_every=200)
print(f"node: |c0|^2 averaged over t > 150 is {np.mean(node.p0[node.times > 150]):.3f}")

###############################################################################
# Shrinking the delay approaches the single-mode limit, where the emitter and
# the mirror mode exchange the excitation at the Rabi frequency sqrt(2N)

short = integrate_collective(placed("antinode", 100, 1e-4), t_max=2.0, steps_per_delay=5)
crossings = np.flatnonzero(np.diff(np.sign(short.c0.real)) != 0)
half_period = np.mean(np.diff(short.times[crossings]))
print(f"short cavity oscillation: {2 * math.pi / half_period:.3f} vs sqrt(2N) = {math.sqrt(200):.3f}")
