"""
Error budget for a braid
========================

Recoil energy, microwave pulse shape, off-resonant flips of non-target atoms,
the cost of a laser pointing error, and photon scattering over a 60-operation
protocol.
"""

import math

from anyonsim import pulsecraft as pc

atoms = pc.AtomLattice()
pulse = pc.standard_pulse(atoms)
print(f"E_R/h = {atoms.recoil / pc.H:.1f} Hz, pulse period {pulse.duration * 1e6:.1f} us")

# Non-target atoms see the microwave detuned by delta
for frac in (0.25, 0.5, 1.0):
    print(f"flip at {frac:4.2f} delta: {pc.flip_probability(pulse.with_detuning(frac * atoms.delta)):.2e}")

# A 10 nm laser displacement shifts the target by about 2 pi x 350 Hz
half = pc.standard_pulse(atoms, area=math.pi / 2)
for hz in (100, 350, 1000):
    print(f"{hz:5d} Hz detuning: pi/2 infidelity {pc.rotation_infidelity(half, 2 * math.pi * hz):.2e}")

print()
print(pc.budget(atoms).table())
