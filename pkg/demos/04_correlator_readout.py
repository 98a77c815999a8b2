"""
Reading out the sign flip
=========================

The interference braid multiplies the state by i h_D'.  That negates the
two-site correlators T^xx and T^yx on the z-link (D', F).  Here we measure them
the way the experiment would: rotate, shelve non-target atoms, count
fluorescence levels.
"""

import numpy as np

from anyonsim import braid, readout
from anyonsim.lattice import build
from anyonsim import statevector as sv

tor = build(4, 2, "torus")
ex = braid.protocol_fig4(tor)
d = ex.crossing_sites[0]
f = d ^ 1

# On any W_p eigenstate both correlators vanish identically
psi = sv.toric_ground_state(tor)
psi1 = sv.apply_protocol(psi, braid.protocol_fig4(tor, False).protocol)
print("ground-state branch:", readout.nonvanishing_witness(psi1, d, f))

# A state with a definite relative phase on the (D', F) link does show them
idx = np.arange(1 << tor.site_count)
amps = np.zeros(idx.size, complex)
amps[0] = 1
amps[(1 << d) | (1 << f)] = np.exp(0.7j)
state1 = sv.DenseState.normalized(amps)
h = next(p.op for p in braid.compile_path(tor, "m", ex.paths["C_H"].plaquettes) if d in p.op.sites())
state2 = sv.DenseState(1j * sv.apply_pauli(state1, h), tor.site_count)

for basis in ("XX", "YX"):
    for name, s in (("psi1", state1), ("psi2", state2)):
        est = readout.run_fig5(s, basis, d, f, shots=10_000, seed=1)
        print(f"{basis} {name}: {est.value:+.3f} +- {est.std_error:.3f}  levels {est.level_histogram}")
