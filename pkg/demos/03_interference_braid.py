"""
Braiding around a superposition
===============================

Put an m-vortex into a superposition of "here" and "absent" with pi/2
pulses, carry an e-vortex around it, and undo the pi/2 pulses.  The
syndrome shows a vortex pair at the crossing site D'.  A tempting
shortcut with a single pi/2 pulse leaves a different state.
"""

from pathlib import Path

from anyonsim import braid
from anyonsim.lattice import build
from anyonsim import stabilizer as stab
from anyonsim import statevector as sv

lat = build(6, 6)
g = stab.prepare_ground(lat)
ex = braid.protocol_fig4(lat, with_central_m=True)
for p in ex.protocol:
    print(f"{p.angle.value:6s} {p.op}")
syn = stab.syndrome(stab.apply_protocol(g.copy(), ex.protocol), lat)
print("D' =", ex.crossing_sites[0], "flipped plaquettes:", sorted(syn.flipped()))

vac = braid.protocol_fig4(lat, with_central_m=False)
print("without the central m:", sorted(stab.syndrome(stab.apply_protocol(g.copy(), vac.protocol), lat).flipped()))

out = Path("demo-out")
out.mkdir(exist_ok=True)
(out / "interference.svg").write_text(ex.svg())

# the wrong protocol, compared with state vectors on the small torus
tor = build(4, 2, "torus")
psi = sv.toric_ground_state(tor)
good = sv.apply_protocol(psi, braid.protocol_fig4(tor).protocol)
bad = sv.apply_protocol(psi, braid.protocol_fig4(tor, wrong=True).protocol)
print("fidelity(correct, wrong) =", good.fidelity(bad))
