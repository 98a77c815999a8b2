"""
How much does a vortex pair cost?
=================================

Deep in the toric-code regime the two-vortex gap should approach 4 J_eff
with J_eff = jx^2 jy^2 / (16 jz^3).  The smallest torus is too small
for this: loops of four x/y links wrap around it and add their own
fourth-order terms.  A 6x3 torus, handled with the sector-reduced
diagonalization, converges.  Pass --big to run it (about a minute).
"""

import sys

from anyonsim import braid
from anyonsim.lattice import build
from anyonsim import statevector as sv

shapes = [(4, 2, "torus")] + ([(6, 3, "torus")] if "--big" in sys.argv else [])
for shape in shapes:
    lat = build(*shape)
    pair = tuple(sorted(braid.moves(lat)[0].ends))
    for eps in (0.1, 0.05, 0.02):
        p = sv.ModelParams(eps, eps, 1.0)
        gap = sv.two_vortex_gap(lat, p, pair)
        print(f"{lat}  jx=jy={eps}:  gap {gap:.3e}  gap/4J_eff {gap / (4 * sv.effective_coupling(p)):.3f}")
