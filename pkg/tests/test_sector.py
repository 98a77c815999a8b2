import numpy as np
import pytest

from anyonsim.lattice import build
from anyonsim.pauli import PauliString, commutes
from anyonsim.sector import SectorCode, SectorError, SectorHamiltonian
from anyonsim import statevector as sv


def dense_spectrum(lat, params, constraints, dim):
    """Spectrum of H compressed onto an orthonormal basis of the projected subspace."""
    n = lat.site_count
    rng = np.random.default_rng(0)
    cols = []
    for _ in range(dim + 8):
        v = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
        for op, sign in constraints:
            v = 0.5 * (v + sign * sv.apply_pauli(v, op, n))
        cols.append(v)
    q, r = np.linalg.qr(np.column_stack(cols))
    rank = int(np.sum(np.abs(np.diag(r)) > 1e-8 * np.abs(r[0, 0])))
    assert rank == dim
    q = q[:, :dim]
    hq = np.column_stack([sv.hamiltonian_apply(lat, params, q[:, j]) for j in range(dim)])
    return np.linalg.eigvalsh(q.conj().T @ hq)


@pytest.mark.parametrize("flipped,loops", [((), (1, 1)), ((0, 1), (1, -1)), ((2, 6), (-1, -1))])
def test_full_sector_spectrum_matches_dense(torus, flipped, loops):
    params = sv.ModelParams(0.4, 0.3, 1.0)
    cons = sv.sector_constraints(torus, flipped, loops)
    h = SectorHamiltonian(torus, params, cons)
    m = np.column_stack([h.apply(c) for c in np.eye(h.dimension, dtype=complex)])
    assert np.allclose(m, m.conj().T)
    mine = np.linalg.eigvalsh(m)
    want = dense_spectrum(torus, params, cons, h.dimension)
    assert np.allclose(mine, want, atol=1e-10)


def test_open_patch_sector():
    lat = build(2, 3)
    params = sv.ModelParams(0.5, 0.5, 1.0)
    cons = sv.sector_constraints(lat)
    h = SectorHamiltonian(lat, params, cons)
    e, _ = sv.ground_state(lat, params, cons)
    assert h.lowest() == pytest.approx(e, abs=1e-9)


def test_code_relations(torus):
    code = SectorCode.build(torus.site_count, sv.sector_constraints(torus))
    stabs, destabs = code.stabilizers, code.destabilizers
    assert len(stabs) + code.k == torus.site_count
    for i, s in enumerate(stabs):
        for j, d in enumerate(destabs):
            assert commutes(s, d) == (i != j)
        for lx, lz in zip(code.logical_x, code.logical_z):
            assert commutes(s, lx) and commutes(s, lz)
    for i, (ax, az) in enumerate(zip(code.logical_x, code.logical_z)):
        for j, (bx, bz) in enumerate(zip(code.logical_x, code.logical_z)):
            assert commutes(ax, bz) == (i != j)
            assert commutes(ax, bx) and commutes(az, bz)


def test_contradictory_constraints():
    z = PauliString.parse("Z0 Z1")
    with pytest.raises(SectorError):
        SectorCode.build(2, [(z, 1), (PauliString.parse("Z0"), 1), (PauliString.parse("Z1"), -1)])
    with pytest.raises(SectorError):
        SectorCode.build(2, [(z * 1j, 1)])


def test_restrict_rejects_sector_breaking_term(torus):
    code = SectorCode.build(torus.site_count, sv.sector_constraints(torus))
    with pytest.raises(SectorError):
        code.restrict(PauliString.parse("Z0"))


def test_sector_reaches_beyond_dense_cap():
    lat = build(6, 3, "torus")
    cons = sv.sector_constraints(lat, (), (1, 1))
    h = SectorHamiltonian(lat, sv.ModelParams(0.1, 0.1, 1.0), cons)
    assert lat.site_count > sv.dense_cap()
    assert h.k == 36 - 17 - 2  # one plaquette relation on a torus
