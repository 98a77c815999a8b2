import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from anyonsim.lattice import build, loop_operators, plaquette_operators
from anyonsim.pauli import Angle, PauliString, Pulse
from anyonsim import statevector as sv

from conftest import pauli_matrix

_SP = {
    "I": sp.identity(2, format="csr", dtype=complex),
    "X": sp.csr_matrix(np.array([[0, 1], [1, 0]], dtype=complex)),
    "Y": sp.csr_matrix(np.array([[0, -1j], [1j, 0]], dtype=complex)),
    "Z": sp.csr_matrix(np.array([[1, 0], [0, -1]], dtype=complex)),
}


def sparse_pauli(p, n):
    m = sp.identity(1, format="csr", dtype=complex)
    for site in reversed(range(n)):
        m = sp.kron(m, _SP[p.letter(site)], format="csr")
    return p.phase * m


def sparse_hamiltonian(lat, params):
    n = lat.site_count
    h = sp.csr_matrix((1 << n, 1 << n), dtype=complex)
    for link in lat.links:
        h = h - params.coupling(link.kind) * sparse_pauli(lat.link_operator(link), n)
    return h


def random_state(n, seed):
    rng = np.random.default_rng(seed)
    return sv.DenseState.normalized(rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n))


N = 5
small = st.builds(
    lambda d, k: PauliString.from_letters(d) * (1j**k),
    st.dictionaries(st.integers(0, N - 1), st.sampled_from("IXYZ"), max_size=N),
    st.integers(0, 3),
)


@given(small, st.integers(0, 2**16))
@settings(max_examples=150, deadline=None)
def test_apply_pauli_matches_kron(p, seed):
    v = random_state(N, seed)
    assert np.allclose(sv.apply_pauli(v, p), pauli_matrix(p, N) @ v.amplitudes)


@pytest.mark.parametrize("params", [sv.ModelParams(1, 1, 1), sv.ModelParams(0.2, 0.3, 1.0), sv.ModelParams(0, 0, 1)])
def test_hamiltonian_matches_sparse_build(torus, params):
    h = sparse_hamiltonian(torus, params)
    v = random_state(16, 11)
    assert np.allclose(sv.hamiltonian_apply(torus, params, v), h @ v.amplitudes, atol=1e-12)


def test_full_ground_energy_matches_dense_eigh():
    lat = build(2, 2)
    params = sv.ModelParams(0.7, 0.4, 1.0)
    h = sparse_hamiltonian(lat, params).toarray()
    want = np.linalg.eigvalsh(h)[0]
    e, _ = sv.ground_state(lat, params, None)
    assert e == pytest.approx(want, abs=1e-9)


def test_ground_sector_on_torus(torus):
    params = sv.ModelParams(0.2, 0.2, 1.0)
    e, g = sv.ground_state(torus, params)
    for w in plaquette_operators(torus):
        assert sv.expect_dense(g, w).real == pytest.approx(1, abs=1e-9)
    # Independent route: sparse matrix compressed into the W = +1 subspace.
    proj = sp.identity(1 << 16, format="csr", dtype=complex)
    for w in plaquette_operators(torus):
        proj = proj @ (0.5 * (sp.identity(1 << 16, format="csr") + sparse_pauli(w, 16)))
    h = proj @ sparse_hamiltonian(torus, params) @ proj + 10 * (sp.identity(1 << 16) - proj)
    from scipy.sparse.linalg import eigsh

    want = eigsh(h, k=1, which="SA")[0][0]
    assert e == pytest.approx(want, abs=1e-8)


def test_toric_limit_energy(torus):
    e, _ = sv.ground_state(torus, sv.ModelParams(0, 0, 1.0))
    assert e == pytest.approx(-8.0, abs=1e-9)


def test_sector_engine_matches_dense(torus):
    params = sv.ModelParams(0.3, 0.3, 1.0)
    for flipped in [(), (0, 1), (2, 6)]:
        a = sv.sector_energy(torus, params, flipped, "sector")
        b = sv.sector_energy(torus, params, flipped, "dense")
        assert a == pytest.approx(b, abs=1e-9)


def test_gap_is_positive_and_small(torus):
    params = sv.ModelParams(0.1, 0.1, 1.0)
    gap = sv.two_vortex_gap(torus, params, (0, 1))
    assert 0 < gap < 0.1


def test_effective_coupling():
    assert sv.effective_coupling(sv.ModelParams(0.1, 0.2, 1.0)) == pytest.approx(0.01 * 0.04 / 16)
    with pytest.raises(ValueError):
        sv.effective_coupling(sv.ModelParams(1, 1, 0))
    with pytest.raises(ValueError):
        sv.ModelParams(0, 0, 0)


def test_empty_sector_raises(torus):
    # Product of all plaquettes is fixed; flipping a single one is impossible.
    with pytest.raises(sv.ConvergenceError):
        sv.ground_state(torus, sv.ModelParams(0, 0, 1), sv.sector_constraints(torus, (0,), None))


def test_rotation_conventions():
    v = sv.DenseState.basis(1)
    x = PauliString.parse("X0")
    pi = sv.apply_rotation(v, x, np.pi).amplitudes
    assert np.allclose(pi, [0, -1j])
    half = sv.apply_rotation(v, x, np.pi / 2).amplitudes
    assert np.allclose(half, np.array([1, -1j]) / np.sqrt(2))
    back = sv.apply_rotation(sv.apply_rotation(v, x, np.pi / 2), x, -np.pi / 2)
    assert np.allclose(back.amplitudes, v.amplitudes)
    with pytest.raises(ValueError):
        sv.apply_rotation(v, x * 1j, np.pi)


def test_marginals_bit_order():
    # Site 2 down, everything else up.
    v = sv.DenseState.basis(4, 0b0100)
    p = sv.marginal_probabilities(v, [2, 0])
    assert p[0b01] == pytest.approx(1)
    counts = sv.sample_basis(v, [], [2, 0], 10, seed=0)
    assert counts == {"10": 10}


def test_sampling_seeded_and_convergent():
    v = sv.apply_rotation(sv.DenseState.basis(2), PauliString.parse("Y0"), np.pi / 3)
    a = sv.sample_basis(v, [], [0], 10_000, seed=4)
    assert a == sv.sample_basis(v, [], [0], 10_000, seed=4)
    p1 = np.sin(np.pi / 6) ** 2
    assert abs(a.get("1", 0) / 10_000 - p1) < 5 * np.sqrt(p1 * (1 - p1) / 10_000)
    with pytest.raises(ValueError):
        sv.sample_basis(v, [], [0], 0, seed=0)


def test_checkpoint_round_trip(tmp_path, torus):
    g = sv.toric_ground_state(torus)
    path = tmp_path / "g.bin"
    sv.save_checkpoint(path, g, torus, seed=7)
    back, seed = sv.load_checkpoint(path, torus)
    assert seed == 7
    assert back.fidelity(g) == pytest.approx(1, abs=1e-6)
    with pytest.raises(ValueError):
        sv.load_checkpoint(path, build(2, 4, "torus"))
    raw = bytearray(path.read_bytes())
    big = int(np.argmax(np.abs(g.amplitudes)))
    raw[52 + 8 * big:60 + 8 * big] = bytes(8)
    bad = tmp_path / "bad.bin"
    bad.write_bytes(raw)
    with pytest.raises(ValueError):
        sv.load_checkpoint(bad, torus)
    (tmp_path / "junk.bin").write_bytes(b"nope")
    with pytest.raises(ValueError):
        sv.load_checkpoint(tmp_path / "junk.bin")


def test_size_cap(monkeypatch):
    with pytest.raises(sv.SizeCapError):
        sv.toric_ground_state(build(6, 6))
    monkeypatch.setenv("ANYONSIM_DENSE_CAP", "10")
    with pytest.raises(sv.SizeCapError):
        sv.toric_ground_state(build(4, 2, "torus"))
    assert sv.dense_cap() == 10


def test_state_validation():
    with pytest.raises(ValueError):
        sv.DenseState(np.ones(4))
    with pytest.raises(ValueError):
        sv.DenseState(np.ones(3) / np.sqrt(3))
    with pytest.raises(ValueError):
        sv.DenseState.normalized(np.zeros(4))


def test_loop_sector_energies_are_degenerate_in_toric_limit(torus):
    params = sv.ModelParams(0, 0, 1.0)
    energies = set()
    for loops in [(1, 1), (1, -1), (-1, 1), (-1, -1)]:
        cons = sv.sector_constraints(torus, (), loops)
        energies.add(round(sv.ground_state(torus, params, cons)[0], 9))
    assert energies == {-8.0}
    assert len(loop_operators(torus)) == 2


def test_protocol_on_dense_matches_rotations(torus):
    g = sv.toric_ground_state(torus)
    pr = [Pulse(PauliString.parse("Z0"), Angle.PI_OVER_2), Pulse(PauliString.parse("X3 X4"))]
    manual = sv.apply_rotation(sv.apply_rotation(g, pr[0].op, np.pi / 2), pr[1].op, np.pi)
    assert np.allclose(sv.apply_protocol(g, pr).amplitudes, manual.amplitudes)
