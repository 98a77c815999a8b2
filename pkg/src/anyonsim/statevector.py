"""Dense state-vector engine: the brute-force oracle.

Site ``j`` is bit ``j`` of the amplitude index; bit value 0 is spin up
(``Z = +1``).  Pauli strings act matrix-free through bit masks, so no
operator matrix is ever materialized.
"""

from __future__ import annotations

import math
import os
import struct
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse.linalg import LinearOperator, eigsh

from .lattice import Lattice, LinkType, loop_operators, plaquette_operators
from .pauli import PauliString, Protocol, Pulse

__all__ = [
    "DEFAULT_CAP",
    "dense_cap",
    "ModelParams",
    "DenseState",
    "SizeCapError",
    "ConvergenceError",
    "apply_pauli",
    "hamiltonian_apply",
    "KitaevHamiltonian",
    "ground_state",
    "sector_constraints",
    "two_vortex_gap",
    "sector_energy",
    "effective_coupling",
    "apply_rotation",
    "apply_protocol",
    "expect_dense",
    "sample_basis",
    "marginal_probabilities",
    "toric_ground_state",
    "from_stabilizer",
    "save_checkpoint",
    "load_checkpoint",
]

DEFAULT_CAP = 24
_MAGIC = b"ANYSIMv1"


class SizeCapError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


def dense_cap() -> int:
    """Site cap for dense vectors; ``ANYONSIM_DENSE_CAP`` overrides the default."""
    value = os.environ.get("ANYONSIM_DENSE_CAP")
    return int(value) if value else DEFAULT_CAP


def _check_size(n: int) -> None:
    cap = dense_cap()
    if n > cap:
        raise SizeCapError(f"{n} sites exceed the dense cap of {cap} (set ANYONSIM_DENSE_CAP)")


@lru_cache(maxsize=8)
def _indices(n: int) -> np.ndarray:
    return np.arange(1 << n, dtype=np.int64)


def _parity_sign(n: int, zmask: int) -> np.ndarray:
    par = np.bitwise_count(_indices(n) & zmask) & 1
    return 1.0 - 2.0 * par


@dataclass(frozen=True)
class ModelParams:
    """Couplings of ``H = -jx sum XX - jy sum YY - jz sum ZZ``."""

    jx: float
    jy: float
    jz: float

    def __post_init__(self):
        if self.jx == 0 and self.jy == 0 and self.jz == 0:
            raise ValueError("at least one coupling must be non-zero")

    @property
    def abelian(self) -> bool:
        return abs(self.jz) >= abs(self.jx) and abs(self.jz) >= abs(self.jy)

    def coupling(self, kind: LinkType) -> float:
        return {LinkType.X: self.jx, LinkType.Y: self.jy, LinkType.Z: self.jz}[kind]


class DenseState:
    """Normalized amplitude vector on ``n`` sites."""

    def __init__(self, amplitudes, n: int | None = None, check=True):
        amps = np.asarray(amplitudes, dtype=np.complex128)
        if n is None:
            n = int(amps.size).bit_length() - 1
        if amps.shape != (1 << n,):
            raise ValueError(f"expected {1 << n} amplitudes, got shape {amps.shape}")
        _check_size(n)
        self.n = n
        self.amplitudes = amps
        if check:
            norm = np.linalg.norm(amps)
            if abs(norm - 1) > 1e-12:
                raise ValueError(f"state norm {norm!r} differs from 1")

    @classmethod
    def basis(cls, n: int, index: int = 0) -> "DenseState":
        _check_size(n)
        v = np.zeros(1 << n, dtype=np.complex128)
        v[index] = 1
        return cls(v, n)

    @classmethod
    def normalized(cls, vec, n: int | None = None) -> "DenseState":
        vec = np.asarray(vec, dtype=np.complex128)
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(vec / norm, n)

    def copy(self) -> "DenseState":
        return DenseState(self.amplitudes.copy(), self.n, check=False)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def overlap(self, other: "DenseState") -> complex:
        """``<self|other>``."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "DenseState") -> float:
        return abs(self.overlap(other)) ** 2

    def __repr__(self) -> str:
        return f"DenseState(n={self.n})"


def _amps(v) -> np.ndarray:
    return v.amplitudes if isinstance(v, DenseState) else np.asarray(v)


def apply_pauli(v, p: PauliString, n: int | None = None) -> np.ndarray:
    """Return ``p |v>`` as a raw amplitude array."""
    a = _amps(v)
    if n is None:
        n = int(a.size).bit_length() - 1
    if p.support >> n:
        raise ValueError(f"{p} acts outside {n} sites")
    coeff = 1j ** ((p.k + p.num_y()) % 4)
    out = a
    if p.z:
        out = out * _parity_sign(n, p.z)
    if coeff != 1:
        out = out * coeff
    if p.x:
        out = out[_indices(n) ^ p.x]
    elif out is a:
        out = a.copy()
    return out


class KitaevHamiltonian:
    """Matrix-free action of the honeycomb spin Hamiltonian on a lattice."""

    def __init__(self, lat: Lattice, params: ModelParams):
        _check_size(lat.site_count)
        self.lattice = lat
        self.params = params
        n = self.n = lat.site_count
        idx = _indices(n)
        diag = np.zeros(1 << n)
        self._flips = []  # (x mask, coefficient array or scalar)
        for link in lat.links:
            j = params.coupling(link.kind)
            if j == 0:
                continue
            mask = (1 << link.a) | (1 << link.b)
            if link.kind is LinkType.Z:
                diag -= j * _parity_sign(n, mask)
            elif link.kind is LinkType.X:
                self._flips.append((mask, -j))
            else:
                # Y_a Y_b |b> = -(-1)^{b_a + b_b} |b ^ mask>
                self._flips.append((mask, j * _parity_sign(n, mask)))
        self._diag = diag
        self._idx = idx
        self.scale = sum(abs(params.coupling(l.kind)) for l in lat.links)

    def apply(self, v) -> np.ndarray:
        a = _amps(v)
        out = self._diag * a
        for mask, coeff in self._flips:
            out += (coeff * a)[self._idx ^ mask]
        return out

    def energy(self, v) -> float:
        a = _amps(v)
        return float(np.vdot(a, self.apply(a)).real / np.vdot(a, a).real)

    def as_operator(self, projector=None) -> LinearOperator:
        dim = 1 << self.n
        if projector is None:
            mv = self.apply
        else:
            def mv(x):
                return projector(self.apply(projector(x.ravel())))
        return LinearOperator((dim, dim), matvec=mv, dtype=np.complex128)


def hamiltonian_apply(lat: Lattice, params: ModelParams, v) -> np.ndarray:
    return KitaevHamiltonian(lat, params).apply(v)


def effective_coupling(params: ModelParams) -> float:
    """Toric-code coupling ``jx^2 jy^2 / (16 |jz|^3)``."""
    if params.jz == 0:
        raise ValueError("effective coupling needs jz != 0")
    return params.jx**2 * params.jy**2 / (16 * abs(params.jz) ** 3)


def sector_constraints(lat: Lattice, flipped: Iterable[int] = (), loops=(1, 1)):
    """``(operator, sign)`` pairs fixing every plaquette and, on a torus, both loops.

    Plaquettes with ids in ``flipped`` are fixed to -1.  ``loops`` gives the
    signs of the two loop operators from :func:`loop_operators`; pass ``None``
    to leave the loops free.
    """
    flipped = set(flipped)
    cons = [(w, -1 if p.id in flipped else 1)
            for p, w in zip(lat.plaquettes, plaquette_operators(lat))]
    if loops is not None:
        cons += list(zip(loop_operators(lat), loops))
    return cons


def _projector(constraints, n):
    def project(x):
        for op, sign in constraints:
            x = 0.5 * (x + sign * apply_pauli(x, op, n))
        return x
    return project


def ground_state(
    lat: Lattice,
    params: ModelParams,
    sector_fixing="ground",
    *,
    tol: float = 1e-8,
    maxiter: int = 5000,
    seed: int = 0,
) -> tuple[float, DenseState]:
    """Lowest eigenpair of the spin Hamiltonian inside a conserved sector.

    ``sector_fixing`` is ``"ground"`` (every plaquette +1, loops free), ``None``
    (no projection) or an explicit list of ``(operator, sign)`` constraints.
    Uses restarted Lanczos (ARPACK) on the projected operator.
    """
    n = lat.site_count
    ham = KitaevHamiltonian(lat, params)
    if sector_fixing == "ground":
        constraints = sector_constraints(lat, loops=None)
    elif sector_fixing is None:
        constraints = []
    else:
        constraints = list(sector_fixing)
    project = _projector(constraints, n)
    rng = np.random.default_rng(seed)
    v0 = project(rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n))
    if np.linalg.norm(v0) < 1e-8:
        raise ConvergenceError("requested sector is empty")
    op = ham.as_operator(project if constraints else None)
    try:
        vals, vecs = eigsh(op, k=1, which="SA", v0=v0, tol=0, maxiter=maxiter)
    except Exception as exc:  # ArpackNoConvergence and friends
        raise ConvergenceError(f"eigensolver failed: {exc}") from exc
    vec = project(vecs[:, 0])
    vec /= np.linalg.norm(vec)
    energy = ham.energy(vec)
    residual = float(np.linalg.norm(ham.apply(vec) - energy * vec))
    if residual > tol * ham.scale:
        raise ConvergenceError(f"residual {residual:.3e} exceeds {tol * ham.scale:.3e}")
    # Fix the global phase: largest amplitude real and positive.
    big = np.argmax(np.abs(vec))
    vec *= np.conj(vec[big]) / abs(vec[big])
    return energy, DenseState(vec, n)


def _loop_sectors(lat: Lattice):
    return [(a, b) for a in (1, -1) for b in (1, -1)] if lat.is_torus else [()]


def sector_energy(lat: Lattice, params: ModelParams, flipped: Iterable[int] = (), engine="sector", **kw) -> float:
    """Lowest energy with plaquettes ``flipped`` at -1 and all others +1.

    On a torus the minimum is taken over the four loop sectors, each solved
    separately so near-degenerate loop states never meet in one Lanczos run.
    ``engine`` is ``"sector"`` (exact reduced ED) or ``"dense"``.
    """
    from .sector import sector_ground_energy

    flipped = tuple(flipped)
    energies = []
    for loops in _loop_sectors(lat):
        cons = sector_constraints(lat, flipped, loops or None)
        if engine == "sector":
            energies.append(sector_ground_energy(lat, params, cons, **kw))
        elif engine == "dense":
            energies.append(ground_state(lat, params, cons, **kw)[0])
        else:
            raise ValueError(f"unknown engine {engine!r}")
    return min(energies)


def two_vortex_gap(lat: Lattice, params: ModelParams, pair: Sequence[int], engine="sector", **kw) -> float:
    """Energy of the lowest state with plaquettes ``pair`` at -1, above the vortex-free one."""
    return (sector_energy(lat, params, pair, engine, **kw)
            - sector_energy(lat, params, (), engine, **kw))


def apply_rotation(v, op: PauliString, angle: float) -> DenseState:
    """``exp(-i angle/2 op) |v>``; angle pi gives ``-i op``, pi/2 gives ``(I - i op)/sqrt 2``."""
    if not op.is_hermitian:
        raise ValueError(f"rotation axis must be Hermitian, got {op}")
    a = _amps(v)
    n = v.n if isinstance(v, DenseState) else int(a.size).bit_length() - 1
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    out = c * a - 1j * s * apply_pauli(a, op, n)
    return DenseState(out, n, check=False)


def apply_protocol(v, protocol: Iterable[Pulse]) -> DenseState:
    state = v if isinstance(v, DenseState) else DenseState(v)
    for pulse in protocol:
        state = apply_rotation(state, pulse.op, pulse.angle.radians)
    return state


def expect_dense(v, p: PauliString) -> complex:
    a = _amps(v)
    return complex(np.vdot(a, apply_pauli(a, p)))


def marginal_probabilities(v, sites: Sequence[int]) -> np.ndarray:
    """Born probabilities of the ``2**len(sites)`` outcomes on ``sites``.

    Outcome index bit ``i`` is the bit of ``sites[i]``.
    """
    a = _amps(v)
    n = int(a.size).bit_length() - 1
    probs = np.abs(a) ** 2
    # Axis j of the reshaped tensor holds bit (n-1-j).
    t = probs.reshape((2,) * n)
    axes = [n - 1 - s for s in sites]
    rest = tuple(ax for ax in range(n) if ax not in axes)
    m = t.sum(axis=rest) if rest else t
    # Remaining axes appear in increasing order; reorder to match ``sites``.
    kept = sorted(axes)
    m = np.transpose(m, [kept.index(ax) for ax in axes])
    # m[b0, b1, ...] with b_i the bit of sites[i]; flatten so bit i is weight 2**i.
    out = np.zeros(1 << len(sites))
    for outcome in range(1 << len(sites)):
        bits = tuple((outcome >> i) & 1 for i in range(len(sites)))
        out[outcome] = m[bits]
    return out


def sample_basis(
    v,
    basis_changes: Iterable[Pulse] | Protocol,
    sites: Sequence[int],
    shots: int,
    seed,
) -> dict[str, int]:
    """Rotate, then sample ``sites`` in the computational basis.

    Keys are bit strings with ``key[i]`` the bit of ``sites[i]`` ("0" = up).
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    state = apply_protocol(v if isinstance(v, DenseState) else DenseState(v), basis_changes)
    probs = marginal_probabilities(state, sites)
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    draws = rng.multinomial(shots, probs)
    k = len(sites)
    return {
        "".join(str((o >> i) & 1) for i in range(k)): int(c)
        for o, c in enumerate(draws)
        if c
    }


def toric_ground_state(lat: Lattice) -> DenseState:
    """All spins up projected onto every ``W_p = +1``.

    Equals the stabilizer engine's ``prepare_ground`` state.
    """
    n = lat.site_count
    _check_size(n)
    v = np.zeros(1 << n, dtype=np.complex128)
    v[0] = 1
    v = _projector(sector_constraints(lat, loops=None), n)(v)
    return DenseState.normalized(v, n)


def from_stabilizer(state, seed: int = 0) -> DenseState:
    """Dense vector of a stabilizer state (global phase: largest amplitude positive)."""
    n = state.n
    _check_size(n)
    cons = [(g.unsigned(), int(g.phase.real)) for g in state.generators]
    project = _projector(cons, n)
    rng = np.random.default_rng(seed)
    v = project(rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n))
    big = np.argmax(np.abs(v))
    v *= np.conj(v[big]) / abs(v[big])
    return DenseState.normalized(v, n)


def save_checkpoint(path, state: DenseState, lattice: Lattice | None = None, seed: int | None = None):
    """Header (magic, n, lattice sha256, seed) then little-endian complex64 amplitudes."""
    digest = lattice.digest if lattice is not None else bytes(32)
    header = _MAGIC + struct.pack("<I", state.n) + digest + struct.pack("<q", -1 if seed is None else seed)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(state.amplitudes.astype("<c8").tobytes())


def load_checkpoint(path, lattice: Lattice | None = None, norm_tol: float = 1e-5):
    """Return ``(state, seed)``; checks the lattice hash when ``lattice`` is given."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:8] != _MAGIC:
        raise ValueError(f"{path} is not an anyonsim checkpoint")
    (n,) = struct.unpack_from("<I", raw, 8)
    digest = raw[12:44]
    (seed,) = struct.unpack_from("<q", raw, 44)
    if lattice is not None and digest != lattice.digest:
        raise ValueError("checkpoint was written for a different lattice")
    amps = np.frombuffer(raw, dtype="<c8", offset=52).astype(np.complex128)
    if amps.size != 1 << n:
        raise ValueError(f"checkpoint holds {amps.size} amplitudes, expected {1 << n}")
    norm = np.linalg.norm(amps)
    if abs(norm - 1) > norm_tol:
        raise ValueError(f"checkpoint norm {norm} is not 1")
    return DenseState(amps / norm, n), (None if seed < 0 else seed)
