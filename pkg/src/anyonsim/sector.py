"""Exact diagonalization inside a fixed sector of conserved Pauli strings.

Every link term of the spin Hamiltonian commutes with the plaquette and loop
operators, so once their signs are fixed the Hamiltonian is a sum of Pauli
operators on ``n - m`` logical qubits (``m`` independent constraints).  A
symplectic Gram-Schmidt pass supplies destabilizers and logical pairs; each
link term is then rewritten exactly, phase included, in logical letters.
This reaches lattices far past the dense cap while staying exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.sparse.linalg import LinearOperator, eigsh

from .lattice import Lattice
from . import _gf2
from .pauli import PauliString, commutes, multiply, product

__all__ = ["SectorError", "SectorCode", "SectorHamiltonian", "sector_ground_energy"]

MAX_LOGICAL = 22


class SectorError(ValueError):
    pass


def _sym(a: PauliString, b: PauliString) -> int:
    return 0 if commutes(a, b) else 1


def _hermitian_product(a: PauliString, b: PauliString) -> PauliString:
    """``a b`` rescaled to phase +1 (letters only matter for the basis)."""
    return multiply(a, b).unsigned()


@dataclass
class SectorCode:
    """Signed stabilizers (each valued +1 in the sector), destabilizers and logical pairs."""

    n: int
    stabilizers: list[PauliString]
    destabilizers: list[PauliString]
    logical_x: list[PauliString]
    logical_z: list[PauliString]

    @property
    def k(self) -> int:
        return len(self.logical_x)

    @classmethod
    def build(cls, n: int, constraints: Sequence[tuple[PauliString, int]]) -> "SectorCode":
        signed: list[PauliString] = []
        for op, sign in constraints:
            if not op.is_hermitian or sign not in (1, -1):
                raise SectorError(f"bad constraint {op} = {sign}")
            signed.append(op * sign)
        for i, a in enumerate(signed):
            for b in signed[i + 1:]:
                if not commutes(a, b):
                    raise SectorError(f"constraints {a} and {b} do not commute")
        stabs = _independent(signed, n)

        pool = [PauliString.single(j, l) for j in range(n) for l in "XZ"]
        destabs: list[PauliString] = []
        for i in range(len(stabs)):
            a = stabs[i]
            j = next(j for j, v in enumerate(pool) if _sym(a, v))
            b = pool.pop(j)
            # Later stabilizers absorb a, which keeps them valued +1.
            for t in range(i + 1, len(stabs)):
                if _sym(stabs[t], b):
                    stabs[t] = multiply(stabs[t], a)
            pool = [v for v in (_orth(v, a, b) for v in pool) if not v.is_identity]
            destabs.append(b)
        lx: list[PauliString] = []
        lz: list[PauliString] = []
        while pool:
            a = pool.pop(0)
            j = next((j for j, v in enumerate(pool) if _sym(a, v)), None)
            if j is None:
                raise SectorError("degenerate logical space")
            b = pool.pop(j)
            pool = [v for v in (_orth(v, a, b) for v in pool) if not v.is_identity]
            lx.append(a)
            lz.append(b)
        if len(stabs) + len(lx) != n:
            raise SectorError(f"basis incomplete: {len(stabs)} stabilizers, {len(lx)} logical pairs")
        return cls(n, stabs, destabs, lx, lz)

    def restrict(self, h: PauliString) -> tuple[complex, PauliString]:
        """``h`` restricted to the sector as ``coeff * logical`` on ``k`` qubits."""
        for s in self.stabilizers:
            if not commutes(h, s):
                raise SectorError(f"{h} does not preserve the sector")
        parts = [s for s, d in zip(self.stabilizers, self.destabilizers) if _sym(h, d)]
        ordered = []
        for j, (x, z) in enumerate(zip(self.logical_x, self.logical_z)):
            if _sym(h, z):
                parts.append(x)
                ordered.append(PauliString(1 << j, 0))
            if _sym(h, x):
                parts.append(z)
                ordered.append(PauliString(0, 1 << j))
        physical = product(parts)
        if (physical.x, physical.z) != (h.x, h.z):
            raise SectorError(f"decomposition of {h} failed")
        # Stabilizer factors are +1 in the sector; logical factors map letter for letter.
        return h.phase / physical.phase, product(ordered)


def _orth(v: PauliString, a: PauliString, b: PauliString) -> PauliString:
    # v <- v + <v,b> a + <v,a> b, projecting off the hyperbolic pair (a, b)
    ab, aa = _sym(v, b), _sym(v, a)
    if ab:
        v = _hermitian_product(v, a)
    if aa:
        v = _hermitian_product(v, b)
    return v


def _independent(signed: list[PauliString], n: int) -> list[PauliString]:
    """Drop dependent constraints after checking their signs agree."""
    keys = [(p.x << n) | p.z for p in signed]
    keep = _gf2.independent_subset(keys)
    kept_keys = [keys[i] for i in keep]
    for i, p in enumerate(signed):
        if i in keep:
            continue
        combo = _solve_combination(kept_keys, keys[i])
        acc = product(signed[keep[j]] for j in combo)
        if acc != p:
            raise SectorError(f"constraint {p} contradicts the others (empty sector)")
    return [signed[i] for i in keep]


def _solve_combination(keys: list[int], target: int) -> list[int] | None:
    basis: dict[int, tuple[int, int]] = {}
    for i, r in enumerate(keys):
        combo = 1 << i
        for piv in sorted(basis, reverse=True):
            if r >> piv & 1:
                r ^= basis[piv][0]
                combo ^= basis[piv][1]
        if r:
            basis[r.bit_length() - 1] = (r, combo)
    combo = 0
    for piv in sorted(basis, reverse=True):
        if target >> piv & 1:
            target ^= basis[piv][0]
            combo ^= basis[piv][1]
    if target:
        return None
    return [i for i in range(len(keys)) if combo >> i & 1]


class SectorHamiltonian:
    """Spin Hamiltonian restricted to one sector, acting on logical qubits."""

    def __init__(self, lat: Lattice, params, constraints):
        self.lattice = lat
        self.code = SectorCode.build(lat.site_count, constraints)
        k = self.code.k
        if k > MAX_LOGICAL:
            raise SectorError(f"sector has {k} logical qubits (limit {MAX_LOGICAL})")
        self.k = k
        terms: list[tuple[complex, PauliString]] = []
        for link in lat.links:
            j = params.coupling(link.kind)
            if j == 0:
                continue
            coeff, logical = self.code.restrict(lat.link_operator(link))
            terms.append((-j * coeff, logical))
        self.terms = terms
        self.scale = sum(abs(c) for c, _ in terms)
        idx = np.arange(1 << k, dtype=np.int64)
        self._idx = idx
        diag = np.zeros(1 << k, dtype=np.complex128)
        self._flips: dict[int, np.ndarray] = {}
        for c, p in terms:
            # p|b> = i^{k+ny} (-1)^{|b & z|} |b ^ x>
            phase = c * 1j ** ((p.k + p.num_y()) % 4)
            sgn = 1.0 - 2.0 * (np.bitwise_count(idx & p.z) & 1)
            if p.x == 0:
                diag += phase * sgn
            else:
                acc = self._flips.setdefault(p.x, np.zeros(1 << k, dtype=np.complex128))
                acc += phase * sgn
        self._diag = diag

    @property
    def dimension(self) -> int:
        return 1 << self.k

    def apply(self, v: np.ndarray) -> np.ndarray:
        out = self._diag * v
        for mask, coeff in self._flips.items():
            out += (coeff * v)[self._idx ^ mask]
        return out

    def lowest(self, tol=1e-9, seed=0) -> float:
        dim = self.dimension
        if dim <= 256:
            m = np.column_stack([self.apply(col) for col in np.eye(dim, dtype=np.complex128)])
            return float(np.linalg.eigvalsh(m)[0])
        op = LinearOperator((dim, dim), matvec=lambda x: self.apply(x.ravel()), dtype=np.complex128)
        rng = np.random.default_rng(seed)
        v0 = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        vals, vecs = eigsh(op, k=1, which="SA", v0=v0, tol=0, maxiter=10000)
        vec = vecs[:, 0]
        res = np.linalg.norm(self.apply(vec) - vals[0] * vec)
        if res > tol * self.scale:
            raise SectorError(f"eigensolver residual {res:.2e} too large")
        return float(vals[0])


def sector_ground_energy(lat: Lattice, params, constraints, **kw) -> float:
    return SectorHamiltonian(lat, params, constraints).lowest(**kw)
