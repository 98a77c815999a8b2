"""Stabilizer-tableau engine for the toric-code limit.

The state is the joint +1 eigenstate of ``n`` independent, mutually commuting
signed Pauli strings.  Generators are kept as :class:`PauliString` rows; the
row-reduced canonical form used for equality and expectation values is
rebuilt lazily after each update.
"""

from __future__ import annotations

import copy
import json
from collections.abc import Iterable, Mapping
from dataclasses import dataclass

import numpy as np

from . import _gf2
from .lattice import Lattice, plaquette_operators
from .pauli import Angle, PauliString, Pulse, commutes, multiply

__all__ = [
    "StabilizerState",
    "StabilizerError",
    "Syndrome",
    "prepare_ground",
    "apply_pulse",
    "apply_protocol",
    "expect",
    "measure",
    "syndrome",
    "correction_strings",
    "predict_syndrome",
]


class StabilizerError(RuntimeError):
    pass


def _key(p: PauliString, n: int) -> int:
    return (p.x << n) | p.z


class StabilizerState:
    """Pure stabilizer state on ``n`` sites.

    ``seed`` feeds the generator used for random measurement outcomes.
    Instances are single-writer; use :meth:`copy` to branch.
    """

    def __init__(self, generators: Iterable[PauliString], n: int, seed=None, check=True):
        self.n = n
        self.generators = list(generators)
        self.rng = np.random.default_rng(seed)
        self._canon = None
        if check:
            self.validate()

    @classmethod
    def all_up(cls, n: int, seed=None) -> "StabilizerState":
        """Every spin up: stabilized by ``+Z_j`` on each site."""
        return cls((PauliString.single(j, "Z") for j in range(n)), n, seed, check=False)

    def copy(self) -> "StabilizerState":
        return copy.deepcopy(self)

    def validate(self) -> None:
        g = self.generators
        if len(g) != self.n:
            raise StabilizerError(f"need {self.n} generators, have {len(g)}")
        for p in g:
            if not p.is_hermitian:
                raise StabilizerError(f"generator {p} is not Hermitian")
            if p.support >> self.n:
                raise StabilizerError(f"generator {p} acts outside {self.n} sites")
        for i, a in enumerate(g):
            for b in g[i + 1:]:
                if not commutes(a, b):
                    raise StabilizerError(f"generators {a} and {b} anticommute")
        if _gf2.rank([_key(p, self.n) for p in g]) != self.n:
            raise StabilizerError("generators are not independent")

    # -- canonical form ---------------------------------------------------
    def canonical(self) -> tuple[PauliString, ...]:
        """Fully row-reduced generators, sorted by pivot; equal states give equal tuples."""
        if self._canon is None:
            n = self.n
            reduced: list[tuple[int, PauliString]] = []
            for g in self.generators:
                for piv, row in reduced:
                    if _key(g, n) >> piv & 1:
                        g = multiply(g, row)
                k = _key(g, n)
                if k == 0:
                    raise StabilizerError("dependent generators in tableau")
                piv = k.bit_length() - 1
                reduced = [
                    (p, multiply(row, g)) if _key(row, n) >> piv & 1 else (p, row)
                    for p, row in reduced
                ]
                reduced.append((piv, g))
            reduced.sort(key=lambda t: -t[0])
            self._canon = tuple(row for _, row in reduced)
            self._pivots = tuple(piv for piv, _ in reduced)
        return self._canon

    def __eq__(self, other):
        if not isinstance(other, StabilizerState):
            return NotImplemented
        return self.n == other.n and self.canonical() == other.canonical()

    __hash__ = None

    def _decompose(self, p: PauliString) -> PauliString | None:
        """Product of canonical rows with the same letters as ``p``, or None."""
        canon = self.canonical()
        n = self.n
        acc = PauliString()
        k = _key(p, n)
        for piv, row in zip(self._pivots, canon):
            if k >> piv & 1:
                acc = multiply(acc, row)
                k ^= _key(row, n)
        return acc if k == 0 else None

    # -- operations ---------------------------------------------------------
    def expect(self, p: PauliString) -> int:
        return expect(self, p)

    def measure(self, p: PauliString) -> int:
        return measure(self, p)

    def apply(self, pulse: Pulse) -> "StabilizerState":
        return apply_pulse(self, pulse)

    def stabilizer_strings(self) -> list[str]:
        return [str(g) for g in self.canonical()]

    def __repr__(self) -> str:
        return f"StabilizerState(n={self.n})"


def expect(state: StabilizerState, p: PauliString) -> int:
    """``+1`` or ``-1`` if ``+p`` or ``-p`` stabilizes the state, else ``0``."""
    if not p.is_hermitian:
        raise ValueError(f"expectation needs a Hermitian string, got {p}")
    if any(not commutes(p, g) for g in state.generators):
        return 0
    acc = state._decompose(p)
    if acc is None:
        # Unreachable for a full-rank tableau; kept as a guard.
        raise StabilizerError(f"{p} commutes with the stabilizer but is not in it")
    # acc has p's letters; p = (p.phase / acc.phase) * acc.
    ratio = p.phase / acc.phase
    return int(round(ratio.real))


def measure(state: StabilizerState, p: PauliString) -> int:
    """Projectively measure ``p``; returns the outcome and updates ``state`` in place."""
    if not p.is_hermitian:
        raise ValueError(f"can only measure Hermitian strings, got {p}")
    gens = state.generators
    anti = [i for i, g in enumerate(gens) if not commutes(p, g)]
    if not anti:
        return expect(state, p)
    first = anti[0]
    pivot = gens[first]
    for i in anti[1:]:
        gens[i] = multiply(gens[i], pivot)
    outcome = 1 if state.rng.random() < 0.5 else -1
    gens[first] = p if outcome == 1 else -p
    state._canon = None
    return outcome


def apply_pulse(state: StabilizerState, pulse: Pulse) -> StabilizerState:
    """Conjugate the tableau by the pulse unitary (in place; returns ``state``)."""
    op = pulse.op
    if op.support >> state.n:
        raise ValueError(f"pulse {op} acts outside {state.n} sites")
    gens = state.generators
    for i, g in enumerate(gens):
        if commutes(op, g):
            continue
        if pulse.angle is Angle.PI:
            gens[i] = -g
        elif pulse.angle is Angle.PI_OVER_2:
            gens[i] = multiply(op, g) * -1j
        else:
            gens[i] = multiply(op, g) * 1j
    state._canon = None
    return state


def apply_protocol(state: StabilizerState, protocol: Iterable[Pulse], check=False) -> StabilizerState:
    for pulse in protocol:
        apply_pulse(state, pulse)
        if check:
            state.validate()
    return state


# -- lattice-aware pieces ------------------------------------------------------

@dataclass(frozen=True)
class Syndrome:
    """Sign of every plaquette operator, keyed by plaquette id."""

    values: Mapping[int, int]

    def flipped(self) -> frozenset[int]:
        return frozenset(k for k, v in self.values.items() if v == -1)

    def __getitem__(self, pid: int) -> int:
        return self.values[pid]

    def __eq__(self, other):
        if isinstance(other, Syndrome):
            return dict(self.values) == dict(other.values)
        return NotImplemented

    def __hash__(self):
        return hash(tuple(sorted(self.values.items())))

    @classmethod
    def from_flipped(cls, lat: Lattice, flipped: Iterable[int]) -> "Syndrome":
        f = set(flipped)
        return cls({p.id: (-1 if p.id in f else 1) for p in lat.plaquettes})

    def to_dict(self, lat: Lattice | None = None) -> dict:
        out = {"values": {str(k): v for k, v in sorted(self.values.items())},
               "flipped": sorted(self.flipped())}
        if lat is not None:
            out["plaquettes"] = [
                {"id": p.id, "row": p.row, "col": p.col, "flavor": p.flavor.value,
                 "value": self.values[p.id]}
                for p in lat.plaquettes
            ]
        return out

    def to_json(self, lat: Lattice | None = None, **kw) -> str:
        return json.dumps(self.to_dict(lat), **kw)


def correction_strings(lat: Lattice) -> dict[int, PauliString]:
    """Z-type string for each plaquette that can be fixed independently.

    ``C_p`` anticommutes with ``W_p`` and commutes with every other plaquette
    in the selected independent set and with every Z-type stabilizer of the
    all-up state.  Plaquettes whose ``X`` part is spanned by earlier ones are
    left out; their sign is fixed by the others.
    """
    ws = plaquette_operators(lat)
    keep = _gf2.independent_subset([w.x for w in ws])
    solver = _gf2.RightInverse([ws[i].x for i in keep])
    return {
        lat.plaquettes[i].id: PauliString(0, solver.solve(1 << j))
        for j, i in enumerate(keep)
    }


def prepare_ground(lat: Lattice, seed=None) -> StabilizerState:
    """Toric-code ground state by measure-and-correct from all spins up.

    Every z-link alignment and every plaquette ends at +1.  The remaining
    generators are the Z-type operators inherited from the all-up start
    (non-contractible z-loops on a torus, dangling-site z operators on an
    open patch), all fixed to +1 as well, so the result does not depend on
    ``seed``.
    """
    state = StabilizerState.all_up(lat.site_count, seed)
    fixes = correction_strings(lat)
    for p, w in zip(lat.plaquettes, plaquette_operators(lat)):
        if measure(state, w) == 1:
            continue
        if p.id not in fixes:
            raise StabilizerError(f"plaquette {p.id} is fixed to -1 by the others")
        apply_pulse(state, Pulse(fixes[p.id]))
    for p, w in zip(lat.plaquettes, plaquette_operators(lat)):
        if expect(state, w) != 1:
            raise StabilizerError(f"ground-state preparation left W_{p.id} != +1")
    state.validate()
    return state


def syndrome(state: StabilizerState, lat: Lattice) -> Syndrome:
    """Plaquette signs; a zero expectation means the state left the vortex basis."""
    values = {}
    for p, w in zip(lat.plaquettes, plaquette_operators(lat)):
        v = expect(state, w)
        if v == 0:
            raise StabilizerError(f"plaquette {p.id} has no definite sign: protocol corrupted")
        values[p.id] = v
    return Syndrome(values)


def predict_syndrome(lat: Lattice, protocol: Iterable[Pulse], start: Syndrome | None = None) -> Syndrome:
    """Syndrome after pi pulses, from commutation with each plaquette alone."""
    ws = plaquette_operators(lat)
    flips = set() if start is None else set(start.flipped())
    for pulse in protocol:
        for p, w in zip(lat.plaquettes, ws):
            if not commutes(pulse.op, w):
                flips ^= {p.id}
    return Syndrome.from_flipped(lat, flips)
