"""Randomized cross-check of the stabilizer engine against the dense engine.

Both engines start from independently built toric-code ground states (the
tableau from measure-and-correct, the vector from plaquette projectors),
run the same random Clifford protocol, and must agree exactly on the
tri-state expectation (+1, -1 or 0) of every probe string.  Besides the
fixed probes, every evolved tableau generator is checked too: after a few
random pulses most fixed probes have expectation 0, while the generators
are always +-1 and so expose sign errors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lattice import Lattice, plaquette_operators
from .pauli import Angle, PauliString, Protocol, Pulse
from . import stabilizer as stab
from . import statevector as sv

__all__ = ["random_pauli", "random_protocol", "probe_strings", "Mismatch", "OracleReport",
           "compare", "run_oracle", "minimize"]

_ANGLES = (Angle.PI, Angle.PI_OVER_2, Angle.MINUS_PI_OVER_2)


def random_pauli(n: int, rng, max_weight: int | None = None) -> PauliString:
    """Random non-identity string with phase +1."""
    while True:
        w = int(rng.integers(1, (max_weight or n) + 1))
        sites = rng.choice(n, size=w, replace=False)
        letters = {int(s): "XYZ"[int(rng.integers(3))] for s in sites}
        p = PauliString.from_letters(letters)
        if not p.is_identity:
            return p


def random_protocol(n: int, length: int, rng, max_weight: int = 4) -> Protocol:
    return Protocol(
        Pulse(random_pauli(n, rng, max_weight), _ANGLES[int(rng.integers(3))], f"r{i}")
        for i in range(length)
    )


def probe_strings(lat: Lattice, rng, extra: int = 20) -> list[tuple[str, PauliString]]:
    probes = [(f"W{p.id}", w) for p, w in zip(lat.plaquettes, plaquette_operators(lat))]
    probes += [(f"ZZ{l.id}", lat.alignment_operator(l)) for l in lat.z_links]
    for i in range(extra):
        p = random_pauli(lat.site_count, rng)
        probes.append((f"P{i}", p * (-1 if rng.random() < 0.5 else 1)))
    return probes


@dataclass
class Mismatch:
    probe: str
    op: str
    stabilizer: int
    dense: complex
    protocol: list[dict]


@dataclass
class OracleReport:
    lattice: str
    protocols: int
    checks: int = 0
    mismatches: list[Mismatch] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.mismatches

    def to_dict(self) -> dict:
        return {
            "lattice": self.lattice,
            "protocols": self.protocols,
            "checks": self.checks,
            "passed": self.passed,
            "mismatches": [
                {"probe": m.probe, "op": m.op, "stabilizer": m.stabilizer,
                 "dense": [m.dense.real, m.dense.imag], "protocol": m.protocol}
                for m in self.mismatches
            ],
        }


def _tri(value: complex, tol=1e-9) -> int | None:
    for t in (1, -1, 0):
        if abs(value - t) < tol:
            return t
    return None


def compare(lat: Lattice, protocol: Protocol, probes, ground=None, dense_ground=None):
    """First disagreeing probe after running ``protocol`` on both engines, or None."""
    s = (ground or stab.prepare_ground(lat)).copy()
    v = dense_ground if dense_ground is not None else sv.toric_ground_state(lat)
    stab.apply_protocol(s, protocol)
    v = sv.apply_protocol(v, protocol)
    evolved = [(f"G{i}", g) for i, g in enumerate(s.generators)]
    for name, op in list(probes) + evolved:
        a = stab.expect(s, op)
        b = sv.expect_dense(v, op)
        if _tri(b) != a:
            return name, op, a, b
    return None


def minimize(lat: Lattice, protocol: Protocol, probes, ground=None, dense_ground=None) -> Protocol:
    """Shortest failing prefix of ``protocol``."""
    for k in range(1, len(protocol) + 1):
        pre = Protocol(protocol.steps[:k])
        if compare(lat, pre, probes, ground, dense_ground) is not None:
            return pre
    return protocol


def run_oracle(lat: Lattice, count: int = 200, seed: int = 0, length: int = 12, extra: int = 20) -> OracleReport:
    """Run ``count`` random protocols; stops collecting after the first mismatch."""
    rng = np.random.default_rng(seed)
    ground = stab.prepare_ground(lat)
    dense_ground = sv.toric_ground_state(lat)
    report = OracleReport(repr(lat), count)
    for _ in range(count):
        protocol = random_protocol(lat.site_count, length, rng)
        probes = probe_strings(lat, rng, extra)
        report.checks += len(probes) + lat.site_count
        bad = compare(lat, protocol, probes, ground, dense_ground)
        if bad is not None:
            small = minimize(lat, protocol, probes, ground, dense_ground)
            name, op, a, b = compare(lat, small, probes, ground, dense_ground)
            report.mismatches.append(Mismatch(name, str(op), a, complex(b), small.to_list()))
            break
    return report
