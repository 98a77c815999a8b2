"""Two-site correlator readout by rotation, shelving and fluorescence counting.

Logical spin up (bit 0, ``Z = +1``) is the bright hyperfine level ``Up``;
spin down is ``Down``.  After the basis pulses every atom is shelved so that
only the two target atoms can end up bright, and each shot yields a
fluorescence level equal to the number of bright targets.
"""

from __future__ import annotations

import csv
import enum
import json
import math
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

import numpy as np

from .pauli import Angle, PauliString, Protocol, Pulse
from .statevector import DenseState, apply_protocol, expect_dense, marginal_probabilities

__all__ = [
    "HyperfineLabel",
    "Basis",
    "CorrelatorEstimate",
    "Witness",
    "ReadoutError",
    "correlator_exact",
    "basis_pulses",
    "shelve",
    "fluorescence_levels",
    "run_fig5",
    "nonvanishing_witness",
    "write_csv",
]


class ReadoutError(ValueError):
    pass


class HyperfineLabel(enum.Enum):
    DOWN = "F=1,mF=-1"
    UP = "F=2,mF=-2"
    PARKED = "F=1,mF=+1"
    DETECT = "5P3/2,F=3,mF=-3"

    @property
    def bright(self) -> bool:
        # Only Up is driven to the excited level by the detection laser.
        return self is HyperfineLabel.UP


class Basis(enum.Enum):
    XX = "XX"
    YX = "YX"

    @property
    def letters(self) -> tuple[str, str]:
        return (self.value[0], self.value[1])


def _check_pair(d_site: int, f_site: int, n: int | None = None) -> None:
    if d_site == f_site or d_site ^ 1 != f_site or d_site < 0:
        raise ReadoutError(f"sites {d_site} and {f_site} are not the two ends of one z-link")
    if n is not None and max(d_site, f_site) >= n:
        raise ReadoutError(f"sites {d_site}, {f_site} outside a {n}-site state")


def correlator_exact(state: DenseState, alpha: str, beta: str, d_site: int, f_site: int) -> float:
    """``<sigma^alpha_D sigma^beta_F>`` computed on the amplitudes."""
    _check_pair(d_site, f_site, state.n)
    op = PauliString.from_letters({d_site: alpha.upper(), f_site: beta.upper()})
    value = expect_dense(state, op)
    return float(value.real)


def basis_pulses(basis: Basis | str, d_site: int, f_site: int) -> Protocol:
    """Rotations after which ``Z_D Z_F`` reads the requested correlator.

    A pi/2 pulse about ``Y`` turns ``Z`` into ``-X``; a -pi/2 pulse about
    ``X`` turns ``Z`` into ``-Y``.  Both targets pick up the same sign, so
    the level-based estimator needs no correction.
    """
    basis = Basis(basis)
    f_pulse = Pulse(PauliString.single(f_site, "Y"), Angle.PI_OVER_2, "F y pi/2")
    if basis is Basis.XX:
        d_pulse = Pulse(PauliString.single(d_site, "Y"), Angle.PI_OVER_2, "D y pi/2")
    else:
        d_pulse = Pulse(PauliString.single(d_site, "X"), Angle.MINUS_PI_OVER_2, "D x -pi/2")
    return Protocol([d_pulse, f_pulse])


def shelve(bits: np.ndarray, targets: Sequence[int]) -> np.ndarray:
    """Hyperfine labels per shot and site after the shelving steps.

    ``bits`` has shape (shots, n) with 0 for spin up.  Steps: every Down
    to Parked, every Up to Down, then the targets' Down back to Up.
    """
    labels = np.where(bits == 0, HyperfineLabel.UP.value, HyperfineLabel.DOWN.value).astype(object)
    labels[labels == HyperfineLabel.DOWN.value] = HyperfineLabel.PARKED.value
    labels[labels == HyperfineLabel.UP.value] = HyperfineLabel.DOWN.value
    for t in targets:
        col = labels[:, t]
        col[col == HyperfineLabel.DOWN.value] = HyperfineLabel.UP.value
    return labels


def fluorescence_levels(labels: np.ndarray, targets: Sequence[int]) -> np.ndarray:
    bright = labels == HyperfineLabel.UP.value
    others = np.ones(labels.shape[1], dtype=bool)
    others[list(targets)] = False
    if bright[:, others].any():
        raise ReadoutError("a non-target atom reached a fluorescing level")
    return bright[:, list(targets)].sum(axis=1)


@dataclass(frozen=True)
class CorrelatorEstimate:
    basis: str
    shots: int | None
    level_histogram: tuple[float, float, float]
    value: float
    std_error: float

    @property
    def estimate(self) -> float:
        return self.value

    def significance(self) -> float:
        """``|value| / std_error``; infinite for the analytic path."""
        if self.std_error == 0:
            return math.inf if self.value != 0 else 0.0
        return abs(self.value) / self.std_error

    def to_dict(self) -> dict:
        return {
            "basis": self.basis,
            "shots": self.shots,
            "level_histogram": list(self.level_histogram),
            "estimate": self.value,
            "std_error": self.std_error,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _estimate(levels_count, shots, basis) -> CorrelatorEstimate:
    n0, n1, n2 = levels_count
    value = (n0 + n2 - n1) / shots
    if shots > 1:
        se = math.sqrt(max(0.0, 1 - value * value) / (shots - 1))
    else:
        se = 1.0
    return CorrelatorEstimate(basis.value, shots, (int(n0), int(n1), int(n2)), value, se)


def run_fig5(
    state: DenseState,
    basis: Basis | str,
    d_site: int,
    f_site: int,
    shots: int | None = 10_000,
    seed=None,
) -> CorrelatorEstimate:
    """Simulated readout of the ``basis`` correlator on the z-link ``(d_site, f_site)``.

    ``shots=None`` uses the exact level probabilities instead of sampling.
    """
    basis = Basis(basis)
    _check_pair(d_site, f_site, state.n)
    rotated = apply_protocol(state, basis_pulses(basis, d_site, f_site))
    targets = (d_site, f_site)
    if shots is None:
        p = marginal_probabilities(rotated, targets)
        # Outcome index bit i is the bit of targets[i]; bright means bit 0.
        levels = [0.0, 0.0, 0.0]
        for outcome, prob in enumerate(p):
            bright = 2 - bin(outcome).count("1")
            levels[bright] += prob
        value = levels[0] + levels[2] - levels[1]
        return CorrelatorEstimate(basis.value, None, tuple(levels), value, 0.0)
    if shots < 1:
        raise ReadoutError("shots must be >= 1")
    rng = np.random.default_rng(seed)
    probs = np.abs(rotated.amplitudes) ** 2
    probs /= probs.sum()
    idx = rng.choice(probs.size, size=shots, p=probs)
    bits = (idx[:, None] >> np.arange(state.n)[None, :]) & 1
    levels = fluorescence_levels(shelve(bits, targets), targets)
    counts = np.bincount(levels, minlength=3)
    return _estimate(counts, shots, basis)


@dataclass(frozen=True)
class Witness:
    txx: float
    tyx: float
    max_abs: float
    mu_up: float
    mu_down: float
    phi_overlap: float
    leakage: float

    @property
    def entangled(self) -> bool:
        """False for a single-branch (product) input where one of the mu vanishes."""
        return min(self.mu_up, self.mu_down) > 1e-12

    def to_dict(self) -> dict:
        return dict(asdict(self), entangled=self.entangled)


def nonvanishing_witness(state: DenseState, d_site: int, f_site: int, leak_tol: float = 1e-8) -> Witness:
    """Both correlators and the split ``mu_up |up up> phi_up + mu_down |dn dn> phi_down``."""
    _check_pair(d_site, f_site, state.n)
    a = state.amplitudes
    idx = np.arange(a.size)
    bd = (idx >> d_site) & 1
    bf = (idx >> f_site) & 1
    leak = float(np.sum(np.abs(a[bd != bf]) ** 2))
    if leak > leak_tol:
        raise ReadoutError(f"state leaks {leak:.3e} out of the aligned (D', F) subspace")
    up = a[(bd == 0) & (bf == 0)]
    dn = a[(bd == 1) & (bf == 1)]
    # Both slices are ordered by the remaining bits, so they index the same environment basis.
    mu_up, mu_dn = float(np.linalg.norm(up)), float(np.linalg.norm(dn))
    overlap = 0.0
    if mu_up > 1e-12 and mu_dn > 1e-12:
        overlap = abs(np.vdot(up / mu_up, dn / mu_dn))
    txx = correlator_exact(state, "x", "x", d_site, f_site)
    tyx = correlator_exact(state, "y", "x", d_site, f_site)
    return Witness(txx, tyx, max(abs(txx), abs(tyx)), mu_up, mu_dn, float(overlap), leak)


def write_csv(path, estimates: Iterable[CorrelatorEstimate], extra: Iterable[dict] | None = None) -> None:
    """One row per estimate; ``extra`` rows (same order) add sweep parameters."""
    estimates = list(estimates)
    extra = list(extra) if extra is not None else [{} for _ in estimates]
    keys = sorted({k for e in extra for k in e})
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(keys + ["basis", "shots", "level0", "level1", "level2", "estimate", "std_error"])
        for est, ex in zip(estimates, extra):
            w.writerow([ex.get(k, "") for k in keys]
                       + [est.basis, est.shots, *est.level_histogram, est.value, est.std_error])
