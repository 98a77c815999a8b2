"""Experimental parameter calculator and Gaussian-pulse two-level integrator.

SI units throughout; every angular frequency is in rad/s.  The recoil
energy uses ``E_R = hbar^2 k^2 / 2m`` with ``k = 2 pi / lambda``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy import constants
from scipy.integrate import solve_ivp

__all__ = [
    "RB87_MASS",
    "AtomLattice",
    "GaussianPulse",
    "ErrorBudget",
    "PulseError",
    "recoil_energy",
    "recoil_frequency_hz",
    "scattering_rate",
    "rabi_integrate",
    "pulse_unitary",
    "flip_probability",
    "rotation_infidelity",
    "standard_pulse",
    "compose",
    "budget",
    "INFO_NOTES",
]

HBAR = constants.hbar
H = constants.h
RB87_MASS = 86.909180527 * constants.atomic_mass

INFO_NOTES = {
    "spin_interaction_timescale": "hbar/J_z ~ 10 ms",
    "temperature_requirement": "T << J_z/k_B ~ 1 nK",
}


class PulseError(RuntimeError):
    pass


def recoil_energy(mass: float, wavelength: float) -> float:
    """``hbar^2 (2 pi / wavelength)^2 / (2 mass)`` in joules."""
    if mass <= 0 or wavelength <= 0:
        raise ValueError("mass and wavelength must be positive")
    k = 2 * math.pi / wavelength
    return HBAR**2 * k**2 / (2 * mass)


def recoil_frequency_hz(mass: float, wavelength: float) -> float:
    return recoil_energy(mass, wavelength) / H


def scattering_rate(gamma: float, potential_depth: float, detuning: float) -> float:
    """Off-resonant photon scattering rate ``2 gamma |V| / (hbar |detuning|)`` in 1/s."""
    if detuning == 0:
        raise ValueError("detuning must be non-zero")
    return 2 * gamma * abs(potential_depth) / (HBAR * abs(detuning))


@dataclass(frozen=True)
class AtomLattice:
    atom_mass: float = RB87_MASS
    lambda0: float = 850e-9
    lambda_s: float = 787.6e-9
    v0: float = 14.0
    detuning_delta0: float = 2 * math.pi * 3600e9
    gamma: float = 2 * math.pi * 6e6
    v_up: float = 4.0                 # |spin-dependent barrier| for up, recoil units
    nontarget_detuning: float = 52.0  # hbar delta for non-target atoms, recoil units
    op_time: float = 200e-6           # one single-spin operation, s
    per_op_scatter: float = 1.5e-4    # focused-laser scatter per operation

    def __post_init__(self):
        for name in ("atom_mass", "lambda0", "lambda_s", "v0", "detuning_delta0", "gamma",
                     "nontarget_detuning", "op_time"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not 0 <= self.per_op_scatter <= 1:
            raise ValueError("per_op_scatter must be a probability")

    @property
    def recoil(self) -> float:
        return recoil_energy(self.atom_mass, self.lambda0)

    @property
    def delta(self) -> float:
        """Microwave detuning seen by non-target atoms, rad/s."""
        return self.nontarget_detuning * self.recoil / HBAR

    def lattice_scatter_rate(self) -> float:
        return scattering_rate(self.gamma, self.v_up * self.recoil, self.detuning_delta0)


@dataclass(frozen=True)
class GaussianPulse:
    """``Omega(t) = omega0_rabi exp(-omega0_width^2 t^2)`` on ``-tf <= t <= tf``.

    ``phase = pi/2`` drives about sigma^x, ``phase = 0`` about sigma^y.
    """

    omega0_rabi: float
    omega0_width: float
    tf: float
    phase: float = math.pi / 2
    detuning: float = 0.0

    def __post_init__(self):
        if self.tf <= 0 or self.omega0_width <= 0:
            raise ValueError("tf and omega0_width must be positive")

    @property
    def area(self) -> float:
        """Area of the untruncated envelope, ``omega0_rabi sqrt(pi) / omega0_width``."""
        return self.omega0_rabi * math.sqrt(math.pi) / self.omega0_width

    @property
    def duration(self) -> float:
        return 2 * self.tf

    def envelope(self, t):
        return self.omega0_rabi * np.exp(-(self.omega0_width * t) ** 2)

    def with_detuning(self, detuning: float) -> "GaussianPulse":
        return replace(self, detuning=detuning)


def standard_pulse(lat: AtomLattice | None = None, area: float = math.pi, width_ratio=4.0,
                   wtf=7.0, phase=math.pi / 2) -> GaussianPulse:
    """Pulse with ``omega0 = delta / width_ratio`` and ``omega0 tf = wtf``."""
    lat = lat or AtomLattice()
    w = lat.delta / width_ratio
    return GaussianPulse(area * w / math.sqrt(math.pi), w, wtf / w, phase, 0.0)


def _rhs(p: GaussianPulse):
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    drive = math.sin(p.phase) * sx + math.cos(p.phase) * sy

    def f(t, y):
        u = y.view(complex).reshape(2, 2)
        h = 0.5 * (p.detuning * sz + p.envelope(t) * drive)
        return (-1j * h @ u).reshape(-1).view(float)

    return f


def pulse_unitary(p: GaussianPulse, rtol: float = 1e-10, atol: float = 1e-12) -> np.ndarray:
    """Two-level propagator over ``[-tf, tf]`` (basis up, down; rotating frame)."""
    y0 = np.eye(2, dtype=complex).reshape(-1).view(float)
    # Scale time by 1/omega0 so the step controller sees O(1) dynamics.
    sol = solve_ivp(_rhs(p), (-p.tf, p.tf), y0, method="DOP853", rtol=rtol, atol=atol,
                    first_step=None, max_step=p.tf / 50)
    if not sol.success:
        raise PulseError(f"integration failed: {sol.message}")
    u = sol.y[:, -1].view(complex).reshape(2, 2)
    err = float(np.max(np.abs(u.conj().T @ u - np.eye(2))))
    if err > 1e-9:
        raise PulseError(f"propagator unitary only to {err:.2e}; tighten rtol (now {rtol})")
    return u


def rabi_integrate(p: GaussianPulse, initial=(1.0, 0.0), **kw) -> np.ndarray:
    """Final two-level amplitudes from ``initial`` (up, down)."""
    psi = np.asarray(initial, dtype=complex)
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise ValueError("initial state must be non-zero")
    return pulse_unitary(p, **kw) @ (psi / norm)


def flip_probability(p: GaussianPulse, **kw) -> float:
    return float(abs(rabi_integrate(p, (1.0, 0.0), **kw)[1]) ** 2)


def rotation_infidelity(p: GaussianPulse, detuning: float, **kw) -> float:
    """``1 - |Tr(U_0^dag U_detuned)|^2 / 4`` between the pulse on and off resonance."""
    u0 = pulse_unitary(p.with_detuning(0.0), **kw)
    u1 = pulse_unitary(p.with_detuning(detuning), **kw)
    return float(1 - abs(np.trace(u0.conj().T @ u1)) ** 2 / 4)


def compose(p: float, n: int) -> float:
    """Probability of at least one event in ``n`` independent trials of probability ``p``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return 1 - (1 - p) ** n


@dataclass(frozen=True)
class ErrorBudget:
    per_op_scatter: float
    n_ops: int
    focused_total: float
    lattice_scatter: float
    off_resonant_flip: float
    displacement_fidelity_loss: float
    lattice_scatter_rate: float
    recoil_hz: float
    pulse_period: float
    exposure_time: float
    notes: dict = field(default_factory=lambda: dict(INFO_NOTES))

    def __post_init__(self):
        for name in ("per_op_scatter", "focused_total", "lattice_scatter",
                     "off_resonant_flip", "displacement_fidelity_loss"):
            v = getattr(self, name)
            if not -1e-15 <= v <= 1:
                raise ValueError(f"{name}={v} is not a probability")

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def table(self) -> str:
        rows = [
            ("recoil energy E_R/h", f"{self.recoil_hz:.1f} Hz"),
            ("pulse period 2 t_f", f"{self.pulse_period * 1e6:.1f} us"),
            ("lattice scattering rate", f"{self.lattice_scatter_rate:.3f} 1/s"),
            ("per-op focused scatter", f"{self.per_op_scatter:.2e}"),
            ("operations", str(self.n_ops)),
            ("focused-laser total", f"{self.focused_total:.2e}"),
            ("exposure time", f"{self.exposure_time * 1e3:.2f} ms"),
            ("lattice scatter", f"{self.lattice_scatter:.2e}"),
            ("off-resonant flip", f"{self.off_resonant_flip:.2e}"),
            ("displacement fidelity loss", f"{self.displacement_fidelity_loss:.2e}"),
        ]
        rows += [(k.replace("_", " "), v) for k, v in self.notes.items()]
        width = max(len(k) for k, _ in rows)
        return "\n".join(f"{k:<{width}}  {v}" for k, v in rows)


def budget(
    inputs: AtomLattice | None = None,
    pulse: GaussianPulse | None = None,
    n_ops: int = 60,
    displacement_detuning: float = 2 * math.pi * 350,
    hold_time: float = 0.0,
) -> ErrorBudget:
    """End-to-end error budget for a protocol of ``n_ops`` single-spin operations.

    Focused-laser scatter composes as ``1 - (1 - p)^n``.  The lattice
    scatter integrates the spin-dependent-lattice rate over
    ``n_ops * op_time + hold_time``.  The off-resonant flip is a spin-up
    non-target atom detuned by ``delta``; the displacement loss compares a
    pi/2 rotation at ``displacement_detuning`` with the resonant one.
    Protocol-induced terms vanish for ``n_ops = 0``.
    """
    lat = inputs or AtomLattice()
    pulse = pulse or standard_pulse(lat)
    if n_ops < 0:
        raise ValueError("n_ops must be non-negative")
    rate = lat.lattice_scatter_rate()
    exposure = n_ops * lat.op_time + hold_time
    if n_ops:
        flip = flip_probability(pulse.with_detuning(lat.delta))
        half = replace(pulse, omega0_rabi=pulse.omega0_rabi / 2)
        loss = rotation_infidelity(half, displacement_detuning)
    else:
        flip = loss = 0.0
    return ErrorBudget(
        per_op_scatter=lat.per_op_scatter,
        n_ops=n_ops,
        focused_total=compose(lat.per_op_scatter, n_ops),
        lattice_scatter=1 - math.exp(-rate * exposure),
        off_resonant_flip=flip,
        displacement_fidelity_loss=max(loss, 0.0),
        lattice_scatter_rate=rate,
        recoil_hz=lat.recoil / H,
        pulse_period=pulse.duration,
        exposure_time=exposure,
    )
