import json
import math

import numpy as np
import pytest
from scipy.linalg import expm

from anyonsim import pulsecraft as pc

# CODATA 2018 values typed in; the 2022 atomic mass unit differs by ~1e-9.
PLANCK = 6.62607015e-34
AMU = 1.66053906660e-27


def test_recoil_against_hand_values():
    m = 86.909180527 * AMU
    want = PLANCK / (2 * m * (850e-9) ** 2)
    assert pc.recoil_frequency_hz(pc.RB87_MASS, 850e-9) == pytest.approx(want, rel=1e-8)
    assert want == pytest.approx(3177.4, abs=0.5)


def test_recoil_scaling():
    a = pc.recoil_energy(pc.RB87_MASS, 850e-9)
    assert pc.recoil_energy(pc.RB87_MASS, 425e-9) == pytest.approx(4 * a)
    assert pc.recoil_energy(2 * pc.RB87_MASS, 850e-9) == pytest.approx(a / 2)
    with pytest.raises(ValueError):
        pc.recoil_energy(0, 850e-9)


def test_scattering_rate():
    lat = pc.AtomLattice()
    rate = pc.scattering_rate(lat.gamma, lat.v_up * lat.recoil, lat.detuning_delta0)
    hand = 2 * (2 * math.pi * 6e6) * 4 * PLANCK * 3177.4 / ((PLANCK / (2 * math.pi)) * 2 * math.pi * 3600e9)
    assert rate == pytest.approx(hand, rel=1e-3)
    with pytest.raises(ValueError):
        pc.scattering_rate(1.0, 1.0, 0.0)


def test_resonant_pulse_is_exact_rotation():
    # On resonance H(t) commutes with itself, so U = exp(-i A/2 sigma_x) with A the truncated area.
    p = pc.standard_pulse()
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    area = p.area * math.erf(p.omega0_width * p.tf)
    want = expm(-0.5j * area * sx)
    assert np.allclose(pc.pulse_unitary(p), want, atol=1e-9)


def test_phase_selects_axis():
    py = pc.standard_pulse(phase=0.0)
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
    area = py.area * math.erf(py.omega0_width * py.tf)
    assert np.allclose(pc.pulse_unitary(py), expm(-0.5j * area * sy), atol=1e-9)


def test_area_theorem():
    # Integrator rtol is 1e-10; truncation at omega0 tf = 7 is far below that.
    assert pc.flip_probability(pc.standard_pulse(area=math.pi)) == pytest.approx(1, abs=1e-10)
    assert pc.flip_probability(pc.standard_pulse(area=math.pi / 2)) == pytest.approx(0.5, abs=1e-10)
    assert pc.flip_probability(pc.standard_pulse(area=2 * math.pi)) == pytest.approx(0, abs=1e-10)


def test_off_resonant_flip_small_and_monotone():
    lat = pc.AtomLattice()
    p = pc.standard_pulse(lat)
    flips = [pc.flip_probability(p.with_detuning(k * lat.delta)) for k in (0.25, 0.5, 1.0)]
    assert flips[0] > flips[1] > flips[2]
    assert flips[2] < 1e-2


def test_rabi_preserves_norm():
    p = pc.standard_pulse().with_detuning(1e5)
    out = pc.rabi_integrate(p, (0.6, 0.8j))
    assert np.linalg.norm(out) == pytest.approx(1, abs=1e-10)
    with pytest.raises(ValueError):
        pc.rabi_integrate(p, (0, 0))


def test_infidelity_grows_with_detuning():
    p = pc.standard_pulse(area=math.pi / 2)
    small = pc.rotation_infidelity(p, 2 * math.pi * 100)
    big = pc.rotation_infidelity(p, 2 * math.pi * 350)
    assert 0 < small < big
    # Quadratic in detuning for small shifts.
    assert big / small == pytest.approx(3.5**2, rel=0.05)
    assert pc.rotation_infidelity(p, 0.0) == pytest.approx(0, abs=1e-12)


def test_compose():
    assert pc.compose(0.0, 60) == 0
    assert pc.compose(1.5e-4, 60) == pytest.approx(60 * 1.5e-4, rel=1e-2)
    assert pc.compose(0.5, 2) == 0.75
    with pytest.raises(ValueError):
        pc.compose(0.1, -1)


def test_budget_zero_ops_has_no_protocol_terms():
    b = pc.budget(n_ops=0)
    assert b.focused_total == 0 and b.lattice_scatter == 0
    assert b.off_resonant_flip == 0 and b.displacement_fidelity_loss == 0


def test_budget_monotone_in_ops():
    a, b = pc.budget(n_ops=30), pc.budget(n_ops=60)
    assert a.focused_total < b.focused_total
    assert a.lattice_scatter < b.lattice_scatter
    assert pc.budget(n_ops=60, hold_time=0.05).lattice_scatter > b.lattice_scatter


def test_budget_serialization():
    b = pc.budget()
    d = json.loads(b.to_json())
    assert d["n_ops"] == 60 and "spin_interaction_timescale" in d["notes"]
    assert "displacement fidelity loss" in b.table()


def test_input_validation():
    with pytest.raises(ValueError):
        pc.AtomLattice(lambda0=-1)
    with pytest.raises(ValueError):
        pc.AtomLattice(per_op_scatter=2)
    with pytest.raises(ValueError):
        pc.GaussianPulse(1.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        pc.budget(n_ops=-1)
