import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from anyonsim.pauli import (
    Angle,
    PauliString,
    Protocol,
    Pulse,
    anticommuting_sites,
    commutes,
    multiply,
    product,
    reduce_protocol,
)

from conftest import pauli_matrix

N = 4
letters = st.dictionaries(st.integers(0, N - 1), st.sampled_from("IXYZ"), max_size=N)
paulis = st.builds(
    lambda d, k: PauliString.from_letters(d) * (1j**k), letters, st.integers(0, 3)
)


@given(paulis, paulis)
@settings(max_examples=300, deadline=None)
def test_multiply_matches_matrices(a, b):
    want = pauli_matrix(a, N) @ pauli_matrix(b, N)
    assert np.allclose(pauli_matrix(multiply(a, b), N), want)


@given(paulis, paulis)
@settings(max_examples=300, deadline=None)
def test_commutes_matches_matrices(a, b):
    ma, mb = pauli_matrix(a, N), pauli_matrix(b, N)
    assert commutes(a, b) == np.allclose(ma @ mb, mb @ ma)
    assert commutes(a, b) == commutes(b, a)
    assert commutes(a, b) == (len(anticommuting_sites(a, b)) % 2 == 0)


@given(paulis, paulis, paulis)
@settings(max_examples=200, deadline=None)
def test_associative(a, b, c):
    assert multiply(multiply(a, b), c) == multiply(a, multiply(b, c))


@given(paulis)
def test_square_of_hermitian_is_identity(a):
    if a.is_hermitian:
        assert multiply(a, a) == PauliString()


def test_single_site_table():
    x, y, z = (PauliString.single(0, l) for l in "XYZ")
    assert multiply(x, y) == z * 1j
    assert multiply(y, x) == z * -1j
    assert multiply(z, x) == y * 1j


def test_parse_round_trip():
    p = PauliString.parse("+i X3 Y7 Z12")
    assert str(p) == "+i X3 Y7 Z12"
    assert PauliString.parse(str(-p)) == -p
    assert str(PauliString()) == "+1"
    assert PauliString.parse("Z0") == PauliString(0, 1)
    with pytest.raises(ValueError):
        PauliString.parse("X1 X1")
    with pytest.raises(ValueError):
        PauliString.parse("Q2")


def test_weight_and_letters():
    p = PauliString.from_letters({0: "X", 5: "Y", 9: "Z"})
    assert p.weight == 3
    assert p.letters() == {0: "X", 5: "Y", 9: "Z"}
    assert p.num_y() == 1


def test_pulse_validation():
    with pytest.raises(ValueError):
        Pulse(PauliString.single(0, "X") * 1j)
    with pytest.raises(ValueError):
        Pulse(PauliString())


def test_pulse_json_round_trip():
    pr = Protocol([Pulse(PauliString.parse("X0 Y1"), Angle.PI_OVER_2, "a"), Pulse(PauliString.parse("Z4"))])
    back = Protocol.from_list(pr.to_list())
    assert back == pr
    assert pr.to_list()[0]["axes"] == ["X", "Y"]


def test_reduce_move_then_reverse_is_identity():
    op = PauliString.parse("Z2")
    red = reduce_protocol(Protocol([Pulse(op), Pulse(op)]))
    assert red.residual.is_identity and red.phase == 1
    assert red.pulse_count == 2
    # (-i Z)(-i Z) = -1
    assert red.unitary_phase == -1


def test_reduce_ordering_picks_up_commutator_sign():
    a, b = PauliString.parse("X0"), PauliString.parse("Z0")
    ab = reduce_protocol(Protocol([Pulse(a), Pulse(b)]))
    ba = reduce_protocol(Protocol([Pulse(b), Pulse(a)]))
    assert ab.residual == ba.residual
    assert ab.phase == -ba.phase


def test_reduce_irreducible_with_half_pulse():
    red = reduce_protocol(Protocol([Pulse(PauliString.parse("X0"), Angle.PI_OVER_2)]))
    assert red.irreducible and red.residual is None


def test_protocol_inverse():
    pr = Protocol([Pulse(PauliString.parse("X0"), Angle.PI_OVER_2), Pulse(PauliString.parse("Z1"))])
    inv = pr.inverse()
    assert [p.op for p in inv] == [PauliString.parse("Z1"), PauliString.parse("X0")]
    assert inv[1].angle is Angle.MINUS_PI_OVER_2


def test_product_order():
    a, b = PauliString.parse("X0"), PauliString.parse("Y0")
    assert product([a, b]) == multiply(a, b)
