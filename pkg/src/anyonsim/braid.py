"""Braid compiler: vortex-level moves to validated pulse protocols.

Every move is a single pi pulse of a two-site operator on one z-link.  The
compiler picks the operator by commutation alone: an operator moves a vortex
from ``p`` to ``q`` exactly when it anticommutes with ``W_p`` and ``W_q`` and
with no other plaquette.  Geometry only enters when choosing which
plaquettes a canned path visits.
"""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .lattice import Flavor, Lattice, Link, Plaquette, build, plaquette_operators
from .pauli import (
    Angle,
    PauliString,
    Protocol,
    Pulse,
    Reduction,
    anticommuting_sites,
    commutes,
    reduce_protocol,
)
from .stabilizer import Syndrome, expect, predict_syndrome, prepare_ground

__all__ = [
    "BraidError",
    "PairOpKind",
    "Orientation",
    "Variant",
    "Move",
    "VortexPath",
    "BraidExperiment",
    "pair_operator",
    "flips",
    "moves",
    "create_pair",
    "compile_move",
    "compile_path",
    "random_path",
    "protocol_fig3",
    "protocol_fig4",
    "DEFAULT_ROWS",
    "DEFAULT_COLS",
]

DEFAULT_ROWS = 6
DEFAULT_COLS = 6


class BraidError(ValueError):
    pass


class PairOpKind(enum.Enum):
    """Two-site operators on a z-link ``(bottom, top)`` that commute with its ``Z Z``."""

    ZI = "ZI"
    IZ = "IZ"
    YX = "YX"
    XY = "XY"
    XX = "XX"
    YY = "YY"

    def operator(self, link: Link) -> PauliString:
        return PauliString.from_letters({link.a: self.value[0], link.b: self.value[1]})


# Search order: the single-site z move first, then the y-x move.
_KIND_ORDER = (PairOpKind.ZI, PairOpKind.YX, PairOpKind.IZ, PairOpKind.XY, PairOpKind.XX, PairOpKind.YY)


class Orientation(enum.Enum):
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"


class Variant(enum.Enum):
    EE = "EE"
    EM = "EM"


def pair_operator(lat: Lattice, link: Link, kind: PairOpKind | str) -> PauliString:
    return PairOpKind(kind).operator(link)


def flips(lat: Lattice, op: PauliString) -> frozenset[int]:
    """Ids of plaquettes whose operator anticommutes with ``op``."""
    return frozenset(p.id for p, w in zip(lat.plaquettes, _ops(lat)) if not commutes(op, w))


def _ops(lat: Lattice) -> list[PauliString]:
    cache = lat.__dict__.get("_plaquette_ops")
    if cache is None:
        cache = plaquette_operators(lat)
        object.__setattr__(lat, "_plaquette_ops", cache)
    return cache


@dataclass(frozen=True)
class Move:
    """One pair-op pulse and the two plaquettes it toggles."""

    op: PauliString
    link: Link
    kind: PairOpKind
    ends: frozenset[int]


def moves(lat: Lattice) -> list[Move]:
    """Every pair op that toggles exactly two same-flavor plaquettes, in search order.

    Near an open edge a four-plaquette op can lose two of its plaquettes and
    toggle one e and one m; that creates a mixed pair rather than moving a
    vortex, so it is not a move.
    """
    cache = lat.__dict__.get("_moves")
    if cache is None:
        cache = []
        for kind in _KIND_ORDER:
            for link in lat.z_links:
                op = kind.operator(link)
                f = flips(lat, op)
                if len(f) == 2 and len({lat.plaquettes[i].flavor for i in f}) == 1:
                    cache.append(Move(op, link, kind, f))
        object.__setattr__(lat, "_moves", cache)
    return cache


def _flavor_of(lat: Lattice, pid: int) -> Flavor:
    return lat.plaquettes[pid].flavor


def _plaquette(lat: Lattice, p: Plaquette | int) -> Plaquette:
    if isinstance(p, Plaquette):
        if p.id >= len(lat.plaquettes) or lat.plaquettes[p.id] != p:
            raise BraidError(f"plaquette {p.id} does not belong to {lat!r}")
        return p
    if not 0 <= p < len(lat.plaquettes):
        raise BraidError(f"no plaquette with id {p} on {lat!r}")
    return lat.plaquettes[p]


def create_pair(
    lat: Lattice,
    flavor: Flavor | str,
    zlink: Link | int,
    orientation: Orientation | str,
    allow_boundary: bool = False,
) -> Protocol:
    """One pi pulse on ``zlink`` that creates two ``flavor`` vortices side by side or stacked."""
    flavor = Flavor(flavor)
    orientation = Orientation(orientation)
    link = lat.z_links[zlink] if isinstance(zlink, int) else zlink
    seen = []
    for kind in _KIND_ORDER:
        op = kind.operator(link)
        f = flips(lat, op)
        seen.append(f"{kind.value}->{sorted(f)}")
        if len(f) != 2:
            continue
        a, b = (lat.plaquettes[i] for i in sorted(f))
        if a.flavor is not flavor or b.flavor is not flavor:
            continue
        horizontal = a.row == b.row
        if horizontal == (orientation is Orientation.HORIZONTAL):
            return Protocol([Pulse(op, Angle.PI, f"create {flavor.value} {kind.value}@{link.id}")])
    if allow_boundary:
        for kind in _KIND_ORDER:
            op = kind.operator(link)
            f = flips(lat, op)
            if len(f) == 1 and _flavor_of(lat, next(iter(f))) is flavor:
                return Protocol([Pulse(op, Angle.PI, f"create {flavor.value} {kind.value}@{link.id}")])
    raise BraidError(
        f"no pair op on z-link {link.id} creates a {orientation.value} {flavor.value} pair "
        f"(candidates: {', '.join(seen)})"
    )


def _moves_between(lat: Lattice, a: int, b: int) -> list[Move]:
    return [m for m in moves(lat) if m.ends == frozenset((a, b))]


def _neighbors(lat: Lattice, pid: int) -> list[int]:
    out = []
    for m in moves(lat):
        if pid in m.ends:
            other = next(iter(m.ends - {pid}))
            if other not in out:
                out.append(other)
    return out


def compile_move(lat: Lattice, flavor: Flavor | str, src, dst) -> Protocol:
    """Single pi pulse moving a ``flavor`` vortex from ``src`` to ``dst``."""
    flavor = Flavor(flavor)
    a, b = _plaquette(lat, src), _plaquette(lat, dst)
    for p in (a, b):
        if p.flavor is not flavor:
            raise BraidError(f"plaquette {p.id} ({p.row},{p.col}) has flavor {p.flavor.value}, not {flavor.value}")
    found = _moves_between(lat, a.id, b.id)
    if not found:
        hops = _neighbors(lat, a.id)
        raise BraidError(
            f"no single pair op moves a vortex from {a.id} to {b.id}; legal next hops from {a.id}: {hops}"
        )
    m = found[0]
    # Proof by commutation: toggles exactly {a, b}.
    assert flips(lat, m.op) == {a.id, b.id}
    return Protocol([Pulse(m.op, Angle.PI, f"move {flavor.value} {a.id}->{b.id}")])


@dataclass(frozen=True)
class VortexPath:
    flavor: Flavor
    plaquettes: tuple[int, ...]

    def compile(self, lat: Lattice) -> Protocol:
        return compile_path(lat, self.flavor, self.plaquettes)

    def to_dict(self) -> dict:
        return {"flavor": self.flavor.value, "plaquettes": list(self.plaquettes)}


def compile_path(lat: Lattice, flavor, plaquettes: Sequence[int], angle: Angle = Angle.PI) -> Protocol:
    steps = []
    for a, b in zip(plaquettes, plaquettes[1:]):
        (pulse,) = compile_move(lat, flavor, a, b)
        steps.append(Pulse(pulse.op, angle, pulse.label))
    return Protocol(steps)


def random_path(lat: Lattice, flavor: Flavor | str, length: int, rng) -> VortexPath:
    """Random walk of ``length`` legal moves starting at a random ``flavor`` plaquette."""
    flavor = Flavor(flavor)
    starts = [p.id for p in lat.plaquettes if p.flavor is flavor and _neighbors(lat, p.id)]
    if not starts:
        raise BraidError(f"{lat!r} has no movable {flavor.value} plaquettes")
    path = [starts[int(rng.integers(len(starts)))]]
    for _ in range(length):
        nb = _neighbors(lat, path[-1])
        path.append(nb[int(rng.integers(len(nb)))])
    return VortexPath(flavor, tuple(path))


# -- canned experiments -------------------------------------------------------

@dataclass
class BraidExperiment:
    """A compiled protocol with everything predicted from commutation alone."""

    name: str
    lattice: Lattice
    protocol: Protocol
    predicted_syndrome: Syndrome
    predicted_phase_ratio: int | None
    crossing_sites: list[int]
    paths: dict[str, VortexPath] = field(default_factory=dict)
    segments: dict[str, Protocol] = field(default_factory=dict)

    def reduction(self) -> Reduction:
        return reduce_protocol(self.protocol)

    def ground_scalar(self, ground=None) -> complex | None:
        """Scalar ``c`` with ``U |psi_g> = c |psi_g>``, or None when ``U`` leaves the ground space.

        The residual Pauli string is folded into the ground-state stabilizer
        group; a closed loop is a product of plaquettes and alignments
        rather than the literal identity.
        """
        red = self.reduction()
        if red.irreducible:
            return None
        ground = ground if ground is not None else prepare_ground(self.lattice)
        value = expect(ground, red.residual)
        if value == 0:
            return None
        return red.unitary_phase * value

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lattice": {"rows": self.lattice.rows, "cols": self.lattice.cols,
                        "boundary": self.lattice.boundary.value},
            "pulses": self.protocol.to_list(),
            "segments": {k: [p.label for p in v] for k, v in self.segments.items()},
            "paths": {k: v.to_dict() for k, v in self.paths.items()},
            "predicted_syndrome": self.predicted_syndrome.to_dict()["flipped"],
            "predicted_phase_ratio": self.predicted_phase_ratio,
            "crossing_sites": list(self.crossing_sites),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def svg(self, **kw) -> str:
        from .render import experiment_svg

        return experiment_svg(self, **kw)


def _crossings(a: Iterable[Pulse], b: Iterable[Pulse]) -> list[int]:
    """Sites where a pulse of ``a`` and a pulse of ``b`` anticommute, one entry per pair."""
    out = []
    for p, q in itertools.product(list(a), list(b)):
        if not commutes(p.op, q.op):
            out.extend(anticommuting_sites(p.op, q.op))
    return out


def _rectangle(lat: Lattice, q: Plaquette, width: int) -> list[int] | None:
    """e-plaquette loop around ``q`` and the ``width - 1`` m-plaquettes to its right."""
    rq, cq = q.row, q.col
    at = lat.plaquette_at
    pts = [at(rq - 1, cq - 1)]
    pts.append(at(rq + 1, cq))
    pts += [at(rq + 1, cq + j) for j in range(1, width + 1)]
    pts.append(at(rq - 1, cq + width - 1))
    pts += [at(rq - 1, cq + j) for j in range(width - 2, -2, -1)]
    if any(p is None for p in pts):
        return None
    ids = [p.id for p in pts]
    try:
        compile_path(lat, Flavor.E if q.flavor is Flavor.M else Flavor.M, ids)
    except BraidError:
        return None
    return ids


def _center_order(lat: Lattice, cands: list[Plaquette]) -> list[Plaquette]:
    rc, cc = (lat.rows - 1) / 2, (lat.cols - 2) / 2
    return sorted(cands, key=lambda p: ((p.row - rc) ** 2 + (p.col - cc) ** 2, p.id))


def _strings(lat: Lattice, start: int, length: int, flavor: Flavor):
    """Simple move paths of ``length`` hops from ``start``: (plaquettes, moves)."""
    def rec(path, hops):
        if len(hops) == length:
            yield list(path), list(hops)
            return
        for m in moves(lat):
            if path[-1] not in m.ends:
                continue
            nxt = next(iter(m.ends - {path[-1]}))
            if nxt in path or _flavor_of(lat, nxt) is not flavor:
                continue
            yield from rec(path + [nxt], hops + [m])
    yield from rec([start], [])


def _check_size(lat: Lattice, what: str, ok: bool):
    if not ok:
        raise BraidError(
            f"{lat!r} is too small for {what}; use at least a 6x6 open patch or a 4x2 torus"
        )


def _loop_setup(lat: Lattice, detour: int):
    width = 1 + detour
    for q in _center_order(lat, lat.plaquettes_of(Flavor.M)):
        loop = _rectangle(lat, q, width)
        if loop is not None:
            return q, loop
    return None, None


def protocol_fig3(lat: Lattice | None = None, variant: Variant | str = Variant.EM, detour: int = 0) -> BraidExperiment:
    """e-vortex braided around an m-vortex (EM) or with only e-vortices present (EE).

    Sequence: create pair A (e), create pair B, move one B vortex along C_B,
    carry one A vortex around the loop C_T, undo C_B, annihilate B then A.
    ``detour`` widens C_T by that many extra enclosed plaquettes.  EE and
    EM at the same ``detour`` have equal pulse counts, so their unitary
    phases compare directly.
    """
    lat = lat or build(DEFAULT_ROWS, DEFAULT_COLS)
    variant = Variant(variant)
    if detour < 0:
        raise BraidError("detour must be non-negative")
    q, loop = _loop_setup(lat, detour)
    _check_size(lat, "the braid loop", q is not None)
    width = 1 + detour
    e0 = loop[0]
    c_t = compile_path(lat, Flavor.E, loop)
    # Partner of the braided e-vortex: any neighbor of e0 off the loop, else any neighbor.
    nb = _neighbors(lat, e0)
    a_partner = next((n for n in nb if n not in loop and _flavor_of(lat, n) is Flavor.E), None)
    if a_partner is None:
        a_partner = next((n for n in nb if _flavor_of(lat, n) is Flavor.E and n != loop[1]), None)
    _check_size(lat, "pair A", a_partner is not None)
    create_a = compile_move(lat, Flavor.E, a_partner, e0)

    length = width + 1
    string_flavor = Flavor.M if variant is Variant.EM else Flavor.E
    chosen = None
    if variant is Variant.EM:
        cands = _strings(lat, q.id, length, Flavor.M)
        for path, hops in cands:
            proto = Protocol(Pulse(m.op) for m in hops)
            if len(_crossings(proto, c_t)) == 1:
                chosen = path, hops
                break
    else:
        starts = [p.id for p in lat.plaquettes_of(Flavor.E)]
        fallback = None
        for s in starts:
            for path, hops in _strings(lat, s, length, Flavor.E):
                if fallback is None:
                    fallback = path, hops
                if not set(path) & set(loop) and a_partner not in path:
                    chosen = path, hops
                    break
            if chosen:
                break
        chosen = chosen or fallback
    _check_size(lat, f"the {variant.value} C_B string", chosen is not None)
    path, _ = chosen
    # path runs core -> far end; B is created at the far end and C_B walks inward.
    far = path[::-1]
    create_b = compile_move(lat, string_flavor, far[0], far[1])
    c_b = compile_path(lat, string_flavor, far[1:])
    annihilate = lambda seg, tag: Protocol(Pulse(p.op, p.angle, tag) for p in seg)

    segments = {
        "A": annihilate(create_a, "sigma_A"),
        "B": annihilate(create_b, "sigma_B"),
        "C_B": c_b,
        "C_T": c_t,
        "C_B^-1": c_b.inverse(),
        "B^-1": annihilate(create_b, "sigma_B"),
        "A^-1": annihilate(create_a, "sigma_A"),
    }
    protocol = sum(segments.values(), Protocol())
    crossing = _crossings(segments["B"] + c_b, c_t)
    ratio = -1 if len(crossing) % 2 else 1
    return BraidExperiment(
        name=f"fig3-{variant.value}" + (f"-detour{detour}" if detour else ""),
        lattice=lat,
        protocol=protocol,
        predicted_syndrome=predict_syndrome(lat, protocol),
        predicted_phase_ratio=ratio,
        crossing_sites=crossing,
        paths={
            "C_T": VortexPath(Flavor.E, tuple(loop)),
            "C_B": VortexPath(string_flavor, tuple(far[1:])),
            "A": VortexPath(Flavor.E, (a_partner, e0)),
            "B": VortexPath(string_flavor, (far[0], far[1])),
        },
        segments=segments,
    )


def protocol_fig4(
    lat: Lattice | None = None,
    with_central_m: bool = True,
    wrong: bool = False,
    hops: int = 2,
) -> BraidExperiment:
    """Interference braid: an e-loop around a superposition of vacuum and an m-vortex.

    With the central m-vortex, pi/2 pulses along every hop of C_H precede
    the loop C_L and -pi/2 pulses undo them; C_H crosses C_L at exactly one
    site D', and the final state is ``i sigma_D' |psi_g>`` up to the loop's
    ground-state sign.  ``wrong=True`` builds the tempting alternative: a
    single pi/2 pulse on the outer hop, then pi pulses carrying one vortex to
    the center.  Without the central m-vortex only the loop is applied.
    """
    lat = lat or build(DEFAULT_ROWS, DEFAULT_COLS)
    if hops < 1:
        raise BraidError("C_H needs at least one hop")
    q, loop = _loop_setup(lat, 0)
    _check_size(lat, "the interference loop", q is not None)
    c_l = compile_path(lat, Flavor.E, loop)
    paths = {"C_L": VortexPath(Flavor.E, tuple(loop))}
    if not with_central_m:
        return BraidExperiment(
            name="fig4-vacuum", lattice=lat, protocol=c_l,
            predicted_syndrome=predict_syndrome(lat, c_l), predicted_phase_ratio=None,
            crossing_sites=[], paths=paths, segments={"C_L": c_l},
        )

    chosen = None
    best_first = None
    for path, mv in _strings(lat, q.id, hops, Flavor.M):
        proto = Protocol(Pulse(m.op) for m in mv)
        cross = _crossings(proto, c_l)
        if len(cross) != 1:
            continue
        # Prefer C_H whose crossing lies on the hop leaving the center.
        if _crossings(proto[:1], c_l):
            chosen = path, mv
            break
        best_first = best_first or (path, mv)
    chosen = chosen or best_first
    if chosen is None:
        raise BraidError(f"no C_H of {hops} hops meets C_L at exactly one site on {lat!r}")
    path, mv = chosen
    c_h = Protocol(Pulse(m.op, Angle.PI, f"C_H {a}->{b}") for m, a, b in zip(mv, path, path[1:]))
    crossing = _crossings(c_h, c_l)
    d_hop = next(m for m in mv if _crossings([Pulse(m.op)], c_l))
    paths["C_H"] = VortexPath(Flavor.M, tuple(path))

    if not wrong:
        up = Protocol(Pulse(p.op, Angle.PI_OVER_2, p.label) for p in c_h)
        down = Protocol(Pulse(p.op, Angle.MINUS_PI_OVER_2, p.label) for p in c_h)
        segments = {"R_C_H": up, "C_L": c_l, "R_C_H^-1": down}
        # U = i h_D' * (loop); predicted syndrome is the pair toggled by h_D'.
        predicted = Syndrome.from_flipped(lat, d_hop.ends)
        name = "fig4-interference"
    else:
        outer = c_h[len(c_h) - 1]
        inward = Protocol(reversed(c_h.steps[:-1]))
        segments = {
            "pi/2 outer": Protocol([Pulse(outer.op, Angle.PI_OVER_2, outer.label)]),
            "C_H pi": inward,
            "C_L": c_l,
            "C_H pi^-1": inward.inverse(),
            "-pi/2 outer": Protocol([Pulse(outer.op, Angle.MINUS_PI_OVER_2, outer.label)]),
        }
        predicted = Syndrome.from_flipped(lat, ())
        name = "fig4-wrong"
    protocol = sum(segments.values(), Protocol())
    return BraidExperiment(
        name=name, lattice=lat, protocol=protocol, predicted_syndrome=predicted,
        predicted_phase_ratio=None, crossing_sites=crossing, paths=paths, segments=segments,
    )
