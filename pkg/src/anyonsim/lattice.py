"""Honeycomb lattice on a brick-wall grid.

Sites live on the two ends of vertical z-links.  z-link ``(r, c)`` owns the
bottom site ``2*(r*cols + c)`` and the top site ``2*(r*cols + c) + 1``.  The
top site of ``(r, c)`` is joined to the bottom site of ``(r+1, c)`` by an
x-link and to the bottom site of ``(r+1, c+1)`` by a y-link.  In the brick
embedding the bottom site of ``(r, c)`` sits at ``(2c - r, r)`` and the top
site one unit above it.

Plaquette ``(r, c)`` is the hexagon whose vertical sides are z-links
``(r, c)`` and ``(r, c+1)``.  Its six sites are stored counterclockwise
starting at the upper-left corner::

    1 upper-left   t(r, c)      X
    2 lower-left   b(r, c)      Y
    3 bottom       t(r-1, c)    Z
    4 lower-right  b(r, c+1)    X
    5 upper-right  t(r, c+1)    Y
    6 top          b(r+1, c+1)  Z

so the plaquette operator reads ``X1 Y2 Z3 X4 Y5 Z6`` in stored order; each
letter is the type of the one link at that site that leaves the hexagon.
Plaquettes on even rows carry flavor E, odd rows flavor M.
"""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass
from functools import cached_property

from .pauli import PauliString, commutes

__all__ = [
    "Boundary",
    "LinkType",
    "Flavor",
    "Link",
    "Plaquette",
    "Lattice",
    "LatticeError",
    "build",
    "plaquette_operator",
    "plaquette_operators",
    "loop_operators",
    "zlink_neighbors",
]

PLAQUETTE_LETTERS = "XYZXYZ"


class LatticeError(ValueError):
    pass


class Boundary(enum.Enum):
    OPEN = "open"
    TORUS = "torus"


class LinkType(enum.Enum):
    X = "x"
    Y = "y"
    Z = "z"


class Flavor(enum.Enum):
    E = "e"
    M = "m"


@dataclass(frozen=True)
class Link:
    a: int
    b: int
    kind: LinkType
    id: int = -1
    row: int = -1
    col: int = -1

    def __post_init__(self):
        if self.a == self.b:
            raise LatticeError("a link needs two distinct sites")

    @property
    def sites(self) -> tuple[int, int]:
        return (self.a, self.b)


@dataclass(frozen=True)
class Plaquette:
    id: int
    sites: tuple[int, int, int, int, int, int]
    row: int
    col: int
    flavor: Flavor


@dataclass(frozen=True, eq=False)
class Lattice:
    rows: int
    cols: int
    boundary: Boundary
    links: tuple[Link, ...]
    plaquettes: tuple[Plaquette, ...]

    @property
    def site_count(self) -> int:
        return 2 * self.rows * self.cols

    @property
    def sites(self) -> range:
        return range(self.site_count)

    @cached_property
    def z_links(self) -> tuple[Link, ...]:
        return tuple(l for l in self.links if l.kind is LinkType.Z)

    @property
    def is_torus(self) -> bool:
        return self.boundary is Boundary.TORUS

    # -- index helpers -------------------------------------------------
    def _wrap(self, r, c):
        if self.is_torus:
            return r % self.rows, c % self.cols
        if 0 <= r < self.rows and 0 <= c < self.cols:
            return r, c
        return None

    def bottom(self, r: int, c: int) -> int | None:
        rc = self._wrap(r, c)
        return None if rc is None else 2 * (rc[0] * self.cols + rc[1])

    def top(self, r: int, c: int) -> int | None:
        b = self.bottom(r, c)
        return None if b is None else b + 1

    def zlink(self, r: int, c: int) -> Link | None:
        rc = self._wrap(r, c)
        return None if rc is None else self.z_links[rc[0] * self.cols + rc[1]]

    def zlink_of_site(self, site: int) -> Link:
        return self.z_links[site // 2]

    def partner(self, site: int) -> int:
        """The other end of ``site``'s z-link."""
        return site ^ 1

    def is_zlink_pair(self, a: int, b: int) -> bool:
        return 0 <= a < self.site_count and 0 <= b < self.site_count and a ^ 1 == b

    def plaquette_at(self, r: int, c: int) -> Plaquette | None:
        if self.is_torus:
            r, c = r % self.rows, c % self.cols
        return self._plaquette_index.get((r, c))

    @cached_property
    def _plaquette_index(self) -> dict[tuple[int, int], Plaquette]:
        return {(p.row, p.col): p for p in self.plaquettes}

    def position(self, site: int) -> tuple[float, float]:
        """Brick-wall coordinates (x to the right, y up) for drawing."""
        l = site // 2
        r, c = divmod(l, self.cols)
        return float(2 * c - r), float(r + (site & 1))

    def links_of(self, site: int) -> list[Link]:
        return [l for l in self.links if site in l.sites]

    def alignment_operator(self, link: Link) -> PauliString:
        """``Z_a Z_b`` on a z-link."""
        return PauliString.from_letters({link.a: "Z", link.b: "Z"})

    def link_operator(self, link: Link) -> PauliString:
        letter = link.kind.name
        return PauliString.from_letters({link.a: letter, link.b: letter})

    def plaquettes_of(self, flavor: Flavor) -> list[Plaquette]:
        return [p for p in self.plaquettes if p.flavor is flavor]

    # -- export ---------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "boundary": self.boundary.value,
            "sites": [
                {"id": s, "zlink": s // 2, "end": "top" if s & 1 else "bottom",
                 "pos": list(self.position(s))}
                for s in self.sites
            ],
            "links": [
                {"id": l.id, "a": l.a, "b": l.b, "kind": l.kind.value} for l in self.links
            ],
            "plaquettes": [
                {"id": p.id, "row": p.row, "col": p.col, "flavor": p.flavor.value,
                 "sites": list(p.sites)}
                for p in self.plaquettes
            ],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @cached_property
    def digest(self) -> bytes:
        return hashlib.sha256(self.to_json(sort_keys=True).encode()).digest()

    def __repr__(self) -> str:
        return f"Lattice({self.rows}x{self.cols}, {self.boundary.value})"


def build(rows: int, cols: int, boundary: Boundary | str = Boundary.OPEN) -> Lattice:
    """Build a ``rows x cols`` array of z-links joined into a honeycomb.

    On a torus ``rows`` must be even (so e and m rows alternate consistently)
    and ``cols >= 2``.
    """
    boundary = Boundary(boundary)
    if not (isinstance(rows, int) and isinstance(cols, int)) or rows < 1 or cols < 1:
        raise LatticeError(f"rows and cols must be positive integers, got {rows}x{cols}")
    torus = boundary is Boundary.TORUS
    if torus and (rows % 2 or cols < 2):
        raise LatticeError(
            f"a torus needs an even number of rows and at least 2 columns, got {rows}x{cols}"
        )

    def site(r, c, top):
        if torus:
            r, c = r % rows, c % cols
        elif not (0 <= r < rows and 0 <= c < cols):
            return None
        return 2 * (r * cols + c) + top

    links: list[Link] = []
    for r in range(rows):
        for c in range(cols):
            links.append(Link(site(r, c, 0), site(r, c, 1), LinkType.Z, len(links), r, c))
    for r in range(rows):
        for c in range(cols):
            t = site(r, c, 1)
            for kind, dc in ((LinkType.X, 0), (LinkType.Y, 1)):
                b = site(r + 1, c + dc, 0)
                if b is not None:
                    links.append(Link(t, b, kind, len(links), r, c))

    plaquettes: list[Plaquette] = []
    for r in range(rows):
        for c in range(cols):
            corners = (
                site(r, c, 1),
                site(r, c, 0),
                site(r - 1, c, 1),
                site(r, c + 1, 0),
                site(r, c + 1, 1),
                site(r + 1, c + 1, 0),
            )
            if None in corners:
                continue
            flavor = Flavor.E if r % 2 == 0 else Flavor.M
            plaquettes.append(Plaquette(len(plaquettes), corners, r, c, flavor))

    return Lattice(rows, cols, boundary, tuple(links), tuple(plaquettes))


def plaquette_operator(lat: Lattice, p: Plaquette) -> PauliString:
    """``X1 Y2 Z3 X4 Y5 Z6`` on the plaquette's stored site order, phase +1."""
    if p.id >= len(lat.plaquettes) or lat.plaquettes[p.id] != p:
        raise LatticeError(f"plaquette {p.id} does not belong to {lat!r}")
    return PauliString.from_letters(dict(zip(p.sites, PLAQUETTE_LETTERS)))


def zlink_neighbors(lat: Lattice, link: Link) -> frozenset[Plaquette]:
    """Plaquettes that some single-site Pauli on the link's ends would flip."""
    if link.kind is not LinkType.Z:
        raise LatticeError("zlink_neighbors expects a z-link")
    probes = [PauliString.single(s, a) for s in link.sites for a in "XYZ"]
    return frozenset(
        p
        for p in lat.plaquettes
        if any(not commutes(plaquette_operator(lat, p), q) for q in probes)
    )


def plaquette_operators(lat: Lattice) -> list[PauliString]:
    """All plaquette operators indexed by plaquette id."""
    return [PauliString.from_letters(dict(zip(p.sites, PLAQUETTE_LETTERS))) for p in lat.plaquettes]


def loop_operators(lat: Lattice) -> list[PauliString]:
    """Two non-contractible loop operators of a torus (empty list on an open patch).

    The first is the z-loop running along the x/y zigzag between z-link rows
    0 and 1 (``Z`` on the top sites of row 0 and the bottom sites of row 1);
    the second climbs column 0 through z- and x-links (``Y`` on both ends of
    every z-link in that column).  Both are products of link operators and so
    commute with every plaquette and with the spin Hamiltonian.
    """
    if not lat.is_torus:
        return []
    horizontal = {lat.top(0, c): "Z" for c in range(lat.cols)}
    horizontal.update({lat.bottom(1, c): "Z" for c in range(lat.cols)})
    vertical = {}
    for r in range(lat.rows):
        vertical[lat.bottom(r, 0)] = "Y"
        vertical[lat.top(r, 0)] = "Y"
    return [PauliString.from_letters(horizontal), PauliString.from_letters(vertical)]
