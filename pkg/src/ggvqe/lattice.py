"""Lattice geometry and deterministic two-qubit link orderings.

Three lattice kinds are supported: a 1D chain, a square grid of sites, and
the planar "toric edge" lattice whose qubits sit on the edges of a square
grid of plaquettes.  Each lattice carries an ordered link list; the link
ordinal (1-based) fixes the order in which two-qubit gates are emitted and
defines the odd/even split used by the halved ansatz.  No periodic
boundaries anywhere.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

Link = tuple[int, int, int]  # (site_a, site_b, ordinal)


@dataclass(frozen=True)
class Lattice:
    kind: str  # "chain" | "square" | "toric_edge"
    n_sites: int
    coords: tuple[tuple[int, int], ...]
    links: tuple[Link, ...]
    vertices: tuple[tuple[int, ...], ...] = ()
    plaquettes: tuple[tuple[int, ...], ...] = ()

    @property
    def n_links(self) -> int:
        return len(self.links)


def _number(pairs) -> tuple[Link, ...]:
    return tuple((a, b, i + 1) for i, (a, b) in enumerate(pairs))


def build_chain(n: int) -> Lattice:
    """Sites 0..n-1 with links (0,1),(1,2),... in that order."""
    if n < 2:
        raise ValueError(f"chain needs at least 2 sites, got {n}")
    coords = tuple((0, i) for i in range(n))
    links = _number((i, i + 1) for i in range(n - 1))
    return Lattice("chain", n, coords, links)


def build_square(rows: int, cols: int) -> Lattice:
    """Row-major sweep; each site emits its bottom link, then its right link."""
    if rows < 2 or cols < 2:
        raise ValueError(f"square lattice needs rows, cols >= 2, got {rows}x{cols}")
    coords = tuple((r, c) for r in range(rows) for c in range(cols))
    pairs = []
    for r in range(rows):
        for c in range(cols):
            s = r * cols + c
            if r + 1 < rows:
                pairs.append((s, s + cols))
            if c + 1 < cols:
                pairs.append((s, s + 1))
    return Lattice("square", rows * cols, coords, _number(pairs))


def build_toric_edge(p_rows: int, p_cols: int) -> Lattice:
    """Qubits on the edges of a (p_rows x p_cols)-plaquette planar grid.

    Edges are numbered reading row by row: the horizontal edges of each
    vertex row, then the vertical edges below it.  Per plaquette (visited
    row-major) four links connect its edges cyclically
    top -> right -> bottom -> left -> top.  Coordinates are doubled so that
    edge midpoints stay integral: vertex (r, c) sits at (2r, 2c).
    """
    if p_rows < 1 or p_cols < 1:
        raise ValueError(f"toric lattice needs at least 1x1 plaquettes, got {p_rows}x{p_cols}")
    h_index: dict[tuple[int, int], int] = {}
    v_index: dict[tuple[int, int], int] = {}
    coords = []
    nxt = 0
    for r in range(p_rows + 1):
        for c in range(p_cols):
            h_index[(r, c)] = nxt
            coords.append((2 * r, 2 * c + 1))
            nxt += 1
        if r < p_rows:
            for c in range(p_cols + 1):
                v_index[(r, c)] = nxt
                coords.append((2 * r + 1, 2 * c))
                nxt += 1

    pairs = []
    plaquettes = []
    for r in range(p_rows):
        for c in range(p_cols):
            top = h_index[(r, c)]
            right = v_index[(r, c + 1)]
            bottom = h_index[(r + 1, c)]
            left = v_index[(r, c)]
            plaquettes.append((top, right, bottom, left))
            pairs.extend([(top, right), (right, bottom), (bottom, left), (left, top)])

    vertices = []
    for r in range(p_rows + 1):
        for c in range(p_cols + 1):
            edges = []
            if c > 0:
                edges.append(h_index[(r, c - 1)])
            if c < p_cols:
                edges.append(h_index[(r, c)])
            if r > 0:
                edges.append(v_index[(r - 1, c)])
            if r < p_rows:
                edges.append(v_index[(r, c)])
            vertices.append(tuple(sorted(edges)))

    return Lattice(
        "toric_edge",
        nxt,
        tuple(coords),
        _number(pairs),
        vertices=tuple(vertices),
        plaquettes=tuple(plaquettes),
    )


def split_links_by_parity(links) -> tuple[tuple[Link, ...], tuple[Link, ...]]:
    """(odd-ordinal links, even-ordinal links), relative order preserved."""
    odd = tuple(l for l in links if l[2] % 2 == 1)
    even = tuple(l for l in links if l[2] % 2 == 0)
    return odd, even


def link_parity(lattice: Lattice) -> tuple[tuple[Link, ...], tuple[Link, ...]]:
    """Odd/even link groups of a lattice.

    On the chain this reproduces the pair rule {(k, k+1) | k even} vs
    {(k, k+1) | k odd}, since link (k, k+1) carries ordinal k+1.
    """
    return split_links_by_parity(lattice.links)


def all_to_all_plaquette_links(lattice: Lattice) -> tuple[Link, ...]:
    """All 6 pairs inside each square-lattice plaquette, deduplicated.

    Plaquettes are visited row-major; pairs already emitted by an earlier
    plaquette are skipped and ordinals renumbered consecutively.
    """
    if lattice.kind != "square":
        raise ValueError("all-to-all plaquette links require a square lattice")
    rows = max(r for r, _ in lattice.coords) + 1
    cols = max(c for _, c in lattice.coords) + 1
    seen = set()
    pairs = []
    for r in range(rows - 1):
        for c in range(cols - 1):
            tl = r * cols + c
            corners = (tl, tl + 1, tl + cols, tl + cols + 1)
            for a, b in itertools.combinations(corners, 2):
                if (a, b) not in seen:
                    seen.add((a, b))
                    pairs.append((a, b))
    return _number(pairs)


def lattice_to_json(lattice: Lattice) -> dict:
    out = {
        "kind": lattice.kind,
        "n_sites": lattice.n_sites,
        "coords": [list(c) for c in lattice.coords],
        "links": [list(l) for l in lattice.links],
    }
    if lattice.kind == "toric_edge":
        out["vertices"] = [list(v) for v in lattice.vertices]
        out["plaquettes"] = [list(p) for p in lattice.plaquettes]
    return out
