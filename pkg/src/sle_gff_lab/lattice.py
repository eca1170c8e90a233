"""Finite-graph approximations of planar domains.

A domain is a finite graph with interior and boundary vertices.  On the
square and triangular lattices, interior vertices come from a boolean mask
(one cell per True entry) and boundary vertices are synthesized: one vertex
per cell (inside or outside the mask grid) adjacent to an interior cell.
Boundary vertices are kept individual; rooting/merging is done downstream.

The counterclockwise boundary cycle is traced by a contour walk, which also
gives exterior turning angles (the polygonal substitute for boundary
winding of a smooth curve).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SQUARE_DIRS = ((1, 0), (0, 1), (-1, 0), (0, -1))
# axial coordinates, counterclockwise
TRI_DIRS = ((1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1))


def _tri_position(cell):
    q, r = cell
    return (q + 0.5 * r, 0.5 * np.sqrt(3.0) * r)


@dataclass
class Cut:
    """Vertex cut: removing ``delta`` splits the interior into components."""

    delta: list
    components: list

    @property
    def left_component(self):
        return self.components[0]

    @property
    def right_component(self):
        return self.components[1] if len(self.components) > 1 else []


@dataclass
class LatticeDomain:
    """Lattice approximation of a planar domain.

    vertices are labelled by cell coordinates (tuples).  ``adjacency`` holds
    unit-conductance edges; only interior-interior and interior-boundary
    edges are stored.  ``mesh`` is metadata: all graph operators act on the
    combinatorial (unit-conductance) Laplacian.
    """

    kind: str                      # "square" | "triangular" | "custom"
    mesh: float
    interior: list                 # cell labels, fixed order
    boundary: list                 # cell labels, fixed order
    positions: dict                # label -> (x, y) in units of mesh
    adjacency: dict                # label -> tuple of neighbor labels
    boundary_order: list           # ccw cycle of boundary labels
    marked: dict = field(default_factory=dict)
    _index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self._index:
            self._index = {v: i for i, v in enumerate(self.interior)}

    # -- basic queries -------------------------------------------------

    @property
    def n_interior(self):
        return len(self.interior)

    def is_interior(self, v):
        return v in self._index

    def interior_index(self, v):
        return self._index[v]

    def neighbors(self, v):
        return self.adjacency[v]

    def degree(self, v):
        return len(self.adjacency[v])

    def position(self, v):
        return self.positions[v]

    def edges(self):
        """Undirected edges, each once; interior-boundary edges included."""
        seen = set()
        out = []
        for v, nbrs in self.adjacency.items():
            for w in nbrs:
                if (w, v) not in seen:
                    seen.add((v, w))
                    out.append((v, w))
        return out

    # -- construction of subdomains ------------------------------------

    def remove_interior(self, cells):
        """New domain with `cells` deleted from the interior.

        Deleted cells and their dangling edges vanish entirely (absorbing
        set for the random-walk picture: surviving degrees are unchanged
        because removed rows act as Dirichlet boundary).  The removed cells
        are re-flagged as boundary vertices.
        """
        cells = set(cells)
        for c in cells:
            if not self.is_interior(c):
                raise ValueError(f"{c} is not an interior vertex")
        interior = [v for v in self.interior if v not in cells]
        if not interior:
            raise ValueError("removal empties the interior")
        boundary = list(self.boundary) + [c for c in self.interior if c in cells]
        return LatticeDomain(
            kind=self.kind,
            mesh=self.mesh,
            interior=interior,
            boundary=boundary,
            positions=self.positions,
            adjacency=self.adjacency,
            boundary_order=[],
            marked=dict(self.marked),
            _index={},
        )


def _build_mask_domain(mask, mesh, dirs, pos_of, kind):
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 2 or not mask.any():
        raise ValueError("mask must be a nonempty 2-D boolean grid")
    cells = [(int(i), int(j)) for i, j in zip(*np.nonzero(mask))]
    cellset = set(cells)

    # interior connectivity under the lattice adjacency
    stack = [cells[0]]
    seen = {cells[0]}
    while stack:
        q, r = stack.pop()
        for dq, dr in dirs:
            w = (q + dq, r + dr)
            if w in cellset and w not in seen:
                seen.add(w)
                stack.append(w)
    if len(seen) != len(cellset):
        raise ValueError("mask interior is not connected")

    boundary = []
    bset = set()
    adjacency = {}
    for c in cells:
        nbrs = []
        for dq, dr in dirs:
            w = (c[0] + dq, c[1] + dr)
            nbrs.append(w)
            if w not in cellset and w not in bset:
                bset.add(w)
                boundary.append(w)
        adjacency[c] = tuple(nbrs)
    for b in boundary:
        adjacency[b] = tuple(
            w for w in ((b[0] + dq, b[1] + dr) for dq, dr in dirs) if w in cellset
        )

    positions = {v: pos_of(v) for v in list(cells) + boundary}
    order = _trace_boundary(cellset, boundary, dirs)
    return LatticeDomain(
        kind=kind,
        mesh=float(mesh),
        interior=cells,
        boundary=boundary,
        positions=positions,
        adjacency=adjacency,
        boundary_order=order,
    )


def build_square_domain(region_mask, mesh=1.0, marked=None):
    """Square-lattice domain from a boolean mask of interior cells.

    True cells become interior vertices; every 4-neighbor cell outside the
    mask becomes one boundary vertex (per cell, no merging).
    """
    dom = _build_mask_domain(
        region_mask, mesh, SQUARE_DIRS, lambda c: (float(c[0]), float(c[1])), "square"
    )
    if marked:
        dom.marked.update({k: tuple(v) for k, v in marked.items()})
    return dom


def build_triangular_domain(region_mask, mesh=1.0, marked=None):
    """Triangular-lattice domain (6-neighbor adjacency, axial mask coords)."""
    dom = _build_mask_domain(region_mask, mesh, TRI_DIRS, _tri_position, "triangular")
    if marked:
        dom.marked.update({k: tuple(v) for k, v in marked.items()})
    return dom


def custom_domain(interior, boundary, edges, positions=None, boundary_order=None,
                  mesh=1.0):
    """Explicit small graph, used for oracles and path-graph examples.

    Lattice degree invariants do not apply; winding is only available when
    ``boundary_order`` (with positions) is supplied.
    """
    adjacency = {v: [] for v in list(interior) + list(boundary)}
    for v, w in edges:
        adjacency[v].append(w)
        adjacency[w].append(v)
    adjacency = {v: tuple(ws) for v, ws in adjacency.items()}
    if positions is None:
        positions = {v: (float(i), 0.0) for i, v in enumerate(adjacency)}
    return LatticeDomain(
        kind="custom",
        mesh=float(mesh),
        interior=list(interior),
        boundary=list(boundary),
        positions=positions,
        adjacency=adjacency,
        boundary_order=list(boundary_order or []),
    )


def from_json_dict(doc):
    """Domain from the JSON document schema.

    ``{"lattice": "square"|"triangular", "mask": [[0|1,...]], "mesh": h,
       "marked": {name: [i, j], ...}}``
    """
    lattice = doc.get("lattice", "square")
    mask = np.asarray(doc["mask"], dtype=bool)
    mesh = float(doc.get("mesh", 1.0))
    marked = {k: tuple(v) for k, v in doc.get("marked", {}).items()}
    if lattice == "square":
        return build_square_domain(mask, mesh, marked)
    if lattice == "triangular":
        return build_triangular_domain(mask, mesh, marked)
    raise ValueError(f"unknown lattice kind {lattice!r}")


# -- boundary tracing and winding ---------------------------------------


def _trace_boundary(cellset, boundary, dirs):
    """CCW cycle of boundary cells around a connected interior set.

    Walks directed wall contacts (u, k): u interior, neighbor k outside.
    Square lattice inspects the diagonal cell; the hexagonal walls of the
    triangular lattice meet only three cells so the rule is shorter.
    """
    if not boundary:
        return []
    m = len(dirs)

    def nbr(c, k):
        return (c[0] + dirs[k][0], c[1] + dirs[k][1])

    start_u = min(cellset)
    start = None
    for k in range(m):
        if nbr(start_u, k) not in cellset:
            start = (start_u, k)
            break

    def step(contact):
        u, k = contact
        a = (k + 1) % m
        v = nbr(u, a)
        if v not in cellset:
            return (u, a)
        if m == 6:
            return (v, (k - 1) % m)
        w = nbr(v, k)
        if w not in cellset:
            return (v, k)
        return (w, (k - 1) % m)

    order = []
    contact = start
    while True:
        u, k = contact
        cell = nbr(u, k)
        if not order or order[-1] != cell:
            order.append(cell)
        contact = step(contact)
        if contact == start:
            break
    if len(order) > 1 and order[-1] == order[0]:
        order.pop()
    if len(set(order)) != len(order):
        raise ValueError(
            "boundary is not a simple cycle (domain pinches on a boundary cell)"
        )
    # boundary cells not on the walk bound interior holes; they are valid
    # Dirichlet vertices but carry no winding data
    return order


def _turning_angle(p0, p1, p2):
    a = np.array(p1) - np.array(p0)
    b = np.array(p2) - np.array(p1)
    return float(np.arctan2(a[0] * b[1] - a[1] * b[0], a[0] * b[0] + a[1] * b[1]))


def boundary_winding(domain, frm, to, full_loop=False):
    """Sum of exterior turning angles along the ccw boundary walk.

    Turns are summed at vertices strictly between ``frm`` and ``to``; with
    ``full_loop=True`` (or frm == to and full_loop) the whole cycle is
    traversed, giving 2*pi for a simply connected domain.
    """
    cyc = domain.boundary_order
    if not cyc:
        raise ValueError("domain has no traced boundary cycle")
    if frm not in cyc or to not in cyc:
        raise ValueError("winding endpoints must be boundary vertices")
    n = len(cyc)
    i0 = cyc.index(frm)
    i1 = cyc.index(to)
    if full_loop:
        steps = n
    else:
        steps = (i1 - i0) % n
        if steps == 0:
            return 0.0
    pos = [domain.positions[cyc[(i0 + s) % n]] for s in range(-1, steps + 2)]
    # turning at walk vertices 1 .. steps-1 (strictly between endpoints);
    # for the full loop every cycle vertex turns once
    lo, hi = (1, steps) if full_loop else (1, steps - 1)
    total = 0.0
    for s in range(lo, hi + 1):
        total += _turning_angle(pos[s], pos[s + 1], pos[s + 2])
    return total


def split_by_cut(domain, delta, allow_multi=False):
    """Cut the interior along the vertex set ``delta``.

    Rejects when removing delta leaves fewer than two components, unless
    ``allow_multi`` permits any m >= 2.
    """
    delta = list(delta)
    dset = set(delta)
    for v in delta:
        if not domain.is_interior(v):
            raise ValueError(f"cut vertex {v} is not interior")
    rest = [v for v in domain.interior if v not in dset]
    comps = []
    unseen = set(rest)
    while unseen:
        seed = unseen.pop()
        comp = {seed}
        stack = [seed]
        while stack:
            u = stack.pop()
            for w in domain.neighbors(u):
                if w in unseen:
                    unseen.remove(w)
                    comp.add(w)
                    stack.append(w)
        comps.append(sorted(comp))
    if len(comps) != 2 and not (allow_multi and len(comps) >= 2):
        raise ValueError(
            f"cut yields {len(comps)} interior component(s); expected 2"
        )
    comps.sort(key=lambda c: (len(c), c))
    cut = Cut(delta=delta, components=comps)
    _check_cut(domain, cut)
    return cut


def _check_cut(domain, cut):
    membership = {}
    for i, comp in enumerate(cut.components):
        for v in comp:
            membership[v] = i
    for v, i in membership.items():
        for w in domain.neighbors(v):
            if membership.get(w, i) != i:
                raise AssertionError("cut separation invariant violated")


# -- doubled (Temperley) graph ------------------------------------------


@dataclass
class DoubledGraph:
    """Superposition graph: blacks are vertices and bounded faces of the
    domain graph, whites are its edges.  Coordinates are doubled so that a
    cell (i, j) sits at (2i, 2j) and whites at odd-sum points."""

    domain: LatticeDomain
    blacks: list       # doubled coords of vertices + face centers
    whites: list       # doubled coords of edge midpoints
    vertex_black: dict  # cell label -> doubled coord
    face_black: dict    # face label (i, j) of unit square corner -> coord
    white_of_edge: dict  # frozenset({u, v}) -> doubled coord
    adjacency: dict     # white coord -> tuple of black coords

    def black_of(self, v):
        return self.vertex_black[v]


def double_graph(domain):
    """Doubled bipartite graph of a square-lattice domain."""
    if domain.kind != "square":
        raise ValueError("double_graph supports square-lattice domains only")
    vertex_black = {v: (2 * v[0], 2 * v[1]) for v in domain.interior + domain.boundary}
    iset = set(domain.interior)
    faces = {}
    for (i, j) in domain.interior:
        corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)]
        if all(c in iset for c in corners):
            faces[(i, j)] = (2 * i + 1, 2 * j + 1)
    white_of_edge = {}
    for (u, v) in domain.edges():
        white_of_edge[frozenset((u, v))] = (u[0] + v[0], u[1] + v[1])
    blackset = set(vertex_black.values()) | set(faces.values())
    adjacency = {}
    for w in white_of_edge.values():
        nbrs = []
        for dq, dr in SQUARE_DIRS:
            b = (w[0] + dq, w[1] + dr)
            if b in blackset:
                nbrs.append(b)
        adjacency[w] = tuple(nbrs)
    return DoubledGraph(
        domain=domain,
        blacks=sorted(blackset),
        whites=sorted(white_of_edge.values()),
        vertex_black=vertex_black,
        face_black=faces,
        white_of_edge=white_of_edge,
        adjacency=adjacency,
    )
