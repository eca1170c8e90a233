"""Wilson's algorithm, loop-erased walks, and the Temperley chain.

Trees are stored as parent maps on interior vertices.  Two rootings are
supported: the merged boundary (every branch exits wherever its walk first
hits the boundary) and a single boundary root (the tree spans the interior
and exits once, at the root), which is the mode the dimer bijection needs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .lattice import SQUARE_DIRS, double_graph


@dataclass(frozen=True)
class SpanningTree:
    """Boundary-rooted spanning tree as a parent map over the interior."""

    parent: tuple          # ((vertex, parent), ...) sorted, hashable
    root: object = None    # None = merged boundary

    def parent_map(self):
        return dict(self.parent)

    def edges(self):
        return [(v, p) for v, p in self.parent]


def _make_tree(parent, root=None):
    return SpanningTree(parent=tuple(sorted(parent.items())), root=root)


def wilson_ust(domain, rng, root=None):
    """Uniform spanning tree via Wilson's algorithm.

    root None: loop-erased random walks on the full graph, absorbed on any
    boundary vertex (uniform over boundary-rooted forests, the det(Laplacian)
    ensemble).  root a boundary vertex: walks live on interior + {root},
    giving the uniform spanning tree of that graph rooted at root.
    """
    if root is None:
        in_tree = {v: True for v in domain.boundary}
        nbrs = {v: domain.neighbors(v) for v in domain.interior}
    else:
        if domain.is_interior(root):
            raise ValueError("root must be a boundary vertex")
        in_tree = {root: True}
        nbrs = {
            v: tuple(w for w in domain.neighbors(v)
                     if domain.is_interior(w) or w == root)
            for v in domain.interior
        }
    for v in domain.interior:
        in_tree.setdefault(v, False)
    nxt = {}
    for v in domain.interior:
        u = v
        while not in_tree[u]:
            ws = nbrs[u]
            nxt[u] = ws[rng.integers(len(ws))]
            u = nxt[u]
        u = v
        while not in_tree[u]:
            in_tree[u] = True
            u = nxt[u]
    parent = {v: nxt[v] for v in domain.interior}
    return _make_tree(parent, root)


def lerw_branch(domain, y, rng):
    """Chronological loop-erasure of a simple random walk from y to the
    boundary; returns the simple path [y, ..., exit vertex]."""
    if not domain.is_interior(y):
        raise ValueError("start vertex must be interior")
    path = [y]
    index = {y: 0}
    u = y
    while domain.is_interior(u):
        ws = domain.neighbors(u)
        u = ws[rng.integers(len(ws))]
        if u in index:
            for w in path[index[u] + 1:]:
                del index[w]
            del path[index[u] + 1:]
        else:
            index[u] = len(path)
            path.append(u)
    return path


def harmonic_measure(domain, y, targets, fact=None):
    """Probability that a random walk from y exits through each target."""
    bv = {b: 0.0 for b in domain.boundary}
    out = {}
    fact = fact or linalg.laplacian(domain)
    for x in targets:
        vals = dict(bv)
        vals[x] = 1.0
        ext = linalg.harmonic_extension(domain, vals, fact=fact)
        out[x] = ext[y]
    return out


def lerw_log_partition(domain, x, y):
    """log of det(Laplacian) * Harm(y, {x}): the number of boundary-rooted
    spanning forests whose branch from y exits at x."""
    fact = linalg.laplacian(domain)
    hm = harmonic_measure(domain, y, [x], fact=fact)[x]
    if hm <= 0.0:
        return -np.inf
    return fact.logdet + float(np.log(hm))


def tree_branch(tree, y):
    """Path from y to the tree root along parent pointers."""
    parent = tree.parent_map()
    path = [y]
    while path[-1] in parent:
        path.append(parent[path[-1]])
    return path


# -- Temperley bijection ---------------------------------------------------


@dataclass(frozen=True)
class DimerMatching:
    """Perfect matching on the trimmed doubled graph: white -> black."""

    pairs: tuple    # ((white, black), ...) sorted
    root: object
    doubled: object = None

    def as_dict(self):
        return dict(self.pairs)


def temperley_matching(tree, domain, doubled=None):
    """Tree -> dimer matching on the doubled graph.

    Requires a single-root tree on a square-lattice domain whose boundary
    vertices are pendant (exactly one interior neighbor); rectangles
    qualify.  Matches every interior vertex black with the white of its
    outgoing tree edge, every bounded face black with the white of its
    outgoing dual-tree edge (dual tree = unused interior edges, rooted at
    the outer face), and every unused boundary edge's white with its pendant
    boundary black.  Trimmed blacks: the root and the outer face.
    """
    if tree.root is None:
        raise ValueError("the bijection needs a single-root tree "
                         "(wilson_ust(..., root=b))")
    dg = doubled or double_graph(domain)
    for b in domain.boundary:
        if len(domain.neighbors(b)) != 1:
            raise ValueError("boundary vertices must be pendant for the "
                             "dimer correspondence")
    parent = tree.parent_map()
    pairs = {}
    used = set()
    for v, p in parent.items():
        e = frozenset((v, p))
        used.add(e)
        pairs[dg.white_of_edge[e]] = dg.vertex_black[v]
    for b in domain.boundary:
        if b == tree.root:
            continue
        e = frozenset((b, domain.neighbors(b)[0]))
        if e in used:
            raise ValueError("tree exits the boundary away from its root")
        pairs[dg.white_of_edge[e]] = dg.vertex_black[b]

    # dual tree: unused interior edges span (bounded faces + outer face);
    # orient each bounded face toward the outer root
    iset = set(domain.interior)
    unused = [frozenset((u, v)) for u, v in domain.edges()
              if u in iset and v in iset and frozenset((u, v)) not in used]
    if len(unused) != len(dg.face_black):
        raise ValueError("unused interior edges do not match bounded faces")
    face_blacks = set(dg.face_black.values())
    outer = "OUTER"
    graph = {}
    for e in unused:
        w = dg.white_of_edge[e]
        flanks = [b for b in dg.adjacency[w] if b in face_blacks]
        a = flanks[0] if flanks else outer
        b2 = flanks[1] if len(flanks) > 1 else outer
        graph.setdefault(a, []).append((b2, e))
        graph.setdefault(b2, []).append((a, e))
    seen = {outer}
    queue = [outer]
    while queue:
        node = queue.pop()
        for other, e in graph.get(node, ()):
            if other not in seen:
                seen.add(other)
                pairs[dg.white_of_edge[e]] = other
                queue.append(other)
    if seen - {outer} != face_blacks:
        raise ValueError("dual orientation failed: unused edges do not form "
                         "a dual spanning tree")
    _assert_perfect(pairs, dg, tree.root)
    return DimerMatching(pairs=tuple(sorted(pairs.items())), root=tree.root,
                         doubled=dg)


def _assert_perfect(pairs, dg, root):
    whites = set(dg.white_of_edge.values())
    if set(pairs) != whites:
        raise AssertionError("matching does not cover all whites")
    blacks = list(pairs.values())
    if len(set(blacks)) != len(blacks):
        raise AssertionError("a black vertex is matched twice")
    trimmed = set(dg.blacks) - set(blacks)
    expect = {dg.vertex_black[root]}
    if trimmed != expect:
        raise AssertionError(f"trimmed blacks {trimmed} != {{root}}")


def matching_to_tree(matching, domain, doubled=None):
    """Inverse map: read parents off whites matched to interior blacks."""
    dg = matching.doubled or double_graph(domain)
    black_vertex = {c: v for v, c in dg.vertex_black.items()}
    edge_of_white = {w: e for e, w in dg.white_of_edge.items()}
    parent = {}
    for w, b in matching.as_dict().items():
        v = black_vertex.get(b)
        if v is None or not domain.is_interior(v):
            continue
        u, u2 = tuple(edge_of_white[w])
        parent[v] = u2 if u == v else u
    return _make_tree(parent, matching.root)


# -- height function --------------------------------------------------------


@dataclass
class HeightFunction:
    """Integer heights on faces of the doubled graph (its dual vertices)."""

    values: dict    # dual vertex (doubled coords of face center*2... see note)
    base: object


def _dg_faces(dg):
    """Unit squares of the doubled lattice with all four corners present.

    A face is labelled by its lower-left doubled coordinate; its dual
    position is the center (i + 1/2, j + 1/2) in doubled units.
    """
    pts = set(dg.blacks) | set(dg.whites)
    faces = []
    for (i, j) in pts:
        if all(p in pts for p in ((i + 1, j), (i, j + 1), (i + 1, j + 1))):
            faces.append((i, j))
    return faces


def height_function(matching, domain, base=None):
    """Thurston heights of a dimer matching.

    The change along a dual edge with the black vertex of the crossed
    doubled-graph edge on its left is -3 when the crossed edge is matched
    and +1 otherwise.  Heights are path-independent for perfect matchings;
    inconsistencies raise.
    """
    dg = matching.doubled or double_graph(domain)
    matched = {frozenset((w, b)) for w, b in matching.as_dict().items()}
    blackset = set(dg.blacks)
    faces = _dg_faces(dg)
    faceset = set(faces)
    if base is None:
        rb = dg.vertex_black[matching.root] if matching.root else None
        cands = sorted(faces, key=lambda f: ((f[0] - rb[0]) ** 2 +
                                             (f[1] - rb[1]) ** 2, f)) if rb else sorted(faces)
        base = cands[0]
    if base not in faceset:
        raise ValueError("base face is not a face of the doubled graph")

    def crossing(f, g):
        # shared side of adjacent unit squares f, g: the doubled-graph edge
        if g[0] == f[0] + 1:
            return (f[0] + 1, f[1]), (f[0] + 1, f[1] + 1)
        if g[0] == f[0] - 1:
            return (f[0], f[1]), (f[0], f[1] + 1)
        if g[1] == f[1] + 1:
            return (f[0], f[1] + 1), (f[0] + 1, f[1] + 1)
        return (f[0], f[1]), (f[0] + 1, f[1])

    values = {base: 0}
    stack = [base]
    while stack:
        f = stack.pop()
        for df, dj in SQUARE_DIRS:
            g = (f[0] + df, f[1] + dj)
            if g not in faceset:
                continue
            p, q = crossing(f, g)
            b = p if p in blackset else q
            w = q if p in blackset else p
            # direction of travel f->g; black to the left?
            tx, ty = df, dj
            bx, by = b[0] - (f[0] + 0.5), b[1] - (f[1] + 0.5)
            left = (tx * by - ty * bx) > 0
            step = -3 if frozenset((w, b)) in matched else 1
            if not left:
                step = -step
            h = values[f] + step
            if g in values:
                if values[g] != h:
                    raise AssertionError("inconsistent height increments")
            else:
                values[g] = h
                stack.append(g)
    return HeightFunction(values=values, base=base)
