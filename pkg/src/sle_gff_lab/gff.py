"""Discrete Gaussian free field on lattice domains.

Boundary data, sampling, partition functions, the Markov decomposition
across a cut, finite-dimensional Gaussian density formulas, and the
triangular-lattice level-line interface.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from . import linalg
from .lattice import TRI_DIRS, split_by_cut


# -- boundary conditions -------------------------------------------------


@dataclass
class ABBoundary:
    """Resolved (a, b) boundary data.

    Jumps of pi*a_i sit at the marked points x_i, the balancing jump
    -pi*sum(a) - 2*pi*b at y, and between marked points the data increases
    by b times the exterior turning angle.  Marked vertices carry the mean
    of their one-sided limits.
    """

    a: tuple
    b: float
    x_points: tuple
    y_point: object
    anchor: object
    values: dict


def ab_boundary_values(domain, x_points, y, a, b, anchor=None):
    """Resolve (a, b) boundary conditions to per-vertex values."""
    x_points = list(x_points)
    a = list(a)
    if len(a) != len(x_points):
        raise ValueError("need one jump coefficient per marked point")
    cyc = domain.boundary_order
    if not cyc:
        raise ValueError("domain has no traced boundary cycle")
    marked = set(x_points) | {y}
    for p in marked:
        if p not in cyc:
            raise ValueError(f"marked point {p} is not a boundary vertex")
    if anchor is not None and anchor in marked:
        raise ValueError("anchor must be distinct from the jump points")

    jump = {x: np.pi * ai for x, ai in zip(x_points, a)}
    jump[y] = jump.get(y, 0.0) - np.pi * sum(a) - 2.0 * np.pi * b

    n = len(cyc)
    pos = [np.asarray(domain.positions[v], float) for v in cyc]

    def turn(k):
        p0, p1, p2 = pos[(k - 1) % n], pos[k], pos[(k + 1) % n]
        u, v = p1 - p0, p2 - p1
        return float(np.arctan2(u[0] * v[1] - u[1] * v[0], u[0] * v[0] + u[1] * v[1]))

    values = {}
    acc = 0.0
    start = cyc.index(anchor) if anchor is not None else 0
    for s in range(n + 1):
        k = (start + s) % n
        v = cyc[k]
        if s > 0:
            # walking past the corner at the previous vertex
            acc += b * turn((k - 1) % n)
        j = jump.get(v, 0.0)
        if s < n:
            values[v] = acc + 0.5 * j  # mean of one-sided limits at a jump
        acc += j
    if anchor is not None:
        off = values[anchor]
        values = {v: val - off for v, val in values.items()}
    for v in domain.boundary:
        values.setdefault(v, 0.0)  # interior-hole boundaries: Dirichlet zero
    return ABBoundary(tuple(a), float(b), tuple(x_points), y, anchor, values)


def two_arc_boundary(domain, x, y, lam):
    """Piecewise-constant two-arc data: +lam on the ccw arc [x, y), -lam on
    [y, x).  The sign jumps at x and y themselves (no zero values)."""
    cyc = domain.boundary_order
    if x not in cyc or y not in cyc:
        raise ValueError("arc endpoints must be boundary vertices")
    i0, i1 = cyc.index(x), cyc.index(y)
    n = len(cyc)
    values = {}
    for s in range(n):
        k = (i0 + s) % n
        values[cyc[k]] = lam if (i1 - i0) % n > s else -lam
    return ABBoundary((2.0 * lam / np.pi,), 0.0, (x,), y, None, values)


def boundary_values(domain, boundary):
    if isinstance(boundary, ABBoundary):
        return boundary.values
    if boundary is None:
        return {v: 0.0 for v in domain.boundary}
    if not isinstance(boundary, dict):
        return dict(zip(domain.boundary, np.asarray(boundary, float)))
    return boundary


# -- sampling ------------------------------------------------------------


@dataclass
class FieldSample:
    domain: object
    interior_values: np.ndarray  # aligned with domain.interior
    boundary: dict               # boundary vertex -> value
    mean: dict                   # all vertices -> harmonic mean

    def value(self, v):
        if self.domain.is_interior(v):
            return float(self.interior_values[self.domain.interior_index(v)])
        return float(self.boundary[v])

    def as_dict(self):
        out = dict(self.boundary)
        for v in self.domain.interior:
            out[v] = float(self.interior_values[self.domain.interior_index(v)])
        return out


class FieldSampler:
    """Shared factorization for repeated GFF draws on one domain."""

    def __init__(self, domain, boundary=None):
        self.domain = domain
        self.bvals = boundary_values(domain, boundary)
        self.fact = linalg.laplacian(domain)
        self.mean = linalg.harmonic_extension(domain, self.bvals, fact=self.fact)
        self._mean_vec = np.array([self.mean[v] for v in domain.interior])
        self._bw = self.fact.chol_banded.shape[0] - 1

    def fluctuation(self, rng):
        """Zero-boundary fluctuation with covariance Laplacian^-1."""
        xi = rng.standard_normal(self.fact.n)
        return sla.solve_banded((0, self._bw), self.fact.chol_banded, xi)

    def sample(self, rng):
        vals = self._mean_vec + self.fluctuation(rng)
        return FieldSample(self.domain, vals, dict(self.bvals), self.mean)


def sample_gff(domain, boundary, rng):
    """One field realization; use FieldSampler directly for ensembles."""
    return FieldSampler(domain, boundary).sample(rng)


def log_partition_fn(domain, boundary=None):
    """log Z = -1/2 logdet(Laplacian) - 1/2 * Dirichlet energy of the mean."""
    sampler = FieldSampler(domain, boundary)
    energy = linalg.dirichlet_energy(domain, sampler.mean)
    return -0.5 * sampler.fact.logdet - 0.5 * energy


# -- Markov decomposition across a cut ------------------------------------


@dataclass
class MarkovDecomposition:
    cut: object
    trace: dict   # delta vertex -> field value
    pw: dict      # all vertices -> two-sided harmonic extension of the trace
    parts: list   # per component: dict over that component's vertices

    @property
    def phi_l(self):
        return self.parts[0]

    @property
    def phi_r(self):
        return self.parts[1]


def markov_decompose(sample, cut):
    """Split a field into independent pieces across a cut.

    pw extends the trace harmonically into every component (zero outer
    boundary); the remainders are supported on single components.  The
    reconstruction pw + sum(parts) equals the field exactly on interior
    vertices (for zero outer boundary data it is the full field).
    """
    domain = sample.domain
    delta = cut.delta
    w = {v: sample.value(v) for v in delta}
    pw = {v: 0.0 for v in domain.boundary}
    pw.update(w)
    rest = [v for comp in cut.components for v in comp]
    if rest:
        a, verts = linalg.laplacian_matrix(domain, rest)
        fact = linalg.factor_spd(a)
        rhs = np.zeros(len(verts))
        index = {v: i for i, v in enumerate(verts)}
        for v in verts:
            for u in domain.neighbors(v):
                if u in w:
                    rhs[index[v]] += w[u]
        ext = fact.solve(rhs)
        pw.update({v: float(ext[index[v]]) for v in verts})
    parts = []
    for comp in cut.components:
        parts.append({v: sample.value(v) - pw[v] for v in comp})
    return MarkovDecomposition(cut=cut, trace=w, pw=pw, parts=parts)


# -- Gaussian density formulas --------------------------------------------


def _sym_sqrt(q):
    vals, vecs = np.linalg.eigh(np.asarray(q, float))
    if np.any(vals <= 0):
        raise ValueError("covariance must be positive definite")
    return (vecs * np.sqrt(vals)) @ vecs.T


def log_gaussian_quadratic_integral(m_op, m_vec, q):
    """log of E[exp(<M h, h>/2 + <m, h>)] under N(0, Q).

    Closed form with determinant exponent -1/2 (the one the scalar oracle
    int exp(l h^2/2) dN(h) = (1-l)^(-1/2) fixes).  Requires the spectral
    radius of Q^(1/2) M Q^(1/2) to be below one.
    """
    q = np.asarray(q, float)
    m_op = np.asarray(m_op, float)
    m_vec = np.asarray(m_vec, float)
    qh = _sym_sqrt(q)
    s = qh @ m_op @ qh
    s = 0.5 * (s + s.T)
    eig = np.linalg.eigvalsh(s)
    if eig.max() >= 1.0:
        raise ValueError("spectral condition violated: Q^1/2 M Q^1/2 has an "
                         f"eigenvalue {eig.max():.6g} >= 1")
    i_s = np.eye(len(s)) - s
    logdet = np.linalg.slogdet(i_s)[1]
    v = np.linalg.solve(_sym_sqrt(i_s), qh @ m_vec)
    return -0.5 * logdet + 0.5 * float(v @ v)


def gaussian_quadratic_integral(m_op, m_vec, q):
    return float(np.exp(log_gaussian_quadratic_integral(m_op, m_vec, q)))


def cameron_martin_density(h, m, q):
    """dN(m,Q)/dN(0,Q) at h (finite dimension: exp(<m,h>_Q - |m|_Q^2/2))."""
    q = np.asarray(q, float)
    h = np.asarray(h, float)
    m = np.asarray(m, float)
    qm = np.linalg.solve(q, m)
    return float(np.exp(qm @ h - 0.5 * qm @ m))


def rn_density_on_cut(w, n1, n2):
    """Density of the trace law with jump operator N2 against that of N1.

    Traces are centered Gaussians with covariance N^-1, so the value is
    (det N2 / det N1)^(1/2) exp(<w, (N1 - N2) w>/2); it averages to one
    under N(0, N1^-1).
    """
    n1 = np.asarray(n1, float)
    n2 = np.asarray(n2, float)
    if n1.shape != n2.shape:
        raise ValueError("jump operators must have equal size")
    w = np.asarray(w, float)
    ld1 = linalg.logdet_dense(n1)
    ld2 = linalg.logdet_dense(n2)
    return float(np.exp(0.5 * (ld2 - ld1) + 0.5 * w @ (n1 - n2) @ w))


# -- coupling-constant identity -------------------------------------------


def coupling_constant_check(domains, boundaries, delta):
    """Exact Gaussian identity across four hybrid domains sharing a cut.

    ``domains``/``boundaries``: dicts keyed by (i, j) in {1, 2}^2, where
    domain (i, j) agrees with (i, 1)/(i, 2) left of the cut and with
    (1, j)/(2, j) right of it.  Returns (log_lhs, log_rhs, residual): lhs is
    the closed-form Gaussian integral of the product of trace densities,
    rhs the partition-function ratio Z11*Z22/(Z12*Z21).
    """
    keys = [(1, 1), (1, 2), (2, 1), (2, 2)]
    if set(domains) != set(keys):
        raise ValueError("need the four hybrid domains keyed (1,1),(1,2),(2,1),(2,2)")
    stats = {}
    for k in keys:
        dom = domains[k]
        cut = split_by_cut(dom, delta, allow_multi=True)
        if list(cut.delta) != list(delta):
            raise ValueError("cut mismatch across the hybrid domains")
        sampler = FieldSampler(dom, boundaries[k])
        n_mat = linalg.neumann_jump(dom, cut)
        m_delta = np.array([sampler.mean[v] for v in delta])
        logz = (-0.5 * sampler.fact.logdet
                - 0.5 * linalg.dirichlet_energy(dom, sampler.mean))
        stats[k] = (n_mat, m_delta, logz)
    n11, m11, z11 = stats[(1, 1)]
    n12, m12, z12 = stats[(1, 2)]
    n21, m21, z21 = stats[(2, 1)]
    n22, m22, z22 = stats[(2, 2)]

    d21 = m21 - m11
    d12 = m12 - m11
    m_op = 2.0 * n11 - n21 - n12          # equals N11 - N22 by side additivity
    v = n21 @ d21 + n12 @ d12
    const = -0.5 * (d21 @ n21 @ d21 + d12 @ n12 @ d12)
    q = np.linalg.inv(n11)
    log_lhs = (0.5 * (linalg.logdet_dense(n21) + linalg.logdet_dense(n12))
               - linalg.logdet_dense(n11) + const
               + log_gaussian_quadratic_integral(m_op, v, q))
    log_rhs = z11 + z22 - z12 - z21
    return log_lhs, log_rhs, abs(log_lhs - log_rhs)


def make_hybrid_domains(mask1, mask2, col, mesh=1.0):
    """Build the four hybrid square domains gluing mask1/mask2 at a column.

    The two masks must agree on the cut column ``col``; hybrid (i, j) takes
    mask_i strictly left of the column and mask_j strictly right of it.
    Returns (domains dict, delta list).
    """
    from .lattice import build_square_domain

    m1 = np.asarray(mask1, bool)
    m2 = np.asarray(mask2, bool)
    if m1.shape != m2.shape or not np.array_equal(m1[col, :], m2[col, :]):
        raise ValueError("masks must share shape and agree on the cut column")
    doms = {}
    for i, j in [(1, 1), (1, 2), (2, 1), (2, 2)]:
        m = (m1 if i == 1 else m2).copy()
        m[col + 1:, :] = (m1 if j == 1 else m2)[col + 1:, :]
        doms[(i, j)] = build_square_domain(m, mesh)
    delta = [(col, int(r)) for r in np.nonzero(m1[col, :])[0]]
    return doms, delta


# -- level-line interface (triangular lattice) ------------------------------


def _sign(value):
    if value > 0:
        return 1
    if value < 0:
        return -1
    warnings.warn("zero field value on the interface walk; perturbing to +0")
    return 1


def zero_level_interface(sample, x, y):
    """Sign-cluster interface of a triangular-lattice field sample.

    Boundary data must be two-arc (+lam on the ccw arc [x, y), -lam on
    [y, x)); the interface runs on the hexagonal dual from the sign change
    at x to the sign change at y, keeping positive vertices on its left.
    Returns the polyline of crossed-edge midpoints (numpy array, mesh units).
    """
    domain = sample.domain
    if domain.kind != "triangular":
        raise ValueError("level lines are implemented on the triangular lattice")
    cyc = domain.boundary_order
    i0 = cyc.index(x)
    prev = cyc[(i0 - 1) % len(cyc)]
    sgn = {v: _sign(sample.value(v)) for v in domain.interior}
    for v, val in sample.boundary.items():
        sgn[v] = _sign(val)
    if sgn[x] <= 0 or sgn[prev] >= 0:
        raise ValueError("boundary data is not two-arc around the start point")

    diff = (x[0] - prev[0], x[1] - prev[1])
    if diff not in TRI_DIRS:
        raise ValueError("arc junction vertices are not lattice-adjacent")

    known = set(domain.interior) | set(domain.boundary)

    def common_neighbors(u, v):
        k = TRI_DIRS.index((v[0] - u[0], v[1] - u[1]))
        out = []
        for kk in (k + 1, k - 1):
            d = TRI_DIRS[kk % 6]
            out.append((u[0] + d[0], u[1] + d[1]))
        return out

    apexes = [w for w in common_neighbors(x, prev) if domain.is_interior(w)]
    if len(apexes) != 1:
        raise ValueError("ambiguous entry triangle at the start junction")

    def midpoint(u, v):
        pu, pv = domain.positions[u], domain.positions[v]
        return (0.5 * (pu[0] + pv[0]), 0.5 * (pu[1] + pv[1]))

    l, r, apex = x, prev, apexes[0]
    points = [midpoint(l, r)]
    visited = set()
    limit = 20 * len(known)
    for _ in range(limit):
        state = (l, r, apex)
        if state in visited:
            raise RuntimeError("interface walk revisited a state")
        visited.add(state)
        if sgn[apex] > 0:
            l, r, old = apex, r, l
        else:
            l, r, old = l, apex, r
        points.append(midpoint(l, r))
        if not domain.is_interior(l) and not domain.is_interior(r):
            return np.array(points) * domain.mesh
        apex = (l[0] + r[0] - old[0], l[1] + r[1] - old[1])
        if apex not in known:
            raise RuntimeError("interface walk left the domain unexpectedly")
    raise RuntimeError("interface walk did not terminate")


def interface_passes_below(points, point):
    """True when the polyline separates ``point`` from the region below it
    (ray-cast straight down, odd crossing parity)."""
    px, py = point
    eps = 1e-9
    cross = 0
    for (x1, y1), (x2, y2) in zip(points[:-1], points[1:]):
        a, b = x1 - px, x2 - px
        if a == 0.0:
            a = eps
        if b == 0.0:
            b = eps
        if a * b < 0:
            t = a / (a - b)
            yc = y1 + t * (y2 - y1)
            if yc < py:
                cross += 1
    return cross % 2 == 1
