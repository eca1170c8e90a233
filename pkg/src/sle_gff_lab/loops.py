"""Random-walk loop-measure masses and their determinant expressions.

The mass of loops hitting two disjoint sets is computed three independent
ways on lattice domains (Laplacian determinant ratio, Fredholm determinant
of hitting kernels, truncated trace series) and checked against the
continuum small-hull asymptotic on the half-plane semicircle geometry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg


@dataclass
class KernelMatrix:
    """Hitting (harmonic-measure) kernels between two sets.

    t12[x, y] = P(walk from x in D minus K1 hits K1 at y before the
    boundary), rows indexed by K2; t21 likewise with roles swapped.
    """

    k1: list
    k2: list
    t12: np.ndarray   # shape (|K2|, |K1|)
    t21: np.ndarray   # shape (|K1|, |K2|)

    @property
    def submarkov_gap(self):
        """p > 0 such that both kernels have row sums <= 1 - p."""
        q = max(self.t12.sum(axis=1).max(), self.t21.sum(axis=1).max())
        return 1.0 - q


@dataclass
class LoopMassReport:
    det_route: float
    fredholm_route: float
    series_route: float
    series_tail_bound: float
    residual_det_fredholm: float

    def agrees(self, tol=1e-9):
        # the tail bound is exact arithmetic; allow roundoff on top of it
        return (self.residual_det_fredholm < tol
                and abs(self.series_route - self.fredholm_route)
                <= self.series_tail_bound + 1e-12)


def loop_mass_det(domain, k1, k2):
    """Loop mass via the four-determinant ratio (exact identity).

    m = log det(L without K1) + log det(L without K2)
      - log det(L) - log det(L without K1 and K2),
    empty interiors contributing det = 1.
    """
    k1, k2 = list(k1), list(k2)
    if set(k1) & set(k2):
        raise ValueError("K1 and K2 must be disjoint")

    def ld(excluded):
        rest = [v for v in domain.interior if v not in excluded]
        if not rest:
            return 0.0
        return linalg.laplacian(domain, rest).logdet

    return (ld(set(k1)) + ld(set(k2)) - ld(set()) - ld(set(k1) | set(k2)))


def hm_kernel_matrices(domain, k1, k2):
    """Discrete hitting kernels between K1 and K2 (absorbing walk solves)."""
    k1, k2 = list(k1), list(k2)
    if set(k1) & set(k2):
        raise ValueError("K1 and K2 must be disjoint")

    def hitting(targets, sources):
        rest = [v for v in domain.interior if v not in set(targets)]
        a, verts = linalg.laplacian_matrix(domain, rest)
        fact = linalg.factor_spd(a)
        index = {v: i for i, v in enumerate(verts)}
        out = np.zeros((len(sources), len(targets)))
        for j, y in enumerate(targets):
            rhs = np.zeros(len(verts))
            for v in domain.neighbors(y):
                i = index.get(v)
                if i is not None:
                    rhs[i] += 1.0
            sol = fact.solve(rhs)
            for s, x in enumerate(sources):
                out[s, j] = sol[index[x]]
        return out

    t12 = hitting(k1, k2)
    t21 = hitting(k2, k1)
    return KernelMatrix(k1=k1, k2=k2, t12=t12, t21=t21)


def fredholm_route(t12, t21):
    """-log det(1 - T12 T21) by dense factorization."""
    t = np.asarray(t12) @ np.asarray(t21)
    sign, logdet = np.linalg.slogdet(np.eye(t.shape[0]) - t)
    if sign <= 0:
        raise ValueError("1 - T12 T21 is not positive")
    return -float(logdet)


def series_route(t12, t21, n_max=40):
    """Trace series sum over n of Tr((T12 T21)^n)/n with a geometric tail bound.

    The bound uses the measured sub-Markov row sums q = q12 * q21:
    Tr((T12 T21)^n) <= rank * q^n.
    """
    t12 = np.asarray(t12)
    t21 = np.asarray(t21)
    t = t12 @ t21
    q = float(t12.sum(axis=1).max() * t21.sum(axis=1).max())
    if q >= 1.0:
        raise ValueError("kernels are not strictly sub-Markov")
    total = 0.0
    power = t
    for n in range(1, n_max + 1):
        total += np.trace(power) / n
        power = power @ t
    r = min(t12.shape[0], t12.shape[1])
    tail = r * q ** (n_max + 1) / ((n_max + 1) * (1.0 - q))
    return float(total), float(tail)


def loop_mass_report(domain, k1, k2, n_max=40):
    """All three routes plus agreement residuals."""
    det_m = loop_mass_det(domain, k1, k2)
    km = hm_kernel_matrices(domain, k1, k2)
    fred = fredholm_route(km.t12, km.t21)
    ser, tail = series_route(km.t12, km.t21, n_max)
    return LoopMassReport(
        det_route=det_m,
        fredholm_route=fred,
        series_route=ser,
        series_tail_bound=tail,
        residual_det_fredholm=abs(det_m - fred),
    )


# -- continuum semicircle benchmark -----------------------------------------


def _halfplane_kernels(r, n1, n2, center=0.0):
    """Nystrom kernels for K1 = half-disk (radius r at `center` on R) and
    K2 = the unit semicircle, in the upper half-plane.

    T21 (from K1 points to K2) uses the reflected-disk harmonic measure
    Harm(z, y) = (1/2pi) Re((y+z)/(y-z)) minus its mirror; T12 (from K2 to
    the half-disk boundary) maps through w = (z-c) + r^2/(z-c) + c, under
    which the arc becomes the segment [c-2r, c+2r] carrying the half-plane
    Poisson density.
    """
    th = (np.arange(n2) + 0.5) * np.pi / n2          # K2 nodes e^{i th}
    w2 = np.pi / n2                                   # arclength weights
    al = (np.arange(n1) + 0.5) * np.pi / n1          # K1 nodes c + r e^{i al}
    w1 = np.pi / n1 * r

    y = np.exp(1j * th)
    x = center + r * np.exp(1j * al)

    # T21[x, y]: harmonic measure density of the unit semicircle seen from x
    zz = x[:, None]
    yy = y[None, :]
    harm = (np.real((yy + zz) / (yy - zz)) -
            np.real((yy + np.conj(zz)) / (yy - np.conj(zz)))) / (2 * np.pi)
    t21 = harm * w2

    # T12[y, x]: hitting density of the half-disk boundary seen from y in
    # H minus K1; in the flattened coordinate u = 2 r cos(al) + c the
    # density is the Poisson kernel (1/pi) Im psi / |psi - u|^2 with
    # du = 2 r |sin al| dal
    psi = (y - center) + r * r / (y - center) + center
    u = center + 2.0 * r * np.cos(al)
    du = 2.0 * r * np.abs(np.sin(al)) * (np.pi / n1)
    t12 = (np.imag(psi)[:, None] / np.abs(psi[:, None] - u[None, :]) ** 2
           / np.pi) * du[None, :]
    return t12, t21, w1, w2


def semicircle_benchmark(r, center=0.0, n=None, rtol=0.01):
    """Continuum Fredholm estimate of the loop mass m(H; K1, K2).

    K1 is the half-disk of radius r at ``center``, K2 the unit semicircle;
    the half-plane capacity of K1 is r^2.  The node count doubles until the
    value moves by less than ``rtol`` relatively.  Returns (estimate, hcap).
    """
    if r > 0.3 and center == 0.0:
        import warnings

        warnings.warn("r beyond the small-hull regime; the capacity "
                      "asymptotic degrades")
    n = n or 64
    prev = None
    for _ in range(8):
        t12, t21, _, _ = _halfplane_kernels(r, n, n, center)
        val = fredholm_route(t12, t21)
        if prev is not None and abs(val - prev) <= rtol * abs(prev):
            return val, r * r
        prev = val
        n *= 2
    return prev, r * r


def moebius_invariance_check(r, x, n=None):
    """Invariance of the loop mass under z -> (1 - x z)/(x - z), plus the
    Schwarzian form of the image capacity.

    The map fixes the unit semicircle and sends the half-disk at 0 to
    (approximately, for small r) the half-disk at 1/x with radius
    r (1/x^2 - 1).  Returns a dict with the direct mass, transported mass,
    and the capacity-Schwarzian prediction for the transported geometry.
    """
    from .kernels import schwarzian

    direct, hcap = semicircle_benchmark(r, 0.0, n)
    c = 1.0 / x
    r_img = r * (1.0 / x ** 2 - 1.0)
    transported, hcap_img = semicircle_benchmark(r_img, c, n)
    s = schwarzian("joukowski", c)
    prediction = 2.0 * hcap_img * float(np.real(-s / 6.0))
    return {
        "direct": direct,
        "transported": transported,
        "paper_prediction": prediction,
        "hcap_image": hcap_img,
        "invariance_residual": abs(transported - direct) / abs(direct),
        "prediction_residual": abs(transported - prediction) / abs(prediction),
    }
