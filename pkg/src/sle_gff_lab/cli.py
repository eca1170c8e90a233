"""Experiment orchestrator: named verification suites and samplers.

Every command emits machine-readable JSON (and CSV artifacts for
experiments) plus a run manifest carrying the command, config hash, seed
tree, package versions, and wall time, so deterministic outputs replay
bit-identically and Monte-Carlo outputs replay on the same seed tree.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, gff, kernels, lattice, linalg, loewner, loops, ust


def _check(name, lhs, rhs, tolerance, extra=None):
    residual = abs(lhs - rhs)
    out = {
        "name": name,
        "lhs": lhs,
        "rhs": rhs,
        "residual": residual,
        "tolerance": tolerance,
        "pass": bool(residual < tolerance),
    }
    if extra:
        out.update(extra)
    return out


def _stat_check(name, value, target, se, extra=None):
    out = {
        "name": name,
        "lhs": value,
        "rhs": target,
        "residual": abs(value - target),
        "tolerance": 3.0 * se,
        "pass": bool(abs(value - target) <= 3.0 * se),
        "se": se,
    }
    if extra:
        out.update(extra)
    return out


# -- verify targets -----------------------------------------------------------


def verify_det_factorization(cfg, rng):
    n = int(cfg.get("instances", 50))
    max_side = int(cfg.get("max_side", 40))
    checks = []
    worst = 0.0
    for _ in range(n):
        w = int(rng.integers(6, max_side + 1))
        h = int(rng.integers(6, max_side + 1))
        dom = lattice.build_square_domain(np.ones((w, h), bool))
        if rng.random() < 0.5:
            col = int(rng.integers(2, w - 2))
            delta = [(col, j) for j in range(h)]
        else:
            row = int(rng.integers(2, h - 2))
            delta = [(i, row) for i in range(w)]
        cut = lattice.split_by_cut(dom, delta)
        lhs, rhs, res = linalg.det_factorization_check(dom, cut)
        worst = max(worst, res)
    checks.append(_check("det-factorization-max-residual", worst, 0.0, 1e-9,
                         {"instances": n}))
    return checks


def _random_loop_instance(rng, max_side=14):
    w = int(rng.integers(7, max_side + 1))
    h = int(rng.integers(7, max_side + 1))
    dom = lattice.build_square_domain(np.ones((w, h), bool))
    cells = [tuple(c) for c in dom.interior]
    rng.shuffle(cells)
    k1 = cells[:3]
    k2 = [c for c in cells[3:]
          if all(abs(c[0] - a[0]) + abs(c[1] - a[1]) > 2 for a in k1)][:3]
    return dom, k1, k2


def verify_loop_mass_routes(cfg, rng):
    n = int(cfg.get("instances", 20))
    checks = []
    worst = 0.0
    tail_ok = True
    for _ in range(n):
        dom, k1, k2 = _random_loop_instance(rng)
        rep = loops.loop_mass_report(dom, k1, k2)
        worst = max(worst, rep.residual_det_fredholm)
        tail_ok &= (abs(rep.series_route - rep.fredholm_route)
                    <= rep.series_tail_bound + 1e-12)
    checks.append(_check("loop-mass-det-vs-fredholm", worst, 0.0, 1e-9,
                         {"instances": n}))
    checks.append({"name": "loop-mass-series-within-tail", "lhs": tail_ok,
                   "rhs": True, "residual": 0.0 if tail_ok else 1.0,
                   "tolerance": 0.5, "pass": bool(tail_ok)})
    return checks


def verify_fredholm_symmetry(cfg, rng):
    dom, k1, k2 = _random_loop_instance(rng)
    km = loops.hm_kernel_matrices(dom, k1, k2)
    t12, t21 = km.t12, km.t21
    d1 = np.linalg.det(np.eye(t12.shape[0]) - t12 @ t21)
    d2 = np.linalg.det(np.eye(t21.shape[0]) - t21 @ t12)
    return [_check("fredholm-symmetry", float(d1), float(d2), 1e-12)]


def verify_pfident_exponents(cfg, rng):
    kappas = np.exp(np.linspace(np.log(0.1), np.log(100.0),
                                int(cfg.get("n_kappa", 50))))
    r1 = max(kernels.exponent_match_check(k)[0] for k in kappas)
    r2 = max(kernels.exponent_match_check(k)[1] for k in kappas)
    return [
        _check("pfident-boundary-exponent", r1, 0.0, 1e-12),
        _check("pfident-determinant-exponent", r2, 0.0, 1e-12),
    ]


def verify_reg_energy(cfg, rng):
    checks = []
    idcfg = kernels.RefConfig(("mobius", kernels.Mobius.identity(), "D"),
                              boundary_points=(1.0 + 0j, -1.0 + 0j))
    e_pair = kernels.reg_dirichlet_energy(idcfg, kernels.ABParams((-1.0,), 1.0))
    e_s1 = kernels.reg_dirichlet_energy(idcfg, kernels.ABParams((-1.0,), 0.5))
    e_s2 = kernels.reg_dirichlet_energy(idcfg, kernels.ABParams((0.0,), 0.5))
    cross = 0.5 * (e_pair - e_s1 - e_s2)
    checks.append(_check("reg-energy-cross-term", cross,
                         float(-np.pi * np.log(2.0)), 1e-4))
    params = kernels.ABParams((0.8,), 0.35)
    nodes = int(cfg.get("nodes", 256))
    levels = tuple(cfg.get("eps_levels", (6, 12)))
    e_ref = kernels.reg_dirichlet_energy(idcfg, params, levels, nodes)
    c_ref = kernels.reg_energy_closed_form(idcfg, params)
    n_cfg = int(cfg.get("instances", 5))
    for i in range(n_cfg):
        th1 = rng.uniform(0, 2 * np.pi)
        th2 = th1 + rng.uniform(1.5, np.pi)
        pole = rng.uniform(1.3, 3.0) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        m = kernels.Mobius(1.0, rng.uniform(-0.3, 0.3), -1.0 / pole, 1.0)
        cfg_i = kernels.RefConfig(("mobius", m, "D"),
                                  boundary_points=(np.exp(1j * th1),
                                                   np.exp(1j * th2)))
        dq = kernels.reg_dirichlet_energy(cfg_i, params, levels, nodes) - e_ref
        dc = kernels.reg_energy_closed_form(cfg_i, params) - c_ref
        rel = abs(dq - dc) / max(abs(dc), 1e-12)
        checks.append({"name": f"reg-energy-closed-form-{i}", "lhs": dq,
                       "rhs": dc, "residual": rel, "tolerance": 1e-3,
                       "pass": bool(rel < 1e-3)})
    return checks


def verify_pa_scaling(cfg, rng):
    checks = []
    base = kernels.zeta_logdet_rectangle(1.0, 1.3)
    for lam in (2.0, 3.0):
        scaled = kernels.zeta_logdet_rectangle(lam, 1.3 * lam)
        checks.append(_check(f"zeta-rectangle-scaling-{lam}",
                             scaled - base, float(-0.5 * np.log(lam)), 1e-4))
    u1 = kernels.zeta_logdet_rectangle(1.0, 1.0, t_split=1.0)
    u2 = kernels.zeta_logdet_rectangle(1.0, 1.0, t_split=0.5)
    checks.append(_check("zeta-rectangle-split-consistency", u1, u2, 1e-6))
    return checks


def verify_semicircle(cfg, rng):
    r = float(cfg.get("r", 0.1))
    est, hcap = loops.semicircle_benchmark(r)
    est_half, _ = loops.semicircle_benchmark(r / 2.0)
    checks = [
        # the paper's stated asymptotic (4t = 2 r^2); see the decisions
        # ledger: two independent routes give 2t = r^2, so this is expected
        # to fail as stated
        {"name": "semicircle-paper-4t", "lhs": est, "rhs": 2.0 * r * r,
         "residual": abs(est - 2 * r * r) / (2 * r * r), "tolerance": 0.10,
         "pass": bool(abs(est - 2 * r * r) / (2 * r * r) < 0.10)},
        {"name": "semicircle-derived-2t", "lhs": est, "rhs": r * r,
         "residual": abs(est - r * r) / (r * r), "tolerance": 0.10,
         "pass": bool(abs(est - r * r) / (r * r) < 0.10)},
        {"name": "semicircle-quarter-ratio", "lhs": est_half / est,
         "rhs": 0.25, "residual": abs(est_half / est - 0.25) / 0.25,
         "tolerance": 0.05,
         "pass": bool(abs(est_half / est - 0.25) / 0.25 < 0.05)},
    ]
    return checks


def verify_moebius_schwarzian(cfg, rng):
    r = float(cfg.get("r", 0.05))
    x = float(cfg.get("x", 0.5))
    rep = loops.moebius_invariance_check(r, x)
    checks = [
        {"name": "moebius-invariance", "lhs": rep["transported"],
         "rhs": rep["direct"], "residual": rep["invariance_residual"],
         "tolerance": 0.10, "pass": bool(rep["invariance_residual"] < 0.10)},
        # paper coefficient 2*hcap*(-S/6): fails by the same factor 2 as the
        # semicircle target (ledgered); the derived coefficient follows
        {"name": "moebius-schwarzian-paper", "lhs": rep["transported"],
         "rhs": rep["paper_prediction"], "residual": rep["prediction_residual"],
         "tolerance": 0.10, "pass": bool(rep["prediction_residual"] < 0.10)},
        {"name": "moebius-schwarzian-derived", "lhs": rep["transported"],
         "rhs": rep["derived_prediction"],
         "residual": rep["derived_residual"], "tolerance": 0.10,
         "pass": bool(rep["derived_residual"] < 0.10)},
    ]
    return checks


def verify_temperley(cfg, rng):
    n_samples = int(cfg.get("samples", 200))
    side = int(cfg.get("side", 8))
    dom = lattice.build_square_domain(np.ones((side, side), bool))
    dg = lattice.double_graph(dom)
    root = dom.boundary[0]
    ok = True
    for _ in range(n_samples):
        tree = ust.wilson_ust(dom, rng, root=root)
        matching = ust.temperley_matching(tree, dom, dg)
        ok &= (ust.matching_to_tree(matching, dom) == tree)
    checks = [{"name": "temperley-round-trip", "lhs": ok, "rhs": True,
               "residual": 0.0 if ok else 1.0, "tolerance": 0.5,
               "pass": bool(ok), "samples": n_samples}]
    # enumerated bijection on the one-vertex domain
    d1 = lattice.build_square_domain([[1]])
    matchings = set()
    for r in d1.boundary:
        t = ust.wilson_ust(d1, rng, root=r)
        matchings.add(ust.temperley_matching(t, d1).pairs)
    checks.append(_check("temperley-enumerated-count", len(matchings), 4, 0.5))
    return checks


def verify_lerw_exit(cfg, rng):
    from scipy import stats as sstats

    side = int(cfg.get("side", 6))
    runs = int(cfg.get("runs", 100_000))
    dom = lattice.build_square_domain(np.ones((side, side), bool))
    y = (side // 2, side // 2)
    hm = ust.harmonic_measure(dom, y, dom.boundary)
    counts = {b: 0 for b in dom.boundary}
    for _ in range(runs):
        counts[ust.lerw_branch(dom, y, rng)[-1]] += 1
    obs = np.array([counts[b] for b in dom.boundary], float)
    exp = np.array([hm[b] for b in dom.boundary]) * runs
    chi2 = float(np.sum((obs - exp) ** 2 / exp))
    dof = len(dom.boundary) - 1
    p = float(sstats.chi2.sf(chi2, dof))
    checks = [{"name": "lerw-exit-harmonic-measure", "lhs": chi2, "rhs": dof,
               "residual": chi2, "tolerance": float("inf"), "p_value": p,
               "pass": bool(p > 0.001), "runs": runs}]
    # Z^LERW Monte-Carlo consistency on the one-vertex domain (exact count)
    d1 = lattice.build_square_domain([[1]])
    x = d1.boundary[0]
    logz = ust.lerw_log_partition(d1, x, (0, 0))
    n1 = int(cfg.get("small_runs", 20_000))
    hits = sum(ust.lerw_branch(d1, (0, 0), rng)[-1] == x for _ in range(n1))
    freq = hits / n1
    se = np.sqrt(freq * (1 - freq) / n1)
    count = linalg.spanning_tree_count(d1)
    checks.append(_stat_check("lerw-partition-mc", freq * count,
                              float(np.exp(logz)), se * count))
    return checks


def verify_martingale(cfg, rng):
    kappas = cfg.get("kappas", (2.0, 8.0 / 3.0, 4.0, 6.0, 8.0))
    n_paths = int(cfg.get("n_paths", 10_000))
    t = float(cfg.get("t", 0.25))
    z = complex(cfg.get("z", 1 + 1j))
    checks = []
    for kappa in kappas:
        rep = loewner.mean_observable_test(kappa, z, t, n_paths, rng)
        checks.append(_stat_check(f"martingale-mean-kappa-{kappa:g}",
                                  rep["mean"], rep["target"], rep["se"]))
    return checks


def verify_exp_martingale(cfg, rng):
    kappas = cfg.get("kappas", (2.0, 8.0 / 3.0, 4.0, 6.0, 8.0))
    n_paths = int(cfg.get("n_paths", 10_000))
    t = float(cfg.get("t", 0.25))
    checks = []
    for kappa in kappas:
        rep = loewner.exp_martingale_test(kappa, [2j], [1.0], t, n_paths, rng)
        checks.append(_stat_check(f"exp-martingale-kappa-{kappa:g}",
                                  rep["mean"], rep["target"], rep["se"]))
    return checks


def _random_coupling_instance(rng, side=7):
    m1 = np.ones((side, side), bool)
    m2 = m1.copy()
    col = side // 2
    left = int(rng.integers(0, col)), int(rng.integers(0, side))
    right = int(rng.integers(col + 1, side)), int(rng.integers(0, side))
    m2[left] = False
    m2[right] = False
    doms, delta = gff.make_hybrid_domains(m1, m2, col)
    alpha = float(rng.uniform(-0.5, 0.5))
    beta = float(rng.uniform(-0.5, 0.5))

    def data1(dom):
        return {b: 0.0 for b in dom.boundary}

    def data2(dom):
        return {b: alpha * b[0] + beta * b[1] for b in dom.boundary}

    bnds = {}
    for (i, j), dom in doms.items():
        di = data1(dom) if i == 1 else data2(dom)
        dj = data1(dom) if j == 1 else data2(dom)
        bnds[(i, j)] = {b: (di[b] if b[0] <= col else dj[b])
                        for b in dom.boundary}
    return doms, bnds, delta


def verify_coupling_constant(cfg, rng):
    n = int(cfg.get("instances", 10))
    worst = 0.0
    for _ in range(n):
        doms, bnds, delta = _random_coupling_instance(rng)
        lhs, rhs, res = gff.coupling_constant_check(doms, bnds, delta)
        worst = max(worst, res)
    return [_check("coupling-constant-max-residual", worst, 0.0, 1e-8,
                   {"instances": n})]


def verify_cm_density(cfg, rng):
    checks = []
    lam = 0.7
    val = gff.gaussian_quadratic_integral([[lam]], [0.0], [[1.0]])
    checks.append(_check("gint-1d-exact", val, (1 - lam) ** -0.5, 1e-12))
    n_mc = int(cfg.get("samples", 100_000))
    # Gint MC oracle: random 4x4 instance
    q = _random_spd(rng, 4)
    m_op = _random_sym(rng, 4, scale=0.2)
    m_vec = rng.standard_normal(4) * 0.3
    hs = rng.multivariate_normal(np.zeros(4), q, size=n_mc)
    f = np.exp(0.5 * np.einsum("ij,nj,ni->n", m_op, hs, hs) + hs @ m_vec)
    checks.append(_stat_check("gint-mc", float(f.mean()),
                              gff.gaussian_quadratic_integral(m_op, m_vec, q),
                              float(f.std(ddof=1) / np.sqrt(n_mc))))
    # Cameron-Martin averages to one
    m = rng.standard_normal(4) * 0.5
    dens = np.array([gff.cameron_martin_density(h, m, q) for h in hs[:20000]])
    checks.append(_stat_check("cameron-martin-mean-one", float(dens.mean()),
                              1.0, float(dens.std(ddof=1) / np.sqrt(len(dens)))))
    # RN density on a cut averages to one
    n1 = _random_spd(rng, 4, shift=1.0)
    n2 = _random_spd(rng, 4, shift=1.0)
    ws = rng.multivariate_normal(np.zeros(4), np.linalg.inv(n1), size=n_mc)
    dens = np.array([gff.rn_density_on_cut(w, n1, n2) for w in ws[:20000]])
    checks.append(_stat_check("rn-density-mean-one", float(dens.mean()),
                              1.0, float(dens.std(ddof=1) / np.sqrt(len(dens)))))
    return checks


def _random_spd(rng, n, shift=0.5):
    a = rng.standard_normal((n, n))
    return a @ a.T / n + shift * np.eye(n)


def _random_sym(rng, n, scale=1.0):
    a = rng.standard_normal((n, n)) * scale
    return 0.5 * (a + a.T)


VERIFY_TARGETS = {
    "det-factorization": verify_det_factorization,
    "loop-mass-routes": verify_loop_mass_routes,
    "fredholm-symmetry": verify_fredholm_symmetry,
    "pfident-exponents": verify_pfident_exponents,
    "reg-energy": verify_reg_energy,
    "pa-scaling": verify_pa_scaling,
    "semicircle": verify_semicircle,
    "moebius-schwarzian": verify_moebius_schwarzian,
    "temperley": verify_temperley,
    "lerw-exit": verify_lerw_exit,
    "martingale": verify_martingale,
    "exp-martingale": verify_exp_martingale,
    "coupling-constant": verify_coupling_constant,
    "cm-density": verify_cm_density,
}


# -- experiments ---------------------------------------------------------------


def experiment_sample_gff(cfg, rng, out):
    side = int(cfg.get("side", 16))
    n = int(cfg.get("samples", 4))
    dom = lattice.build_square_domain(np.ones((side, side), bool))
    sampler = gff.FieldSampler(dom)
    rows = []
    for s in range(n):
        sample = sampler.sample(rng)
        for v in dom.interior:
            x, y = dom.positions[v]
            rows.append((s, dom.interior_index(v), x, y, sample.value(v)))
    path = out / "gff_samples.csv"
    _write_csv(path, ("sample", "vertex", "x", "y", "value"), rows)
    return [path]


def experiment_sample_ust(cfg, rng, out):
    side = int(cfg.get("side", 12))
    n = int(cfg.get("samples", 4))
    dom = lattice.build_square_domain(np.ones((side, side), bool))
    rows = []
    for s in range(n):
        tree = ust.wilson_ust(dom, rng)
        for v, p in tree.edges():
            rows.append((s, v[0], v[1], p[0], p[1]))
    path = out / "ust_edges.csv"
    _write_csv(path, ("sample", "child_i", "child_j", "parent_i", "parent_j"),
               rows)
    return [path]


def experiment_run_sle(cfg, rng, out):
    kappa = float(cfg.get("kappa", 4.0))
    total_time = float(cfg.get("T", 1.0))
    n_paths = int(cfg.get("paths", 100))
    dt = float(cfg.get("dt", 1e-3))
    paths = []
    for p in range(n_paths):
        drv = loewner.sample_sle_driver(kappa, total_time, dt, rng)
        paths.append(drv)
    fn = out / "sle_drivers.csv"
    rows = []
    for p, drv in enumerate(paths):
        for t, w in zip(drv.times, drv.values):
            rows.append((p, t, w))
    _write_csv(fn, ("path", "t", "w"), rows)
    return [fn]


def experiment_level_line(cfg, rng, out):
    from .experiments import level_line_driving

    mesh = 1.0 / float(cfg.get("mesh", 64))
    n_paths = int(cfg.get("paths", 2000))
    stats = level_line_driving(mesh=mesh, n_paths=n_paths, rng=rng,
                               progress=int(cfg.get("progress", 0)) or None)
    report = stats.summary()
    report["pass_variance"] = bool(0.85 <= stats.variance_ratio <= 1.15)
    report["pass_normality"] = bool(stats.normality_p > 0.001)
    fn = out / "level_line_report.json"
    fn.write_text(json.dumps(report, indent=2))
    rows = []
    for j, t in enumerate(stats.times):
        for p in range(stats.values.shape[1]):
            rows.append((p, t, stats.values[j, p]))
    _write_csv(out / "level_line_drivers.csv", ("path", "t", "w"), rows)
    return [fn, out / "level_line_drivers.csv"]


def experiment_height_vs_field(cfg, rng, out):
    side = int(cfg.get("side", 10))
    n = int(cfg.get("samples", 200))
    dom = lattice.build_square_domain(np.ones((side, side), bool))
    dg = lattice.double_graph(dom)
    root = dom.boundary[0]
    acc = {}
    for _ in range(n):
        tree = ust.wilson_ust(dom, rng, root=root)
        matching = ust.temperley_matching(tree, dom, dg)
        h = ust.height_function(matching, dom)
        for f, val in h.values.items():
            acc.setdefault(f, []).append(val)
    fact = linalg.laplacian(dom)
    rows = []
    for f, vals in sorted(acc.items()):
        vals = np.array(vals, float)
        rows.append((f[0], f[1], vals.mean(), vals.var(ddof=1), len(vals)))
    fn = out / "height_stats.csv"
    _write_csv(fn, ("face_i2", "face_j2", "mean", "var", "n"), rows)
    # Green diagonal reference for the field comparison
    g_rows = []
    for v in dom.interior:
        e = np.zeros(fact.n)
        e[dom.interior_index(v)] = 1.0
        g_rows.append((v[0], v[1], float(fact.solve(e)[dom.interior_index(v)])))
    _write_csv(out / "green_diagonal.csv", ("i", "j", "g_vv"), g_rows)
    return [fn, out / "green_diagonal.csv"]


EXPERIMENTS = {
    "sample-gff": experiment_sample_gff,
    "sample-ust": experiment_sample_ust,
    "run-sle": experiment_run_sle,
    "level-line-driving": experiment_level_line,
    "height-vs-field": experiment_height_vs_field,
}


# -- plumbing ------------------------------------------------------------------


def _write_csv(path, header, rows):
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _manifest(command, cfg, seed, t0, workers=1):
    import platform
    import scipy

    blob = json.dumps(cfg, sort_keys=True, default=str).encode()
    ss = np.random.SeedSequence(seed)
    children = ss.spawn(workers)
    return {
        "command": command,
        "config_hash": hashlib.sha256(blob).hexdigest(),
        "config": cfg,
        "master_seed": seed,
        "worker_seeds": [list(map(int, c.entropy if isinstance(c.entropy, (list, tuple)) else [c.entropy])) + list(c.spawn_key) for c in children],
        "versions": {
            "package": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
        "wall_time_s": round(time.time() - t0, 3),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="sle-gff-lab",
        description="verification suites and experiments for SLE/free-field "
                    "identities")
    sub = parser.add_subparsers(dest="mode")
    p_verify = sub.add_parser("verify", help="run a named identity check")
    p_verify.add_argument("name", help="|".join(sorted(VERIFY_TARGETS)))
    p_exp = sub.add_parser("experiment", help="run a named experiment")
    p_exp.add_argument("name", help="|".join(sorted(EXPERIMENTS)))
    for p in (p_verify, p_exp):
        p.add_argument("--config", type=Path, default=None,
                       help="JSON config file")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", type=Path, default=Path("."))
        p.add_argument("--set", action="append", default=[],
                       metavar="KEY=VALUE", help="config override")
    args = parser.parse_args(argv)
    if args.mode is None:
        parser.print_usage()
        return 2

    cfg = {}
    if args.config:
        cfg = json.loads(args.config.read_text())
    for item in args.set:
        key, _, value = item.partition("=")
        try:
            cfg[key] = json.loads(value)
        except json.JSONDecodeError:
            cfg[key] = value

    t0 = time.time()
    rng = np.random.default_rng(np.random.SeedSequence(args.seed))
    args.out.mkdir(parents=True, exist_ok=True)

    if args.mode == "verify":
        fn = VERIFY_TARGETS.get(args.name)
        if fn is None:
            print(f"unknown verify target {args.name!r}; choose from: "
                  + ", ".join(sorted(VERIFY_TARGETS)), file=sys.stderr)
            return 2
        checks = fn(cfg, rng)
        report = {
            "name": args.name,
            "checks": checks,
            "pass": all(c["pass"] for c in checks),
            "manifest": _manifest(f"verify {args.name}", cfg, args.seed, t0),
        }
        print(json.dumps(report, indent=2, default=str))
        return 0 if report["pass"] else 1

    fn = EXPERIMENTS.get(args.name)
    if fn is None:
        print(f"unknown experiment {args.name!r}; choose from: "
              + ", ".join(sorted(EXPERIMENTS)), file=sys.stderr)
        return 2
    artifacts = fn(cfg, rng, args.out)
    manifest = _manifest(f"experiment {args.name}", cfg, args.seed, t0)
    manifest["artifacts"] = [str(a) for a in artifacts]
    mpath = args.out / f"{args.name}-manifest.json"
    mpath.write_text(json.dumps(manifest, indent=2, default=str))
    print(json.dumps(manifest, indent=2, default=str))
    return 0


if __name__ == "__main__":
    sys.exit(main())
