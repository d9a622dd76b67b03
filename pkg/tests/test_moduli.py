import math

import numpy as np
import pytest

from conftest import random_dist
from momentmoduli.constructions import (
    make_bipartite,
    make_disjoint_bernoulli,
    make_eps_atom,
    make_fn,
    make_jensen,
    make_schatten_parallelogram,
    make_two_point,
)
from momentmoduli.distributions import Config, FiniteDist, cross_moment
from momentmoduli.moduli import (
    DegenerateRatioError,
    all_reports,
    barycenter_objective,
    barycenter_ratio,
    jensen_ratio,
    log_roundness_report,
    metric_barycenter_ratio,
    minimize_barycenter,
    mixture_ratio,
    roundness_ratio,
)
from momentmoduli.spaces import (
    INF,
    CVector,
    RealLine,
    Schatten,
    CMatrix,
    WeightedLq,
)

RL = RealLine()


# ---------------------------------------------------------------- roundness

def test_roundness_disjoint_bernoulli_example():
    nc = make_disjoint_bernoulli(8, 3.0, 3.0)
    rep = roundness_ratio(nc.config)
    assert rep.value == pytest.approx(3.5, rel=1e-12)
    assert rep.bound == pytest.approx(4.0)  # 2^C(3,3)


def test_roundness_identical_laws_is_two():
    x = random_dist(RL, np.random.default_rng(0), 3)
    rep = roundness_ratio(Config(RL, x, x, 2.0))
    assert rep.value == pytest.approx(2.0, rel=1e-12)


def test_roundness_schatten_parallelogram_example():
    nc = make_schatten_parallelogram(16, 1.0)
    assert roundness_ratio(nc.config).value == pytest.approx(
        (15 / 16) * 2 ** 1.5, rel=1e-12)


def test_roundness_degenerate_denominator_carries_moments():
    d = FiniteDist.delta(RL, 1.0)
    with pytest.raises(DegenerateRatioError) as e:
        roundness_ratio(Config(RL, d, d, 1.0))
    assert e.value.denominator == 0.0


def test_roundness_trivial_bound(rng):
    for _ in range(100):
        x = random_dist(RL, rng, int(rng.integers(1, 4)))
        y = random_dist(RL, rng, int(rng.integers(1, 4)))
        p = float(rng.uniform(1.0, 4.0))
        try:
            rep = roundness_ratio(Config(RL, x, y, p))
        except DegenerateRatioError:
            continue
        assert rep.value <= 2.0 ** (p + 1.0) + 1e-9


def test_roundness_scalar_nonconvex_range(rng):
    # on the real line with p in (0, 2] the ratio never exceeds 2
    for _ in range(200):
        x = random_dist(RL, rng, int(rng.integers(1, 4)))
        y = random_dist(RL, rng, int(rng.integers(1, 4)))
        p = float(rng.uniform(0.1, 2.0))
        try:
            rep = roundness_ratio(Config(RL, x, y, p))
        except DegenerateRatioError:
            continue
        assert rep.value <= 2.0 + 1e-9


def test_roundness_bounded_in_all_five_exponent_ranges():
    # the proven exponent bounds the ratio in every range, including the two
    # ranges the acceptance sweep skips
    from momentmoduli.constants import C_exponent

    def sample(rng, which):
        if which == 1:
            p = float(rng.uniform(2.0, 5.0))
            return p, float(rng.uniform(p / (p - 1.0), p))
        if which == 2:
            q = float(rng.uniform(2.0, 5.0))
            return float(rng.uniform(q / (q - 1.0), q)), q
        if which == 3:
            q = float(rng.uniform(2.0, 5.0))
            return float(rng.uniform(1.0, q / (q - 1.0))), q
        if which == 4:
            q = float(rng.uniform(1.05, 2.0))
            return float(rng.uniform(q, min(q / (q - 1.0), 6.0))), q
        p = float(rng.uniform(1.0, 2.0))
        return p, float(rng.uniform(p, 2.0))

    for which in (1, 2, 3, 4, 5):
        rng = np.random.default_rng([99, which])
        for _ in range(200):
            p, q = sample(rng, which)
            sp = WeightedLq(q)
            x = random_dist(sp, rng, int(rng.integers(2, 5)), dim=3)
            y = random_dist(sp, rng, int(rng.integers(2, 5)), dim=3)
            try:
                value = roundness_ratio(Config(sp, x, y, p)).value
            except DegenerateRatioError:
                continue
            assert value <= 2.0 ** C_exponent(p, q) + 1e-7, (which, p, q, value)


def test_snowflake_transfer_identity(rng):
    from momentmoduli.spaces import Snowflake
    base = WeightedLq(3.0)
    alpha = 0.6
    snow = Snowflake(base, alpha)
    x = random_dist(base, rng, 3, dim=3)
    y = random_dist(base, rng, 2, dim=3)
    xs = FiniteDist(snow, x.atoms, x.probs)
    ys = FiniteDist(snow, y.atoms, y.probs)
    p = 2.2
    v1 = roundness_ratio(Config(snow, xs, ys, p)).value
    v2 = roundness_ratio(Config(base, x, y, alpha * p)).value
    assert v1 == v2  # bitwise: the exponent is fused into one power call


# ---------------------------------------------------------------- jensen

def test_jensen_two_point_powers():
    u = FiniteDist.uniform(RL, [-1.0, 1.0])
    for p in (1.0, 2.0, 3.0):
        assert jensen_ratio(u, p).value == pytest.approx(2.0 ** (p - 1.0), rel=1e-12)


def test_jensen_basis_and_rademacher_examples():
    basis = make_jensen("basis", p=2.0, n=10, q=2.0)
    assert jensen_ratio(basis.config.X, 2.0).value == pytest.approx(2.0, rel=1e-12)
    rad = make_jensen("rademacher", p=3.0, n=10, q=3.0)
    assert jensen_ratio(rad.config.X, 3.0).value == pytest.approx(4.0, rel=1e-12)


def test_jensen_rejects_constant_and_small_p():
    with pytest.raises(DegenerateRatioError):
        jensen_ratio(FiniteDist.delta(RL, 1.0), 2.0)
    with pytest.raises(ValueError):
        jensen_ratio(FiniteDist.uniform(RL, [0.0, 1.0]), 0.5)


def test_jensen_lower_bound_on_lq(rng):
    # every distribution's ratio sits above the sharp Jensen constant
    for q in (1.0, 1.5, 2.0, 3.0):
        sp = WeightedLq(q)
        for _ in range(50):
            x = random_dist(sp, rng, int(rng.integers(2, 5)), dim=3)
            p = float(rng.uniform(1.0, 4.0))
            try:
                rep = jensen_ratio(x, p)
            except DegenerateRatioError:
                continue
            assert rep.value >= rep.bound - 1e-7 * max(1.0, rep.value)


# ---------------------------------------------------------------- mixture

def test_mixture_iid_uniform_pair():
    u = FiniteDist.uniform(RL, [0.0, 1.0])
    assert mixture_ratio(Config(RL, u, u, 1.0)).value == pytest.approx(2.0, rel=1e-14)


def test_mixture_two_point_value():
    for p in (1.0, 2.0, 3.0):
        nc = make_two_point(p)
        assert mixture_ratio(nc.config).value == pytest.approx(
            2.0 ** (2.0 - p), rel=1e-12)


def test_mixture_universal_bound_random(rng):
    for _ in range(150):
        x = random_dist(RL, rng, int(rng.integers(1, 4)))
        y = random_dist(RL, rng, int(rng.integers(1, 4)))
        p = float(rng.uniform(1.0, 4.0))
        try:
            rep = mixture_ratio(Config(RL, x, y, p))
        except DegenerateRatioError:
            continue
        assert rep.value <= 3.0 ** p / 2.0 ** (p - 1.0) + 1e-9


def test_mixture_equals_centered_mixture_identity(rng):
    from momentmoduli.distributions import centered_moment, mixture as mix
    sp = WeightedLq(2.5)
    for _ in range(50):
        x = random_dist(sp, rng, 3, dim=3)
        y = random_dist(sp, rng, 2, dim=3)
        p = float(rng.uniform(1.0, 4.0))
        cfg = Config(sp, x, y, p)
        v = mixture_ratio(cfg).value
        ref = 2.0 * centered_moment(mix(x, y), p) / cross_moment(x, y, p)
        assert v == pytest.approx(ref, rel=1e-10)


# ---------------------------------------------------------------- barycenter

def test_barycenter_objective_fn_at_origin():
    nc = make_fn(3, INF, 1.0)
    z = CVector.zeros(6)
    assert barycenter_objective(nc.config, z) == pytest.approx(14.0, abs=1e-12)


def test_barycenter_objective_coercive_and_midpoint():
    u = FiniteDist.uniform(RL, [0.0, 1.0])
    cfg = Config(RL, u, u, 2.0)
    assert barycenter_objective(cfg, 1e6) > 1e11
    two = Config(RL, FiniteDist.delta(RL, 0.0), FiniteDist.delta(RL, 1.0), 2.0)
    assert barycenter_objective(two, 0.5) == pytest.approx(2 * 0.25, abs=1e-15)


def test_minimize_barycenter_fn_example():
    nc = make_fn(2, INF, 2.0)
    cert = minimize_barycenter(nc.config)
    assert cert.value == pytest.approx(32.0, rel=1e-12)
    assert np.max(np.abs(cert.z_star.entries)) < 2.0  # near the hyperplane center
    assert cert.value <= barycenter_objective(nc.config, CVector.zeros(4)) + 1e-12


def test_minimize_barycenter_symmetric_two_point():
    x = FiniteDist.uniform(RL, [-2.0, 2.0])
    cert = minimize_barycenter(Config(RL, x, x, 2.0))
    assert abs(cert.z_star) < 1e-4
    assert cert.value == pytest.approx(8.0, rel=1e-6)


def test_minimize_barycenter_eps_atom_interior_optimum():
    # closed-form infimum of (1-eps) r^p + eps (1-r)^p, doubled for X = Y;
    # the optimizer sits strictly between the atoms
    eps, p = 0.1, 2.0
    nc = make_eps_atom(eps, p)
    cert = minimize_barycenter(nc.config)
    r = 1.0 / (p - 1.0)
    single = eps * (1 - eps) / (eps ** r + (1 - eps) ** r) ** (p - 1.0)
    assert cert.value == pytest.approx(2.0 * single, rel=1e-6)
    assert cert.z_star == pytest.approx(0.1, abs=1e-4)


def test_minimize_barycenter_rejects_small_p():
    u = FiniteDist.uniform(RL, [0.0, 1.0])
    with pytest.raises(ValueError):
        minimize_barycenter(Config(RL, u, u, 0.7))


def test_minimize_barycenter_never_beats_start_invariant(rng):
    from momentmoduli.distributions import mean, mixture as mix
    for _ in range(20):
        x = random_dist(RL, rng, int(rng.integers(1, 4)))
        y = random_dist(RL, rng, int(rng.integers(1, 4)))
        p = float(rng.uniform(1.0, 3.5))
        cfg = Config(RL, x, y, p)
        cert = minimize_barycenter(cfg)
        zm = mean(mix(x, y))
        assert cert.value <= barycenter_objective(cfg, zm) + 1e-12
        assert cert.value == pytest.approx(
            barycenter_objective(cfg, cert.z_star), abs=1e-12)


def test_minimize_barycenter_numeric_route_schatten():
    sp = Schatten(2.0)
    a = CMatrix(np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex))
    b = CMatrix(-a.entries)
    x = FiniteDist.uniform(sp, [a, b])
    cert = minimize_barycenter(Config(sp, x, x, 2.0))
    # symmetric pair: optimum at the zero matrix, value 2 * E||X||^2 = 4
    assert cert.value == pytest.approx(4.0, rel=1e-5)


def test_barycenter_ratio_examples():
    nc = make_fn(5, INF, 1.0)
    assert barycenter_ratio(nc.config).value == pytest.approx(2.6, abs=1e-6)
    for p in (1.0, 2.0):
        assert barycenter_ratio(make_two_point(p).config).value == pytest.approx(
            2.0 ** (2.0 - p), rel=1e-6)


def test_barycenter_ratio_iid_at_most_two(rng):
    for _ in range(25):
        x = random_dist(RL, rng, int(rng.integers(2, 5)))
        p = float(rng.uniform(1.0, 3.0))
        try:
            rep = barycenter_ratio(Config(RL, x, x, p))
        except DegenerateRatioError:
            continue
        assert rep.value <= 2.0 + 1e-6


def test_barycenter_chain_below_mixture(rng):
    sp = WeightedLq(2.0)
    for _ in range(25):
        x = random_dist(sp, rng, int(rng.integers(1, 4)), dim=2)
        y = random_dist(sp, rng, int(rng.integers(1, 4)), dim=2)
        p = float(rng.uniform(1.0, 3.0))
        cfg = Config(sp, x, y, p)
        try:
            vb = barycenter_ratio(cfg).value
            vm = mixture_ratio(cfg).value
        except DegenerateRatioError:
            continue
        assert vb <= vm + 1e-9
        assert vb <= 3.0 ** p / 2.0 ** (p - 1.0) + 1e-7


def test_barycenter_ratio_nonconvex_range_uses_mixture_draw():
    u = FiniteDist.uniform(RL, [0.0, 1.0])
    rep = barycenter_ratio(Config(RL, u, u, 0.5))
    assert rep.value == pytest.approx(2.0, rel=1e-12)  # the sharp constant
    assert rep.bound == 2.0
    assert rep.solver_info is None


# ---------------------------------------------------------------- metric barycenter

def test_metric_barycenter_bipartite_examples():
    assert metric_barycenter_ratio(make_bipartite(4, 2.0).config).value \
        == pytest.approx(4.0, abs=1e-12)
    assert metric_barycenter_ratio(make_bipartite(1, 1.0).config).value \
        == pytest.approx(1.0, abs=1e-15)
    assert metric_barycenter_ratio(make_bipartite(100, 1.0).config).value \
        == pytest.approx(2.98, abs=1e-12)


def test_metric_barycenter_never_exceeds_bound(rng):
    for n in (1, 2, 4, 100):
        for p in (1.0, 2.0, 3.0):
            rep = metric_barycenter_ratio(make_bipartite(n, p).config)
            assert rep.value <= 2.0 ** p + 1.0 + 1e-12


def test_metric_barycenter_empty_candidates_rejected():
    nc = make_bipartite(2, 1.0)
    with pytest.raises(ValueError):
        metric_barycenter_ratio(nc.config, candidates=[])


def test_metric_barycenter_single_atom_trivial_zero():
    d = FiniteDist.delta(RL, 3.0)
    rep = metric_barycenter_ratio(Config(RL, d, d, 2.0))
    assert rep.value == 0.0


def test_metric_barycenter_atom_candidates_on_real_line():
    x = FiniteDist.uniform(RL, [0.0, 1.0])
    y = FiniteDist.delta(RL, 2.0)
    rep = metric_barycenter_ratio(Config(RL, x, y, 1.0))
    # candidates default to the union of supports: try z in {0, 1, 2}
    best = min(barycenter_objective(Config(RL, x, y, 1.0), z) for z in (0.0, 1.0, 2.0))
    assert rep.value == pytest.approx(best / cross_moment(x, y, 1.0), rel=1e-14)


# ---------------------------------------------------------------- log roundness

def test_log_roundness_atomic_cases():
    a = FiniteDist.uniform(RL, [0.0, 2.0])
    b = FiniteDist.uniform(RL, [1.0, 3.0])
    rep = log_roundness_report(Config(RL, a, b, 1.0))
    assert rep.value == -math.inf  # atomic self-pairs force -inf
    assert rep.value <= 0.0
    d0, d1 = FiniteDist.delta(RL, 0.0), FiniteDist.delta(RL, 1.0)
    assert log_roundness_report(Config(RL, d0, d1, 1.0)).value == -math.inf


# ---------------------------------------------------------------- reports

def test_all_reports_cover_linear_space():
    nc = make_two_point(2.0)
    names = [r.name for r in all_reports(nc.config)]
    assert names.count("Jensen") == 2
    for expected in ("Roundness", "MetricBarycenter", "Mixture",
                     "Barycenter", "LogRoundness"):
        assert expected in names


def test_report_slack_consistency():
    rep = roundness_ratio(make_disjoint_bernoulli(4, 2.0, 2.0).config)
    assert rep.slack == pytest.approx(rep.bound - rep.value, abs=1e-15)
    js = rep.to_json()
    assert js["name"] == "Roundness"
    row = rep.csv_row(2.0, WeightedLq(2.0))
    assert row[0] == "Roundness" and row[2] == 2.0


# ------------------------------------------------- solver vs grid oracles

def _real_line_grid_oracle(cfg, points=40001, pad=1.0):
    # independent implementation: raw numpy scan over a dense 1-d grid
    atoms = np.array(list(cfg.X.atoms) + list(cfg.Y.atoms))
    lo, hi = atoms.min() - pad, atoms.max() + pad
    grid = np.linspace(lo, hi, points)
    vals = np.zeros_like(grid)
    for a, w in zip(cfg.X.atoms, cfg.X.probs):
        vals += w * np.abs(a - grid) ** cfg.p
    for a, w in zip(cfg.Y.atoms, cfg.Y.probs):
        vals += w * np.abs(a - grid) ** cfg.p
    return float(vals.min()), (hi - lo) / (points - 1)


def test_minimize_barycenter_matches_grid_oracle_real_line(rng):
    for _ in range(12):
        x = random_dist(RL, rng, int(rng.integers(1, 5)))
        y = random_dist(RL, rng, int(rng.integers(1, 5)))
        p = float(rng.uniform(1.0, 3.5))
        cfg = Config(RL, x, y, p)
        cert = minimize_barycenter(cfg)
        oracle, h = _real_line_grid_oracle(cfg)
        spread = max(abs(a) for a in list(x.atoms) + list(y.atoms)) + 2.0
        slack = 4.0 * p * spread ** max(p - 1.0, 0.0) * h
        assert cert.value <= oracle + 1e-9
        assert cert.value >= oracle - slack


@pytest.mark.parametrize("q", [1.0, 2.0, 3.0, INF])
def test_minimize_barycenter_matches_grid_oracle_plane(q):
    # real 2-d configurations scanned over a 401 x 401 grid, one q per norm
    # regime (including the nonsmooth q = 1 and q = inf subgradients)
    rng = np.random.default_rng(int(10 * q if q != INF else 999))
    sp = WeightedLq(q)
    for _ in range(3):
        xa = [CVector(rng.normal(size=2).astype(complex)) for _ in range(3)]
        ya = [CVector(rng.normal(size=2).astype(complex)) for _ in range(2)]
        x = FiniteDist(sp, tuple(xa), rng.dirichlet(np.ones(3)))
        y = FiniteDist(sp, tuple(ya), rng.dirichlet(np.ones(2)))
        p = float(rng.uniform(1.0, 3.0))
        cfg = Config(sp, x, y, p)
        cert = minimize_barycenter(cfg)

        pts = np.array([a.entries.real for a in xa + ya])
        lo = pts.min() - 0.5
        hi = pts.max() + 0.5
        axis = np.linspace(lo, hi, 401)
        g0, g1 = np.meshgrid(axis, axis)
        vals = np.zeros_like(g0)
        for a, w in list(zip(xa, x.probs)) + list(zip(ya, y.probs)):
            d0 = np.abs(a.entries[0].real - g0)
            d1 = np.abs(a.entries[1].real - g1)
            if q == INF:
                dist = np.maximum(d0, d1)
            else:
                dist = (d0 ** q + d1 ** q) ** (1.0 / q)
            vals += w * dist ** p
        oracle = float(vals.min())
        h = (hi - lo) / 400.0
        spread = float(np.abs(pts).max()) + 1.0
        slack = 6.0 * p * (2 * spread) ** max(p - 1.0, 0.0) * h
        assert cert.value <= oracle + 1e-9, (q, p, cert.value, oracle)
        assert cert.value >= oracle - slack, (q, p, cert.value, oracle)


def test_minimize_barycenter_zero_sum_grid_oracle():
    # constrained problem on the zero-sum line of R^2: z = (t, -t)
    rng = np.random.default_rng(77)
    sp = WeightedLq(2.0)
    atoms = []
    for _ in range(4):
        t = rng.normal()
        atoms.append(CVector(np.array([t, -t], dtype=complex)))
    x = FiniteDist.uniform(sp, atoms[:2])
    y = FiniteDist.uniform(sp, atoms[2:])
    cfg = Config(sp, x, y, 2.0, zero_sum=True)
    cert = minimize_barycenter(cfg)
    ts = np.linspace(-5, 5, 200001)
    vals = np.zeros_like(ts)
    for a, w in list(zip(x.atoms, x.probs)) + list(zip(y.atoms, y.probs)):
        t0 = a.entries[0].real
        vals += w * (2.0 * (t0 - ts) ** 2) ** 1.0  # ||(t0,-t0)-(t,-t)||_2^2
    oracle = float(vals.min())
    assert cert.value == pytest.approx(oracle, rel=1e-6)
    # iterate stayed on the constraint line
    assert abs(cert.z_star.entries.sum()) < 1e-9
