import numpy as np
import pytest

from curveopt.curves import CurveDecision, QuadraticCurve, feasibility_certificate
from curveopt.errors import SearchFailureError
from curveopt.problems import SmoothProblem, get_problem
from curveopt.sets import FEAS_TOL, ConvexFeasibleSet, make_box, make_set
from curveopt.solvers import (
    STATUS_STATIONARY,
    SolverConfig,
    adaptive_momentum,
    build_secondary_direction,
    config_with,
    curve_search,
    scs_solve,
    solve,
    spectral_eta,
    spg_direction,
    spg_solve,
    stationarity_measure,
)


def sum_of_squares(n):
    return SmoothProblem(
        f"ss{n}",
        n,
        lambda x: float(np.dot(x, x)),
        lambda x: 2.0 * np.asarray(x, dtype=float),
        np.ones(n),
    )


def halfspace_x1(n=2):
    def g(x):
        return np.array([x[0]])

    def g_grad(x, i):
        e = np.zeros(n)
        e[0] = 1.0
        return e

    def project(x):
        out = np.array(x, dtype=float)
        out[0] = min(out[0], 0.0)
        return out

    return ConvexFeasibleSet("half", n, 1, g, g_grad, project)


# ---------------------------------------------------------------------------
# building blocks


def test_spg_direction_worked_value():
    p = sum_of_squares(2)
    b = make_box(2)
    d = spg_direction(p, b, np.array([1.0, 0.0]), 1.0)
    assert np.allclose(d, [-2.0, 0.0])


def test_spg_direction_zero_at_stationary_point():
    p = sum_of_squares(2)
    b = make_box(2)
    assert np.allclose(spg_direction(p, b, np.zeros(2), 0.5), [0.0, 0.0])


def test_spectral_eta_quotient():
    assert spectral_eta(np.array([1.0, 0.0]), np.array([2.0, 0.0]), 1e-3, 1e3) == 0.5


def test_spectral_eta_nonpositive_curvature():
    assert spectral_eta(np.array([1.0]), np.array([-1.0]), 1e-3, 1e3) == 1e3
    assert spectral_eta(np.zeros(2), np.zeros(2), 1e-3, 1e3) == 1e3


def test_spectral_eta_clamped():
    # r'r / r'y = 1 / 2000 below the floor
    assert spectral_eta(np.array([1.0]), np.array([2000.0]), 1e-3, 1e3) == 1e-3
    assert spectral_eta(np.array([1.0]), np.array([1e-6]), 1e-3, 1e3) == 1e3


def test_build_secondary_direction_worked_value():
    s = build_secondary_direction(
        d=np.array([1.0, 0.0]),
        x=np.array([2.0, 2.0]),
        x_prev=np.array([1.0, 1.0]),
        alpha=0.5,
        beta=0.25,
        eta=2.0,
    )
    # 0.5 * d + 0.25 * 2.0 * (x - x_prev)
    assert np.allclose(s, [1.0, 0.5])


def test_adaptive_momentum_worked_reduction():
    b = make_box(2)
    s, beta_k = adaptive_momentum(
        d=np.array([-0.05, 0.02]),
        x=np.array([1.0, 0.0]),
        x_prev=np.array([0.9, -0.5]),
        fset=b,
        alpha=0.999,
        beta=0.9,
        eta=2.5,
        delta=0.5,
        max_backtracks=60,
    )
    # three halvings: 0.9 * 0.5**3
    assert beta_k == pytest.approx(0.1125, abs=1e-15)
    endpoint = np.array([1.0, 0.0]) + s
    assert b.max_violation(endpoint) <= FEAS_TOL
    # one fewer halving would leave the box
    bigger = (
        np.array([1.0, 0.0])
        + 0.999 * np.array([-0.05, 0.02])
        + (2.0 * beta_k) * 2.5 * np.array([0.1, 0.5])
    )
    assert b.max_violation(bigger) > FEAS_TOL


def test_adaptive_momentum_no_reduction_needed():
    b = make_box(2)
    s, beta_k = adaptive_momentum(
        d=np.array([-0.1, 0.0]),
        x=np.zeros(2),
        x_prev=np.zeros(2),
        fset=b,
        alpha=0.999,
        beta=0.9,
        eta=1.0,
        delta=0.5,
        max_backtracks=60,
    )
    assert beta_k == 0.9
    assert np.allclose(s, [-0.0999, 0.0])


def test_adaptive_momentum_budget_exhausted():
    # endpoint stays infeasible for every momentum weight
    b = make_box(1)
    with pytest.raises(SearchFailureError) as exc:
        adaptive_momentum(
            d=np.array([5.0]),
            x=np.array([0.0]),
            x_prev=np.array([0.0]),
            fset=b,
            alpha=0.999,
            beta=0.9,
            eta=1.0,
            delta=0.5,
            max_backtracks=5,
        )
    assert exc.value.failed_condition == "feasibility"


def test_curve_search_worked_trace():
    # f = ||x||^2, straight line from [1, 0] along [-2, 0]: t = 1 fails
    # Armijo (f back to 1), t = 0.5 lands on the minimizer
    p = sum_of_squares(2)
    b = make_box(2)
    c = QuadraticCurve(np.array([1.0, 0.0]), np.array([-2.0, 0.0]), np.array([-2.0, 0.0]))
    res = curve_search(p, b, c, f_ref=1.0, grad_dot_d=-4.0, cfg=SolverConfig())
    assert res.t == 0.5
    assert np.allclose(res.x, [0.0, 0.0])
    assert res.f == 0.0


def test_curve_search_backtracks_on_infeasibility():
    p = sum_of_squares(2)
    b = make_box(2)
    x = np.array([0.5, 0.0])
    c = QuadraticCurve(x, np.array([-2.0, 0.0]), np.array([-2.0, 0.0]))
    # endpoint [-1.5, 0] leaves the box, t = 0.5 fails Armijo, t = 0.25 wins
    res = curve_search(p, b, c, f_ref=0.25, grad_dot_d=-2.0, cfg=SolverConfig())
    assert res.t == 0.25
    assert np.allclose(res.x, [0.0, 0.0])


def test_curve_search_failure_payload():
    p = sum_of_squares(2)
    b = make_box(2)
    c = QuadraticCurve(np.array([0.5, 0.0]), np.array([0.1, 0.0]), np.array([0.1, 0.0]))
    # unreachable reference value: every trial fails sufficient decrease
    with pytest.raises(SearchFailureError) as exc:
        curve_search(p, b, c, f_ref=-1.0, grad_dot_d=-0.1, cfg=SolverConfig())
    assert exc.value.failed_condition == "sufficient_decrease"
    assert exc.value.last_trial == pytest.approx(0.5**60)


def test_stationarity_measure_examples():
    b = make_box(2)
    p = SmoothProblem(
        "shift2",
        2,
        lambda x: float((x[0] - 2.0) ** 2),
        lambda x: np.array([2.0 * (x[0] - 2.0), 0.0]),
        np.zeros(2),
    )
    # constrained minimizer sits on the face x_0 = 1
    assert stationarity_measure(p, b, np.array([1.0, 0.0])) == 0.0
    assert stationarity_measure(p, b, np.array([0.0, 0.0])) == pytest.approx(1.0)


# ---------------------------------------------------------------------------
# configuration


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(delta=1.0)
    with pytest.raises(ValueError):
        SolverConfig(sigma=0.0)
    with pytest.raises(ValueError):
        SolverConfig(alpha=1.5)
    with pytest.raises(ValueError):
        SolverConfig(eta_min=1.0, eta_max=0.5)
    with pytest.raises(ValueError):
        SolverConfig(M=-1)


def test_config_with_override():
    cfg = config_with(SolverConfig(), M=10, stat_tol=1e-5)
    assert cfg.M == 10 and cfg.stat_tol == 1e-5
    assert cfg.delta == 0.5


def test_solver_dispatch():
    p = sum_of_squares(2)
    b = make_box(2)
    assert solve("spg", p, b).solver_name == "spg"
    with pytest.raises(KeyError):
        solve("newton", p, b)


# ---------------------------------------------------------------------------
# spg solver


def test_spg_quadratic_interpolation_step():
    # f = 2 x^2 from x = 1: the first trial overshoots to -3 and the
    # interpolated step 0.25 lands exactly on the minimizer
    p = SmoothProblem(
        "steep1",
        1,
        lambda x: float(2.0 * x[0] * x[0]),
        lambda x: np.array([4.0 * x[0]]),
        np.array([1.0]),
    )
    b = make_box(1, lo=-10.0, hi=10.0)
    rec = spg_solve(p, b, SolverConfig(stat_tol=1e-9), record_trace=True)
    assert rec.status == STATUS_STATIONARY
    assert rec.trace[0].t == pytest.approx(0.25)
    assert rec.f_star == 0.0


def test_spg_accepts_unit_step_when_possible():
    # f = ||x||^2 / 4 with eta0 = 1 undershoots, so lambda = 1 passes Armijo
    p = SmoothProblem(
        "gentle2",
        2,
        lambda x: 0.25 * float(np.dot(x, x)),
        lambda x: 0.5 * np.asarray(x, dtype=float),
        np.ones(2),
    )
    rec = spg_solve(p, make_set("sph", 2), record_trace=True)
    assert rec.status == STATUS_STATIONARY
    assert rec.trace[0].t == 1.0


def test_spg_monotone_when_memoryless():
    p = get_problem("rosenbrock2")
    rec = spg_solve(p, make_box(2, lo=-2.0, hi=2.0), SolverConfig(M=0), record_trace=True)
    fs = [r.f for r in rec.trace]
    assert all(b <= a + 1e-12 for a, b in zip(fs, fs[1:]))


def test_spg_solves_constrained_quadratic():
    p = get_problem("quad_shift50")
    rec = spg_solve(p, make_box(50))
    assert rec.status == STATUS_STATIONARY
    assert rec.max_g_final <= FEAS_TOL
    assert rec.f_star == pytest.approx(1275.0, rel=1e-6)


# ---------------------------------------------------------------------------
# scs solver


def test_scs_first_iteration_is_straight_line():
    p = get_problem("rosenbrock2")
    rec = scs_solve(p, make_box(2, lo=-2.0, hi=2.0), record_trace=True)
    first = rec.trace[0]
    assert first.fallback
    assert first.straight_line
    assert np.array_equal(first.s, first.d)


def test_scs_fallback_counter_matches_trace():
    p = get_problem("rosenbrock2")
    rec = scs_solve(p, make_box(2, lo=-2.0, hi=2.0), record_trace=True)
    assert rec.fallbacks == sum(1 for r in rec.trace if r.fallback)
    assert rec.fallbacks >= 1  # the first iteration always counts


def test_scs_engineered_fallback_after_first_iteration():
    # maximize x^1 + x^2 over {x^1 <= 0}: after one step the momentum
    # endpoint crosses the active halfspace, so the certificate rejects it
    p = SmoothProblem(
        "linear2",
        2,
        lambda x: float(-x[0] - x[1]),
        lambda x: np.array([-1.0, -1.0]),
        np.array([-1.0, 0.0]),
    )
    rec = scs_solve(p, halfspace_x1(), SolverConfig(max_iters=3), record_trace=True)
    assert rec.trace[1].fallback
    assert np.array_equal(rec.trace[1].s, rec.trace[1].d)
    # the rejected momentum endpoint really was infeasible
    r1 = rec.trace[1]
    assert halfspace_x1().max_violation(r1.x + r1.s_candidate) > 0


def test_scs_monotone_when_memoryless():
    p = get_problem("rosenbrock2")
    rec = scs_solve(p, make_box(2, lo=-2.0, hi=2.0), SolverConfig(M=0), record_trace=True)
    fs = [r.f for r in rec.trace]
    assert all(b <= a + 1e-12 for a, b in zip(fs, fs[1:]))


def test_scs_nonmonotone_reference_uses_memory():
    p = get_problem("rosenbrock2")
    M = 5
    rec = scs_solve(p, make_box(2, lo=-2.0, hi=2.0), SolverConfig(M=M), record_trace=True)
    fs = [r.f for r in rec.trace]
    for k, r in enumerate(rec.trace):
        if r.f_ref is None:
            continue
        lo = max(0, k - M)
        assert r.f_ref == pytest.approx(max(fs[lo : k + 1]), abs=1e-12)


def test_scs_eta_stays_in_bounds():
    p = get_problem("chnrosnb4")
    cfg = SolverConfig()
    rec = scs_solve(p, make_set("com", 4), cfg, record_trace=True)
    for r in rec.trace:
        if r.eta is not None:
            assert cfg.eta_min <= r.eta <= cfg.eta_max


def test_scs_solves_constrained_quadratic():
    p = get_problem("quad_shift50")
    rec = scs_solve(p, make_box(50))
    assert rec.status == STATUS_STATIONARY
    assert rec.max_g_final <= FEAS_TOL
    assert rec.f_star == pytest.approx(1275.0, rel=1e-6)


def test_scs_x0_override():
    p = get_problem("quad_diag50")
    rec = scs_solve(p, make_set("sph", 50), x0=np.zeros(50))
    assert rec.status == STATUS_STATIONARY
    assert rec.iterations == 0
    assert rec.f_star == 0.0


def test_scs_infeasible_start_is_projected():
    p = sum_of_squares(2)
    rec = scs_solve(p, make_box(2), x0=np.array([50.0, 50.0]), record_trace=True)
    assert np.allclose(rec.trace[0].x, [1.0, 1.0])
    assert rec.status == STATUS_STATIONARY


@pytest.mark.parametrize("set_name", ("sph", "ell", "com", "box"))
def test_scs_iterates_feasible_everywhere(set_name):
    p = get_problem("chnrosnb4")
    fset = make_set(set_name, 4, ell_seed=3)
    rec = scs_solve(p, fset, record_trace=True)
    for r in rec.trace:
        assert r.max_g <= FEAS_TOL
    assert rec.max_g_final <= FEAS_TOL


# ---------------------------------------------------------------------------
# deterministic replay of the recorded scs run


def replay_run(p, fset, cfg):
    rec = scs_solve(p, fset, cfg, record_trace=True)
    steps = [r for r in rec.trace if r.t is not None]
    assert steps, "expected at least one completed iteration"
    for i, r in enumerate(steps):
        # primary direction reproduces from the stored iterate and steplength
        d = spg_direction(p, fset, r.x, r.eta)
        assert np.allclose(d, r.d, atol=1e-12)
        # certificate decision reproduces from the stored momentum candidate
        if r.k > 0:
            decision = feasibility_certificate(
                QuadraticCurve(r.x, r.d, r.s_candidate), fset, cfg.t_tilde, r.eps
            )
            expect = CurveDecision.FALL_BACK if r.fallback else CurveDecision.CURVE_OK
            assert decision is expect
        if r.fallback:
            assert np.array_equal(r.s, r.d)
        c = QuadraticCurve(r.x, r.d, r.s)
        # accepted point is feasible and passes the recorded Armijo test
        xt = c.eval(r.t)
        assert fset.max_violation(xt) <= FEAS_TOL
        assert p.f(xt) <= r.f_ref + cfg.sigma * r.t * r.grad_dot_d + 1e-12
        # maximality: the next larger trial on the delta grid was rejected
        if r.t < 1.0:
            t_up = r.t / cfg.delta
            x_up = c.eval(t_up)
            rejected = (
                fset.max_violation(x_up) > FEAS_TOL
                or p.f(x_up) > r.f_ref + cfg.sigma * t_up * r.grad_dot_d
            )
            assert rejected
        # the next stored iterate is exactly the accepted point
        nxt = rec.trace[r.k + 1]
        assert np.array_equal(nxt.x, xt)
    return rec


def test_scs_replay_rosenbrock_box():
    replay_run(get_problem("rosenbrock2"), make_box(2, lo=-2.0, hi=2.0), SolverConfig())


def test_scs_replay_nonmonotone_composite():
    replay_run(get_problem("chnrosnb4"), make_set("com", 4), SolverConfig(M=10))


def test_scs_replay_ellipsoid():
    replay_run(get_problem("beale2"), make_set("ell", 2, ell_seed=5), SolverConfig(M=2))
