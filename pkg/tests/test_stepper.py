import numpy as np
import pytest

from apwave.diagnostics import energy, wellprepared_defect
from apwave.errors import ConfigurationError, NumericalBlowup
from apwave.grid import ModelParams, PeriodicGrid, State, central_derivative
from apwave.implicit_solver import StageSolver, StageSystem, dense_stage_oracle
from apwave.stepper import StepContext, compute_dt, imex_step, run
from apwave.tableau import builtin_tableau

ARS = builtin_tableau("ARS222")
EULER = builtin_tableau("EULER111")


def test_compute_dt_examples():
    grid = PeriodicGrid((10,), ((0.0, 1.0),))
    params = ModelParams(epsilon=1.0, u_bar=(1.0,))
    assert compute_dt(grid, params, 0.45, 1e9) == pytest.approx(0.045, abs=1e-15)
    grid2 = PeriodicGrid((10, 20), ((0.0, 1.0), (0.0, 1.0)))
    params2 = ModelParams(epsilon=1.0, u_bar=(1.0, 1.0))
    assert compute_dt(grid2, params2, 0.45, 1e9) == pytest.approx(0.0225, abs=1e-15)


def test_compute_dt_epsilon_independent_bit_exact():
    grid = PeriodicGrid((10, 20), ((0.0, 1.0), (0.0, 1.0)))
    values = {compute_dt(grid, ModelParams(epsilon=eps, u_bar=(1.0, 1.0)), 0.45, 1e9)
              for eps in (1.0, 1e-2, 1e-4, 1e-6)}
    assert len(values) == 1


def test_compute_dt_fallback_and_clamp():
    grid = PeriodicGrid((10,), ((0.0, 1.0),))
    still = ModelParams(epsilon=1.0, u_bar=(0.0,))
    assert compute_dt(grid, still, 0.5, 1e9) == pytest.approx(0.05)
    off = ModelParams(epsilon=1.0, u_bar=(3.0,), advection_on=False)
    assert compute_dt(grid, off, 0.5, 1e9) == pytest.approx(0.05)
    moving = ModelParams(epsilon=1.0, u_bar=(1.0,))
    assert compute_dt(grid, moving, 0.45, 0.01) == 0.01
    with pytest.raises(ConfigurationError):
        compute_dt(grid, moving, 0.45, 0.0)
    with pytest.raises(ConfigurationError):
        compute_dt(grid, moving, 1.5, 1.0)


def test_zero_state_fixed_point():
    grid = PeriodicGrid((8,), ((0.0, 1.0),))
    params = ModelParams(epsilon=0.1, u_bar=(1.0,))
    ctx = StepContext(dt=0.01, tableau=ARS, params=params)
    out = imex_step(State.zeros(grid), ctx, StageSolver(grid))
    np.testing.assert_array_equal(out.varrho, np.zeros(8))
    np.testing.assert_array_equal(out.vel, np.zeros((1, 8)))


def test_constant_state_fixed_point_with_advection():
    grid = PeriodicGrid((8, 8), ((0, 1), (0, 1)))
    params = ModelParams(epsilon=0.05, u_bar=(1.0, 1.0))
    state = State(grid, np.full((8, 8), 1.3), np.full((2, 8, 8), -0.2))
    ctx = StepContext(dt=0.01, tableau=ARS, params=params)
    out = imex_step(state, ctx, StageSolver(grid))
    np.testing.assert_allclose(out.varrho, state.varrho, atol=1e-13)
    np.testing.assert_allclose(out.vel, state.vel, atol=1e-13)


def test_euler_acoustic_step_equals_dense_oracle():
    # one backward-Euler acoustic step is exactly one stage solve
    grid = PeriodicGrid((8,), ((0.0, 1.0),))
    params = ModelParams(epsilon=0.1, u_bar=(1.0,), advection_on=False)
    rng = np.random.default_rng(21)
    state = State(grid, rng.standard_normal(8), rng.standard_normal((1, 8)))
    dt = 0.0125
    ctx = StepContext(dt=dt, tableau=EULER, params=params)
    stepped = imex_step(state, ctx, StageSolver(grid))
    beta = dt * params.stiffness / (2.0 * grid.dx[0])
    oracle = dense_stage_oracle(StageSystem(grid, (beta,), state))
    np.testing.assert_allclose(stepped.varrho, oracle.varrho, atol=1e-12)
    np.testing.assert_allclose(stepped.vel, oracle.vel, atol=1e-12)


def wellprepared_state(grid, seed=17, rho_const=0.4):
    rng = np.random.default_rng(seed)
    psi = rng.standard_normal(grid.n_cells)
    u1 = central_derivative(psi, 1, grid)
    u2 = -central_derivative(psi, 0, grid)
    return State(grid, np.full(grid.n_cells, rho_const), np.stack([u1, u2]))


@pytest.mark.parametrize("tableau", [EULER, ARS])
def test_wellprepared_fixed_point(tableau):
    grid = PeriodicGrid((16, 16), ((0, 1), (0, 1)))
    params = ModelParams(epsilon=1e-4, u_bar=(1.0, 1.0), advection_on=False)
    state = wellprepared_state(grid)
    ctx = StepContext(dt=0.01, tableau=tableau, params=params)
    out = imex_step(state, ctx, StageSolver(grid))
    np.testing.assert_allclose(out.varrho, state.varrho, atol=1e-11)
    np.testing.assert_allclose(out.vel, state.vel, atol=1e-11)


def test_mean_conservation_per_step():
    grid = PeriodicGrid((16, 8), ((0, 1), (0, 2)))
    params = ModelParams(epsilon=0.01, u_bar=(1.0, -0.5))
    rng = np.random.default_rng(23)
    state = State(grid, rng.standard_normal((16, 8)), rng.standard_normal((2, 16, 8)))
    ctx = StepContext(dt=0.02, tableau=ARS, params=params)
    out = imex_step(state, ctx, StageSolver(grid))
    assert abs(np.mean(out.varrho) - np.mean(state.varrho)) <= 1e-12
    for m in range(2):
        assert abs(np.mean(out.vel[m]) - np.mean(state.vel[m])) <= 1e-12


@pytest.mark.parametrize("eps", [1.0, 1e-2, 1e-4])
def test_euler_energy_contraction_acoustic(eps):
    grid = PeriodicGrid((32,), ((0.0, 1.0),))
    params = ModelParams(epsilon=eps, u_bar=(1.0,), advection_on=False)
    rng = np.random.default_rng(29)
    state = State(grid, rng.standard_normal(32), rng.standard_normal((1, 32)))
    solver = StageSolver(grid)
    e0 = energy(state)
    ctx = StepContext(dt=compute_dt(grid, params, 0.45, 1e9), tableau=EULER, params=params)
    for _ in range(50):
        e_prev = energy(state)
        state = imex_step(state, ctx, solver)
        assert energy(state) <= e_prev + 1e-13 * e0


def test_ars_energy_bound_uniform_in_eps():
    grid = PeriodicGrid((32,), ((0.0, 1.0),))
    rng = np.random.default_rng(31)
    rho0 = rng.standard_normal(32)
    vel0 = rng.standard_normal((1, 32))
    max_ratio = {}
    for eps in (1.0, 1e-2, 1e-4):
        params = ModelParams(epsilon=eps, u_bar=(1.0,), advection_on=False)
        state = State(grid, rho0.copy(), vel0.copy())
        solver = StageSolver(grid)
        e0 = energy(state)
        worst = 1.0
        ctx = StepContext(dt=compute_dt(grid, params, 0.45, 1e9), tableau=ARS, params=params)
        for _ in range(200):
            state = imex_step(state, ctx, solver)
            worst = max(worst, energy(state) / e0)
        max_ratio[eps] = worst
    values = list(max_ratio.values())
    assert max(values) - min(values) <= 0.01 * max(values)


def test_local_order_ars222():
    # one-step error against a tiny-step reference; Richardson slope near 3
    grid = PeriodicGrid((32,), ((0.0, 1.0),))
    params = ModelParams(epsilon=1.0, u_bar=(1.0,))
    x = grid.axis_centers(0)
    state0 = State(grid, np.sin(2 * np.pi * x), (0.5 * np.cos(2 * np.pi * x))[None])
    solver = StageSolver(grid)

    def advance(state, dt, n):
        ctx = StepContext(dt=dt, tableau=ARS, params=params)
        for _ in range(n):
            state = imex_step(state, ctx, solver)
        return state

    errs, dts = [], []
    for big in (0.02, 0.01, 0.005):
        one = advance(state0.copy(), big, 1)
        ref = advance(state0.copy(), big / 64.0, 64)
        err = np.max(np.abs(one.varrho - ref.varrho)) + np.max(np.abs(one.vel - ref.vel))
        errs.append(err)
        dts.append(big)
    slope = np.polyfit(np.log(dts), np.log(errs), 1)[0]
    assert 2.7 <= slope <= 3.3


def test_run_clamps_final_step():
    grid = PeriodicGrid((8,), ((0.0, 1.0),))
    params = ModelParams(epsilon=1.0, u_bar=(1.0,))
    state = State.zeros(grid)
    result = run(state, params, ARS, 0.45, 0.01)  # one CFL step would be 0.056
    assert result.n_steps == 1
    assert result.t == pytest.approx(0.01, abs=1e-15)


def test_run_observer_cadence():
    grid = PeriodicGrid((8,), ((0.0, 1.0),))
    params = ModelParams(epsilon=1.0, u_bar=(1.0,))
    x = grid.axis_centers(0)
    state = State(grid, np.sin(2 * np.pi * x), np.zeros((1, 8)))
    result = run(state, params, ARS, 0.45, 1.0, observers={"energy": energy})
    assert len(result.series["energy"]) == result.n_steps
    assert len(result.times) == result.n_steps
    assert result.times[-1] == pytest.approx(1.0, abs=1e-14)
    sparse = run(state, params, ARS, 0.45, 1.0, observers={"energy": energy},
                 observe_every=5)
    assert len(sparse.series["energy"]) < result.n_steps
    assert sparse.times[-1] == pytest.approx(1.0, abs=1e-14)  # final step always observed


def test_blowup_error_names_stage():
    grid = PeriodicGrid((8,), ((0.0, 1.0),))
    params = ModelParams(epsilon=1.0, u_bar=(1.0,))
    state = State.zeros(grid)
    state.varrho[0] = np.nan
    ctx = StepContext(dt=0.01, tableau=ARS, params=params)
    with pytest.raises(NumericalBlowup) as exc_info:
        imex_step(state, ctx, StageSolver(grid))
    assert exc_info.value.stage == 1
    assert "stage 1" in str(exc_info.value)


def test_run_rejects_bad_t_final():
    grid = PeriodicGrid((8,), ((0.0, 1.0),))
    with pytest.raises(ConfigurationError):
        run(State.zeros(grid), ModelParams(epsilon=1.0, u_bar=(1.0,)), ARS, 0.45, 0.0)


def test_step_context_caches_sized_s():
    grid = PeriodicGrid((8,), ((0.0, 1.0),))
    params = ModelParams(epsilon=1.0, u_bar=(1.0,))
    rng = np.random.default_rng(33)
    state = State(grid, rng.standard_normal(8), rng.standard_normal((1, 8)))
    ctx = StepContext(dt=0.01, tableau=ARS, params=params)
    imex_step(state, ctx, StageSolver(grid))
    assert len(ctx.stage_states) == ARS.s
    assert len(ctx.stage_explicit_tend) == ARS.s
    assert len(ctx.stage_implicit_tend) == ARS.s
