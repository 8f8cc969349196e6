import numpy as np
import pytest

from peristab import mesh, solver
from peristab.errors import ConfigurationError, ContractViolation, SimulationAborted
from peristab.solver import Constraint, ProblemSpec

from conftest import make_body


def _bar(n=40, m=1.0, **kw):
    return make_body(1, n, N=3, m=m, dx=1.0 / n, **kw)


def _stretch_problem(body, strain, layers=3, **kw):
    nodes = body.nodes
    ends = [mesh.boundary_region(nodes, 0, s, layers) for s in ("min", "max")]
    cons = [Constraint(e, strain * nodes.positions[e]) for e in ends]
    return ProblemSpec(body, cons, **kw)


def test_constraint_validation():
    with pytest.raises(ConfigurationError):
        Constraint([0, 1], np.zeros((3, 1)))
    with pytest.raises(ConfigurationError):
        Constraint([0], np.zeros((1, 2)), components=(2,))
    body = _bar()
    with pytest.raises(ConfigurationError):
        ProblemSpec(body, [Constraint([0, 1], np.zeros((2, 1))), Constraint([1], np.zeros((1, 1)))])
    with pytest.raises(ContractViolation):
        ProblemSpec(body, [Constraint([999], np.zeros((1, 1)))])
    with pytest.raises(ConfigurationError):
        ProblemSpec(body, scheme="gauss")


def test_apply_bc_ramps():
    X = np.arange(10.0).reshape(5, 2)
    c = Constraint([1, 3], np.array([[1.0, 2.0], [3.0, 4.0]]), components=(1,))
    x = X + 100.0
    out0 = solver.apply_bc(X, x, [c], 0.0)
    out5 = solver.apply_bc(X, x, [c], 0.5)
    out1 = solver.apply_bc(X, x, [c], 1.0)
    assert out0[1, 1] == X[1, 1] and out5[1, 1] == X[1, 1] + 1.0 and out1[3, 1] == X[3, 1] + 4.0
    # unconstrained components and nodes are untouched
    for out in (out0, out5, out1):
        assert np.array_equal(out[:, 0], x[:, 0])
        assert np.array_equal(out[[0, 2, 4]], x[[0, 2, 4]])
    with pytest.raises(ContractViolation):
        solver.apply_bc(X, x, [c], 1.5)
    with pytest.raises(ContractViolation):
        solver.apply_bc(X, x, [Constraint([7], np.zeros((1, 2)))], 1.0)


def test_free_mask():
    body = make_body(2, 7, N=2)
    p = ProblemSpec(body, [Constraint([0, 1], np.zeros((2, 2)), components=(0,))])
    assert p.free.sum() == body.nodes.n_dof - 2
    assert not p.free[0, 0] and p.free[0, 1]


def test_zero_load_needs_no_iterations():
    body = _bar()
    out = solver.solve_static(_stretch_problem(body, 0.0))
    assert out.converged and out.iterations == 0
    assert np.all(out.u == 0)


@pytest.mark.parametrize("scheme", ["newton", "adr"])
def test_uniform_tension_converges_to_homogeneous_state(scheme):
    # with 2N fixed layers every free node sees only full families
    body = _bar(30)
    p = _stretch_problem(body, 0.01, layers=6, scheme=scheme, tol=1e-11, adr_max_iter=100000)
    out = solver.solve_static(p)
    assert out.converged and out.scheme == scheme
    np.testing.assert_allclose(out.u[:, 0], 0.01 * body.reference[:, 0], atol=1e-9)


def test_newton_and_adr_find_the_same_equilibrium():
    # N fixed layers: truncated families near the ends make the state non-uniform
    body = _bar(30)
    outs = [solver.solve_static(_stretch_problem(body, 0.01, scheme=s, tol=1e-12,
                                                 adr_max_iter=200000))
            for s in ("newton", "adr")]
    assert all(o.converged for o in outs)
    np.testing.assert_allclose(outs[0].u, outs[1].u, atol=1e-9)
    assert np.abs(outs[0].u[:, 0] - 0.01 * body.reference[:, 0]).max() > 1e-5


def test_auto_scheme_uses_newton_for_small_problems():
    out = solver.solve_static(_stretch_problem(_bar(), 0.01))
    assert out.scheme == "newton"


def test_compression_in_one_step_diverges():
    body = _bar(400)
    out = solver.solve_static(_stretch_problem(body, -0.001, layers=6))
    assert not out.converged
    assert out.failed_step == 1 and out.growth >= solver.GROWTH_FACTOR


def test_body_force_equilibrium_2d_silling():
    body = make_body(2, 8, N=2, dx=0.25, family="silling", law="isotropic", lam=0.5, mu=0.5)
    left = mesh.boundary_region(body.nodes, 0, "min", 2)
    b = np.zeros((body.nodes.n_nodes, 2))
    b[:, 0] = 1e-3
    p = ProblemSpec(body, [Constraint(left, np.zeros((len(left), 2)))], body_force=b, tol=1e-12)
    out = solver.solve_static(p, 2)
    assert out.converged
    f = body.internal_force(out.x) + p.external(1.0)
    assert np.abs(f[p.free.all(axis=1)]).max() < p.tol * p.force_scale()
    assert out.u[:, 0].max() > 0


# -- dynamics ---------------------------------------------------------------------------


def test_stable_dt():
    body = _bar(20, law="isotropic", lam=2.0, mu=1.0, density=4.0)
    assert solver.stable_dt(body, 1.0) == pytest.approx(0.05 * np.sqrt(4.0 / 4.0))
    with pytest.raises(ConfigurationError):
        solver.solve_dynamic(ProblemSpec(body), 1.01 * solver.stable_dt(body, 1.0), 1)
    with pytest.raises(ConfigurationError):
        solver.solve_dynamic(ProblemSpec(body), 0.0, 1)


def test_zero_initial_conditions_stay_zero():
    body = make_body(2, 7, N=2)
    traj = solver.solve_dynamic(ProblemSpec(body), solver.stable_dt(body), 50, record_every=10)
    assert np.array_equal(traj.x, body.reference)
    assert np.all(traj.v == 0)
    assert np.all(traj.energy == 0)
    assert len(traj.snapshots) == 6


def test_energy_conserved_under_free_vibration():
    """m = 1 bar released from a small tension, no load: 1e4 steps at 0.1 of the cap."""
    body = _bar(30)
    x0 = body.reference * 1.001
    x0[:, 0] += 1e-4 * np.sin(np.pi * body.reference[:, 0])
    dt = 0.1 * solver.stable_dt(body, 1.0)
    traj = solver.solve_dynamic(ProblemSpec(body), dt, 10_000, x0=x0, energy_every=100)
    e = traj.energy
    assert np.abs(e - e[0]).max() < 0.01 * e[0]
    assert traj.kinetic.max() > 0.1 * e[0]


def test_prescribed_velocity_follows_ramp():
    body = _bar(30)
    p = _stretch_problem(body, 0.01)
    dt = 0.2 * solver.stable_dt(body, 1.0)
    n = 200
    traj = solver.solve_dynamic(p, dt, n, ramp_time=n * dt * 2, force_nodes=p.constraints[1].nodes)
    end = p.constraints[1].nodes
    np.testing.assert_allclose(traj.x[end, 0] - body.reference[end, 0],
                               0.5 * 0.01 * body.reference[end, 0], rtol=1e-12)
    np.testing.assert_allclose(traj.v[end, 0], 0.01 * body.reference[end, 0] / (n * dt * 2),
                               rtol=1e-9)
    assert len(traj.end_force) == n + 1


def test_smooth_ramp_and_unknown_shape():
    body = _bar(20)
    p = _stretch_problem(body, 0.01)
    dt = 0.2 * solver.stable_dt(body, 1.0)
    traj = solver.solve_dynamic(p, dt, 20, ramp_time=40 * dt, ramp_shape="smooth")
    end = p.constraints[1].nodes
    np.testing.assert_allclose(traj.x[end, 0] - body.reference[end, 0],
                               0.5 * 0.01 * body.reference[end, 0], rtol=1e-9)
    with pytest.raises(ConfigurationError):
        solver.solve_dynamic(p, dt, 1, ramp_shape="cubic")


def test_collapse_aborts_with_step():
    body = _bar(20)
    v0 = np.zeros_like(body.reference)
    v0[10, 0] = 1e3
    with pytest.raises(SimulationAborted) as info, np.errstate(over="ignore", invalid="ignore"):
        solver.solve_dynamic(ProblemSpec(body), solver.stable_dt(body), 1000, v0=v0)
    assert info.value.step >= 1


def test_dynamic_bitwise_reproducible():
    body = make_body(2, 7, N=2, law="isotropic", lam=0.3, mu=0.4)
    x0 = body.reference + 1e-3 * np.random.default_rng(2).normal(size=body.reference.shape)
    runs = [solver.solve_dynamic(ProblemSpec(body), solver.stable_dt(body), 100, x0=x0)
            for _ in range(2)]
    assert np.array_equal(runs[0].x, runs[1].x) and np.array_equal(runs[0].v, runs[1].v)


def test_write_field_csv(tmp_path):
    body = make_body(2, 5, N=2)
    x = body.reference + 0.5
    path = tmp_path / "f.csv"
    solver.write_field_csv(path, body.nodes, x, np.ones_like(x))
    rows = path.read_text().splitlines()
    assert rows[0].startswith("id,Xx,Xy,ux,uy")
    assert len(rows) == 1 + body.nodes.n_nodes
