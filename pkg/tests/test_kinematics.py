import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from peristab import kinematics, tensor
from peristab.errors import CollapsedBond, ContractViolation

from conftest import interior_nodes, make_body, random_f


def _strain(body, x, m):
    return kinematics.seth_hill_strain(body.families, body.nodes.volumes, x, body.shapes.Linv, m,
                                       body.kernels)


@pytest.mark.parametrize("dim,n", [(1, 16), (2, 9), (3, 7)])
def test_defgrad_exact_for_homogeneous(dim, n, backend):
    body = make_body(dim, n, N=2 if dim == 3 else 3, backend=backend)
    rng = np.random.default_rng(dim)
    F = random_f(rng, dim)
    x = body.reference @ F.T + rng.normal(size=dim)
    Fb = kinematics.def_grad_bar(body.families, body.nodes.volumes, x, body.shapes.Kinv, body.kernels)
    # exact on every node, boundary or not
    np.testing.assert_allclose(Fb, np.broadcast_to(F, Fb.shape), rtol=0, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.floats(-0.4, 0.6), st.floats(-1.0, 2.0))
def test_1d_strain_matches_local_for_any_m(a, m):
    body = make_body(1, 12)
    x = body.reference * (1 + a)
    E = _strain(body, x, m)[:, 0, 0]
    local = kinematics.local_seth_hill(np.array([[1 + a]]), m)[0, 0]
    np.testing.assert_allclose(E, local, rtol=1e-12, atol=1e-15)


@pytest.mark.parametrize("dim,n", [(2, 9), (3, 7)])
def test_green_strain_exact_for_any_f(dim, n):
    body = make_body(dim, n, N=2 if dim == 3 else 3)
    F = random_f(np.random.default_rng(7), dim)
    x = body.reference @ F.T
    E = _strain(body, x, 1.0)
    expect = 0.5 * (F.T @ F - np.eye(dim))
    np.testing.assert_allclose(E, np.broadcast_to(expect, E.shape), atol=1e-13)


@pytest.mark.parametrize("m", [-0.5, 0.0, 0.5, 2.0])
def test_hydrostatic_strain_exact_for_any_m(m):
    body = make_body(2, 9)
    a = 0.07
    E = _strain(body, body.reference * (1 + a), m)
    expect = kinematics.local_seth_hill((1 + a) * np.eye(2), m)
    np.testing.assert_allclose(E, np.broadcast_to(expect, E.shape), atol=1e-13)


def test_nonhydrostatic_m_not_one_differs_from_local():
    # the bond average of lambda^(2m) is not C^m unless m = 1 or F is isotropic
    body = make_body(2, 9)
    F = np.array([[1.2, 0.1], [0.0, 0.9]])
    E = _strain(body, body.reference @ F.T, 0.5)
    local = kinematics.local_seth_hill(F, 0.5)
    assert np.abs(E[interior_nodes(body)[0]] - local).max() > 1e-3


def test_log_branch_is_limit_of_power_branch():
    body = make_body(2, 9)
    x = body.reference @ np.array([[1.1, 0.05], [0.0, 0.95]]).T
    E0 = _strain(body, x, 0.0)
    Eh = _strain(body, x, 1e-6)
    np.testing.assert_allclose(Eh, E0, atol=1e-6)


@pytest.mark.parametrize("m", [0.0, 1.0, 2.0])
def test_strain_is_objective(m):
    body = make_body(2, 9)
    F = np.array([[1.1, 0.2], [-0.1, 0.9]])
    t = 0.7
    R = np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])
    x = body.reference @ F.T
    np.testing.assert_allclose(_strain(body, x @ R.T + 3.0, m), _strain(body, x, m), atol=1e-13)


def test_own_perturbation_leaves_own_strain_unchanged():
    """Remark 0 check: omega[0] = 0, so dE(X)/dx(X) vanishes in a homogeneous state.

    Only the bond lengths change to first order along the bond directions; for
    a hydrostatic state the first-order change sums to zero by symmetry.
    """
    body = make_body(2, 13, m=1.0)
    c = interior_nodes(body)[len(interior_nodes(body)) // 2]
    x = body.reference * 1.05
    h = 1e-6
    for comp in range(2):
        xp, xm = x.copy(), x.copy()
        xp[c, comp] += h
        xm[c, comp] -= h
        dE = (_strain(body, xp, 1.0)[c] - _strain(body, xm, 1.0)[c]) / (2 * h)
        assert np.abs(dE).max() < 1e-8


def test_collapsed_bond_raises(backend):
    body = make_body(1, 8, backend=backend)
    x = body.reference.copy()
    x[3] = x[4]
    with pytest.raises(CollapsedBond):
        _strain(body, x, 1.0)


def test_cauchy_green_log_member_rejected():
    body = make_body(1, 8)
    with pytest.raises(ContractViolation):
        kinematics.cauchy_green_bar(body.families, body.nodes.volumes, body.reference,
                                    body.shapes.Linv, 0.0)


@pytest.mark.parametrize("m", [0.0, 0.5, 1.0])
def test_family_reference_matches_kernels(m):
    body = make_body(2, 9)
    x = body.reference @ np.array([[1.05, 0.1], [0.02, 0.97]]).T
    x = x + 0.01 * np.random.default_rng(1).normal(size=x.shape)
    node = 40
    nbr, xi, _, omega = body.families.family(node)
    dv = body.nodes.volumes[nbr]
    Y = x[nbr] - x[node]
    K = kinematics.shape_k_family(xi, omega, dv)
    Linv = tensor.invert_sym4(kinematics.shape_l_family(xi, omega, dv))
    np.testing.assert_allclose(kinematics.def_grad_family(xi, omega, dv, Y, np.linalg.inv(K)),
                               body.def_grad(x)[node], atol=1e-13)
    np.testing.assert_allclose(kinematics.seth_hill_family(xi, omega, dv, Y, Linv, m),
                               _strain(body, x, m)[node], atol=1e-12)


@pytest.mark.parametrize("dim,n", [(1, 12), (2, 9), (3, 6)])
def test_backends_agree(dim, n):
    from peristab import _backend
    if len(_backend.available()) < 2:
        pytest.skip("compiled kernels not built")
    rng = np.random.default_rng(3)
    bodies = [make_body(dim, n, N=2, backend=b) for b in ("python", "cython")]
    x = bodies[0].reference + 0.02 * rng.normal(size=bodies[0].reference.shape)
    for m in (0.0, 0.5, 1.0):
        a, b = (_strain(body, x, m) for body in bodies)
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(bodies[0].def_grad(x), bodies[1].def_grad(x), atol=1e-13)
