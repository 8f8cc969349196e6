"""Quasi-static load stepping and explicit dynamics."""

import csv
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse.linalg as spla

from . import stability
from .errors import CollapsedBond, ConfigurationError, ContractViolation, SimulationAborted

NEWTON_DOF_LIMIT = 2000
GROWTH_FACTOR = 1e3
MAX_ITER = 200
ADR_MAX_ITER = 20000
CFL_SAFETY = 0.5


@dataclass
class Constraint:
    """Prescribed displacement ``target`` (``len(nodes) x d``) on a node set.

    ``components`` lists the prescribed displacement components (default:
    all); the others stay free.
    """

    nodes: np.ndarray
    target: np.ndarray
    components: tuple = None

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=np.int64)
        self.target = np.asarray(self.target, dtype=float)
        if self.target.ndim != 2 or self.target.shape[0] != len(self.nodes):
            raise ConfigurationError("constraint target must have one row per node")
        d = self.target.shape[1]
        comps = tuple(range(d)) if self.components is None else tuple(self.components)
        if not comps or any(not 0 <= c < d for c in comps) or len(set(comps)) != len(comps):
            raise ConfigurationError(f"invalid constrained components {self.components!r}")
        self.components = comps


@dataclass
class ProblemSpec:
    """Body plus loading and solver settings.

    ``body_force`` is per unit mass (``rho0 b`` enters the balance), one row
    per node. Which components a constraint prescribes is set on the
    Constraint itself.
    """

    body: object
    constraints: list = field(default_factory=list)
    body_force: np.ndarray = None
    tol: float = 1e-10
    max_iter: int = MAX_ITER
    growth: float = GROWTH_FACTOR
    scheme: str = "auto"
    adr_max_iter: int = ADR_MAX_ITER
    threads: int = 1

    def __post_init__(self):
        seen = set()
        n = self.body.nodes.n_nodes
        for c in self.constraints:
            ids = set(c.nodes.tolist())
            if seen & ids:
                raise ConfigurationError("prescribed node sets must be disjoint")
            if c.nodes.size and (c.nodes.min() < 0 or c.nodes.max() >= n):
                raise ContractViolation("constraint refers to an unknown node id")
            seen |= ids
        if self.scheme not in ("auto", "newton", "adr"):
            raise ConfigurationError(f"unknown static scheme {self.scheme!r}")

    @property
    def free(self):
        """Boolean ``(n, d)`` mask of unconstrained displacement components."""
        mask = np.ones((self.body.nodes.n_nodes, self.body.dim), dtype=bool)
        for c in self.constraints:
            mask[np.ix_(c.nodes, c.components)] = False
        return mask

    def force_scale(self):
        return self.body.material.max_modulus() / self.body.nodes.spacing

    def external(self, ramp):
        if self.body_force is None:
            return 0.0
        return ramp * self.body.material.density * np.asarray(self.body_force, dtype=float)


@dataclass
class SolveOutcome:
    converged: bool
    x: np.ndarray
    u: np.ndarray
    residuals: list
    iterations: int
    steps: int
    scheme: str
    failed_step: int = None
    growth: float = None
    reason: str = ""


def apply_bc(reference, x, constraints, ramp):
    """Copy of ``x`` with constrained nodes at ``reference + ramp * target``."""
    if not 0.0 <= ramp <= 1.0:
        raise ContractViolation("ramp fraction must lie in [0, 1]")
    out = np.array(x, dtype=float, copy=True)
    n = len(out)
    for c in constraints:
        if c.nodes.size and (c.nodes.min() < 0 or c.nodes.max() >= n):
            raise ContractViolation("constraint refers to an unknown node id")
        ix = np.ix_(c.nodes, c.components)
        out[ix] = reference[ix] + ramp * c.target[:, c.components]
    return out


def _residual(problem, x, ramp, free):
    f = problem.body.internal_force(x) + problem.external(ramp)
    return f[free]


def _free_tangent(problem, x, free):
    dofs = np.flatnonzero(free.ravel())
    return stability.jacobian_fd(problem.body, x, threads=problem.threads)[dofs][:, dofs]


def _newton_step(problem, x, ramp, free, r):
    J = _free_tangent(problem, x, free).tocsc()
    with np.errstate(all="ignore"):
        delta = spla.spsolve(J, -r)
    if not np.all(np.isfinite(delta)):
        raise np.linalg.LinAlgError("singular tangent")
    x = x.copy()
    x[free] += delta
    return x


def _adr_mass(problem, x, free):
    rows = np.asarray(abs(_free_tangent(problem, x, free)).sum(axis=1)).ravel()
    return np.maximum(rows, 1e-30)


def solve_static(problem, steps=1, x0=None):
    """Ramp constraints and body forces over ``steps`` equal load increments.

    Each increment moves only the constrained nodes (free nodes keep their
    previous positions) and iterates to ``|f|_inf <= tol * C / dX``. Newton
    with the finite-difference tangent is used up to ``NEWTON_DOF_LIMIT``
    free DOFs, adaptive dynamic relaxation above (``scheme='auto'``). An
    increment diverges when the residual grows by ``growth`` over its initial
    value, a bond collapses, the tangent is singular, or iterations run out.
    """
    if steps < 1:
        raise ConfigurationError("at least one load step is required")
    body = problem.body
    X = body.nodes.positions
    x = np.array(X if x0 is None else x0, dtype=float)
    free = problem.free
    ndof = int(free.sum())
    scheme = problem.scheme
    if scheme == "auto":
        scheme = "newton" if ndof <= NEWTON_DOF_LIMIT else "adr"
    tol = problem.tol * problem.force_scale()
    history = []
    total = 0

    def fail(step, reason, growth=None):
        return SolveOutcome(False, x, x - X, history, total, step - 1, scheme, step, growth, reason)

    for step in range(1, steps + 1):
        ramp = step / steps
        x = apply_bc(X, x, problem.constraints, ramp)
        try:
            r = _residual(problem, x, ramp, free)
        except CollapsedBond as exc:
            return fail(step, f"collapsed bond: {exc}")
        r0 = np.abs(r).max() if r.size else 0.0
        history.append(r0)
        if r0 <= tol:
            continue
        try:
            if scheme == "newton":
                x, r, its, status = _newton_loop(problem, x, ramp, free, r, r0, tol, history)
            else:
                x, r, its, status = _adr_loop(problem, x, ramp, free, r, r0, tol, history)
        except CollapsedBond as exc:
            return fail(step, f"collapsed bond: {exc}")
        total += its
        if status != "ok":
            return fail(step, status, history[-1] / r0 if r0 else None)
    return SolveOutcome(True, x, x - X, history, total, steps, scheme)


def _diverged(problem, r, r0):
    rn = np.abs(r).max()
    if not np.isfinite(rn):
        return "non-finite residual"
    if rn >= problem.growth * r0:
        return f"residual grew by {rn / r0:.3g}"
    return None


def _newton_loop(problem, x, ramp, free, r, r0, tol, history):
    its = 0
    while np.abs(r).max() > tol:
        if its >= problem.max_iter:
            return x, r, its, "iteration limit"
        try:
            x = _newton_step(problem, x, ramp, free, r)
        except np.linalg.LinAlgError:
            return x, r, its, "singular tangent"
        its += 1
        r = _residual(problem, x, ramp, free)
        history.append(float(np.abs(r).max()))
        bad = _diverged(problem, r, r0)
        if bad:
            return x, r, its, bad
    return x, r, its, "ok"


def _adr_loop(problem, x, ramp, free, r, r0, tol, history):
    """Adaptive dynamic relaxation: unit pseudo time step, diagonal fictitious
    mass from Gershgorin row sums of the tangent, damping
    ``c = 2 sqrt(u.K1 u / u.u)`` with the diagonal local stiffness ``K1``
    estimated from consecutive residuals."""
    mass = _adr_mass(problem, x, free)
    start = x[free].copy()
    v = 0.5 * r / mass
    its = 0
    while True:
        x = x.copy()
        x[free] += v
        r_old = r
        r = _residual(problem, x, ramp, free)
        its += 1
        history.append(float(np.abs(r).max()))
        if np.abs(r).max() <= tol:
            return x, r, its, "ok"
        bad = _diverged(problem, r, r0)
        if bad:
            return x, r, its, bad
        if its >= problem.adr_max_iter:
            return x, r, its, "iteration limit"
        u = x[free] - start
        with np.errstate(divide="ignore", invalid="ignore"):
            k = np.where(v != 0, -(r - r_old) / (mass * v), 0.0)
        num = np.sum(u * k * u)
        den = np.sum(u * u)
        c = 2 * np.sqrt(num / den) if num > 0 and den > 0 else 0.0
        c = min(c, 1.9)
        v = ((2 - c) * v + 2 * r / mass) / (2 + c)


# -- explicit dynamics ---------------------------------------------------------


def stable_dt(body, safety=CFL_SAFETY):
    """``safety * dX * sqrt(rho0 / C)``."""
    return safety * body.nodes.spacing * np.sqrt(body.material.density / body.material.max_modulus())


def strain_energy(body, x):
    """Stored energy ``sum W(E_I) dV_I`` of the linear laws."""
    E = body.strain(x)
    S = body.stress(x)
    return 0.5 * float(np.einsum("nij,nij,n->", S, E, body.nodes.volumes))


@dataclass
class Trajectory:
    times: np.ndarray
    snapshots: list
    energy: np.ndarray
    kinetic: np.ndarray
    end_force: np.ndarray
    dt: float
    steps: int
    x: np.ndarray = None
    v: np.ndarray = None


def solve_dynamic(problem, dt, n_steps, ramp_time=0.0, x0=None, v0=None,
                  record_every=None, energy_every=1, force_nodes=None, dt_cap=None,
                  ramp_shape="linear"):
    """Velocity-Verlet integration of ``rho0 a = f + rho0 b``.

    Constrained nodes follow ``reference + r(t) target`` with
    ``r = min(t / ramp_time, 1)`` (``ramp_shape='linear'``) or the
    ``(1 - cos(pi t / ramp_time)) / 2`` profile (``'smooth'``), which starts
    and ends with zero velocity and so excites fewer short waves.
    ``force_nodes`` selects the node set whose reaction (``-sum f dV``, first
    component) is recorded every step. A non-finite state aborts with
    :class:`SimulationAborted` carrying the step index.
    """
    body = problem.body
    cap = stable_dt(body) / CFL_SAFETY if dt_cap is None else dt_cap
    if not 0 < dt:
        raise ConfigurationError("time step must be positive")
    if dt > cap:
        raise ConfigurationError(f"time step {dt:g} exceeds the stability cap {cap:g}")
    X = body.nodes.positions
    x = np.array(X if x0 is None else x0, dtype=float)
    v = np.zeros_like(x) if v0 is None else np.array(v0, dtype=float)
    rho = body.material.density
    vol = body.nodes.volumes
    free = problem.free
    pres = ~free
    cons = problem.constraints

    if ramp_shape not in ("linear", "smooth"):
        raise ConfigurationError(f"unknown ramp shape {ramp_shape!r}")

    def ramp_at(t):
        if ramp_time <= 0 or t >= ramp_time:
            return 1.0
        s = t / ramp_time
        return s if ramp_shape == "linear" else 0.5 * (1 - np.cos(np.pi * s))

    def accel(x):
        f = body.internal_force(x)
        return f, (f + problem.external(1.0)) / rho

    x = apply_bc(X, x, cons, ramp_at(0.0))
    f, a = accel(x)
    snaps, energy, kinetic, reaction = [], [], [], []

    def record(step, x, v, f):
        if force_nodes is not None:
            reaction.append(-float(np.sum(f[force_nodes, 0] * vol[force_nodes])))
        if energy_every and step % energy_every == 0:
            ke = 0.5 * rho * float(np.sum(vol[:, None] * v * v))
            kinetic.append(ke)
            energy.append(ke + strain_energy(body, x))
        if record_every and step % record_every == 0:
            snaps.append((step * dt, x.copy(), v.copy()))

    record(0, x, v, f)
    for step in range(1, n_steps + 1):
        t = step * dt
        v[free] += 0.5 * dt * a[free]
        x[free] += dt * v[free]
        x_new = apply_bc(X, x, cons, ramp_at(t))
        if cons:
            v[pres] = (x_new[pres] - x[pres]) / dt
        x = x_new
        try:
            f, a = accel(x)
        except CollapsedBond as exc:
            raise SimulationAborted(f"bond collapsed at step {step}", step=step) from exc
        v[free] += 0.5 * dt * a[free]
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
            raise SimulationAborted(f"non-finite state at step {step}", step=step)
        record(step, x, v, f)
    return Trajectory(
        np.arange(n_steps + 1) * dt, snaps, np.array(energy), np.array(kinetic),
        np.array(reaction), dt, n_steps, x, v,
    )


# -- output --------------------------------------------------------------------


def write_field_csv(path, nodes, x, v=None):
    """One row per node: id, reference coordinates, displacement, velocity."""
    d = nodes.dim
    axes = "xyz"[:d]
    header = ["id"] + [f"X{a}" for a in axes] + [f"u{a}" for a in axes]
    if v is not None:
        header += [f"v{a}" for a in axes]
    u = np.asarray(x) - nodes.positions
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for i in range(nodes.n_nodes):
            row = [i] + [repr(float(c)) for c in nodes.positions[i]] + [repr(float(c)) for c in u[i]]
            if v is not None:
                row += [repr(float(c)) for c in v[i]]
            w.writerow(row)
