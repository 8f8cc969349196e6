"""Command-line front end: the paper's experiments, stability maps and checks.

``peristab <command> --config <file> [--out <dir>] [--threads <n>]``

The config file is INI style with one section per command, e.g.::

    [singular-bar]
    alpha = 10
    sigma_over_e0 = -1e-5

Every run writes CSV tables plus ``<command>.meta`` (key=value) echoing all
parameters, defaulted or not. Exit codes: 0 success, 2 solver divergence
(outputs are still written), 1 configuration error.
"""

import argparse
import configparser
import csv
import itertools
import os
import sys

import numpy as np
from scipy import integrate, optimize

from . import __version__, mesh, solver, stability, tensor
from ._backend import BACKEND
from .errors import ConfigurationError, PeristabError, SimulationAborted
from .material import Body, MaterialSpec

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED = 0, 1, 2

DEFAULTS = {
    "singular-bar": {
        "alpha": 10.0,
        "sigma_over_e0": 1e-3,
        "m": 1.0,
        "horizon_nodes": 3,
        "nodes": 500,
        "length": 1.0,
        "e0": 1.0,
        "modulus_sampling": "cell",
        "scheme": "adr",
        "tol": 1e-10,
        "adr_max_iter": 50000,
    },
    "step-size": {
        "strains": "1.0, -0.001, 0.0",
        "steps": "1, 2",
        "search_steps": True,
        "max_search_steps": 64,
        "m": 1.0,
        "horizon_nodes": 3,
        "nodes": 400,
        "layers": 6,
        "tol": 1e-10,
        "max_iter": 200,
        "growth": 1e3,
        "scheme": "auto",
    },
    "cuboid": {
        "m": 0.0,
        "strain": -0.01,
        "extent": "4, 1, 1",
        "spacing": 1.0 / 6.0,
        "horizon_nodes": 3,
        "lam": 0.4,
        "mu": 0.4,
        "density": 1.0,
        "dt_factor": 0.5,
        "t_end": 80.0,
        "ramp_time": 20.0,
        "ramp_shape": "smooth",
        "layers": 3,
        "snapshots": 4,
        "compare_half_dt": True,
    },
    "dispersion": {
        "m_values": "0, 0.5, 1",
        "u0_small": 1e-8,
        "u0_large": 0.2,
        "horizon_nodes": 3,
        "dx": 1.0,
        "e0": 1.0,
        "rho0": 1.0,
        "k_samples": 601,
        "zero_tol": 1e-9,
    },
    "stability-map": {
        "horizon_nodes": 3,
        "dims": "1, 2",
        "m_min": -1.0,
        "m_max": 2.0,
        "m_samples": 61,
        "a_min": -0.3,
        "a_max": 0.3,
        "a_samples": 241,
    },
    "verify": {
        "n_min": 3,
        "n_max": 12,
        "a": 0.0,
        "m": 1.0,
    },
}


# -- config ----------------------------------------------------------------------


def _coerce(default, raw):
    if isinstance(default, bool):
        low = raw.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    return raw.strip()


def load_config(command, path=None, overrides=None):
    """Parameters for ``command``: defaults, then the file section, then overrides."""
    if command not in DEFAULTS:
        raise ConfigurationError(f"unknown command {command!r}")
    params = dict(DEFAULTS[command])
    explicit = set()
    items = {}
    if path is not None:
        cp = configparser.ConfigParser()
        if not cp.read(path, encoding="utf-8"):
            raise ConfigurationError(f"cannot read config file {path}")
        if cp.has_section(command):
            items.update(cp.items(command))
    items.update({k: str(v) for k, v in (overrides or {}).items()})
    for key, raw in items.items():
        if key not in params:
            raise ConfigurationError(f"unknown parameter {key!r} for {command}")
        try:
            params[key] = _coerce(DEFAULTS[command][key], raw)
        except ValueError as exc:
            raise ConfigurationError(f"{command}.{key}: {exc}") from None
        explicit.add(key)
    return params, explicit


def _floats(text):
    return [float(v) for v in str(text).replace(";", ",").split(",") if v.strip()]


def _ints(text):
    return [int(v) for v in _floats(text)]


def write_meta(path, command, params, explicit, results):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"command={command}\n")
        fh.write(f"version={__version__}\n")
        fh.write(f"backend={BACKEND}\n")
        for key in sorted(params):
            fh.write(f"param.{key}={params[key]}\n")
        fh.write("defaulted=" + ",".join(sorted(set(params) - set(explicit))) + "\n")
        for key in sorted(results):
            fh.write(f"result.{key}={results[key]}\n")


def _write_rows(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


# -- singular bar ----------------------------------------------------------------


def singular_modulus(x, alpha, length=1.0, e0=1.0):
    s = np.sqrt(np.clip(np.asarray(x) / length - 0.5, 0.0, None))
    with np.errstate(divide="ignore"):
        soft = e0 / (1 + alpha / (2 * s))
    return np.where(np.asarray(x) <= length / 2, e0, soft)


def _compliance(a, b, alpha, length, e0):
    """``int_a^b dx / E(x)`` in closed form."""
    lo = np.sqrt(np.clip(a / length - 0.5, 0, None))
    hi = np.sqrt(np.clip(b / length - 0.5, 0, None))
    return ((b - a) + alpha * length * (hi - lo)) / e0


def singular_analytic(x, alpha, length=1.0):
    """Normalised ``E0 u/(sigma L)`` and ``E0 eps/sigma`` of the local linear bar."""
    xl = np.asarray(x) / length
    s = np.sqrt(np.clip(xl - 0.5, 0, None))
    u = np.where(xl <= 0.5, xl, xl + alpha * s)
    with np.errstate(divide="ignore"):
        e = np.where(xl <= 0.5, 1.0, 1 + alpha / (2 * s))
    return u, e


def singular_local_finite(x, alpha, sigma, m, length=1.0, e0=1.0):
    """Normalised displacement of the local bar with the same finite-strain law
    ``P = F E g_m(F) = sigma`` (``g_m`` the 1D Seth-Hill strain)."""

    def stretch(xx):
        E = float(singular_modulus(xx, alpha, length, e0))
        f = lambda F: F * E * float(stability.seth_hill_1d(m, F - 1)) - sigma
        lo, hi = (1.0, 2.0) if sigma > 0 else (0.5, 1.0)
        while f(hi) < 0:
            hi *= 2
        while f(lo) > 0:
            lo = 0.5 * lo
        return optimize.brentq(f, lo, hi, xtol=1e-15)

    half = length / 2

    def segment(a, b):
        # x = L/2 + L s^2 above the singular point removes the 1/sqrt blow-up
        val = 0.0
        if a < half:
            val += integrate.quad(lambda t: stretch(t) - 1, a, min(b, half), limit=200)[0]
        if b > half:
            sa = np.sqrt(max(a - half, 0.0) / length)
            sb = np.sqrt((b - half) / length)
            val += integrate.quad(lambda s: (stretch(half + length * s * s) - 1) * 2 * length * s,
                                  sa, sb, limit=200)[0]
        return val

    out = np.zeros(len(x))
    prev, acc = 0.0, 0.0
    for i, xi in enumerate(np.asarray(x, dtype=float)):
        acc += segment(prev, xi)
        out[i] = acc
        prev = xi
    return out * e0 / (sigma * length)


def run_singular_bar(p, threads=1):
    """Solve the stress-loaded bar and compare with the local solutions."""
    n, L, N = int(p["nodes"]), float(p["length"]), int(p["horizon_nodes"])
    sigma = float(p["sigma_over_e0"]) * p["e0"]
    dx = L / n
    nodes = mesh.build_grid(1, [L], dx)
    fam = mesh.build_families(nodes, mesh.InfluenceSpec.from_grid(N, dx))
    X = nodes.positions[:, 0]
    if p["modulus_sampling"] == "cell":
        E = dx / _compliance(X - dx / 2, X + dx / 2, p["alpha"], L, p["e0"])
    elif p["modulus_sampling"] == "node":
        E = singular_modulus(X, p["alpha"], L, p["e0"])
    else:
        raise ConfigurationError("modulus_sampling must be 'cell' or 'node'")
    body = Body(nodes, fam, MaterialSpec(m=p["m"], law="hookean", youngs=E))
    fixed = mesh.boundary_region(nodes, 0, "min", N)
    loaded = mesh.boundary_region(nodes, 0, "max", 1)
    bforce = np.zeros((n, 1))
    bforce[loaded, 0] = sigma / (body.material.density * dx)
    problem = solver.ProblemSpec(
        body, [solver.Constraint(fixed, np.zeros((len(fixed), 1)))], body_force=bforce,
        tol=p["tol"], scheme=p["scheme"], adr_max_iter=p["adr_max_iter"], threads=threads,
    )
    out = solver.solve_static(problem, 1)
    u_an, e_an = singular_analytic(X, p["alpha"], L)
    res = {
        "x_over_l": X / L, "u_analytic": u_an, "strain_analytic": e_an,
        "outcome": out, "u_finite": None,
    }
    if sigma == 0:
        res["u"] = np.zeros(n)
        res["strain"] = np.zeros(n)
        res["u_error"] = float(np.abs(out.u).max())
        res["strain_error"] = 0.0
        return res
    res["u"] = out.u[:, 0] * p["e0"] / (sigma * L)
    res["strain"] = (body.def_grad(out.x)[:, 0, 0] - 1) * p["e0"] / sigma
    if abs(sigma / p["e0"]) >= 1e-4:
        res["u_finite"] = singular_local_finite(X, p["alpha"], sigma, p["m"], L, p["e0"])
    inner = (X > 2 * N * dx) & (X < L - 2 * N * dx)
    res["u_error"] = float(np.abs(res["u"] - u_an)[inner].max() / np.abs(u_an).max())
    res["strain_error"] = float(np.abs(res["strain"] - e_an)[inner].max())
    if res["u_finite"] is not None:
        res["u_error_vs_finite"] = float(
            np.abs(res["u"] - res["u_finite"])[inner].max() / np.abs(res["u_finite"]).max())
    return res


def cmd_singular_bar(p, out_dir, threads=1):
    r = run_singular_bar(p, threads)
    o = r["outcome"]
    uf = r["u_finite"] if r["u_finite"] is not None else np.full(len(r["u"]), np.nan)
    _write_rows(
        os.path.join(out_dir, "singular_bar.csv"),
        ["x_over_L", "u_norm", "u_analytic", "u_local_finite", "strain_norm", "strain_analytic"],
        zip(r["x_over_l"], r["u"], r["u_analytic"], uf, r["strain"], r["strain_analytic"]),
    )
    results = {
        "converged": o.converged, "iterations": o.iterations, "scheme": o.scheme,
        "reason": o.reason or "-", "u_linf_rel_error": r["u_error"],
        "strain_linf_error": r["strain_error"],
        "residual_final": o.residuals[-1] if o.residuals else 0.0,
    }
    if "u_error_vs_finite" in r:
        results["u_linf_rel_error_vs_local_finite"] = r["u_error_vs_finite"]
    return results, (EXIT_OK if o.converged else EXIT_DIVERGED)


# -- step size -------------------------------------------------------------------


def step_size_problem(p, strain, threads=1):
    n, N = int(p["nodes"]), int(p["horizon_nodes"])
    dx = 1.0 / n
    nodes = mesh.build_grid(1, [1.0], dx)
    fam = mesh.build_families(nodes, mesh.InfluenceSpec.from_grid(N, dx))
    body = Body(nodes, fam, MaterialSpec(m=p["m"]))
    X = nodes.positions
    cons = [
        solver.Constraint(ids, strain * X[ids])
        for ids in (mesh.boundary_region(nodes, 0, side, int(p["layers"])) for side in ("min", "max"))
    ]
    return solver.ProblemSpec(body, cons, tol=p["tol"], max_iter=int(p["max_iter"]),
                              growth=p["growth"], scheme=p["scheme"], threads=threads)


def min_converging_steps(p, strain, threads=1, limit=None):
    """Smallest step count that converges (doubling, then bisection), or None."""
    limit = int(p["max_search_steps"]) if limit is None else limit
    ok = lambda s: solver.solve_static(step_size_problem(p, strain, threads), s).converged
    hi = 1
    while not ok(hi):
        hi *= 2
        if hi > limit:
            return None
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def run_step_size(p, threads=1):
    rows = []
    for strain in _floats(p["strains"]):
        for steps in _ints(p["steps"]):
            o = solver.solve_static(step_size_problem(p, strain, threads), steps)
            rows.append({"strain": strain, "steps": steps, "converged": o.converged,
                         "iterations": o.iterations, "failed_step": o.failed_step,
                         "scheme": o.scheme, "reason": o.reason})
    minimal = {}
    if p["search_steps"]:
        for strain in _floats(p["strains"]):
            minimal[strain] = min_converging_steps(p, strain, threads)
    return rows, minimal


def cmd_step_size(p, out_dir, threads=1):
    rows, minimal = run_step_size(p, threads)
    _write_rows(
        os.path.join(out_dir, "step_size.csv"),
        ["strain", "steps", "converged", "iterations", "failed_step", "scheme", "reason"],
        ([r["strain"], r["steps"], int(r["converged"]), r["iterations"],
          "" if r["failed_step"] is None else r["failed_step"], r["scheme"], r["reason"]]
         for r in rows),
    )
    results = {f"min_steps[{s:g}]": ("none<=%d" % p["max_search_steps"] if k is None else k)
               for s, k in minimal.items()}
    results["runs"] = len(rows)
    results["diverged_runs"] = sum(not r["converged"] for r in rows)
    return results, (EXIT_DIVERGED if results["diverged_runs"] else EXIT_OK)


# -- cuboid ----------------------------------------------------------------------


def roughness(nodes, u):
    """Per-component ``max |u - mean of the 26 neighbours|`` over nodes that
    have all 26 grid neighbours."""
    if nodes.dim != 3:
        raise ConfigurationError("roughness is defined on 3D grids")
    counts = np.array(nodes.counts)
    idx = nodes.indices
    ids = np.flatnonzero(np.all((idx > 0) & (idx < counts - 1), axis=1))
    if ids.size == 0:
        return np.zeros(3)
    acc = np.zeros((ids.size, 3))
    for off in itertools.product((-1, 0, 1), repeat=3):
        if any(off):
            acc += u[np.ravel_multi_index(tuple((idx[ids] + off).T), nodes.counts)]
    return np.abs(u[ids] - acc / 26).max(axis=0)


def cuboid_problem(p):
    ext = _floats(p["extent"])
    if len(ext) != 3:
        raise ConfigurationError("cuboid extent needs three values")
    dx = float(p["spacing"])
    nodes = mesh.build_grid(3, ext, dx)
    fam = mesh.build_families(nodes, mesh.InfluenceSpec.from_grid(int(p["horizon_nodes"]), dx))
    spec = MaterialSpec(m=p["m"], law="isotropic", lam=p["lam"], mu=p["mu"], density=p["density"])
    body = Body(nodes, fam, spec)
    X = nodes.positions
    centre = ext[0] / 2
    cons = []
    ends = []
    for side in ("min", "max"):
        ids = mesh.boundary_region(nodes, 0, side, int(p["layers"]))
        target = np.zeros((len(ids), 3))
        target[:, 0] = p["strain"] * (X[ids, 0] - centre)
        cons.append(solver.Constraint(ids, target, components=(0,)))
        ends.append(ids)
    return solver.ProblemSpec(body, cons), ends[1]


def run_cuboid(p, dt_factor=None, record=0):
    problem, end = cuboid_problem(p)
    body = problem.body
    dt = (p["dt_factor"] if dt_factor is None else dt_factor) * solver.stable_dt(body, 1.0)
    n = int(round(p["t_end"] / dt))
    every = max(1, n // record) if record else None
    traj = solver.solve_dynamic(problem, dt, n, ramp_time=p["ramp_time"], record_every=every,
                                energy_every=0, force_nodes=end, ramp_shape=p["ramp_shape"])
    rough = roughness(body.nodes, traj.x - body.nodes.positions)
    return body, traj, rough


def end_force_change(full, half):
    """``max |F(dt) - F(dt/2)| / max |F(dt)|`` over the common sample times."""
    fh = half.end_force[::2][: len(full.end_force)]
    diff = np.abs(full.end_force[: len(fh)] - fh).max()
    return float(diff / np.abs(full.end_force).max())


def cmd_cuboid(p, out_dir, threads=1):
    try:
        body, traj, rough = run_cuboid(p, record=int(p["snapshots"]))
    except SimulationAborted as exc:
        return {"aborted_step": exc.step, "reason": str(exc)}, EXIT_DIVERGED
    for k, (t, x, v) in enumerate(traj.snapshots):
        solver.write_field_csv(os.path.join(out_dir, f"cuboid_{k:03d}.csv"), body.nodes, x, v)
    results = {
        "nodes": body.nodes.n_nodes, "dt": traj.dt, "steps": traj.steps,
        "roughness_ux": rough[0], "roughness_uy": rough[1], "roughness_uz": rough[2],
        "roughness_ratio_transverse_axial": max(rough[1], rough[2]) / max(rough[0], 1e-300),
    }
    force_half = None
    if p["compare_half_dt"]:
        try:
            _, half, _ = run_cuboid(p, dt_factor=p["dt_factor"] / 2)
        except SimulationAborted as exc:
            results["half_dt_aborted_step"] = exc.step
            half = None
        if half is not None:
            force_half = half.end_force[::2][: len(traj.end_force)]
            results["end_force_rel_change_half_dt"] = end_force_change(traj, half)
    fh = force_half if force_half is not None else np.full(len(traj.end_force), np.nan)
    _write_rows(os.path.join(out_dir, "cuboid_end_force.csv"), ["t", "force", "force_half_dt"],
                zip(traj.times, traj.end_force, np.pad(fh, (0, len(traj.end_force) - len(fh)),
                                                       constant_values=np.nan)))
    return results, EXIT_OK


# -- dispersion ------------------------------------------------------------------


def run_dispersion(p):
    dx, N = float(p["dx"]), int(p["horizon_nodes"])
    k = np.linspace(0.0, 2 * np.pi / dx, int(p["k_samples"]))
    curves = {}
    for u0_key in ("u0_small", "u0_large"):
        for m in _floats(p["m_values"]):
            w2 = stability.dispersion_omega2(k, p[u0_key] * dx, m, N, dx, p["e0"], p["rho0"])
            curves[(u0_key, m)] = w2
    zeros = {key: stability.zero_crossings(k, w, p["zero_tol"]) for key, w in curves.items()}
    return k, curves, zeros


def cmd_dispersion(p, out_dir, threads=1):
    k, curves, zeros = run_dispersion(p)
    keys = list(curves)
    _write_rows(os.path.join(out_dir, "dispersion.csv"),
                ["k"] + [f"omega2[{u}][m={m:g}]" for u, m in keys],
                (np.column_stack([k] + [curves[c] for c in keys])))
    _write_rows(os.path.join(out_dir, "dispersion_zeros.csv"), ["u0", "m", "k_zero"],
                ([u, m, z] for (u, m), zs in zeros.items() for z in zs))
    results = {f"zeros[{u}][m={m:g}]": len(z) for (u, m), z in zeros.items()}
    small = [curves[("u0_small", m)] for m in _floats(p["m_values"])]
    scale = np.abs(small[0]).max()
    results["small_u0_max_spread_rel"] = float(
        max(np.abs(c - small[0]).max() for c in small) / scale)
    return results, EXIT_OK


# -- stability maps --------------------------------------------------------------


def cmd_stability_map(p, out_dir, threads=1):
    N = int(p["horizon_nodes"])
    results = {}
    for dim in _ints(p["dims"]):
        rmap = stability.region_map_range(
            dim, N, (p["m_min"], p["m_max"]), (p["a_min"], p["a_max"]),
            (int(p["m_samples"]), int(p["a_samples"])),
        )
        rmap.to_csv(os.path.join(out_dir, f"stability_map_{dim}d.csv"))
        crit = (stability.critical_strain_1d if dim == 1 else stability.critical_strain_2d)(1.0, N)
        results[f"critical_strain_{dim}d[m=1]"] = crit.value if crit else "none"
        results[f"boundary_{dim}d[m=1]"] = " ".join(f"{b:.4f}" for b in rmap.boundary(1.0))
    return results, EXIT_OK


# -- verification ----------------------------------------------------------------


def appendix_a_linv(V):
    """``(1/V)(2 d_km d_ln + 2 d_kn d_lm - d_kl d_mn)``."""
    return tensor.isotropic4(2, -1.0 / V, 2.0 / V)


def run_verify(p):
    rows = []
    V = 1.0
    L = V / 8 * (tensor.isotropic4(2, 1.0, 1.0))
    dev = float(np.abs(tensor.invert_sym4(L) - appendix_a_linv(V)).max())
    rows.append(("appendix_a_linv", dev, 1e-12, dev <= 1e-12))
    g = tensor.gamma6_array(2)
    contraction = np.einsum("ij,rs,ijklrs->kl", np.eye(2), np.eye(2), g)
    dev = float(np.abs(contraction - 3 * np.eye(2)).max())
    rows.append(("gamma_contraction", dev, 0.0, dev == 0.0))
    Ns = list(range(int(p["n_min"]), int(p["n_max"]) + 1))
    for pat in stability.LATTICE_PATTERNS:
        devs = []
        for N in Ns:
            exact, closed = stability.lattice_sum(pat, N)
            devs.append(abs(closed - exact) / abs(exact))
            rows.append((f"lattice[{pat}][N={N}]", devs[-1], float("nan"), True))
        rows.append((f"lattice[{pat}] improves N={Ns[0]}->{Ns[-1]}", devs[-1] - devs[0], 0.0,
                     devs[-1] < devs[0]))
        steps = np.diff(devs)
        rows.append((f"lattice[{pat}] monotone N={Ns[0]}..{Ns[-1]}", float(steps.max()), 0.0,
                     bool(np.all(steps < 0))))
    for N in Ns:
        direct = stability.eq_2ddfs_direct(p["m"], p["a"], N)
        closed = float(stability.eig_2d_hydro(p["m"], p["a"], N)[0])
        d = float(np.linalg.eigvalsh(direct).max())
        rows.append((f"eq_2ddfs_direct_vs_closed[N={N}]", abs(d - closed) / abs(d),
                     float("nan"), True))
    return rows


def cmd_verify(p, out_dir, threads=1):
    rows = run_verify(p)
    _write_rows(os.path.join(out_dir, "verify.csv"), ["check", "deviation", "tolerance", "pass"],
                ([c, d, t, int(ok)] for c, d, t, ok in rows))
    failed = [c for c, _, _, ok in rows if not ok]
    return {"checks": len(rows), "failed": " ".join(failed) or "-"}, EXIT_OK


COMMANDS = {
    "singular-bar": cmd_singular_bar,
    "step-size": cmd_step_size,
    "cuboid": cmd_cuboid,
    "dispersion": cmd_dispersion,
    "stability-map": cmd_stability_map,
    "verify": cmd_verify,
}


def main(argv=None):
    parser = argparse.ArgumentParser(prog="peristab", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="INI file with a section named after the command")
    parser.add_argument("--out", default=".", help="output directory (created if missing)")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override one parameter")
    args = parser.parse_args(argv)
    try:
        if args.threads < 1:
            raise ConfigurationError("--threads must be at least 1")
        overrides = {}
        for item in args.set:
            key, sep, value = item.partition("=")
            if not sep:
                raise ConfigurationError(f"--set expects KEY=VALUE, got {item!r}")
            overrides[key.strip()] = value
        params, explicit = load_config(args.command, args.config, overrides)
        os.makedirs(args.out, exist_ok=True)
        results, code = COMMANDS[args.command](params, args.out, args.threads)
    except (ConfigurationError, ValueError) as exc:
        print(f"peristab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PeristabError as exc:
        print(f"peristab: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    results["exit_code"] = code
    write_meta(os.path.join(args.out, f"{args.command}.meta"), args.command, params, explicit,
               results)
    for key in sorted(results):
        print(f"{key} = {results[key]}")
    if code == EXIT_DIVERGED:
        print("peristab: solver diverged (outputs written)", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
