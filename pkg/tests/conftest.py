import numpy as np
import pytest

from peristab import _backend, mesh
from peristab.material import Body, MaterialSpec

BACKENDS = _backend.available()

# filled by test_acceptance.py, printed at the end of the session
ACCEPTANCE = {}


def record(criterion, ok, detail):
    ACCEPTANCE.setdefault(criterion, []).append((bool(ok), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[crit]
        verdict = "PASS" if all(ok for ok, _ in parts) else "FAIL"
        tr.write_line(f"criterion {crit:>2}: {verdict}")
        for ok, detail in parts:
            tr.write_line(f"    [{'ok' if ok else '--'}] {detail}")


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


def make_body(dim, n, N=3, m=1.0, dx=1.0, backend=None, **material):
    nodes = mesh.build_grid(dim, [n * dx] * dim, dx)
    fam = mesh.build_families(nodes, mesh.InfluenceSpec.from_grid(N, dx))
    return Body(nodes, fam, MaterialSpec(m=m, **material), backend=backend)


def random_f(rng, dim, spread=0.2):
    while True:
        F = np.eye(dim) + spread * rng.uniform(-1, 1, (dim, dim))
        if np.linalg.det(F) > 0.2:
            return F


def interior_nodes(body, hops=1):
    """Nodes at least ``hops`` horizons from every face."""
    N = int(round(np.abs(body.families.xi).max() / body.nodes.spacing))
    idx = body.nodes.indices
    counts = np.array(body.nodes.counts)
    ok = np.all((idx >= hops * N) & (idx < counts - hops * N), axis=1)
    return np.flatnonzero(ok)
