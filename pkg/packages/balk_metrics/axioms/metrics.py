"""
Axiom checkers for finite metrics and G-metric tables.

Every condition is evaluated on the full broadcast grid (n**3 for the
triangle inequality, n**4 for the rectangle inequality); the first violation
in lexicographic index order is reported.
"""

from typing import List, Optional

import numpy as np
import structlog

from ..config import BalkConfig, CheckReport, Verdict, Witness, resolve
from ..core.tables import FiniteMetric, GMetricTable
from ..core.tolerance import Tolerance

logger = structlog.get_logger()


def _first(violations: np.ndarray):
    return tuple(int(i) for i in np.argwhere(violations)[0])


def _labels(universe, indices) -> List[str]:
    return [universe.names[i] for i in indices]


def _fail(check: str, tol: Tolerance, examined: int, witness: Witness, notes=None) -> CheckReport:
    logger.info("check_failed", check=check, condition=witness.condition)
    return CheckReport(
        check=check,
        verdict=Verdict.FAIL,
        witness=witness,
        triples_examined=examined,
        epsilon=tol.eps,
        tolerance_mode=tol.mode,
        notes=list(notes or []),
    )


def _pass(check: str, tol: Tolerance, examined: int, notes=None) -> CheckReport:
    return CheckReport(
        check=check,
        verdict=Verdict.PASS,
        triples_examined=examined,
        epsilon=tol.eps,
        tolerance_mode=tol.mode,
        notes=list(notes or []),
    )


def check_metric(d: FiniteMetric, tol: Optional[Tolerance] = None, config: Optional[BalkConfig] = None) -> CheckReport:
    """
    Check identity, symmetry, positivity and the triangle inequality.

    The triangle witness lists points (i, k, j) with lhs d(i, j) and
    rhs d(i, k) + d(k, j).
    """
    _, tol = resolve(config, tol)
    D = d.dist
    n = d.n
    u = d.universe
    examined = n ** 3

    diag = np.diag(D)
    bad = ~tol.eq(diag, 0.0)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        return _fail("metric", tol, examined, Witness(
            condition="identity", points=_labels(u, [i, i]), lhs=float(D[i, i]), rhs=0.0, relation="=="))

    bad = ~tol.eq(D, D.T)
    if bad.any():
        i, j = _first(bad)
        return _fail("metric", tol, examined, Witness(
            condition="symmetry", points=_labels(u, [i, j]), lhs=float(D[i, j]), rhs=float(D[j, i]), relation="=="))

    off = ~np.eye(n, dtype=bool)
    bad = off & ~tol.positive(D)
    if bad.any():
        i, j = _first(bad)
        value = float(D[i, j])
        return _fail("metric", tol, examined, Witness(
            condition="positivity", points=_labels(u, [i, j]), lhs=value, rhs=0.0, relation=">",
            tolerance_boundary=bool(tol.on_boundary(value))))

    lhs = D[:, None, :]
    rhs = D[:, :, None] + D[None, :, :]
    bad = tol.exceeds(lhs, rhs)
    if bad.any():
        i, k, j = _first(bad)
        return _fail("metric", tol, examined, Witness(
            condition="triangle", points=_labels(u, [i, k, j]),
            lhs=float(D[i, j]), rhs=float(D[i, k] + D[k, j]), relation="<= sum"))
    return _pass("metric", tol, examined)


def is_ultrametric(d: FiniteMetric, tol: Optional[Tolerance] = None) -> bool:
    """Strong triangle inequality d(i, j) <= max(d(i, k), d(k, j)) for all i, k, j."""
    tol = tol or Tolerance()
    D = d.dist
    return not bool(tol.exceeds(D[:, None, :], np.maximum(D[:, :, None], D[None, :, :])).any())


def check_g_metric(g: GMetricTable, tol: Optional[Tolerance] = None, config: Optional[BalkConfig] = None) -> CheckReport:
    """
    Check the G-metric conditions on a multiset table.

    (i) G(x,x,x) = 0; (ii) G(x,x,y) > 0 for x != y; (iii) G(x,x,y) <= G(x,y,z)
    for z != y; (v) G(x,y,z) <= G(x,a,a) + G(a,y,z). Permutation invariance
    holds by the encoding and is noted as structural. When (i)-(iii) hold the
    table must also be nonnegative; a negative entry is then reported.
    """
    _, tol = resolve(config, tol)
    G = g.cube
    n = g.n
    u = g.universe
    examined = n + n * (n - 1) + n ** 3 + n ** 4
    notes = ["condition (iv) holds structurally: tables are keyed by multisets"]
    idx = np.arange(n)

    diag = G[idx, idx, idx]
    bad = ~tol.eq(diag, 0.0)
    if bad.any():
        x = int(np.flatnonzero(bad)[0])
        return _fail("g", tol, examined, Witness(
            condition="i", points=_labels(u, [x, x, x]), lhs=float(diag[x]), rhs=0.0, relation="=="), notes)

    pair = G[idx[:, None], idx[:, None], idx[None, :]]  # pair[x, y] = G(x, x, y)
    off = ~np.eye(n, dtype=bool)
    bad = off & ~tol.positive(pair)
    if bad.any():
        x, y = _first(bad)
        value = float(pair[x, y])
        return _fail("g", tol, examined, Witness(
            condition="ii", points=_labels(u, [x, x, y]), lhs=value, rhs=0.0, relation=">",
            tolerance_boundary=bool(tol.on_boundary(value))), notes)

    lhs = pair[:, :, None]
    distinct_yz = ~np.eye(n, dtype=bool)[None, :, :]
    bad = distinct_yz & tol.exceeds(lhs, G)
    if bad.any():
        x, y, z = _first(bad)
        return _fail("g", tol, examined, Witness(
            condition="iii", points=_labels(u, [x, y, z]), lhs=float(pair[x, y]), rhs=float(G[x, y, z]),
            relation="<="), notes)

    if (G < -tol.margin(G)).any():
        x, y, z = _first(G < -tol.margin(G))
        return _fail("g", tol, examined, Witness(
            condition="nonnegativity", points=_labels(u, [x, y, z]), lhs=float(G[x, y, z]), rhs=0.0,
            relation=">="), notes)

    spoke = G[idx[:, None], idx[None, :], idx[None, :]]  # spoke[x, a] = G(x, a, a)
    lhs = G[:, :, :, None]
    rhs = spoke[:, None, None, :] + np.transpose(G, (1, 2, 0))[None, :, :, :]
    bad = tol.exceeds(lhs, rhs)
    if bad.any():
        x, y, z, a = _first(bad)
        return _fail("g", tol, examined, Witness(
            condition="v", points=_labels(u, [x, y, z, a]), lhs=float(G[x, y, z]),
            rhs=float(spoke[x, a] + G[a, y, z]), relation="<= sum"), notes)
    return _pass("g", tol, examined, notes)


def check_symmetric_g(
    g: GMetricTable, tol: Optional[Tolerance] = None, config: Optional[BalkConfig] = None
) -> CheckReport:
    """Check the G-metric conditions and G(x,y,y) = G(x,x,y) for all x != y."""
    _, tol = resolve(config, tol)
    base = check_g_metric(g, tol)
    if not base.passed:
        return base.renamed("symmetric-g")
    G = g.cube
    n = g.n
    idx = np.arange(n)
    heavy = G[idx[:, None], idx[None, :], idx[None, :]]  # G(x, y, y)
    light = G[idx[:, None], idx[:, None], idx[None, :]]  # G(x, x, y)
    bad = ~np.eye(n, dtype=bool) & ~tol.eq(heavy, light)
    if bad.any():
        x, y = _first(bad)
        return _fail("symmetric-g", tol, base.triples_examined + n * n, Witness(
            condition="symmetry", points=_labels(g.universe, [x, y]), lhs=float(heavy[x, y]),
            rhs=float(light[x, y]), relation="=="), base.notes)
    return _pass("symmetric-g", tol, base.triples_examined + n * n, base.notes)
