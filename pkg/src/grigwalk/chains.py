"""Centered Markov chains: cycle decompositions of torsion-measure walks on
Schreier-graph windows, symmetrization, and escape probabilities.

A walk driven by a measure whose atoms are all torsion decomposes into weighted
oriented cycles: for each atom g of order m, every <g>-orbit (x, xg, ..., x
g^{j-1}) contributes one cycle of weight mu(g) whose edges are the g-labeled
moves.  Each directed edge lies in exactly one cycle and the cycle weights
through any vertex sum to one, which is the centering condition.

Windows are finite truncations: cycles that leave the window stay open and
their missing mass is absorbed at the outside, so vertex-sum validation only
applies to interior vertices.  Recurrence diagnostics compare the escape
probability (hit the window boundary before returning to the basepoint) of the
kernel q and of its symmetrization q0(x,y) = (q(x,y) + q(y,x))/2 across
growing radii; both are computed by direct sparse solves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from .core import element_order
from .measures import FiniteMeasure
from .walks import OrbitIndex, _atoms_and_weights
from .wreath import GroupAction

SUM_TOL = 1e-12


@dataclass
class Cycle:
    """Oriented edge-self-avoiding cycle: list of (vertex, atom label, vertex)."""

    edges: list[tuple[int, str, int]]
    weight: float
    closed: bool = True


class CenteredChain:
    """Finite window of a Schreier graph with a weighted cycle decomposition."""

    def __init__(self, points, index, cycles, basepoint_idx, interior):
        self.points = points
        self.index = index
        self.cycles = cycles
        self.basepoint_idx = basepoint_idx
        self.interior = interior  # boolean array: all atom-orbits stay inside

    @property
    def n(self) -> int:
        return len(self.points)

    def kernel(self) -> sp.csr_matrix:
        """q(x,y) = sum of weights of cycles using the edge (x,y); rows of
        boundary vertices may sum to less than one (mass absorbed outside)."""
        rows, cols, vals = [], [], []
        for cyc in self.cycles:
            for u, _, v in cyc.edges:
                if v >= 0:
                    rows.append(u)
                    cols.append(v)
                    vals.append(cyc.weight)
        return sp.csr_matrix((vals, (rows, cols)), shape=(self.n, self.n))


def window_points(action: GroupAction, measure: FiniteMeasure, radius: int, budget: int = 200_000):
    """Ball of the given graph radius around the basepoint under atom moves
    (atoms and their inverses, so windows are symmetric)."""
    bases, _ = _atoms_and_weights(measure, action)
    all_bases = bases + [action.inv(b) for b in bases]
    oi = OrbitIndex(action, all_bases, action.basepoint)
    seen = {0}
    frontier = [0]
    for _ in range(radius):
        nxt = []
        for v in frontier:
            for b in range(len(all_bases)):
                w = oi.step(v, b)
                if w not in seen:
                    if len(seen) >= budget:
                        raise RuntimeError("window budget exceeded")
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
        if not frontier:
            break
    return [oi.points[i] for i in sorted(seen)]


def cycles_from_torsion_measure(
    measure: FiniteMeasure,
    action: GroupAction,
    radius: int,
    order_cap: int = 64,
    budget: int = 200_000,
) -> CenteredChain:
    """Cycle decomposition of the induced walk on the radius window.

    Every atom must be torsion with order <= order_cap; a non-torsion atom (or
    one whose order exceeds the cap) raises.  The resulting chain's kernel
    equals the induced walk kernel on the window.
    """
    bases, weights = _atoms_and_weights(measure, action)
    orders = []
    for b in bases:
        m = 1
        for g in b:
            o = element_order(g, order_cap)
            if o is None:
                raise ValueError(f"atom {g!r} has order above the cap {order_cap}")
            m = m * o // np.gcd(m, o)
        if m > order_cap:
            raise ValueError(f"atom order {m} above the cap {order_cap}")
        orders.append(int(m))

    pts = window_points(action, measure, radius, budget)
    index = {p.key: i for i, p in enumerate(pts)}
    n = len(pts)

    cycles: list[Cycle] = []
    interior = np.ones(n, dtype=bool)
    for b_i, (base, w, m) in enumerate(zip(bases, weights, orders)):
        label = f"atom{b_i}"
        seen = np.zeros(n, dtype=bool)
        for start in range(n):
            if seen[start]:
                continue
            # follow the <g>-orbit from start; closes within m steps or exits
            path = [start]
            seen[start] = True
            edges = []
            cur = pts[start]
            closed = False
            for _ in range(m):
                img = action.apply(cur, base)
                j = index.get(img.key)
                if j is None:
                    edges.append((path[-1], label, -1))
                    break
                edges.append((path[-1], label, j))
                if j == start:
                    closed = True
                    break
                if seen[j]:
                    # can only happen by rejoining the start of this orbit
                    break
                seen[j] = True
                path.append(j)
                cur = img
            if not closed:
                for v in path:
                    interior[v] = False
            cycles.append(Cycle(edges, float(w), closed))
    return CenteredChain(pts, index, cycles, 0, interior)


def validate_centered(chain: CenteredChain):
    """Check the centering axioms exactly: every directed (vertex, atom) edge
    in exactly one cycle, and interior vertex weight sums equal to one.

    Returns (ok, violations).
    """
    violations = []
    seen_edges = {}
    for ci, cyc in enumerate(chain.cycles):
        for u, label, v in cyc.edges:
            k = (u, label)
            if k in seen_edges and seen_edges[k] != ci:
                violations.append(("duplicate-edge", k))
            seen_edges[k] = ci
    sums = np.zeros(chain.n)
    for cyc in chain.cycles:
        for u, _, _ in cyc.edges:
            sums[u] += cyc.weight
    for v in range(chain.n):
        if chain.interior[v] and abs(sums[v] - 1.0) > SUM_TOL:
            violations.append(("vertex-sum", v, sums[v]))
    return (not violations), violations


def symmetrize(kernel: sp.csr_matrix) -> sp.csr_matrix:
    """q0(x,y) = (q(x,y) + q(y,x)) / 2; row deficits stay absorbed outside."""
    return (kernel + kernel.T).tocsr() * 0.5


def escape_probability(kernel: sp.csr_matrix, basepoint: int = 0) -> float:
    """Probability that the chain started at the basepoint reaches the
    absorbing outside (the kernel's missing row mass) before returning.

    Solves the minimal nonnegative solution of u = Q u + r on states other
    than the basepoint (Q drops the basepoint column, r is each row's absorbed
    mass); states with no path to the outside get u = 0.  The escape
    probability is the basepoint row applied to u plus its direct absorption.
    """
    n = kernel.shape[0]
    row_sums = np.asarray(kernel.sum(axis=1)).ravel()
    absorbed = np.maximum(1.0 - row_sums, 0.0)

    # states (excluding the basepoint) that can reach the outside without
    # passing through the basepoint: reverse reachability from absorbing rows
    rev = kernel.T.tocsr()
    can_escape = np.zeros(n, dtype=bool)
    stack = [v for v in range(n) if absorbed[v] > 1e-15 and v != basepoint]
    can_escape[stack] = True
    while stack:
        v = stack.pop()
        for u_ in rev[v].indices:
            if u_ != basepoint and not can_escape[u_]:
                can_escape[u_] = True
                stack.append(int(u_))

    idx = np.nonzero(can_escape)[0]
    u = np.zeros(n)
    if len(idx):
        Q = kernel[idx][:, idx]
        r = absorbed[idx]
        A = sp.identity(Q.shape[0], format="csc") - Q.tocsc()
        try:
            sol = spsolve(A, r)
        except RuntimeError as exc:
            raise RuntimeError("singular escape system (disconnected window?)") from exc
        sol = np.atleast_1d(sol)
        if np.any(~np.isfinite(sol)):
            raise RuntimeError("singular escape system (disconnected window?)")
        u[idx] = sol
    base_row = kernel[basepoint].toarray().ravel()
    base_row[basepoint] = 0.0
    return float(np.dot(base_row, u) + absorbed[basepoint])


def escape_profile(
    measure: FiniteMeasure,
    action: GroupAction,
    radii,
    order_cap: int = 64,
    budget: int = 200_000,
):
    """Escape probabilities of q and q0 across window radii.

    Returns a list of rows {radius, escape_q, escape_q0, states} plus trend
    classifications ('recurrent-trend' when escapes decrease with radius).
    """
    rows = []
    for R in radii:
        chain = cycles_from_torsion_measure(measure, action, R, order_cap, budget)
        ok, viol = validate_centered(chain)
        if not ok:
            raise RuntimeError(f"invalid centered chain at radius {R}: {viol[:3]}")
        q = chain.kernel()
        q0 = symmetrize(q)
        rows.append(
            {
                "radius": int(R),
                "escape_q": escape_probability(q),
                "escape_q0": escape_probability(q0),
                "states": chain.n,
            }
        )

    def classify(vals):
        dec = all(b <= a * (1 + 1e-9) for a, b in zip(vals, vals[1:]))
        return "recurrent-trend" if dec else "transient-trend"

    trend_q = classify([r["escape_q"] for r in rows])
    trend_q0 = classify([r["escape_q0"] for r in rows])
    return {"rows": rows, "trend_q": trend_q, "trend_q0": trend_q0}


def escape_csv(profile) -> str:
    lines = ["radius,escape_q,escape_q0"]
    for r in profile["rows"]:
        lines.append(f"{r['radius']},{r['escape_q']:.12g},{r['escape_q0']:.12g}")
    return "\n".join(lines) + "\n"
