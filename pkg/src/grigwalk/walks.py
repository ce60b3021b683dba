"""Random-walk laboratory: trajectory simulation and exact series.

Two engines share one lazy orbit index (normalized point -> integer id with
per-atom transition tables, resolved on demand):

* a vectorized Monte Carlo engine for induced walks on boundary orbits, used
  for first-return/survival profiles, expected inverted-orbit growth via
  E[delta(n)] = sum_{i<=n} P(T > i) for the inverse-law walk, and the
  lamp-value stabilization observable of switch-translate-switch walks;
* exact engines: distribution vectors pushed through the induced Markov
  kernel inside a budgeted window (escaped mass tracked, so reported return
  probabilities are exact lower bounds), exact entropy series H(n) through
  sparse convolution powers, and exact drift series with a word-length proxy
  beyond the geodesic radius.

All Monte Carlo runs are deterministic given the seed: trials advance in
lock-step vectors driven by one numpy Generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .boundary import ProductPoint, Ray
from .core import GroupElement, geodesic_length, reduce_word
from .measures import (
    BudgetExceeded,
    FiniteMeasure,
    MixtureMeasure,
    NuGamma,
    nu_power_table,
)
from .wreath import FiniteGroupA, GroupAction


class OrbitIndex:
    """Lazy vertex registry for an orbit with per-atom transition tables."""

    def __init__(self, action: GroupAction, bases, root):
        self.action = action
        self.bases = list(bases)
        self.points = [root]
        self.index = {root.key: 0}
        self._cap = 1024
        self.table = np.full((len(self.bases), self._cap), -1, dtype=np.int64)

    def _grow(self):
        new = np.full((len(self.bases), self._cap * 2), -1, dtype=np.int64)
        new[:, : self._cap] = self.table
        self.table = new
        self._cap *= 2

    def _register(self, point) -> int:
        idx = self.index.get(point.key)
        if idx is None:
            idx = len(self.points)
            self.points.append(point)
            self.index[point.key] = idx
            if idx + 1 >= self._cap:
                self._grow()
        return idx

    def step(self, v: int, b: int) -> int:
        w = int(self.table[b, v])
        if w < 0:
            img = self.action.apply(self.points[v], self.bases[b])
            w = self._register(img)
            self.table[b, v] = w
        return w

    def step_vec(self, vs: np.ndarray, b: int) -> np.ndarray:
        """Vectorized transitions by one atom, resolving gaps on demand."""
        out = self.table[b, vs]
        if (out < 0).any():
            for v in np.unique(vs[out < 0]):
                self.step(int(v), b)
            out = self.table[b, vs]
        return out

    def step_mixed(self, vs: np.ndarray, bs: np.ndarray) -> np.ndarray:
        """Vectorized transitions with a per-entry atom choice."""
        out = self.table[bs, vs]
        missing = out < 0
        if missing.any():
            for b, v in {(int(b), int(v)) for b, v in zip(bs[missing], vs[missing])}:
                self.step(v, b)
            out = self.table[bs, vs]
        return out

    def __len__(self):
        return len(self.points)


@dataclass
class EstimateSeries:
    """Per-n series of estimates; exact entries have zero standard error."""

    ns: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    trials: int
    exact: np.ndarray

    def to_csv(self) -> str:
        lines = ["n,mean,stderr,trials,exact"]
        for n, m, s, e in zip(self.ns, self.mean, self.stderr, self.exact):
            lines.append(f"{int(n)},{m:.12g},{s:.12g},{self.trials},{int(e)}")
        return "\n".join(lines) + "\n"


@dataclass
class WalkConfig:
    """One simulation run: an action, a step law, horizons and bookkeeping."""

    action: GroupAction
    measure_kind: str  # "finite" | "mixture" | "sts"
    measure: object  # FiniteMeasure or MixtureMeasure (inner law for "sts")
    horizon: int
    trials: int
    seed: int
    switch_A: FiniteGroupA | None = None  # for "sts"
    switch_weights: tuple | None = None  # probability per A element
    checkpoints: list[int] = field(default_factory=list)
    track_delta_sets: bool = False
    phi_sigma_point: object = None
    track_distance: bool = False

    def __post_init__(self):
        if self.horizon < 1 or self.trials < 1:
            raise ValueError("horizon and trials must be >= 1")
        if self.measure_kind not in ("finite", "mixture", "sts"):
            raise ValueError(f"unknown measure kind {self.measure_kind!r}")
        if self.measure_kind == "sts" and self.switch_A is None:
            raise ValueError("switch-translate-switch walks need the lamp group A")
        if not self.checkpoints:
            self.checkpoints = default_checkpoints(self.horizon)


def default_checkpoints(horizon: int) -> list[int]:
    out = []
    n = 1
    while n < horizon:
        out.append(n)
        n = max(n + 1, int(n * 1.25))
    out.append(horizon)
    return out


def _atoms_and_weights(measure: FiniteMeasure, action: GroupAction):
    bases, weights = [], []
    for e, w in measure.atoms.values():
        base = e if isinstance(e, tuple) else (e,)
        if len(base) != len(action.specs):
            raise ValueError("measure atoms do not match the action arity")
        bases.append(base)
        weights.append(w)
    return bases, np.array(weights, dtype=float)


def _inner_measure(config: WalkConfig):
    """The translation law driving the induced point walk: mixtures (also
    inside switch-translate-switch steps) split into base law + block law."""
    m = config.measure
    if isinstance(m, MixtureMeasure):
        return m.base, m.nu
    return m, None


class _BlockSampler:
    """Draws lambda-step block lengths: 1 for finite laws, folded nu for
    mixtures."""

    def __init__(self, nu: NuGamma | None):
        if nu is None:
            self.cdf = None
        else:
            self.cdf = np.cumsum(nu.folded())

    def draw(self, rng, count: int) -> np.ndarray:
        if self.cdf is None:
            return np.ones(count, dtype=np.int64)
        return np.searchsorted(self.cdf, rng.random(count)).astype(np.int64) + 1


def mc_orbit_run(
    action: GroupAction,
    measure: FiniteMeasure,
    nu: NuGamma | None,
    horizon: int,
    trials: int,
    seed: int,
    invert_steps: bool = False,
    start=None,
    rho=None,
    switch_A: FiniteGroupA | None = None,
    switch_weights=None,
):
    """Vectorized induced walk on the orbit.

    Returns a dict with:
      survival[i]   fraction of trials whose walk avoids rho during lambda-steps
                    1..i  (i = 0..horizon)
      returns[i]    fraction of trials sitting at rho after lambda-step i
      change_counts per-trial counts of lamp-value changes at the start point
                    (only when switch_A given; the walk then starts at sigma and
                    tracks sigma g_i, counting switch instants that actually
                    change the value)
    The inverse law (invert_steps) drives the inverted-orbit expectation
    identity E[delta(n)] = sum_{i<=n} P(T > i).
    """
    rng = np.random.default_rng(seed)
    root = start if start is not None else action.basepoint
    rho_point = rho if rho is not None else action.basepoint
    bases, weights = _atoms_and_weights(measure, action)
    if invert_steps:
        bases = [action.inv(b) for b in bases]
    oi = OrbitIndex(action, bases, root)
    rho_idx = oi._register(rho_point)
    root_idx = oi.index[root.key]

    atom_cdf = np.cumsum(weights / weights.sum())
    blocks = _BlockSampler(nu)

    pos = np.full(trials, root_idx, dtype=np.int64)
    remaining = blocks.draw(rng, trials)
    lam_time = np.zeros(trials, dtype=np.int64)
    first_return = np.full(trials, -1, dtype=np.int64)
    at_rho_counts = np.zeros(horizon + 1, dtype=np.int64)
    at_rho_counts[0] = trials if root_idx == rho_idx else 0

    if switch_A is not None:
        if switch_weights is None:
            switch_weights = np.full(switch_A.order, 1.0 / switch_A.order)
        sw_cdf = np.cumsum(np.asarray(switch_weights, dtype=float))
        a_table = np.array(switch_A.table, dtype=np.int64)
        val = np.zeros(trials, dtype=np.int64)
        val_before = val.copy()
        changes = np.zeros(trials, dtype=np.int64)
        pre_mask = pos == rho_idx
        if pre_mask.any():
            draws = np.searchsorted(sw_cdf, rng.random(int(pre_mask.sum())))
            val[pre_mask] = a_table[val[pre_mask], draws]
    else:
        val = changes = val_before = None

    active = np.ones(trials, dtype=bool)
    while active.any():
        draws = np.searchsorted(atom_cdf, rng.random(trials))
        pos[active] = oi.step_mixed(pos[active], draws[active])
        remaining[active] -= 1
        done = active & (remaining == 0)
        if done.any():
            lam_time[done] += 1
            at_now = done & (pos == rho_idx)
            if at_now.any():
                np.add.at(at_rho_counts, lam_time[at_now], 1)
                newly = at_now & (first_return < 0)
                first_return[newly] = lam_time[newly]
            if val is not None:
                post = at_now
                if post.any():
                    draws_a = np.searchsorted(sw_cdf, rng.random(int(post.sum())))
                    val[post] = a_table[val[post], draws_a]
                stepped = done
                changed = stepped & (val != val_before)
                changes[changed] += 1
                val_before[stepped] = val[stepped]
            still = done & (lam_time < horizon)
            if still.any():
                remaining[still] = blocks.draw(rng, int(still.sum()))
                if val is not None:
                    pre = still & (pos == rho_idx)
                    if pre.any():
                        draws_a = np.searchsorted(sw_cdf, rng.random(int(pre.sum())))
                        val[pre] = a_table[val[pre], draws_a]
            active = active & (lam_time < horizon)

    survival = np.empty(horizon + 1, dtype=float)
    survival[0] = 1.0
    returned = np.zeros(horizon + 1, dtype=np.int64)
    hit = first_return[first_return > 0]
    np.add.at(returned, hit, 1)
    survival[1:] = 1.0 - np.cumsum(returned[1:]) / trials

    out = {
        "survival": survival,
        "returns": at_rho_counts / trials,
        "orbit_size": len(oi),
    }
    if val is not None:
        out["change_counts"] = changes
    return out


def expected_delta_series(survival: np.ndarray) -> np.ndarray:
    """E[delta(n)] = sum_{i=0}^{n} P(T > i) from a survival profile."""
    return np.cumsum(survival)


def inverted_orbit_size(action: GroupAction, bases_seq, start=None) -> int:
    """delta of an explicit word (list of base elements), by the incremental
    set update O(w g) = O(w) g  U {rho}."""
    root = start if start is not None else action.basepoint
    current = {root.key: root}
    for base in bases_seq:
        nxt = {}
        for p in current.values():
            img = action.apply(p, base)
            nxt[img.key] = img
        nxt[root.key] = root
        current = nxt
    return len(current)


def inverted_orbit_literal(action: GroupAction, bases_seq, start=None) -> int:
    """delta computed straight from the definition (suffix products)."""
    root = start if start is not None else action.basepoint
    keys = {root.key}
    for i in range(len(bases_seq)):
        p = root
        for base in bases_seq[i:]:
            p = action.apply(p, base)
        keys.add(p.key)
    return len(keys)


def simulate(config: WalkConfig) -> dict:
    """Run one configured walk; returns a bundle of EstimateSeries (and raw
    arrays under 'raw').  Deterministic given config.seed."""
    inner, nu = _inner_measure(config)
    sw_A = config.switch_A if config.measure_kind == "sts" else None
    res_fwd = mc_orbit_run(
        config.action, inner, nu, config.horizon, config.trials,
        config.seed, invert_steps=False,
        start=config.phi_sigma_point, rho=config.action.basepoint,
        switch_A=sw_A, switch_weights=config.switch_weights,
    )
    res_inv = mc_orbit_run(
        config.action, inner, nu, config.horizon, config.trials,
        config.seed + 1, invert_steps=True,
    )
    ns = np.array([n for n in config.checkpoints if n <= config.horizon], dtype=int)
    trials = config.trials

    def series(values, exact=False):
        v = np.asarray(values, dtype=float)[ns]
        stderr = np.zeros_like(v) if exact else np.sqrt(np.abs(v * (1 - v)) / trials)
        return EstimateSeries(ns, v, stderr, trials, np.full(len(ns), exact, dtype=bool))

    delta = expected_delta_series(res_inv["survival"])
    bundle = {
        "return_freq": series(res_fwd["returns"]),
        "survival": series(res_inv["survival"]),
        "delta_mean": EstimateSeries(
            ns, delta[ns], np.sqrt(ns / trials), trials, np.zeros(len(ns), dtype=bool)
        ),
        "delta_over_n": EstimateSeries(
            ns, delta[ns] / np.maximum(ns, 1), np.sqrt(ns / trials) / np.maximum(ns, 1),
            trials, np.zeros(len(ns), dtype=bool),
        ),
        "raw": {"forward": res_fwd, "inverse": res_inv},
    }
    if "change_counts" in res_fwd:
        bundle["raw"]["change_counts"] = res_fwd["change_counts"]
    return bundle


# ---------------------------------------------------------------------------
# exact induced kernels


def explore_orbit(action: GroupAction, bases, depth: int, budget: int, root=None):
    """BFS over atom moves to the given depth, at most budget vertices.

    Returns (index, layers, truncated) where layers[i] is the list of vertex
    ids first reached at distance i.
    """
    root = root if root is not None else action.basepoint
    oi = OrbitIndex(action, bases, root)
    seen = {0}
    layers = [[0]]
    truncated = False
    for _ in range(depth):
        nxt = []
        for v in layers[-1]:
            for b in range(len(bases)):
                w = oi.step(v, b)
                if w not in seen:
                    if len(seen) >= budget:
                        truncated = True
                        continue
                    seen.add(w)
                    nxt.append(w)
        if not nxt:
            break
        layers.append(nxt)
    return oi, layers, truncated


def exact_induced_series(
    measure: FiniteMeasure,
    action: GroupAction,
    n_max: int,
    state_budget: int = 100_000,
    keep_vectors: bool = False,
    window_radius: int | None = None,
):
    """Exact n-step distributions of the induced walk inside a budgeted window.

    The window is the ball of graph radius window_radius (default n_max, which
    makes the series exact whenever the budget is not hit).  Returns dict with
    'return_probs' (exact lower bounds, length n_max+1), 'escaped' (cumulative
    mass that left the window; adding it gives upper bounds), 'truncated' flag,
    and optionally the distribution vectors.
    """
    bases, weights = _atoms_and_weights(measure, action)
    depth = n_max if window_radius is None else window_radius
    oi, layers, truncated = explore_orbit(action, bases, depth, state_budget)
    n_states = len(oi)
    explored = n_states
    rows, cols, vals = [], [], []
    out_mass = np.zeros(n_states)
    for v in range(n_states):
        for b, w in enumerate(weights):
            to = int(oi.table[b, v])
            if to < 0 or to >= explored:
                out_mass[v] += w
            else:
                rows.append(v)
                cols.append(to)
                vals.append(w)
    P = sp.csr_matrix((vals, (rows, cols)), shape=(n_states, n_states))
    x = np.zeros(n_states)
    x[0] = 1.0
    return_probs = [1.0]
    escaped_series = [0.0]
    vectors = [x.copy()] if keep_vectors else None
    escaped = 0.0
    for _ in range(n_max):
        escaped += float(x @ out_mass)
        x = P.T @ x
        return_probs.append(float(x[0]))
        escaped_series.append(escaped)
        if keep_vectors:
            vectors.append(x.copy())
    out = {
        "return_probs": np.array(return_probs),
        "escaped": np.array(escaped_series),
        "truncated": truncated,
        "states": n_states,
        "index": oi,
    }
    if keep_vectors:
        out["vectors"] = vectors
    return out


def mixture_return_series(nu: NuGamma, base_return_probs: np.ndarray, n_values, window=None):
    """lambda^{*n}(stab) = sum_i nu^{*n}(i) mu^{*i}(stab), exact within the
    block-length window; returns list of (n, lower, upper).  All block-count
    mass not covered by the window (truncation defect included) is bounded by
    the trivial mu^{*i}(stab) <= 1."""
    table = nu_power_table(nu, n_values, window)
    out = []
    for n in sorted(table):
        offset, arr, _ = table[n]
        top = min(len(base_return_probs) - offset, len(arr))
        if top <= 0:
            raise ValueError("base return series too short for the nu window")
        lower = float(np.dot(arr[:top], base_return_probs[offset : offset + top]))
        unaccounted = 1.0 - float(arr[:top].sum())
        out.append((n, lower, lower + unaccounted))
    return out


# ---------------------------------------------------------------------------
# exact entropy and drift series


def exact_entropy_series(measure: FiniteMeasure, n_max: int, support_budget: int = 1_000_000):
    """Exact H(n) = H(mu^{*n}) for n = 0..n_max (truncated at the budget).

    Returns dict with 'H', 'support_sizes', 'increments' (H(n+1) - H(n)) and
    'n_reached'.
    """
    H = [0.0]
    sizes = [1]
    acc = FiniteMeasure(measure.ops, [(measure.ops.identity, 1.0)])
    reached = 0
    for n in range(1, n_max + 1):
        try:
            acc = acc.convolve(measure)
        except BudgetExceeded:
            break
        if acc.support_size() > support_budget:
            break
        H.append(acc.entropy())
        sizes.append(acc.support_size())
        reached = n
    H = np.array(H)
    return {
        "H": H,
        "support_sizes": np.array(sizes),
        "increments": np.diff(H),
        "n_reached": reached,
    }


def drift_series(
    measure: FiniteMeasure,
    n_max: int,
    radius_cap: int,
    support_budget: int = 1_000_000,
):
    """L(n) = E ||X_n|| for the word metric: exact while every atom of mu^{*n}
    lies in the radius_cap ball, word-length proxy (an upper bound) beyond.

    Only valid for measures over a single G_omega.  Returns an EstimateSeries
    plus the raw support data.
    """
    some_elem = next(iter(measure.atoms.values()))[0]
    if not isinstance(some_elem, GroupElement):
        raise ValueError("drift_series expects a measure over one G_omega")
    spec = some_elem.spec
    acc = FiniteMeasure(measure.ops, [(measure.ops.identity, 1.0)])
    ns, Ls, exact_flags, max_dists, supports = [], [], [], [], []
    for n in range(1, n_max + 1):
        try:
            acc = acc.convolve(measure)
        except BudgetExceeded:
            break
        if acc.support_size() > support_budget:
            break
        L = 0.0
        exact = True
        max_dist = 0
        for e, w in acc.atoms.values():
            d = geodesic_length(e, radius_cap)
            if d is None:
                d = len(reduce_word(e.word))
                exact = False
            L += w * d
            max_dist = max(max_dist, d)
        ns.append(n)
        Ls.append(L)
        exact_flags.append(exact)
        max_dists.append(max_dist)
        supports.append(acc.support_size())
    ns = np.array(ns, dtype=int)
    series = EstimateSeries(
        ns, np.array(Ls), np.zeros(len(ns)), 1, np.array(exact_flags, dtype=bool)
    )
    return {"series": series, "max_dists": max_dists, "support_sizes": supports}


def fit_power_law(ns, values) -> float:
    """Slope of log(values) vs log(ns)."""
    ns = np.asarray(ns, dtype=float)
    vs = np.asarray(values, dtype=float)
    keep = vs > 0
    slope, _ = np.polyfit(np.log(ns[keep]), np.log(vs[keep]), 1)
    return float(slope)


def consistency_report(ns, H, L, support_sizes, max_dists, max_gen_norm: int) -> dict:
    """Drift-entropy consistency on the exact range.

    Fits the sandwich constants C (H/n >= C (L/n)^2) and D (H/n <= D L/n) and
    asserts only the parameter-free facts: H(n) <= log |supp mu^{*n}| and
    supp mu^{*n} inside the ball of radius n * max ||s||.
    """
    ns = np.asarray(ns, dtype=float)
    H = np.asarray(H, dtype=float)
    L = np.asarray(L, dtype=float)
    sup = np.asarray(support_sizes, dtype=float)
    ok_entropy = bool(np.all(H <= np.log(sup) + 1e-9))
    ok_ball = bool(all(d <= n * max_gen_norm for d, n in zip(max_dists, ns)))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios_C = (H / ns) / (L / ns) ** 2
        ratios_D = (H / ns) / (L / ns)
    keep = (L > 0) & (H > 0)
    C_fit = float(np.min(ratios_C[keep])) if keep.any() else math.inf
    D_fit = float(np.max(ratios_D[keep])) if keep.any() else 0.0
    return {
        "C_fit": C_fit,
        "D_fit": D_fit,
        "entropy_vs_support_ok": ok_entropy,
        "support_in_ball_ok": ok_ball,
    }


def phi_sigma_trace(config: WalkConfig, sigma) -> dict:
    """Distribution of lamp-change counts at sigma for a switch-translate-
    switch walk: the walk tracks sigma g_i and multiplies the lamp value by a
    fresh switch draw whenever the tracked point sits at rho; an instant
    counts when the value actually changes.

    Returns per-trial counts plus tail statistics.
    """
    if config.measure_kind != "sts":
        raise ValueError("phi_sigma_trace needs a switch-translate-switch walk")
    inner, nu = _inner_measure(config)
    res = mc_orbit_run(
        config.action, inner, nu, config.horizon, config.trials, config.seed,
        start=sigma, rho=config.action.basepoint,
        switch_A=config.switch_A, switch_weights=config.switch_weights,
    )
    counts = res["change_counts"]
    return {
        "counts": counts,
        "mean": float(counts.mean()),
        "tail_fraction": lambda K: float((counts > K).mean()),
    }
