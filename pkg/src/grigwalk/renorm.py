"""Self-similar sequences of measures and the renormalization operator.

A measure mu on G_omega drives a walk on G_sigma(omega) x {1, 2} through the
wreath recursion: from (h, x) a draw g with sections (g_1, g_2) and root
permutation pi moves to (h g_x, pi(x)).  The renormalization mu' of mu is the
law of the accumulated first coordinate when the second coordinate first
returns to 1 (stopping time >= 1; the walk starts at (1, 1)).

The enumeration is exact: path classes are aggregated by (canonical key of h,
coordinate), mass below a floor is pruned into the recorded tail, and a step
cutoff bounds the work; the leftover active mass joins the tail as well.  For
the lazy Kaimanovich measure the active first coordinate stays inside the
Klein four-group, so the identity mu' = (1/2) delta_1 + (1/2) mu can be checked
to machine precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import GroupSpec, wreath_recurse
from .measures import FiniteMeasure, ops_for_group


@dataclass
class RenormResult:
    mu_prime: FiniteMeasure  # measure over the shifted group; slack = tail
    stopping: dict[int, float]  # stopping time -> exited mass
    tail: float  # unresolved mass (cutoff + pruning)


def renormalize(
    mu: FiniteMeasure,
    spec: GroupSpec,
    cutoff: int,
    prune: float = 1e-15,
) -> RenormResult:
    """Exact renormalization of mu by path enumeration up to the cutoff."""
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    shifted = spec.shift()
    sections = []
    for e, w in mu.atoms.values():
        s = wreath_recurse(e)
        sections.append((s.root_swap, s.left, s.right, w))

    ops = ops_for_group(shifted)
    # active states: key -> (element h over shifted, mass); coordinate is
    # always 2 after the first step, so only exits and stays are tracked
    exited: dict[str, list] = {}
    stopping: dict[int, float] = {}
    tail = 0.0

    def add_exit(h, mass, step):
        k = ops.key(h)
        cell = exited.get(k)
        if cell is None:
            exited[k] = [h, mass]
        else:
            cell[1] += mass
        stopping[step] = stopping.get(step, 0.0) + mass

    # step 1 from (1, 1): coordinate 1 reads the left section
    active: dict[str, list] = {}
    for swap, left, right, w in sections:
        h = left
        if swap:
            k = ops.key(h)
            cell = active.get(k)
            if cell is None:
                active[k] = [h, w]
            else:
                cell[1] += w
        else:
            add_exit(h, w, 1)

    step = 1
    while active and step < cutoff:
        step += 1
        nxt: dict[str, list] = {}
        for h, mass in active.values():
            for swap, left, right, w in sections:
                h2 = h * right  # coordinate 2 reads the right section
                m2 = mass * w
                if swap:
                    add_exit(h2, m2, step)
                else:
                    k = ops.key(h2)
                    cell = nxt.get(k)
                    if cell is None:
                        nxt[k] = [h2, m2]
                    else:
                        cell[1] += m2
        active = {}
        for k, (h, m) in nxt.items():
            if m < prune:
                tail += m
            else:
                active[k] = [h, m]
    tail += math.fsum(m for _, m in active.values())

    mu_prime = FiniteMeasure(ops, ((h, m) for h, m in exited.values()), slack=tail)
    return RenormResult(mu_prime, stopping, tail)


def coordinate_flip_mass(mu: FiniteMeasure) -> float:
    """Mass of atoms whose root permutation swaps the two subtrees; the
    coordinate component of the renormalization walk is the two-state chain
    that flips with exactly this probability."""
    total = 0.0
    for e, w in mu.atoms.values():
        if wreath_recurse(e).root_swap:
            total += w
    return total


def stopping_law_two_state(p_flip: float, cutoff: int) -> dict[int, float]:
    """First-return law of the two-state coordinate chain: T = 1 with
    probability 1 - p, and T = k >= 2 with probability p^2 (1-p)^{k-2}."""
    out = {1: 1.0 - p_flip}
    for k in range(2, cutoff + 1):
        out[k] = p_flip * p_flip * (1.0 - p_flip) ** (k - 2)
    return out


def laziness_split(result: RenormResult, mu_next: FiniteMeasure) -> dict:
    """TV distance between mu' and (1-alpha) delta_1 + alpha mu_next for the
    best alpha, plus the gap at alpha = 1/2."""
    ops = mu_next.ops
    id_key = ops.key(ops.identity)

    def gap(alpha):
        target = {id_key: 1.0 - alpha}
        for k, (_, w) in mu_next.atoms.items():
            target[k] = target.get(k, 0.0) + alpha * w
        keys = set(target) | set(result.mu_prime.atoms)
        return 0.5 * math.fsum(
            abs(result.mu_prime.weight(k) - target.get(k, 0.0)) for k in keys
        )

    alphas = np.linspace(0.0, 1.0, 201)
    gaps = [gap(a) for a in alphas]
    i = int(np.argmin(gaps))
    return {"alpha_best": float(alphas[i]), "gap_best": gaps[i], "gap_half": gap(0.5)}


def verify_self_similar(
    measure_factory,
    alphas,
    spec: GroupSpec,
    depth: int,
    cutoff: int = 40,
    tol: float = 1e-9,
) -> list[dict]:
    """Check mu'_i = (1 - alpha_i) delta_1 + alpha_i mu_{i+1} for i <= depth.

    measure_factory(spec_i) builds mu_i over the i-th shifted group.  Each row
    reports the TV gap and whether it is within tol plus the recorded tail.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    rows = []
    cur = spec
    for i in range(depth):
        mu_i = measure_factory(cur)
        nxt = cur.shift()
        mu_next = measure_factory(nxt)
        res = renormalize(mu_i, cur, cutoff)
        alpha = alphas[i] if i < len(alphas) else alphas[-1]
        id_key = mu_next.ops.key(mu_next.ops.identity)
        target = {id_key: 1.0 - alpha}
        for k, (_, w) in mu_next.atoms.items():
            target[k] = target.get(k, 0.0) + alpha * w
        keys = set(target) | set(res.mu_prime.atoms)
        tv = 0.5 * math.fsum(
            abs(res.mu_prime.weight(k) - target.get(k, 0.0)) for k in keys
        )
        rows.append(
            {
                "i": i + 1,
                "tv_gap": tv,
                "tail": res.tail,
                "ok": tv <= tol + res.tail,
            }
        )
        cur = nxt
    return rows


def beta_exponent(d: int, sup_alpha: float) -> float:
    """The entropy growth exponent log d / (log d - log sup alpha)."""
    return math.log(d) / (math.log(d) - math.log(sup_alpha))


def entropy_bound_experiment(H_series, sup_alpha: float = 0.5, d: int = 2, slack: float = 0.05) -> dict:
    """Check H(n) <= K n^beta on a computed exact entropy series.

    Finds the minimal K over the series and tests that H(n)/n^beta does not
    increase (beyond the slack) over the last decade of the computed range.
    """
    H = np.asarray(H_series, dtype=float)
    ns = np.arange(len(H))
    beta = beta_exponent(d, sup_alpha)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = H[1:] / ns[1:] ** beta
    K = float(np.max(ratios)) if len(ratios) else 0.0
    n_max = len(H) - 1
    decade_start = max(1, n_max // 2)
    decade = ratios[decade_start - 1 :]
    trend_ok = bool(
        all(b <= a * (1 + slack) for a, b in zip(decade, decade[1:]))
        and (len(decade) < 2 or decade[-1] <= decade[0] * (1 + slack))
    )
    return {
        "beta": beta,
        "K": K,
        "ratios": ratios,
        "trend_ok": trend_ok,
        "decade_start": decade_start,
    }
