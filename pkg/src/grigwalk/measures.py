"""Finitely supported measures, exact convolution, entropy, and the
heavy-tailed integer mixtures nu_gamma / lambda_gamma.

FiniteMeasure keeps an associative map canonical-key -> (element, weight) plus
a nonnegative slack field recording truncated mass, so that computed weights
remain exact lower bounds with an explicit defect.

nu_gamma puts mass C_gamma / i^gamma on each positive integer i, with C_gamma =
1/zeta(gamma); it is truncated at an index cap with the exact tail mass
recorded.  For sampling the tail is folded into the largest atom (keeping a
probability measure); exact computations use the unfolded atoms plus slack.
Convolution powers of nu on the integers are computed densely with FFT
squaring inside a window, tracking escaped mass; values inside the window and
below the truncation cap are exact.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import zeta as _zeta

MASS_TOL = 1e-12


class GroupOps:
    """Multiplication/inverse/key bundle a FiniteMeasure needs of its group."""

    def __init__(self, identity, mul, inv, key):
        self.identity = identity
        self.mul = mul
        self.inv = inv
        self.key = key


def ops_for_group(spec) -> GroupOps:
    return GroupOps(
        identity=spec.identity,
        mul=lambda g, h: g * h,
        inv=lambda g: g.inverse(),
        key=lambda g: g.key(),
    )


def ops_for_tuple(specs) -> GroupOps:
    return GroupOps(
        identity=tuple(s.identity for s in specs),
        mul=lambda g, h: tuple(x * y for x, y in zip(g, h)),
        inv=lambda g: tuple(x.inverse() for x in g),
        key=lambda g: "|".join(x.key() for x in g),
    )


def ops_for_wreath(W) -> GroupOps:
    return GroupOps(
        identity=W.identity(),
        mul=lambda u, v: u * v,
        inv=lambda u: u.inverse(),
        key=lambda u: u.key(),
    )


class FiniteMeasure:
    """Finitely supported probability measure with explicit truncation slack."""

    def __init__(self, ops: GroupOps, items, slack: float = 0.0):
        self.ops = ops
        self.atoms: dict[str, tuple[object, float]] = {}
        for elem, w in items:
            if w <= 0:
                raise ValueError("weights must be positive")
            k = ops.key(elem)
            if k in self.atoms:
                self.atoms[k] = (elem, self.atoms[k][1] + w)
            else:
                self.atoms[k] = (elem, w)
        if slack < 0:
            raise ValueError("slack must be nonnegative")
        self.slack = slack
        total = self.total_mass() + slack
        if abs(total - 1.0) > MASS_TOL:
            raise ValueError(f"total mass {total} is not 1 within {MASS_TOL}")

    def total_mass(self) -> float:
        return math.fsum(w for _, w in self.atoms.values())

    def weight(self, key: str) -> float:
        hit = self.atoms.get(key)
        return hit[1] if hit else 0.0

    def support_size(self) -> int:
        return len(self.atoms)

    def convolve(self, other: "FiniteMeasure") -> "FiniteMeasure":
        """Exact sparse convolution; slack combines as 1-(1-s1)(1-s2)."""
        if self.ops is not other.ops:
            raise ValueError("measures live over different groups")
        ops = self.ops
        acc: dict[str, list] = {}
        for e1, w1 in self.atoms.values():
            for e2, w2 in other.atoms.values():
                e = ops.mul(e1, e2)
                k = ops.key(e)
                cell = acc.get(k)
                if cell is None:
                    acc[k] = [e, w1 * w2]
                else:
                    cell[1] += w1 * w2
        slack = self.slack + other.slack - self.slack * other.slack
        return FiniteMeasure(ops, ((e, w) for e, w in acc.values()), slack)

    def power(self, n: int, support_budget: int | None = None) -> "FiniteMeasure":
        """n-fold convolution power; raises if the support budget is exceeded."""
        if n < 0:
            raise ValueError("n must be >= 0")
        acc = FiniteMeasure(self.ops, [(self.ops.identity, 1.0)])
        for _ in range(n):
            acc = acc.convolve(self)
            if support_budget is not None and acc.support_size() > support_budget:
                raise BudgetExceeded(f"support {acc.support_size()} > {support_budget}")
        return acc

    def entropy(self) -> float:
        """Shannon entropy in nats over the stored atoms (slack excluded)."""
        return -math.fsum(w * math.log(w) for _, w in self.atoms.values())

    def tv_distance(self, other: "FiniteMeasure") -> float:
        keys = set(self.atoms) | set(other.atoms)
        return 0.5 * math.fsum(abs(self.weight(k) - other.weight(k)) for k in keys)

    def sampler(self, rng):
        """Returns a function drawing one atom element (slack resampled away:
        draws condition on the retained atoms)."""
        elems = [e for e, _ in self.atoms.values()]
        weights = np.array([w for _, w in self.atoms.values()], dtype=float)
        cdf = np.cumsum(weights / weights.sum())

        def draw():
            return elems[int(np.searchsorted(cdf, rng.random()))]

        return draw

    def to_json_dict(self) -> dict:
        atoms = sorted((k, w) for k, (_, w) in self.atoms.items())
        return {"atoms": [[k, w] for k, w in atoms], "slack": self.slack}

    def __repr__(self):
        return f"FiniteMeasure({self.support_size()} atoms, slack={self.slack:g})"


class BudgetExceeded(RuntimeError):
    pass


def dirac(ops: GroupOps) -> FiniteMeasure:
    return FiniteMeasure(ops, [(ops.identity, 1.0)])


def kaimanovich_measure(spec) -> FiniteMeasure:
    """The lazy self-similar measure on G_omega: weights 5/12 at 1, 1/3 at a,
    1/12 at each of b, c, d."""
    ops = ops_for_group(spec)
    items = [
        (spec.identity, 5.0 / 12.0),
        (spec.element("a"), 1.0 / 3.0),
        (spec.element("b"), 1.0 / 12.0),
        (spec.element("c"), 1.0 / 12.0),
        (spec.element("d"), 1.0 / 12.0),
    ]
    return FiniteMeasure(ops, items)


def uniform_generator_measure(spec, lazy: float = 0.0) -> FiniteMeasure:
    ops = ops_for_group(spec)
    items = [(g, (1.0 - lazy) / 4.0) for g in spec.generators()]
    if lazy > 0:
        items.append((spec.identity, lazy))
    return FiniteMeasure(ops, items)


def product_switch_measure(spec1, spec2) -> FiniteMeasure:
    """Uniform on the 8 embedded generators of G1 x G2 (one factor moves per
    step); symmetric and non-degenerate."""
    ops = ops_for_tuple((spec1, spec2))
    items = []
    for g in spec1.generators():
        items.append(((g, spec2.identity), 1.0 / 8.0))
    for g in spec2.generators():
        items.append(((spec1.identity, g), 1.0 / 8.0))
    return FiniteMeasure(ops, items)


def product_measure(mu1: FiniteMeasure, mu2: FiniteMeasure, spec1, spec2) -> FiniteMeasure:
    """The product law mu1 x mu2 on G1 x G2: both coordinates move
    independently each step, so n-step returns factor exactly."""
    ops = ops_for_tuple((spec1, spec2))
    items = []
    for e1, w1 in mu1.atoms.values():
        for e2, w2 in mu2.atoms.values():
            items.append(((e1, e2), w1 * w2))
    return FiniteMeasure(ops, items, slack=mu1.slack + mu2.slack - mu1.slack * mu2.slack)


def torsion_product_measure(spec1, spec2) -> FiniteMeasure:
    """A non-symmetric finitely supported measure on G1 x G2 all of whose atoms
    are torsion; the ad atoms (order 4) make the induced chain genuinely
    oriented, which is what the cycle-decomposition diagnostics exercise."""
    ops = ops_for_tuple((spec1, spec2))
    e1, e2 = spec1.identity, spec2.identity
    items = [
        ((spec1.element("ad"), e2), 1.0 / 6.0),
        ((spec1.element("a"), e2), 1.0 / 12.0),
        ((spec1.element("b"), e2), 1.0 / 8.0),
        ((spec1.element("c"), e2), 1.0 / 8.0),
        ((e1, spec2.element("ad")), 1.0 / 6.0),
        ((e1, spec2.element("a")), 1.0 / 12.0),
        ((e1, spec2.element("b")), 1.0 / 8.0),
        ((e1, spec2.element("c")), 1.0 / 8.0),
    ]
    return FiniteMeasure(ops, items)


# ---------------------------------------------------------------------------
# Integer-valued heavy-tailed block-length law nu_gamma


class NuGamma:
    """Truncation of nu_gamma(i) = C_gamma / i^gamma on i = 1..i_max."""

    def __init__(self, gamma: float, i_max: int, alphas: np.ndarray, tail_mass: float):
        self.gamma = gamma
        self.i_max = i_max
        self.alphas = alphas  # alphas[0] is nu(1)
        self.tail_mass = tail_mass
        self.C_gamma = float(alphas[0])

    @property
    def stable_exponent(self) -> float:
        return self.gamma - 1.0

    def scaling(self, n: float) -> float:
        """The stable normalization B_n = n^{1/(gamma-1)} (slowly varying
        factors ignored)."""
        return float(n) ** (1.0 / (self.gamma - 1.0))

    def folded(self) -> np.ndarray:
        """Probability vector on 1..i_max with the tail folded into i_max."""
        out = self.alphas.copy()
        out[-1] += self.tail_mass
        return out

    def cdf_complement(self, x: int) -> float:
        """1 - F(x) for integer x in [0, i_max], using the exact tail."""
        if x < 0:
            return 1.0
        if x >= self.i_max:
            return self.tail_mass
        return float(self.alphas[x:].sum()) + self.tail_mass

    def sampler(self, rng):
        cdf = np.cumsum(self.folded())

        def draw() -> int:
            return int(np.searchsorted(cdf, rng.random())) + 1

        return draw


def nu_gamma(gamma: float, eps_tail: float | None = None, i_max: int | None = None) -> NuGamma:
    """Construct the truncated nu_gamma.

    Either pass eps_tail (un-normalized tail sum_{i>i_max} i^-gamma <= eps_tail,
    cap derived from the integral bound i_max >= ((gamma-1) eps)^{-1/(gamma-1)})
    or an explicit i_max.
    """
    if not 1.0 < gamma < 2.0:
        raise ValueError("gamma must lie in (1, 2)")
    if i_max is None:
        if eps_tail is None or eps_tail <= 0:
            raise ValueError("need eps_tail > 0 or an explicit i_max")
        i_max = int(math.ceil(((gamma - 1.0) * eps_tail) ** (-1.0 / (gamma - 1.0))))
    if i_max < 1:
        raise ValueError("i_max must be >= 1")
    z = float(_zeta(gamma, 1))
    C = 1.0 / z
    idx = np.arange(1, i_max + 1, dtype=float)
    alphas = C * idx ** (-gamma)
    # exact tail via the Hurwitz zeta: sum_{i>N} i^-gamma = zeta(gamma, N+1)
    tail = C * float(_zeta(gamma, i_max + 1))
    return NuGamma(gamma, i_max, alphas, tail)


def nu_power_table(nu: NuGamma, n_values, window: int | None = None):
    """Convolution powers of the unfolded truncation by FFT squaring.

    Returns {n: (offset, dense array, escaped_mass)}; the array holds
    nu^{*n}(offset + j) for j >= 0.  Values at indices <= i_max are exact for
    the untruncated nu as well, since no admissible draw exceeds i_max.
    Escaped mass counts both the truncation defect and the window overflow.
    """
    n_values = sorted(set(int(n) for n in n_values))
    if any(n < 1 for n in n_values):
        raise ValueError("powers must be >= 1")
    if window is None:
        window = min(max(n_values) * nu.i_max, 1 << 22)

    def trim(offset, arr):
        if len(arr) > window:
            escaped = float(arr[window:].sum())
            arr = arr[:window]
        else:
            escaped = 0.0
        return offset, arr, escaped

    results = {}
    # cache powers of two: arrays keyed by exponent
    base = (1, nu.alphas.copy())
    cache = {1: (base[0], base[1], 0.0)}

    def get_power(n):
        if n in cache:
            return cache[n]
        half = n // 2
        a_off, a_arr, a_esc = get_power(half)
        b_off, b_arr, b_esc = get_power(n - half)
        arr = fftconvolve(a_arr, b_arr)
        np.maximum(arr, 0.0, out=arr)
        off, arr, esc = trim(a_off + b_off, arr)
        total_esc = a_esc + b_esc + esc
        cache[n] = (off, arr, total_esc)
        return cache[n]

    for n in n_values:
        results[n] = get_power(n)
    return results


def negative_moment(nu_n, delta: float) -> float:
    """sum_i nu^{*n}(i) / i^delta for a dense (offset, array) pair or a
    FiniteMeasure over positive integers."""
    if isinstance(nu_n, FiniteMeasure):
        total = 0.0
        for e, w in nu_n.atoms.values():
            i = int(e)
            if i < 1:
                raise ValueError("measure must be supported on positive integers")
            total += w / i ** delta
        return total
    offset, arr = nu_n
    idx = np.arange(offset, offset + len(arr), dtype=float)
    return float(np.sum(arr / idx ** delta))


def negative_moment_series(nu: NuGamma, delta: float, n_values, window: int | None = None):
    """Exact-head negative moments of nu^{*n} with missing-mass brackets.

    Returns list of (n, lower, upper): lower uses the windowed array; the
    missing mass (window overflow plus truncation defect) lives at block
    counts above min(i_max, window end), which bounds the upper bracket.
    """
    table = nu_power_table(nu, n_values, window)
    out = []
    for n in sorted(table):
        offset, arr, _ = table[n]
        low = negative_moment((offset, arr), delta)
        missing = 1.0 - float(arr.sum())
        floor = min(nu.i_max, offset + len(arr))
        out.append((n, low, low + missing / float(floor) ** delta))
    return out


def fit_decay_exponent(ns, values, log_correction: bool = False) -> float:
    """Least-squares slope of -log(value) against log(n); if log_correction,
    values are divided by log(n) first (the delta = 1 case)."""
    ns = np.asarray(ns, dtype=float)
    vals = np.asarray(values, dtype=float)
    if log_correction:
        vals = vals / np.log(ns)
    slope, _ = np.polyfit(np.log(ns), np.log(vals), 1)
    return float(-slope)


# --- characteristic-function bound on sup_k nu^{*n}(k) ---------------------


def _char_abs_upper(gamma: float, t: float) -> float:
    """|phi(t)| for the full (untruncated) nu_gamma via the polylogarithm:
    phi(t) = Li_gamma(e^{it}) / zeta(gamma)."""
    import mpmath as mp

    z = mp.e ** (1j * mp.mpf(t))
    val = mp.polylog(mp.mpf(gamma), z) / mp.zeta(mp.mpf(gamma))
    return float(abs(val))


def sup_bound_series(gamma: float, n_values, points_per_octave: int = 8):
    """Fourier upper bound sup_k nu^{*n}(k) <= (1/2pi) int |phi(t)|^n dt.

    The integrand is evaluated on a geometric grid fine near t = 0 (where the
    singularity |phi| ~ 1 - c t^{gamma-1} lives) and integrated by trapezoid;
    the unresolved stub [0, t_min] is bounded by t_min.  Returns a list of
    (n, bound) pairs.  This certifies the paper-level decay rate without
    representing the stable density itself.
    """
    n_values = sorted(set(int(n) for n in n_values))
    out = []
    # shared grid fine enough for the largest n
    t_scale = (2.0 * max(n_values)) ** (-1.0 / (gamma - 1.0))
    t_min = t_scale / 64.0
    ts = [t_min]
    while ts[-1] < math.pi:
        ts.append(ts[-1] * 2 ** (1.0 / points_per_octave))
    ts[-1] = math.pi
    phis = np.array([_char_abs_upper(gamma, t) for t in ts])
    ts = np.array(ts)
    trapezoid = getattr(np, "trapezoid", np.trapz)
    for n in n_values:
        vals = phis ** n
        integral = trapezoid(vals, ts) + t_min  # stub where |phi|^n <= 1
        out.append((n, float(integral / math.pi)))  # 2 * integral / (2 pi)
    return out


# ---------------------------------------------------------------------------
# mixtures lambda_gamma = sum_i alpha_i mu^{*i}


class MixtureMeasure:
    """lambda_gamma as (nu, base mu): draw i ~ nu (folded), then an i-step
    product of independent mu draws."""

    def __init__(self, nu: NuGamma, base: FiniteMeasure):
        self.nu = nu
        self.base = base

    def sample_step(self, rng):
        """One lambda draw; returns (group element, block length i)."""
        i = self.nu.sampler(rng)()
        ops = self.base.ops
        draw = self.base.sampler(rng)
        g = ops.identity
        for _ in range(i):
            g = ops.mul(g, draw())
        return g, i

    def expected_block_length(self) -> float:
        p = self.nu.folded()
        return float(np.sum(p * np.arange(1, self.nu.i_max + 1)))


def first_moment_partial(nu: NuGamma, L_series) -> dict:
    """Partial sums S_N = sum_{i<=N} nu(i) L(i) with a convergence diagnostic.

    L_series must cover i = 1..i_max.  The diagnostic is the ratio of the last
    decade's increment to the total (small ratio suggests convergence).
    """
    L = np.asarray(L_series, dtype=float)
    if len(L) < nu.i_max:
        raise ValueError("L_series must cover i = 1..i_max")
    terms = nu.alphas * L[: nu.i_max]
    partial = np.cumsum(terms)
    total = partial[-1]
    last_decade_start = max(int(nu.i_max / 10), 1)
    increment = total - partial[last_decade_start - 1]
    ratio = float(increment / total) if total > 0 else 0.0
    return {"partial_sums": partial, "total": float(total), "last_decade_ratio": ratio}


def beta_moment(measure: FiniteMeasure, beta: float, norm_fn) -> float:
    """sum_g mu(g) ||g||^beta for a caller-supplied norm."""
    return math.fsum(w * norm_fn(e) ** beta for e, w in measure.atoms.values())


# ---------------------------------------------------------------------------
# exact expected number of distinct values among k uniform draws from n bins


_E_INV_UPPER = Fraction(632120558828558, 10**15)  # rational bound > 1 - 1/e


def stirling_expected(n: int, k: int) -> tuple[Fraction, bool]:
    """Exact E[#{i_1..i_k}] = n(1 - (1 - 1/n)^k) for k uniform draws from n
    bins, and whether it meets the (1 - 1/e) k lower bound.

    The bound flag compares against a rational upper estimate of 1 - 1/e, so
    True certifies the real inequality.
    """
    if k < 1 or k > n:
        raise ValueError("need 1 <= k <= n")
    expected = Fraction(n) * (1 - Fraction(n - 1, n) ** k)
    return expected, expected >= _E_INV_UPPER * k
