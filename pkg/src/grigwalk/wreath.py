"""Permutational wreath products W = A wr_X G = (sum_X A) x| G.

A is a small finite group given by an explicit multiplication table; G is a
Grigorchuk group, a product of two of them, or a single group acting diagonally
on a product of two boundary orbits.  A wreath element is a finitely supported
lamp configuration X -> A (no identity values stored, keyed by normalized point
encodings) together with a base tuple.

Multiplication follows (f1 g1)(f2 g2) = f1 (g1.f2) g1 g2 with
(g.f)(x) = f(x g), so the support of g1.f2 is supp(f2) g1^{-1}.
"""

from __future__ import annotations

from .boundary import ProductPoint, Ray, apply, apply_diagonal, apply_product


class FiniteGroupA:
    """Finite group by multiplication table; element 0 is the identity."""

    def __init__(self, name: str, table, names=None):
        self.name = name
        self.table = tuple(tuple(row) for row in table)
        self.order = len(self.table)
        self.names = tuple(names) if names else tuple(str(i) for i in range(self.order))
        self._check()
        self.inverse = tuple(self._find_inverse(i) for i in range(self.order))

    def _check(self):
        n = self.order
        for row in self.table:
            if len(row) != n or sorted(row) != list(range(n)):
                raise ValueError("multiplication table rows must be permutations")
        for i in range(n):
            if self.table[0][i] != i or self.table[i][0] != i:
                raise ValueError("element 0 must be the identity")
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if self.table[self.table[i][j]][k] != self.table[i][self.table[j][k]]:
                        raise ValueError("multiplication table is not associative")

    def _find_inverse(self, i: int) -> int:
        for j in range(self.order):
            if self.table[i][j] == 0:
                return j
        raise ValueError(f"element {i} has no inverse")

    def mul(self, i: int, j: int) -> int:
        return self.table[i][j]

    def __repr__(self):
        return f"FiniteGroupA({self.name}, order={self.order})"


def cyclic_group(n: int) -> FiniteGroupA:
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    return FiniteGroupA(f"C{n}", table)


def klein_group() -> FiniteGroupA:
    return FiniteGroupA("K4", [[i ^ j for j in range(4)] for i in range(4)])


def symmetric3() -> FiniteGroupA:
    """S3 with elements 0..5 = e, (12), (123), (132), (13), (23)."""
    perms = [(0, 1, 2), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0), (0, 2, 1)]
    index = {p: i for i, p in enumerate(perms)}
    table = []
    for p in perms:
        row = []
        for q in perms:
            composed = tuple(q[p[i]] for i in range(3))  # apply p then q
            row.append(index[composed])
        table.append(row)
    return FiniteGroupA("S3", table, names=["e", "(12)", "(123)", "(132)", "(13)", "(23)"])


BUILTIN_GROUPS = {"C2": cyclic_group(2), "C3": cyclic_group(3), "K4": klein_group(), "S3": symmetric3()}


class GroupAction:
    """Right action of a base group on boundary points.

    mode "single": one G_omega acting on rays.
    mode "product": G1 x G2 acting coordinatewise on pairs of rays.
    mode "diagonal": one G_omega acting diagonally on pairs of rays.

    Base elements are tuples of GroupElements (length 1 except for "product").
    """

    def __init__(self, mode: str, specs, basepoint):
        if mode not in ("single", "product", "diagonal"):
            raise ValueError(f"unknown action mode {mode!r}")
        self.mode = mode
        self.specs = tuple(specs)
        if mode == "product" and len(self.specs) != 2:
            raise ValueError("product actions need two group factors")
        if mode in ("single", "diagonal") and len(self.specs) != 1:
            raise ValueError("single/diagonal actions carry one group factor")
        if mode == "single" and not isinstance(basepoint, Ray):
            raise ValueError("single actions act on rays")
        if mode != "single" and not isinstance(basepoint, ProductPoint):
            raise ValueError("product/diagonal actions act on product points")
        self.basepoint = basepoint
        self._ray_cache: dict[tuple, Ray] = {}

    def _apply_ray(self, ray: Ray, g) -> Ray:
        key = (ray.key, g.spec.key, g.word)
        hit = self._ray_cache.get(key)
        if hit is None:
            hit = apply(ray, g)
            self._ray_cache[key] = hit
        return hit

    def apply(self, point, base):
        if self.mode == "single":
            return self._apply_ray(point, base[0])
        if self.mode == "diagonal":
            g = base[0]
            return ProductPoint(self._apply_ray(point.first, g), self._apply_ray(point.second, g))
        return ProductPoint(
            self._apply_ray(point.first, base[0]), self._apply_ray(point.second, base[1])
        )

    def identity_base(self):
        return tuple(s.identity for s in self.specs)

    def mul(self, b1, b2):
        return tuple(x * y for x, y in zip(b1, b2))

    def inv(self, b):
        return tuple(x.inverse() for x in b)

    def base_key(self, b):
        return "|".join(x.key() for x in b)

    def base_is_identity(self, b) -> bool:
        return all(x.is_trivial() for x in b)

    def base_gens(self):
        """Standard base generators with labels, embedded as tuples."""
        out = []
        if self.mode == "product":
            for i, spec in enumerate(self.specs):
                other = self.specs[1 - i]
                for g in spec.generators():
                    base = (g, other.identity) if i == 0 else (other.identity, g)
                    out.append((f"{g.word}{i + 1}", base))
        else:
            for g in self.specs[0].generators():
                out.append((g.word, (g,)))
        return out


class WreathProduct:
    """The group W = A wr_X G for a fixed action; a factory for elements."""

    def __init__(self, A: FiniteGroupA, action: GroupAction):
        self.A = A
        self.action = action

    def identity(self) -> "WreathElement":
        return WreathElement(self, {}, self.action.identity_base())

    def lamp(self, a_index: int, point=None) -> "WreathElement":
        """The lamp generator writing a_index at the given point (default rho)."""
        if a_index == 0:
            return self.identity()
        point = point if point is not None else self.action.basepoint
        return WreathElement(self, {point.key: (point, a_index)}, self.action.identity_base())

    def base(self, base_tuple) -> "WreathElement":
        return WreathElement(self, {}, tuple(base_tuple))


class WreathElement:
    """Element f*g of W: lamps maps point key -> (point, nonidentity A index)."""

    __slots__ = ("W", "lamps", "base_tuple")

    def __init__(self, W: WreathProduct, lamps: dict, base_tuple):
        self.W = W
        self.lamps = lamps
        self.base_tuple = base_tuple

    def __mul__(self, other: "WreathElement") -> "WreathElement":
        return w_multiply(self, other)

    def inverse(self) -> "WreathElement":
        # (f g)^{-1} = (g^{-1}.f^{-1}) g^{-1}, whose support is supp(f) g
        W = self.W
        lamps = {}
        for point, a in self.lamps.values():
            img = W.action.apply(point, self.base_tuple)
            lamps[img.key] = (img, W.A.inverse[a])
        return WreathElement(W, lamps, W.action.inv(self.base_tuple))

    def is_identity(self) -> bool:
        return not self.lamps and self.W.action.base_is_identity(self.base_tuple)

    def key(self) -> str:
        return w_canonical_key(self)

    def equals(self, other: "WreathElement") -> bool:
        return self.key() == other.key()

    def __repr__(self):
        lamp_s = ",".join(f"{k}:{a}" for k, (_, a) in sorted(self.lamps.items()))
        base_s = " ".join(x.word or "1" for x in self.base_tuple)
        return f"W[{lamp_s}]({base_s})"


def w_multiply(u: WreathElement, v: WreathElement) -> WreathElement:
    """(f1 g1)(f2 g2) = f1 (g1.f2) g1g2; transported lamps sit at x g1^{-1}."""
    if u.W is not v.W and (u.W.A is not v.W.A or u.W.action is not v.W.action):
        raise ValueError("wreath elements from incompatible products")
    W = u.W
    A = W.A
    g1_inv = W.action.inv(u.base_tuple)
    lamps = dict(u.lamps)
    for point, a2 in v.lamps.values():
        img = W.action.apply(point, g1_inv)
        prev = lamps.get(img.key)
        a = A.mul(prev[1], a2) if prev else a2
        if a == 0:
            lamps.pop(img.key, None)
        else:
            lamps[img.key] = (img, a)
    return WreathElement(W, lamps, W.action.mul(u.base_tuple, v.base_tuple))


def w_canonical_key(w: WreathElement) -> str:
    """Stable key: sorted lamp (point key, A index) pairs plus base keys."""
    lamp_part = ";".join(f"{k}:{a}" for k, (_, a) in sorted(w.lamps.items()))
    return f"[{lamp_part}]@{w.W.action.base_key(w.base_tuple)}"


def standard_generators(W: WreathProduct, S_A: list[int] | None = None):
    """Standard generating set: lamp generators at the basepoint orbit
    representative plus the base-group generators with empty lamps.

    Returns labeled pairs (label, WreathElement).
    """
    A = W.A
    if A.order <= 1:
        raise ValueError("A must be nontrivial")
    if S_A is None:
        S_A = _default_agens(A)
    out = []
    for a in S_A:
        if a == 0:
            raise ValueError("identity is not a lamp generator")
        out.append((f"lamp:{A.names[a]}", W.lamp(a)))
    for label, base in W.action.base_gens():
        out.append((label, W.base(base)))
    return out


def _default_agens(A: FiniteGroupA) -> list[int]:
    """A small generating set found greedily by closure."""
    gens: list[int] = []
    closure = {0}
    for i in range(1, A.order):
        if i in closure:
            continue
        gens.append(i)
        frontier = [0]
        closure = {0}
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = A.mul(x, g)
                if y not in closure:
                    closure.add(y)
                    frontier.append(y)
        if len(closure) == A.order:
            break
    return gens
