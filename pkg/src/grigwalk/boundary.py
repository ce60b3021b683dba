"""Tree-boundary points, the right action of G_omega on rays, Schreier graphs.

A boundary point is an eventually periodic infinite binary sequence stored as a
normalized (preperiod, period) pair, so equality of points is syntactic.  The
action of a group element is evaluated by section descent: walking down the ray
one letter at a time while replacing the element by the section at the consumed
letter.  Sections of a reduced word shrink to single letters after finitely
many steps, after which the (letter, ray phase, omega phase) state must cycle;
the detected cycle yields the eventually periodic image ray.
"""

from __future__ import annotations

from .core import (
    GroupElement,
    GroupSpec,
    normalize_eventually_periodic,
    _sections,
)


class Ray:
    """Eventually periodic binary ray in normal form."""

    __slots__ = ("pre", "per", "key")

    def __init__(self, pre: str, per: str):
        for ch in pre + per:
            if ch not in "01":
                raise ValueError(f"ray letters must be binary, got {ch!r}")
        self.pre, self.per = normalize_eventually_periodic(pre, per)
        self.key = f"{self.pre}|{self.per}"

    def letter(self, i: int) -> str:
        if i < len(self.pre):
            return self.pre[i]
        return self.per[(i - len(self.pre)) % len(self.per)]

    def prefix(self, n: int) -> str:
        return "".join(self.letter(i) for i in range(n))

    def __eq__(self, other):
        return isinstance(other, Ray) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"Ray({self.pre!r}, {self.per!r})"


class ProductPoint:
    """Point of X1 x X2: a pair of rays, componentwise normalized."""

    __slots__ = ("first", "second", "key")

    def __init__(self, first: Ray, second: Ray):
        self.first = first
        self.second = second
        self.key = f"{first.key}&{second.key}"

    def __eq__(self, other):
        return isinstance(other, ProductPoint) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"ProductPoint({self.first!r}, {self.second!r})"


def rho1() -> Ray:
    return Ray("", "01")


def rho2() -> Ray:
    return Ray("", "10")


def rho_pair() -> ProductPoint:
    return ProductPoint(rho1(), rho2())


def apply(point: Ray, g: GroupElement, cap: int | None = None) -> Ray:
    """Image of a ray under the right action of g.

    Satisfies apply(apply(x, g), h) = apply(x, g*h).  Descends the ray with
    cycle detection on (section word, ray phase, omega phase) states.
    """
    spec: GroupSpec = g.spec
    word = g.word
    ray = point
    if cap is None:
        omega_cycle = len(spec.omega.pre) + len(spec.omega.per)
        cap = (len(word) + 2) * len(ray.per) * omega_cycle * 5 + 64
    pre_len = len(ray.pre)
    out: list[str] = []
    seen: dict[tuple, int] = {}
    i = 0
    cur_spec, cur_w = spec, word
    while True:
        if i >= pre_len:
            phase = ("c", (i - pre_len) % len(ray.per))
        else:
            phase = ("p", i)
        state = (cur_w, cur_spec.key, phase)
        j = seen.get(state)
        if j is not None:
            return Ray("".join(out[:j]), "".join(out[j:i]))
        seen[state] = i
        x = int(ray.letter(i))
        parity, lw, rw = _sections(cur_spec, cur_w)
        out.append(str(x ^ parity))
        cur_w = lw if x == 0 else rw
        cur_spec = cur_spec.shift()
        i += 1
        if i > cap:
            raise RuntimeError("section-descent cycle detection cap exceeded")


def apply_product(point: ProductPoint, g1: GroupElement, g2: GroupElement) -> ProductPoint:
    """Coordinatewise action of (g1, g2) in G1 x G2."""
    return ProductPoint(apply(point.first, g1), apply(point.second, g2))


def apply_diagonal(point: ProductPoint, g: GroupElement) -> ProductPoint:
    """Diagonal action of a single group element on a product point."""
    return ProductPoint(apply(point.first, g), apply(point.second, g))


def fixes(g, point) -> bool:
    """Stabilizer membership: does g fix the point?

    Rays use the plain action; product points use the diagonal action (fixing
    a pair means fixing both coordinates).
    """
    if isinstance(point, Ray):
        return apply(point, g) == point
    return apply(point.first, g) == point.first and apply(point.second, g) == point.second


class SchreierGraph:
    """Lazily explored orbit graph of a list of generators.

    Vertices are normalized point keys; for each vertex the neighbor list holds
    one entry per generator.  Exploration is breadth-first and single-writer;
    readers may inspect the graph between expansion steps.
    """

    def __init__(self, basepoints, apply_fn):
        if not isinstance(basepoints, (list, tuple)):
            basepoints = [basepoints]
        self._apply = apply_fn
        self.points: dict[str, object] = {p.key: p for p in basepoints}
        self.basepoints = [p.key for p in basepoints]
        self.neighbors: dict[str, list[str]] = {}
        self._frontier: list[str] = list(self.points)

    def explore(self, gens, budget: int) -> "SchreierGraph":
        """Expand breadth-first, admitting at most `budget` new vertices."""
        if budget < 0:
            raise ValueError("budget must be >= 0")
        added = 0
        queue = [k for k in self._frontier if k not in self.neighbors]
        self._frontier = []
        qi = 0
        while qi < len(queue):
            key = queue[qi]
            qi += 1
            if key in self.neighbors:
                continue
            point = self.points[key]
            row = []
            for g in gens:
                img = self._apply(point, g)
                row.append(img.key)
                if img.key not in self.points:
                    if added >= budget:
                        row.pop()
                        row.append(None)  # unexpanded direction
                        continue
                    self.points[img.key] = img
                    queue.append(img.key)
                    added += 1
                elif img.key not in self.neighbors and img.key not in queue[qi:]:
                    if img.key not in self._frontier:
                        self._frontier.append(img.key)
            self.neighbors[key] = row
        # remember untouched queue remainder for idempotent re-exploration
        self._frontier.extend(k for k in queue[qi:] if k not in self.neighbors)
        return self

    def edges(self, labels) -> list[tuple[str, str, str]]:
        """Sorted undirected edge list (src, label, dst) with src <= dst."""
        out = set()
        for key, row in sorted(self.neighbors.items()):
            for gi, dst in enumerate(row):
                if dst is None or dst not in self.points:
                    continue
                u, v = sorted((key, dst))
                out.add((u, labels[gi], v))
        return sorted(out)


DOT_COLORS = {"a": "black", "b": "red", "c": "green", "d": "blue"}


def export_graph(graph: SchreierGraph, fmt: str, labels=("a", "b", "c", "d")) -> str:
    """Deterministic DOT or CSV rendering of the explored window."""
    if not graph.points:
        raise ValueError("graph has no explored vertices")
    if fmt == "dot":
        lines = ["graph schreier {"]
        for key in sorted(graph.points):
            lines.append(f'  "{key}";')
        for u, lab, v in graph.edges(labels):
            color = DOT_COLORS.get(lab, "black")
            lines.append(f'  "{u}" -- "{v}" [label="{lab}", color="{color}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"
    if fmt == "csv":
        lines = ["src,gen,dst"]
        for u, lab, v in graph.edges(labels):
            lines.append(f"{u},{lab},{v}")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unsupported format {fmt!r}")
