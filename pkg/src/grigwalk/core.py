"""Grigorchuk family groups: reduced words, wreath recursion, decidable word problem.

Each group G_omega is parametrized by an eventually periodic sequence omega over
{0,1,2} and acts faithfully on the infinite binary rooted tree.  The four
generators a, b, c, d are involutions; {1,b,c,d} is a Klein four-group, so every
element is represented by a word alternating between 'a' and {b,c,d} letters.

The level-0 recursion sends each generator to a pair of subtree sections and a
root permutation:

    a   -> sections (1, 1), root swap
    x   -> sections (t, x) for x in {b,c,d}, no swap

where the token t in {a, 1} is read off the first letter of omega (each omega
letter picks which two of b, c, d carry an 'a' in their left section, the third
carrying 1) and the right section is the same letter interpreted over the
shifted sequence sigma(omega).  For omega = (012)^inf this reproduces the
classical self-similar presentation of the first Grigorchuk group: the shifted
generators b, c, d coincide, as tree automorphisms, with c, d, b of the
unshifted group.

Word problem: reduce, check the root permutation parity, then branch into both
sections.  Sections of a reduced word of length >= 2 are strictly shorter, so
the branch recursion terminates at words of length <= 1, whose triviality is
decided directly from the letters occurring in omega.

All values here are immutable; per-group memo caches are append-only dicts and
safe under the GIL for concurrent readers.
"""

from __future__ import annotations

GENERATORS = "abcd"

# x*y for x != y in the Klein four-group {b,c,d}
_KLEIN = {
    ("b", "c"): "d", ("c", "b"): "d",
    ("b", "d"): "c", ("d", "b"): "c",
    ("c", "d"): "b", ("d", "c"): "b",
}

# omega letter -> left-section token per generator ("" means identity)
OMEGA_TABLE = {
    "0": {"b": "a", "c": "a", "d": ""},
    "1": {"b": "a", "c": "", "d": "a"},
    "2": {"b": "", "c": "a", "d": "a"},
}


def primitive_root(s: str) -> str:
    """Shortest u with s = u^k."""
    n = len(s)
    for d in range(1, n + 1):
        if n % d == 0 and s == s[:d] * (n // d):
            return s[:d]
    return s


def normalize_eventually_periodic(pre: str, per: str) -> tuple[str, str]:
    """Canonical (preperiod, period) for an eventually periodic sequence.

    The period is made primitive, then preperiod letters equal to the rolled
    period tail are absorbed.  Two eventually periodic sequences are equal as
    infinite sequences iff their normal forms coincide.
    """
    if not per:
        raise ValueError("period must be nonempty")
    per = primitive_root(per)
    while pre and pre[-1] == per[-1]:
        per = per[-1] + per[:-1]
        pre = pre[:-1]
    return pre, per


class OmegaSequence:
    """Eventually periodic sequence over {0,1,2}, stored in normal form."""

    __slots__ = ("pre", "per", "key")

    def __init__(self, pre: str, per: str):
        if not per:
            raise ValueError("omega period must be nonempty")
        for ch in pre + per:
            if ch not in "012":
                raise ValueError(f"omega letters must be in 012, got {ch!r}")
        self.pre, self.per = normalize_eventually_periodic(pre, per)
        self.key = f"{self.pre}|{self.per}"

    def letter(self, i: int) -> str:
        if i < len(self.pre):
            return self.pre[i]
        return self.per[(i - len(self.pre)) % len(self.per)]

    def shift(self) -> "OmegaSequence":
        if self.pre:
            return OmegaSequence(self.pre[1:], self.per)
        return OmegaSequence("", self.per[1:] + self.per[0])

    def letters_used(self) -> set:
        return set(self.pre + self.per)

    def __eq__(self, other):
        return isinstance(other, OmegaSequence) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"OmegaSequence({self.pre!r}, {self.per!r})"


def reduce_word(word: str) -> str:
    """Reduce a word over {a,b,c,d} using the common relations of every G_omega.

    a^2 = b^2 = c^2 = d^2 = 1 and bc = cb = d, bd = db = c, cd = dc = b.
    The result alternates between 'a' and {b,c,d} letters.
    """
    out: list[str] = []
    for ch in word:
        if ch not in GENERATORS:
            raise ValueError(f"letter {ch!r} not in {GENERATORS!r}")
        while True:
            if not out:
                out.append(ch)
                break
            top = out[-1]
            if ch == top:
                out.pop()
                break
            if ch != "a" and top != "a":
                out.pop()
                ch = _KLEIN[(top, ch)]
                continue
            out.append(ch)
            break
    return "".join(out)


def is_reduced(word: str) -> bool:
    return word == reduce_word(word)


class GroupSpec:
    """Handle for one group G_omega with its recursion rules and memo caches."""

    def __init__(self, omega: OmegaSequence):
        self.omega = omega
        self.table = OMEGA_TABLE[omega.letter(0)]
        self._shift: GroupSpec | None = None
        self._triv: dict[str, bool] = {"": True}
        self._keys: dict[str, str] = {}
        self._balls: tuple[int, dict] | None = None
        # generator x in {b,c,d} is the identity automorphism iff its left
        # token vanishes at every level, i.e. at every letter of omega
        letters = omega.letters_used()
        self._letter_trivial = {
            x: all(OMEGA_TABLE[l][x] == "" for l in letters) for x in "bcd"
        }

    @property
    def key(self) -> str:
        return self.omega.key

    def shift(self) -> "GroupSpec":
        if self._shift is None:
            self._shift = make_group(self.omega.shift())
        return self._shift

    def element(self, word: str) -> "GroupElement":
        return GroupElement(self, reduce_word(word))

    @property
    def identity(self) -> "GroupElement":
        return GroupElement(self, "")

    def generators(self) -> list["GroupElement"]:
        return [GroupElement(self, x) for x in GENERATORS]

    def __repr__(self):
        return f"GroupSpec(omega={self.omega.key!r})"


_SPEC_REGISTRY: dict[str, GroupSpec] = {}


def make_group(omega: OmegaSequence | str) -> GroupSpec:
    """Group handle for G_omega; handles are cached per normalized omega."""
    if isinstance(omega, str):
        omega = OmegaSequence("", omega)
    spec = _SPEC_REGISTRY.get(omega.key)
    if spec is None:
        spec = GroupSpec(omega)
        _SPEC_REGISTRY[omega.key] = spec
    return spec


def first_group() -> GroupSpec:
    """The first Grigorchuk group, omega = (012)^inf."""
    return make_group("012")


class GroupElement:
    """Element of G_omega held as a reduced word; immutable."""

    __slots__ = ("spec", "word")

    def __init__(self, spec: GroupSpec, word: str):
        self.spec = spec
        self.word = word

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return multiply(self, other)

    def inverse(self) -> "GroupElement":
        # every generator is an involution, so inverses reverse the word
        return GroupElement(self.spec, self.word[::-1])

    def __pow__(self, n: int) -> "GroupElement":
        if n < 0:
            return self.inverse() ** (-n)
        acc = self.spec.identity
        for _ in range(n):
            acc = acc * self
        return acc

    def is_trivial(self) -> bool:
        return _trivial(self.spec, self.word)

    def equals(self, other: "GroupElement") -> bool:
        if self.spec.key != other.spec.key:
            raise ValueError("elements live over different omega sequences")
        return _trivial(self.spec, reduce_word(self.word + other.word[::-1]))

    def key(self) -> str:
        return canonical_key(self)

    def act_prefix(self, bits: str) -> str:
        """Image of a finite binary tree vertex under the right action."""
        out = []
        spec, w = self.spec, self.word
        for ch in bits:
            x = int(ch)
            out.append(str(x ^ (w.count("a") & 1)))
            _, left, right = _sections(spec, w)
            w = left if x == 0 else right
            spec = spec.shift()
        return "".join(out)

    def __repr__(self):
        return f"<{self.word or '1'} over {self.spec.key}>"


def multiply(g: GroupElement, h: GroupElement) -> GroupElement:
    if g.spec.key != h.spec.key:
        raise ValueError("omega mismatch in multiplication")
    return GroupElement(g.spec, reduce_word(g.word + h.word))


class Section:
    """Wreath decomposition of an element: root swap plus two subtree sections."""

    __slots__ = ("root_swap", "left", "right")

    def __init__(self, root_swap: bool, left: GroupElement, right: GroupElement):
        self.root_swap = root_swap
        self.left = left
        self.right = right

    def __iter__(self):
        return iter((self.root_swap, self.left, self.right))

    def __repr__(self):
        s = "swap" if self.root_swap else "id"
        return f"Section({s}, {self.left.word or '1'}, {self.right.word or '1'})"


def _sections(spec: GroupSpec, word: str) -> tuple[int, str, str]:
    """Root parity and reduced section words (over the shifted omega)."""
    parity = 0
    left: list[str] = []
    right: list[str] = []
    table = spec.table
    for ch in word:
        if ch == "a":
            parity ^= 1
        else:
            token = table[ch]
            if parity == 0:
                if token:
                    left.append(token)
                right.append(ch)
            else:
                left.append(ch)
                if token:
                    right.append(token)
    return parity, reduce_word("".join(left)), reduce_word("".join(right))


def wreath_recurse(g: GroupElement) -> Section:
    """Decompose g as (root permutation, left section, right section).

    Sections are elements over the shifted sequence sigma(omega).  The total
    section length is at most |g| + 1, and strictly smaller than |g| for
    each section when |g| >= 2, which is what makes the word problem decidable.
    """
    parity, lw, rw = _sections(g.spec, g.word)
    shifted = g.spec.shift()
    return Section(bool(parity), GroupElement(shifted, lw), GroupElement(shifted, rw))


def _trivial(spec: GroupSpec, word: str) -> bool:
    cache = spec._triv
    hit = cache.get(word)
    if hit is not None:
        return hit
    if word.count("a") & 1:
        result = False
    elif len(word) == 1:
        result = spec._letter_trivial[word]
    else:
        _, lw, rw = _sections(spec, word)
        shifted = spec.shift()
        result = _trivial(shifted, lw) and _trivial(shifted, rw)
    cache[word] = result
    return result


def is_trivial(g: GroupElement) -> bool:
    """Decide the word problem: g = 1 in G_omega."""
    return _trivial(g.spec, g.word)


def canonical_key(g: GroupElement) -> str:
    """Canonical key: equal elements over the same omega get equal keys.

    The key is the recursively minimized portrait.  At each node the element is
    first compared against the identity and the four generators (exactly, via
    the word problem); otherwise the node records the root swap and the keys of
    both sections.  Keys are only comparable between elements of one G_omega.
    """
    return _key(g.spec, g.word)


def _key(spec: GroupSpec, word: str) -> str:
    cache = spec._keys
    hit = cache.get(word)
    if hit is not None:
        return hit
    if _trivial(spec, word):
        result = "e"
    else:
        result = ""
        for x in GENERATORS:
            if _trivial(spec, reduce_word(word + x)):
                result = x
                break
        if not result:
            parity, lw, rw = _sections(spec, word)
            shifted = spec.shift()
            mid = "*" if parity else "."
            result = f"({mid}{_key(shifted, lw)}{_key(shifted, rw)})"
    cache[word] = result
    return result


def element_order(g: GroupElement, cap: int) -> int | None:
    """Least m <= cap with g^m = 1, or None if the cap is exceeded."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    acc = g
    for m in range(1, cap + 1):
        if acc.is_trivial():
            return m
        acc = acc * g
    return None


def _extend_balls(spec: GroupSpec, radius: int) -> dict[str, tuple[int, str]]:
    """BFS over canonical keys; maps key -> (distance, shortest word)."""
    if spec._balls is not None and spec._balls[0] >= radius:
        return spec._balls[1]
    dist: dict[str, tuple[int, str]] = {_key(spec, ""): (0, "")}
    frontier = [""]
    for r in range(1, radius + 1):
        nxt = []
        for w in frontier:
            for x in GENERATORS:
                w2 = reduce_word(w + x)
                k2 = _key(spec, w2)
                if k2 not in dist:
                    dist[k2] = (r, w2)
                    nxt.append(w2)
        frontier = nxt
        if not frontier:
            break
    spec._balls = (radius, dist)
    return dist


def ball_profile(spec: GroupSpec, radius: int) -> list[int]:
    """Sizes |B(0)|, |B(1)|, ..., |B(radius)| for the word metric on {a,b,c,d}."""
    dist = _extend_balls(spec, radius)
    sizes = [0] * (radius + 1)
    for d, _ in dist.values():
        for r in range(d, radius + 1):
            sizes[r] += 1
    return sizes


def geodesic_length(g: GroupElement, radius_cap: int) -> int | None:
    """Exact word-metric norm via ball enumeration, or None beyond the cap."""
    if radius_cap < 0:
        raise ValueError("radius_cap must be >= 0")
    dist = _extend_balls(g.spec, radius_cap)
    hit = dist.get(canonical_key(g))
    if hit is None or hit[0] > radius_cap:
        return None
    return hit[0]


def same_action(g: GroupElement, h: GroupElement, depth: int) -> bool:
    """Whether two elements (possibly over different omega) agree on the tree
    down to the given depth."""
    for v in range(2 ** depth):
        bits = format(v, f"0{depth}b")
        if g.act_prefix(bits) != h.act_prefix(bits):
            return False
    return True


def random_reduced_word(rng, length: int) -> str:
    """Random reduced alternating word of exactly the given length (length may
    shrink by parity constraints only when length is 0)."""
    if length <= 0:
        return ""
    start_with_a = bool(rng.integers(0, 2))
    out = []
    use_a = start_with_a
    while len(out) < length:
        if use_a:
            out.append("a")
        else:
            out.append("bcd"[rng.integers(0, 3)])
        use_a = not use_a
    return "".join(out)
