"""Substitution words, inverted-orbit injectivity, stabilizer-word search, and
the binary-tree embedding certificates.

The pair substitution acts on words over the pair alphabet {ab, ac, ad}:

    ab -> ab ad ac,   ac -> ab ab,   ad -> ac ac

Pair words are stored as strings over {b, c, d} (the second letter of each
pair).  The iterates w_n = zeta^n(ad), read as generator words on the first
Grigorchuk group acting diagonally on the orbit of ((01)^inf, (10)^inf), have
inverted orbits of the maximal possible size |w_n| + 1; length-n suffixes
inherit that property, providing strongly linear words of every length.  The
tree embedding turns such a word plus two lamp values into 2^{n+1} - 1
pairwise distinct wreath elements forming a rooted binary tree inside the
Cayley graph.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import brentq

from .boundary import ProductPoint, fixes, rho_pair
from .core import GroupElement, GroupSpec, first_group, wreath_recurse
from .measures import FiniteMeasure
from .walks import OrbitIndex
from .wreath import FiniteGroupA, GroupAction, WreathProduct

ZETA = {"b": "bdc", "c": "bb", "d": "cc"}
PAIR_ALPHABET = "bcd"


def zeta(pair_word: str) -> str:
    """Blockwise substitution on the pair alphabet."""
    for ch in pair_word:
        if ch not in PAIR_ALPHABET:
            raise ValueError(f"pair letters must be in {PAIR_ALPHABET!r}")
    return "".join(ZETA[ch] for ch in pair_word)


def flatten(pair_word: str) -> str:
    """Generator word: each pair letter x becomes the two letters 'a' + x."""
    return "".join("a" + ch for ch in pair_word)


def pair_counts(pair_word: str) -> np.ndarray:
    return np.array([pair_word.count(x) for x in PAIR_ALPHABET])


SUBSTITUTION_MATRIX = np.array(
    [[1, 2, 0], [1, 0, 2], [1, 0, 0]]
)  # column j = counts of (ab, ac, ad) in the image of pair j


def eta_root() -> float:
    """The root in (0, 1) of eta^3 + eta^2 + eta = 2."""
    return brentq(lambda x: x**3 + x**2 + x - 2.0, 0.5, 1.0)


def growth_rate() -> float:
    """Dominant substitution eigenvalue; equals 2/eta for the cubic root."""
    return 2.0 / eta_root()


def w_n(n: int, length_budget: int = 1_000_000) -> dict:
    """The iterate zeta^n(ad) with its pair-count history.

    Returns {'pairs': pair word, 'word': generator word, 'counts': history of
    pair-count vectors}.  Raises if the flattened length would exceed the
    budget.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    w = "d"
    counts = [pair_counts(w)]
    for _ in range(n):
        if 2 * len(w) * 3 > length_budget:
            raise ValueError("length budget exceeded")
        w = zeta(w)
        counts.append(pair_counts(w))
    return {"pairs": w, "word": flatten(w), "counts": np.array(counts)}


def strongly_linear_word(n: int) -> str:
    """A length-n generator word whose inverted orbit is maximal: the length-n
    suffix of the first iterate long enough.  Suffixes inherit maximality
    because a subword fixing the basepoint stays a subword."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return ""
    w = "d"
    while 2 * len(w) < n:
        w = zeta(w)
    return flatten(w)[-n:]


def diagonal_action(spec: GroupSpec | None = None) -> GroupAction:
    spec = spec or first_group()
    return GroupAction("diagonal", [spec], rho_pair())


def verify_distinct_inverted_orbit(
    word: str,
    action: GroupAction | None = None,
) -> tuple[bool, int]:
    """Whether the inverted orbit of the word (letters acting diagonally from
    ((01)^inf, (10)^inf)) has the maximal size |word| + 1; returns (flag, delta).

    Uses the incremental update O(w g) = O(w) g U {rho} with memoized
    per-generator point maps.
    """
    action = action or diagonal_action()
    spec = action.specs[0]
    gens = [(g,) for g in spec.generators()]
    gen_index = {g[0].word: i for i, g in enumerate(gens)}
    oi = OrbitIndex(action, gens, action.basepoint)
    current = np.array([0], dtype=np.int64)
    distinct = True
    for ch in word:
        b = gen_index[ch]
        imgs = oi.step_vec(current, b)
        nxt = np.unique(np.append(imgs, 0))
        if len(nxt) != len(current) + 1:
            distinct = False
        current = nxt
    return distinct and len(current) == len(word) + 1, int(len(current))


def alternating_words(length: int):
    """All reduced alternating words of exactly the given length."""
    from itertools import product as _product

    if length == 0:
        yield ""
        return
    for start_a in (True, False):
        n_bcd = length // 2 if start_a else (length + 1) // 2
        n_a = length - n_bcd
        if abs(n_a - n_bcd) > 1:
            continue
        for choice in _product(PAIR_ALPHABET, repeat=n_bcd):
            out = []
            ci = 0
            use_a = start_a
            for _ in range(length):
                if use_a:
                    out.append("a")
                else:
                    out.append(choice[ci])
                    ci += 1
                use_a = not use_a
            yield "".join(out)


def classify_stabilizer_word(word: str) -> str:
    """Shape report for a stabilizer word: 'yaxadaxay' for the exceptional
    palindromes y a x a d a x a y (x in {b,c}, y in {1,c,d}), 'six-bcd' for
    words with at least six {b,c,d} letters, 'other' otherwise."""
    for x in "bc":
        for y in ["", "c", "d"]:
            if word == y + "a" + x + "ada" + x + "a" + y:
                return "yaxadaxay"
    if sum(word.count(ch) for ch in PAIR_ALPHABET) >= 6:
        return "six-bcd"
    return "other"


def min_stabilizer_word_length(
    max_len: int,
    basepoint: ProductPoint | None = None,
    spec: GroupSpec | None = None,
) -> dict:
    """Exhaustive search for the shortest nontrivial alternating word fixing
    the basepoint under the diagonal action.

    Returns {'min_length': int or None, 'witnesses': {length: [words]},
    'classification': {word: shape}} over lengths 1..max_len.
    """
    if max_len > 16:
        raise ValueError("combinatorial budget: max_len <= 16")
    spec = spec or first_group()
    basepoint = basepoint or rho_pair()
    witnesses: dict[int, list[str]] = {}
    classification: dict[str, str] = {}
    min_length = None
    for L in range(1, max_len + 1):
        found = []
        for w in alternating_words(L):
            g = spec.element(w)
            if g.is_trivial():
                continue
            if fixes(g, basepoint):
                found.append(w)
                classification[w] = classify_stabilizer_word(w)
        if found:
            witnesses[L] = found
            if min_length is None:
                min_length = L
    return {"min_length": min_length, "witnesses": witnesses, "classification": classification}


def section_identity_check(n: int, spec: GroupSpec | None = None) -> bool:
    """The wreath sections of w_n are, as group elements, (a^{-1} w_{n-1} a,
    w_{n-1}) with trivial root permutation.

    Sections live over the shifted sequence; for the cyclic omega = (012)^inf
    an omega-word is rewritten as the equal shifted-sequence word by the letter
    rotation b -> d, c -> b, d -> c.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    spec = spec or first_group()
    rot = str.maketrans("bcd", "dbc")
    prev = w_n(n - 1)["word"]
    cur = w_n(n)["word"]
    sec = wreath_recurse(spec.element(cur))
    if sec.root_swap:
        return False
    shifted = spec.shift()
    left_target = shifted.element(("a" + prev + "a").translate(rot))
    right_target = shifted.element(prev.translate(rot))
    return sec.left.equals(left_target) and sec.right.equals(right_target)


# ---------------------------------------------------------------------------
# binary tree embedding


class TreeEmbedding:
    """Levels of wreath elements; level k holds the elements a_{i_m} g_m ...
    a_{i_n} g_n with m = n - k + 1, children arising by one more left factor."""

    def __init__(self, W: WreathProduct, word: str, a0: int, a1: int, levels, parents):
        self.W = W
        self.word = word
        self.a_values = (a0, a1)
        self.levels = levels  # level 0 is the root = identity
        self.parents = parents  # (k, j) -> index of parent in level k-1

    def size(self) -> int:
        return sum(len(level) for level in self.levels)

    def verify_parent_edges(self) -> bool:
        """Each child equals (a_i g) * parent for a standard generator pair."""
        spec = self.W.action.specs[0]
        n = len(self.word)
        for k in range(1, len(self.levels)):
            g = self.W.base((spec.element(self.word[n - k]),))
            for j, child in enumerate(self.levels[k]):
                parent = self.levels[k - 1][self.parents[(k, j)]]
                lamp = self.W.lamp(self.a_values[j % 2])
                if not child.equals(lamp * g * parent):
                    return False
        return True


def tree_embedding(
    n: int,
    W: WreathProduct | None = None,
    a0: int = 0,
    a1: int = 1,
) -> TreeEmbedding:
    """Build the 2^{n+1} - 1 wreath elements a_{i_m} g_m ... a_{i_n} g_n over a
    strongly-linear word of length n and verify they are pairwise distinct.

    a0 and a1 are distinct elements of A (a0 may be the identity).  A collision
    aborts loudly: it would falsify the embedding at this scale.
    """
    if a0 == a1:
        raise ValueError("a0 and a1 must differ")
    if W is None:
        W = WreathProduct(FiniteGroupA("C2", [[0, 1], [1, 0]]), diagonal_action())
    word = strongly_linear_word(n)
    spec = W.action.specs[0]
    letters = [spec.element(ch) for ch in word]
    lamp_a = {0: W.lamp(a0), 1: W.lamp(a1)}

    levels = [[W.identity()]]
    parents = {}
    keys = {W.identity().key()}
    for k in range(1, n + 1):
        g = W.base((letters[n - k],))
        prev = levels[-1]
        cur = []
        for j, elem in enumerate(prev):
            for bit in (0, 1):
                child = lamp_a[bit] * g * elem
                ck = child.key()
                if ck in keys:
                    raise RuntimeError(
                        f"tree embedding collision at level {k} (bit {bit}, parent {j})"
                    )
                keys.add(ck)
                parents[(k, len(cur))] = j
                cur.append(child)
        levels.append(cur)
    emb = TreeEmbedding(W, word, a0, a1, levels, parents)
    assert emb.size() == 2 ** (n + 1) - 1
    return emb


# ---------------------------------------------------------------------------
# orbit-set counters


def orbit_counts(
    n: int,
    k: int,
    mode: str,
    gens: list[GroupElement] | None = None,
    action: GroupAction | None = None,
    ball_sizes=None,
) -> int:
    """Counters over length-n generator words from the basepoint.

    mode 'inverted': number of distinct inverted-orbit sets of size k;
    mode 'direct':   number of distinct trajectory sets of size k;
    mode 'v_plus':   number of tuples (g_1..g_j), j <= k, with total norm <= n,
                     computed from exact sphere sizes by composition counting
                     (pass ball_sizes = [|B(0)|, |B(1)|, ...] up to n).
    """
    if mode == "v_plus":
        if ball_sizes is None:
            raise ValueError("v_plus needs exact ball sizes")
        spheres = np.diff(np.asarray(ball_sizes, dtype=object), prepend=0)
        # t_j[m] = number of j-tuples with total norm exactly m
        total = 0
        t = np.zeros(n + 1, dtype=object)
        t[0] = 1
        for _ in range(1, k + 1):
            nt = np.zeros(n + 1, dtype=object)
            for m in range(n + 1):
                if t[m] == 0:
                    continue
                for s in range(n + 1 - m):
                    nt[m + s] += t[m] * spheres[s]
            t = nt
            total += int(np.sum(t))
        return total

    if mode not in ("inverted", "direct"):
        raise ValueError(f"unknown mode {mode!r}")
    if n > 12:
        raise ValueError("exhaustive modes budget: n <= 12")
    action = action or diagonal_action()
    if gens is None:
        gens = action.specs[0].generators()
    bases = [(g,) if not isinstance(g, tuple) else g for g in gens]
    oi = OrbitIndex(action, bases, action.basepoint)
    found: set[frozenset] = set()

    if mode == "inverted":
        def rec(depth, current: frozenset):
            if depth == n:
                if len(current) == k:
                    found.add(current)
                return
            for b in range(len(bases)):
                imgs = frozenset(oi.step(v, b) for v in current) | {0}
                rec(depth + 1, imgs)

        rec(0, frozenset({0}))
    else:
        def rec(depth, pos, visited: frozenset):
            if depth == n:
                if len(visited) == k:
                    found.add(visited)
                return
            for b in range(len(bases)):
                w = oi.step(pos, b)
                rec(depth + 1, w, visited | {w})

        rec(0, 0, frozenset({0}))
    return len(found)


def v_plus_bruteforce(n: int, k: int, radius_elems: dict) -> int:
    """Oracle for v_plus at tiny n: count tuples of actual elements (length
    1..k) with total norm <= n.  radius_elems maps norm -> list of canonical
    keys of the elements with that exact norm."""
    norms = [m for m, keys in radius_elems.items() for _ in keys if m <= n]

    def count(j, budget):
        if j == 0:
            return 0
        c = 0
        for m in norms:
            if m <= budget:
                c += 1 + count(j - 1, budget - m)
        return c

    return count(k, n)
