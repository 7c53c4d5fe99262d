"""Free group words, automorphisms of F_N and the phi_k family.

Words are stored run-length encoded: a tuple of ``(generator, exponent)``
pairs with nonzero exponents and distinct neighbouring generators.  A letter
is a signed generator index, ``+i`` for ``a_i`` and ``-i`` for its inverse.

Text form: ``"a1 a1 A3"`` (lowercase = generator, uppercase = inverse).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

DEFAULT_LENGTH_CAP = 10**7

_TOKEN = re.compile(r"([aA])(\d+)(?:\^(-?\d+))?")


class WordLengthError(OverflowError):
    """An iterated image exceeded the letter cap."""

    def __init__(self, length: int, cap: int):
        super().__init__(f"word length {length} exceeds cap {cap}")
        self.length = length
        self.cap = cap


class ParameterError(ValueError):
    pass


class _Builder:
    """Stack used for free reduction of run sequences."""

    __slots__ = ("rank", "stack", "length", "cap")

    def __init__(self, rank: int, cap: int | None = None):
        self.rank = rank
        self.stack: list[list[int]] = []
        self.length = 0
        self.cap = cap

    def push(self, gen: int, exp: int) -> None:
        if exp == 0:
            return
        stack = self.stack
        if stack and stack[-1][0] == gen:
            old = stack[-1][1]
            new = old + exp
            self.length += abs(new) - abs(old)
            if new == 0:
                stack.pop()
            else:
                stack[-1][1] = new
        else:
            stack.append([gen, exp])
            self.length += abs(exp)

    def push_word(self, w: "Word", times: int = 1) -> None:
        runs = w.runs
        for _ in range(times):
            for gen, exp in runs:
                self.push(gen, exp)
        if self.cap is not None and self.length > self.cap:
            raise WordLengthError(self.length, self.cap)

    def word(self) -> "Word":
        return Word(self.rank, tuple((g, e) for g, e in self.stack))


@dataclass(frozen=True)
class Word:
    """A freely reduced word in F_rank."""

    rank: int
    runs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        prev = None
        for gen, exp in self.runs:
            if not 1 <= gen <= self.rank:
                raise ValueError(f"generator index {gen} outside 1..{self.rank}")
            if exp == 0 or gen == prev:
                raise ValueError("runs are not freely reduced")
            prev = gen

    @classmethod
    def from_letters(cls, letters: Iterable[int], rank: int) -> "Word":
        return reduce(letters, rank)

    @classmethod
    def generator(cls, i: int, rank: int, exp: int = 1) -> "Word":
        return cls(rank, ((i, exp),) if exp else ())

    @classmethod
    def parse(cls, text: str, rank: int) -> "Word":
        """Parse ``"a1 A2 a3^4"``; whitespace between tokens is optional."""
        b = _Builder(rank)
        pos = 0
        text = text.strip()
        while pos < len(text):
            if text[pos].isspace():
                pos += 1
                continue
            m = _TOKEN.match(text, pos)
            if m is None:
                raise ValueError(f"cannot parse word at {text[pos:]!r}")
            gen = int(m.group(2))
            if not 1 <= gen <= rank:
                raise ValueError(f"generator index {gen} outside 1..{rank}")
            exp = int(m.group(3)) if m.group(3) else 1
            b.push(gen, exp if m.group(1) == "a" else -exp)
            pos = m.end()
        return b.word()

    def __len__(self) -> int:
        return sum(abs(e) for _, e in self.runs)

    def __bool__(self) -> bool:
        return bool(self.runs)

    def letters(self) -> Iterator[int]:
        for gen, exp in self.runs:
            letter = gen if exp > 0 else -gen
            for _ in range(abs(exp)):
                yield letter

    def __mul__(self, other: "Word") -> "Word":
        if self.rank != other.rank:
            raise ValueError("rank mismatch")
        b = _Builder(self.rank)
        b.push_word(self)
        b.push_word(other)
        return b.word()

    def __pow__(self, n: int) -> "Word":
        base = self if n >= 0 else self.inverse()
        b = _Builder(self.rank)
        b.push_word(base, abs(n))
        return b.word()

    def inverse(self) -> "Word":
        return Word(self.rank, tuple((g, -e) for g, e in reversed(self.runs)))

    def is_positive(self) -> bool:
        return all(e > 0 for _, e in self.runs)

    def first_letter(self) -> int:
        gen, exp = self.runs[0]
        return gen if exp > 0 else -gen

    def last_letter(self) -> int:
        gen, exp = self.runs[-1]
        return gen if exp > 0 else -gen

    def counts(self) -> list[int]:
        """Unsigned occurrence count of each generator."""
        out = [0] * self.rank
        for gen, exp in self.runs:
            out[gen - 1] += abs(exp)
        return out

    def weighted_length(self, weights: Sequence[float]) -> float:
        return sum(weights[g - 1] * abs(e) for g, e in self.runs)

    def __str__(self) -> str:
        return " ".join(f"a{abs(x)}" if x > 0 else f"A{abs(x)}" for x in self.letters())

    def compact(self) -> str:
        """Run-length text form, e.g. ``a1^10 a3``."""
        parts = []
        for gen, exp in self.runs:
            tok = f"a{gen}" if exp > 0 else f"A{gen}"
            parts.append(tok if abs(exp) == 1 else f"{tok}^{abs(exp)}")
        return " ".join(parts)


def reduce(raw: Iterable[int], rank: int) -> Word:
    """Freely reduce a sequence of signed generator indices."""
    b = _Builder(rank)
    for x in raw:
        if x == 0 or abs(x) > rank:
            raise ValueError(f"letter {x} outside 1..{rank}")
        b.push(abs(x), 1 if x > 0 else -1)
    return b.word()


def cyclic_reduce(w: Word) -> Word:
    runs = list(w.runs)
    while len(runs) >= 2 and runs[0][0] == runs[-1][0]:
        (g, e1), (_, e2) = runs[0], runs[-1]
        if (e1 > 0) == (e2 > 0):
            break
        c = min(abs(e1), abs(e2))
        e1 = e1 - c if e1 > 0 else e1 + c
        e2 = e2 - c if e2 > 0 else e2 + c
        inner = runs[1:-1]
        runs = ([(g, e1)] if e1 else []) + inner + ([(g, e2)] if e2 else [])
    return Word(w.rank, tuple(runs))


def _least_rotation(seq: Sequence[int]) -> int:
    """Booth's algorithm: start index of the lexicographically least rotation."""
    s = list(seq) * 2
    n = len(seq)
    f = [-1] * len(s)
    k = 0
    for j in range(1, len(s)):
        i = f[j - k - 1]
        while i != -1 and s[j] != s[k + i + 1]:
            if s[j] < s[k + i + 1]:
                k = j - i - 1
            i = f[i]
        if i == -1 and s[j] != s[k]:
            if s[j] < s[k]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return k % n if n else 0


def _letter_key(x: int) -> int:
    # order a1 < A1 < a2 < A2 < ...
    return 2 * abs(x) - (1 if x > 0 else 0)


def canonical(w: Word) -> Word:
    """Canonical representative of the conjugacy class of ``w`` up to inversion."""
    c = cyclic_reduce(w)
    if not c:
        return c
    best = None
    for cand in (c, c.inverse()):
        keys = [_letter_key(x) for x in cand.letters()]
        start = _least_rotation(keys)
        rot = keys[start:] + keys[:start]
        if best is None or rot < best:
            best = rot
    letters = [(k + 1) // 2 if k % 2 else -(k // 2) for k in best]
    return reduce(letters, w.rank)


@dataclass(frozen=True)
class Automorphism:
    """An endomorphism of F_rank given by the images of the generators."""

    rank: int
    images: tuple[Word, ...]

    def __post_init__(self):
        if len(self.images) != self.rank:
            raise ValueError(f"expected {self.rank} images, got {len(self.images)}")
        for im in self.images:
            if im.rank != self.rank:
                raise ValueError("image rank mismatch")
            if not im:
                raise ValueError("generator images must be nonempty")

    @classmethod
    def identity(cls, rank: int) -> "Automorphism":
        return cls(rank, tuple(Word.generator(i, rank) for i in range(1, rank + 1)))

    @classmethod
    def from_strings(cls, images: Sequence[str], rank: int | None = None) -> "Automorphism":
        rank = len(images) if rank is None else rank
        return cls(rank, tuple(Word.parse(s, rank) for s in images))

    @classmethod
    def from_json(cls, text: str | dict) -> "Automorphism":
        data = json.loads(text) if isinstance(text, str) else text
        rank = len(data)
        return cls(rank, tuple(Word.parse(data[f"a{i}"], rank) for i in range(1, rank + 1)))

    def to_json(self) -> dict[str, str]:
        return {f"a{i}": str(im) for i, im in enumerate(self.images, start=1)}

    def is_positive(self) -> bool:
        return all(im.is_positive() for im in self.images)

    def __call__(self, w: Word, cap: int | None = DEFAULT_LENGTH_CAP) -> Word:
        return apply(self, w, cap)


def apply(aut: Automorphism, w: Word, cap: int | None = DEFAULT_LENGTH_CAP) -> Word:
    if aut.rank != w.rank:
        raise ValueError(f"rank mismatch: automorphism {aut.rank}, word {w.rank}")
    images = aut.images
    inverses: dict[int, Word] = {}
    b = _Builder(aut.rank, cap)
    for gen, exp in w.runs:
        if exp > 0:
            b.push_word(images[gen - 1], exp)
        else:
            inv = inverses.get(gen)
            if inv is None:
                inv = inverses[gen] = images[gen - 1].inverse()
            b.push_word(inv, -exp)
    return b.word()


def compose(a: Automorphism, b: Automorphism) -> Automorphism:
    """The automorphism ``a o b``: first ``b``, then ``a``."""
    if a.rank != b.rank:
        raise ValueError("rank mismatch")
    return Automorphism(a.rank, tuple(apply(a, im) for im in b.images))


def is_inverse_pair(a: Automorphism, b: Automorphism) -> bool:
    ident = Automorphism.identity(a.rank)
    return compose(a, b) == ident and compose(b, a) == ident


def power(aut: Automorphism, n: int, inverse: Automorphism | None = None,
          cap: int | None = DEFAULT_LENGTH_CAP) -> Automorphism:
    """``aut**n``; negative ``n`` needs the inverse automorphism."""
    if n < 0:
        if inverse is None:
            raise ValueError("negative power needs the inverse automorphism")
        aut, n = inverse, -n
    result = Automorphism.identity(aut.rank)
    for _ in range(n):
        result = Automorphism(aut.rank, tuple(apply(aut, im, cap) for im in result.images))
    return result


def iterate(aut: Automorphism, w: Word, n: int, cap: int | None = DEFAULT_LENGTH_CAP) -> Word:
    for _ in range(n):
        w = apply(aut, w, cap)
    return w


def _check_family_args(N: int, k: int) -> None:
    if N < 3:
        raise ParameterError(
            f"N={N}: the asymmetric family exists only for N >= 3 "
            "(in rank <= 2 the spectral ratios of phi and phi^-1 coincide)"
        )
    if k < 3:
        raise ParameterError(f"k={k}: the family is defined here for k >= 3")


def phi_family(N: int, k: int) -> tuple[Automorphism, Automorphism]:
    """The pair (phi_k, phi_k^-1) on F_N, checked to compose to the identity.

    phi_k:    a_N -> a_{N-1} -> ... -> a_1 -> a_1^k a_N
    phi_k^-1: a_1 -> a_2 -> ... -> a_N -> a_2^-k a_1
    """
    _check_family_args(N, k)
    gen = lambda i, e=1: Word.generator(i, N, e)  # noqa: E731
    phi = Automorphism(N, (Word(N, ((1, k), (N, 1))),) + tuple(gen(i - 1) for i in range(2, N + 1)))
    inv = Automorphism(N, tuple(gen(i + 1) for i in range(1, N)) + (Word(N, ((2, -k), (1, 1))),))
    if not is_inverse_pair(phi, inv):  # pragma: no cover - structural
        raise AssertionError("phi_k and its claimed inverse do not compose to the identity")
    return phi, inv


def printed_inverse(N: int, k: int) -> tuple[Automorphism, Automorphism]:
    """The map g: a_i -> a_{i+1} (i < N), a_N -> a_{N-1}^-k a_1, and its inverse.

    g is the automorphism whose transition matrix has characteristic polynomial
    x^N - k x^(N-2) - 1.  It inverts phi_k only when N = 3; for larger N its
    inverse is a_1 -> a_{N-2}^k a_N, a_i -> a_{i-1}.
    """
    _check_family_args(N, k)
    gen = lambda i, e=1: Word.generator(i, N, e)  # noqa: E731
    g = Automorphism(N, tuple(gen(i + 1) for i in range(1, N)) + (Word(N, ((N - 1, -k), (1, 1))),))
    h = Automorphism(N, (Word(N, ((N - 2, k), (N, 1))),) + tuple(gen(i - 1) for i in range(2, N + 1)))
    if not is_inverse_pair(g, h):  # pragma: no cover - structural
        raise AssertionError("printed map and its inverse do not compose to the identity")
    return g, h


VARIANTS = ("printed", "exact")


def family_pair(N: int, k: int, variant: str = "printed") -> tuple[Automorphism, Automorphism]:
    """(phi_k, g) where g is the printed map or the exact inverse of phi_k.

    The two agree for N = 3.
    """
    phi, inv = phi_family(N, k)
    if variant == "exact":
        return phi, inv
    if variant == "printed":
        return phi, printed_inverse(N, k)[0]
    raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")


class PositivePowers:
    """Exact class lengths of ``aut**n (w)`` for a positive automorphism,
    without materializing the (exponentially long) image words.

    ``aut**n (a_g)`` is treated as a symbol ``(n, g)`` that expands to the
    symbols ``(n-1, h)`` for the letters ``h`` of ``aut(a_g)``.  Positive
    images never cancel internally, so prefix/suffix comparisons of two
    symbol streams give exact cancellation lengths.
    """

    def __init__(self, aut: Automorphism):
        if not aut.is_positive():
            raise ValueError("PositivePowers needs a positive automorphism")
        self.aut = aut
        self.rank = aut.rank
        self._children = [tuple(im.letters()) for im in aut.images]
        self._counts: dict[tuple[int, int], tuple[int, ...]] = {}

    def counts(self, n: int, g: int) -> tuple[int, ...]:
        """Occurrences of each generator in ``aut**n (a_g)``."""
        key = (n, g)
        hit = self._counts.get(key)
        if hit is not None:
            return hit
        if n == 0:
            out = tuple(int(i == g) for i in range(1, self.rank + 1))
        else:
            acc = [0] * self.rank
            for h in self._children[g - 1]:
                for i, c in enumerate(self.counts(n - 1, h)):
                    acc[i] += c
            out = tuple(acc)
        self._counts[key] = out
        return out

    def letter_length(self, n: int, g: int) -> int:
        return sum(self.counts(n, g))

    def _weight(self, n: int, g: int, weights: Sequence[float]) -> float:
        return sum(c * w for c, w in zip(self.counts(n, g), weights))

    def _common(self, n: int, u: Sequence[int], v: Sequence[int], weights, from_end: bool):
        """Common prefix (or suffix) of aut**n(u) and aut**n(v): (letters, weight)."""
        # stacks hold symbols with the next one to read on top
        order = list if from_end else (lambda seq: list(reversed(seq)))
        s = [(n, g) for g in order(u)]
        t = [(n, g) for g in order(v)]
        letters, weight = 0, 0
        while s and t:
            a, b = s[-1], t[-1]
            if a == b:
                s.pop()
                t.pop()
                letters += self.letter_length(*a)
                weight += self._weight(*a, weights)
                continue
            if a[0] == 0 and b[0] == 0:
                break
            # expand the longer symbol (both if the lengths agree)
            la, lb = self.letter_length(*a), self.letter_length(*b)
            for stack, sym, grow in ((s, a, la >= lb), (t, b, lb >= la)):
                if grow and sym[0] > 0:
                    stack.pop()
                    stack.extend((sym[0] - 1, h) for h in order(self._children[sym[1] - 1]))
        return letters, weight

    def _positive_length(self, n: int, u: Sequence[int], weights) -> tuple[int, float]:
        return (sum(self.letter_length(n, g) for g in u),
                sum(self._weight(n, g, weights) for g in u))

    def class_length(self, n: int, w: Word, weights: Sequence[float]) -> float:
        """Weighted length of the cyclic reduction of ``aut**n (w)``."""
        c = cyclic_reduce(w)
        if not c:
            return 0
        letters = list(c.letters())
        # rotate so that sign changes are at the ends; at most 2 sign segments
        signs = [x > 0 for x in letters]
        changes = sum(signs[i] != signs[i - 1] for i in range(len(signs)))
        if changes > 2:
            return cyclic_reduce(iterate(self.aut, c, n)).weighted_length(weights)
        if changes == 0:
            return self._positive_length(n, [abs(x) for x in letters], weights)[1]
        start = next(i for i in range(len(signs)) if signs[i] and not signs[i - 1])
        letters = letters[start:] + letters[:start]
        split = next(i for i, x in enumerate(letters) if x < 0)
        u = letters[:split]
        v = [-x for x in reversed(letters[split:])]
        # class of P Q^-1 with P = aut^n(u), Q = aut^n(v), both positive
        lp, wp = self._positive_length(n, u, weights)
        lq, wq = self._positive_length(n, v, weights)
        ls, ws = self._common(n, u, v, weights, from_end=True)
        lp1, lq1 = lp - ls, lq - ls
        wp1, wq1 = wp - ws, wq - ws
        lpre, wpre = self._common(n, u, v, weights, from_end=False)
        if lpre >= min(lp1, lq1):
            wpre = wp1 if lp1 <= lq1 else wq1
        # integer weights give exact integer lengths
        return max(wp1 + wq1 - 2 * wpre, 0)


@lru_cache(maxsize=64)
def positive_powers(aut: Automorphism) -> PositivePowers:
    return PositivePowers(aut)


def class_length_of_power(aut: Automorphism, n: int, w: Word, weights: Sequence[float],
                          cap: int | None = DEFAULT_LENGTH_CAP) -> float:
    """Weighted cyclic length of ``aut**n (w)`` for ``n >= 0``."""
    if n == 0:
        return cyclic_reduce(w).weighted_length(weights)
    if aut.is_positive():
        return positive_powers(aut).class_length(n, w, weights)
    c = cyclic_reduce(w)
    for _ in range(n):
        c = cyclic_reduce(apply(aut, c, cap))
    return c.weighted_length(weights)
