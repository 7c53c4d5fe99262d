"""Marked metric roses, candidate loops and the Lipschitz distance.

A point is a rose with petal lengths summing to 1 and a marking ``psi``
(an automorphism power).  Lengths of conjugacy classes follow the right
action convention::

    class_length(X . phi, w) == class_length(X, phi(w))

so the marking of ``X_0 . phi^i`` is ``phi^i``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .intpoly import P, poly_family
from .roots import bracket_real_root
from .traintrack import GraphMap, pf_eigen, transition_matrix
from .words import (
    DEFAULT_LENGTH_CAP,
    Automorphism,
    ParameterError,
    Word,
    apply,
    canonical,
    compose,
    class_length_of_power,
    cyclic_reduce,
    VARIANTS,
    is_inverse_pair,
)

VOLUME_TOL = 1e-12


@dataclass(frozen=True)
class Marking:
    """``forward ** power``; ``backward`` is the inverse of ``forward``."""

    forward: Automorphism
    backward: Automorphism
    power: int = 1

    @classmethod
    def identity(cls, rank: int) -> "Marking":
        e = Automorphism.identity(rank)
        return cls(e, e, 0)

    @classmethod
    def of(cls, aut: Automorphism, inverse: Automorphism, power: int = 1) -> "Marking":
        if not is_inverse_pair(aut, inverse):
            raise ValueError("marking automorphism and inverse do not compose to the identity")
        return cls(aut, inverse, power)

    def inverse(self) -> "Marking":
        return Marking(self.forward, self.backward, -self.power)

    def same_family(self, other: "Marking") -> int:
        """+1 if other has the same base automorphism, -1 if the inverse one, else 0."""
        if other.forward == self.forward:
            return 1
        if other.forward == self.backward:
            return -1
        return 0

    def step(self) -> tuple[Automorphism, int]:
        """The marking as (automorphism, nonnegative power)."""
        if self.power >= 0:
            return self.forward, self.power
        return self.backward, -self.power


@dataclass(frozen=True)
class RosePoint:
    lengths: tuple[float, ...]
    marking: Marking

    def __post_init__(self):
        if any(x <= 0 for x in self.lengths):
            raise ValueError("petal lengths must be positive")
        if abs(sum(self.lengths) - 1.0) > VOLUME_TOL:
            raise ValueError(f"lengths sum to {sum(self.lengths)!r}, expected 1")
        if len(self.lengths) != self.marking.forward.rank:
            raise ValueError("rank mismatch between lengths and marking")

    @classmethod
    def normalized(cls, lengths, marking: Marking | None = None) -> "RosePoint":
        v = np.asarray(lengths, dtype=float)
        v = v / v.sum()
        marking = marking or Marking.identity(len(v))
        return cls(tuple(float(x) for x in v), marking)

    @property
    def rank(self) -> int:
        return len(self.lengths)

    def act(self, aut: Automorphism, inverse: Automorphism, n: int = 1) -> "RosePoint":
        """``self . aut**n``.  Only powers of the marking's own automorphism compose."""
        m = self.marking
        if m.power == 0:
            return RosePoint(self.lengths, Marking(aut, inverse, n))
        s = m.same_family(Marking(aut, inverse))
        if s == 0:
            raise ValueError("cannot compose markings of unrelated automorphisms")
        return RosePoint(self.lengths, Marking(m.forward, m.backward, m.power + s * n))


def candidates(N: int) -> list[Word]:
    """Petals and figure-eights, one per conjugacy class up to inversion."""
    out, seen = [], set()
    words = [Word.generator(i, N) for i in range(1, N + 1)]
    for i, j in itertools.combinations(range(1, N + 1), 2):
        for e, d in itertools.product((1, -1), repeat=2):
            words.append(Word(N, ((i, e), (j, d))))
    for w in words:
        key = canonical(w)
        if key not in seen:
            seen.add(key)
            out.append(key)
    return out


def _steps_length(steps: list[tuple[Automorphism, int]], w: Word, lengths, cap: int) -> float:
    c = cyclic_reduce(w)
    *head, (last_aut, last_n) = steps
    for aut, n in head:
        for _ in range(n):
            c = cyclic_reduce(apply(aut, c, cap))
    return class_length_of_power(last_aut, last_n, c, lengths, cap)


def class_length(X: RosePoint, w: Word, cap: int = DEFAULT_LENGTH_CAP) -> float:
    if w.rank != X.rank:
        raise ValueError("rank mismatch")
    if not w:
        return 0.0
    return _steps_length([X.marking.step()], w, X.lengths, cap)


def _relative_steps(X: RosePoint, Y: RosePoint) -> list[tuple[Automorphism, int]]:
    """Steps of psi_Y o psi_X^-1, applied left to right to X-coordinate words."""
    mx, my = X.marking, Y.marking
    if mx.power == 0:
        return [my.step()]
    if my.power == 0:
        return [mx.inverse().step()]
    s = mx.same_family(my)
    if s:
        return [Marking(mx.forward, mx.backward, s * my.power - mx.power).step()]
    return [mx.inverse().step(), my.step()]


@dataclass
class Distance:
    value: float
    witness: Word
    ratios: list[float] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"value": self.value, "witness": str(self.witness)}


def lipschitz_distance(X: RosePoint, Y: RosePoint, cap: int = DEFAULT_LENGTH_CAP) -> Distance:
    """log of the maximal stretch ``l_Y(w) / l_X(w)`` over candidate loops of X."""
    if X.rank != Y.rank:
        raise ValueError("rank mismatch")
    steps = _relative_steps(X, Y)
    best, witness, ratios = -math.inf, None, []
    for c in candidates(X.rank):
        den = c.weighted_length(X.lengths)
        num = _steps_length(steps, c, Y.lengths, cap)
        r = num / den
        ratios.append(r)
        if r > best:
            best, witness = r, c
    return Distance(math.log(best), witness, ratios)


def max_stretch_bruteforce(X: RosePoint, Y: RosePoint, max_len: int = 6) -> tuple[float, Word]:
    """Max of ``l_Y / l_X`` over every cyclically reduced class of length <= max_len."""
    N = X.rank
    steps = _relative_steps(X, Y)
    letters = [x for i in range(1, N + 1) for x in (i, -i)]
    best, witness, seen = -math.inf, None, set()

    def extend(prefix):
        nonlocal best, witness
        if prefix and prefix[0] != -prefix[-1]:
            w = Word.from_letters(prefix, N)
            key = canonical(w)
            if key not in seen:
                seen.add(key)
                r = _steps_length(steps, key, Y.lengths, DEFAULT_LENGTH_CAP) / key.weighted_length(X.lengths)
                if r > best:
                    best, witness = r, key
        if len(prefix) == max_len:
            return
        for x in letters:
            if not prefix or x != -prefix[-1]:
                extend(prefix + [x])

    extend([])
    return best, witness


def thinness(X: RosePoint) -> float:
    """Length of the shortest candidate loop, i.e. the shortest petal."""
    return min(X.lengths)


# --- the axes of phi_k and its inverse ------------------------------------------------

@dataclass(frozen=True)
class AxisData:
    """Stretch factors and base points X_0, Y_0 for one (N, k, variant)."""

    N: int
    k: int
    variant: str
    phi: Automorphism
    phi_inv: Automorphism
    g: Automorphism
    g_inv: Automorphism
    lam: float
    lam_bar: float
    lam_interval: tuple[float, float]
    lam_bar_interval: tuple[float, float]
    X0: RosePoint
    Y0: RosePoint
    eigen_residuals: tuple[float, float]

    def X(self, i: int) -> RosePoint:
        return self.X0.act(self.phi, self.phi_inv, i)

    def Y(self, j: int) -> RosePoint:
        return self.Y0.act(self.g, self.g_inv, j)


def _g_polynomial(N: int, k: int, g: Automorphism):
    from .intpoly import char_poly

    c = char_poly(transition_matrix(GraphMap.from_automorphism(g)))
    return c if c.leading > 0 else -c


def axis_data(N: int, k: int, variant: str = "printed") -> AxisData:
    from .words import phi_family, printed_inverse

    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    phi, phi_inv = phi_family(N, k)
    if variant == "printed":
        g, g_inv = printed_inverse(N, k)
    else:
        g, g_inv = phi_inv, phi
    # certified stretch factors: p_k has its root in [k, k+1]; the g polynomial has
    # a single positive root (one sign change) and it lies in [1, k]
    br_p = bracket_real_root(poly_family(N, k, P), k, k + 1)
    br_q = bracket_real_root(_g_polynomial(N, k, g), 1, k)
    lam, lam_bar = br_p.mid, br_q.mid
    A = transition_matrix(GraphMap.from_automorphism(phi))
    B = transition_matrix(GraphMap.from_automorphism(g))
    ea, eb = pf_eigen(A, pivot=N - 1), pf_eigen(B, pivot=0)
    expected_a = np.array([lam ** (N - 1 - i) for i in range(N)])
    expected_b = np.array([lam_bar ** i for i in range(N)])
    if np.max(np.abs(ea.vector / expected_a - 1)) > 1e-9 or np.max(np.abs(eb.vector / expected_b - 1)) > 1e-9:
        raise ArithmeticError("Perron-Frobenius vectors disagree with the certified stretch factors")
    X0 = RosePoint.normalized(expected_a)
    Y0 = RosePoint.normalized(expected_b)
    return AxisData(N, k, variant, phi, phi_inv, g, g_inv, lam, lam_bar,
                    (float(br_p.lo), float(br_p.hi)), (float(br_q.lo), float(br_q.hi)),
                    X0, Y0, (ea.residual, eb.residual))


def axis_points(N: int, k: int, i_range, j_range, variant: str = "printed"):
    data = axis_data(N, k, variant)
    return [data.X(i) for i in i_range], [data.Y(j) for j in j_range]


def _formula(N: int, lam: float, lam_bar: float) -> float:
    return math.log((lam ** N - 1) / (lam - 1)
                    * (lam_bar ** N - lam_bar ** (N - 1)) / (lam_bar ** N - 1))


@dataclass
class FormulaValue:
    value: float
    lo: float
    hi: float
    lower_bound: float  # (N - 1) log k - 4

    @property
    def holds(self) -> bool:
        return self.lo >= self.lower_bound

    def to_json(self) -> dict:
        return {"value": self.value, "interval": [self.lo, self.hi],
                "lower_bound": self.lower_bound, "holds": self.holds}


def axis_distance_formula(N: int, k: int, variant: str = "printed", data: AxisData | None = None) -> FormulaValue:
    """The closed form for d(X_0, Y_0), evaluated on the certified brackets."""
    data = data or axis_data(N, k, variant)
    corners = [_formula(N, a, b) for a in data.lam_interval for b in data.lam_bar_interval]
    return FormulaValue(_formula(N, data.lam, data.lam_bar), min(corners), max(corners),
                        (N - 1) * math.log(k) - 4)


@dataclass
class SeparationReport:
    N: int
    k: int
    variant: str
    window: int
    grid: list[list[float]]
    witnesses: list[list[str]]
    argmin: tuple[int, int]
    grid_min: float
    diagonal_min: float
    min_on_diagonal: bool
    antidiagonal_constant: bool
    formula: FormulaValue
    d_X0_Y0: float
    log_lam: float
    log_lam_bar: float
    intermediate_bound: float
    intermediate_holds: bool
    final_value: float
    final_bound: float
    final_holds: bool
    sanity: dict
    advisory: str | None

    def to_json(self) -> dict:
        M = self.window
        return {
            "N": self.N, "k": self.k, "variant": self.variant, "window": M,
            "indices": list(range(-M, M + 1)),
            "grid": self.grid, "witnesses": self.witnesses,
            "argmin": list(self.argmin), "grid_min": self.grid_min,
            "diagonal_min": self.diagonal_min, "min_on_diagonal": self.min_on_diagonal,
            "antidiagonal_constant": self.antidiagonal_constant,
            "d_X0_Y0": self.d_X0_Y0, "formula": self.formula.to_json(),
            "log_lambda": self.log_lam, "log_lambda_bar": self.log_lam_bar,
            "intermediate_bound": self.intermediate_bound,
            "intermediate_holds": self.intermediate_holds,
            "final_value": self.final_value, "final_bound": self.final_bound,
            "final_holds": self.final_holds, "sanity": self.sanity, "advisory": self.advisory,
        }


def axis_separation_report(N: int, k: int, window: int = 4, variant: str = "printed") -> SeparationReport:
    """Grid of d(X_i, Y_j) for |i|, |j| <= window and the lower-bound comparison."""
    if k < 5:
        raise ParameterError(f"k={k}: the separation bound needs k >= 5")
    data = axis_data(N, k, variant)
    idx = list(range(-window, window + 1))
    grid, wit = [], []
    cache: dict[int, Distance] = {}
    for i in idx:
        row, wrow = [], []
        for j in idx:
            if variant == "exact":
                # relative marking is phi^-(i+j), so cells depend on i + j only
                d = cache.get(i + j)
                if d is None:
                    d = cache[i + j] = lipschitz_distance(data.X(i), data.Y(j))
            else:
                d = lipschitz_distance(data.X(i), data.Y(j))
            row.append(d.value)
            wrow.append(str(d.witness))
        grid.append(row)
        wit.append(wrow)
    G = np.array(grid)
    gmin = float(G.min())
    diag = float(np.diag(G).min())
    # prefer a diagonal cell among ties
    tied = [(abs(i - j), i, j) for a, i in enumerate(idx) for b, j in enumerate(idx)
            if G[a, b] <= gmin + 1e-12 * max(1.0, abs(gmin))]
    _, ai, aj = min(tied)
    anti = all(abs(G[a, b] - G[a + 1, b - 1]) <= 1e-9
               for a in range(len(idx) - 1) for b in range(1, len(idx)))
    formula = axis_distance_formula(N, k, variant, data)
    log_l, log_lb = math.log(data.lam), math.log(data.lam_bar)
    final_value = gmin - log_l - log_lb
    final_bound = (N - 2.5) * math.log(k) - 6
    edge = window in (abs(ai), abs(aj))
    return SeparationReport(
        N, k, variant, window, grid, wit, (ai, aj), gmin, diag,
        diag <= gmin + 1e-12 * max(1.0, abs(gmin)), anti, formula,
        lipschitz_distance(data.X0, data.Y0).value, log_l, log_lb,
        (N - 1) * math.log(k) - 4, gmin >= (N - 1) * math.log(k) - 4,
        final_value, final_bound, final_value >= final_bound,
        {"lambda_le_k_plus_1": data.lam <= k + 1,
         "lambda_bar_le_sqrt_k_plus_1": data.lam_bar <= math.sqrt(k + 1)},
        "grid minimum on the window boundary; widen the window" if edge else None,
    )


def random_marking(N: int, rng, moves: int = 3) -> Marking:
    """A product of random elementary Nielsen moves, with its inverse."""
    fwd = Automorphism.identity(N)
    bwd = Automorphism.identity(N)
    for _ in range(moves):
        i, j = rng.sample(range(1, N + 1), 2)
        e = rng.choice((1, -1))
        # a_i -> a_i a_j^e and its inverse a_i -> a_i a_j^-e
        imgs = list(Automorphism.identity(N).images)
        inv_imgs = list(imgs)
        imgs[i - 1] = Word(N, ((i, 1), (j, e)))
        inv_imgs[i - 1] = Word(N, ((i, 1), (j, -e)))
        move, move_inv = Automorphism(N, tuple(imgs)), Automorphism(N, tuple(inv_imgs))
        fwd, bwd = compose(fwd, move), compose(move_inv, bwd)
    return Marking.of(fwd, bwd, 1)

