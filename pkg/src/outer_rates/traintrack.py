"""Self-maps of the N-petalled rose: transition matrices, gates, turns,
local Whitehead graphs and Perron-Frobenius data.

Directions at the single vertex are signed ints: ``+i`` is the initial germ of
``a_i`` and ``-i`` the initial germ of ``a_i^-1``.  A turn is a sorted pair of
distinct directions.  Consecutive letters ``x y`` of a path take the turn
``{-x, y}``.

Transition matrices are row-per-edge: entry (i, j) counts occurrences of
``a_j^{+-1}`` in the image of ``a_i``.  With this orientation the length
vector ``v`` of an invariant metric satisfies ``M v = lambda v``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .intpoly import P, Q, certify_irreducible, char_poly, poly_family
from .words import Automorphism, Word, family_pair

MATRIX_CONVENTION = "row-per-edge: entry (i, j) counts a_j^{+-1} in the image of a_i"

Turn = tuple[int, int]


@dataclass(frozen=True)
class GraphMap:
    rank: int
    edge_images: tuple[Word, ...]

    def __post_init__(self):
        if len(self.edge_images) != self.rank:
            raise ValueError("need one image per petal")
        for w in self.edge_images:
            if not w or w.rank != self.rank:
                raise ValueError("edge images must be nonempty reduced words of matching rank")

    @classmethod
    def from_automorphism(cls, aut: Automorphism) -> "GraphMap":
        return cls(aut.rank, aut.images)

    def directions(self) -> list[int]:
        return [d for i in range(1, self.rank + 1) for d in (i, -i)]


def transition_matrix(m: GraphMap) -> list[list[int]]:
    return [w.counts() for w in m.edge_images]


def direction_map(m: GraphMap) -> dict[int, int]:
    out = {}
    for i, w in enumerate(m.edge_images, start=1):
        out[i] = w.first_letter()
        out[-i] = -w.last_letter()
    return out


def _turn(a: int, b: int) -> Turn:
    return (a, b) if a < b else (b, a)


def _seed_turns(m: GraphMap) -> set[Turn]:
    seeds = set()
    for w in m.edge_images:
        prev = None
        for gen, exp in w.runs:
            x = gen if exp > 0 else -gen
            if prev is not None:
                seeds.add(_turn(-prev, x))
            if abs(exp) > 1:
                seeds.add(_turn(-x, x))
            prev = x
    return seeds


def taken_turns(m: GraphMap) -> set[Turn]:
    """Turns crossed by some iterate of an edge: the seeds closed under Df.

    Degenerate images ``{d, d}`` are dropped (they are never turns).
    """
    D = direction_map(m)
    seen = set(_seed_turns(m))
    queue = deque(seen)
    while queue:
        a, b = queue.popleft()
        da, db = D[a], D[b]
        if da == db:
            continue
        t = _turn(da, db)
        if t not in seen:
            seen.add(t)
            queue.append(t)
    return seen


def gates(m: GraphMap) -> list[list[int]]:
    """Gate partition: directions whose Df-orbits meet within 4 N^2 steps."""
    D = direction_map(m)
    dirs = m.directions()
    horizon = 4 * m.rank * m.rank
    parent = {d: d for d in dirs}

    def find(d):
        while parent[d] != d:
            parent[d] = parent[parent[d]]
            d = parent[d]
        return d

    current = {d: d for d in dirs}
    for _ in range(horizon):
        current = {d: D[current[d]] for d in dirs}
        by_image: dict[int, int] = {}
        for d in dirs:
            img = current[d]
            if img in by_image:
                ra, rb = find(d), find(by_image[img])
                if ra != rb:
                    parent[ra] = rb
            else:
                by_image[img] = d
    classes: dict[int, list[int]] = {}
    for d in dirs:
        classes.setdefault(find(d), []).append(d)
    return sorted(sorted(c) for c in classes.values())


def gate_index(partition: list[list[int]]) -> dict[int, int]:
    return {d: i for i, g in enumerate(partition) for d in g}


def is_illegal(turn: Turn, partition: list[list[int]]) -> bool:
    idx = gate_index(partition)
    return idx[turn[0]] == idx[turn[1]]


def is_train_track(m: GraphMap) -> tuple[bool, Turn | None]:
    idx = gate_index(gates(m))
    for t in sorted(taken_turns(m)):
        if idx[t[0]] == idx[t[1]]:
            return False, t
    return True, None


@dataclass
class WhiteheadGraph:
    vertices: list[int]
    edges: list[Turn]
    connected: bool

    def to_json(self) -> dict:
        return {"vertices": [direction_name(d) for d in self.vertices],
                "edges": [[direction_name(a), direction_name(b)] for a, b in self.edges],
                "connected": self.connected}


def local_whitehead_graph(m: GraphMap) -> WhiteheadGraph:
    vertices = m.directions()
    edges = sorted(taken_turns(m))
    adj: dict[int, set[int]] = {v: set() for v in vertices}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    seen = {vertices[0]}
    queue = deque(seen)
    while queue:
        v = queue.popleft()
        for u in adj[v] - seen:
            seen.add(u)
            queue.append(u)
    return WhiteheadGraph(vertices, edges, len(seen) == len(vertices))


def direction_name(d: int) -> str:
    return f"a{d}" if d > 0 else f"A{-d}"


# --- nonnegative matrices ---------------------------------------------------------

def is_primitive(M) -> tuple[bool, int | None]:
    """Whether some power M^m (m <= (n-1)^2 + 1) is entrywise positive; returns m."""
    B = np.asarray(M) > 0
    n = B.shape[0]
    bound = (n - 1) ** 2 + 1
    power = B.copy()
    for m in range(1, bound + 1):
        if power.all():
            return True, m
        power = (power.astype(np.int64) @ B.astype(np.int64)) > 0
    return False, None


def is_irreducible(M) -> bool:
    """Strong connectivity of the support graph."""
    B = np.asarray(M) > 0
    n = B.shape[0]
    reach = np.eye(n, dtype=bool) | B
    for _ in range(n):
        reach = reach | ((reach.astype(np.int64) @ reach.astype(np.int64)) > 0)
    return bool(reach.all())


@dataclass
class PFEigen:
    value: float
    vector: np.ndarray
    residual: float
    iterations: int


class ConvergenceError(RuntimeError):
    pass


def pf_eigen(M, tol: float = 1e-14, max_iter: int = 100_000, pivot: int | None = None) -> PFEigen:
    """Perron-Frobenius eigenpair by power iteration.

    The iteration runs on ``M + I``: it is primitive whenever M is irreducible,
    has the same eigenvector, and damps negative or complex competitors of the
    top eigenvalue.  The vector is scaled to sum 1, or so that entry ``pivot``
    is 1.  ``residual`` is max_i |(Mv - lam v)_i| / v_i.
    """
    A = np.asarray(M, dtype=float)
    if not is_irreducible(A):
        raise ValueError("Perron-Frobenius data needs an irreducible nonnegative matrix")
    it_mat = A + np.eye(A.shape[0])
    v = np.ones(A.shape[0]) / A.shape[0]
    lam_prev = np.inf
    for it in range(1, max_iter + 1):
        w = it_mat @ v
        v = w / w.sum()
        Av = A @ v
        lam = float(Av.sum())  # v sums to 1
        if abs(lam - lam_prev) < tol * max(lam, 1.0):
            # entrywise relative residual, so tiny entries are resolved too
            residual = float(np.max(np.abs(Av - lam * v) / v))
            if residual <= 10 * tol * lam:
                break
        lam_prev = lam
    else:
        raise ConvergenceError(f"power iteration did not converge in {max_iter} steps")
    if pivot is not None:
        v = v / v[pivot]
    return PFEigen(lam, v, residual, it)


# --- reports for the phi_k family ------------------------------------------------------

def family_maps(N: int, k: int, variant: str = "printed") -> tuple[GraphMap, GraphMap]:
    """Rose maps f (for phi_k) and g (printed map or exact inverse)."""
    phi, inv = family_pair(N, k, variant)
    return GraphMap.from_automorphism(phi), GraphMap.from_automorphism(inv)


@dataclass
class FullIrreducibilityReport:
    N: int
    k: int
    variant: str
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v is True for key, v in self.checks.items()
                   if key in ("primitive_A", "primitive_B", "whitehead_f_connected",
                              "whitehead_g_connected", "stretch_factors_differ",
                              "train_track_f", "train_track_g"))

    def to_json(self) -> dict:
        return {"N": self.N, "k": self.k, "variant": self.variant, "matrix_convention": MATRIX_CONVENTION,
                **self.checks, "passed": self.passed}


def full_irreducibility_report(N: int, k: int, variant: str = "printed") -> FullIrreducibilityReport:
    """The computable hypotheses of the full irreducibility criterion for phi_k and phi_k^-1.

    The periodic Nielsen path hypothesis is reported as UNVERIFIED.
    """
    from .roots import bracket_real_root, sqrt_lower, sqrt_upper

    if N < 3 or k < 3:
        raise ValueError("the report needs N >= 3 and k >= 3")
    f, g = family_maps(N, k, variant)
    A, B = transition_matrix(f), transition_matrix(g)
    prim_a, m_a = is_primitive(A)
    prim_b, m_b = is_primitive(B)
    p_br = bracket_real_root(poly_family(N, k, P), k, k + 1)
    cq_poly = char_poly(B)
    if variant == "printed":
        q_br = bracket_real_root(poly_family(N, k, Q), sqrt_lower(k - 1), sqrt_upper(k + 1))
        cq = certify_irreducible(N, k, Q).to_json()
    else:
        # x^N - k x - 1: one sign change, so a single positive root, and it lies in [1, k]
        q_br = bracket_real_root(cq_poly if cq_poly.leading > 0 else -cq_poly, 1, k)
        cq = None
    checks = {
        "A": A,
        "B": B,
        "char_poly_A": str(char_poly(A)),
        "char_poly_B": str(cq_poly),
        "irreducibility_p": certify_irreducible(N, k, P).to_json(),
        "irreducibility_q": cq,
        "train_track_f": is_train_track(f)[0],
        "train_track_g": is_train_track(g)[0],
        "primitive_A": prim_a,
        "primitive_A_power": m_a,
        "primitive_B": prim_b,
        "primitive_B_power": m_b,
        "irreducible_B": is_irreducible(B),
        "whitehead_f_connected": local_whitehead_graph(f).connected,
        "whitehead_g_connected": local_whitehead_graph(g).connected,
        "lambda_bracket": [float(p_br.lo), float(p_br.hi)],
        "lambda_bar_bracket": [float(q_br.lo), float(q_br.hi)],
        "stretch_factors_differ": q_br.hi < p_br.lo,
        "nielsen_paths": "UNVERIFIED",
    }
    return FullIrreducibilityReport(N, k, variant, checks)
