"""Projective convergence of iterated lengths and of matrix powers.

Rows of a trajectory are normalized to sup-norm 1 and compared with a
reference direction; the successive error ratios estimate the spectral ratio.
Integer inputs are kept exact and normalized in mpmath so that fast
convergence is not hidden below double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import mpmath
import numpy as np

from .outer_geometry import RosePoint, candidates
from .traintrack import is_irreducible, is_primitive
from .words import (
    DEFAULT_LENGTH_CAP,
    Automorphism,
    Word,
    WordLengthError,
    apply,
    cyclic_reduce,
    positive_powers,
)

DPS = 60
MIN_ROWS = 6


@dataclass
class LengthTrajectory:
    window: list[Word]
    rows: list[list]
    n_max: int
    truncated: bool = False
    exact: bool = False

    def to_csv(self) -> str:
        lines = ["n,class,length"]
        for n, row in enumerate(self.rows):
            for w, x in zip(self.window, row):
                lines.append(f"{n},{w},{x}")
        return "\n".join(lines) + "\n"


@dataclass
class RateEstimate:
    rho: float
    dispersion: float
    stride: int
    used: list[int] = field(default_factory=list)
    errors: list[float] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"rho_hat": self.rho, "dispersion": self.dispersion, "stride": self.stride,
                "fitted_iterates": self.used}


class RateError(ValueError):
    pass


def iterate_lengths(aut: Automorphism, window: Sequence[Word] | None = None, n_max: int = 12,
                    base: RosePoint | None = None, cap: int = DEFAULT_LENGTH_CAP) -> LengthTrajectory:
    """Lengths at ``base`` of ``aut**n (w)`` for n = 0..n_max.

    Positive automorphisms go through the lazy power engine and never
    overflow.  Otherwise words are materialized; on overflow the partial
    trajectory is returned with ``truncated`` set.  The base marking is ignored
    (lengths are read off the base rose directly).  Without a base, the
    uniform rose with unit petals is used and lengths are exact integers.
    """
    N = aut.rank
    window = list(window) if window is not None else candidates(N)
    exact = base is None
    weights = [1] * N if exact else list(base.lengths)
    rows: list[list] = []
    if aut.is_positive():
        engine = positive_powers(aut)
        for n in range(n_max + 1):
            rows.append([engine.class_length(n, w, weights) if n else cyclic_reduce(w).weighted_length(weights)
                         for w in window])
        return LengthTrajectory(window, rows, n_max, False, exact)
    current = [cyclic_reduce(w) for w in window]
    truncated = False
    for n in range(n_max + 1):
        rows.append([c.weighted_length(weights) for c in current])
        if n == n_max:
            break
        try:
            current = [cyclic_reduce(apply(aut, c, cap)) for c in current]
        except WordLengthError:
            truncated = True
            break
    return LengthTrajectory(window, rows, len(rows) - 1, truncated, exact)


def _normalize(row, exact: bool):
    if exact:
        vals = [mpmath.mpf(int(x)) for x in row]
    else:
        vals = [mpmath.mpf(float(x)) for x in row]
    top = max(abs(v) for v in vals)
    if top == 0:
        raise RateError("zero row in trajectory")
    return [v / top for v in vals]


def _fit(errors: list, floor, stride: int) -> RateEstimate:
    usable = [n for n, e in enumerate(errors) if e > floor]
    # errors only shrink; stop at the first one below the floor
    cut = len(errors)
    for n, e in enumerate(errors):
        if e <= floor:
            cut = n
            break
    usable = [n for n in usable if n < cut]
    if len(usable) < MIN_ROWS:
        raise RateError(f"only {len(usable)} usable iterates (need {MIN_ROWS})")
    # last third of the usable iterates
    start = max(usable[0], usable[-1] - max(len(usable) // 3, 1))
    pairs = [(n, n + stride) for n in usable if n >= start and n + stride in usable]
    if not pairs:
        raise RateError("no iterate pairs left to fit")
    # an even count cancels period-2 wobble in the ratios
    if len(pairs) > 1 and len(pairs) % 2:
        pairs = pairs[1:]
    # upper envelope (running max from the tail) so that zero crossings of an
    # oscillating error do not dominate the end points
    env = list(errors)
    for n in range(len(env) - 1 - stride, -1, -1):
        env[n] = max(env[n], env[n + stride])
    logs = [float(mpmath.log(env[a] / env[b])) / stride for a, b in pairs]
    mean = sum(logs) / len(logs)
    disp = float(np.std(logs)) if len(logs) > 1 else 0.0
    return RateEstimate(math.exp(mean), disp, stride, [a for a, _ in pairs],
                        [float(e) for e in errors])


def _alternates(errors) -> bool:
    """Errors that zig-zag (a negative competing eigenvalue) call for stride 2."""
    r = [errors[n] / errors[n + 1] for n in range(len(errors) - 1) if errors[n + 1] > 0]
    flips = sum((a - 1) * (b - 1) < 0 for a, b in zip(r, r[1:]))
    return len(r) > 2 and flips > (len(r) - 1) / 2


def projective_rate(t: LengthTrajectory, stride: int | None = None) -> RateEstimate:
    """Spectral-ratio estimate from a trajectory, measured against its final row.

    With ``stride=None`` every second iterate is used when the errors alternate.
    """
    if len(t.rows) < MIN_ROWS + 1:
        raise RateError(f"trajectory has {len(t.rows)} rows (need {MIN_ROWS + 1})")
    with mpmath.workdps(DPS):
        rows = [_normalize(r, t.exact) for r in t.rows]
        if stride is None:
            ref = rows[-1]
            stride = 2 if _alternates([max(abs(a - b) for a, b in zip(r, ref)) for r in rows[:-1]]) else 1
        ref_index = len(rows) - 1
        if stride == 2 and ref_index % 2:
            ref_index -= 1
        ref = rows[ref_index]
        errors = [max(abs(a - b) for a, b in zip(r, ref)) for r in rows[:ref_index]]
        if all(e == 0 for e in errors):
            raise RateError("constant trajectory: no projective error to fit")
        floor = mpmath.mpf(10) * mpmath.mpf(2) ** (-mpmath.mp.prec if t.exact else -52)
        # keep clear of the reference row, whose own error contaminates the tail
        kept = errors[: max(len(errors) - 2, 0)] if len(errors) > MIN_ROWS + 2 else errors
        return _fit(kept, floor, stride)


def _pf_direction(M, dps: int):
    with mpmath.workdps(dps):
        A = mpmath.matrix([[mpmath.mpf(int(x)) for x in row] for row in M])
        vals, vecs = mpmath.eig(A)
        idx = max(range(len(vals)), key=lambda i: (mpmath.re(vals[i]), -abs(mpmath.im(vals[i]))))
        v = [mpmath.re(vecs[r, idx]) for r in range(A.rows)]
        top = max(v, key=abs)
        return [x / top for x in v]


def power_rate(M, n_iter: int | None = None, dps: int = 400, max_iter: int = 20_000) -> RateEstimate:
    """Convergence rate of ``M^n e`` to the Perron-Frobenius direction.

    The integer iteration is exact.  With period 2 every second iterate is
    fitted against the last even iterate instead of the eigenvector.
    """
    M = [[int(x) for x in row] for row in M]
    if not is_irreducible(M):
        raise ValueError("power_rate needs an irreducible nonnegative matrix")
    primitive, _ = is_primitive(M)
    stride = 1 if primitive else 2
    n = len(M)
    with mpmath.workdps(dps):
        floor = mpmath.mpf(10) ** (-(dps - 10))
        target = None if not primitive else _pf_direction(M, dps)
        v = [1] * n
        rows = []
        limit = n_iter if n_iter is not None else max_iter
        for it in range(limit + 1):
            r = _normalize(v, True)
            rows.append(r)
            if target is not None:
                e = max(abs(a - b) for a, b in zip(r, target))
                if n_iter is None and e <= floor:
                    break
            v = [sum(M[i][j] * v[j] for j in range(n)) for i in range(n)]
        if target is None:
            last = len(rows) - 1 - ((len(rows) - 1) % 2)
            target = rows[last]
            rows = rows[:last]
            errors = [max(abs(a - b) for a, b in zip(r, target)) for r in rows]
            errors = errors[: max(len(errors) - 4, 0)]
        else:
            errors = [max(abs(a - b) for a, b in zip(r, target)) for r in rows]
        if all(e <= floor for e in errors):
            raise RateError("iteration starts on the limit direction")
        return _fit(errors, floor, stride)
