"""Root location for integer polynomials.

Real roots are bracketed with exact rational sign evaluation.  Complex roots
come from floating-point Aberth iteration and are certified a posteriori
with Weierstrass inclusion disks evaluated in extended precision.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .intpoly import P, Q, IntPolynomial, poly_family

EPS_WIDTH = Fraction(1, 10**16)  # below double spacing for roots of modulus >= 1
_ROTATION = 0.5 * (math.sqrt(5.0) - 1.0)  # fixed irrational angular offset


class RootFindingError(RuntimeError):
    def __init__(self, message, best=None, residual=None):
        super().__init__(message)
        self.best = best
        self.residual = residual


class RootOnCircleError(RuntimeError):
    """The polynomial comes too close to zero on the unit circle to count roots."""


@dataclass(frozen=True)
class Bracket:
    lo: Fraction
    hi: Fraction
    sign_lo: int
    sign_hi: int
    steps: int = 0

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return float((self.lo + self.hi) / 2)

    def to_json(self) -> dict:
        return {"lo": str(self.lo), "hi": str(self.hi), "lo_float": float(self.lo),
                "hi_float": float(self.hi), "sign_lo": self.sign_lo, "sign_hi": self.sign_hi}


@dataclass
class RootReport:
    polynomial: IntPolynomial
    roots: list[complex]
    residuals: list[float]
    radii: list[float]
    count_in_unit_disk: int
    real_brackets: list[Bracket]
    largest_modulus: float
    second_modulus: float

    def to_json(self) -> dict:
        return {
            "polynomial": str(self.polynomial),
            "roots": [{"re": z.real, "im": z.imag, "modulus": abs(z), "residual": r,
                       "inclusion_radius": rad}
                      for z, r, rad in zip(self.roots, self.residuals, self.radii)],
            "count_in_unit_disk": self.count_in_unit_disk,
            "real_brackets": [b.to_json() for b in self.real_brackets],
            "largest_modulus": self.largest_modulus,
            "second_modulus": self.second_modulus,
        }


@dataclass
class SpectralReport:
    """Largest and second-largest root moduli and their ratio, with interval bounds."""

    lam: float
    second: float
    ratio: float
    error_bound: float
    lam_interval: tuple[float, float]
    second_interval: tuple[float, float]
    resolved: bool
    exact_tie: bool = False
    lam_bracket: Bracket | None = None

    @property
    def ratio_interval(self) -> tuple[float, float]:
        lo1, hi1 = self.lam_interval
        lo2, hi2 = self.second_interval
        if self.exact_tie:
            return 1.0, 1.0
        return float(lo1 / hi2), float(hi1 / lo2) if lo2 > 0 else math.inf

    @property
    def flag(self) -> str:
        return "RESOLVED" if self.resolved else "UNRESOLVED"

    def to_json(self) -> dict:
        out = {"lambda": self.lam, "second": self.second, "ratio": self.ratio,
               "error_bound": self.error_bound, "ratio_interval": list(self.ratio_interval),
               "flag": self.flag, "exact_tie": self.exact_tie}
        if self.lam_bracket is not None:
            out["lambda_bracket"] = self.lam_bracket.to_json()
        return out


# --- numerical roots ----------------------------------------------------------

def _coefficient_scale(c: np.ndarray, z: np.ndarray) -> np.ndarray:
    az = np.abs(z)
    return np.abs(np.polyval(np.abs(c), az))


def find_roots(f: IntPolynomial, tol: float = 1e-12, max_iter: int = 2000) -> np.ndarray:
    """All complex roots of f by Aberth-Ehrlich simultaneous iteration.

    Starts on a circle of radius ``1 + max|c_i / c_n|`` with a fixed irrational
    angular offset, so the result is deterministic.
    """
    n = f.degree
    if n < 1:
        raise ValueError("need degree >= 1")
    if f.coeffs[0] == 0:
        raise ValueError("need a nonzero constant term")
    c = np.array(f.descending(), dtype=float)
    if n == 1:
        return np.array([complex(-c[1] / c[0])])
    dc = np.polyder(c)
    radius = 1.0 + float(np.max(np.abs(c[1:] / c[0])))
    angles = 2.0 * np.pi * (np.arange(n) + _ROTATION) / n
    z = radius * np.exp(1j * angles) * (1.0 + 0.01 * np.arange(n) / n)
    residual = np.inf
    for _ in range(max_iter):
        fz = np.polyval(c, z)
        dfz = np.polyval(dc, z)
        scale = _coefficient_scale(c, z)
        residual = float(np.max(np.abs(fz) / scale))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = fz / dfz
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            corr = ratio / (1.0 - ratio * inv.sum(axis=1))
        corr = np.where(np.isfinite(corr), corr, 0.0)
        z = z - corr
        if np.max(np.abs(corr) / np.maximum(np.abs(z), 1e-300)) < 1e-15 or residual < 1e-3 * tol:
            break
    fz = np.polyval(c, z)
    residual = float(np.max(np.abs(fz) / _coefficient_scale(c, z)))
    if not residual <= tol:
        raise RootFindingError(f"Aberth iteration did not converge (residual {residual:.3g})",
                               best=z, residual=residual)
    return z


def inclusion_radii(f: IntPolynomial, z: np.ndarray, dps: int = 50) -> list[float]:
    """Radii ``n |f(z_i)| / |c_n prod_{j != i} (z_i - z_j)|``.

    The union of these disks around the ``z_i`` contains every root; a component
    made of m disks contains exactly m roots.
    """
    n = len(z)
    with mpmath.workdps(dps):
        zs = [mpmath.mpc(complex(v)) for v in z]
        coeffs = [mpmath.mpf(c) for c in f.descending()]
        lc = coeffs[0]
        out = []
        for i, zi in enumerate(zs):
            val = mpmath.polyval(coeffs, zi)
            den = lc
            for j, zj in enumerate(zs):
                if j != i:
                    den *= zi - zj
            r = n * abs(val) / abs(den) if den != 0 else mpmath.inf
            # absorb rounding of the float starting points
            out.append(float(r) + 4.0 * float(np.finfo(float).eps) * abs(complex(z[i])))
    return out


def residuals(f: IntPolynomial, z: np.ndarray) -> list[float]:
    c = np.array(f.descending(), dtype=float)
    return [float(v) for v in np.abs(np.polyval(c, z)) / _coefficient_scale(c, z)]


# --- winding number -------------------------------------------------------------

def count_in_unit_disk(f: IntPolynomial, cross_check: bool = True) -> int:
    """Number of roots with |z| < 1 from the winding number of f around |z| = 1.

    Arcs are subdivided until ``L * dtheta < |f|`` at the arc start, with
    ``L = sum j |c_j|`` bounding |f'| on the circle; then f cannot wind around
    0 unseen inside an arc.
    """
    c = np.array(f.descending(), dtype=float)
    L = float(sum(j * abs(a) for j, a in enumerate(f.coeffs)))
    floor = 1e-6 * f.max_abs_coeff()

    def val(t: float) -> complex:
        v = complex(np.polyval(c, cmath.exp(1j * t)))
        if abs(v) < floor:
            raise RootOnCircleError(
                f"|f| = {abs(v):.3g} on the unit circle (angle {t:.6f}); treat this root exactly")
        return v

    total = 0.0
    m = 64
    knots = [2 * math.pi * i / m for i in range(m + 1)]
    vals = [val(t) for t in knots[:-1]]
    vals.append(vals[0])
    stack = [(knots[i], knots[i + 1], vals[i], vals[i + 1], 0) for i in range(m)]
    while stack:
        a, b, fa, fb, depth = stack.pop()
        if L * (b - a) < 0.5 * abs(fa) or depth > 40:
            if depth > 40:
                raise RootOnCircleError("winding number subdivision did not settle")
            total += cmath.phase(fb / fa)
            continue
        mid = 0.5 * (a + b)
        fm = val(mid)
        stack.append((a, mid, fa, fm, depth + 1))
        stack.append((mid, b, fm, fb, depth + 1))
    count = int(round(total / (2 * math.pi)))
    if abs(total / (2 * math.pi) - count) > 1e-6:
        raise RootOnCircleError(f"winding number {total / (2 * math.pi)} is not an integer")
    if cross_check and f.degree >= 1 and f.coeffs[0] != 0:
        z = find_roots(f)
        radii = inclusion_radii(f, z)
        inside = sum(1 for zi, r in zip(z, radii) if abs(zi) + r < 1)
        outside = sum(1 for zi, r in zip(z, radii) if abs(zi) - r > 1)
        if inside + outside == f.degree and inside != count:
            raise RootFindingError(f"winding count {count} disagrees with root moduli ({inside})")
    return count


# --- exact real brackets ---------------------------------------------------------

def _sign(v) -> int:
    return (v > 0) - (v < 0)


def bracket_real_root(f: IntPolynomial, lo, hi, width: Fraction = EPS_WIDTH) -> Bracket:
    """Bisect [lo, hi] with exact rational signs down to ``width``."""
    lo, hi = Fraction(lo), Fraction(hi)
    if lo > hi:
        lo, hi = hi, lo
    slo, shi = _sign(f(lo)), _sign(f(hi))
    if slo == 0:
        return Bracket(lo, lo, 0, 0)
    if shi == 0:
        return Bracket(hi, hi, 0, 0)
    if slo * shi > 0:
        raise ValueError(f"no sign change of f on [{lo}, {hi}]")
    steps = 0
    while hi - lo > width:
        mid = (lo + hi) / 2
        sm = _sign(f(mid))
        steps += 1
        if sm == 0:
            return Bracket(mid, mid, 0, 0, steps)
        if sm == slo:
            lo = mid
        else:
            hi = mid
    return Bracket(lo, hi, slo, shi, steps)


def sqrt_lower(s: int, den: int = 10**6) -> Fraction:
    """Rational a <= sqrt(s)."""
    return Fraction(math.isqrt(s * den * den), den)


def sqrt_upper(s: int, den: int = 10**6) -> Fraction:
    """Rational b >= sqrt(s)."""
    r = math.isqrt(s * den * den)
    return Fraction(r if r * r == s * den * den else r + 1, den)


def _nearby_bracket(f: IntPolynomial, x: float, rad: float) -> Bracket | None:
    delta = max(2.0 * rad, 1e-9 * max(abs(x), 1.0))
    for _ in range(8):
        lo, hi = Fraction(x - delta), Fraction(x + delta)
        if _sign(f(lo)) * _sign(f(hi)) < 0:
            return bracket_real_root(f, lo, hi)
        delta *= 4.0
    return None


# --- reports -------------------------------------------------------------------------

def root_report(f: IntPolynomial, tol: float = 1e-12) -> RootReport:
    z = find_roots(f, tol)
    radii = inclusion_radii(f, z)
    res = residuals(f, z)
    order = np.argsort(-np.abs(z), kind="stable")
    z = z[order]
    radii = [radii[i] for i in order]
    res = [res[i] for i in order]
    brackets = []
    for zi, r in zip(z, radii):
        if abs(zi.imag) <= r:
            b = _nearby_bracket(f, zi.real, r)
            if b is not None:
                brackets.append(b)
    mods = np.abs(z)
    return RootReport(f, [complex(v) for v in z], res, radii, count_in_unit_disk(f),
                      brackets, float(mods[0]), float(mods[1]) if len(mods) > 1 else 0.0)


@dataclass
class LemmaClaim:
    name: str
    passed: bool
    witness: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "witness": self.witness}


def verify_root_lemma(N: int, k: int, which: str | None = None) -> list[LemmaClaim]:
    """Check the root-location claims for p_k and q_k.

    p_k: N-1 roots in the open unit disk, one root in [k, k+1].
    q_k: N-2 roots in the disk, one in [sqrt(k-1), sqrt(k+1)] and one in
    [-sqrt(k+1), -sqrt(k-1)].  Irrational endpoints are signed exactly.
    """
    if N < 3 or k < 3:
        raise ValueError("root lemma needs N >= 3 and k >= 3")
    claims = []
    if which in (None, P):
        p = poly_family(N, k, P)
        inside = count_in_unit_disk(p)
        claims.append(LemmaClaim("p_roots_in_unit_disk", inside == N - 1,
                                 {"count": inside, "expected": N - 1}))
        slo, shi = _sign(p(k)), _sign(p(k + 1))
        ok = slo * shi < 0
        w = {"sign_at_k": slo, "sign_at_k_plus_1": shi}
        if ok:
            w["bracket"] = bracket_real_root(p, k, k + 1).to_json()
        claims.append(LemmaClaim("p_real_root_in_[k,k+1]", ok, w))
    if which in (None, Q):
        q = poly_family(N, k, Q)
        inside = count_in_unit_disk(q)
        claims.append(LemmaClaim("q_roots_in_unit_disk", inside == N - 2,
                                 {"count": inside, "expected": N - 2}))
        for negative, name in ((False, "q_root_in_[sqrt(k-1),sqrt(k+1)]"),
                               (True, "q_root_in_[-sqrt(k+1),-sqrt(k-1)]")):
            s_in = q.sign_at_sqrt(k - 1, negative)
            s_out = q.sign_at_sqrt(k + 1, negative)
            ok = s_in * s_out < 0
            w = {"sign_at_sqrt(k-1)": s_in, "sign_at_sqrt(k+1)": s_out}
            if ok:
                lo, hi = sqrt_lower(k - 1), sqrt_upper(k + 1)
                if negative:
                    lo, hi = -hi, -lo
                w["outer_rational_bracket"] = [str(lo), str(hi)]
                w["bracket"] = bracket_real_root(q, lo, hi).to_json()
            claims.append(LemmaClaim(name, ok, w))
    return claims


def spectral_ratio(f: IntPolynomial, tol: float = 1e-12) -> SpectralReport:
    """|lambda_1 / lambda_2| for the two largest root moduli of f.

    The caller is responsible for f being the minimal polynomial of interest.
    """
    if f.degree < 2:
        raise ValueError("spectral ratio needs degree >= 2")
    z = find_roots(f, tol)
    radii = inclusion_radii(f, z)
    order = np.argsort(-np.abs(z), kind="stable")
    z = z[order]
    radii = [radii[i] for i in order]

    def modulus_interval(i):
        zi, r = z[i], radii[i]
        if abs(zi.imag) <= r:
            b = _nearby_bracket(f, zi.real, r)
            if b is not None:
                lo, hi = sorted((abs(float(b.lo)), abs(float(b.hi))))
                if b.lo < 0 < b.hi:
                    lo = 0.0
                return (math.nextafter(lo, -math.inf), math.nextafter(hi, math.inf)), b
        m = abs(zi)
        return (max(m - r, 0.0), m + r), None

    (lam_iv, lam_b) = modulus_interval(0)
    (sec_iv, _) = modulus_interval(1)
    lam = 0.5 * (lam_iv[0] + lam_iv[1])
    sec = 0.5 * (sec_iv[0] + sec_iv[1])
    symmetric = f.reflect() == f or f.reflect() == -f
    if symmetric and lam_b is not None:
        # f(-x) = +-f(x): -lambda is a root too, the top two moduli coincide
        return SpectralReport(lam, lam, 1.0, 0.0, lam_iv, lam_iv, False, True, lam_b)
    ratio = float(lam / sec)
    lo_r, hi_r = lam_iv[0] / sec_iv[1], lam_iv[1] / sec_iv[0] if sec_iv[0] > 0 else math.inf
    err = max(ratio - lo_r, hi_r - ratio)
    resolved = lam_iv[0] > sec_iv[1]
    return SpectralReport(lam, sec, ratio, err, lam_iv, sec_iv, resolved, False, lam_b)


def family_spectral_ratio(N: int, k: int, which: str) -> SpectralReport:
    return spectral_ratio(poly_family(N, k, which))
