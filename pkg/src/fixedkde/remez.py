"""Remez exchange generator for minimax polynomial approximations.

Only the exponential is registered as a target; the polynomial it yields on
``[-ln2/2, ln2/2]`` feeds the pipelined exponential in ``elementary``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import mpmath
import numpy as np

from .errors import ConvergenceError
from .fixedq import FixedQ, encode

MAX_ITERATIONS = 100
WORK_DPS = 50
CERTIFY_POINTS = 100_001

TARGETS = {
    "exp": (mpmath.exp, np.exp),
}


@dataclass(frozen=True)
class PolyApprox:
    """Minimax polynomial ``sum(c[k] * t**k)`` with its certified error."""

    target: str
    degree: int
    coefficients: tuple  # mpmath.mpf, lowest order first
    domain: tuple[float, float]
    certified_max_abs_error: float
    reference: tuple = field(default=(), repr=False)
    reference_errors: tuple = field(default=(), repr=False)
    iterations: int = 0

    def __post_init__(self):
        if self.degree != len(self.coefficients) - 1:
            raise ValueError("degree must equal len(coefficients) - 1")

    @property
    def fixed(self) -> tuple[FixedQ, ...]:
        """Coefficients rounded to Q32.32."""
        return tuple(encode(float(c)) for c in self.coefficients)

    @property
    def q62(self) -> tuple[int, ...]:
        """Coefficients rounded to the nearest raw Q2.62 integers."""
        with mpmath.workdps(WORK_DPS):
            return tuple(int(mpmath.nint(c * mpmath.mpf(2) ** 62)) for c in self.coefficients)

    def __call__(self, t):
        t = np.asarray(t, dtype=np.longdouble)
        acc = np.zeros_like(t)
        for c in reversed(self.coefficients):
            acc = acc * t + np.longdouble(mpmath.nstr(c, 30))
        return acc

    def equioscillation_points(self, rel_tol: float = 0.01) -> int:
        """Number of alternating-sign reference points reaching the certified error."""
        count, last = 0, 0
        for e in self.reference_errors:
            s = 1 if e > 0 else -1
            if abs(e) >= (1 - rel_tol) * self.certified_max_abs_error and s != last:
                count += 1
                last = s
        return count

    def to_json(self) -> dict:
        return {
            "target": self.target,
            "degree": self.degree,
            "domain": list(self.domain),
            "coefficients": [mpmath.nstr(c, 30) for c in self.coefficients],
            "coefficients_q62": list(self.q62),
            "certified_max_abs_error": self.certified_max_abs_error,
            "iterations": self.iterations,
        }


def _horner(coeffs, x):
    acc = mpmath.mpf(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _solve_reference(f, xs, degree):
    """Coefficients and levelled error E for p(x_i) + (-1)^i E = f(x_i)."""
    rows = []
    for i, x in enumerate(xs):
        rows.append([x**k for k in range(degree + 1)] + [(-1) ** i])
    sol = mpmath.lu_solve(mpmath.matrix(rows), mpmath.matrix([f(x) for x in xs]))
    return [sol[k] for k in range(degree + 1)], sol[degree + 1]


def _refine_extremum(err, a, b, iters=80):
    """Golden-section search for the extremum of |err| in [a, b]."""
    invphi = (mpmath.sqrt(5) - 1) / 2
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = abs(err(c)), abs(err(d))
    for _ in range(iters):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = abs(err(c))
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = abs(err(d))
    return c if fc > fd else d


def _alternating_extrema(err, lo, hi, count, grid):
    xs = [lo + (hi - lo) * mpmath.mpf(k) / grid for k in range(grid + 1)]
    es = [err(x) for x in xs]
    cand = [0]
    for k in range(1, grid):
        if abs(es[k]) >= abs(es[k - 1]) and abs(es[k]) >= abs(es[k + 1]):
            cand.append(k)
    cand.append(grid)

    points = []
    for k in cand:
        if 0 < k < grid:
            x = _refine_extremum(err, xs[k - 1], xs[k + 1])
        else:
            x = xs[k]
        points.append((x, err(x)))

    # keep the largest |e| inside each run of equal sign
    runs = []
    for x, e in points:
        if runs and (runs[-1][1] > 0) == (e > 0):
            if abs(e) > abs(runs[-1][1]):
                runs[-1] = (x, e)
        else:
            runs.append((x, e))
    while len(runs) > count:
        if abs(runs[0][1]) < abs(runs[-1][1]):
            runs.pop(0)
        else:
            runs.pop()
    return runs


def remez_minimax(
    target: str,
    domain: tuple[float, float],
    degree: int,
    *,
    tol: float = 0.01,
    max_iterations: int = MAX_ITERATIONS,
) -> PolyApprox:
    """Minimax polynomial of ``degree`` for ``target`` on ``domain``.

    Starts from Chebyshev extrema, alternates between solving for the
    levelled error on the reference set and moving the reference to the
    extrema of the error curve, and stops once the extremal errors agree to
    within ``tol`` relative spread.  The returned error is certified by
    sampling ``CERTIFY_POINTS`` points in extended precision.
    """
    if target not in TARGETS:
        raise ValueError(f"unknown target {target!r}; known: {sorted(TARGETS)}")
    if degree < 0:
        raise ValueError("degree must be non-negative")
    f_mp, f_np = TARGETS[target]
    lo_f, hi_f = float(domain[0]), float(domain[1])
    if hi_f < lo_f:
        raise ValueError("empty domain")

    with mpmath.workdps(WORK_DPS):
        lo, hi = mpmath.mpf(domain[0]), mpmath.mpf(domain[1])
        if lo == hi:
            coeffs = (f_mp(lo),) + (mpmath.mpf(0),) * degree
            return PolyApprox(target, degree, coeffs, (lo_f, hi_f), 0.0, (lo,), (mpmath.mpf(0),))

        npts = degree + 2
        mid, half = (lo + hi) / 2, (hi - lo) / 2
        xs = sorted(mid - half * mpmath.cos(mpmath.pi * j / (npts - 1)) for j in range(npts))
        grid = max(256, 64 * npts)

        for it in range(1, max_iterations + 1):
            coeffs, _ = _solve_reference(f_mp, xs, degree)

            def err(x, coeffs=coeffs):
                return _horner(coeffs, x) - f_mp(x)

            runs = _alternating_extrema(err, lo, hi, npts, grid)
            if len(runs) < npts:
                raise ConvergenceError(f"only {len(runs)} alternating extrema at iteration {it}")
            mags = [abs(e) for _, e in runs]
            spread = (max(mags) - min(mags)) / max(mags)
            xs = [x for x, _ in runs]
            if spread <= tol:
                break
        else:
            raise ConvergenceError(f"no equioscillation after {max_iterations} iterations")

        approx = PolyApprox(
            target=target,
            degree=degree,
            coefficients=tuple(coeffs),
            domain=(lo_f, hi_f),
            certified_max_abs_error=0.0,
            reference=tuple(xs),
            reference_errors=tuple(e for _, e in runs),
            iterations=it,
        )
        t = np.linspace(np.longdouble(lo_f), np.longdouble(hi_f), CERTIFY_POINTS)
        t = np.concatenate([t, np.array([np.longdouble(mpmath.nstr(x, 30)) for x in xs])])
        certified = float(np.max(np.abs(approx(t) - f_np(t))))
        # the levelled error on the reference set is a lower bound as well
        certified = max(certified, float(max(mags)))
    return PolyApprox(
        target=target,
        degree=degree,
        coefficients=approx.coefficients,
        domain=approx.domain,
        certified_max_abs_error=certified,
        reference=approx.reference,
        reference_errors=approx.reference_errors,
        iterations=it,
    )
