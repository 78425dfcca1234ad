"""Shared special functions and generic numerical routines.

Everything in this module is a pure scalar function. The common requirement
across callers is left-tail fidelity: probabilities down to ~1e-12 must keep
relative precision, so complements are never formed by subtracting from 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from scipy import integrate as _integrate
from scipy import special as _special

__all__ = [
    "Bracket",
    "BracketError",
    "QuadratureError",
    "QuadratureSpec",
    "find_root_monotone",
    "integrate_semi_infinite",
    "q_function",
    "regularized_gamma_lower",
    "regularized_gamma_upper",
]

_SQRT2 = math.sqrt(2.0)


class BracketError(ValueError):
    """The supplied bracket does not straddle the requested target level."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to converge within the allowed subdivisions."""


def q_function(x: float) -> float:
    """Gaussian upper-tail probability Q(x) = P(N(0,1) > x).

    Evaluated as erfc(x/sqrt(2))/2, which stays accurate for large positive x
    where 1 - Phi(x) would cancel totally.
    """
    return 0.5 * math.erfc(x / _SQRT2)


def _check_gamma_args(p: float, x: float) -> None:
    if not p > 0.0:
        raise ValueError(f"shape parameter must be positive, got p={p!r}")
    if x < 0.0:
        raise ValueError(f"argument must be nonnegative, got x={x!r}")


def regularized_gamma_lower(p: float, x: float) -> float:
    """Regularized lower incomplete gamma P(p, x) = gamma(p, x) / Gamma(p).

    Evaluated directly (series / continued-fraction split around x = p + 1,
    via scipy's gammainc), never as 1 - Q(p, x), so tiny left-tail values keep
    full relative precision.
    """
    _check_gamma_args(p, x)
    return float(_special.gammainc(p, x))


def regularized_gamma_upper(p: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(p, x) = Gamma(p, x) / Gamma(p)."""
    _check_gamma_args(p, x)
    return float(_special.gammaincc(p, x))


@dataclass(frozen=True)
class Bracket:
    """Interval [lo, hi] known to contain the sought crossing."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise ValueError(f"bracket requires lo < hi, got [{self.lo}, {self.hi}]")


def find_root_monotone(
    f: Callable[[float], float],
    target: float,
    bracket: Bracket,
    tol: float = 1e-12,
) -> float:
    """Solve f(x) = target for monotone f by bisection.

    Requires f(lo) and f(hi) to straddle the target (either orientation);
    raises BracketError otherwise. Convergence is guaranteed in at most
    ceil(log2((hi - lo) / tol)) iterations; the returned point is the final
    bracket midpoint, so its distance to the true crossing is <= tol / 2.
    """
    if not tol > 0.0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    lo, hi = bracket.lo, bracket.hi
    flo = f(lo) - target
    fhi = f(hi) - target
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if math.copysign(1.0, flo) == math.copysign(1.0, fhi):
        raise BracketError(
            f"f does not straddle target {target} on [{lo}, {hi}]: "
            f"f(lo)-target={flo:.6g}, f(hi)-target={fhi:.6g}"
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # interval at floating-point resolution
            break
        fmid = f(mid) - target
        if fmid == 0.0:
            return mid
        if math.copysign(1.0, fmid) == math.copysign(1.0, flo):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and budget for adaptive quadrature."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivisions: int = 200

    def __post_init__(self) -> None:
        if not (self.rel_tol > 0.0 and self.abs_tol > 0.0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be a positive integer")


def integrate_semi_infinite(
    f: Callable[[float], float],
    spec: QuadratureSpec = QuadratureSpec(),
    split_points: Sequence[float] = (),
) -> tuple[float, float]:
    """Integrate f over [0, inf) and return (value, error_estimate).

    The half line is mapped to [0, 1) through x = t / (1 - t) and the image
    integrated by adaptive quadrature. Callers that know where the integrand
    transitions (e.g. the midpoint of a smoothed step) can pass those
    abscissae in `split_points`; they are mapped into [0, 1) and handed to
    the subdivision as forced break points so refinement lands there.

    Raises QuadratureError when the subdivision budget is exhausted before
    the requested tolerances are met.
    """

    def mapped(t: float) -> float:
        u = 1.0 - t
        if u <= 0.0:
            return 0.0
        x = t / u
        return f(x) / (u * u)

    points = sorted(x / (1.0 + x) for x in split_points if x > 0.0 and math.isfinite(x))
    result = _integrate.quad(
        mapped,
        0.0,
        1.0,
        points=points or None,
        epsabs=spec.abs_tol,
        epsrel=spec.rel_tol,
        limit=spec.max_subdivisions,
        full_output=True,
    )
    if len(result) > 3:  # (value, abserr, infodict, message[, explain])
        raise QuadratureError(str(result[3]))
    value, abserr = result[0], result[1]
    return float(value), float(abserr)
