"""Closed-form behaviour of the equal phase-shift search iteration.

Every function here is a pure function of its arguments. Angles are in
radians, failure probabilities ``eps`` are ``1 - |U_ts|**2``.

The deviation of one Phase-theta iteration is::

    D(theta, eps) = eps * d**2,   d = 1 + 2 (cos theta - 1)(1 - eps)

``d`` is evaluated as ``eps + (1 - eps) * (2 cos theta - 1)`` with the
second factor written as a product of sines, so that ``theta == pi/3``
gives ``d == eps`` exactly and deep recursions keep full relative accuracy.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

PI_3 = math.pi / 3

# tolerance for clamping arccos arguments that drift just outside [-1, 1]
ARCCOS_SLACK = 1e-12
# |D - eps**3| at or below this (scaled by max(1, eps**3)) counts as equal
EQUAL_CUBE_TOL = 1e-12
# recursion values below this are flushed to exact zero
UNDERFLOW_FLOOR = 1e-300


class DomainError(ValueError):
    """An argument lies outside the region where a formula is defined.

    ``rule`` names the violated constraint in plain mathematical terms.
    """

    def __init__(self, message: str, rule: str | None = None):
        super().__init__(message)
        self.rule = rule or message


class Classification(enum.Enum):
    """Sign of ``D(theta) - eps**3``."""

    BELOW_CUBE = "BelowCube"
    EQUAL_CUBE = "EqualCube"
    ABOVE_CUBE = "AboveCube"


def _check_theta(theta: float) -> float:
    theta = float(theta)
    if not (-ARCCOS_SLACK <= theta <= math.pi + ARCCOS_SLACK):
        raise DomainError(f"theta={theta!r} outside [0, pi]", "0 <= theta <= pi")
    return theta


def _check_eps(eps: float, *, open_left: bool = False, open_right: bool = False,
               name: str = "eps") -> float:
    eps = float(eps)
    lo_ok = eps > 0.0 if open_left else eps >= 0.0
    hi_ok = eps < 1.0 if open_right else eps <= 1.0
    if not (lo_ok and hi_ok) or math.isnan(eps):
        lo = "(" if open_left else "["
        hi = ")" if open_right else "]"
        rule = f"{name} in {lo}0, 1{hi}"
        raise DomainError(f"{name}={eps!r} violates {rule}", rule)
    return eps


def _safe_arccos(x: float, what: str) -> float:
    if x > 1.0 + ARCCOS_SLACK or x < -1.0 - ARCCOS_SLACK:
        raise DomainError(f"{what}: arccos argument {x!r} outside [-1, 1]",
                          "arccos argument in [-1, 1]")
    return math.acos(min(1.0, max(-1.0, x)))


def cube_offset(theta: float) -> float:
    """``2 cos(theta) - 1``; exactly zero at ``theta == pi/3``."""
    return -4.0 * math.sin(0.5 * (theta + PI_3)) * math.sin(0.5 * (theta - PI_3))


@dataclass(frozen=True)
class EpsilonRange:
    """Uniform range ``(beta, alpha)`` of failure probabilities, inside (0, 3/4]."""

    beta: float
    alpha: float

    def __post_init__(self):
        beta, alpha = float(self.beta), float(self.alpha)
        if math.isnan(beta) or math.isnan(alpha):
            raise DomainError("range endpoints must be numbers", "0 <= beta < alpha <= 3/4")
        if beta == alpha:
            raise DomainError(f"empty range ({beta!r}, {alpha!r}): mean undefined",
                              "beta < alpha")
        if not (0.0 <= beta < alpha <= 0.75):
            raise DomainError(f"range ({beta!r}, {alpha!r}) not inside (0, 3/4]",
                              "0 <= beta < alpha <= 3/4")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "alpha", alpha)

    @property
    def width(self) -> float:
        return self.alpha - self.beta

    def log_ratio_slope(self) -> float:
        """``ln((1 - alpha) / (1 - beta)) / (alpha - beta)``, always < -1."""
        w = self.width
        return math.log1p(-w / (1.0 - self.beta)) / w


@dataclass(frozen=True)
class RecurrenceTrace:
    theta: float
    epsilons: tuple[float, ...]
    # levels that dropped below UNDERFLOW_FLOOR from a nonzero predecessor
    # and are reported as exact 0
    flushed: tuple[int, ...] = field(default=())

    @property
    def depth(self) -> int:
        return len(self.epsilons) - 1

    @property
    def success_probabilities(self) -> tuple[float, ...]:
        return tuple(1.0 - e for e in self.epsilons)


# -- single iteration -------------------------------------------------------

def amplitude_factor(theta: float, eps: float) -> float:
    """Return ``d = 1 + 2(cos theta - 1)(1 - eps)``, so that ``D = eps * d**2``."""
    theta = _check_theta(theta)
    eps = _check_eps(eps)
    return eps + (1.0 - eps) * cube_offset(theta)


def deviation(theta: float, eps: float) -> float:
    """Failure probability after one Phase-theta iteration."""
    d = amplitude_factor(theta, eps)
    return min(1.0, eps * d * d)


def deviation_raw(theta: float, uts: complex) -> float:
    """Deviation from the unreduced form ``(1-|u|^2) |e^{i theta} + |u|^2 (e^{i theta}-1)^2|^2``."""
    theta = _check_theta(theta)
    p = abs(complex(uts)) ** 2
    if p > (1.0 + 1e-12) ** 2:
        raise DomainError(f"|U_ts|={math.sqrt(p)!r} exceeds 1", "|U_ts| <= 1")
    p = min(p, 1.0)
    phase = complex(math.cos(theta), math.sin(theta))
    return (1.0 - p) * abs(phase + p * (phase - 1.0) ** 2) ** 2


def deviation_gap(theta: float, eps: float) -> float:
    """``D(theta) - eps**3`` in factored form."""
    theta = _check_theta(theta)
    eps = _check_eps(eps)
    c = cube_offset(theta)
    return eps * (1.0 - eps) * c * (2.0 + (c - 2.0) * (1.0 - eps))


def epsilon_threshold(theta: float) -> float:
    """``1 - 2/(3 - 2 cos theta)``: above it, D < eps**3 for theta > pi/3.

    Nondecreasing on [0, pi], from -1 to 3/5. Evaluated literally: each
    rounded step is monotone, so the float result is monotone too.
    """
    return 1.0 - 2.0 / (3.0 - 2.0 * math.cos(_check_theta(theta)))


def classify(theta: float, eps: float) -> Classification:
    eps = _check_eps(eps, open_left=True, open_right=True)
    gap = deviation_gap(theta, eps)
    if abs(gap) <= EQUAL_CUBE_TOL * max(1.0, eps ** 3):
        return Classification.EQUAL_CUBE
    return Classification.BELOW_CUBE if gap < 0 else Classification.ABOVE_CUBE


def phase_bound_for_delta(delta: float) -> float:
    """Largest phase ``arccos((1-3 delta)/(2(1-delta)))`` keeping D < eps**3 for eps > delta.

    Inverse of :func:`epsilon_threshold`; defined for ``0 <= delta <= 3/5``.
    """
    delta = _check_eps(delta, open_right=True, name="delta")
    return _safe_arccos((1.0 - 3.0 * delta) / (2.0 * (1.0 - delta)),
                        f"phase bound for delta={delta!r} (needs delta <= 3/5)")


# -- zero deviation points --------------------------------------------------

def zero_deviation_point(eps: float) -> float:
    """Phase ``arccos(1 - 1/(2(1-eps)))`` at which one iteration hits the target exactly."""
    eps = float(eps)
    if not (0.0 < eps <= 0.75):
        raise DomainError(f"zero deviation point needs 0 < eps <= 3/4, got {eps!r}",
                          "0 < eps <= 3/4")
    return _safe_arccos(1.0 - 0.5 / (1.0 - eps), "zero deviation point")


def _average_zero_cos(rng: EpsilonRange) -> float:
    # mean of 1 - 1/(2(1-eps)) over the range
    return 1.0 + 0.5 * rng.log_ratio_slope()


def average_zero_point(rng: EpsilonRange) -> float:
    """Arccos of the mean of ``cos(zero_deviation_point)`` over a uniform eps range."""
    return _safe_arccos(_average_zero_cos(rng), "average zero point")


def average_zero_point_deviation(eps: float, rng: EpsilonRange) -> float:
    eps = _check_eps(eps, open_left=True, open_right=True)
    d = 1.0 + (1.0 - eps) * rng.log_ratio_slope()
    return eps * d * d


def kappa(rng: EpsilonRange) -> float:
    """Threshold above which the average zero point beats ``eps**3``; lies in (0, 1)."""
    return 1.0 - 2.0 / (1.0 - rng.log_ratio_slope())


# -- large eps regime -------------------------------------------------------

def min_deviation_large_eps(eps: float) -> float:
    """``eps (4 eps - 3)**2``, the minimum over theta of D when eps >= 3/4."""
    eps = float(eps)
    if not (0.75 <= eps <= 1.0):
        raise DomainError(f"large-eps bound needs 3/4 <= eps <= 1, got {eps!r}",
                          "3/4 <= eps <= 1")
    return eps * (4.0 * eps - 3.0) ** 2


_SQRT2 = math.sqrt(2.0)
_SQRT3 = math.sqrt(3.0)

# theta -> (a, b) with D = eps (a eps - b)**2
TABLE3_FORMS = {
    math.pi / 2: (2.0, 1.0),
    2 * math.pi / 3: (3.0, 2.0),
    3 * math.pi / 4: (_SQRT2 + 2.0, _SQRT2 + 1.0),
    5 * math.pi / 6: (_SQRT3 + 2.0, _SQRT3 + 1.0),
}


def table3_deviation(theta: float, eps: float) -> float:
    theta = _check_theta(theta)
    eps = _check_eps(eps)
    for angle, (a, b) in TABLE3_FORMS.items():
        if abs(theta - angle) <= 1e-12:
            return eps * (a * eps - b) ** 2
    raise DomainError(f"theta={theta!r} is not one of pi/2, 2pi/3, 3pi/4, 5pi/6",
                      "theta in {pi/2, 2pi/3, 3pi/4, 5pi/6}")


# -- success measures -------------------------------------------------------

def success_probability(theta: float, eps: float) -> float:
    return 1.0 - deviation(theta, eps)


def success_ratio(theta: float, eps: float) -> float:
    """Success probability relative to the pi/3 iteration, as a rational function.

    Finite at ``eps == 1``, where it equals :func:`rho`.
    """
    c = math.cos(_check_theta(theta))
    e = _check_eps(eps)
    num = (4 * c * c * e * e - 8 * c * e * e + 4 * e * e
           + 4 * c * e - 4 * c * c * e + 1)
    return num / (e * e + e + 1)


def rho(theta: float) -> float:
    """Large-eps limit of :func:`success_ratio`: ``(5 - 4 cos theta)/3``."""
    return (5.0 - 4.0 * math.cos(_check_theta(theta))) / 3.0


def recurrence_trace(theta: float, eps0: float, m: int) -> RecurrenceTrace:
    """Failure probabilities of the recursively nested iteration, levels 0..m."""
    theta = _check_theta(theta)
    eps = _check_eps(eps0, open_left=True, open_right=True, name="eps0")
    if m < 0:
        raise DomainError(f"depth m={m!r} must be >= 0", "m >= 0")
    out = [eps]
    flushed = []
    for k in range(1, int(m) + 1):
        prev, eps = eps, deviation(theta, eps)
        if eps < UNDERFLOW_FLOOR:
            if prev != 0.0:
                flushed.append(k)
            eps = 0.0
        out.append(eps)
    return RecurrenceTrace(theta, tuple(out), tuple(flushed))
