"""Rational approximation, continued fractions, and major/minor arc decompositions."""

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor, gcd
from typing import Optional

from .errors import InputError
from .numtheory import euler_phi


@dataclass(frozen=True)
class RationalPoint:
    """A reduced fraction a/q used as an arc center or convergent.

    Arc centers are canonical (0 <= a < q, or 0/1); convergent lists may
    additionally contain 1/1 when the target lies in (1/2, 1).
    """

    a: int
    q: int

    def __post_init__(self):
        if self.q < 1:
            raise InputError("denominator must be >= 1")
        if gcd(self.a, self.q) != 1:
            raise InputError("fraction must be reduced")
        if not 0 <= self.a <= self.q:
            raise InputError("numerator must satisfy 0 <= a <= q")

    @property
    def value(self) -> float:
        return self.a / self.q

    def __str__(self) -> str:
        return f"{self.a}/{self.q}"


@dataclass(frozen=True)
class ArcSystem:
    """Parameters (X, Q) of the arc family |q*theta - a| <= Q/X, q <= Q.

    When 2Q < X the arcs are pairwise disjoint.
    """

    X: float
    Q: float

    def __post_init__(self):
        if not 1 <= self.Q <= self.X:
            raise InputError("arc system needs 1 <= Q <= X")

    @property
    def halfwidth(self) -> float:
        return self.Q / self.X


def torus_distance(x: float) -> float:
    """Distance from x to the nearest integer."""
    return abs(x - round(x))


def _cf_terms(x: Fraction) -> list[int]:
    """Continued-fraction expansion of an exact rational (finite)."""
    terms = []
    num, den = x.numerator, x.denominator
    while den:
        a = num // den
        terms.append(a)
        num, den = den, num - a * den
    return terms


def convergents(xi: float, count: int) -> list[RationalPoint]:
    """First ``count`` continued-fraction convergents of xi reduced to [0, 1).

    A rational xi (every float is one) has a finite expansion, so the list
    may be shorter than requested.  Each returned b/r obeys |r*xi - b| < 1/r.
    """
    if not 1 <= count <= 64:
        raise InputError("convergent count must be between 1 and 64")
    x = Fraction(xi)
    x -= x.numerator // x.denominator
    terms = _cf_terms(x)
    out = [RationalPoint(terms[0], 1)]
    p_prev, q_prev, p, q = 1, 0, terms[0], 1
    for a in terms[1:count]:
        p_prev, q_prev, p, q = p, q, a * p + p_prev, a * q + q_prev
        out.append(RationalPoint(p, q))
    return out


def dirichlet_approx(theta: float, Qbound: float) -> RationalPoint:
    """Reduced a/q with q <= Qbound and q * ||theta - a/q|| <= 1/Qbound.

    The last continued-fraction convergent with denominator <= Qbound
    realizes the pigeonhole guarantee.  theta is reduced to [0, 1) first
    and the result is canonical, so the approximation error is measured
    on the torus.
    """
    if Qbound < 1:
        raise InputError("dirichlet_approx needs Qbound >= 1")
    x = Fraction(theta)
    x -= x.numerator // x.denominator
    terms = _cf_terms(x)
    p_prev, q_prev, p, q = 1, 0, terms[0], 1
    for a in terms[1:]:
        p_next, q_next = a * p + p_prev, a * q + q_prev
        if q_next > Qbound:
            break
        p_prev, q_prev, p, q = p, q, p_next, q_next
    return RationalPoint(p % q, q)


def major_arc_membership(theta: float, system: ArcSystem) -> Optional[RationalPoint]:
    """The center a/q of the arc containing theta, or None on the minor arcs.

    Overlaps (possible when 2Q >= X) resolve to the smallest q, then the
    smallest a.  theta is reduced to [0, 1) and distances are measured on
    the torus, so the central arc wraps around 0.
    """
    theta = theta % 1.0
    w = system.halfwidth
    for q in range(1, floor(system.Q) + 1):
        t = q * theta
        for a in range(ceil(t - w), floor(t + w) + 1):
            a_mod = a % q
            if gcd(a_mod, q) == 1:  # gcd(0, 1) = 1 covers the central 0/1 arc
                return RationalPoint(a_mod, q)
    return None


def major_arcs_measure(system: ArcSystem) -> float:
    """Total length of the arc family, summed arc by arc (no union dedup)."""
    total = 0.0
    for q in range(1, floor(system.Q) + 1):
        total += euler_phi(q) * min(2 * system.halfwidth / q, 1.0)
    return total
