"""Quadratic rings Z[tau_d] with norm form P_d.

Sign convention: the field is Q(sqrt(-d)) for squarefree d, so d > 0 is the
imaginary case (at most 4 units) and d < 0 the real case (rank-1 unit group).
tau_d is sqrt(-d) for d = 1, 2 mod 4 and (1 + sqrt(-d))/2 for d = 3 mod 4,
which always gives the maximal order; the norm of m + n*tau_d is P_d(m, n).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import isqrt

from .arith import factorize, kronecker, pell_fundamental_pm
from .caps import CAPS
from .errors import DomainError, InvariantError, ResourceError
from .quadforms import BinaryQuadraticForm


@dataclass(frozen=True)
class QuadraticRing:
    d: int  # squarefree, nonzero

    def __post_init__(self):
        if self.d == 0:
            raise DomainError("d must be nonzero")
        for _, e in factorize(self.d).factors:
            if e > 1:
                raise DomainError(f"d = {self.d} is not squarefree")

    @cached_property
    def half_integer(self) -> bool:
        """True when tau = (1 + sqrt(-d))/2 (d = 3 mod 4)."""
        return self.d % 4 == 3

    @cached_property
    def norm_form(self) -> BinaryQuadraticForm:
        if self.half_integer:
            return BinaryQuadraticForm(1, 1, (self.d + 1) // 4)
        return BinaryQuadraticForm(1, 0, self.d)

    @cached_property
    def field_discriminant(self) -> int:
        return -self.d if self.half_integer else -4 * self.d

    @property
    def unit_rank(self) -> int:
        return 0 if self.d > 0 else 1

    def element(self, m: int, n: int) -> "RingElement":
        return RingElement(self, m, n)

    def one(self) -> "RingElement":
        return RingElement(self, 1, 0)

    def __str__(self) -> str:
        return f"Z[tau_{self.d}]"


@dataclass(frozen=True)
class RingElement:
    """m + n * tau_d."""

    ring: QuadraticRing
    m: int
    n: int

    def norm(self) -> int:
        return self.ring.norm_form.value(self.m, self.n)

    def conjugate(self) -> "RingElement":
        if self.ring.half_integer:
            return RingElement(self.ring, self.m + self.n, -self.n)
        return RingElement(self.ring, self.m, -self.n)

    def __mul__(self, other: "RingElement") -> "RingElement":
        if self.ring != other.ring:
            raise DomainError("elements of different rings")
        m1, n1, m2, n2 = self.m, self.n, other.m, other.n
        if self.ring.half_integer:
            e = (self.ring.d + 1) // 4  # tau^2 = tau - e
            return RingElement(self.ring, m1 * m2 - e * n1 * n2, m1 * n2 + n1 * m2 + n1 * n2)
        return RingElement(self.ring, m1 * m2 - self.ring.d * n1 * n2, m1 * n2 + n1 * m2)

    def __neg__(self) -> "RingElement":
        return RingElement(self.ring, -self.m, -self.n)

    def divide_exact(self, other: "RingElement") -> "RingElement | None":
        """self / other when other divides self in the ring, else None."""
        k = other.norm()
        if k == 0:
            raise DomainError("division by zero element")
        num = self * other.conjugate()
        if num.m % k or num.n % k:
            return None
        return RingElement(self.ring, num.m // k, num.n // k)

    def real_value(self) -> float:
        """The image under the embedding sending sqrt(-d) to the positive root
        (real quadratic case d < 0)."""
        if self.ring.d > 0:
            raise DomainError("real embedding needs d < 0")
        root = (-self.ring.d) ** 0.5
        tau = (1 + root) / 2 if self.ring.half_integer else root
        return self.m + self.n * tau

    def __str__(self) -> str:
        return f"{self.m}+{self.n}*tau"


def norm(z: RingElement) -> int:
    return z.norm()


def count_norm_solutions(d: int, k: int, box: int) -> int:
    """Lattice points m, n in [-box, box] with norm(m + n*tau_d) = k.

    Scans n and solves the quadratic in m by integer square root; exact.
    """
    if k == 0:
        raise DomainError("k must be nonzero")
    if box > CAPS.box_count_n:
        raise ResourceError(f"box {box} exceeds cap {CAPS.box_count_n}")
    ring = QuadraticRing(d)
    count = 0
    if ring.half_integer:
        # (2m + n)^2 = 4k - d n^2
        for n in range(-box, box + 1):
            s = 4 * k - d * n * n
            if s < 0:
                continue
            y = isqrt(s)
            if y * y != s:
                continue
            for yy in {y, -y}:
                if (yy - n) % 2 == 0 and abs((yy - n) // 2) <= box:
                    count += 1
    else:
        for n in range(-box, box + 1):
            s = k - d * n * n
            if s < 0:
                continue
            m = isqrt(s)
            if m * m != s:
                continue
            for mm in {m, -m}:
                if abs(mm) <= box:
                    count += 1
    return count


def count_ideals(d: int, k: int) -> int:
    """Ideals of Z[tau_d] with norm k, multiplicatively from the splitting type.

    Split prime: a+1 ideals above p^a; inert: 1 if a even, else 0; ramified: 1.
    """
    if k <= 0:
        raise DomainError("ideal norms are positive")
    ring = QuadraticRing(d)
    disc = ring.field_discriminant
    total = 1
    for p, a in factorize(k).factors:
        sym = kronecker(disc, p)
        if sym == 1:
            total *= a + 1
        elif sym == -1:
            if a % 2:
                return 0
        # ramified contributes a factor 1
    return total


def fundamental_unit(d: int) -> tuple[RingElement, int]:
    """Generator u > 1 of the unit group mod torsion (real case d < 0).

    For d = 1, 2 mod 4 this is the continued-fraction solution of
    x^2 - |d| y^2 = +-1; for d = 3 mod 4 the minimal solution of
    x^2 - |d| y^2 = +-4 with x = y mod 2, found by an ascending scan in y
    (first hit is minimal since (x + y sqrt(|d|))/2 increases with y).
    Returns (unit, norm).
    """
    if d >= 0:
        raise DomainError("only real rings (d < 0) have infinite unit groups")
    ring = QuadraticRing(d)
    dd = -d
    if not ring.half_integer:
        x, y, s = pell_fundamental_pm(dd)
        u = ring.element(x, y)
        return u, s
    for y in range(1, 10**6):
        for target in (-4, 4):
            s = dd * y * y + target
            if s <= 0:
                continue
            x = isqrt(s)
            if x * x == s and (x - y) % 2 == 0:
                u = ring.element((x - y) // 2, y)
                return u, target // 4
    raise ResourceError(f"fundamental unit of d={d} not found within the scan cap")


def real_count_log_diagnostic(d: int, k_max: int, box: int) -> float:
    """Fitted constant for the real-case box-count bound (monitored, never
    asserted: the constant is not explicit).

    For d < 0 the lattice count is bounded by log_+(c * box / sqrt|k|) times
    the ideal count; this returns the smallest c making that hold for all
    nonzero |k| <= k_max at this box size.
    """
    if d >= 0:
        raise DomainError("the log-shaped bound concerns real rings (d < 0)")
    import math

    worst = 1.0
    for k in [k for k in range(-k_max, k_max + 1) if k != 0]:
        lattice = count_norm_solutions(d, k, box)
        if lattice == 0:
            continue
        ideals = count_ideals(d, abs(k))
        if ideals == 0:  # pragma: no cover - lattice points generate ideals
            raise InvariantError("lattice solutions without a matching ideal")
        # need log(c * box / sqrt|k|) >= lattice / ideals
        needed = math.exp(lattice / ideals) * math.sqrt(abs(k)) / box
        worst = max(worst, needed)
    return worst


def unit_inverse(u: RingElement) -> RingElement:
    """Inverse of a unit (norm +-1)."""
    nrm = u.norm()
    if abs(nrm) != 1:
        raise DomainError("not a unit")
    c = u.conjugate()
    return c if nrm == 1 else -c


def is_regular(z: RingElement, c_bound, n_max: int) -> bool:
    """Box-contraction regularity of z with constant C.

    For every N <= n_max, every w with z*w in the symmetric coordinate box
    with half-width N must land in the box with half-width
    floor(C * |norm(z)|^(-1/2) * N).  Checked exhaustively over divisible
    lattice points; the comparison is exact for rational C.
    """
    if z.m == 0 and z.n == 0:
        raise DomainError("z must be nonzero")
    if n_max > CAPS.box_count_n:
        raise ResourceError(f"box {n_max} exceeds cap {CAPS.box_count_n}")
    c_frac = Fraction(c_bound)
    if c_frac <= 0:
        raise DomainError("C must be positive")
    k = abs(z.norm())
    ring = z.ring
    num2 = c_frac.numerator**2
    den2 = c_frac.denominator**2
    for m in range(-n_max, n_max + 1):
        for n in range(-n_max, n_max + 1):
            if m == 0 and n == 0:
                continue
            w = ring.element(m, n).divide_exact(z)
            if w is None:
                continue
            box = max(abs(m), abs(n), 1)  # smallest box containing the point
            coord = max(abs(w.m), abs(w.n))
            # coord <= floor(C * N / sqrt(k))  <=>  coord^2 * k * den^2 <= num^2 * N^2
            if coord * coord * k * den2 > num2 * box * box:
                return False
    return True


def find_regular_associate(
    z: RingElement, c_bound, n_max: int, t_range: int
) -> tuple[RingElement, int, int] | None:
    """First associate z * (+-u^t), |t| <= t_range, passing the regularity check.

    Searched in the order t = 0, 1, -1, 2, -2, ... with + before -; returns
    (associate, t, sign) or None.  Real rings only: for d > 0 the unit group
    is finite and z itself is the only associate worth checking.
    """
    if z.ring.d > 0:
        raise DomainError(
            "imaginary ring: only finitely many units, apply the regularity check to z itself"
        )
    u, _ = fundamental_unit(z.ring.d)
    u_inv = unit_inverse(u)
    order = [0]
    for t in range(1, t_range + 1):
        order.extend((t, -t))
    for t in order:
        w = z
        step = u if t > 0 else u_inv
        for _ in range(abs(t)):
            w = w * step
        for sign in (1, -1):
            cand = w if sign == 1 else -w
            if is_regular(cand, c_bound, n_max):
                return cand, t, sign
    return None
