"""Trapezoid weights on form ratios, multiplicative Folner boxes, and exact
divisor statistics with their predicted main terms.

The weight of (m, n) is a trapezoidal bump applied to the circle point
(P1(m,n))^i * (P2(m,n))^{-i}, times indicators that both form values are
positive.  Grid averages of the weight converge to a positive constant when
the forms allow it, and that constant normalizes the correlation averages in
`experiments`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Optional

import numpy as np

from .arith import factorize, fsum_complex, sieve_primes
from .caps import CAPS
from .errors import DomainError, ResourceError
from .multfunc import MultiplicativeFunction, evaluate_on_exponents
from .quadforms import BinaryQuadraticForm, exceptional_primes, local_root_count

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class WeightSpec:
    """Trapezoid half-widths delta in (0, 1/2), forms of equal degree."""

    delta: float
    form1: BinaryQuadraticForm
    form2: BinaryQuadraticForm

    def __post_init__(self):
        if not 0 < self.delta < 0.5:
            raise DomainError("delta must lie in (0, 1/2)")


def trapezoid_bump(phase: np.ndarray | float, delta: float):
    """1 on |phase| <= delta/2, 0 beyond delta, linear between.

    Phases are in full turns, already reduced to [-1/2, 1/2).
    """
    a = np.abs(phase)
    return np.clip(2.0 - 2.0 * a / delta, 0.0, 1.0)


def _reduced_phase(p1, p2):
    """(ln p1 - ln p2) / 2pi reduced to [-1/2, 1/2); inputs must be positive."""
    phi = (np.log(p1) - np.log(p2)) / TWO_PI
    return phi - np.floor(phi + 0.5)


def weight_grid(spec: WeightSpec, u, w) -> np.ndarray:
    """Vectorized weight at coordinate arrays (already shifted/scaled)."""
    p1 = spec.form1.grid_values(u, w).astype(np.float64)
    p2 = spec.form2.grid_values(u, w).astype(np.float64)
    pos = (p1 > 0) & (p2 > 0)
    out = np.zeros(np.broadcast(p1, p2).shape)
    if pos.any():
        phi = _reduced_phase(np.where(pos, p1, 1.0), np.where(pos, p2, 1.0))
        out = np.where(pos, trapezoid_bump(phi, spec.delta), 0.0)
    return out


def weight(spec: WeightSpec, m: int, n: int) -> float:
    """Scalar weight at an integer point."""
    if (m, n) == (0, 0):
        raise DomainError("(0, 0) is excluded")
    p1 = spec.form1.value(m, n)
    p2 = spec.form2.value(m, n)
    if p1 <= 0 or p2 <= 0:
        return 0.0
    phi = (math.log(p1) - math.log(p2)) / TWO_PI
    phi -= math.floor(phi + 0.5)
    return float(trapezoid_bump(phi, spec.delta))


@dataclass(frozen=True)
class MuEstimate:
    """Two estimators of the limiting mean weight."""

    grid: float
    riemann: float

    @property
    def agreement(self) -> float:
        return abs(self.grid - self.riemann)


def mu_estimate(spec: WeightSpec, n: int) -> MuEstimate:
    """Mean weight over [n]^2, plus a midpoint Riemann sum of the
    scale-invariant integrand over the unit square at the same resolution."""
    if n < 100:
        raise DomainError("need n >= 100 for a stable estimate")
    if n > CAPS.grid_n:
        raise ResourceError(f"grid {n} exceeds cap {CAPS.grid_n}")
    ms = np.arange(1, n + 1, dtype=np.int64)
    grid = float(np.mean(weight_grid(spec, ms[:, None], ms[None, :])))
    mids = (np.arange(n, dtype=np.float64) + 0.5) / n
    riemann = float(np.mean(weight_grid(spec, mids[:, None], mids[None, :])))
    return MuEstimate(grid=grid, riemann=riemann)


def weight_stability(
    spec: WeightSpec, a: int, b: int, q_max: int, n: int
) -> float:
    """Grid mean of max over Q <= q_max of |w(Qm+a, Qn+b) - w(m, n)|.

    Diagnostic for replacing the shifted weight by the unshifted one.
    """
    if n > CAPS.grid_n:
        raise ResourceError(f"grid {n} exceeds cap {CAPS.grid_n}")
    ms = np.arange(1, n + 1, dtype=np.int64)
    base = weight_grid(spec, ms[:, None], ms[None, :])
    worst = np.zeros_like(base)
    for q in range(1, q_max + 1):
        shifted = weight_grid(spec, (q * ms + a)[:, None], (q * ms + b)[None, :])
        np.maximum(worst, np.abs(shifted - base), out=worst)
    return float(np.mean(worst))


# --------------------------------------------------------------------------
# Folner boxes
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FolnerElement:
    """One box element as an exponent assignment prime -> exponent."""

    exponents: tuple[tuple[int, int], ...]

    def as_dict(self) -> dict[int, int]:
        return dict(self.exponents)

    def integer_value(self) -> int:
        out = 1
        for p, e in self.exponents:
            out *= p**e
        return out

    def log_value(self) -> float:
        return math.fsum(e * math.log(p) for p, e in self.exponents)


def folner_enumerate(k: int) -> list[FolnerElement]:
    """The full box over primes <= k with exponents in (k, 2k]."""
    if k < 2:
        raise DomainError("need k >= 2")
    if k > CAPS.folner_k:
        raise ResourceError(
            f"K = {k} gives K^pi(K) elements, beyond the cap {CAPS.folner_k}; use folner_sample"
        )
    primes = sieve_primes(k)
    ranges = [range(k + 1, 2 * k + 1)] * len(primes)
    return [
        FolnerElement(tuple(zip(primes, combo))) for combo in product(*ranges)
    ]


def folner_sample(k: int, count: int, seed: int = 0) -> list[FolnerElement]:
    """Deterministic uniform sample from the box, for K beyond the cap."""
    import random

    rng = random.Random(seed * 1_000_003 + k)
    primes = sieve_primes(k)
    out = []
    for _ in range(count):
        out.append(
            FolnerElement(tuple((p, rng.randint(k + 1, 2 * k)) for p in primes))
        )
    return out


def folner_partner(
    k: int,
    j: int,
    form1: BinaryQuadraticForm,
    form2: BinaryQuadraticForm,
    excluded: Optional[Iterable[int]] = None,
) -> list[FolnerElement]:
    """The partner box: primes in the j-th partner set (j = 1 or 2) up to k,
    exponents in (k, 3k/2]."""
    from .quadforms import partner_prime_sets

    if j not in (1, 2):
        raise DomainError("j must be 1 or 2")
    skip = set(excluded) if excluded is not None else exceptional_primes(form1, form2, 1)
    p1, p2 = partner_prime_sets(form1, form2, k, skip)
    primes = p1 if j == 1 else p2
    hi = (3 * k) // 2
    if hi <= k:
        raise DomainError("K too small: the exponent range (K, 3K/2] is empty")
    if len(primes) * math.log2(max(2, hi - k)) > 20:
        raise ResourceError("partner box too large to enumerate")
    ranges = [range(k + 1, hi + 1)] * len(primes)
    return [FolnerElement(tuple(zip(primes, combo))) for combo in product(*ranges)]


def folner_average(f: MultiplicativeFunction, k: int) -> complex:
    """Exact mean of f over the Folner box at level k."""
    elements = folner_enumerate(k)
    return fsum_complex(evaluate_on_exponents(f, e.as_dict()) for e in elements) / len(
        elements
    )


# --------------------------------------------------------------------------
# divisor statistics
# --------------------------------------------------------------------------


def _shifted_values(form: BinaryQuadraticForm, q: int, a: int, b: int, n: int) -> np.ndarray:
    """P(q*m+a, q*n+b) over [n]^2 as int64, with an overflow guard."""
    if n > CAPS.divisor_grid_n:
        raise ResourceError(f"grid {n} exceeds cap {CAPS.divisor_grid_n}")
    hi = q * n + max(abs(a), abs(b))
    bound = (abs(form.alpha) + abs(form.beta) + abs(form.gamma)) * hi * hi
    if bound >= 2**62:
        raise ResourceError("form values would overflow the fast integer path")
    ms = np.arange(1, n + 1, dtype=np.int64)
    u = (q * ms + a)[:, None]
    w = (q * ms + b)[None, :]
    return form.grid_values(u, w)


def divisor_stat_exact(
    form: BinaryQuadraticForm, q: int, a: int, b: int, p: int, p2: int, n: int
) -> float:
    """Frequency over [n]^2 of exact divisibility of P(q m + a, q n + b) by
    both p and p2 (a single condition when p == p2)."""
    vals = _shifted_values(form, q, a, b, n)

    def exactly(prime: int) -> np.ndarray:
        return (vals % prime == 0) & (vals % (prime * prime) != 0)

    mask = exactly(p) if p == p2 else exactly(p) & exactly(p2)
    return float(np.count_nonzero(mask)) / (n * n)


def _prediction_factor(form: BinaryQuadraticForm, p: int) -> float:
    w1 = local_root_count(form, p)
    w2 = local_root_count(form, p * p)
    return (w1 / p - w2 / (p * p)) * (1.0 - 1.0 / p)


def divisor_stat_predicted(
    form: BinaryQuadraticForm, p: int, p2: int, q: int = 1
) -> float:
    """Main term of the exact-divisibility frequency.

    Only valid away from the exceptional primes (divisors of
    2 * q * disc * P(1, 0)); those raise DomainError naming the reason.
    """
    if not form.irreducible:
        raise DomainError("predictions require an irreducible form")
    bad = 2 * q * form.discriminant * form.value(1, 0)
    for prime in {p, p2}:
        if bad % prime == 0:
            raise DomainError(
                f"prime {prime} divides 2*Q*disc*P(1,0) = {bad}: outside the predicted regime"
            )
    if p == p2:
        return _prediction_factor(form, p)
    return _prediction_factor(form, p) * _prediction_factor(form, p2)


def divisor_bound_probe(
    form: BinaryQuadraticForm, q: int, a: int, b: int, l: int, n: int
) -> tuple[float, float]:
    """(exact frequency of l | P(q m + a, q n + b), reference Q^2 / l).

    l must be a product of at most two primes; the pair monitors the
    large-divisor bound.
    """
    omega_l = sum(e for _, e in factorize(l).factors)
    if omega_l > 2:
        raise DomainError("l must be a product of at most two primes")
    vals = _shifted_values(form, q, a, b, n)
    exact = float(np.count_nonzero(vals % l == 0)) / (n * n)
    return exact, q * q / l
