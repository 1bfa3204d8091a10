"""Multiplicative functions on Z (extended evenly), Dirichlet characters,
Archimedean characters n^{it}, and prime-sum distances.

A MultiplicativeFunction is a rule on prime powers with values in the closed
unit disk, evaluated through factorization.  Functions are extended to all of
Z by f(0) = 0 and f(-n) = f(n).  Instances are immutable after construction
and safe to share across threads.

Evaluation hints: grid experiments need f at millions of form values, where
per-value factorization is hopeless.  Each built-in carries a structural hint
(constant one / Liouville sign sieve / periodic character times n^{it} with
finitely many prime overrides / finite prime support / pure Archimedean) that
`evaluate_many` dispatches on.  Hints are an optimization only; the scalar
path never consults them.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from math import gcd
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .arith import factorize, sieve_primes
from .caps import CAPS
from .errors import DomainError, ResourceError

# --------------------------------------------------------------------------
# roots of unity, snapped at quarter turns so real characters are exact
# --------------------------------------------------------------------------

_QUARTERS = {0: 1 + 0j, 1: 1j, 2: -1 + 0j, 3: -1j}


def root_of_unity(k: int, n: int) -> complex:
    """exp(2*pi*i*k/n), exact at multiples of a quarter turn."""
    k %= n
    if (4 * k) % n == 0:
        return _QUARTERS[4 * k // n]
    return cmath.exp(2j * cmath.pi * k / n)


# --------------------------------------------------------------------------
# Dirichlet characters
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DirichletCharacter:
    """A character mod q as a full value table (0 off the units)."""

    q: int
    table: tuple[complex, ...]
    principal: bool
    order: int
    label: str

    def __call__(self, n: int) -> complex:
        return self.table[n % self.q]

    def value_array(self) -> np.ndarray:
        return np.asarray(self.table, dtype=np.complex128)


def _unit_group_generators(q: int) -> list[tuple[int, int]]:
    """Generators (g, order) of the cyclic factors of (Z/qZ)*, via CRT lifts."""
    gens: list[tuple[int, int]] = []
    for p, e in factorize(q).factors if q > 1 else []:
        pe = p**e
        rest = q // pe
        if p == 2:
            if e == 1:
                continue
            local = [(pe - 1, 2)] if e == 2 else [(pe - 1, 2), (5, 1 << (e - 2))]
        else:
            phi = pe // p * (p - 1)
            # brute-force primitive root mod p**e; fine for q <= the modulus cap
            qfac = [r for r, _ in factorize(phi).factors]
            g = next(
                g
                for g in range(2, pe)
                if g % p != 0 and all(pow(g, phi // r, pe) != 1 for r in qfac)
            )
            local = [(g, phi)]
        for g, order in local:
            if rest == 1:
                gens.append((g % q, order))
            else:
                # lift: = g mod p**e, = 1 mod q/p**e
                inv = pow(pe, -1, rest)
                lifted = (g * rest * pow(rest, -1, pe) + pe * inv) % q
                gens.append((lifted, order))
    return gens


def dirichlet_characters(q: int) -> list[DirichletCharacter]:
    """The full dual group of (Z/qZ)*, principal character first.

    Characters are indexed lexicographically by their exponent tuple on the
    generators of the cyclic factors; `char:q:index` uses this order.
    """
    if q <= 0:
        raise DomainError("modulus must be positive")
    if q > CAPS.dirichlet_modulus:
        raise ResourceError(f"modulus {q} exceeds cap {CAPS.dirichlet_modulus}")
    gens = _unit_group_generators(q)
    orders = [s for _, s in gens]

    # discrete logs of every unit, by walking the generator box
    dlog: dict[int, tuple[int, ...]] = {1 % q: tuple([0] * len(gens))}
    units = [1 % q]
    for i, (g, s) in enumerate(gens):
        new_units = list(units)
        for u in units:
            x = u
            for k in range(1, s):
                x = x * g % q
                vec = list(dlog[u])
                vec[i] = k
                dlog[x] = tuple(vec)
                new_units.append(x)
        units = new_units

    chars: list[DirichletCharacter] = []
    exps = [tuple()]
    for s in orders:
        exps = [e + (k,) for e in exps for k in range(s)]
    for idx, cvec in enumerate(sorted(exps)):
        table = [0j] * q
        for u, vec in dlog.items():
            val = 1 + 0j
            for c, v, s in zip(cvec, vec, orders):
                val *= root_of_unity(c * v, s)
            table[u] = val
        order = 1
        for c, s in zip(cvec, orders):
            if c:
                order = order * (s // gcd(c, s)) // gcd(order, s // gcd(c, s))
        chars.append(
            DirichletCharacter(
                q=q,
                table=tuple(table),
                principal=all(c == 0 for c in cvec),
                order=order,
                label=f"char:{q}:{idx}",
            )
        )
    return chars


@dataclass(frozen=True)
class TwistData:
    """An Archimedean exponent together with a Dirichlet character."""

    t: float
    chi: DirichletCharacter


# --------------------------------------------------------------------------
# multiplicative functions
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class EvalHint:
    """Structural shape used by evaluate_many; never affects scalar results.

    kind:
      'one'        constant 1
      'liouville'  completely multiplicative +-1 sign, sieveable
      'periodic'   chi(n) * n^{it} with finitely many prime overrides
      'support'    1 except on finitely many primes (completely multiplicative)
      'arch'       pure n^{it}
    """

    kind: str
    chi: Optional[DirichletCharacter] = None
    t: float = 0.0
    overrides: Mapping[int, complex] = field(default_factory=dict)
    support: tuple[int, ...] = ()


@dataclass(frozen=True)
class MultiplicativeFunction:
    description: str
    prime_power_rule: Callable[[int, int], complex]
    completely_multiplicative: bool = False
    direct_rule: Optional[Callable[[int], complex]] = None
    hint: Optional[EvalHint] = None

    def at_prime(self, p: int) -> complex:
        return complex(self.prime_power_rule(p, 1))

    def __call__(self, n: int) -> complex:
        return evaluate(self, n)


def evaluate(f: MultiplicativeFunction, n: int) -> complex:
    """f at an integer: 0 at 0, even extension, product over prime powers."""
    if n == 0:
        return 0j
    n = abs(n)
    if f.direct_rule is not None:
        return complex(f.direct_rule(n))
    if n == 1:
        return 1 + 0j
    out = 1 + 0j
    for p, e in factorize(n).factors:
        out *= f.prime_power_rule(p, e)
        if out == 0:
            return 0j
    return out


def evaluate_on_exponents(f: MultiplicativeFunction, exponents: Mapping[int, int]) -> complex:
    """f at prod p^{e_p} without expanding the integer.

    Equals evaluate(f, prod) whenever the product is representable; intended
    for Folner elements whose integer values are astronomical.
    """
    for p, e in exponents.items():
        if e < 1:
            raise DomainError("exponents must be >= 1")
    if f.hint is not None and f.hint.kind == "arch":
        logn = math.fsum(e * math.log(p) for p, e in exponents.items())
        return cmath.exp(1j * f.hint.t * logn)
    out = 1 + 0j
    for p in sorted(exponents):
        out *= f.prime_power_rule(p, exponents[p])
        if out == 0:
            return 0j
    return out


# --- bulk evaluation --------------------------------------------------------

_liouville_table: np.ndarray | None = None


def _liouville_sieve(limit: int) -> np.ndarray:
    """lambda(n) for n <= limit as int8, via prime-power slice updates.

    The table grows geometrically and is kept, so grid experiments should
    call `prime_value_table` once with their value bound up front.
    """
    global _liouville_table
    if _liouville_table is not None and len(_liouville_table) > limit:
        return _liouville_table
    if limit > CAPS.value_sieve_limit:
        raise ResourceError(f"value sieve {limit} exceeds cap {CAPS.value_sieve_limit}")
    if _liouville_table is not None:
        limit = min(max(limit, 2 * len(_liouville_table)), CAPS.value_sieve_limit)
    n = limit + 1
    parity = np.zeros(n, dtype=np.int8)
    rem = np.arange(n, dtype=np.int64)
    for p in sieve_primes(max(2, math.isqrt(limit))):
        pe = p
        while pe <= limit:
            parity[pe::pe] ^= 1
            rem[pe::pe] //= p
            pe *= p
    parity[rem > 1] ^= 1  # one prime factor > sqrt(limit) remains
    table = np.where(parity == 0, 1, -1).astype(np.int8)
    table[0] = 0
    _liouville_table = table
    return table


def prime_value_table(f: MultiplicativeFunction, bound: int) -> None:
    """Ensure any value table f needs covers integers up to bound."""
    if f.hint is not None and f.hint.kind == "liouville":
        _liouville_sieve(max(2, int(bound)))


def _strip_valuations(values: np.ndarray, p: int, val: complex) -> tuple[np.ndarray, np.ndarray]:
    """Divide out all powers of p, returning (stripped, val**e correction)."""
    w = values.copy()
    corr = np.ones(len(w), dtype=np.complex128)
    mask = w % p == 0
    while mask.any():
        w[mask] = w[mask] // p
        corr[mask] *= val
        mask = w % p == 0
    return w, corr


def evaluate_many(f: MultiplicativeFunction, values: np.ndarray) -> np.ndarray:
    """Vectorized f over an integer array (any sign; zeros map to 0).

    Uses the structural hint when present; otherwise falls back to per-value
    factorization, which is only viable for small batches.
    """
    values = np.asarray(values)
    absv = np.abs(values)
    hint = f.hint
    if hint is None:
        return np.array([evaluate(f, int(v)) for v in values], dtype=np.complex128)

    flat = absv.reshape(-1)
    if hint.kind == "one":
        out = np.ones(flat.shape, dtype=np.complex128)
    elif hint.kind == "liouville":
        vmax = int(flat.max()) if flat.size else 0
        table = _liouville_sieve(max(2, vmax))
        out = table[flat.astype(np.int64)].astype(np.complex128)
    elif hint.kind == "arch":
        safe = np.where(flat == 0, 1, flat).astype(np.float64)
        out = np.exp(1j * hint.t * np.log(safe))
    elif hint.kind in ("periodic", "support"):
        # zeros would never leave the stripping loop; they are masked to 0 below
        safe_flat = np.where(flat == 0, 1, flat)
        w = safe_flat.astype(object) if flat.dtype == object else safe_flat.astype(np.int64)
        corr = np.ones(flat.shape, dtype=np.complex128)
        for p, val in sorted(hint.overrides.items()):
            w, c = _strip_valuations(w, p, val)
            corr *= c
        if hint.kind == "periodic":
            chi = hint.chi
            res = (w % chi.q).astype(np.int64)
            out = chi.value_array()[res] * corr
            if hint.t != 0.0:
                safe = np.where(flat == 0, 1, flat).astype(np.float64)
                out = out * np.exp(1j * hint.t * np.log(safe))
        else:
            out = corr
    else:  # pragma: no cover
        raise DomainError(f"unknown evaluation hint {hint.kind}")
    out = out.reshape(absv.shape)
    return np.where(absv == 0, 0j, out)


# --------------------------------------------------------------------------
# built-ins
# --------------------------------------------------------------------------


def liouville() -> MultiplicativeFunction:
    return MultiplicativeFunction(
        description="liouville",
        prime_power_rule=lambda p, k: (-1.0) ** k,
        completely_multiplicative=True,
        hint=EvalHint(kind="liouville"),
    )


def one() -> MultiplicativeFunction:
    """The constant completely multiplicative function 1 (CLI name: principal)."""
    return MultiplicativeFunction(
        description="principal",
        prime_power_rule=lambda p, k: 1 + 0j,
        completely_multiplicative=True,
        hint=EvalHint(kind="one"),
    )


def archimedean(t: float) -> MultiplicativeFunction:
    """n^{it}, evaluated by a direct complex exponential of t*ln n.

    The direct rule avoids accumulating rounding across prime factors and is
    what makes the concentration identities exact.
    """
    return MultiplicativeFunction(
        description=f"arch:{t}",
        prime_power_rule=lambda p, k: cmath.exp(1j * t * k * math.log(p)),
        completely_multiplicative=True,
        direct_rule=lambda n: cmath.exp(1j * t * math.log(n)) if n != 0 else 0j,
        hint=EvalHint(kind="arch", t=t),
    )


def character_function(chi: DirichletCharacter) -> MultiplicativeFunction:
    return MultiplicativeFunction(
        description=chi.label,
        prime_power_rule=lambda p, k: chi(p) ** k,
        completely_multiplicative=True,
        direct_rule=lambda n: chi(n),
        hint=EvalHint(kind="periodic", chi=chi),
    )


def twisted(chi: DirichletCharacter, t: float) -> MultiplicativeFunction:
    """chi * n^{it}; value 0 at primes dividing the modulus (chi = 0 there)."""

    def rule(p: int, k: int) -> complex:
        return (chi(p) * cmath.exp(1j * t * math.log(p))) ** k

    return MultiplicativeFunction(
        description=f"twisted:{chi.q}:{chi.label.rsplit(':', 1)[-1]}:{t}",
        prime_power_rule=rule,
        completely_multiplicative=True,
        direct_rule=lambda n: chi(n) * cmath.exp(1j * t * math.log(n)) if n != 0 else 0j,
        hint=EvalHint(kind="periodic", chi=chi, t=t),
    )


def character_extended(
    chi: DirichletCharacter, overrides: Mapping[int, complex], t: float = 0.0
) -> MultiplicativeFunction:
    """chi * n^{it} with the values at finitely many primes replaced.

    Overrides are applied completely multiplicatively: f(p^k) = override^k.
    """
    ov = {int(p): complex(v) for p, v in overrides.items()}

    def rule(p: int, k: int) -> complex:
        base = ov[p] if p in ov else chi(p)
        return base**k * cmath.exp(1j * t * k * math.log(p))

    return MultiplicativeFunction(
        description=f"{chi.label}+overrides",
        prime_power_rule=rule,
        completely_multiplicative=True,
        hint=EvalHint(kind="periodic", chi=chi, t=t, overrides=ov),
    )


def prime_patch(lo: int, hi: int, value: complex) -> MultiplicativeFunction:
    """value at primes in (lo, hi], 1 elsewhere; completely multiplicative."""
    if abs(value) > 1 + 1e-12:
        raise DomainError("values must stay in the unit disk")
    support = tuple(p for p in sieve_primes(max(2, hi)) if lo < p <= hi)
    sset = set(support)
    value = complex(value)

    def rule(p: int, k: int) -> complex:
        return value**k if p in sset else 1 + 0j

    return MultiplicativeFunction(
        description=f"prime-patch:{lo}:{hi}:{value}",
        prime_power_rule=rule,
        completely_multiplicative=True,
        hint=EvalHint(kind="support", overrides={p: value for p in support}, support=support),
    )


def function_from_name(name: str) -> MultiplicativeFunction:
    """Resolve the CLI syntax: liouville | principal | char:q:i | arch:t |
    twisted:q:i:t | prime-patch:lo:hi:value."""
    parts = name.split(":")
    kind = parts[0]
    try:
        if kind == "liouville":
            return liouville()
        if kind == "principal":
            return one()
        if kind == "char":
            q, idx = int(parts[1]), int(parts[2])
            return character_function(dirichlet_characters(q)[idx])
        if kind == "arch":
            return archimedean(float(parts[1]))
        if kind == "twisted":
            q, idx, t = int(parts[1]), int(parts[2]), float(parts[3])
            return twisted(dirichlet_characters(q)[idx], t)
        if kind == "prime-patch":
            lo, hi = int(parts[1]), int(parts[2])
            return prime_patch(lo, hi, complex(parts[3]))
    except (IndexError, ValueError) as exc:
        raise DomainError(f"bad function spec {name!r}: {exc}") from exc
    raise DomainError(f"unknown function {name!r}")


# --------------------------------------------------------------------------
# additive functions
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class AdditiveFunction:
    """h(mn) = h(m) + h(n) for coprime m, n; even extension to Z."""

    description: str
    prime_power_rule: Callable[[int, int], complex]
    support: Optional[tuple[int, ...]] = None  # primes with h(p) != 0, if known

    def at_prime(self, p: int) -> complex:
        return complex(self.prime_power_rule(p, 1))

    def __call__(self, n: int) -> complex:
        if n == 0:
            raise DomainError("additive functions are not defined at 0")
        n = abs(n)
        if n == 1:
            return 0j
        return sum((self.prime_power_rule(p, e) for p, e in factorize(n).factors), 0j)


def additive_from_prime_values(values: Mapping[int, complex], description: str = "custom") -> AdditiveFunction:
    """h supported on the given primes (h(p^k) = 0 for k >= 2)."""
    table = {int(p): complex(v) for p, v in values.items()}

    def rule(p: int, k: int) -> complex:
        return table.get(p, 0j) if k == 1 else 0j

    return AdditiveFunction(
        description=description, prime_power_rule=rule, support=tuple(sorted(table))
    )


# --------------------------------------------------------------------------
# prime-sum distances
# --------------------------------------------------------------------------


def _distance_sq(
    weight_at: Callable[[int], float],
    f: MultiplicativeFunction,
    g: MultiplicativeFunction,
    x: float,
    y: float,
) -> float:
    if x > y:
        raise DomainError("need x <= y")
    if y > CAPS.sieve_limit:
        raise ResourceError("upper range exceeds the sieve cap")
    terms = []
    for p in sieve_primes(max(2, int(y))):
        if p <= x or p > y:
            continue
        c = weight_at(p)
        if c == 0.0:
            continue
        terms.append(c / p * (1.0 - (f.at_prime(p) * g.at_prime(p).conjugate()).real))
    # ascending prime order with exactly rounded summation
    return max(0.0, math.fsum(terms))


def distance(f: MultiplicativeFunction, g: MultiplicativeFunction, x: float, y: float) -> float:
    """Prime-sum distance: sqrt of sum over x < p <= y of (1 - Re f(p) conj g(p)) / p."""
    return math.sqrt(_distance_sq(lambda p: 1.0, f, g, x, y))


def distance_form(form, f: MultiplicativeFunction, g: MultiplicativeFunction, x: float, y: float) -> float:
    """Distance with each prime weighted by the local root count of the form."""
    from .quadforms import local_root_count, local_root_count_fast

    if form.irreducible:
        weight = lambda p: float(local_root_count_fast(form, p))
    else:
        weight = lambda p: float(local_root_count(form, p))
    return math.sqrt(_distance_sq(weight, f, g, x, y))


def distance_weighted(
    c: Callable[[int], float] | Mapping[int, float],
    f: MultiplicativeFunction,
    g: MultiplicativeFunction,
    x: float,
    y: float,
) -> float:
    """Distance with arbitrary bounded nonnegative prime weights c(p)."""
    if isinstance(c, Mapping):
        weight = lambda p: float(c.get(p, 0.0))
    else:
        weight = lambda p: float(c(p))
    return math.sqrt(_distance_sq(weight, f, g, x, y))


def distance_profile(
    f: MultiplicativeFunction,
    g: MultiplicativeFunction,
    checkpoints: Sequence[float],
    form=None,
) -> list[tuple[float, float]]:
    """Partial-sum growth of the (optionally form-weighted) distance.

    Pretentiousness is a statement about the limit and is undecidable from
    finite data; this report of the distance at increasing cutoffs is the
    honest finite substitute.  Bounded profiles suggest pretentious behavior,
    steadily growing ones suggest the opposite; no boolean is offered.
    """
    out = []
    for y in checkpoints:
        if form is not None:
            out.append((float(y), distance_form(form, f, g, 1, y)))
        else:
            out.append((float(y), distance(f, g, 1, y)))
    return out


def distance_additive(h: AdditiveFunction, x: float, y: float) -> float:
    """sqrt of sum over x < p <= y of |h(p)|^2 / p (the additive-function norm)."""
    if x > y:
        raise DomainError("need x <= y")
    terms = [
        abs(h.at_prime(p)) ** 2 / p
        for p in sieve_primes(max(2, int(y)))
        if x < p <= y
    ]
    return math.sqrt(math.fsum(terms))
