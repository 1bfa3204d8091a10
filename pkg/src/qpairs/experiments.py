"""Concentration sums and grid experiments.

Everything here is a finite-N measurable quantity: concentration left-hand
sides against their single predicted value, Turan-Kubilius-style variances,
normalized weighted pair correlations L(f, Q; a, b), Folner-averaged
nonnegativity probes, multilinear correlation probes over convex cones, and
the level-set search for simultaneous arc hits of a multiplicative function
along a pair of forms.

Grid loops run over disjoint row stripes with per-stripe exact sums merged in
stripe order, so results are independent of the thread count.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .arith import fsum_complex, sieve_primes
from .caps import CAPS
from .errors import DomainError, InvariantError, ResourceError
from .multfunc import (
    AdditiveFunction,
    MultiplicativeFunction,
    TwistData,
    dirichlet_characters,
    evaluate_many,
)
from .averaging import WeightSpec, folner_enumerate, weight_grid
from .quadforms import (
    BinaryQuadraticForm,
    LinearForm,
    form_has_root,
    local_root_count,
    local_root_count_fast,
    _roots_mod_prime,
    _roots_mod_prime_power,
)

# --------------------------------------------------------------------------
# prime sums
# --------------------------------------------------------------------------


def principal_twist() -> TwistData:
    return TwistData(t=0.0, chi=dirichlet_characters(1)[0])


def _twist_factor(twist: TwistData, p: int) -> complex:
    """conj(chi(p)) * p^{-it}."""
    val = twist.chi(p).conjugate()
    if twist.t != 0.0:
        val *= cmath.exp(-1j * twist.t * math.log(p))
    return val


def _omega(form: BinaryQuadraticForm, p: int) -> int:
    return local_root_count_fast(form, p) if form.irreducible else local_root_count(form, p)


def concentration_exponent_form(
    form: BinaryQuadraticForm,
    f: MultiplicativeFunction,
    twist: TwistData,
    k: int,
    n: int,
) -> complex:
    """Sum over k < p <= n of omega_P(p)/p * (f(p) conj(chi(p)) p^{-it} - 1).

    Its exponential is the predicted concentration value for f along the
    form.  Exactly rounded summation in ascending prime order.
    """
    if k >= n:
        return 0j
    terms = []
    for p in sieve_primes(max(2, n)):
        if p <= k or p > n:
            continue
        w = _omega(form, p)
        if w == 0:
            continue
        terms.append(w / p * (f.at_prime(p) * _twist_factor(twist, p) - 1.0))
    return fsum_complex(terms)


def concentration_exponent(
    f: MultiplicativeFunction, twist: TwistData, k: int, n: int
) -> complex:
    """The linear-form analogue: weight 1/p over all primes in (k, n]."""
    if k >= n:
        return 0j
    terms = [
        1.0 / p * (f.at_prime(p) * _twist_factor(twist, p) - 1.0)
        for p in sieve_primes(max(2, n))
        if k < p <= n
    ]
    return fsum_complex(terms)


def predicted_additive_mean(h: AdditiveFunction, k: int, n: int) -> complex:
    """2 * sum over k < p <= n of h(p)/p."""
    if k >= n:
        return 0j
    terms = [2.0 / p * h.at_prime(p) for p in sieve_primes(max(2, n)) if k < p <= n]
    return fsum_complex(terms)


# --------------------------------------------------------------------------
# setups and value grids
# --------------------------------------------------------------------------


def _expand_q(q) -> int:
    if isinstance(q, Mapping):
        out = 1
        for p, e in q.items():
            out *= int(p) ** int(e)
        return out
    return int(q)


@dataclass(frozen=True)
class ConcentrationSetup:
    """Inputs of one concentration run; invariants checked on construction."""

    form: BinaryQuadraticForm
    f: MultiplicativeFunction
    twist: TwistData
    q: int  # accepts an exponent assignment via factory below
    a: int
    b: int
    c: int
    k: int
    n: int

    def __post_init__(self):
        if self.c <= 0 or self.q <= 0:
            raise DomainError("Q and c must be positive")
        pab = self.form.value(self.a, self.b)
        if pab % self.c or self.q % self.c:
            raise DomainError("c must divide gcd(P(a, b), Q)")
        qc = self.q // self.c
        if qc % self.twist.chi.q:
            raise DomainError("the character modulus must divide Q/c")
        prod = 1
        for p in sieve_primes(max(2, self.k)):
            prod *= p
        if qc % prod:
            raise DomainError("the product of primes <= K must divide Q/c")
        if self.k >= self.n:
            raise DomainError("need K < N")


def concentration_setup(form, f, twist, q, a, b, c, k, n) -> ConcentrationSetup:
    """Build a setup; q may be an integer or an exponent assignment."""
    return ConcentrationSetup(form, f, twist, _expand_q(q), a, b, c, k, n)


def _row_coords(q: int, a: int, b: int, ms: np.ndarray, n: int, big: bool):
    """(u column-vector for the stripe rows, w row-vector) in the right dtype."""
    if big:
        u = np.array([q * int(m) + a for m in ms], dtype=object)[:, None]
        w = np.array([q * j + b for j in range(1, n + 1)], dtype=object)[None, :]
    else:
        u = (q * ms + a).astype(np.int64)[:, None]
        w = (q * np.arange(1, n + 1, dtype=np.int64) + b)[None, :]
    return u, w


def _value_bound(form: BinaryQuadraticForm, q: int, a: int, b: int, n: int) -> int:
    hi = q * n + max(abs(a), abs(b))
    coeff = abs(form.alpha) + abs(form.beta) + abs(form.gamma)
    return coeff * hi * hi


def _needs_bigint(form: BinaryQuadraticForm, q: int, a: int, b: int, n: int) -> bool:
    return _value_bound(form, q, a, b, n) >= 2**62


def _prime_tables(
    fs: Iterable[MultiplicativeFunction],
    forms: Iterable[BinaryQuadraticForm],
    q: int,
    a: int,
    b: int,
    n: int,
) -> None:
    """Build any value tables once, before striping, at the grid's bound."""
    from .multfunc import prime_value_table

    bound = max(_value_bound(form, q, a, b, n) for form in forms)
    for f in fs:
        prime_value_table(f, bound)


def concentration_lhs(setup: ConcentrationSetup, threads: int = 1) -> float:
    """Grid mean of |f(P_c(Qm+a, Qn+b)) - chi(P_c(a,b)) * |P_c(Qm,Qn)|^{it} * exp(G)|.

    P_c means the values P(...)/c, which are integers on this lattice.  The
    comparison value is a single complex number per grid point up to the
    Archimedean factor; with t = 0 it is one constant, making the
    exact-agreement configurations test the whole congruence pipeline.
    """
    form, f, twist, q, a, b, c, k, n = (
        setup.form,
        setup.f,
        setup.twist,
        setup.q,
        setup.a,
        setup.b,
        setup.c,
        setup.k,
        setup.n,
    )
    g_val = cmath.exp(concentration_exponent_form(form, f, twist, k, n))
    chi0 = twist.chi(form.value(a, b) // c)
    big = _needs_bigint(form, q, a, b, n)
    if not big:
        _prime_tables([f], [form], q, a, b, n)

    def block(ms: np.ndarray) -> complex:
        u, w = _row_coords(q, a, b, ms, n, big)
        vals = form.grid_values(u, w)
        if big:
            flat = vals.reshape(-1)
            if any(int(v) % c for v in flat):
                raise InvariantError("c does not divide a lattice value")
            vc = np.array([int(v) // c for v in flat], dtype=object).reshape(vals.shape)
        else:
            if np.any(vals % c):
                raise InvariantError("c does not divide a lattice value")
            vc = vals // c
        fv = evaluate_many(f, vc)
        target = chi0 * g_val
        if twist.t != 0.0:
            u0, w0 = _row_coords(q, 0, 0, ms, n, big)
            base = np.abs(form.grid_values(u0, w0).astype(np.float64)) / c
            target = target * np.exp(1j * twist.t * np.log(base))
        return complex(np.sum(np.abs(fv - target)))

    return _striped_real_mean(block, n, threads)


def _striped_real_mean(block, n: int, threads: int) -> float:
    from ._grid import striped_complex_mean

    return striped_complex_mean(block, n, threads).real


def _striped_mean(block, n: int, threads: int) -> complex:
    from ._grid import striped_complex_mean

    return striped_complex_mean(block, n, threads)


# --------------------------------------------------------------------------
# Turan-Kubilius variance
# --------------------------------------------------------------------------


def turan_kubilius_variance(
    setup: ConcentrationSetup, h: AdditiveFunction
) -> "TkReport":
    """Grid variance of h(P_c(Qm+a, Qn+b)) around the predicted mean.

    h must vanish at primes <= K, primes > N, primes where the form has no
    root, and on all higher prime powers; under those conditions h of a
    lattice value is a sum of h(p) over primes exactly dividing it, which is
    accumulated by sieving root classes instead of factorizing.
    """
    form, q, a, b, c, k, n = (
        setup.form,
        setup.q,
        setup.a,
        setup.b,
        setup.c,
        setup.k,
        setup.n,
    )
    if h.support is None:
        raise DomainError("the additive function must declare its prime support")
    support = []
    for p in h.support:
        hp = h.at_prime(p)
        if hp == 0:
            continue
        if p <= k or p > n:
            raise DomainError(f"h({p}) != 0 violates the support window ({k}, {n}]")
        if not form_has_root(form, p):
            raise DomainError(f"h({p}) != 0 but the form has no root mod {p}")
        if h.prime_power_rule(p, 2) != 0:
            raise DomainError("h must vanish on higher prime powers")
        if abs(hp) > 1 + 1e-12:
            raise DomainError("h must be bounded by 1 on primes")
        if q % p == 0 or (2 * form.alpha * form.discriminant) % p == 0:
            raise DomainError(f"support prime {p} collides with Q or the form data")
        support.append((p, hp))

    if _needs_bigint(form, q, a, b, n):
        raise ResourceError("lattice values overflow the fast integer path")
    acc = np.zeros((n, n), dtype=np.complex128)
    ws = q * np.arange(1, n + 1, dtype=np.int64) + b
    qinv_cache: dict[int, int] = {}
    for p, hp in support:
        for modulus, sign in ((p, 1.0), (p * p, -1.0)):
            roots = (
                _roots_mod_prime(form, p)
                if modulus == p
                else _roots_mod_prime_power(form, p, 2)
            )
            qinv = qinv_cache.get(modulus)
            if qinv is None:
                qinv = pow(q, -1, modulus)
                qinv_cache[modulus] = qinv
            wmod = ws % modulus
            for r in roots:
                m0 = ((r * wmod - a) * qinv) % modulus
                for j in range(n):
                    if ws[j] % p == 0:
                        continue  # p | w forces p^2 | P: never exact
                    start = int(m0[j])
                    if start == 0:
                        start = modulus
                    if start <= n:
                        acc[start - 1 :: modulus, j] += sign * hp
    mean_pred = predicted_additive_mean(h, k, n)
    dev = np.abs(acc - mean_pred) ** 2
    variance = float(np.mean(dev))
    from .multfunc import distance_additive

    split = max(k, math.isqrt(n))
    d_low = distance_additive(h, k, split)
    d_high = distance_additive(h, split, n)
    return TkReport(
        variance=variance,
        predicted_mean=mean_pred,
        dist_sq_low=d_low**2,
        dist_sq_high=d_high**2,
        k_term=1.0 / k,
    )


@dataclass(frozen=True)
class TkReport:
    variance: float
    predicted_mean: complex
    dist_sq_low: float  # squared prime-sum norm of h on (K, sqrt(N)]
    dist_sq_high: float  # on (sqrt(N), N]
    k_term: float


# --------------------------------------------------------------------------
# weighted pair averages
# --------------------------------------------------------------------------


def weighted_pair_average(
    f: MultiplicativeFunction,
    form1: BinaryQuadraticForm,
    form2: BinaryQuadraticForm,
    delta: float,
    q: int,
    a: int,
    b: int,
    n: int,
    threads: int = 1,
) -> complex:
    """Normalized weighted correlation
    E w~(m,n) f(P1(Qm+a, Qn+b)) conj(f(P2(Qm+a, Qn+b))) over [n]^2.

    The weight is normalized by its own grid mean at the same n, so the
    constant function averages to exactly 1.
    """
    if n > CAPS.grid_n:
        raise ResourceError(f"grid {n} exceeds cap {CAPS.grid_n}")
    spec = WeightSpec(delta, form1, form2)
    big = _needs_bigint(form1, q, a, b, n) or _needs_bigint(form2, q, a, b, n)
    if not big:
        _prime_tables([f], [form1, form2], q, a, b, n)

    def weight_block(ms: np.ndarray) -> complex:
        mvals = ms[:, None]
        nvals = np.arange(1, n + 1, dtype=np.int64)[None, :]
        return complex(np.sum(weight_grid(spec, mvals, nvals)))

    mu = _striped_real_mean(weight_block, n, threads)
    if mu <= 0:
        raise DomainError("the weight vanishes on this grid; nothing to normalize")

    def block(ms: np.ndarray) -> complex:
        mvals = ms[:, None]
        nvals = np.arange(1, n + 1, dtype=np.int64)[None, :]
        wgt = weight_grid(spec, mvals, nvals)
        u, w = _row_coords(q, a, b, ms, n, big)
        f1 = evaluate_many(f, form1.grid_values(u, w))
        f2 = evaluate_many(f, form2.grid_values(u, w))
        return complex(np.sum(wgt * f1 * np.conj(f2)))

    return _striped_mean(block, n, threads) / mu


def pair_correlation(
    f: MultiplicativeFunction,
    form1: BinaryQuadraticForm,
    form2: BinaryQuadraticForm,
    q: int,
    a: int,
    b: int,
    n: int,
    threads: int = 1,
) -> complex:
    """Unweighted E f(P1(Qm+a, Qn+b)) conj(f(P2(Qm+a, Qn+b)))."""
    if n > CAPS.grid_n:
        raise ResourceError(f"grid {n} exceeds cap {CAPS.grid_n}")
    big = _needs_bigint(form1, q, a, b, n) or _needs_bigint(form2, q, a, b, n)
    if not big:
        _prime_tables([f], [form1, form2], q, a, b, n)

    def block(ms: np.ndarray) -> complex:
        u, w = _row_coords(q, a, b, ms, n, big)
        f1 = evaluate_many(f, form1.grid_values(u, w))
        f2 = evaluate_many(f, form2.grid_values(u, w))
        return complex(np.sum(f1 * np.conj(f2)))

    return _striped_mean(block, n, threads)


def nonnegativity_probe(
    f: MultiplicativeFunction,
    form1: BinaryQuadraticForm,
    form2: BinaryQuadraticForm,
    delta: float,
    k: int,
    n: int,
    threads: int = 1,
) -> float:
    """Mean over the Folner box at level K of Re of the normalized weighted
    correlation with the lattice Qm+1, Qn."""
    if k > 4:
        raise ResourceError("probe limited to K <= 4: Q already has hundreds of digits beyond")
    values = []
    for elem in folner_enumerate(k):
        q = elem.integer_value()
        values.append(
            weighted_pair_average(f, form1, form2, delta, q, 1, 0, n, threads).real
        )
    return float(np.mean(values))


# --------------------------------------------------------------------------
# multilinear correlation probes
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RegionSpec:
    """Intersection of half-planes u*x + v*y >= 0: a homogeneous convex cone."""

    halfplanes: tuple[tuple[int, int], ...] = ()

    def mask(self, x, y):
        out = None
        for hu, hv in self.halfplanes:
            cond = (hu * x + hv * y) >= 0
            out = cond if out is None else (out & cond)
        if out is None:
            return np.ones(np.broadcast(x, y).shape, dtype=bool)
        return np.broadcast_to(out, np.broadcast(x, y).shape)


FULL_QUADRANT = RegionSpec()


def correlation_probe(
    factors: Sequence[tuple[MultiplicativeFunction, LinearForm]],
    g: MultiplicativeFunction,
    form: BinaryQuadraticForm,
    region: RegionSpec,
    q: int,
    a: int,
    b: int,
    n: int,
    threads: int = 1,
) -> complex:
    """E 1_region(u, w) * prod f_j(L_j(u, w)) * g(P(u, w)), u = Qm+a, w = Qn+b.

    The first linear form must be nontrivial and independent of every other.
    """
    if not factors:
        raise DomainError("need at least one linear factor")
    l1 = factors[0][1]
    if not l1.nontrivial:
        raise DomainError("the first linear form is trivial")
    for _, lj in factors[1:]:
        if not l1.independent(lj):
            raise DomainError(f"forms {l1} and {lj} are dependent")
    big = _needs_bigint(form, q, a, b, n)
    if not big:
        _prime_tables([fj for fj, _ in factors] + [g], [form], q, a, b, n)

    def block(ms: np.ndarray) -> complex:
        u, w = _row_coords(q, a, b, ms, n, big)
        vals = region.mask(u, w).astype(np.complex128)
        for fj, lj in factors:
            vals = vals * evaluate_many(fj, lj.grid_values(u, w))
        vals = vals * evaluate_many(g, form.grid_values(u, w))
        return complex(np.sum(vals))

    return _striped_mean(block, n, threads)


# --------------------------------------------------------------------------
# level sets
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class LevelSetSpec:
    """Arc-membership search data for a (pretentious) multiplicative function.

    The arc is centered at 1 with the given half-width in radians; the
    trapezoidal bump supported on it (plateau half the width) supplies the
    Fourier coefficients of the correlation surrogate.
    """

    f: MultiplicativeFunction
    arc_half_width: float
    l_max: int = 40

    def __post_init__(self):
        if not 0 < self.arc_half_width < math.pi:
            raise DomainError("arc half-width must lie in (0, pi)")
        if self.l_max < 1:
            raise DomainError("need l_max >= 1")

    def fourier_coefficients(self) -> dict[int, float]:
        """c_l of the trapezoid: convolution of two boxes of half-widths
        3*delta/4 and delta/4 (delta = half-width in turns)."""
        delta = self.arc_half_width / (2 * math.pi)
        a_box, b_box = 0.75 * delta, 0.25 * delta
        out = {0: 2 * a_box}
        for l in range(1, self.l_max + 1):
            c = (math.sin(2 * math.pi * l * a_box) / (math.pi * l)) * (
                math.sin(2 * math.pi * l * b_box) / (2 * math.pi * l * b_box)
            )
            out[l] = c
            out[-l] = c
        return out

    def in_arc(self, z: complex) -> bool:
        if abs(z) < 1e-12:
            return False
        return abs(cmath.phase(z)) < self.arc_half_width


@dataclass(frozen=True)
class LevelSetHit:
    k: int
    m: int
    n: int
    value1: int  # P1(m, n)
    value2: int  # P2(m, n)
    f_at_k1: complex
    f_at_k2: complex
    surrogate: complex  # sum |c_l|^2 f(v1)^l conj(f(v2)^l)


def level_set_search(
    spec: LevelSetSpec,
    form1: BinaryQuadraticForm,
    form2: BinaryQuadraticForm,
    k_max: int,
    mn_max: int,
) -> Optional[LevelSetHit]:
    """First (k, m, n) with distinct positive form values and both
    f(k * P1(m, n)) and f(k * P2(m, n)) inside the arc.

    Scan order: k ascending, then m, then n.  Returns None when the ranges
    are exhausted (not an error).
    """
    if form1 == form2:
        raise DomainError("the forms must be distinct")
    pairs = []
    for m in range(1, mn_max + 1):
        for n in range(1, mn_max + 1):
            v1 = form1.value(m, n)
            v2 = form2.value(m, n)
            if v1 > 0 and v2 > 0 and v1 != v2:
                pairs.append((m, n, v1, v2))
    if not pairs:
        return None
    arr = np.array([(v1, v2) for _, _, v1, v2 in pairs], dtype=np.int64)
    for k in range(1, k_max + 1):
        z1 = evaluate_many(spec.f, k * arr[:, 0])
        z2 = evaluate_many(spec.f, k * arr[:, 1])
        ok = (
            (np.abs(z1) >= 1e-12)
            & (np.abs(z2) >= 1e-12)
            & (np.abs(np.angle(z1)) < spec.arc_half_width)
            & (np.abs(np.angle(z2)) < spec.arc_half_width)
        )
        idx = np.nonzero(ok)[0]
        if len(idx):
            i = int(idx[0])
            m, n, v1, v2 = pairs[i]
            coeffs = spec.fourier_coefficients()
            f1 = complex(evaluate_many(spec.f, np.array([v1]))[0])
            f2 = complex(evaluate_many(spec.f, np.array([v2]))[0])
            surrogate = fsum_complex(
                abs(c) ** 2 * f1**l * (f2**l).conjugate() for l, c in coeffs.items()
            )
            return LevelSetHit(
                k=k,
                m=m,
                n=n,
                value1=v1,
                value2=v2,
                f_at_k1=complex(z1[i]),
                f_at_k2=complex(z2[i]),
                surrogate=surrogate,
            )
    return None
