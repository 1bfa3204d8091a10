import cmath
import math
import random
from itertools import product

import numpy as np
import pytest

from qpairs.arith import sieve_primes
from qpairs.errors import DomainError
from qpairs.multfunc import (
    MultiplicativeFunction,
    additive_from_prime_values,
    archimedean,
    character_extended,
    character_function,
    dirichlet_characters,
    distance,
    distance_form,
    distance_weighted,
    evaluate,
    evaluate_many,
    evaluate_on_exponents,
    function_from_name,
    liouville,
    one,
    prime_patch,
    twisted,
)
from qpairs.quadforms import BinaryQuadraticForm


# --- evaluation ---------------------------------------------------------------

def test_liouville_values():
    lam = liouville()
    assert evaluate(lam, 12) == -1  # (-1)^3
    assert evaluate(lam, -12) == -1  # even extension
    assert evaluate(lam, 0) == 0
    assert evaluate(lam, 1) == 1


def test_archimedean_direct_rule():
    f = archimedean(1.0)
    expected = cmath.exp(1j * math.log(10))
    assert evaluate(f, 10) == expected
    assert abs(expected.real - (-0.66820)) < 1e-4
    assert evaluate(f, -10) == expected


def test_evaluate_on_exponents_examples():
    lam = liouville()
    assert evaluate_on_exponents(lam, {2: 6, 3: 6}) == 1
    assert evaluate_on_exponents(lam, {2: 5, 3: 4}) == -1
    chi = dirichlet_characters(4)[1]
    assert evaluate_on_exponents(character_function(chi), {3: 2}) == chi(3) ** 2 == 1


def test_evaluate_on_exponents_rejects_zero_exponent():
    with pytest.raises(DomainError):
        evaluate_on_exponents(liouville(), {2: 0})


def test_exponent_evaluation_matches_expansion():
    functions = [
        liouville(),
        character_function(dirichlet_characters(4)[1]),
        archimedean(0.7),
        prime_patch(2, 6, -1.0),
    ]
    primes = [2, 3, 5, 7]
    for exps in product(range(5), repeat=4):
        assignment = {p: e for p, e in zip(primes, exps) if e > 0}
        if not assignment:
            continue
        value = 1
        for p, e in assignment.items():
            value *= p**e
        for f in functions:
            assert abs(evaluate_on_exponents(f, assignment) - evaluate(f, value)) < 1e-12


def test_multiplicativity_random():
    rng = random.Random(7)
    fs = [liouville(), archimedean(0.3), character_function(dirichlet_characters(5)[1])]
    for _ in range(200):
        m = rng.randint(1, 500)
        n = rng.randint(1, 500)
        if math.gcd(m, n) != 1:
            continue
        for f in fs:
            assert abs(evaluate(f, m * n) - evaluate(f, m) * evaluate(f, n)) < 1e-10


# --- characters ---------------------------------------------------------------

def test_characters_q4():
    chars = dirichlet_characters(4)
    assert len(chars) == 2
    assert chars[0].principal
    assert chars[1](3) == -1


def test_characters_q5_orders():
    chars = dirichlet_characters(5)
    assert len(chars) == 4
    assert sorted(c.order for c in chars) == [1, 2, 4, 4]
    # every table is a homomorphism on units (exhaustive oracle)
    for c in chars:
        for a in range(1, 5):
            for b in range(1, 5):
                assert abs(c(a * b) - c(a) * c(b)) < 1e-12


def test_characters_q8_all_real():
    chars = dirichlet_characters(8)
    assert len(chars) == 4
    assert all(abs(v.imag) < 1e-15 for c in chars for v in c.table)


def test_character_zero_off_units_and_roots_of_unity():
    for q in (4, 5, 8, 9, 12, 15):
        chars = dirichlet_characters(q)
        phi = sum(1 for a in range(q) if math.gcd(a, q) == 1)
        assert len(chars) == phi
        exponent = 1
        for c in chars:
            exponent = exponent * c.order // math.gcd(exponent, c.order)
        for c in chars:
            for a in range(q):
                if math.gcd(a, q) == 1:
                    assert abs(abs(c(a)) - 1) < 1e-12
                    assert abs(c(a) ** exponent - 1) < 1e-10
                else:
                    assert c(a) == 0


def test_character_orthogonality():
    for q in range(1, 51):
        chars = dirichlet_characters(q)
        phi = sum(1 for a in range(max(q, 1)) if math.gcd(a, q) == 1)
        for i, c1 in enumerate(chars):
            for j, c2 in enumerate(chars):
                s = sum(c1(a) * c2(a).conjugate() for a in range(q))
                expected = phi if i == j else 0.0
                assert abs(s - expected) < 1e-9


# --- distances ----------------------------------------------------------------

def test_distance_identity_and_examples():
    lam = liouville()
    assert distance(lam, lam, 1, 100) == 0.0
    # oracle: direct sum over p in (1, 10]
    direct = math.sqrt(sum(2.0 / p for p in (2, 3, 5, 7)))
    assert abs(distance(lam, one(), 1, 10) - direct) < 1e-14
    assert abs(direct - 1.53374) < 1e-5
    assert distance(lam, lam, 10, 10**4) == 0.0


def test_distance_form_examples():
    P = BinaryQuadraticForm(1, 0, 1)
    lam = liouville()
    # oracle: exhaustive root counts mod 2, 3, 5, 7
    counts = {
        p: sum(1 for x in range(p) if (x * x + 1) % p == 0) for p in (2, 3, 5, 7)
    }
    assert counts == {2: 1, 3: 0, 5: 2, 7: 0}
    direct = math.sqrt(sum(counts[p] / p * 2.0 for p in counts))
    assert abs(distance_form(P, lam, one(), 1, 10) - direct) < 1e-14
    assert abs(direct - math.sqrt(1.8)) < 1e-14
    assert distance_form(P, lam, lam, 1, 100) == 0.0
    assert distance_form(P, lam, one(), 3, 4) == 0.0


def test_distance_weighted_examples():
    lam = liouville()
    assert distance_weighted(lambda p: 1.0, lam, one(), 1, 10) == distance(lam, one(), 1, 10)
    assert distance_weighted(lambda p: 0.0, lam, one(), 1, 100) == 0.0
    c = {5: 2.0, 13: 2.0}
    direct = math.sqrt(4 * (1 / 5 + 1 / 13))
    assert abs(distance_weighted(c, lam, one(), 1, 13) - direct) < 1e-14


def _random_unit_function(rng):
    values = {p: cmath.exp(2j * math.pi * rng.random()) for p in sieve_primes(100)}

    def rule(p, k):
        return values.get(p, 1.0) ** k

    return MultiplicativeFunction(
        description="random-unit", prime_power_rule=rule, completely_multiplicative=True
    )


def test_triangle_and_product_inequalities():
    P = BinaryQuadraticForm(1, 0, 1)
    rng = random.Random(20240501)
    for _ in range(50):
        f, g, h = (_random_unit_function(rng) for _ in range(3))
        dfg = distance_form(P, f, g, 1, 100)
        dfh = distance_form(P, f, h, 1, 100)
        dhg = distance_form(P, h, g, 1, 100)
        assert dfg <= dfh + dhg + 1e-10
        f2, g2 = _random_unit_function(rng), _random_unit_function(rng)

        def prod(u, v):
            return MultiplicativeFunction(
                description="prod",
                prime_power_rule=lambda p, k: u.prime_power_rule(p, k) * v.prime_power_rule(p, k),
                completely_multiplicative=True,
            )

        lhs = distance_form(P, prod(f, f2), prod(g, g2), 1, 100)
        rhs = distance_form(P, f, g, 1, 100) + distance_form(P, f2, g2, 1, 100)
        assert lhs <= rhs + 1e-10


# --- bulk evaluation ------------------------------------------------------------

def test_evaluate_many_matches_scalar():
    values = np.array([-30, -1, 0, 1, 2, 9, 12, 30, 49, 97, 100], dtype=np.int64)
    chi = dirichlet_characters(4)[1]
    funcs = [
        liouville(),
        one(),
        archimedean(0.9),
        character_function(chi),
        twisted(chi, 0.5),
        character_extended(chi, {2: 1.0}),
        prime_patch(10, 100, -1.0),
    ]
    for f in funcs:
        bulk = evaluate_many(f, values)
        for v, got in zip(values, bulk):
            assert abs(got - evaluate(f, int(v))) < 1e-12, (f.description, v)


def test_liouville_sieve_against_factorization():
    import numpy as np

    lam = liouville()
    values = np.arange(1, 3001, dtype=np.int64)
    table = evaluate_many(lam, values)
    for n in range(1, 3001):
        omega_total = sum(e for _, e in trial_factor(n))
        assert table[n - 1] == (-1.0) ** omega_total


def trial_factor(n):
    out = []
    d = 2
    while d * d <= n:
        e = 0
        while n % d == 0:
            n //= d
            e += 1
        if e:
            out.append((d, e))
        d += 1
    if n > 1:
        out.append((n, 1))
    return out


def test_function_from_name_round_trip():
    for name in ("liouville", "principal", "char:4:1", "arch:0.7", "twisted:4:1:0.3",
                 "prime-patch:10:100:-1"):
        f = function_from_name(name)
        assert abs(evaluate(f, 7)) <= 1 + 1e-12
    with pytest.raises(DomainError):
        function_from_name("mystery")
    with pytest.raises(DomainError):
        function_from_name("char:4")


# --- additive functions ----------------------------------------------------------

def test_distance_profile_growth_shapes():
    from qpairs.multfunc import distance_profile, twisted

    lam = liouville()
    profile = distance_profile(lam, one(), [10, 100, 1000])
    values = [v for _, v in profile]
    assert values == sorted(values)  # partial sums only grow
    chi = dirichlet_characters(4)[1]
    flat = distance_profile(twisted(chi, 0.0), character_function(chi), [100, 10000])
    # ramified prime 2 contributes 1/2 once; nothing accumulates after
    assert flat[0][1] == pytest.approx(math.sqrt(0.5))
    assert flat[1][1] == pytest.approx(flat[0][1])


def test_additive_function():
    h = additive_from_prime_values({13: 1.0, 17: 0.5})
    assert h(13 * 17) == 1.5
    assert h(13 * 13) == 0.0  # vanishes on higher powers
    assert h(-13) == 1.0
    assert h(1) == 0
    with pytest.raises(DomainError):
        h(0)
