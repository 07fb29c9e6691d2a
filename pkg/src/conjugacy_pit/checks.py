"""Oracle checks run by ``selfcheck``.

Each check draws one random instance from the generator it is given and asserts that two
independent computations agree. A check signals a mismatch by raising ``AssertionError``.
"""

import random
from itertools import product
from math import comb
from typing import Callable, Dict, List

from conjugacy_pit.algebra import Matrix, Monomial
from conjugacy_pit.branching import (
    abp_to_trace_power,
    eval_abp,
    eval_trace_power,
    expand_abp,
    expand_roabp,
    expand_trace_power,
    homogenize,
    homogenized_trace_query,
    roabp_to_abp,
    trace_power_to_abp,
)
from conjugacy_pit.diagonal import blackbox_zero_test_diagonal, expand_diagonal
from conjugacy_pit.generators import (
    closure_equal_pair,
    conjugate_pair,
    random_abp,
    random_diagonal,
    random_invertible,
    random_poly,
    random_roabp,
    random_scalar,
    random_trace_power,
    random_tuple,
    random_zero_roabp,
    zero_diagonal,
)
from conjugacy_pit.hasse import (
    chain_rule_expansion,
    hasse_directional,
    hasse_iterated,
    product_rule_expansion,
)
from conjugacy_pit.invariants import (
    OrbitDecision,
    build_f_ell_roabp,
    conjugate,
    invariant_abp,
    orbit_closure_intersects,
    trace_word_oracle,
)
from conjugacy_pit.pit import MonomialWitness, bruteforce_zero_test, whitebox_roabp_zero_test

Check = Callable[[random.Random], None]


def whitebox_matches_expansion(rng: random.Random):
    """White-box ROABP verdict and witness against the expanded polynomial."""
    width, depth, degree_bound = rng.randint(1, 3), rng.randint(1, 3), rng.randint(1, 3)
    if rng.random() < 0.5:
        p = random_zero_roabp(rng, width, depth, degree_bound)
    else:
        p = random_roabp(rng, width, depth, degree_bound)
    expanded = expand_roabp(p)
    verdict = whitebox_roabp_zero_test(p)
    assert verdict.is_zero == bruteforce_zero_test(expanded).is_zero
    if not verdict.is_zero:
        assert isinstance(verdict.witness, MonomialWitness)
        assert expanded.coeff(verdict.witness.monomial) == verdict.witness.coefficient != 0


def trace_power_round_trip(rng: random.Random):
    """ABP to trace power and back preserves the polynomial."""
    p = random_abp(rng, rng.randint(1, 3), rng.randint(1, 2), rng.randint(1, 3))
    t = abp_to_trace_power(p)
    assert expand_trace_power(t) == expand_abp(p)
    assert expand_abp(trace_power_to_abp(t)) == expand_abp(p)


def roabp_as_abp(rng: random.Random):
    """An ROABP rewritten with affine layers computes the same polynomial."""
    p = random_roabp(rng, rng.randint(1, 3), rng.randint(1, 3), rng.randint(1, 3))
    assert expand_abp(roabp_to_abp(p)) == expand_roabp(p)


def diagonal_matches_expansion(rng: random.Random):
    """Small-support hitting set verdict against the expanded circuit."""
    nvars, degree = rng.randint(1, 4), rng.randint(1, 3)
    if rng.random() < 0.2:
        c = zero_diagonal(rng, nvars, degree, rng.randint(1, 2))
    else:
        c = random_diagonal(rng, nvars, degree, rng.randint(1, 3))
    assert blackbox_zero_test_diagonal(c).is_zero == expand_diagonal(c).is_zero()


def closure_matches_word_traces(rng: random.Random):
    """Orbit-closure decision against brute-force word traces up to length ``n^2``."""
    r = rng.randint(1, 2)
    match rng.randrange(3):
        case 0:
            a, b, _ = conjugate_pair(rng, 2, r)
        case 1:
            a, b = random_tuple(rng, 2, r), random_tuple(rng, 2, r)
        case _:
            a, b = closure_equal_pair(rng, 2, r)
    verdict = orbit_closure_intersects(a, b)
    expected = trace_word_oracle(a, b, 4)
    assert (verdict.decision == OrbitDecision.intersecting) == expected


def coefficients_are_word_traces(rng: random.Random):
    """Each coefficient of ``f_l(A, x)`` is the trace of the matching word."""
    a = random_tuple(rng, 2, 2)
    ell = rng.randint(1, 3)
    expanded = expand_roabp(build_f_ell_roabp(a, ell))
    for word in product(range(a.r), repeat=ell):
        trace = Matrix.identity(a.n)
        for i in word:
            trace = trace @ a[i]
        assert expanded.coeff(Monomial.from_vector(word)) == trace.trace()
    assert all(max(m.to_vector(ell)) < a.r for m in expanded.terms)


def invariants_survive_conjugation(rng: random.Random):
    """``f_l(M, alpha)`` takes the same value on ``A`` and ``P A P^-1``."""
    a = random_tuple(rng, 2, 2)
    ell = rng.randint(1, 4)
    alpha = [random_scalar(rng) for _ in range(ell)]
    abp = invariant_abp(alpha, ell, a.n, a.r)
    b = conjugate(a, random_invertible(rng, a.n))
    assert eval_abp(abp, a.entries()) == eval_abp(abp, b.entries())


def _small_hasse_instance(rng: random.Random):
    nvars = rng.randint(1, 2)
    f = random_poly(rng, nvars, 3, 4)
    u = [random_scalar(rng, -2, 2) for _ in range(nvars)]
    return f, u, rng.randint(0, 3)


def product_rule(rng: random.Random):
    """``D^k(fg)`` equals the sum of ``D^i(f) D^{k-i}(g)``."""
    f, u, k = _small_hasse_instance(rng)
    g = random_poly(rng, f.nvars, 2, 3)
    assert hasse_directional(f * g, u, k) == product_rule_expansion(f, g, u, k)


def chain_rule(rng: random.Random):
    """``D^k(f o g)`` equals its chain-rule expansion."""
    f, u, k = _small_hasse_instance(rng)
    inner = rng.randint(1, 2)
    gs = [random_poly(rng, inner, 2, 3) for _ in range(f.nvars)]
    u = [random_scalar(rng, -2, 2) for _ in range(inner)]
    assert hasse_directional(f.compose(gs), u, k) == chain_rule_expansion(f, gs, u, k)


def iterated_derivatives(rng: random.Random):
    """``D^a D^b f = C(a + b, a) D^{a+b} f``."""
    f, u, a = _small_hasse_instance(rng)
    b = rng.randint(0, 3)
    assert hasse_iterated(f, [(u, a), (u, b)]) == hasse_directional(f, u, a + b).scale(
        comb(a + b, a)
    )


def homogenized_queries(rng: random.Random):
    """Query-only homogenized values against the explicitly homogenized trace power."""
    nvars = rng.randint(1, 3)
    t = random_trace_power(rng, nvars, rng.randint(1, 2), rng.randint(1, 3))
    alpha = [random_scalar(rng) for _ in range(nvars)]
    beta = 0 if rng.random() < 0.2 else random_scalar(rng)
    assert homogenized_trace_query(t, alpha, beta) == eval_trace_power(
        homogenize(t), alpha + [beta]
    )


SUITES: Dict[str, List[Check]] = {
    "expansion": [
        whitebox_matches_expansion,
        trace_power_round_trip,
        roabp_as_abp,
        diagonal_matches_expansion,
    ],
    "word-trace": [
        closure_matches_word_traces,
        coefficients_are_word_traces,
        invariants_survive_conjugation,
    ],
    "hasse": [product_rule, chain_rule, iterated_derivatives],
    "homogenization": [homogenized_queries],
}
