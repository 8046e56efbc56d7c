"""Shared fixtures and seeded random generators for the test suite."""

import random
from fractions import Fraction

import pytest

from starcomplex import (
    AffineDiffeo,
    Cochain,
    FormalSymbol,
    GaussianRational,
    PolyFunction,
    XiPolynomial,
    enumerate_tuples,
    permutation_action_s3,
    rotation_action_z3,
    sign_action_z2,
    trivial_action,
    z2_group,
)
from starcomplex.groups import cyclic_group


def rand_scalar(rng, with_i=True):
    re = Fraction(rng.randint(-4, 4), rng.choice([1, 1, 2, 3]))
    im = Fraction(rng.randint(-3, 3), rng.choice([1, 2])) if with_i else 0
    return GaussianRational(re, im)


def rand_poly(rng, dimension, max_degree, max_terms=3):
    terms = {}
    for _ in range(rng.randint(0, max_terms)):
        beta = tuple(rng.randint(0, max_degree) for _ in range(dimension))
        if sum(beta) > max_degree:
            continue
        terms[beta] = rand_scalar(rng)
    return PolyFunction(dimension, terms)


def rand_nonzero_poly(rng, dimension, max_degree):
    while True:
        p = rand_poly(rng, dimension, max_degree)
        if p:
            return p


def rand_xi_poly(rng, dimension, xi_cap, max_degree, max_terms=3):
    terms = {}
    for _ in range(rng.randint(0, max_terms)):
        alpha = tuple(rng.randint(0, xi_cap) for _ in range(dimension))
        if sum(alpha) > xi_cap:
            continue
        p = rand_poly(rng, dimension, max_degree)
        if p:
            terms[alpha] = p
    return XiPolynomial(dimension, terms)


def rand_symbol(rng, dimension, order, max_degree):
    return FormalSymbol(
        dimension, order,
        [rand_xi_poly(rng, dimension, n, max_degree) for n in range(order + 1)],
    )


def rand_cochain(rng, action, degree, order, max_degree):
    return Cochain(
        action, degree, order,
        {
            t: rand_symbol(rng, action.dimension, order, max_degree)
            for t in enumerate_tuples(action.group, degree)
        },
    )


def rand_affine(rng, dimension):
    from starcomplex.errors import SingularMatrix

    while True:
        matrix = [
            [Fraction(rng.randint(-2, 2), rng.choice([1, 2])) for _ in range(dimension)]
            for _ in range(dimension)
        ]
        offset = [Fraction(rng.randint(-2, 2)) for _ in range(dimension)]
        try:
            return AffineDiffeo(matrix, offset)
        except SingularMatrix:
            continue


@pytest.fixture
def rng():
    return random.Random(20260808)


@pytest.fixture(scope="session")
def z2_sign():
    return sign_action_z2()


@pytest.fixture(scope="session")
def z3_rot():
    return rotation_action_z3()


@pytest.fixture(scope="session")
def s3_perm():
    return permutation_action_s3()


@pytest.fixture(scope="session")
def z2_trivial():
    return trivial_action(z2_group(), 1)


@pytest.fixture(scope="session")
def z3_trivial():
    return trivial_action(cyclic_group(3), 1)
