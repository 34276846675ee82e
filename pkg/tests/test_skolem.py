import random

import pytest

from colift import rings, skolem
from colift.skolem import (AlgebraAutoSpec, ObstructionError, SkolemError,
                           SpecInvariantError, central_scalar,
                           matrix_inverse, recover_conjugator,
                           spec_from_conjugator, spec_from_json, spec_to_json,
                           validate_auto_spec)

Z = rings.integers()
Z5 = rings.residue(5)
Z101 = rings.residue(101)


def random_invertible(ring, n, rng):
    p = ring.modulus
    while True:
        m = tuple(tuple(rng.randrange(p) for _ in range(n)) for _ in range(n))
        try:
            matrix_inverse(ring, m)
            return m
        except SkolemError:
            continue


# ---------------------------------------------------------------------------
# central_scalar
# ---------------------------------------------------------------------------

def test_scalar_matrix_is_central():
    assert central_scalar([[3, 0, 0], [0, 3, 0], [0, 0, 3]], Z) == Z.from_int(3)


def test_matrix_unit_is_not_central():
    assert central_scalar([[0, 1], [0, 0]], Z) is None


def test_nonconstant_diagonal_is_not_central():
    assert central_scalar([[1, 0], [0, 2]], Z) is None


def test_central_scalar_commutes_with_all_units():
    # oracle: f*Id commutes with every matrix unit; random perturbations fail
    rng = random.Random(51)
    ring = Z5
    n = 3
    for _ in range(100):
        f = rng.randrange(5)
        m = [[f if i == j else 0 for j in range(n)] for i in range(n)]
        assert central_scalar(m, ring) == ring.from_int(f)
        i, j = rng.randrange(n), rng.randrange(n)
        m[i][j] = (m[i][j] + rng.randrange(1, 5)) % 5
        expect_scalar = all(m[a][b] == (m[0][0] if a == b else 0)
                            for a in range(n) for b in range(n))
        assert (central_scalar(m, ring) is not None) == expect_scalar


# ---------------------------------------------------------------------------
# validate_auto_spec
# ---------------------------------------------------------------------------

def test_identity_spec_validates():
    spec = spec_from_conjugator(Z5, ((1, 0), (0, 1)))
    report = validate_auto_spec(spec)
    assert report.passed
    assert [c.name for c in report.checks] == [
        "idempotence", "orthogonality", "completeness", "unit_multiplication"]


def test_non_idempotent_projector_detected():
    spec = spec_from_conjugator(Z5, ((1, 0), (0, 1)))
    images = dict(((i, j), m) for i, j, m in spec.unit_images)
    images[(0, 0)] = ((2, 0), (0, 0))       # 2 is not idempotent mod 5
    bad = AlgebraAutoSpec(2, Z5, tuple((i, j, m)
                                       for (i, j), m in sorted(images.items())))
    report = validate_auto_spec(bad)
    assert not report.checks[0].passed


def test_incomplete_projectors_detected():
    spec = spec_from_conjugator(Z5, ((1, 0), (0, 1)))
    images = dict(((i, j), m) for i, j, m in spec.unit_images)
    images[(1, 1)] = ((0, 0), (0, 0))
    bad = AlgebraAutoSpec(2, Z5, tuple((i, j, m)
                                       for (i, j), m in sorted(images.items())))
    report = validate_auto_spec(bad)
    assert not report.passed
    assert not report.checks[2].passed      # completeness


def test_recover_refuses_invalid_spec():
    spec = spec_from_conjugator(Z5, ((1, 0), (0, 1)))
    images = dict(((i, j), m) for i, j, m in spec.unit_images)
    images[(0, 1)] = ((0, 0), (1, 0))
    bad = AlgebraAutoSpec(2, Z5, tuple((i, j, m)
                                       for (i, j), m in sorted(images.items())))
    with pytest.raises(SpecInvariantError):
        recover_conjugator(bad)


# ---------------------------------------------------------------------------
# recover_conjugator
# ---------------------------------------------------------------------------

def test_identity_automorphism_recovers_identity():
    spec = spec_from_conjugator(Z5, ((1, 0), (0, 1)))
    conj = recover_conjugator(spec)
    assert conj.u == ((1, 0), (0, 1))


def test_recover_upper_triangular_example():
    u_true = ((1, 1), (0, 1))
    spec = spec_from_conjugator(Z5, u_true)
    assert spec.image(0, 0) == ((1, 4), (0, 0))
    conj = recover_conjugator(spec)
    u_inv = matrix_inverse(Z5, conj.u)
    for i in range(2):
        for j in range(2):
            assert skolem.conjugate_unit(Z5, conj.u, u_inv, i, j) \
                == spec.image(i, j)
    ratio = skolem._matmul(Z5, conj.u, matrix_inverse(Z5, u_true))
    assert central_scalar(ratio, Z5) is not None


def test_recover_over_z_with_unimodular_conjugator():
    u_true = ((1, 2), (0, 1))
    spec = spec_from_conjugator(Z, u_true)
    conj = recover_conjugator(spec)
    ratio = skolem._matmul(Z, conj.u, matrix_inverse(Z, u_true))
    assert central_scalar(ratio, Z) is not None


def test_matrix_unit_rigidity():
    """A spec fixing every matrix unit recovers a scalar (here the identity)."""
    n = 3
    images = tuple((i, j, skolem._unit_matrix(n, i, j))
                   for i in range(n) for j in range(n))
    spec = AlgebraAutoSpec(n, Z101, images)
    conj = recover_conjugator(spec)
    assert central_scalar(conj.u, Z101) is not None


def test_roundtrip_100_random_conjugators_mod_101():
    rng = random.Random(53)
    for _ in range(100):
        n = rng.randrange(2, 7)
        u_true = random_invertible(Z101, n, rng)
        spec = spec_from_conjugator(Z101, u_true)
        conj = recover_conjugator(spec)
        u_inv = matrix_inverse(Z101, conj.u)
        for i in range(n):
            for j in range(n):
                assert skolem.conjugate_unit(Z101, conj.u, u_inv, i, j) \
                    == spec.image(i, j)
        ratio = skolem._matmul(Z101, conj.u, matrix_inverse(Z101, u_true))
        assert central_scalar(ratio, Z101) is not None


def test_rank_obstruction_error_paths():
    # a rank-two idempotent and the zero projector both report the
    # free-rank-one obstruction rather than returning a wrong generator
    with pytest.raises(ObstructionError):
        skolem._rank_one_generator(Z, ((1, 0), (0, 1)), 0)
    with pytest.raises(ObstructionError):
        skolem._rank_one_generator(Z, ((0, 0), (0, 0)), 0)
    # sanity: the honest rank-one projector onto (1, 2) recovers its column
    q = ((1, 0), (2, 0))
    assert skolem._rank_one_generator(Z, q, 0) == [1, 2]


def test_ring_restriction():
    with pytest.raises(SkolemError):
        recover_conjugator(spec_from_conjugator(rings.residue(6), ((1, 0), (0, 1))))


def test_composite_modulus_rejected_early():
    with pytest.raises(SkolemError):
        spec_from_conjugator(rings.residue(4), ((1, 0), (0, 1)))


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def test_spec_json_roundtrip():
    rng = random.Random(59)
    u_true = random_invertible(Z101, 3, rng)
    spec = spec_from_conjugator(Z101, u_true)
    back = spec_from_json(spec_to_json(spec))
    assert back.n == spec.n and back.ring == spec.ring
    assert back.unit_images == spec.unit_images
