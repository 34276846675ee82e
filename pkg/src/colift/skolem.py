"""Conjugator recovery for matrix-algebra automorphisms at finite rank.

An automorphism of Mat_n over a field Z/p (or over Z, for exactness tests)
is determined by its values on the matrix units E_ij.  Given those values,
this module checks the algebra-automorphism invariants, recovers an
invertible U with phi = conjugation-by-U, and certifies that the center of
Mat_n consists exactly of the scalar matrices.  U is unique up to a central
unit.

Matrices here are dense tuples of ints (residues in [0, p) for Z/p);
mod-p bulk checks go through numpy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import rings
from .rings import RingDescriptor, RingElement


class SkolemError(Exception):
    pass


class SpecInvariantError(SkolemError):
    """The unit images do not define an algebra automorphism."""


class ObstructionError(SkolemError):
    """The projector images are not free of rank one, so no single
    conjugator exists over this ring (only a locally trivial one)."""


def _check_ring(ring: RingDescriptor):
    if ring.kind == "integers":
        return
    if ring.kind == "residue" and rings._is_prime(ring.modulus):
        return
    raise SkolemError(
        f"conjugator recovery is implemented over Z and Z/p (prime); got {ring}")


# ---------------------------------------------------------------------------
# Small exact matrix helpers (ints; residues normalized mod p)
# ---------------------------------------------------------------------------

def _norm(ring, m):
    if ring.kind == "residue":
        p = ring.modulus
        return tuple(tuple(int(v) % p for v in row) for row in m)
    return tuple(tuple(int(v) for v in row) for row in m)


def _matmul(ring, a, b):
    n = len(a)
    if ring.kind == "residue":
        p = ring.modulus
        return tuple(tuple(
            sum(a[i][k] * b[k][j] for k in range(n)) % p for j in range(n))
            for i in range(n))
    return tuple(tuple(
        sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n))
        for i in range(n))


def _identity(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def _unit_matrix(n, i, j):
    return tuple(tuple(1 if (r, c) == (i, j) else 0 for c in range(n))
                 for r in range(n))


def _int_det(m) -> int:
    n = len(m)
    if n == 1:
        return m[0][0]
    total = 0
    for j in range(n):
        if m[0][j]:
            minor = tuple(row[:j] + row[j + 1:] for row in m[1:])
            term = m[0][j] * _int_det(minor)
            total += term if j % 2 == 0 else -term
    return total


def _int_adjugate(m):
    n = len(m)
    if n == 1:
        return ((1,),)
    out = [[0] * n for _ in range(n)]
    idx = tuple(range(n))
    for i in range(n):
        for j in range(n):
            minor = tuple(tuple(m[r][c] for c in idx if c != j)
                          for r in idx if r != i)
            cof = _int_det(minor)
            out[j][i] = cof if (i + j) % 2 == 0 else -cof
    return tuple(tuple(row) for row in out)


def matrix_inverse(ring: RingDescriptor, m):
    """Exact inverse; over Z the determinant must be a unit (+-1)."""
    n = len(m)
    if ring.kind == "residue":
        p = ring.modulus
        a = [list(row) + [1 if i == j else 0 for j in range(n)]
             for i, row in enumerate(m)]
        for col in range(n):
            pivot = next((r for r in range(col, n) if a[r][col] % p), None)
            if pivot is None:
                raise SkolemError("matrix is singular mod p")
            a[col], a[pivot] = a[pivot], a[col]
            inv = pow(a[col][col] % p, p - 2, p)
            a[col] = [(v * inv) % p for v in a[col]]
            for r in range(n):
                if r != col and a[r][col] % p:
                    f = a[r][col] % p
                    a[r] = [(v - f * w) % p for v, w in zip(a[r], a[col])]
        return tuple(tuple(row[n:]) for row in a)
    det = _int_det(m)
    if det not in (1, -1):
        raise SkolemError(f"determinant {det} is not a unit of Z")
    adj = _int_adjugate(m)
    return tuple(tuple(det * v for v in row) for row in adj)


def conjugate_unit(ring, u, u_inv, i, j):
    """u * E_ij * u^-1, computed as an outer product of a column and a row."""
    n = len(u)
    if ring.kind == "residue":
        p = ring.modulus
        return tuple(tuple((u[r][i] * u_inv[j][c]) % p for c in range(n))
                     for r in range(n))
    return tuple(tuple(u[r][i] * u_inv[j][c] for c in range(n))
                 for r in range(n))


# ---------------------------------------------------------------------------
# Specs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AlgebraAutoSpec:
    """The values phi(E_ij) of an automorphism of Mat_n on all matrix units."""

    n: int
    ring: RingDescriptor
    unit_images: tuple   # ((i, j, matrix), ...) in row-major unit order

    def image(self, i: int, j: int):
        return self._images[(i, j)]

    def __post_init__(self):
        object.__setattr__(self, "_images",
                           {(i, j): m for i, j, m in self.unit_images})
        if len(self._images) != self.n * self.n:
            raise SkolemError("need an image for every matrix unit")


def spec_from_conjugator(ring: RingDescriptor, u) -> AlgebraAutoSpec:
    """The spec of conjugation-by-u; the round-trip oracle for recovery."""
    _check_ring(ring)
    u = _norm(ring, u)
    n = len(u)
    u_inv = matrix_inverse(ring, u)
    images = tuple((i, j, conjugate_unit(ring, u, u_inv, i, j))
                   for i in range(n) for j in range(n))
    return AlgebraAutoSpec(n, ring, images)


@dataclass(frozen=True)
class Conjugator:
    """An invertible u with phi = conjugation-by-u on every matrix unit;
    unique up to a central unit (a scalar matrix)."""

    u: tuple
    ring: RingDescriptor
    scalar_ambiguity: str = ("determined up to multiplication by a central "
                             "unit (a unit scalar matrix)")


@dataclass(frozen=True)
class ValidationCheck:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def to_json(self):
        return [{"name": c.name, "passed": c.passed, "detail": c.detail}
                for c in self.checks]


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def central_scalar(m, ring: RingDescriptor) -> Optional[RingElement]:
    """The f with m = f * Id, if there is one.

    Equivalent to commuting with every matrix unit: all off-diagonal entries
    vanish and the diagonal is constant.
    """
    m = _norm(ring, m)
    n = len(m)
    f = m[0][0]
    for i in range(n):
        for j in range(n):
            if i == j:
                if m[i][j] != f:
                    return None
            elif m[i][j] != 0:
                return None
    return ring.from_int(f)


def validate_auto_spec(spec: AlgebraAutoSpec) -> ValidationReport:
    """Per-invariant report: idempotence, orthogonality, completeness, and
    the matrix-unit multiplication table."""
    n, ring = spec.n, spec.ring
    checks = []
    if ring.kind == "residue":
        p = ring.modulus
        q = np.zeros((n, n, n, n), dtype=np.int64)
        for i in range(n):
            for j in range(n):
                q[i, j] = np.array(spec.image(i, j), dtype=np.int64) % p
        diag = q[np.arange(n), np.arange(n)]           # (n, n, n)
        idem = np.all((np.matmul(diag, diag) - diag) % p == 0)
        prod = np.matmul(diag[:, None], diag[None, :]) % p   # (n, n, n, n)
        off = np.ones((n, n), dtype=bool)
        np.fill_diagonal(off, False)
        orth = np.all(prod[off] % p == 0)
        comp = np.all(diag.sum(axis=0) % p
                      == np.eye(n, dtype=np.int64))
        table = np.einsum("ijab,klbc->ijklac", q, q) % p
        expected = np.zeros_like(table)
        for i in range(n):
            for j in range(n):
                for l in range(n):
                    expected[i, j, j, l] = q[i, l]
        mult = np.all((table - expected) % p == 0)
    else:
        qs = {ij: spec.image(*ij) for ij in
              ((i, j) for i in range(n) for j in range(n))}
        diag = [qs[(i, i)] for i in range(n)]
        idem = all(_matmul(ring, d, d) == d for d in diag)
        orth = all(_matmul(ring, diag[i], diag[j]) == _norm(ring, [[0] * n] * n)
                   for i in range(n) for j in range(n) if i != j)
        total = [[sum(diag[t][i][j] for t in range(n)) for j in range(n)]
                 for i in range(n)]
        comp = _norm(ring, total) == _identity(n)
        zero = _norm(ring, [[0] * n] * n)
        mult = True
        for (i, j), a in qs.items():
            for (k, l), b in qs.items():
                want = qs[(i, l)] if j == k else zero
                if _matmul(ring, a, b) != want:
                    mult = False
    checks.append(ValidationCheck(
        "idempotence", bool(idem),
        "each projector image squares to itself" if idem
        else "some projector image is not idempotent"))
    checks.append(ValidationCheck(
        "orthogonality", bool(orth),
        "projector images are pairwise orthogonal" if orth
        else "some pair of projector images has nonzero product"))
    checks.append(ValidationCheck(
        "completeness", bool(comp),
        "projector images sum to the identity" if comp
        else "projector images do not sum to the identity"))
    checks.append(ValidationCheck(
        "unit_multiplication", bool(mult),
        "matrix-unit multiplication table is preserved" if mult
        else "multiplication table of unit images is wrong"))
    return ValidationReport(tuple(checks))


def _rank_one_generator(ring, q, index):
    """A generator of the column space of an idempotent q of rank one.

    Over a field: any nonzero column, normalized so its first nonzero entry
    is 1.  Over Z: the primitive vector obtained by dividing out the content
    (the image of an idempotent is a direct summand, so a primitive
    generator exists); failure reports the free-rank-one obstruction.
    """
    n = len(q)
    cols = [[q[i][j] for i in range(n)] for j in range(n)]
    col = next((c for c in cols if any(c)), None)
    if col is None:
        raise ObstructionError(
            f"projector image {index} is zero, not free of rank one")
    if ring.kind == "residue":
        p = ring.modulus
        lead = next(v for v in col if v % p)
        inv = pow(lead % p, p - 2, p)
        w = [(v * inv) % p for v in col]
    else:
        content = 0
        for v in col:
            content = math.gcd(content, v)
        w = [v // content for v in col]
        lead = next(v for v in w if v)
        if lead < 0:
            w = [-v for v in w]
    # every column must be a multiple of w, else the image has rank > 1
    for c in cols:
        if not _is_multiple(ring, c, w):
            raise ObstructionError(
                f"projector image {index} has rank > 1; its column space is "
                "not free of rank one")
    # w itself must lie in the image (q fixes its image)
    qw = _matvec(ring, q, w)
    if qw != w:
        raise ObstructionError(
            f"projector image {index} does not fix its normalized generator; "
            "its image is an invertible module that is not free")
    return w


def _matvec(ring, m, v):
    n = len(m)
    out = [sum(m[i][k] * v[k] for k in range(n)) for i in range(n)]
    if ring.kind == "residue":
        out = [x % ring.modulus for x in out]
    return out


def _is_multiple(ring, c, w):
    n = len(c)
    if not any(c):
        return True
    if ring.kind == "residue":
        p = ring.modulus
        i = next(i for i in range(n) if w[i] % p)
        factor = (c[i] * pow(w[i], p - 2, p)) % p
        return all((c[j] - factor * w[j]) % p == 0 for j in range(n))
    i = next(i for i in range(n) if w[i])
    if c[i] % w[i]:
        return False
    factor = c[i] // w[i]
    return all(c[j] == factor * w[j] for j in range(n))


def recover_conjugator(spec: AlgebraAutoSpec) -> Conjugator:
    """Recover u with phi = conjugation-by-u from the unit images.

    Steps: pick a generator of each projector image's column space; assemble
    them as the columns of a first candidate; conjugate back and read off
    the residual unit scalars on the off-diagonal matrix units; check their
    cocycle relation; absorb them into a diagonal correction based at the
    first index; verify the full conjugation identity.
    """
    _check_ring(spec.ring)
    ring, n = spec.ring, spec.n
    report = validate_auto_spec(spec)
    if not report.passed:
        failed = ", ".join(c.name for c in report.checks if not c.passed)
        raise SpecInvariantError(f"not an algebra automorphism: {failed} failed")

    generators = [_rank_one_generator(ring, spec.image(i, i), i)
                  for i in range(n)]
    u_prime = _norm(ring, [[generators[j][i] for j in range(n)]
                           for i in range(n)])
    u_prime_inv = matrix_inverse(ring, u_prime)   # invertible since the images span

    # phi'(E_ij) = U'^-1 phi(E_ij) U' must be s_ij * E_ij
    s = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            m = _matmul(ring, u_prime_inv,
                        _matmul(ring, spec.image(i, j), u_prime))
            for r in range(n):
                for c in range(n):
                    expected_zero = (r, c) != (i, j)
                    if expected_zero and m[r][c] != 0:
                        raise SpecInvariantError(
                            "normalized unit image is not a scalar multiple "
                            f"of a matrix unit at ({i},{j})")
            s[i][j] = m[i][j]

    # cocycle checks: s_ii = 1, every s a unit, s_ij s_jk = s_ik
    one = 1
    for i in range(n):
        if s[i][i] != one:
            raise SpecInvariantError("diagonal residual scalar is not 1")
    if ring.kind == "residue":
        p = ring.modulus
        if any(s[i][j] % p == 0 for i in range(n) for j in range(n)):
            raise SpecInvariantError("residual scalar is not a unit")
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if (s[i][j] * s[j][k] - s[i][k]) % p:
                        raise SpecInvariantError("residual scalars break the "
                                                 "cocycle relation")
    else:
        if any(s[i][j] not in (1, -1) for i in range(n) for j in range(n)):
            raise SpecInvariantError("residual scalar is not a unit of Z")
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if s[i][j] * s[j][k] != s[i][k]:
                        raise SpecInvariantError("residual scalars break the "
                                                 "cocycle relation")

    # diagonal correction based at index 0: d_i = s_{i,0}
    u_second = tuple(tuple(s[i][0] if i == j else 0 for j in range(n))
                     for i in range(n))
    u = _matmul(ring, u_prime, u_second)
    u_inv = matrix_inverse(ring, u)
    for i in range(n):
        for j in range(n):
            if conjugate_unit(ring, u, u_inv, i, j) != _norm(ring, spec.image(i, j)):
                raise SkolemError("final conjugation check failed at "
                                  f"unit ({i},{j})")
    return Conjugator(u, ring)


# ---------------------------------------------------------------------------
# JSON spec files
# ---------------------------------------------------------------------------

def spec_to_json(spec: AlgebraAutoSpec) -> dict:
    return {
        "n": spec.n,
        "ring": rings.descriptor_to_json(spec.ring),
        "images": {f"{i},{j}": [list(row) for row in m]
                   for i, j, m in spec.unit_images},
    }


def spec_from_json(data: dict) -> AlgebraAutoSpec:
    ring = rings.descriptor_from_json(data["ring"])
    n = int(data["n"])
    images = []
    for key, m in data["images"].items():
        i, j = (int(t) for t in key.split(","))
        images.append((i, j, _norm(ring, m)))
    images.sort(key=lambda t: (t[0], t[1]))
    return AlgebraAutoSpec(n, ring, tuple(images))
