"""Skew-symmetric linear matrix pencils and their pfaffian calculus.

A :class:`SkewPencil` is ``A(x) = x0*A0 + x1*A1 + x2*A2`` with skew
2d-by-2d coefficient matrices.  The sign convention is fixed by
``Pf [[0, 1], [-1, 0]] = +1`` and ``Pf(empty) = 1``; every identity in
this module (adjoint, derivative expansion, scaling law) is stated and
tested relative to that choice.

Two independent pfaffian routes are provided: recursive expansion along
the first surviving row (memoized on the index subset) and summation
over perfect matchings with explicit permutation signs.  The second is
slower and exists as an oracle for the first.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RankDeficiency, SingularTransform, SkewSymmetryViolation
from .poly import HomPoly, LinearForm, ProjPoint
from .tolerances import DEFAULT_POLICY, TolerancePolicy, require_finite_array


def _as_square(a, name: str) -> np.ndarray:
    m = np.array(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    require_finite_array(m)
    return m


def _check_skew(m: np.ndarray, name: str, tol: float) -> None:
    dev = np.max(np.abs(m + m.T)) if m.size else 0.0
    if dev > tol * max(1.0, float(np.max(np.abs(m))) if m.size else 1.0):
        raise SkewSymmetryViolation(f"{name} deviates from skew-symmetry by {dev:.3g}")


class SkewPencil:
    """Linear pencil of skew-symmetric matrices.

    The coefficient of ``x1`` plays the role of ``sigma2``, the
    coefficient of ``x2`` is ``-sigma1`` and the coefficient of ``x0``
    is the affine constant part ``gamma``, matching the affine chart
    ``x0 = 1`` used by the elementary transformations.
    """

    __slots__ = ("half_deg", "A0", "A1", "A2", "_pf")

    def __init__(self, A0, A1, A2, policy: TolerancePolicy = DEFAULT_POLICY):
        A0 = _as_square(A0, "A0")
        A1 = _as_square(A1, "A1")
        A2 = _as_square(A2, "A2")
        n = A0.shape[0]
        if A1.shape[0] != n or A2.shape[0] != n:
            raise ValueError("coefficient matrices must share one dimension")
        if n % 2 or n == 0:
            raise ValueError(f"dimension must be even and positive, got {n}")
        for m, name in ((A0, "A0"), (A1, "A1"), (A2, "A2")):
            _check_skew(m, name, policy.zero_tol)
            m.setflags(write=False)
        object.__setattr__(self, "half_deg", n // 2)
        object.__setattr__(self, "A0", A0)
        object.__setattr__(self, "A1", A1)
        object.__setattr__(self, "A2", A2)
        object.__setattr__(self, "_pf", None)

    def __setattr__(self, name, value):
        raise AttributeError("SkewPencil is immutable")

    @property
    def dim(self) -> int:
        return 2 * self.half_deg

    @property
    def gamma(self) -> np.ndarray:
        return self.A0

    @property
    def sigma1(self) -> np.ndarray:
        return -self.A2

    @property
    def sigma2(self) -> np.ndarray:
        return self.A1

    def entry(self, i: int, j: int) -> LinearForm:
        return LinearForm(self.A0[i, j], self.A1[i, j], self.A2[i, j])

    def __call__(self, pt) -> np.ndarray:
        x = pt.coords if isinstance(pt, ProjPoint) else np.asarray(pt, dtype=complex)
        return x[0] * self.A0 + x[1] * self.A1 + x[2] * self.A2

    def scale(self) -> float:
        return max(float(np.max(np.abs(m))) for m in (self.A0, self.A1, self.A2))

    def with_gamma(self, new_A0, policy: TolerancePolicy = DEFAULT_POLICY) -> "SkewPencil":
        """Same ``x1``/``x2`` parts, new constant part."""
        return SkewPencil(new_A0, self.A1, self.A2, policy=policy)

    @staticmethod
    def from_entry_forms(forms: list[list[LinearForm]],
                         policy: TolerancePolicy = DEFAULT_POLICY) -> "SkewPencil":
        """Build from a full square grid of linear forms (must be skew)."""
        n = len(forms)
        A = [np.zeros((n, n), dtype=complex) for _ in range(3)]
        for i in range(n):
            for j in range(n):
                f = forms[i][j]
                A[0][i, j], A[1][i, j], A[2][i, j] = f.c0, f.c1, f.c2
        return SkewPencil(A[0], A[1], A[2], policy=policy)

    def pfaffian(self) -> HomPoly:
        """Symbolic pfaffian, a homogeneous polynomial of degree ``half_deg``."""
        if self._pf is None:
            entry = {(i, j): self.entry(i, j).as_poly()
                     for i in range(self.dim) for j in range(i + 1, self.dim)}
            pf = _pfaffian_expand(entry, tuple(range(self.dim)),
                                  HomPoly.constant(1.0), self.half_deg)
            object.__setattr__(self, "_pf", pf)
        return self._pf


@dataclass(frozen=True)
class DetRep:
    """A d-by-d matrix of linear forms (no symmetry imposed)."""

    M0: np.ndarray
    M1: np.ndarray
    M2: np.ndarray

    def __post_init__(self):
        for name in ("M0", "M1", "M2"):
            m = _as_square(getattr(self, name), name)
            m.setflags(write=False)
            object.__setattr__(self, name, m)
        if not (self.M0.shape == self.M1.shape == self.M2.shape):
            raise ValueError("coefficient matrices must share one dimension")

    @property
    def size(self) -> int:
        return self.M0.shape[0]

    def __call__(self, pt) -> np.ndarray:
        x = pt.coords if isinstance(pt, ProjPoint) else np.asarray(pt, dtype=complex)
        return x[0] * self.M0 + x[1] * self.M1 + x[2] * self.M2

    def scale(self) -> float:
        return max(float(np.max(np.abs(m))) for m in (self.M0, self.M1, self.M2))

    def transpose(self) -> "DetRep":
        return DetRep(self.M0.T, self.M1.T, self.M2.T)

    def is_symmetric(self, policy: TolerancePolicy = DEFAULT_POLICY) -> bool:
        s = max(self.scale(), 1.0)
        return all(np.max(np.abs(m - m.T)) <= policy.zero_tol * s
                   for m in (self.M0, self.M1, self.M2))

    def entry(self, i: int, j: int) -> LinearForm:
        return LinearForm(self.M0[i, j], self.M1[i, j], self.M2[i, j])

    def det_poly(self) -> HomPoly:
        """Symbolic determinant by Laplace expansion, memoized on row subsets."""
        d = self.size
        memo: dict[tuple[int, ...], HomPoly] = {}

        def rec(rows: tuple[int, ...]) -> HomPoly:
            if not rows:
                return HomPoly.constant(1.0)
            if rows in memo:
                return memo[rows]
            col = d - len(rows)
            total = HomPoly.zero(len(rows))
            for pos, r in enumerate(rows):
                sub = rec(tuple(x for x in rows if x != r))
                term = self.entry(r, col).as_poly() * sub
                total = total + (term if pos % 2 == 0 else -term)
            memo[rows] = total
            return total

        return rec(tuple(range(d)))


@dataclass(frozen=True)
class KernelBasis:
    """Orthonormal basis of the two-dimensional kernel at a curve point.

    ``vectors`` has the two basis vectors as columns; ``residual`` is the
    largest ratio ``|A(pt) v| / sigma_max``.
    """

    point: ProjPoint
    vectors: np.ndarray
    residual: float

    @property
    def v1(self) -> np.ndarray:
        return self.vectors[:, 0]

    @property
    def v2(self) -> np.ndarray:
        return self.vectors[:, 1]


# -- pfaffian engines ----------------------------------------------------------

def _pfaffian_expand(entry, indices, one, half_deg):
    """Recursive expansion along the first surviving index.

    ``entry`` maps ordered pairs ``(i, j)`` with ``i < j`` to ring
    elements supporting ``+``, ``-`` and ``*``; ``one`` is the ring unit.
    """
    memo = {}

    def rec(s):
        if not s:
            return one
        if s in memo:
            return memo[s]
        i = s[0]
        total = None
        for m in range(1, len(s)):
            j = s[m]
            rest = tuple(k for k in s if k != i and k != j)
            term = entry[(i, j)] * rec(rest)
            if m % 2 == 0:
                term = -term
            total = term if total is None else total + term
        memo[s] = total
        return total

    return rec(tuple(indices))


def pfaffian_numeric(A: np.ndarray) -> complex:
    """Pfaffian of a constant skew matrix by the same row-expansion."""
    n = A.shape[0]
    if n % 2:
        return 0j
    entry = {(i, j): complex(A[i, j]) for i in range(n) for j in range(i + 1, n)}
    return complex(_pfaffian_expand(entry, tuple(range(n)), 1.0 + 0j, n // 2))


def _matchings(items: tuple[int, ...]):
    if not items:
        yield ()
        return
    first = items[0]
    for k in range(1, len(items)):
        rest = tuple(x for x in items[1:] if x != items[k])
        for m in _matchings(rest):
            yield ((first, items[k]),) + m


def _perm_sign(perm: list[int]) -> int:
    inv = 0
    for a in range(len(perm)):
        for b in range(a + 1, len(perm)):
            if perm[a] > perm[b]:
                inv += 1
    return -1 if inv % 2 else 1


def pfaffian_by_matchings(P: SkewPencil) -> HomPoly:
    """Pfaffian as a signed sum over perfect matchings (oracle route)."""
    n = P.dim
    entry = {(i, j): P.entry(i, j).as_poly() for i in range(n) for j in range(i + 1, n)}
    total = HomPoly.zero(P.half_deg)
    for m in _matchings(tuple(range(n))):
        perm = [i for pair in m for i in pair]
        term = HomPoly.constant(float(_perm_sign(perm)))
        for (i, j) in m:
            term = term * entry[(i, j)]
        total = total + term
    return total


def pfaffian_numeric_by_matchings(A: np.ndarray) -> complex:
    n = A.shape[0]
    if n % 2:
        return 0j
    total = 0j
    for m in _matchings(tuple(range(n))):
        perm = [i for pair in m for i in pair]
        prod = complex(_perm_sign(perm))
        for (i, j) in m:
            prod *= A[i, j]
        total += prod
    return total


# -- derived operations ---------------------------------------------------------

def pfaffian_minor(P: SkewPencil, i: int, j: int) -> HomPoly:
    """Pfaffian of the pencil with rows and columns ``i`` and ``j`` removed.

    Indices are zero-based.  All minors of a 2x2 pencil are the constant
    one, by the convention ``Pf(empty) = 1``.
    """
    n = P.dim
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"indices ({i}, {j}) out of range for dimension {n}")
    if i == j:
        raise IndexError("minor indices must differ")
    keep = tuple(k for k in range(n) if k not in (i, j))
    entry = {(a, b): P.entry(a, b).as_poly() for a in keep for b in keep if a < b}
    return _pfaffian_expand(entry, keep, HomPoly.constant(1.0), P.half_deg - 1)


def pfaffian_adjoint_at(P: SkewPencil, pt) -> np.ndarray:
    """Skew matrix of signed minors of ``A(pt)``.

    Entry ``(i, j)`` for ``i < j`` is ``(-1)^(i+j) Pf^{ij}`` in one-based
    index parity, which makes ``adj(pt) @ A(pt) = Pf A(pt) * Id`` hold.
    """
    A = P(pt)
    n = P.dim
    memo: dict[tuple[int, ...], complex] = {}

    def rec(s: tuple[int, ...]) -> complex:
        if not s:
            return 1.0 + 0j
        if s in memo:
            return memo[s]
        i = s[0]
        total = 0j
        for m in range(1, len(s)):
            j = s[m]
            rest = tuple(k for k in s if k != i and k != j)
            sgn = 1.0 if m % 2 == 1 else -1.0
            total += sgn * A[i, j] * rec(rest)
        memo[s] = total
        return total

    adj = np.zeros((n, n), dtype=complex)
    full = tuple(range(n))
    for i in range(n):
        for j in range(i + 1, n):
            minor = rec(tuple(k for k in full if k not in (i, j)))
            val = (-1) ** (i + j) * minor
            adj[i, j] = val
            adj[j, i] = -val
    return adj


def kernel_at(P: SkewPencil, pt: ProjPoint,
              policy: TolerancePolicy = DEFAULT_POLICY) -> KernelBasis:
    """Orthonormal basis of the kernel of ``A(pt)``, which must be 2-dimensional.

    Raises :class:`RankDeficiency` when the numerical corank differs from
    two: corank zero means the point is off the curve, corank above two
    signals a singular curve point or a defective representation.  The
    basis is gauged so each vector's largest-modulus entry is real and
    positive, giving a reproducible representative.
    """
    A = P(pt)
    _, s, vh = np.linalg.svd(A)
    smax = float(s[0]) if s[0] > 0 else 1.0
    corank = int(np.sum(s <= policy.rank_tol * smax))
    if corank != 2:
        raise RankDeficiency(
            f"kernel at {pt} has corank {corank}, expected 2", corank=corank)
    vecs = vh[-2:].conj().T
    for k in range(2):
        imax = int(np.argmax(np.abs(vecs[:, k])))
        phase = vecs[imax, k]
        vecs[:, k] *= np.conj(phase) / abs(phase)
    residual = float(np.max(np.abs(A @ vecs)) / smax)
    vecs.setflags(write=False)
    return KernelBasis(point=pt, vectors=vecs, residual=residual)


def congruence(P: SkewPencil, X: np.ndarray,
               policy: TolerancePolicy = DEFAULT_POLICY) -> SkewPencil:
    """The pencil ``X A X^t``; its pfaffian is ``det X`` times the old one."""
    X = _as_square(X, "X")
    if X.shape[0] != P.dim:
        raise ValueError("transform dimension mismatch")
    if abs(np.linalg.det(X)) <= policy.zero_tol:
        raise SingularTransform("congruence matrix is numerically singular")
    return SkewPencil(X @ P.A0 @ X.T, X @ P.A1 @ X.T, X @ P.A2 @ X.T, policy=policy)


def decomposable_from(M: DetRep, policy: TolerancePolicy = DEFAULT_POLICY) -> SkewPencil:
    """The block pencil ``[[0, M], [-M^t, 0]]`` of a determinantal representation."""
    d = M.size
    A = []
    for Mk in (M.M0, M.M1, M.M2):
        blk = np.zeros((2 * d, 2 * d), dtype=complex)
        blk[:d, d:] = Mk
        blk[d:, :d] = -Mk.T
        A.append(blk)
    return SkewPencil(*A, policy=policy)


def wedge_to_matrix(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """The rank-at-most-2 skew matrix with entries ``u_i v_j - u_j v_i``."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    return np.outer(u, v) - np.outer(v, u)
