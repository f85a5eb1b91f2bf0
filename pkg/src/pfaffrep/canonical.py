"""Canonical forms of pfaffian representations.

The first canonical form makes the ``x1`` coefficient block-diagonal
with 2x2 blocks ``[[0, 1], [-1, 0]]`` and the ``x2`` coefficient
block-diagonal with blocks ``[[0, -p_i], [p_i, 0]]``, one block per
intersection point ``(0, p_i, 1)`` of the curve with the line
``x0 = 0``.  The second canonical form regroups those blocks into
``A1 = [[0, Id], [-Id, 0]]`` and ``A2 = [[0, -D], [D, 0]]`` with
``D = diag(p_1 .. p_d)``, the shape that contains every decomposable
representation ``[[0, M], [-M^t, 0]]`` verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotInCanonicalForm, NotUnimodular, SpanFailure
from .pencil import SkewPencil, congruence
from .poly import roots_on_line
from .tolerances import DEFAULT_POLICY, TolerancePolicy

_I2 = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex)


@dataclass(frozen=True)
class CanonicalReport:
    roots: list[complex]
    basis_change: np.ndarray
    pencil: SkewPencil
    residual: float


@dataclass(frozen=True)
class StructureReport:
    is_decomposable_form: bool
    is_symmetric_blocks: bool
    free_parameter_count: int


def _canonical_block_residual(P: SkewPencil, roots) -> float:
    """Deviation of A1 and A2 from the first canonical block pattern."""
    d = P.half_deg
    scale = max(1.0, max(abs(p) for p in roots))
    dev = 0.0
    for i in range(d):
        s = slice(2 * i, 2 * i + 2)
        di = np.array([[0.0, -roots[i]], [roots[i], 0.0]], dtype=complex)
        dev = max(dev, float(np.max(np.abs(P.A1[s, s] - _I2))))
        dev = max(dev, float(np.max(np.abs(P.A2[s, s] - di))) / scale)
        for j in range(d):
            if j == i:
                continue
            t = slice(2 * j, 2 * j + 2)
            dev = max(dev, float(np.max(np.abs(P.A1[s, t]))))
            dev = max(dev, float(np.max(np.abs(P.A2[s, t]))) / scale)
    return dev


def to_canonical(P: SkewPencil, policy: TolerancePolicy = DEFAULT_POLICY,
                 seed: int = 0) -> CanonicalReport:
    """Congruence to the first canonical form.

    Requires the curve ``Pf A = 0`` to meet ``x0 = 0`` in ``half_deg``
    distinct points; each root contributes the 2-dimensional kernel of
    ``p_i A1 + A2``, and stacking those kernel bases (the second vector
    rescaled so the A1 block is exactly ``[[0, 1], [-1, 0]]``) gives the
    basis change.  Roots are sorted by (real, imaginary) part, which
    makes the report deterministic.
    """
    d = P.half_deg
    roots = roots_on_line(P.pfaffian(), policy)
    if len(roots) != d:
        raise SpanFailure(
            f"expected {d} intersection points with x0 = 0, found {len(roots)}")
    rng = np.random.default_rng(seed)
    rows = []
    a1_scale = max(float(np.max(np.abs(P.A1))), 1.0)
    for p in roots:
        N = p * P.A1 + P.A2
        _, s, vh = np.linalg.svd(N)
        smax = float(s[0]) if s[0] > 0 else 1.0
        corank = int(np.sum(s <= policy.rank_tol * smax))
        if corank != 2:
            raise SpanFailure(
                f"kernel at root {p:.6g} has dimension {corank}, expected 2")
        u, v = vh[-2].conj(), vh[-1].conj()
        pairing = u @ P.A1 @ v
        if abs(pairing) < policy.rank_tol * a1_scale:
            # unlucky orthonormal gauge: remix once with a random unitary
            g = _random_su2(rng)
            u, v = g[0, 0] * u + g[0, 1] * v, g[1, 0] * u + g[1, 1] * v
            pairing = u @ P.A1 @ v
            if abs(pairing) < policy.rank_tol * a1_scale:
                raise SpanFailure(
                    f"A1 pairing degenerates on the kernel at root {p:.6g}")
        rows.append(u)
        rows.append(v / pairing)
    B = np.array(rows)
    sv = np.linalg.svd(B, compute_uv=False)
    if sv[-1] <= policy.rank_tol * sv[0]:
        raise SpanFailure("union of point kernels does not span the full space")
    out = congruence(P, B, policy)
    residual = _canonical_block_residual(out, roots)
    B.setflags(write=False)
    return CanonicalReport(roots=roots, basis_change=B, pencil=out, residual=residual)


def _random_su2(rng) -> np.ndarray:
    z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    q, r = np.linalg.qr(z)
    q = q @ np.diag(np.exp(-1j * np.angle(np.diag(r))))
    return q / np.sqrt(np.linalg.det(q))


def validate_canonical(P: SkewPencil, policy: TolerancePolicy = DEFAULT_POLICY
                       ) -> list[complex]:
    """Check the first canonical block pattern; returns the roots read off A2."""
    d = P.half_deg
    roots = [complex(P.A2[2 * i + 1, 2 * i]) for i in range(d)]
    if _canonical_block_residual(P, roots) > policy.match_tol:
        raise NotInCanonicalForm("pencil is not in the first canonical form")
    return roots


def second_canonical_transform(d: int) -> np.ndarray:
    """The fixed basis change from the first to the second canonical form.

    Row ``i`` (0-based, i < d) is ``e_{2i} - e_{2i+1}``; row ``d+i`` is
    ``e_{2i+1}``.  Its determinant is ``(-1)^{d(d-1)/2}``.
    """
    Q = np.zeros((2 * d, 2 * d), dtype=complex)
    for i in range(d):
        Q[i, 2 * i] = 1.0
        Q[i, 2 * i + 1] = -1.0
        Q[d + i, 2 * i + 1] = 1.0
    return Q


def to_second_canonical(P: SkewPencil,
                        policy: TolerancePolicy = DEFAULT_POLICY) -> SkewPencil:
    """Regroup a first-canonical-form pencil into the second canonical form.

    The output has ``A1 = [[0, Id], [-Id, 0]]`` and
    ``A2 = [[0, -D], [D, 0]]`` with the same roots on the diagonal of
    ``D``.  The pfaffian picks up the factor ``det Q = (-1)^{d(d-1)/2}``,
    which is one only for ``d = 0, 1 (mod 4)``.
    """
    validate_canonical(P, policy)
    Q = second_canonical_transform(P.half_deg)
    out = congruence(P, Q, policy)
    validate_second_canonical(out, policy)
    return out


def validate_second_canonical(P: SkewPencil,
                              policy: TolerancePolicy = DEFAULT_POLICY
                              ) -> np.ndarray:
    """Check the second canonical block pattern; returns ``diag(D)``."""
    d = P.half_deg
    ps = np.diag(-P.A2[:d, d:]).copy()
    scale = max(1.0, float(np.max(np.abs(ps))) if ps.size else 1.0)
    J = np.zeros((2 * d, 2 * d), dtype=complex)
    J[:d, d:] = np.eye(d)
    J[d:, :d] = -np.eye(d)
    A2_expect = np.zeros((2 * d, 2 * d), dtype=complex)
    A2_expect[:d, d:] = -np.diag(ps)
    A2_expect[d:, :d] = np.diag(ps)
    dev = max(float(np.max(np.abs(P.A1 - J))),
              float(np.max(np.abs(P.A2 - A2_expect))) / scale)
    if dev > policy.match_tol:
        raise NotInCanonicalForm("pencil is not in the second canonical form")
    return ps


def gauge_action(P: SkewPencil, R_blocks: list[np.ndarray],
                 policy: TolerancePolicy = DEFAULT_POLICY) -> SkewPencil:
    """Block-diagonal congruence by 2x2 blocks of determinant one.

    This is the full stabilizer of the first canonical form: A1 and A2
    are unchanged and the constant part transforms blockwise by
    ``R_i * block_ij * R_j^t``.
    """
    d = P.half_deg
    if len(R_blocks) != d:
        raise ValueError(f"need {d} gauge blocks, got {len(R_blocks)}")
    validate_canonical(P, policy)
    X = np.zeros((2 * d, 2 * d), dtype=complex)
    for i, R in enumerate(R_blocks):
        R = np.asarray(R, dtype=complex)
        if R.shape != (2, 2):
            raise ValueError("gauge blocks must be 2x2")
        if abs(np.linalg.det(R) - 1.0) > policy.match_tol:
            raise NotUnimodular(f"gauge block {i} has determinant {np.linalg.det(R):.6g}")
        X[2 * i: 2 * i + 2, 2 * i: 2 * i + 2] = R
    return congruence(P, X, policy)


def off_pattern_blocks(gamma: np.ndarray, d: int) -> tuple[np.ndarray, np.ndarray]:
    """The two diagonal d-by-d blocks that vanish on decomposable pencils."""
    return gamma[:d, :d], gamma[d:, d:]


def off_pattern_norm(gamma: np.ndarray, d: int) -> float:
    top, bot = off_pattern_blocks(gamma, d)
    return float(np.sqrt(np.linalg.norm(top, "fro") ** 2
                         + np.linalg.norm(bot, "fro") ** 2))


def structure_report(P: SkewPencil,
                     policy: TolerancePolicy = DEFAULT_POLICY) -> StructureReport:
    """Classify a second-canonical-form pencil by the shape of its constant part.

    Decomposable means both diagonal d-by-d blocks of A0 vanish; the
    symmetric-block refinement additionally requires the off-diagonal
    block to be symmetric, the shape induced by symmetric determinantal
    representations.  The free parameter count ``3/2 d (d-3)`` counts
    the moduli left after the pfaffian constraints and the block gauge;
    it is meaningful for ``d >= 3``.
    """
    d = P.half_deg
    validate_second_canonical(P, policy)
    scale = max(P.scale(), 1.0)
    top, bot = off_pattern_blocks(P.A0, d)
    decomposable = (float(np.max(np.abs(top)) if top.size else 0.0) <= policy.match_tol * scale
                    and float(np.max(np.abs(bot)) if bot.size else 0.0) <= policy.match_tol * scale)
    C = P.A0[:d, d:]
    symmetric = decomposable and float(np.max(np.abs(C - C.T))) <= policy.match_tol * scale
    return StructureReport(
        is_decomposable_form=decomposable,
        is_symmetric_blocks=symmetric,
        free_parameter_count=3 * d * (d - 3) // 2,
    )
