"""Geometry read off a representation: lines, tangents, point pairing.

Pairs of curve points are coupled through the parameter-independent
constant ``K`` built from the kernel vectors; its vanishing pattern over
the two kernel planes classifies the pair as inadmissible (all of K
vanishes), semiadmissible (rank one) or admissible (invertible), and in
the admissible case gives a one-to-one correspondence between kernel
directions at the two points.

Affine formulas live in the chart ``x0 = 1``; operations reject points
too close to the line ``x0 = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (DegenerateDenominator, NoAdmissiblePartner, PreconditionError,
                     SamePoint, VectorNotInKernel)
from .pencil import KernelBasis, SkewPencil, kernel_at
from .poly import HomPoly, LinearForm, ProjPoint, univariate_roots
from .tolerances import DEFAULT_POLICY, TolerancePolicy


@dataclass(frozen=True)
class CurvePoint:
    pt: ProjPoint
    curve_residual: float


def curve_point(F: HomPoly, pt: ProjPoint,
                policy: TolerancePolicy = DEFAULT_POLICY) -> CurvePoint:
    """Wrap a point after checking it lies on ``F = 0``."""
    res = abs(F(pt))
    bound = F.max_coeff() * max(1.0, float(np.max(np.abs(pt.coords)))) ** F.degree
    if res > policy.match_tol * bound:
        raise PreconditionError(f"point {pt} is off the curve (residual {res:.3g})")
    return CurvePoint(pt=pt, curve_residual=res)


def sample_curve_points(F: HomPoly, count: int, seed: int = 0,
                        policy: TolerancePolicy = DEFAULT_POLICY,
                        require_affine: bool = True) -> list[CurvePoint]:
    """Sample points of ``F = 0`` by intersecting with random lines.

    Lines pass through a fixed (seeded) interior point; roots along each
    line give curve points.  With ``require_affine`` points too close to
    ``x0 = 0`` are discarded, so the affine-chart operations apply.
    """
    rng = np.random.default_rng(seed)
    center = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    out: list[CurvePoint] = []
    attempts = 0
    while len(out) < count and attempts < 40 * (count + 1):
        attempts += 1
        direction = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        coeffs = F.restrict_line(center, direction)
        for t in univariate_roots(coeffs, policy):
            raw = center + t * direction
            if require_affine and abs(raw[0]) <= policy.rank_tol * np.max(np.abs(raw)):
                continue
            pt = ProjPoint(*raw, policy=policy)
            try:
                out.append(curve_point(F, pt, policy))
            except PreconditionError:
                continue
            if len(out) >= count:
                break
    if len(out) < count:
        raise PreconditionError(f"could not sample {count} curve points")
    return out


def line_through(P: SkewPencil, lam: ProjPoint, v: np.ndarray,
                 mu: ProjPoint, u: np.ndarray,
                 policy: TolerancePolicy = DEFAULT_POLICY) -> LinearForm:
    """The linear form ``x -> u^t A(x) v`` for kernel vectors at two points.

    If nonzero it vanishes at both points, hence cuts out the line
    through them; with ``lam == mu`` and independent vectors it is the
    tangent line at that point.  The zero form is a meaningful outcome
    (the vectors are then an inadmissible pair) and is returned, not
    raised.
    """
    _require_kernel(P, lam, v, policy)
    _require_kernel(P, mu, u, policy)
    return LinearForm(u @ P.A0 @ v, u @ P.A1 @ v, u @ P.A2 @ v)


def tangent_line(P: SkewPencil, lam: ProjPoint,
                 policy: TolerancePolicy = DEFAULT_POLICY) -> LinearForm:
    """Tangent line at a curve point, from the two kernel directions there."""
    kb = kernel_at(P, lam, policy)
    return line_through(P, lam, kb.v2, lam, kb.v1, policy)


def _require_kernel(P: SkewPencil, pt: ProjPoint, v: np.ndarray,
                    policy: TolerancePolicy) -> None:
    A = P(pt)
    nv = float(np.linalg.norm(v))
    if nv == 0.0:
        raise VectorNotInKernel("zero vector")
    res = float(np.linalg.norm(A @ v)) / (np.linalg.norm(A, 2) * nv)
    if res > policy.rank_tol:
        raise VectorNotInKernel(f"vector fails A(pt) v = 0 at {pt} (residual {res:.3g})")


def k_constant(P: SkewPencil, lam: ProjPoint, v: np.ndarray,
               mu: ProjPoint, u: np.ndarray, t1: complex, t2: complex,
               policy: TolerancePolicy = DEFAULT_POLICY,
               check_kernels: bool = True) -> complex:
    """The coupling constant of kernel vectors at two distinct points.

    ``K = v^t (t1 sigma1 + t2 sigma2) u / (t1 (l1-m1) + t2 (l2-m2))`` in
    the affine chart; the value does not depend on ``(t1, t2)`` as long
    as the denominator stays away from zero.
    """
    if lam.close_to(mu, policy):
        raise SamePoint("the two points coincide")
    if check_kernels:
        _require_kernel(P, lam, v, policy)
        _require_kernel(P, mu, u, policy)
    l1, l2 = lam.affine(policy)
    m1, m2 = mu.affine(policy)
    den = t1 * (l1 - m1) + t2 * (l2 - m2)
    scale = max(abs(t1), abs(t2)) * max(abs(l1 - m1), abs(l2 - m2), policy.zero_tol)
    if abs(den) <= policy.rank_tol * scale:
        raise DegenerateDenominator(
            f"direction ({t1:.3g}, {t2:.3g}) annihilates the point difference")
    num = v @ (t1 * P.sigma1 + t2 * P.sigma2) @ u
    return complex(num / den)


_KINDS = ("inadmissible", "semiadmissible", "admissible")


@dataclass(frozen=True)
class PairClassification:
    kind: str
    kappa: np.ndarray
    basis_lambda: KernelBasis
    basis_mu: KernelBasis
    special_vectors: tuple[np.ndarray, np.ndarray] | None

    def partner_direction(self, v_coeffs: np.ndarray) -> np.ndarray:
        """For an admissible pair: the kernel direction at mu coupled to
        ``v = basis_lambda.vectors @ v_coeffs`` by ``K(v, u) = 0``."""
        if self.kind != "admissible":
            raise PreconditionError("partner directions need an admissible pair")
        row = np.asarray(v_coeffs, dtype=complex) @ self.kappa
        u_coeffs = np.array([row[1], -row[0]])
        u_coeffs /= np.linalg.norm(u_coeffs)
        return self.basis_mu.vectors @ u_coeffs


def classify_pair(P: SkewPencil, lam: ProjPoint, mu: ProjPoint,
                  seed: int = 0,
                  policy: TolerancePolicy = DEFAULT_POLICY) -> PairClassification:
    """Classify a distinct pair of curve points by the rank of K over the kernels.

    The 2x2 matrix ``kappa[i][j] = K(b_i, c_j)`` over orthonormal kernel
    bases has numerical rank 0, 1 or 2; for rank 1 the two null
    directions (``y kappa = 0`` and ``kappa x = 0``, plain transpose
    since K is bilinear) give the unique special vector pair.
    """
    if lam.close_to(mu, policy):
        raise SamePoint("classification needs two distinct points")
    kb_l = kernel_at(P, lam, policy)
    kb_m = kernel_at(P, mu, policy)
    rng = np.random.default_rng(seed)
    t1 = t2 = None
    for _ in range(8):
        cand = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        try:
            k_constant(P, lam, kb_l.v1, mu, kb_m.v1, cand[0], cand[1],
                       policy, check_kernels=False)
        except DegenerateDenominator:
            continue
        t1, t2 = cand
        break
    if t1 is None:
        raise DegenerateDenominator("no usable direction found")
    kappa = np.empty((2, 2), dtype=complex)
    for i, b in enumerate((kb_l.v1, kb_l.v2)):
        for j, c in enumerate((kb_m.v1, kb_m.v2)):
            kappa[i, j] = k_constant(P, lam, b, mu, c, t1, t2, policy,
                                     check_kernels=False)
    opscale = max(np.linalg.norm(P.sigma1, 2), np.linalg.norm(P.sigma2, 2))
    l1, l2 = lam.affine(policy)
    m1, m2 = mu.affine(policy)
    ref = opscale / max(abs(l1 - m1), abs(l2 - m2), policy.zero_tol)
    sv = np.linalg.svd(kappa, compute_uv=False)
    special = None
    if sv[0] <= policy.rank_tol * ref:
        kind = "inadmissible"
    elif sv[1] <= policy.rank_tol * sv[0]:
        kind = "semiadmissible"
        y = _null_direction(kappa.T)
        x = _null_direction(kappa)
        special = (kb_l.vectors @ y, kb_m.vectors @ x)
    else:
        kind = "admissible"
    kappa.setflags(write=False)
    return PairClassification(kind=kind, kappa=kappa, basis_lambda=kb_l,
                              basis_mu=kb_m, special_vectors=special)


def _null_direction(m: np.ndarray) -> np.ndarray:
    _, _, vh = np.linalg.svd(m)
    return vh[-1].conj()


def partner_points(P: SkewPencil, lam: ProjPoint, v: np.ndarray, u: np.ndarray,
                   policy: TolerancePolicy = DEFAULT_POLICY) -> list[CurvePoint]:
    """Points ``mu`` on the curve with ``u`` in the kernel there, coupled to ``v``.

    Candidate points sit on the parametrized line
    ``mu_i(s) = lam_i - s * (v^t sigma_i u)``; substituting into the
    curve equation leaves a univariate polynomial with at most
    ``half_deg`` roots.  Every returned point is re-verified on the
    curve and against ``A(mu) u = 0``; an empty list is a legitimate
    outcome.
    """
    _require_kernel(P, lam, v, policy)
    q1 = complex(v @ P.sigma1 @ u)
    q2 = complex(v @ P.sigma2 @ u)
    opscale = max(np.linalg.norm(P.sigma1, 2), np.linalg.norm(P.sigma2, 2))
    nv = float(np.linalg.norm(v) * np.linalg.norm(u))
    if max(abs(q1), abs(q2)) <= policy.rank_tol * opscale * nv:
        raise NoAdmissiblePartner("the coupling of v and u vanishes identically")
    l1, l2 = lam.affine(policy)
    F = P.pfaffian()
    base = np.array([1.0, l1, l2], dtype=complex)
    direction = np.array([0.0, -q1, -q2], dtype=complex)
    coeffs = F.restrict_line(base, direction)
    out = []
    for s in univariate_roots(coeffs, policy):
        if abs(s) * max(abs(q1), abs(q2)) <= policy.rank_tol * max(1.0, abs(l1), abs(l2)):
            continue  # s = 0 reproduces lam itself
        raw = base + s * direction
        pt = ProjPoint(*raw, policy=policy)
        try:
            cp = curve_point(F, pt, policy)
            _require_kernel(P, pt, u, policy)
        except (PreconditionError, VectorNotInKernel):
            continue
        out.append(cp)
    return out
