"""Plane-quartic pipeline: polar cubics, the 8x8 Aronhold pfaffian, the
Scorza covariant, polar triangles and theta-characteristic identification.

A ternary cubic is carried around by its ten coefficients in the
normalization

    w000 x^3 + w111 y^3 + w222 z^3 + 6 w012 xyz + 3 w001 x^2 y
    + 3 w002 x^2 z + 3 w011 x y^2 + 3 w022 x z^2 + 3 w112 y^2 z
    + 3 w122 y z^2.

The polar cubic of a quartic F at a moving point has coefficients linear
in that point, so the same container holds either scalars (one cubic) or
linear forms (a pencil of cubics).  The pfaffian of the fixed 8x8 skew
arrangement of those coefficients vanishes exactly on sums of three
cubes; applied to the polar coefficients of F it produces the Scorza
quartic of F.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (CorankNotOne, DegenerateHessian, InconsistentPolarData,
                     MultipleMatches, NoMatch, NotAProductOfLines, NotOnBaseLocus,
                     PreconditionError, TangencyCheckFailed)
from .incidence import sample_curve_points
from .pencil import DetRep, SkewPencil, pfaffian_numeric
from .poly import HomPoly, LinearForm, ProjPoint, equal_up_to_scale, univariate_roots
from .tolerances import DEFAULT_POLICY, TolerancePolicy

CUBIC_FIELDS = ("w000", "w111", "w222", "w012", "w001",
                "w002", "w011", "w022", "w112", "w122")

_MONOMIAL = {
    "w000": ((3, 0, 0), 1), "w111": ((0, 3, 0), 1), "w222": ((0, 0, 3), 1),
    "w012": ((1, 1, 1), 6), "w001": ((2, 1, 0), 3), "w002": ((2, 0, 1), 3),
    "w011": ((1, 2, 0), 3), "w022": ((1, 0, 2), 3), "w112": ((0, 2, 1), 3),
    "w122": ((0, 1, 2), 3),
}


@dataclass(frozen=True)
class CubicCoeffs:
    """The ten cubic coefficients; entries are scalars or linear forms."""

    w000: complex | LinearForm
    w111: complex | LinearForm
    w222: complex | LinearForm
    w012: complex | LinearForm
    w001: complex | LinearForm
    w002: complex | LinearForm
    w011: complex | LinearForm
    w022: complex | LinearForm
    w112: complex | LinearForm
    w122: complex | LinearForm

    def values(self) -> list[complex | LinearForm]:
        return [getattr(self, n) for n in CUBIC_FIELDS]

    def is_pencil(self) -> bool:
        return any(isinstance(v, LinearForm) for v in self.values())

    def at_point(self, pt) -> "CubicCoeffs":
        """Substitute a point into linear-form entries; scalars pass through."""
        vals = {n: (v(pt) if isinstance(v, LinearForm) else complex(v))
                for n, v in zip(CUBIC_FIELDS, self.values())}
        return CubicCoeffs(**vals)

    def as_poly(self) -> HomPoly:
        """The cubic itself (scalar entries only)."""
        if self.is_pencil():
            raise PreconditionError("pencil-valued coefficients do not define one cubic")
        terms = {}
        for name, v in zip(CUBIC_FIELDS, self.values()):
            exp, mult = _MONOMIAL[name]
            terms[exp] = mult * complex(v)
        return HomPoly(3, terms)

    @staticmethod
    def from_poly(cubic: HomPoly) -> "CubicCoeffs":
        if cubic.degree != 3:
            raise ValueError("expected a cubic")
        vals = {}
        for name, (exp, mult) in _MONOMIAL.items():
            vals[name] = cubic.coeff(exp) / mult
        return CubicCoeffs(**vals)

    def flatten(self) -> np.ndarray:
        """30-vector of the three linear coefficients of each entry."""
        out = []
        for v in self.values():
            if isinstance(v, LinearForm):
                out.extend([v.c0, v.c1, v.c2])
            else:
                raise PreconditionError("flatten needs linear-form entries")
        return np.array(out, dtype=complex)


def polar_cubic(F: HomPoly) -> CubicCoeffs:
    """Coefficients of the polar cubic of a quartic at a moving point.

    The polar at ``(x0, x1, x2)`` is ``x0 dF/dx + x1 dF/dy + x2 dF/dz``;
    each of the ten coefficients is a linear form in the moving point.
    """
    if F.degree != 4:
        raise ValueError("polar coefficients are built from a quartic")
    grads = F.gradient()
    vals = {}
    for name, (exp, mult) in _MONOMIAL.items():
        vals[name] = LinearForm(*(g.coeff(exp) / mult for g in grads))
    return CubicCoeffs(**vals)


def polar_cubic_at(F: HomPoly, pt: ProjPoint) -> HomPoly:
    """The polar cubic of ``F`` at one fixed point."""
    x = pt.coords
    out = HomPoly.zero(3)
    for k, g in enumerate(F.gradient()):
        out = out + g.scaled(x[k])
    return out


_ARONHOLD_UPPER = {
    (0, 1): ("w222", 1), (0, 2): ("w122", -1), (0, 4): ("w112", 1),
    (0, 6): ("w022", 1), (0, 7): ("w012", -1),
    (1, 2): ("w022", 1), (1, 3): ("w122", 1), (1, 4): ("w012", -1),
    (1, 5): ("w022", -1), (1, 7): ("w002", 1),
    (2, 3): ("w112", -1), (2, 5): ("w012", 1), (2, 6): ("w002", -1),
    (3, 4): ("w111", -1), (3, 6): ("w012", -1), (3, 7): ("w011", 1),
    (4, 5): ("w011", -1), (4, 6): ("w001", 1),
    (5, 6): ("w002", 1), (5, 7): ("w001", -1),
    (6, 7): ("w000", 1),
}


def aronhold_matrix(w: CubicCoeffs) -> SkewPencil | np.ndarray:
    """The fixed 8x8 skew arrangement of the cubic coefficients.

    Linear-form entries give a pencil (whose pfaffian is a quartic in
    the moving point); scalar entries give a constant skew matrix.
    """
    if w.is_pencil():
        zero = LinearForm.zero()
        grid = [[zero for _ in range(8)] for _ in range(8)]
        for (i, j), (name, sgn) in _ARONHOLD_UPPER.items():
            f = getattr(w, name)
            if not isinstance(f, LinearForm):
                f = LinearForm(f, 0, 0)
            grid[i][j] = f.scaled(sgn)
            grid[j][i] = f.scaled(-sgn)
        return SkewPencil.from_entry_forms(grid)
    A = np.zeros((8, 8), dtype=complex)
    for (i, j), (name, sgn) in _ARONHOLD_UPPER.items():
        A[i, j] = sgn * complex(getattr(w, name))
        A[j, i] = -A[i, j]
    return A


def aronhold_invariant(w: CubicCoeffs) -> HomPoly | complex:
    """Pfaffian of the 8x8 arrangement; zero exactly on sums of three cubes."""
    ar = aronhold_matrix(w)
    if isinstance(ar, SkewPencil):
        return ar.pfaffian()
    return pfaffian_numeric(ar)


def scorza_map(F: HomPoly) -> HomPoly:
    """The covariant quartic: Aronhold pfaffian of the polar coefficients."""
    return aronhold_invariant(polar_cubic(F))


_QUARTIC_MONOMIALS = sorted(
    [(a, b, 4 - a - b) for a in range(5) for b in range(5 - a)], reverse=True)


def integrate_polar(w: CubicCoeffs,
                    policy: TolerancePolicy = DEFAULT_POLICY) -> HomPoly:
    """Recover the quartic whose polar coefficients are ``w``.

    Solves the linear system in the fifteen quartic coefficients; exact
    round-trip inverse of :func:`polar_cubic` on consistent data.
    """
    if not w.is_pencil():
        raise PreconditionError("need linear-form coefficients to integrate")
    cols = []
    for exp in _QUARTIC_MONOMIALS:
        cols.append(polar_cubic(HomPoly.monomial(exp)).flatten())
    A = np.column_stack(cols)
    b = w.flatten()
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    resid = float(np.linalg.norm(A @ sol - b))
    if resid > policy.match_tol * max(1.0, float(np.linalg.norm(b))):
        raise InconsistentPolarData(f"no quartic preimage (residual {resid:.3g})")
    return HomPoly(4, dict(zip(_QUARTIC_MONOMIALS, sol)))


def hessian_det(cubic: HomPoly) -> HomPoly:
    """Determinant of the 3x3 matrix of second partials (again a cubic)."""
    H = [[cubic.partial(i).partial(j) for j in range(3)] for i in range(3)]
    return (H[0][0] * (H[1][1] * H[2][2] - H[1][2] * H[2][1])
            - H[0][1] * (H[1][0] * H[2][2] - H[1][2] * H[2][0])
            + H[0][2] * (H[1][0] * H[2][1] - H[1][1] * H[2][0]))


def _line_between(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    return np.cross(p, q)


def factor_three_lines(c: HomPoly, seed: int = 0,
                       policy: TolerancePolicy = DEFAULT_POLICY
                       ) -> tuple[LinearForm, LinearForm, LinearForm]:
    """Split a cubic that is a product of three distinct lines.

    Restricts the cubic to two generic lines, extracts three roots on
    each, and groups the six points into three collinear pairs; each
    pair spans one factor.  The restriction lines are redrawn (up to 8
    times) when roots nearly collide.  The returned forms are unit-norm;
    their product matches the input up to one scalar.
    """
    if c.degree != 3:
        raise ValueError("expected a cubic")
    if c.is_zero():
        raise NotAProductOfLines("the zero cubic has no line factors")
    rng = np.random.default_rng(seed)
    last_reason = "no usable restriction lines"
    for _ in range(8):
        base_a, dir_a, base_b, dir_b = (rng.standard_normal(3) + 1j * rng.standard_normal(3)
                                        for _ in range(4))
        pts = []
        ok = True
        for base, direction in ((base_a, dir_a), (base_b, dir_b)):
            roots = univariate_roots(c.restrict_line(base, direction), policy)
            if len(roots) != 3:
                ok = False
                last_reason = f"restriction has {len(roots)} finite roots"
                break
            sep = policy.rank_tol * max(1.0, float(np.max(np.abs(roots))))
            if min(abs(roots[0] - roots[1]), abs(roots[0] - roots[2]),
                   abs(roots[1] - roots[2])) < sep:
                ok = False
                last_reason = "roots on a restriction line nearly collide"
                break
            pts.append([base + t * direction for t in roots])
        if not ok:
            continue
        P3, Q3 = pts
        best = None
        for perm in ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)):
            lines = []
            degenerate = False
            for i in range(3):
                ell = _line_between(P3[i], Q3[perm[i]])
                norm = np.linalg.norm(ell)
                if norm <= policy.rank_tol * (np.linalg.norm(P3[i]) * np.linalg.norm(Q3[perm[i]])):
                    degenerate = True
                    break
                lines.append(ell / norm)
            if degenerate:
                continue
            prod = (LinearForm(*lines[0]).as_poly() * LinearForm(*lines[1]).as_poly()
                    * LinearForm(*lines[2]).as_poly())
            scale = equal_up_to_scale(prod, c, policy)
            if scale is not None:
                resid = (c - prod.scaled(scale)).max_coeff() / max(c.max_coeff(), 1e-300)
                if best is None or resid < best[0]:
                    best = (resid, lines)
        if best is not None:
            lines = best[1]
            for i in range(3):
                for j in range(i + 1, 3):
                    if np.linalg.norm(np.cross(lines[i], lines[j])) <= policy.rank_tol:
                        raise NotAProductOfLines("two factor lines coincide")
            return tuple(LinearForm(*l) for l in lines)
        last_reason = "no collinear grouping reproduces the cubic"
    raise NotAProductOfLines(last_reason)


@dataclass(frozen=True)
class PolarTriangle:
    """Cube-scaled lines with ``polar = g1^3 + g2^3 + g3^3`` and their vertices.

    ``vertices[k]`` is the intersection of the two lines other than
    ``lines[k]``.
    """

    lines: tuple[LinearForm, LinearForm, LinearForm]
    vertices: tuple[ProjPoint, ProjPoint, ProjPoint]
    residual: float


def polar_triangle(F: HomPoly, lam: ProjPoint, seed: int = 0,
                   policy: TolerancePolicy = DEFAULT_POLICY) -> PolarTriangle:
    """Express the polar cubic at ``lam`` as a sum of three cubes.

    The three lines are found by factoring the Hessian determinant of
    the polar cubic; the cube weights come from a least-squares solve,
    and the principal cube root folds them into the lines.  Vertices are
    pairwise line intersections.
    """
    c3 = polar_cubic_at(F, lam)
    if c3.is_zero():
        raise DegenerateHessian("polar cubic vanishes at the point")
    hd = hessian_det(c3)
    if hd.is_zero():
        raise DegenerateHessian("Hessian determinant vanishes identically")
    try:
        ells = factor_three_lines(hd, seed=seed, policy=policy)
    except NotAProductOfLines as exc:
        raise DegenerateHessian(str(exc)) from exc
    basis = [ell.as_poly() * ell.as_poly() * ell.as_poly() for ell in ells]
    monos = sorted({e for p in basis for e in p.terms} | set(c3.terms), reverse=True)
    A = np.array([[p.coeff(e) for p in basis] for e in monos])
    b = np.array([c3.coeff(e) for e in monos])
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    recon = HomPoly.zero(3)
    for ck, p in zip(sol, basis):
        recon = recon + p.scaled(ck)
    residual = (c3 - recon).max_coeff() / max(c3.max_coeff(), 1e-300)
    if residual > policy.match_tol:
        raise DegenerateHessian(f"three-cube fit fails (residual {residual:.3g})")
    gs = tuple(ell.scaled(complex(ck) ** (1.0 / 3.0)) for ck, ell in zip(sol, ells))
    verts = []
    for k in range(3):
        others = [gs[i].coeffs for i in range(3) if i != k]
        verts.append(ProjPoint(*np.cross(others[0], others[1]), policy=policy))
    return PolarTriangle(lines=gs, vertices=tuple(verts), residual=float(residual))


class SymDetRep(DetRep):
    """A symmetric determinantal representation (all three matrices symmetric)."""

    def __post_init__(self):
        super().__post_init__()
        for name in ("M0", "M1", "M2"):
            m = getattr(self, name)
            dev = float(np.max(np.abs(m - m.T)))
            if dev > DEFAULT_POLICY.zero_tol * max(1.0, float(np.max(np.abs(m)))):
                raise ValueError(f"{name} is not symmetric (deviation {dev:.3g})")


def corank_one_kernel(M: DetRep, pt: ProjPoint,
                      policy: TolerancePolicy = DEFAULT_POLICY) -> np.ndarray:
    """Unit kernel vector of ``M(pt)``, which must have corank exactly one."""
    A = M(pt)
    _, s, vh = np.linalg.svd(A)
    smax = float(s[0]) if s[0] > 0 else 1.0
    corank = int(np.sum(s <= policy.rank_tol * smax))
    if corank != 1:
        raise CorankNotOne(f"corank {corank} at {pt}, expected 1")
    v = vh[-1].conj()
    imax = int(np.argmax(np.abs(v)))
    return v * (np.conj(v[imax]) / abs(v[imax]))


@dataclass(frozen=True)
class ScorzaRelation:
    related: bool
    residuals: tuple[float, float, float]


def scorza_related(M: SymDetRep, lam: ProjPoint, mu: ProjPoint,
                   policy: TolerancePolicy = DEFAULT_POLICY) -> ScorzaRelation:
    """Whether the kernel vectors at two points pair to zero in all of M.

    Tests ``v^t M_k u = 0`` for the three coefficient matrices; residuals
    are normalized by the representation-wide scale ``max_k |M_k|``, the
    right yardstick because kernel errors mix all three coefficients.
    """
    v = corank_one_kernel(M, lam, policy)
    u = corank_one_kernel(M, mu, policy)
    opscale = max(np.linalg.norm(Mk, 2) for Mk in (M.M0, M.M1, M.M2))
    res = tuple(float(abs(v @ Mk @ u)) / opscale for Mk in (M.M0, M.M1, M.M2))
    return ScorzaRelation(related=max(res) <= policy.match_tol, residuals=res)


@dataclass(frozen=True)
class ThetaIdentification:
    index: int
    evidence: list[dict]


def identify_theta(source: HomPoly | CubicCoeffs,
                   candidates: Sequence[SymDetRep],
                   samples: int = 3, seed: int = 0,
                   policy: TolerancePolicy = DEFAULT_POLICY,
                   det_match_tol: float | None = None) -> ThetaIdentification:
    """Pick the symmetric representation realizing the polar-triangle pairing.

    ``source`` is either the quartic F or the polar coefficients of its
    covariant quartic (from which F is recovered by integration).  For
    each sampled point of the covariant quartic, the polar triangle of F
    supplies three partner vertices; the unique candidate whose kernel
    pairing vanishes at every (point, vertex) pair wins.  A candidate
    whose matrix is not corank one at a required vertex cannot carry the
    pairing and is ruled out on that ground.

    ``det_match_tol`` loosens only the entry check that each candidate's
    determinant cuts out the covariant quartic; data printed to few
    decimals needs it far looser than the pairing tolerance.
    """
    if isinstance(source, CubicCoeffs):
        F = integrate_polar(source, policy)
        S = aronhold_invariant(source)
    else:
        F = source
        S = scorza_map(F)
    if samples < 3:
        raise PreconditionError("need at least 3 sample points")
    if not candidates:
        raise NoMatch("empty candidate list")
    det_policy = TolerancePolicy(policy.zero_tol, policy.rank_tol,
                                 max(det_match_tol or policy.match_tol, policy.match_tol))
    for idx, M in enumerate(candidates):
        if equal_up_to_scale(M.det_poly(), S, det_policy) is None:
            raise PreconditionError(
                f"candidate {idx} is not a determinantal representation of the covariant")
    rng_seed = seed
    pts = sample_curve_points(S, 3 * samples, seed=rng_seed, policy=policy)
    alive = set(range(len(candidates)))
    evidence: list[dict] = []
    used = 0
    for cp in pts:
        if used >= samples:
            break
        try:
            tri = polar_triangle(F, cp.pt, seed=seed + used, policy=policy)
        except DegenerateHessian:
            continue
        used += 1
        row = {"point": cp.pt, "vertices": tri.vertices, "residuals": {}}
        for idx, M in enumerate(candidates):
            worst = 0.0
            ok = True
            for mu in tri.vertices:
                try:
                    rel = scorza_related(M, cp.pt, mu, policy)
                except CorankNotOne:
                    ok = False
                    worst = float("inf")
                    break
                worst = max(worst, max(rel.residuals))
                ok = ok and rel.related
            row["residuals"][idx] = worst
            if not ok:
                alive.discard(idx)
        evidence.append(row)
    if used < samples:
        raise PreconditionError(f"only {used} of {samples} samples produced triangles")
    if not alive:
        raise NoMatch("no candidate realizes the correspondence")
    if len(alive) > 1:
        raise MultipleMatches(f"candidates {sorted(alive)} all realize the correspondence")
    return ThetaIdentification(index=alive.pop(), evidence=evidence)


def bitangent_from_octad(M: SymDetRep, b_i: np.ndarray, b_j: np.ndarray,
                         seed: int = 0,
                         policy: TolerancePolicy = DEFAULT_POLICY) -> LinearForm:
    """The bitangent ``x -> b_i^t M(x) b_j`` from two base points of the net.

    Both vectors must lie on all three quadrics of the net (membership is
    verified, not computed).  The resulting line is checked to touch the
    quartic ``det M = 0`` doubly: the restriction of the quartic to the
    line must have two double roots.  Root pairs are compared at the
    square root of ``match_tol`` since a double root splits like the
    square root of a coefficient perturbation.
    """
    b_i = np.asarray(b_i, dtype=complex)
    b_j = np.asarray(b_j, dtype=complex)
    opscale = max(np.linalg.norm(Mk, 2) for Mk in (M.M0, M.M1, M.M2))
    for name, b in (("b_i", b_i), ("b_j", b_j)):
        nb = float(np.linalg.norm(b)) ** 2
        for k, Mk in enumerate((M.M0, M.M1, M.M2)):
            r = abs(b @ Mk @ b)
            if r > policy.match_tol * opscale * nb:
                raise NotOnBaseLocus(f"{name} fails quadric {k} (residual {r:.3g})")
    sv = np.linalg.svd(np.vstack([b_i, b_j]), compute_uv=False)
    if sv[-1] <= policy.rank_tol * sv[0]:
        raise PreconditionError("the two base points must be distinct")
    ell = LinearForm(b_i @ M.M0 @ b_j, b_i @ M.M1 @ b_j, b_i @ M.M2 @ b_j)
    _check_double_tangency(M.det_poly(), ell, seed, policy)
    return ell


def _check_double_tangency(quartic: HomPoly, ell: LinearForm, seed: int,
                           policy: TolerancePolicy) -> None:
    rng = np.random.default_rng(seed)
    _, _, vh = np.linalg.svd(ell.coeffs.reshape(1, 3))
    span = vh[1:].conj()
    mix = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    base = mix[0, 0] * span[0] + mix[0, 1] * span[1]
    direction = mix[1, 0] * span[0] + mix[1, 1] * span[1]
    roots = univariate_roots(quartic.restrict_line(base, direction), policy)
    if len(roots) != 4:
        raise TangencyCheckFailed(
            f"restriction to the line has {len(roots)} finite roots, expected 4")
    r = list(roots)
    pairings = [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))]
    gap = min(max(abs(r[a] - r[b]), abs(r[c] - r[d])) for (a, b), (c, d) in pairings)
    tol = np.sqrt(policy.match_tol) * (1.0 + max(abs(z) for z in r))
    if gap > tol:
        raise TangencyCheckFailed(f"roots do not form two double points (gap {gap:.3g})")
