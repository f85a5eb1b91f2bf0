"""Driving a second-canonical-form pencil toward the decomposable shape.

A pencil in the second canonical form is decomposable exactly when the
two diagonal d-by-d blocks of its constant part vanish.  One-point
elementary transformations change those blocks by rank-2 wedges
``2 rho (s2 v ^ s1 v)`` whose block entries are
``v_n v_l (p_l - p_n)`` (bottom) and ``v_{d+n} v_{d+l} (p_l - p_n)``
(top), so linear combinations of such wedges span everything supported
on the two blocks.  No constructive selection rule with a convergence
guarantee exists; this module runs a greedy descent and reports
non-convergence as a first-class outcome.

Two candidate sources feed each greedy step:

* sampled moves: kernel vectors at curve points drawn by intersecting
  the curve with random lines, each scored with its least-squares
  optimal constant;
* a structured move that rank-1 factors the current off-pattern blocks,
  reconstructs the kernel vector responsible (up to the sign ambiguity
  of a square root) and its base point from the null space of
  ``[A0 v, A1 v, A2 v]``, and cancels it in one exact step.

Every accepted move is an ordinary one-point transformation with its
record, so the pfaffian is preserved along the whole path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .canonical import off_pattern_blocks, off_pattern_norm, validate_second_canonical
from .errors import PreconditionError, RankDeficiency
from .incidence import sample_curve_points
from .pencil import SkewPencil, kernel_at, wedge_to_matrix
from .poly import ProjPoint
from .tolerances import DEFAULT_POLICY, TolerancePolicy
from .transforms import TransformRecord, type2

_DECREASE_FACTOR = 1.0 - 1e-3
_CANDIDATE_POINTS = 32


@dataclass(frozen=True)
class BridgeResult:
    records: list[TransformRecord]
    pencil: SkewPencil
    off_pattern_norm: float
    converged: bool
    history: list[float]


def _pattern_vector(gamma: np.ndarray, d: int) -> np.ndarray:
    top, bot = off_pattern_blocks(gamma, d)
    return np.concatenate([top.ravel(), bot.ravel()])


def _optimal_rho(G: np.ndarray, U: np.ndarray) -> tuple[complex, float]:
    """Least-squares constant minimizing ``|G + rho U|`` and the new norm."""
    uu = np.vdot(U, U).real
    if uu <= 0:
        return 0j, float(np.linalg.norm(G))
    rho = -np.vdot(U, G) / uu
    return complex(rho), float(np.linalg.norm(G + rho * U))


def _rank1_from_block(block: np.ndarray, ps: np.ndarray,
                      policy: TolerancePolicy) -> tuple[np.ndarray, complex] | None:
    """Factor ``block[n,l] = c * b_n b_l (p_l - p_n)`` into (unit b, c).

    Needs dimension at least 3 to complete the diagonal of the symmetric
    rank-1 matrix ``c b b^t``; returns None when the data does not fit.
    """
    d = len(ps)
    if d < 3:
        return None
    scale = float(np.max(np.abs(block)))
    if scale == 0:
        return None
    H = np.zeros((d, d), dtype=complex)
    for n in range(d):
        for l in range(d):
            if n == l:
                continue
            gap = ps[l] - ps[n]
            if abs(gap) <= policy.rank_tol * max(1.0, float(np.max(np.abs(ps)))):
                return None
            H[n, l] = block[n, l] / gap
    hscale = float(np.max(np.abs(H)))
    for n in range(d):
        others = [l for l in range(d) if l != n]
        best = None
        for i, l in enumerate(others):
            for m in others[i + 1:]:
                if abs(H[l, m]) > 1e-3 * hscale:
                    cand = H[n, l] * H[n, m] / H[l, m]
                    if best is None or abs(cand) > abs(best):
                        best = cand
        H[n, n] = best if best is not None else 0.0
    col = int(np.argmax(np.linalg.norm(H, axis=0)))
    b = H[:, col]
    nb = np.linalg.norm(b)
    if nb <= 1e-6 * hscale:
        return None
    b = b / nb
    B = np.outer(b, b)
    c = np.vdot(B, H) / np.vdot(B, B)
    if np.linalg.norm(H - c * B) > 0.5 * np.linalg.norm(H):
        return None
    return b, complex(c)


def _point_for_vector(P: SkewPencil, v: np.ndarray,
                      policy: TolerancePolicy) -> ProjPoint | None:
    """The point (if any) at which ``v`` lies in the kernel of the pencil."""
    N = np.column_stack([P.A0 @ v, P.A1 @ v, P.A2 @ v])
    _, s, vh = np.linalg.svd(N)
    if s[0] == 0 or s[-1] > 1e-6 * s[0]:
        return None
    x = vh[-1].conj()
    if np.max(np.abs(x)) == 0 or abs(x[0]) <= policy.rank_tol * np.max(np.abs(x)):
        return None
    pt = ProjPoint(*x, policy=policy)
    A = P(pt)
    res = np.linalg.norm(A @ v) / (np.linalg.norm(A, 2) * np.linalg.norm(v))
    if res > policy.rank_tol:
        return None
    return pt


def _structured_candidates(P: SkewPencil, ps: np.ndarray,
                           policy: TolerancePolicy) -> list[tuple[ProjPoint, np.ndarray]]:
    d = P.half_deg
    top, bot = off_pattern_blocks(P.gamma, d)
    scale = max(P.scale(), 1.0)
    fit_top = _rank1_from_block(top, ps, policy)
    fit_bot = _rank1_from_block(bot, ps, policy)
    trials: list[np.ndarray] = []
    top_small = float(np.max(np.abs(top))) <= policy.match_tol * scale
    bot_small = float(np.max(np.abs(bot))) <= policy.match_tol * scale
    if fit_top and fit_bot:
        b, cb = fit_top
        a, ca = fit_bot
        if abs(ca) > 0:
            r = np.sqrt(cb / ca)
            trials.append(np.concatenate([a, r * b]))
            trials.append(np.concatenate([a, -r * b]))
    elif fit_bot and top_small:
        a, _ = fit_bot
        trials.append(np.concatenate([a, np.zeros(d, dtype=complex)]))
    elif fit_top and bot_small:
        b, _ = fit_top
        trials.append(np.concatenate([np.zeros(d, dtype=complex), b]))
    out = []
    for v in trials:
        pt = _point_for_vector(P, v, policy)
        if pt is not None:
            out.append((pt, v))
    return out


def bridge_to_decomposable(P: SkewPencil, budget: int = 50, seed: int = 0,
                           policy: TolerancePolicy = DEFAULT_POLICY,
                           target: float | None = None,
                           candidate_points: int = _CANDIDATE_POINTS) -> BridgeResult:
    """Greedy sequence of one-point steps toward the decomposable pattern.

    Accepts a candidate step only when it shrinks the off-pattern norm
    by the relative factor 1e-3, so the recorded norm history is
    strictly decreasing.  Stops successfully once the norm falls below
    ``target`` (default: one tenth of ``match_tol`` times the pencil
    scale); returns ``converged=False`` with the final norm when the
    budget runs out or no candidate improves.
    """
    d = P.half_deg
    ps = validate_second_canonical(P, policy)
    gaps = np.abs(ps[:, None] - ps[None, :]) + np.eye(d)
    if float(np.min(gaps)) <= policy.rank_tol * max(1.0, float(np.max(np.abs(ps)))):
        raise PreconditionError("diagonal entries must be pairwise distinct")
    scale = max(P.scale(), 1.0)
    if target is None:
        target = 0.1 * policy.match_tol * scale
    F = P.pfaffian()
    cur = P
    records: list[TransformRecord] = []
    off = off_pattern_norm(cur.gamma, d)
    history = [off]

    step = 0
    while off > target and step < budget:
        G = _pattern_vector(cur.gamma, d)
        candidates = _structured_candidates(cur, ps, policy)
        try:
            pts = sample_curve_points(F, candidate_points, seed=seed + 977 * step,
                                      policy=policy)
        except PreconditionError:
            pts = []
        for cp in pts:
            try:
                kb = kernel_at(cur, cp.pt, policy)
            except RankDeficiency:
                continue
            b1, b2 = kb.v1, kb.v2
            for v in (b1, b2, b1 + b2, b1 - b2, b1 + 1j * b2, b1 - 1j * b2):
                candidates.append((cp.pt, v))
        best = None
        for pt, v in candidates:
            U = _pattern_vector(2.0 * wedge_to_matrix(cur.sigma2 @ v, cur.sigma1 @ v), d)
            rho, new_off = _optimal_rho(G, U)
            if abs(rho) * float(np.linalg.norm(U)) <= policy.zero_tol * max(off, 1.0):
                continue
            if best is None or new_off < best[0]:
                best = (new_off, pt, v, rho)
        if best is None or best[0] > _DECREASE_FACTOR * off:
            break
        _, pt, v, rho = best
        cur, rec = type2(cur, pt, v, rho, policy)
        records.append(rec)
        off = off_pattern_norm(cur.gamma, d)
        history.append(off)
        step += 1

    return BridgeResult(records=records, pencil=cur, off_pattern_norm=off,
                        converged=off <= target, history=history)
