"""Truncated SVD by thick-restarted Lanczos bidiagonalization.

Only products ``A @ p`` and ``A.T @ q`` are needed, so the trajectory matrix is
never formed. Both Krylov bases are kept fully reorthogonalized (two passes of
classical Gram-Schmidt). At a restart the leading Ritz vectors are kept and
the projected matrix becomes

    [ diag(s_1..s_k)  rho ]
    [       0        alpha ...

(an arrowhead block followed by the usual upper bidiagonal recurrence), after
which bidiagonalization continues from the last residual direction.

Already known singular triples can be *locked*: new basis vectors are kept
orthogonal to them, so the iteration converges to the next triples. This is
how a decomposition is extended without touching earlier results.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, ParameterError

__all__ = ["LanczosResult", "lanczos_svd"]


@dataclass
class LanczosResult:
    U: np.ndarray
    s: np.ndarray
    V: np.ndarray
    residuals: np.ndarray
    restarts: int
    matvecs: int


def _orthogonalize(w, bases):
    for _ in range(2):
        for B in bases:
            if B.shape[1]:
                w -= B @ (B.T @ w)
    return w


def _fresh_direction(rng, n, bases):
    # random unit vector orthogonal to the given bases
    for _ in range(5):
        w = _orthogonalize(rng.standard_normal(n), bases)
        nrm = np.linalg.norm(w)
        if nrm > 1e-8:
            return w / nrm
    return None


def lanczos_svd(
    matvec,
    rmatvec,
    shape,
    k,
    *,
    tol=1e-8,
    ncv=None,
    max_restarts=300,
    locked=None,
    scale=None,
    seed=0,
):
    """Leading ``k`` singular triples of an implicit ``m x n`` matrix.

    Parameters
    ----------
    matvec, rmatvec : callable
        ``v -> A @ v`` (length n -> m) and ``u -> A.T @ u`` (m -> n).
    shape : (m, n)
    k : int
        Number of triples wanted.
    tol : float
        A triple is converged when ``||A.T u - s v|| <= tol * scale``.
    ncv : int, optional
        Size of the Krylov basis; default ``max(2k + 10, 20)`` clipped to the
        available dimension.
    locked : (U, V), optional
        Orthonormal left/right singular vectors to deflate.
    scale : float, optional
        Reference singular value for the tolerance; defaults to the largest
        singular value estimate (or the largest locked one).

    Returns
    -------
    LanczosResult
        ``U`` (m x k), ``s`` descending, ``V`` (n x k).
    """
    m, n = shape
    if locked is None:
        U_lock = np.zeros((m, 0))
        V_lock = np.zeros((n, 0))
    else:
        U_lock, V_lock = (np.asarray(a, dtype=float) for a in locked)
    avail = min(m, n) - V_lock.shape[1]
    if not 1 <= k <= avail:
        raise ParameterError(f"cannot compute {k} triples, only {avail} available")
    if ncv is None:
        ncv = max(2 * k + 10, 20)
    ncv = int(min(max(ncv, k + 1), avail))
    rng = np.random.default_rng(seed)

    P = np.zeros((n, ncv + 1))
    Q = np.zeros((m, ncv))
    B = np.zeros((ncv, ncv))
    p = _fresh_direction(rng, n, [V_lock])
    P[:, 0] = p
    kept = 0
    nmv = 0
    anorm = 0.0
    beta = 0.0

    for restart in range(max_restarts + 1):
        for j in range(kept, ncv):
            q = matvec(P[:, j])
            nmv += 1
            q = _orthogonalize(q, [Q[:, :j], U_lock])
            alpha = np.linalg.norm(q)
            anorm = max(anorm, alpha)
            if alpha <= 1e-14 * max(anorm, 1e-300):
                # P[:, j] lies (numerically) in the null space
                alpha = 0.0
                q = _fresh_direction(rng, m, [Q[:, :j], U_lock])
                if q is None:
                    q = np.zeros(m)
            else:
                q /= alpha
            Q[:, j] = q
            B[j, j] = alpha

            r = rmatvec(q) - alpha * P[:, j]
            nmv += 1
            r = _orthogonalize(r, [P[:, : j + 1], V_lock])
            beta = np.linalg.norm(r)
            anorm = max(anorm, beta)
            if beta <= 1e-14 * max(anorm, 1e-300):
                beta = 0.0
                r = _fresh_direction(rng, n, [P[:, : j + 1], V_lock])
                if r is None:
                    r = np.zeros(n)
            else:
                r /= beta
            P[:, j + 1] = r
            if j + 1 < ncv:
                B[j, j + 1] = beta

        Ub, sb, Vbt = np.linalg.svd(B)
        res = beta * np.abs(Ub[ncv - 1, :])
        ref = scale if scale is not None else max(sb[0], 1e-300)
        done = res[:k] <= tol * ref
        if np.all(done) or ncv == avail and beta == 0.0:
            U = Q @ Ub[:, :k]
            V = P[:, :ncv] @ Vbt[:k].T
            return LanczosResult(U, sb[:k].copy(), V, res[:k].copy(), restart, nmv)
        if restart == max_restarts:
            break

        # thick restart: keep the leading Ritz vectors plus the residual direction
        kept = min(ncv - 1, k + (ncv - k) // 2)
        tail = P[:, ncv].copy()
        P[:, :kept] = P[:, :ncv] @ Vbt[:kept].T
        P[:, kept] = tail
        P[:, kept + 1 :] = 0.0
        Q[:, :kept] = Q @ Ub[:, :kept]
        Q[:, kept:] = 0.0
        rho = beta * Ub[ncv - 1, :kept]
        B[:] = 0.0
        B[np.arange(kept), np.arange(kept)] = sb[:kept]
        B[:kept, kept] = rho

    nconv = int(np.sum(np.cumprod(done)))
    raise ConvergenceError(
        f"Lanczos bidiagonalization did not converge after {max_restarts} restarts "
        f"({nconv} of {k} triples converged)",
        converged=nconv,
    )
