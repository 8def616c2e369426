"""Deterministic symmetric eigensolvers.

``dense_sym_eig`` wraps the LAPACK tridiagonalization path for the full
spectrum of small dense operators and reports per-pair residuals.
``lanczos_smallest`` extracts the smallest eigenpairs iteratively: it runs
Lanczos with full reorthogonalization on the shifted operator

    B = sigma * I - A,   sigma = Gershgorin upper bound,

so the smallest eigenvalues of A are the dominant ones of B.  Because one
Krylov start reaches a single vector per eigenspace, the iteration always
continues with restarts deflated against everything found, until a round
stops lowering the m-th smallest value; that is what resolves degenerate
multiplicities.  The solvers are intended for positive-semidefinite
operators (Laplacians, Schroedinger discretizations).

Both solvers fix the eigenvector sign by making the entry of largest
magnitude positive, and are bitwise deterministic for a fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh_tridiagonal

from .core import EigenPair

__all__ = ["SymOperator", "EigenSolveReport", "dense_sym_eig", "lanczos_smallest"]

DENSE_MAX_N = 4096
# callers solve below this size densely; iterating would gain nothing
DENSE_FALLBACK_N = 512


@dataclass
class SymOperator:
    """Symmetric operator held either dense or as sparse upper triplets."""

    n: int
    dense: np.ndarray | None = None
    csr: sp.csr_matrix | None = None

    def __post_init__(self):
        if (self.dense is None) == (self.csr is None):
            raise ValueError("exactly one representation must be set")

    @classmethod
    def from_dense(cls, a):
        a = np.asarray(a, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("matrix must be square")
        if not np.isfinite(a).all():
            raise ValueError("matrix has non-finite entries")
        scale = max(1.0, np.abs(a).max(initial=0.0))
        if np.abs(a - a.T).max(initial=0.0) > 1e-12 * scale:
            raise ValueError("matrix is not symmetric (1e-12 relative)")
        return cls(n=a.shape[0], dense=a)

    @classmethod
    def from_triplets(cls, n, rows, cols, vals):
        """Build from upper-triangle triplets (i <= j); duplicates sum."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=np.float64)
        if not (rows.shape == cols.shape == vals.shape):
            raise ValueError("triplet arrays must have equal length")
        if rows.size and (rows.min() < 0 or cols.max() >= n):
            raise ValueError("triplet index out of range")
        if (rows > cols).any():
            raise ValueError("triplets must satisfy i <= j")
        if not np.isfinite(vals).all():
            raise ValueError("triplet values must be finite")
        upper = sp.coo_matrix((vals, (rows, cols)), shape=(n, n))
        diag = sp.coo_matrix(
            (upper.diagonal(), (np.arange(n), np.arange(n))), shape=(n, n)
        )
        full = (upper + upper.T - diag).tocsr()
        return cls(n=n, csr=full)

    @property
    def is_dense(self):
        return self.dense is not None

    def matvec(self, x):
        return self.dense @ x if self.is_dense else self.csr @ x

    def to_dense(self):
        return self.dense.copy() if self.is_dense else self.csr.toarray()

    def densified(self):
        return SymOperator(n=self.n, dense=self.to_dense()) if not self.is_dense else self

    def _row_abs_sums(self):
        if self.is_dense:
            return np.abs(self.dense).sum(axis=1)
        absm = self.csr.copy()
        absm.data = np.abs(absm.data)
        return np.asarray(absm.sum(axis=1)).ravel()

    @property
    def inf_norm_estimate(self):
        return float(self._row_abs_sums().max(initial=0.0))

    @property
    def gershgorin_bound(self):
        """max_i (a_ii + sum_{j != i} |a_ij|), an upper bound on the spectrum."""
        diag = np.diag(self.dense) if self.is_dense else self.csr.diagonal()
        off = self._row_abs_sums() - np.abs(diag)
        return float((diag + off).max(initial=0.0))


@dataclass
class EigenSolveReport:
    """Solver output: ascending eigenpairs, normalized residuals, bookkeeping."""

    pairs: list[EigenPair]
    residuals: np.ndarray
    iterations: int
    converged: bool


def _fix_signs(vectors):
    """Columns flipped so the largest-magnitude entry is positive."""
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def _clamp_tiny_negatives(values, scale):
    out = values.copy()
    tiny = (out < 0) & (out > -1e-10 * scale)
    out[tiny] = 0.0
    return out


def dense_sym_eig(op, residual_tol=1e-10):
    """Full spectrum of a dense symmetric operator, residual-checked.

    Uses the LAPACK symmetric solver (Householder tridiagonalization plus
    implicit-shift iteration).  Eigenvalues in [-1e-10 * scale, 0) are
    clamped to zero so PSD operators round-trip through EigenPair.
    """
    if not op.is_dense:
        raise ValueError("dense_sym_eig needs a dense representation")
    if op.n > DENSE_MAX_N:
        raise ValueError(f"dense solve limited to n <= {DENSE_MAX_N}")
    scale = max(1.0, op.inf_norm_estimate)
    try:
        values, vectors = np.linalg.eigh(op.dense)
    except np.linalg.LinAlgError:
        return EigenSolveReport(
            pairs=[], residuals=np.array([]), iterations=0, converged=False
        )
    values = _clamp_tiny_negatives(values, scale)
    vectors = _fix_signs(vectors)
    resid = np.linalg.norm(op.dense @ vectors - vectors * values, axis=0) / scale
    pairs = [EigenPair(values[i], vectors[:, i]) for i in range(op.n)]
    return EigenSolveReport(
        pairs=pairs,
        residuals=resid,
        iterations=1,
        converged=bool((resid <= residual_tol).all()),
    )


def lanczos_smallest(op, m, tol=1e-10, seed=0, max_restarts=5):
    """The m smallest eigenpairs of a PSD-ish symmetric operator.

    Seeded random start, full reorthogonalization, Gershgorin shift.
    Ritz pairs are accepted when their true normalized residual is at most
    tol.  The iteration restarts deflated against everything accepted
    until a round finds nothing below the current m-th smallest, which is
    what surfaces degenerate copies; rounds that make no progress count
    toward max_restarts and double the sweep budget.
    """
    n = op.n
    if not 1 <= m < n:
        raise ValueError("need 1 <= m < n")
    sigma = op.gershgorin_bound
    scale = max(1.0, op.inf_norm_estimate)
    tol_abs = tol * scale
    breakdown_tol = 1e4 * np.finfo(np.float64).eps * max(1.0, abs(sigma) + scale)
    rng = np.random.default_rng(seed)

    found_vals = []
    found_vecs = np.empty((n, 0))
    failed_rounds = 0
    total_matvecs = 0
    sweep_budget = max(10 * m + 50, 300)

    while True:
        m_rem = m - len(found_vals)
        dim_rem = n - found_vecs.shape[1]
        if dim_rem == 0:
            break
        start = rng.standard_normal(n)
        start -= found_vecs @ (found_vecs.T @ start)
        norm = np.linalg.norm(start)
        if norm < 1e-8:
            failed_rounds += 1
            if failed_rounds > max_restarts:
                raise RuntimeError("lanczos: restart budget exhausted")
            continue
        start /= norm

        jmax = min(dim_rem, sweep_budget)
        alphas, betas, Q, breakdown, matvecs, est_ok = _run_sweep(
            op, sigma, start, found_vecs, jmax, max(m_rem, 1), tol_abs, breakdown_tol
        )
        total_matvecs += matvecs

        k = len(alphas)
        theta, s = eigh_tridiagonal(alphas, betas[: k - 1])
        ritz_vecs = Q @ s
        a_vals = sigma - theta  # descending in theta -> a_vals ascending order below
        order = np.argsort(a_vals, kind="stable")
        a_vals = a_vals[order]
        ritz_vecs = ritz_vecs[:, order]
        if not breakdown:
            # trust only the extraction targets; interior Ritz values of an
            # unexhausted Krylov space may be far from eigenvalues
            a_vals = a_vals[: max(m_rem, 1)]
            ritz_vecs = ritz_vecs[:, : max(m_rem, 1)]
        resid = (
            np.linalg.norm(
                _apply(op, ritz_vecs) - ritz_vecs * a_vals, axis=0
            )
            / scale
        )
        keep = resid <= tol
        new_vals = a_vals[keep]
        new_vecs = ritz_vecs[:, keep]
        if found_vecs.shape[1]:
            new_vecs = new_vecs - found_vecs @ (found_vecs.T @ new_vecs)
            norms = np.linalg.norm(new_vecs, axis=0)
            good = norms > 0.5  # a converged direction cannot collapse here
            new_vals, new_vecs = new_vals[good], new_vecs[:, good] / norms[good]

        prev_mth = sorted(found_vals)[m - 1] if len(found_vals) >= m else None
        if new_vals.size == 0:
            failed_rounds += 1
            if failed_rounds > max_restarts:
                raise RuntimeError(
                    f"lanczos failed to converge {m} pairs to tol={tol}"
                )
            # a longer sweep is the only lever against slow extremal
            # convergence when the sweep ended without breakdown
            if not breakdown:
                sweep_budget = min(2 * sweep_budget, n)
            continue
        found_vals.extend(new_vals.tolist())
        found_vecs = np.hstack([found_vecs, new_vecs])

        if (
            len(found_vals) >= m
            and prev_mth is not None
            and new_vals.min() >= prev_mth - 10 * tol_abs
        ):
            break
        # a single Krylov start sees one vector per eigenspace, so copies
        # of multiple eigenvalues surface only across deflated restarts;
        # keep going until a round stops lowering the m-th smallest

    order = np.argsort(found_vals, kind="stable")[:m]
    vals = _clamp_tiny_negatives(np.array(found_vals)[order], scale)
    vecs = _fix_signs(found_vecs[:, order])
    resid = np.linalg.norm(_apply(op, vecs) - vecs * vals, axis=0) / scale
    pairs = [EigenPair(vals[i], vecs[:, i]) for i in range(m)]
    return EigenSolveReport(
        pairs=pairs,
        residuals=resid,
        iterations=total_matvecs,
        converged=bool((resid <= tol).all()),
    )


def _apply(op, block):
    return op.dense @ block if op.is_dense else op.csr @ block


def _run_sweep(op, sigma, start, deflate, jmax, m_want, tol_abs, breakdown_tol):
    """Lanczos sweep on B = sigma*I - A, deflated; full reorthogonalization."""
    n = op.n
    alphas, betas = [], []
    Q = np.empty((n, jmax))
    Q[:, 0] = start
    matvecs = 0
    breakdown = False
    est_ok = False
    j = 0
    while True:
        q = Q[:, j]
        w = sigma * q - op.matvec(q)
        matvecs += 1
        alphas.append(float(q @ w))
        for _ in range(2):
            w -= Q[:, : j + 1] @ (Q[:, : j + 1].T @ w)
            if deflate.shape[1]:
                w -= deflate @ (deflate.T @ w)
        beta = float(np.linalg.norm(w))
        j += 1
        if beta <= breakdown_tol:
            breakdown = True
            break
        if j == jmax:
            break
        betas.append(beta)
        Q[:, j] = w / beta
        if j >= m_want + 2 and j % 5 == 0:
            theta, s = eigh_tridiagonal(np.array(alphas), np.array(betas)[: j - 1])
            ests = beta * np.abs(s[-1, -m_want:])
            if ests.max() <= 0.1 * tol_abs:
                est_ok = True
                break
    return np.array(alphas), np.array(betas), Q[:, :j], breakdown, matvecs, est_ok
