"""Paley graphs and their phase-preserving spectral score.

For a prime p = 1 mod 4, vertices are Z/pZ and a, b are adjacent exactly
when a - b is a nonzero quadratic residue (-1 is a residue, so the relation
is symmetric).  The Laplacian spectrum is closed-form: 0 once and

    lambda_minus = (p - sqrt(p)) / 2,   lambda_plus = (p + sqrt(p)) / 2,

each with multiplicity (p - 1) / 2; the characters e_k(j) = exp(2 pi i jk/p)
are eigenvectors, residues k pairing with lambda_minus.  The score kept
complex (no absolute value, k = 0 excluded) collapses to three values by
class: vertex 0, residues, non-residues.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .eigensolve import dense_sym_eig
from .pipeline import Graph, laplacian

__all__ = [
    "PaleyField",
    "PaleySpectrum",
    "PaleyScore",
    "is_quadratic_residue",
    "paley_graph",
    "paley_spectrum",
    "paley_score_closed_form",
    "paley_score_numeric",
]

MAX_PRIME = 2**31
NUMERIC_MAX_PRIME = 2000


def _is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def is_quadratic_residue(a, p):
    """Euler's criterion a^((p-1)/2) = 1 mod p; a must not be 0 mod p."""
    p = int(p)
    if not _is_prime(p) or p == 2 or p >= MAX_PRIME:
        raise ValueError("p must be an odd prime below 2**31")
    a = int(a) % p
    if a == 0:
        raise ValueError("a must be nonzero mod p")
    return pow(a, (p - 1) // 2, p) == 1


@dataclass(frozen=True)
class PaleyField:
    """Prime p = 1 mod 4 with its set of nonzero quadratic residues."""

    p: int
    residues: frozenset[int]

    @classmethod
    def create(cls, p):
        p = int(p)
        if not _is_prime(p) or p >= MAX_PRIME:
            raise ValueError(f"p = {p} is not a prime below 2**31")
        if p % 4 != 1 or p < 5:
            raise ValueError(
                f"p = {p} is not 1 mod 4 (difference relation not symmetric)"
            )
        residues = frozenset(x * x % p for x in range(1, p))
        assert len(residues) == (p - 1) // 2
        return cls(p=p, residues=residues)

    def residue_mask(self):
        """mask[k] true iff k is a nonzero quadratic residue, k = 0..p-1."""
        mask = np.zeros(self.p, dtype=bool)
        mask[sorted(self.residues)] = True
        return mask


def paley_graph(p):
    """Paley graph on p vertices; (p-1)/2-regular with p(p-1)/4 edges."""
    field = PaleyField.create(p)
    mask = field.residue_mask()
    a, b = np.nonzero(np.triu(mask[(np.arange(p)[None, :] - np.arange(p)[:, None]) % p], 1))
    return Graph(n=p, u=a.astype(np.int64), v=b.astype(np.int64), w=np.ones(a.size))


@dataclass
class PaleySpectrum:
    """Closed-form Laplacian spectrum in the character basis."""

    p: int
    lambda_minus: float
    lambda_plus: float
    char_values: np.ndarray  # eigenvalue of the character e_k, k = 0..p-1


def paley_spectrum(p):
    field = PaleyField.create(p)
    root = math.sqrt(p)
    lam_minus = (p - root) / 2.0
    lam_plus = (p + root) / 2.0
    values = np.where(field.residue_mask(), lam_minus, lam_plus)
    values[0] = 0.0
    return PaleySpectrum(
        p=field.p, lambda_minus=lam_minus, lambda_plus=lam_plus, char_values=values
    )


@dataclass
class PaleyScore:
    """The three score values and the per-vertex field (complex, tiny imag)."""

    p: int
    s_zero: complex
    s_residue: complex
    s_nonresidue: complex
    per_vertex: np.ndarray

    def __post_init__(self):
        self.per_vertex = np.asarray(self.per_vertex, dtype=np.complex128)
        for name, val in (
            ("s_zero", self.s_zero),
            ("s_residue", self.s_residue),
            ("s_nonresidue", self.s_nonresidue),
        ):
            if abs(val.imag) > 1e-10:
                raise ValueError(f"{name} has imaginary part above 1e-10")
        if np.abs(self.per_vertex.imag).max(initial=0.0) > 1e-10:
            raise ValueError("per-vertex score has imaginary part above 1e-10")


def _assemble(p, mask, weight_minus, weight_plus):
    """Score values from the per-class exponential sums, O(p) per class.

    S_c(j) = sum_{k in class} exp(2 pi i jk / p) depends only on the class
    of j, so one residue j and one non-residue j determine everything.
    """
    ks = np.arange(p)
    res_k = ks[mask]
    non_k = ks[1:][~mask[1:]]
    j_res = int(res_k.min())
    j_non = int(non_k.min())

    def class_sums(j):
        phases = np.exp(2j * np.pi * j * ks / p)
        return phases[res_k].sum(), phases[non_k].sum()

    s_zero = weight_minus * len(res_k) + weight_plus * len(non_k) + 0j
    res_sums = class_sums(j_res)
    non_sums = class_sums(j_non)
    s_residue = weight_minus * res_sums[0] + weight_plus * res_sums[1]
    s_nonres = weight_minus * non_sums[0] + weight_plus * non_sums[1]
    per_vertex = np.where(mask, s_residue, s_nonres).astype(np.complex128)
    per_vertex[0] = s_zero
    return s_zero, s_residue, s_nonres, per_vertex


def paley_score_closed_form(p):
    """Phase-preserving score sum_{k>=1} lambda(k)^{-1/2} e^{2 pi i jk/p}."""
    spec = paley_spectrum(p)
    field = PaleyField.create(p)
    mask = field.residue_mask()
    s0, sr, sn, pv = _assemble(
        p, mask, spec.lambda_minus**-0.5, spec.lambda_plus**-0.5
    )
    return PaleyScore(p=p, s_zero=s0, s_residue=sr, s_nonresidue=sn, per_vertex=pv)


def paley_score_numeric(p):
    """Same score from a dense Laplacian solve, validated by projections.

    The numeric spectrum must cluster as {0, lambda_minus, lambda_plus}
    with the right multiplicities, and every character must project onto
    its cluster's eigenspace with residual at most 1e-8; otherwise
    "eigenspace mismatch" is raised.
    """
    p = int(p)
    if p > NUMERIC_MAX_PRIME:
        raise ValueError(f"numeric route limited to p <= {NUMERIC_MAX_PRIME}")
    field = PaleyField.create(p)
    mask = field.residue_mask()
    graph = paley_graph(p)
    report = dense_sym_eig(laplacian(graph, "combinatorial").op.densified())
    values = np.array([pair.value for pair in report.pairs])
    vectors = np.stack([pair.vector for pair in report.pairs], axis=1)

    if values[0] > 1e-9 * p:
        raise ValueError("eigenspace mismatch: smallest eigenvalue is not 0")
    lower = (values > 1e-9 * p) & (values < p / 2.0)
    upper = values >= p / 2.0
    half = (p - 1) // 2
    if lower.sum() != half or upper.sum() != half:
        raise ValueError("eigenspace mismatch: wrong cluster multiplicities")
    lam_minus = float(values[lower].mean())
    lam_plus = float(values[upper].mean())

    # validate the character basis against the numeric eigenspaces
    ks = np.arange(p)
    chars = np.exp(2j * np.pi * np.outer(ks, ks) / p)  # column k = e_k
    for cluster_mask, class_mask in ((lower, mask), (upper, ~mask)):
        basis = vectors[:, cluster_mask]
        cls = class_mask.copy()
        cls[0] = False
        block = chars[:, cls]
        resid = block - basis @ (basis.T @ block)
        rel = np.linalg.norm(resid, axis=0) / np.linalg.norm(block, axis=0)
        if rel.max(initial=0.0) > 1e-8:
            raise ValueError("eigenspace mismatch: character projection residual")

    s0, sr, sn, pv = _assemble(p, mask, lam_minus**-0.5, lam_plus**-0.5)
    return PaleyScore(p=p, s_zero=s0, s_residue=sr, s_nonresidue=sn, per_vertex=pv)
