"""Dense complex linear algebra kernel.

Hermitian eigendecomposition with a reproducible ordering and phase
convention, spectral matrix functions, Schatten norms, tensor products,
partial traces and support projectors. Everything is computed spectrally:
dimensions stay small (<= ~64), so exactness beats speed.

The universal numeric carrier is a dense complex ``numpy.ndarray``; matrices
exchanged as JSON use ``{"dim": n, "re": [[...]], "im": [[...]]}`` row-major.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from .errors import DimensionMismatch, DomainError, NotHermitian, NotPSD

# Absolute eigenvalue threshold (after scaling by max(1, operator norm))
# below which a direction does not count as support.
SUPPORT_TOL = 1e-10

# Eigenvalues in [-EIGENVALUE_CLIP, 0) are roundoff and are clipped to 0;
# anything more negative is an error for PSD-only operations.
EIGENVALUE_CLIP = 1e-10

HERMITICITY_TOL = 1e-10


def as_matrix(obj) -> np.ndarray:
    """Coerce to a finite, 2-D complex128 array."""
    m = np.asarray(obj, dtype=np.complex128)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got ndim={m.ndim}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise DomainError("matrix contains NaN or Inf entries")
    return m


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def is_hermitian(m: np.ndarray, tol: float = HERMITICITY_TOL) -> bool:
    scale = max(1.0, float(np.linalg.norm(m)))
    return float(np.linalg.norm(m - dagger(m))) <= tol * scale


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigen-pairs of a Hermitian matrix, eigenvalues sorted descending.

    Columns of ``eigenvectors`` are orthonormal and phase-fixed so that the
    first component of each eigenvector with magnitude above 1e-8 of its max
    is real and positive. This makes decompositions reproducible.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ dagger(v)


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    out = vectors.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        mags = np.abs(col)
        idx = int(np.argmax(mags > 1e-8 * mags.max()))
        pivot = col[idx]
        if np.abs(pivot) > 0:
            out[:, k] = col * (np.abs(pivot) / pivot)
    return out


def eig_hermitian(m) -> SpectralDecomposition:
    """Spectral decomposition of a Hermitian matrix.

    Raises NotHermitian when ``||m - m^dag||_F > 1e-10 * max(1, ||m||_F)``.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"matrix is {m.shape}, expected square")
    if not is_hermitian(m):
        raise NotHermitian("matrix is not Hermitian within 1e-10 (relative)")
    w, v = np.linalg.eigh((m + dagger(m)) / 2.0)
    order = np.argsort(-w, kind="stable")
    return SpectralDecomposition(w[order].astype(float), _fix_phases(v[:, order]))


def matrix_function(
    m,
    f: Callable[[np.ndarray], np.ndarray],
    zero_policy: Literal["apply", "skip"] = "apply",
    tol: float = SUPPORT_TOL,
) -> np.ndarray:
    """Apply a real scalar function to a Hermitian matrix spectrally.

    With ``zero_policy="skip"``, eigenvalues below the support threshold are
    passed through as 0 without evaluating ``f`` (the ``0 log 0 = 0``
    convention). Eigenvalues in [-1e-10, 0) are clipped to 0 first; raising
    DomainError if ``f`` comes out non-finite on a retained eigenvalue.
    """
    dec = eig_hermitian(m)
    lam = dec.eigenvalues.copy()
    scale = max(1.0, float(np.max(np.abs(lam))) if lam.size else 1.0)
    lam[(lam < 0) & (lam >= -EIGENVALUE_CLIP * scale)] = 0.0
    if zero_policy == "skip":
        keep = np.abs(lam) > tol * scale
        flam = np.zeros_like(lam)
        if np.any(keep):
            flam[keep] = f(lam[keep])
    elif zero_policy == "apply":
        with np.errstate(divide="ignore", invalid="ignore"):
            flam = f(lam) if lam.size else lam
    else:
        raise ValueError(f"unknown zero_policy {zero_policy!r}")
    flam = np.asarray(flam, dtype=float)
    if not np.all(np.isfinite(flam)):
        raise DomainError("scalar function non-finite on a retained eigenvalue")
    v = dec.eigenvectors
    out = (v * flam) @ dagger(v)
    return (out + dagger(out)) / 2.0


SchattenKind = Literal["trace", "hilbert_schmidt", "operator"]


def schatten_norm(m, kind: SchattenKind) -> float:
    """Schatten norms: trace (sum |a_i|), Hilbert-Schmidt (sqrt sum a_i^2),
    operator (max |a_i|).

    Hermitian input is routed through the eigenvalues; general square input
    through the singular values.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"matrix is {m.shape}, expected square")
    if is_hermitian(m):
        a = np.abs(np.linalg.eigvalsh((m + dagger(m)) / 2.0))
    else:
        a = np.linalg.svd(m, compute_uv=False)
    if kind == "trace":
        return float(np.sum(a))
    if kind == "hilbert_schmidt":
        return float(np.sqrt(np.sum(a * a)))
    if kind == "operator":
        return float(np.max(a)) if a.size else 0.0
    raise ValueError(f"unknown Schatten norm kind {kind!r}")


def tensor(a, b) -> np.ndarray:
    """Kronecker product; the first factor indexes the slow (left) subsystem."""
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace(m, dims: tuple[int, int], keep: Literal["S", "E"] = "S") -> np.ndarray:
    """Trace out one tensor factor of an operator on a d_S x d_E product space.

    ``keep="S"`` returns the d_S x d_S reduction, ``keep="E"`` the d_E x d_E one.
    """
    m = as_matrix(m)
    d_s, d_e = int(dims[0]), int(dims[1])
    n = d_s * d_e
    if m.shape != (n, n):
        raise DimensionMismatch(f"matrix is {m.shape}, expected ({n}, {n}) for dims {dims}")
    blocks = m.reshape(d_s, d_e, d_s, d_e)
    if keep == "S":
        return np.trace(blocks, axis1=1, axis2=3)
    if keep == "E":
        return np.trace(blocks, axis1=0, axis2=2)
    raise ValueError(f"keep must be 'S' or 'E', got {keep!r}")


def support_projector(m, tol: float = SUPPORT_TOL) -> np.ndarray:
    """Orthogonal projector onto the span of eigenvectors with eigenvalue > tol.

    The threshold is absolute after scaling by max(1, operator norm). Raises
    NotPSD when an eigenvalue lies below -tol (same scaling).
    """
    dec = eig_hermitian(m)
    lam = dec.eigenvalues
    scale = max(1.0, float(np.max(np.abs(lam))) if lam.size else 1.0)
    if lam.size and float(lam.min()) < -tol * scale:
        raise NotPSD(f"eigenvalue {lam.min():.3e} below -{tol * scale:.3e}")
    cols = dec.eigenvectors[:, lam > tol * scale]
    return cols @ dagger(cols)


def matrix_to_dict(m) -> dict:
    """JSON-ready form {"dim": n, "re": [[...]], "im": [[...]]} (square only)."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch("JSON matrix format is for square matrices")
    return {"dim": int(m.shape[0]), "re": m.real.tolist(), "im": m.imag.tolist()}


def matrix_from_dict(d: dict) -> np.ndarray:
    try:
        n = int(d["dim"])
        re = np.asarray(d["re"], dtype=float)
        im = np.asarray(d.get("im", np.zeros((n, n))), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise DimensionMismatch(f"malformed matrix object: {exc}") from exc
    if re.shape != (n, n) or im.shape != (n, n):
        raise DimensionMismatch(
            f"matrix entries have shape {re.shape}/{im.shape}, expected ({n}, {n})"
        )
    return as_matrix(re + 1j * im)
