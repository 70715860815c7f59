"""Quantum distinguishability quantifiers behind one uniform interface.

Every quantifier takes a pair of validated states and returns a
``QuantifierResult``; +inf only ever comes from the explicit support
containment check inside the relative entropy. Natural logarithms
throughout. Restricted to commuting pairs, each quantifier coincides with a
classical expression on the joint eigenvalue distributions, which
``classical_reduction`` evaluates through :mod:`divergelab.cdiv` as an
independent cross-check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from . import cdiv, matcore
from .cdiv import binary_entropy
from .errors import BadMu, DimMismatch, NotCommuting, WeightError
from .matcore import dagger
from .result import QuantifierResult
from .states import DensityMatrix, StatePair, commute, pure_state, purity, validate_density

ALL_TAGS = (
    "rel_entropy",
    "qsd",
    "holevo_skew",
    "trace_dist",
    "qjs",
    "bures",
    "hellinger",
    "hs_dist",
    "d_inf",
)

# Quantifiers contracting under every CPTP map, per the classification the
# verification suites enforce.
CONTRACTIVE = ("rel_entropy", "qsd", "holevo_skew", "trace_dist", "qjs", "bures", "hellinger")
NON_CONTRACTIVE = ("hs_dist", "d_inf")
BOUNDED = tuple(t for t in ALL_TAGS if t != "rel_entropy")
TRANSPOSE_INVARIANT = ("trace_dist", "rel_entropy", "qsd", "holevo_skew")
JOINTLY_CONVEX = ("rel_entropy", "hs_dist", "d_inf", "qsd", "holevo_skew", "qjs")

# Common value on every orthogonal pair, for the bounded contractive set.
PLATEAU_VALUE = {
    "trace_dist": 1.0,
    "holevo_skew": 1.0,
    "bures": 1.0,
    "hellinger": 1.0,
    "qsd": 1.0,
    "qjs": math.log(2.0),
}

_NEEDS_MU = ("qsd", "holevo_skew")


@dataclass(frozen=True)
class QuantifierId:
    """Quantifier selector: tag plus skewing parameter where applicable."""

    tag: str
    mu: Optional[float] = None

    def __post_init__(self):
        if self.tag not in ALL_TAGS:
            raise ValueError(f"unknown quantifier tag {self.tag!r}")
        if self.tag in _NEEDS_MU and not (self.mu is not None and 0.0 < self.mu < 1.0):
            raise BadMu(f"{self.tag} needs mu in (0, 1), got {self.mu!r}")

    @property
    def label(self) -> str:
        return self.tag if self.mu is None else f"{self.tag}(mu={self.mu:g})"


def quantifier(tag: str, mu: Optional[float] = None) -> QuantifierId:
    return QuantifierId(tag, mu if tag in _NEEDS_MU else None)


def _check_dims(rho: DensityMatrix, sigma: DensityMatrix) -> None:
    if rho.dim != sigma.dim:
        raise DimMismatch(f"state dims differ: {rho.dim} vs {sigma.dim}")


def von_neumann_entropy(rho: DensityMatrix) -> float:
    lam = rho.eigenvalues
    pos = lam > 0.0
    return float(-np.sum(lam[pos] * np.log(lam[pos])))


def _mix(a: DensityMatrix, b: DensityMatrix, weight_a: float) -> DensityMatrix:
    return validate_density(weight_a * a.matrix + (1.0 - weight_a) * b.matrix)


def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix) -> QuantifierResult:
    """Tr rho (log rho - log sigma) on the support of rho; +inf when the
    support of sigma does not contain the support of rho.

    Containment is decided by ``||(1 - P_sigma) rho (1 - P_sigma)||_op <=
    1e-10`` with P_sigma the support projector of sigma, so the value is
    never produced by taking the log of a clipped zero.
    """
    _check_dims(rho, sigma)
    lam, v = rho.eigenvalues, rho.eigenvectors
    kap, w = sigma.eigenvalues, sigma.eigenvectors
    ri = lam > matcore.SUPPORT_TOL
    rj = kap > matcore.SUPPORT_TOL
    excluded = w[:, ~rj]
    if excluded.shape[1]:
        # ||(1 - P_sigma) rho (1 - P_sigma)||_op, compressed onto the
        # excluded eigenvectors (an isometry, so eigenvalues agree).
        block = dagger(excluded) @ rho.matrix @ excluded
        if float(np.max(np.abs(np.linalg.eigvalsh((block + dagger(block)) / 2.0)))) > matcore.SUPPORT_TOL:
            return QuantifierResult.infinite()
    overlaps = np.abs(dagger(v[:, ri]) @ w[:, rj]) ** 2
    lam_r, kap_r = lam[ri], kap[rj]
    value = float(np.sum(lam_r * np.log(lam_r)) - (lam_r @ overlaps) @ np.log(kap_r))
    return QuantifierResult.of(value)


def quantum_skew_divergence(
    rho: DensityMatrix, sigma: DensityMatrix, mu: float
) -> QuantifierResult:
    """Skewed relative entropy against the mu-mixture, symmetrized and
    normalized to take values in [0, 1]; always finite."""
    if not 0.0 < mu < 1.0:
        raise BadMu(f"mu must lie in (0, 1), got {mu!r}")
    _check_dims(rho, sigma)
    m = _mix(rho, sigma, mu)
    first = relative_entropy(rho, m).value
    second = relative_entropy(sigma, m).value
    value = mu / math.log(1.0 / mu) * first + (1.0 - mu) / math.log(1.0 / (1.0 - mu)) * second
    return QuantifierResult.of(value)


def holevo_skew_divergence(
    rho: DensityMatrix, sigma: DensityMatrix, mu: float
) -> QuantifierResult:
    """Binary-entropy-normalized skew divergence; equals the Holevo quantity
    of the weighted two-state ensemble divided by h(mu)."""
    if not 0.0 < mu < 1.0:
        raise BadMu(f"mu must lie in (0, 1), got {mu!r}")
    _check_dims(rho, sigma)
    m = _mix(rho, sigma, mu)
    first = relative_entropy(rho, m).value
    second = relative_entropy(sigma, m).value
    value = mu / binary_entropy(mu) * first + (1.0 - mu) / binary_entropy(1.0 - mu) * second
    return QuantifierResult.of(value)


def holevo_chi(ensemble: Sequence[tuple[float, DensityMatrix]]) -> float:
    """Entropy of the ensemble average minus the average entropy."""
    weights = [w for w, _ in ensemble]
    try:
        cdiv.distribution(weights)
    except Exception as exc:
        raise WeightError(f"ensemble weights invalid: {exc}") from exc
    dim = ensemble[0][1].dim
    for _, state in ensemble:
        if state.dim != dim:
            raise DimMismatch("ensemble states must share a dimension")
    average = validate_density(sum(w * s.matrix for w, s in ensemble))
    value = von_neumann_entropy(average) - sum(w * von_neumann_entropy(s) for w, s in ensemble)
    return QuantifierResult.of(value).value


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> QuantifierResult:
    _check_dims(rho, sigma)
    eig = np.linalg.eigvalsh(rho.matrix - sigma.matrix)
    return QuantifierResult.of(0.5 * float(np.sum(np.abs(eig))))


def quantum_js(rho: DensityMatrix, sigma: DensityMatrix) -> QuantifierResult:
    """Half the sum of relative entropies against the even mixture."""
    _check_dims(rho, sigma)
    m = _mix(rho, sigma, 0.5)
    value = 0.5 * (relative_entropy(rho, m).value + relative_entropy(sigma, m).value)
    return QuantifierResult.of(value)


def _psd_sqrt(rho: DensityMatrix) -> np.ndarray:
    # sqrt amplifies eigenvalue roundoff (1e-16 -> 1e-8); zero the
    # sub-support eigenvalues so orthogonal supports stay orthogonal.
    lam = np.where(rho.eigenvalues > matcore.SUPPORT_TOL, rho.eigenvalues, 0.0)
    v = rho.eigenvectors
    return (v * np.sqrt(lam)) @ dagger(v)


def _sqrt_clipped(x: float) -> float:
    return math.sqrt(QuantifierResult.of(x).value)


def bures_distance(rho: DensityMatrix, sigma: DensityMatrix) -> QuantifierResult:
    """sqrt(1 - Tr |sqrt(sigma) sqrt(rho)|)."""
    _check_dims(rho, sigma)
    affinity = matcore.schatten_norm(_psd_sqrt(sigma) @ _psd_sqrt(rho), "trace")
    return QuantifierResult.of(_sqrt_clipped(1.0 - affinity))


def hellinger_distance(rho: DensityMatrix, sigma: DensityMatrix) -> QuantifierResult:
    """sqrt(1 - Tr sqrt(sigma) sqrt(rho))."""
    _check_dims(rho, sigma)
    overlap = float(np.real(np.trace(_psd_sqrt(sigma) @ _psd_sqrt(rho))))
    return QuantifierResult.of(_sqrt_clipped(1.0 - overlap))


def hs_distance(rho: DensityMatrix, sigma: DensityMatrix) -> QuantifierResult:
    """Hilbert-Schmidt norm of the difference, scaled by 1/sqrt(2) so a pure
    orthogonal qubit pair sits at 1."""
    _check_dims(rho, sigma)
    return QuantifierResult.of(float(np.linalg.norm(rho.matrix - sigma.matrix)) / math.sqrt(2.0))


class DInfinityResult(NamedTuple):
    result: QuantifierResult
    maximizer: DensityMatrix


def d_infinity(rho: DensityMatrix, sigma: DensityMatrix) -> DInfinityResult:
    """Operator norm of the difference, with the rank-one state achieving the
    maximum of Tr |w (rho - sigma)| over states w as a witness."""
    _check_dims(rho, sigma)
    diff = rho.matrix - sigma.matrix
    w, v = np.linalg.eigh((diff + dagger(diff)) / 2.0)
    idx = int(np.argmax(np.abs(w)))
    return DInfinityResult(
        QuantifierResult.of(float(np.abs(w[idx]))), pure_state(v[:, idx])
    )


def evaluate(q: QuantifierId, rho: DensityMatrix, sigma: DensityMatrix) -> QuantifierResult:
    """Uniform entry point used by the suites and the CLI."""
    if q.tag == "rel_entropy":
        return relative_entropy(rho, sigma)
    if q.tag == "qsd":
        return quantum_skew_divergence(rho, sigma, q.mu)
    if q.tag == "holevo_skew":
        return holevo_skew_divergence(rho, sigma, q.mu)
    if q.tag == "trace_dist":
        return trace_distance(rho, sigma)
    if q.tag == "qjs":
        return quantum_js(rho, sigma)
    if q.tag == "bures":
        return bures_distance(rho, sigma)
    if q.tag == "hellinger":
        return hellinger_distance(rho, sigma)
    if q.tag == "hs_dist":
        return hs_distance(rho, sigma)
    return d_infinity(rho, sigma).result


def assignment_factor(q: QuantifierId, tau: DensityMatrix) -> float:
    """Exact scaling of the quantifier under tensoring with a fixed state:
    1 for the contractive set, sqrt(purity) for hs_dist, the largest
    eigenvalue for d_inf."""
    if q.tag == "hs_dist":
        return math.sqrt(purity(tau))
    if q.tag == "d_inf":
        return float(np.max(tau.eigenvalues))
    return 1.0


def _joint_eigenbasis(rho: DensityMatrix, sigma: DensityMatrix) -> np.ndarray:
    """Common eigenbasis of a commuting pair.

    Eigenvalue clusters of the first state are resolved by diagonalizing the
    second state inside each degenerate block.
    """
    lam = rho.eigenvalues
    vecs = rho.eigenvectors
    n = rho.dim
    cluster_tol = 1e-8
    columns = []
    i = 0
    while i < n:
        j = i
        while j + 1 < n and abs(lam[j + 1] - lam[i]) <= cluster_tol:
            j += 1
        block = vecs[:, i : j + 1]
        if block.shape[1] > 1:
            sub = dagger(block) @ sigma.matrix @ block
            _, u = np.linalg.eigh((sub + dagger(sub)) / 2.0)
            block = block @ u
        columns.append(block)
        i = j + 1
    return np.hstack(columns)


class ClassicalReduction(NamedTuple):
    quantum_value: QuantifierResult
    classical_value: QuantifierResult
    gap: float


def classical_reduction(
    q: QuantifierId,
    rho: DensityMatrix,
    sigma: DensityMatrix,
    commute_tol: float = 1e-10,
) -> ClassicalReduction:
    """Compare a quantifier on a commuting pair against its classical form on
    the joint eigenvalue distributions (matched ordering)."""
    _check_dims(rho, sigma)
    if not commute(StatePair(rho, sigma), tol=commute_tol):
        raise NotCommuting(f"pair does not commute within {commute_tol}")
    basis = _joint_eigenbasis(rho, sigma)
    p_vals = np.real(np.diagonal(dagger(basis) @ rho.matrix @ basis))
    q_vals = np.real(np.diagonal(dagger(basis) @ sigma.matrix @ basis))
    p_vals = np.where(np.abs(p_vals) < 1e-14, 0.0, np.clip(p_vals, 0.0, None))
    q_vals = np.where(np.abs(q_vals) < 1e-14, 0.0, np.clip(q_vals, 0.0, None))
    p = cdiv.distribution(p_vals / p_vals.sum())
    s = cdiv.distribution(q_vals / q_vals.sum())

    if q.tag == "rel_entropy":
        classical = cdiv.f_divergence(cdiv.kl(), p, s)
    elif q.tag == "qsd":
        classical = cdiv.f_divergence(cdiv.skew(q.mu), p, s)
    elif q.tag == "holevo_skew":
        classical = cdiv.f_divergence(cdiv.hsd(q.mu), p, s)
    elif q.tag == "trace_dist":
        classical = cdiv.f_divergence(cdiv.vd(), p, s)
    elif q.tag == "qjs":
        classical = cdiv.f_divergence(cdiv.js(), p, s)
    elif q.tag in ("bures", "hellinger"):
        classical = QuantifierResult.of(
            _sqrt_clipped(1.0 - cdiv.bhattacharyya_coefficient(p, s))
        )
    elif q.tag == "hs_dist":
        classical = QuantifierResult.of(cdiv.euclidean_distance(p, s) / math.sqrt(2.0))
    else:  # d_inf
        classical = QuantifierResult.of(cdiv.chebyshev_distance(p, s))

    quantum = evaluate(q, rho, sigma)
    if not quantum.finite and not classical.finite:
        gap = 0.0
    elif quantum.finite != classical.finite:
        gap = math.inf
    else:
        gap = abs(quantum.value - classical.value)
    return ClassicalReduction(quantum, classical, gap)
