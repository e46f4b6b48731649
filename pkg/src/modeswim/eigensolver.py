"""Generalized symmetric eigensolver for the plate pencil (K, M).

The primary path is ARPACK shift-invert on (K - sigma*M, M) with a fixed
starting vector for reproducibility; a dense path (Cholesky reduction of M
inside LAPACK's generalized solver) serves small systems and doubles as the
independent oracle in tests. Shapes are mass normalized, sorted ascending,
sign canonicalized, and numerically degenerate pairs are rotated to a
deterministic orientation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg as dla
import scipy.sparse.linalg as sla

from .errors import ConvergenceError, DomainError, SolverError
from .fem import SystemMatrices
from .mesh import apply_mirror, mirror_map

# Eigenvalues this far below the basis maximum count as rigid-body modes.
RIGID_EIGENVALUE_RATIO = 1e-8
# Pairs closer than this are treated as one numerically degenerate subspace.
# Kept well below the 1e-6 residual cap: remixing a pair split by eps adds a
# residual of order eps to the rotated shapes.
_CANONICAL_PAIR_TOL = 1e-8
_DENSE_CUTOFF = 3000


@dataclass
class ModalBasis:
    """Mass-normalized modes on the full DOF numbering.

    frequencies are ascending [Hz]; shapes[:, k] is the k-th mode expanded
    to the full mesh DOF space (zeros on constrained DOFs).
    """

    frequencies: np.ndarray
    shapes: np.ndarray
    medium: str
    mesh: object
    matrices: SystemMatrices

    def __len__(self):
        return len(self.frequencies)

    def rigid_count(self):
        """Modes whose eigenvalue sits in the rigid-body cluster."""
        lam = (2.0 * np.pi * self.frequencies) ** 2
        if lam.size == 0 or lam.max() == 0:
            return 0
        return int(np.count_nonzero(lam < RIGID_EIGENVALUE_RATIO * lam.max()))

    def elastic_frequencies(self):
        return self.frequencies[self.rigid_count():]

    def mass_inner(self, a, b):
        """M-weighted inner product of two full-space DOF vectors."""
        ra = self.matrices.restrict(np.asarray(a))
        rb = self.matrices.restrict(np.asarray(b))
        return np.vdot(ra, self.matrices.M @ rb)


def _canonical_signs(shapes):
    for k in range(shapes.shape[1]):
        col = shapes[:, k]
        i = int(np.argmax(np.abs(col)))
        if col[i] < 0:
            shapes[:, k] = -col
    return shapes


def _canonicalize_pairs(freqs, shapes, matrices):
    """Rotate numerically degenerate pairs to maximize x-mirror symmetry.

    The realized shape inside a degenerate subspace is arbitrary; picking
    the rotation with the largest mirror autocorrelation makes solver
    output reproducible across backends. Meshes without the mirror
    symmetry are left untouched.
    """
    try:
        perm, signs = mirror_map(matrices.mesh, "x")
    except Exception:
        return shapes
    m = matrices.M
    k = 0
    while k + 1 < len(freqs):
        f0, f1 = freqs[k], freqs[k + 1]
        if f0 > 0 and (f1 - f0) <= _CANONICAL_PAIR_TOL * f0:
            pair = shapes[:, k:k + 2]
            mirrored = np.column_stack(
                [apply_mirror(pair[:, j], perm, signs) for j in range(2)])
            red = matrices.restrict(pair)
            red_mirror = matrices.restrict(mirrored)
            q = red.T @ (m @ red_mirror)
            q = 0.5 * (q + q.T)
            _, vecs = np.linalg.eigh(q)
            rot = vecs[:, ::-1]  # descending: most symmetric first
            if np.linalg.det(rot) < 0:
                rot[:, 1] = -rot[:, 1]
            shapes[:, k:k + 2] = pair @ rot
            k += 2
        else:
            k += 1
    return shapes


def _finalize(eigvals, vectors, matrices, medium):
    order = np.argsort(eigvals)
    eigvals = eigvals[order]
    vectors = vectors[:, order]
    lam_scale = max(abs(eigvals).max(), np.finfo(float).tiny)
    eigvals = np.where(np.abs(eigvals) < 1e-12 * lam_scale, 0.0, eigvals)
    if eigvals.min() < -1e-6 * lam_scale:
        raise SolverError(
            f"negative eigenvalue {eigvals.min():.3e} indicates an indefinite pencil")
    eigvals = np.clip(eigvals, 0.0, None)

    m = matrices.M
    for k in range(vectors.shape[1]):
        norm = math.sqrt(abs(vectors[:, k] @ (m @ vectors[:, k])))
        vectors[:, k] /= norm
    freqs = np.sqrt(eigvals) / (2.0 * np.pi)
    shapes = matrices.expand(vectors)
    shapes = _canonicalize_pairs(freqs, shapes, matrices)
    shapes = _canonical_signs(shapes)
    return ModalBasis(frequencies=freqs, shapes=shapes, medium=medium,
                      mesh=matrices.mesh, matrices=matrices)


def _default_sigma(matrices):
    # Slightly negative shift: K - sigma*M stays positive definite, the
    # rigid cluster at ~0 is resolved, and "nearest to sigma" coincides
    # with "smallest" on the nonnegative spectrum.
    kd = matrices.K.diagonal()
    md = matrices.M.diagonal()
    ratio = kd / md
    return -1e-3 * float(ratio.min())


def solve_modes(matrices: SystemMatrices, count, shift_hz=0.0, method="shift_invert",
                medium="dry"):
    """Lowest `count` eigenpairs of K phi = (2 pi f)^2 M phi.

    method: 'shift_invert' (ARPACK, the primary path), 'dense' (LAPACK via
    M-Cholesky reduction, the oracle), or 'auto'. Small systems where
    ARPACK cannot run fall back to the dense path.
    """
    n = matrices.n_active
    if count < 1 or count > n:
        raise DomainError(f"count must be in [1, {n}], got {count}")
    if shift_hz < 0:
        raise DomainError("shift frequency must be >= 0")

    use_dense = method == "dense" or (method in ("auto", "shift_invert")
                                      and count >= n - 1)
    if method not in ("dense", "shift_invert", "auto"):
        raise DomainError(f"unknown method {method!r}")

    if use_dense:
        if n > _DENSE_CUTOFF:
            raise SolverError(
                f"dense path limited to {_DENSE_CUTOFF} DOFs, system has {n}")
        w, v = dla.eigh(matrices.K.toarray(), matrices.M.toarray(),
                        subset_by_index=[0, count - 1])
        return _finalize(w, v, matrices, medium)

    sigma = (2.0 * math.pi * shift_hz) ** 2 if shift_hz > 0 else _default_sigma(matrices)
    rng = np.random.default_rng(1234)  # fixed start vector: reproducible runs
    v0 = rng.standard_normal(n)
    try:
        w, v = sla.eigsh(matrices.K, k=count, M=matrices.M, sigma=sigma,
                         which="LM", v0=v0, maxiter=4000)
    except sla.ArpackNoConvergence as exc:
        got = len(exc.eigenvalues)
        raise ConvergenceError(
            f"shift-invert converged only {got}/{count} modes at sigma={sigma:.3e}; "
            f"residual report: {exc}") from exc
    except RuntimeError as exc:
        raise SolverError(
            f"factorization broke down at sigma={sigma:.3e}; "
            f"try a different shift ({exc})") from exc
    basis = _finalize(w, v, matrices, medium)
    _check_residuals(basis)
    return basis


def _check_residuals(basis, cap=1e-6):
    mats = basis.matrices
    lam = (2.0 * np.pi * basis.frequencies) ** 2
    lam_max = lam.max() if len(lam) else 0.0
    for k, f in enumerate(basis.frequencies):
        if lam[k] < RIGID_EIGENVALUE_RATIO * max(lam_max, 1.0):
            continue
        phi = mats.restrict(basis.shapes[:, k])
        r = mats.K @ phi - lam[k] * (mats.M @ phi)
        denom = np.linalg.norm(mats.K @ phi)
        if denom > 0 and np.linalg.norm(r) / denom > cap:
            raise ConvergenceError(
                f"mode {k} at {f:.4g} Hz has residual "
                f"{np.linalg.norm(r) / denom:.2e} > {cap:.0e}")


def detect_degenerate_pairs(basis: ModalBasis, relative_tolerance):
    """Adjacent disjoint pairs (i, i+1) with spacing within the tolerance.

    Rigid modes are excluded. Greedy left to right, so each mode belongs
    to at most one pair.
    """
    if not 0 <= relative_tolerance < 0.1:
        raise DomainError(
            f"relative_tolerance must be in [0, 0.1), got {relative_tolerance}")
    pairs = []
    start = basis.rigid_count()
    f = basis.frequencies
    i = start
    while i + 1 < len(f):
        if f[i + 1] - f[i] <= relative_tolerance * f[i]:
            pairs.append((i, i + 1))
            i += 2
        else:
            i += 1
    return pairs
