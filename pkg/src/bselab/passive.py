"""Passive linear-optical transformations.

A passive transformation is fixed by an n x n unitary M acting on the mode
annihilation operators, U c_j U^{-1} = sum_k M_{jk} c_k.  The Fock-space
operator is the exponential lift U = exp(-sum_{jk} (ln M)_{jk} c_j^dag c_k)
with the principal matrix logarithm; it leaves the vacuum invariant and,
because the generator conserves total photon number, is exactly unitary and
block-diagonal over photon-number sectors even after truncation.

On coherent amplitudes the same map reads, in row-vector form,
alpha' = alpha . conj(M)  (equivalently alpha'_col = M^dag alpha_col),
which for real M reduces to plain right multiplication by M.  This closed
form is the truncation-free fast path for classical ensembles.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.stats

from .hilbert import DensityOperator, FockArena, annihilation_matrix
from .states import CoherentEnsemble

UNITARITY_TOL = 1e-12
LOG_ROUNDTRIP_TOL = 1e-10
VACUUM_TOL = 1e-10
SUBSPACE_UNITARITY_TOL = 1e-8


@dataclass(frozen=True)
class ModeUnitary:
    """An n x n unitary acting on the vector of mode annihilation operators."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("mode matrix must be square")
        dev = float(np.abs(m.conj().T @ m - np.eye(m.shape[0])).max())
        if dev > UNITARITY_TOL:
            raise ValueError(f"matrix is not unitary: deviation {dev:.3e}")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0]

    def inverse(self) -> "ModeUnitary":
        return ModeUnitary(self.matrix.conj().T)


def beam_splitter_matrix(theta: float, phi0: float = 0.0, phi1: float = 0.0) -> ModeUnitary:
    """The standard 2x2 beam splitter mode matrix, rows/columns (a, b):

        [[ cos(theta) e^{i phi0},  sin(theta) e^{i phi1}],
         [-sin(theta) e^{-i phi1}, cos(theta) e^{-i phi0}]]

    Its determinant is cos^2 + sin^2 = 1 for every parameter triple.
    """
    c, s = np.cos(theta), np.sin(theta)
    m = np.array(
        [
            [c * np.exp(1j * phi0), s * np.exp(1j * phi1)],
            [-s * np.exp(-1j * phi1), c * np.exp(-1j * phi0)],
        ]
    )
    mu = ModeUnitary(m)
    det = np.linalg.det(mu.matrix)
    assert abs(det - 1.0) <= 1e-12, "beam splitter determinant drifted from 1"
    return mu


def log_unitary(m: ModeUnitary) -> np.ndarray:
    """Anti-Hermitian principal logarithm L of a unitary, exp(L) = M.

    Computed from the complex Schur form (diagonal for a normal matrix, and
    stable under eigenvalue degeneracy) with eigenphases taken in (-pi, pi],
    tie-broken to +pi.
    """
    t, z = scipy.linalg.schur(m.matrix, output="complex")
    phases = np.angle(np.diagonal(t))  # np.angle lands in (-pi, pi]
    log = (z * (1j * phases)) @ z.conj().T
    roundtrip = (z * np.exp(1j * phases)) @ z.conj().T
    dev = float(np.abs(roundtrip - m.matrix).max())
    if dev > LOG_ROUNDTRIP_TOL:
        raise ValueError(f"matrix logarithm round trip failed: deviation {dev:.3e}")
    return (log - log.conj().T) / 2.0


@dataclass(frozen=True)
class LiftedUnitary:
    """The Fock-space operator of a ModeUnitary on a truncated arena."""

    arena: FockArena
    matrix: np.ndarray
    source: ModeUnitary

    def protected_indices(self) -> np.ndarray:
        """Basis indices of the total-photon <= cutoff/2 subspace on which
        the unitarity and conjugation contracts are honestly testable."""
        return self.arena.subspace_indices(self.arena.cutoff // 2)

    def apply_to_vector(self, amplitudes: np.ndarray) -> np.ndarray:
        return self.matrix @ amplitudes


def lift_unitary(m: ModeUnitary, arena: FockArena) -> LiftedUnitary:
    """exp(-sum_{jk} (ln M)_{jk} c_j^dag c_k) as a dense matrix.

    The generator is block-diagonal over total-photon-number sectors, so the
    exponential is taken sector by sector; sectors whose occupation tuples
    all fit under the cutoff are exact, truncation only touches the boundary
    sectors.
    """
    if m.n_modes != arena.n_modes:
        raise ValueError("mode count mismatch between unitary and arena")
    log = log_unitary(m)
    dim = arena.total_dim
    gen = np.zeros((dim, dim), dtype=complex)
    ladders = [annihilation_matrix(arena, k) for k in range(arena.n_modes)]
    for j in range(arena.n_modes):
        adag_j = ladders[j].conj().T
        for k in range(arena.n_modes):
            if log[j, k] != 0:
                gen -= log[j, k] * (adag_j @ ladders[k])

    matrix = np.zeros((dim, dim), dtype=complex)
    for idx in arena.photon_sector_indices().values():
        block = gen[np.ix_(idx, idx)]
        matrix[np.ix_(idx, idx)] = scipy.linalg.expm(block)

    lifted = LiftedUnitary(arena, matrix, m)
    vac_dev = float(np.abs(matrix[:, 0] - np.eye(dim)[:, 0]).max())
    if vac_dev > VACUUM_TOL:
        raise ValueError(f"lifted operator moves the vacuum: deviation {vac_dev:.3e}")
    idx = lifted.protected_indices()
    sub = matrix[:, idx]
    unit_dev = float(np.abs(sub.conj().T @ sub - np.eye(idx.size)).max())
    if unit_dev > SUBSPACE_UNITARITY_TOL:
        raise ValueError(
            f"lifted operator not unitary on protected subspace: {unit_dev:.3e}"
        )
    return lifted


def conjugation_residual(u: LiftedUnitary, m: ModeUnitary, mode: int) -> float:
    """Max-norm of U c_mode U^dag - sum_k M_{mode,k} c_k on the protected
    (total photon <= cutoff/2) subspace; the module's self-test."""
    if not 0 <= mode < m.n_modes:
        raise ValueError("mode index out of range")
    arena = u.arena
    conj = u.matrix @ annihilation_matrix(arena, mode) @ u.matrix.conj().T
    target = sum(
        m.matrix[mode, k] * annihilation_matrix(arena, k) for k in range(m.n_modes)
    )
    idx = u.protected_indices()
    diff = (conj - target)[np.ix_(idx, idx)]
    return float(np.abs(diff).max())


def apply_to_density(u: LiftedUnitary, rho: DensityOperator) -> DensityOperator:
    """U rho U^dag, re-validated (a validation failure signals truncation
    overflow rather than a physics finding)."""
    if u.arena != rho.arena:
        raise ValueError("arena mismatch between operator and state")
    out = u.matrix @ rho.matrix @ u.matrix.conj().T
    out = (out + out.conj().T) / 2.0
    return DensityOperator(rho.arena, out, leak_tol=rho.leak_tol, psd_tol=rho.psd_tol)


def _compositions(total: int, parts: int):
    """All occupation tuples of `parts` modes summing to `total`, lex order."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


def _sector_generator_block(log: np.ndarray, basis: list[tuple[int, ...]]) -> np.ndarray:
    """The matrix of sum_{jk} L_{jk} c_j^dag c_k restricted to one
    total-photon sector, in the given occupation-tuple basis."""
    pos = {t: i for i, t in enumerate(basis)}
    n_modes = log.shape[0]
    block = np.zeros((len(basis), len(basis)), dtype=complex)
    for q, t in enumerate(basis):
        for k in range(n_modes):
            if t[k] == 0:
                continue
            for j in range(n_modes):
                if j == k:
                    block[q, q] += log[j, j] * t[j]
                else:
                    shifted = list(t)
                    shifted[k] -= 1
                    shifted[j] += 1
                    p = pos[tuple(shifted)]
                    block[p, q] += log[j, k] * np.sqrt(t[k] * (t[j] + 1))
    return block


def _sector_tail_bound(mean: float, tail_eps: float) -> int:
    """Smallest n with Poisson(mean) tail P(N >= n) <= tail_eps."""
    if mean <= 0.0:
        return 0
    n = max(1, int(mean))
    while scipy.stats.poisson.sf(n - 1, mean) > tail_eps:
        n += 1
    return n


def transform_coherent_exact(
    m: ModeUnitary, alphas, arena: FockArena, tail_eps: float = 1e-20
) -> np.ndarray:
    """Amplitudes of the lifted unitary applied to |alphas>, projected to
    the arena truncation *after* the transform.

    The lift generator conserves total photon number, so the operator is
    exact on every sector; evaluating it sector by sector (up to a sector
    bound where the Poissonian tail drops below ``tail_eps``) avoids the
    boundary-clipping artifacts of the dense truncated lift, whose error
    near the cutoff would otherwise swamp tight PPT diagnostics.
    """
    alphas = np.atleast_1d(np.asarray(alphas, dtype=complex))
    if alphas.shape != (arena.n_modes,):
        raise ValueError("need one amplitude per mode")
    log = log_unitary(m)
    mean = float(np.sum(np.abs(alphas) ** 2))
    n_max = _sector_tail_bound(mean, tail_eps)
    prefactor = np.exp(-mean / 2.0)

    out = np.zeros(arena.total_dim, dtype=complex)
    for n in range(n_max + 1):
        basis = list(_compositions(n, arena.n_modes))
        amps = np.empty(len(basis), dtype=complex)
        for i, t in enumerate(basis):
            value = prefactor
            for a, occ in zip(alphas, t):
                value *= a**occ / math.sqrt(_factorial(occ))
            amps[i] = value
        block = scipy.linalg.expm(-_sector_generator_block(log, basis))
        transformed = block @ amps
        for i, t in enumerate(basis):
            if max(t) < arena.cutoff:
                out[arena.encode(t)] = transformed[i]
    return out


@functools.lru_cache(maxsize=None)
def _factorial(n: int) -> int:
    return math.factorial(n)


def transform_ensemble(ens: CoherentEnsemble, m: ModeUnitary) -> CoherentEnsemble:
    """Closed-form image of a classical ensemble under a passive unitary.

    Weights are untouched; each amplitude row is right-multiplied by
    conj(M), the coherent-amplitude image of conjugation by the lifted
    operator (for real M this is plain right multiplication by M).  The
    output is again a valid ensemble, which is the constructive
    separability certificate.
    """
    if ens.n_modes != m.n_modes:
        raise ValueError("mode count mismatch between ensemble and unitary")
    return CoherentEnsemble(ens.n_modes, ens.weights, ens.alphas @ np.conj(m.matrix))
