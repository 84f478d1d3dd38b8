"""Finite shift-invariant spaces under circular shifts.

A subspace of length-M signals invariant under circular shift by L splits,
in the unitary DFT domain, into K = M/L independent "fibers": for each
frequency class w in {0,...,K-1} the L aliased bins w + K*t carry one
vector in C^L, and shifting by L multiplies the whole fiber by a unimodular
constant.  Optimal models therefore come from per-frequency Hermitian
eigenproblems on the Gramian G(w)_ij = sum_t fhat_i(w+Kt) conj(fhat_j(w+Kt)):
the model error is the sum of the trailing eigenvalues over all w, and the
generators built from the leading eigenpairs form a Parseval frame (their
own Gramian is a 0/1 orthogonal projection at every w).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace as dc_replace

import numpy as np

from .bundles import Partition
from .errors import EmptyDataSet, LengthMismatch, StructureMismatch
from .solver import SolveConfig, SolveReport, _build_report, _multistart, _verify_certificate
from .spectral import sym_eigen
from .subspace import DataSet

# Eigenvalues below ZERO_TOL * (largest over all frequencies) count as zero
# when inverting for the generator normalisation.
ZERO_TOL = 1e-12

DEGENERACY_TOL = 1e-10


@dataclass(frozen=True)
class ShiftStructure:
    """Signals of length M under circular shift by L (L must divide M)."""

    signal_len: int
    shift_step: int

    def __post_init__(self):
        if self.signal_len < 1 or self.shift_step < 1:
            raise StructureMismatch("signal_len and shift_step must be >= 1")
        if self.signal_len % self.shift_step != 0:
            raise StructureMismatch(
                f"shift step {self.shift_step} does not divide signal length {self.signal_len}"
            )

    @property
    def num_freqs(self):
        """K = M / L frequency classes."""
        return self.signal_len // self.shift_step

    @property
    def num_aliases(self):
        """L alias offsets per frequency class."""
        return self.shift_step


@dataclass(frozen=True)
class FreqGramian:
    """Per-frequency Hermitian PSD Gramians with their eigendecompositions.

    ``matrices[w]`` is m x m; ``eigenvalues[w]`` is sorted descending and
    clamped at zero; ``eigenvectors[w][:, i]`` pairs with ``eigenvalues[w][i]``.
    """

    structure: ShiftStructure
    matrices: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True)
class SISModel:
    """A shift-invariant model: generator spectra forming a Parseval frame.

    ``generators`` has shape (s, M) holding the unitary-DFT spectra of the
    s <= n generators; ``per_freq_rank[w]`` is the local dimension at
    frequency class w.
    """

    structure: ShiftStructure
    generators: np.ndarray
    per_freq_rank: np.ndarray

    @property
    def length(self):
        return self.generators.shape[0]


@dataclass(frozen=True)
class SISFit:
    model: SISModel
    error: float
    spectrum: FreqGramian
    degenerate: bool


def _unitary_spectra(vectors, structure):
    m, length = vectors.shape
    if length != structure.signal_len:
        raise LengthMismatch(
            f"signals of length {length} vs structure length {structure.signal_len}"
        )
    return np.fft.fft(vectors, axis=1) / math.sqrt(structure.signal_len)


def _fibers_from_spectra(spectra, structure):
    """(m, M) spectra -> (m, K, L) fibers; bin w + K*t sits at [. , w, t]."""
    m = spectra.shape[0]
    lk = (structure.num_aliases, structure.num_freqs)
    return spectra.reshape(m, *lk).transpose(0, 2, 1)


def _spectra_from_fibers(fibers):
    """Inverse of _fibers_from_spectra."""
    m, num_freqs, num_aliases = fibers.shape
    return fibers.transpose(0, 2, 1).reshape(m, num_freqs * num_aliases)


def _signal_fibers(dataset, structure):
    return _fibers_from_spectra(_unitary_spectra(dataset.vectors, structure), structure)


def _eigendecompose_per_freq(grams):
    num_freqs, m, _ = grams.shape
    vals = np.zeros((num_freqs, m))
    vecs = np.zeros((num_freqs, m, m), dtype=np.complex128)
    for w in range(num_freqs):
        eig = sym_eigen(grams[w])
        vals[w] = eig.eigenvalues
        vecs[w] = eig.eigenvectors
    return vals, vecs


def gramian(dataset: DataSet, structure: ShiftStructure) -> FreqGramian:
    """Per-frequency Gramian of the data under the unitary DFT convention.

    ``G(w)_ij = sum_t fhat_i(w + K t) conj(fhat_j(w + K t))`` so that the
    traces over all w sum to the total signal energy.
    """
    fib = _signal_fibers(dataset, structure)
    grams = np.einsum("ikt,jkt->kij", fib, fib.conj())
    grams = (grams + grams.conj().transpose(0, 2, 1)) / 2.0
    if dataset.m:
        vals, vecs = _eigendecompose_per_freq(grams)
    else:
        vals = np.zeros((structure.num_freqs, 0))
        vecs = np.zeros((structure.num_freqs, 0, 0), dtype=np.complex128)
    for arr in (grams, vals, vecs):
        arr.flags.writeable = False
    return FreqGramian(structure, grams, vals, vecs)


def _model_fibers(model):
    return _fibers_from_spectra(model.generators, model.structure)


def _residuals_to_fibers(fib_all, gen_fibers):
    """Squared distance of every signal (rows of fib_all) to the fiber span."""
    if gen_fibers.shape[0] == 0:
        return np.real(np.einsum("mkt,mkt->m", fib_all, fib_all.conj()))
    coeff = np.einsum("mkt,skt->msk", fib_all, gen_fibers.conj())
    rec = np.einsum("msk,skt->mkt", coeff, gen_fibers)
    res = fib_all - rec
    return np.real(np.einsum("mkt,mkt->m", res, res.conj()))


def best_sis(dataset: DataSet, structure: ShiftStructure, n,
             zero_tol=ZERO_TOL) -> SISFit:
    """Optimal shift-invariant model of length <= n with its exact error.

    Per frequency class the Gramian's top-n eigenpairs give the generator
    fibers ``sigma~_i(w) y_i(w)^H F(w)`` (zero where the eigenvalue vanishes);
    the error is the sum of the remaining eigenvalues over all frequencies.
    Active fibers are re-orthonormalised per frequency so the Parseval
    property holds to machine precision.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    gram = gramian(dataset, structure)
    m = dataset.m
    num_freqs = structure.num_freqs
    num_aliases = structure.num_aliases
    lam = gram.eigenvalues

    s_max = min(n, m)
    lam_max = float(lam[:, 0].max()) if m else 0.0
    thr = zero_tol * lam_max

    gen_fibers = np.zeros((s_max, num_freqs, num_aliases), dtype=np.complex128)
    rank = np.zeros(num_freqs, dtype=np.intp)
    if s_max and lam_max > 0.0:
        fib = _signal_fibers(dataset, structure)          # (m, K, L)
        fib_km = fib.transpose(1, 0, 2)                   # (K, m, L)
        for i in range(s_max):
            active = lam[:, i] > thr
            if not np.any(active):
                break
            sigma = np.zeros(num_freqs)
            sigma[active] = 1.0 / np.sqrt(lam[active, i])
            y = gram.eigenvectors[:, :, i]                # (K, m)
            gen_fibers[i] = sigma[:, None] * np.einsum("km,kmt->kt", y.conj(), fib_km)
            rank[active] += 1
        # Per-frequency Gram-Schmidt over the active fibers: exact in theory,
        # this scrubs the noise amplified by 1/sqrt(lambda) near the cutoff.
        for w in range(num_freqs):
            for i in range(int(rank[w])):
                v = gen_fibers[i, w]
                for j in range(i):
                    v = v - np.vdot(gen_fibers[j, w], v) * gen_fibers[j, w]
                nrm = np.linalg.norm(v)
                if nrm > 0.0:
                    gen_fibers[i, w] = v / nrm

    keep = int(rank.max()) if num_freqs else 0
    spectra = _spectra_from_fibers(gen_fibers[:keep])
    error = float(np.sum(lam[:, n:])) if n < m else 0.0
    error = max(error, 0.0)

    degenerate = False
    if 0 < n < m and lam_max > 0.0:
        gaps = np.abs(lam[:, n - 1] - lam[:, n])
        degenerate = bool(np.any((lam[:, n - 1] > thr) & (gaps <= DEGENERACY_TOL * lam_max)))

    spectra.flags.writeable = False
    rank.flags.writeable = False
    model = SISModel(structure=structure, generators=spectra, per_freq_rank=rank)
    return SISFit(model=model, error=error, spectrum=gram, degenerate=degenerate)


def generator_gramian(model: SISModel) -> FreqGramian:
    """Gramian of the model's own generators (0/1 spectrum when Parseval)."""
    fib = _model_fibers(model)
    grams = np.einsum("ikt,jkt->kij", fib, fib.conj())
    grams = (grams + grams.conj().transpose(0, 2, 1)) / 2.0
    if model.length:
        vals, vecs = _eigendecompose_per_freq(grams)
    else:
        vals = np.zeros((model.structure.num_freqs, 0))
        vecs = np.zeros((model.structure.num_freqs, 0, 0), dtype=np.complex128)
    return FreqGramian(model.structure, grams, vals, vecs)


def project_sis(model: SISModel, f) -> np.ndarray:
    """Orthogonal projection of a signal onto the model (complex time domain).

    Idempotent, and commutes with circular shift by the model's shift step.
    """
    f = np.asarray(f)
    if f.shape != (model.structure.signal_len,):
        raise LengthMismatch(
            f"signal of shape {f.shape} vs length {model.structure.signal_len}"
        )
    root = math.sqrt(model.structure.signal_len)
    spec = np.fft.fft(f) / root
    fib = _fibers_from_spectra(spec[None, :], model.structure)[0]
    gen = _model_fibers(model)
    coeff = np.einsum("kt,skt->sk", fib, gen.conj())
    proj = np.einsum("sk,skt->kt", coeff, gen)
    out_spec = _spectra_from_fibers(proj[None, :, :])[0]
    return np.fft.ifft(out_spec) * root


def sis_distance_matrix(dataset: DataSet, models, structure: ShiftStructure) -> np.ndarray:
    """(m, l) squared distances of the signals to each shift-invariant model."""
    fib_all = _signal_fibers(dataset, structure)
    cols = [_residuals_to_fibers(fib_all, _model_fibers(mo)) for mo in models]
    return np.stack(cols, axis=1)


def solve_sis_bundle(dataset: DataSet, structure: ShiftStructure, l, n,
                     cfg: SolveConfig, threads=1) -> SolveReport:
    """Alternating search over bundles of shift-invariant models.

    Identical to the Euclidean solver but with per-frequency eigenproblems as
    the cellwise fitting step and fiber-space projections as the distance.
    ``l`` and ``n`` override the corresponding config fields.  The report's
    ``bundle`` holds a tuple of SISModel components.
    """
    if dataset.m == 0:
        raise EmptyDataSet("solve_sis_bundle requires at least one signal")
    cfg_eff = dc_replace(cfg, l=int(l), n=int(n))
    fib_all = _signal_fibers(dataset, structure)

    def fit_cells(assignment):
        models, errors, flags = [], [], []
        for idx in Partition(assignment, cfg_eff.l).cells():
            fit = best_sis(dataset.subset(idx), structure, cfg_eff.n)
            models.append(fit.model)
            errors.append(fit.error)
            flags.append(fit.degenerate)
        return tuple(models), float(np.sum(errors)), flags

    def distances(models):
        cols = [_residuals_to_fibers(fib_all, _model_fibers(mo)) for mo in models]
        return np.stack(cols, axis=1)

    def singleton_dists(j):
        fit = best_sis(dataset.subset([j]), structure, 1)
        return _residuals_to_fibers(fib_all, _model_fibers(fit.model))

    best, results = _multistart(dataset.m, cfg_eff, fit_cells, distances,
                                singleton_dists, threads)
    certificate_ok = _verify_certificate(best, fit_cells, distances, cfg_eff.rel_tol)
    return _build_report(best, results, cfg_eff, certificate_ok)
