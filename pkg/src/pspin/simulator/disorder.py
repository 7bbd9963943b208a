"""Finite-N disorder realizations of the pure p-spin Gaussian field.

A realization is a flat array of n^p i.i.d. standard normal couplings in
row-major index order, drawn from a counter-based generator so that any
(n, p, seed) triple regenerates bit-identically.  The energy of a
configuration sigma on the sphere ||sigma||^2 = n is the full tensor
contraction scaled by n^(-(p-1)/2); no symmetrization is applied, the sum
runs over all index tuples.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import cached_property

import numpy as np

DEFAULT_ENTRY_BUDGET = 2**31
_SLOT_CACHE_MAX_ENTRIES = 2**22  # above this, fall back to strided contractions

MAGIC = b"PSPN"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sHIH4x")  # magic, version u16, N u32, p u16, padding


class DisorderSizeError(ValueError):
    """Requested tensor exceeds the configured entry budget."""


@dataclass(frozen=True)
class DisorderTensor:
    n: int
    p: int
    entries: np.ndarray  # flat, length n**p, row-major over (i_1, ..., i_p)
    seed: int | None     # None when loaded from a file

    def tensor(self) -> np.ndarray:
        """Multi-index view of the flat entries."""
        return self.entries.reshape((self.n,) * self.p)

    @property
    def norm_factor(self) -> float:
        return float(self.n) ** (-(self.p - 1) / 2.0)

    @cached_property
    def _slot_matrices(self) -> tuple[np.ndarray, ...] | None:
        """Contiguous (n, n^(p-1)) copies with slot m moved first, or None.

        Turns per-slot contractions into plain matrix-vector products; only
        built for tensors small enough that p extra copies are cheap.
        """
        if self.entries.shape[0] > _SLOT_CACHE_MAX_ENTRIES:
            return None
        t = self.tensor()
        return tuple(
            np.ascontiguousarray(np.moveaxis(t, m, 0).reshape(self.n, -1))
            for m in range(self.p)
        )


def sample_disorder(
    n: int, p: int, seed: int, max_entries: int = DEFAULT_ENTRY_BUDGET
) -> DisorderTensor:
    """Draw one disorder realization, deterministic in (n, p, seed)."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if p < 2:
        raise ValueError(f"p must be >= 2, got {p}")
    count = n**p
    if count > max_entries:
        raise DisorderSizeError(
            f"n^p = {count} entries ({8 * count} bytes) exceeds the budget of "
            f"{max_entries} entries"
        )
    gen = np.random.Generator(np.random.Philox(key=seed))
    entries = gen.standard_normal(count)
    return DisorderTensor(n=n, p=p, entries=entries, seed=seed)


def random_configuration(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform point on the sphere of squared norm n."""
    x = rng.standard_normal(n)
    return project_to_sphere(x, n)


def project_to_sphere(x: np.ndarray, n: int) -> np.ndarray:
    norm = np.linalg.norm(x)
    if norm == 0.0:
        raise ValueError("cannot project the zero vector onto the sphere")
    return x * (np.sqrt(n) / norm)


def overlap(s1: np.ndarray, s2: np.ndarray) -> float:
    """Normalized inner product (1/n) s1.s2."""
    return float(s1 @ s2) / s1.shape[0]


def _check_dims(J: DisorderTensor, sigma: np.ndarray) -> None:
    if sigma.shape != (J.n,):
        raise ValueError(f"configuration shape {sigma.shape} does not match n={J.n}")


def _outer_power(sigma: np.ndarray, order: int) -> np.ndarray:
    """Flattened order-fold outer product of sigma with itself."""
    v = sigma
    for _ in range(order - 1):
        v = np.outer(v, sigma).ravel()
    return v


def hamiltonian(J: DisorderTensor, sigma: np.ndarray) -> float:
    """Energy n^(-(p-1)/2) sum_t J_t sigma_{t_1} ... sigma_{t_p}."""
    _check_dims(J, sigma)
    slots = J._slot_matrices
    if slots is not None:
        tail = _outer_power(sigma, J.p - 1)
        return J.norm_factor * float(sigma @ (slots[0] @ tail))
    t = J.tensor()
    for _ in range(J.p):
        t = t @ sigma
    return J.norm_factor * float(t)


def hamiltonian_batch(J: DisorderTensor, configs: np.ndarray) -> np.ndarray:
    """Energies of a stack of configurations, shape (r, n) -> (r,).

    Contracts one tensor axis at a time against all rows at once; the first
    contraction is a single matmul over the full tensor, which dominates the
    cost and is far cheaper than r separate contractions.
    """
    configs = np.atleast_2d(configs)
    if configs.shape[1] != J.n:
        raise ValueError(f"configuration shape {configs.shape} does not match n={J.n}")
    n, p = J.n, J.p
    t = J.entries.reshape(n ** (p - 1), n) @ configs.T  # (n^(p-1), r)
    for m in range(p - 1, 0, -1):
        t = np.einsum("anr,rn->ar", t.reshape(n ** (m - 1), n, -1), configs)
    return J.norm_factor * t.ravel()


def gradient(J: DisorderTensor, sigma: np.ndarray) -> np.ndarray:
    """Euclidean gradient of the energy, one contraction per tensor slot.

    Every slot contracts the other p-1 indices against the same sigma, so a
    single flattened outer power serves all slots.  g . sigma = p H.
    """
    _check_dims(J, sigma)
    slots = J._slot_matrices
    if slots is not None:
        tail = _outer_power(sigma, J.p - 1)
        g = slots[0] @ tail
        for m in range(1, J.p):
            g += slots[m] @ tail
        return J.norm_factor * g
    t = J.tensor()
    g = np.zeros(J.n)
    for slot in range(J.p):
        partial = np.moveaxis(t, slot, 0)
        for _ in range(J.p - 1):
            partial = partial @ sigma
        g += partial
    return J.norm_factor * g


def hamiltonian_streamed(
    n: int, p: int, seed: int, sigma: np.ndarray, block_entries: int = 2**22
) -> float:
    """Energy without materializing the tensor, for n^p beyond the budget.

    Regenerates the same Philox stream as ``sample_disorder`` block by block
    and contracts each block against the matching slice of the rank-p outer
    power of sigma.  The outer-power slice is built per leading index, so only
    n^(p-1) floats are live at a time.
    """
    if sigma.shape != (n,):
        raise ValueError(f"configuration shape {sigma.shape} does not match n={n}")
    tail = sigma.copy()
    for _ in range(p - 2):
        tail = np.outer(tail, sigma).ravel()  # sigma^(x(p-1)), length n^(p-1)
    gen = np.random.Generator(np.random.Philox(key=seed))
    stride = tail.shape[0]
    total = 0.0
    for i in range(n):
        block = gen.standard_normal(stride)
        total += sigma[i] * float(block @ tail)
    return float(n) ** (-(p - 1) / 2.0) * total


def save_disorder(J: DisorderTensor, path: str) -> None:
    """Write the binary tensor file: 16-byte header then little-endian f64."""
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, J.n, J.p))
        fh.write(J.entries.astype("<f8", copy=False).tobytes())


def load_disorder(path: str) -> DisorderTensor:
    """Read a tensor written by ``save_disorder``."""
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) != _HEADER.size:
            raise ValueError(f"{path}: truncated header")
        magic, version, n, p = _HEADER.unpack(header)
        if magic != MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        if version != FORMAT_VERSION:
            raise ValueError(f"{path}: unsupported version {version}")
        raw = fh.read()
    count = n**p
    entries = np.frombuffer(raw, dtype="<f8", count=-1)
    if entries.shape[0] != count:
        raise ValueError(
            f"{path}: expected {count} entries for n={n}, p={p}, found {entries.shape[0]}"
        )
    return DisorderTensor(n=n, p=p, entries=entries.astype(np.float64), seed=None)
