"""Replica-exchange Metropolis sampling on the sphere.

Targets the Gibbs density proportional to exp(beta H(sigma)) on the sphere of
squared norm n.  A proposal perturbs the whole configuration by an isotropic
Gaussian of scale delta and renormalizes; that kernel is symmetric, so the
acceptance ratio is exp(beta (H' - H)).  A ladder of rungs at increasing beta
alternates within-rung sweeps with adjacent-rung configuration swaps.

Proposal scales adapt toward a 30-50% acceptance window during burn-in and
must be frozen before measurement so the kernels stay stationary.  All
randomness is drawn from per-rung streams spawned from one seed; trajectories
are reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .disorder import DisorderTensor, hamiltonian_batch, random_configuration

ADAPT_WINDOW = 50
ADAPT_LOW, ADAPT_HIGH = 0.30, 0.50
UNEQUILIBRATED_ACCEPTANCE = 0.01


@dataclass
class RungReport:
    """Summary of one rung after a run."""

    beta: float
    mean_energy: float          # mean of recorded H/n, nan if nothing recorded
    stderr_energy: float        # batch-means standard error of the above
    acceptance: float
    swap_acceptance: float      # swaps with the rung above; nan for the top rung
    proposal_scale: float
    equilibrated: bool


class TemperingEnsemble:
    """A ladder of Metropolis chains sharing one disorder realization."""

    def __init__(
        self,
        disorder: DisorderTensor,
        betas,
        seed: int | np.random.SeedSequence,
        proposal_scale: float = 1.0,
        steps_per_sweep: int | None = None,
    ):
        betas = np.asarray(betas, dtype=float)
        if betas.ndim != 1 or betas.size == 0:
            raise ValueError("beta ladder must be a nonempty 1-d sequence")
        if np.any(betas < 0.0):
            raise ValueError("beta ladder must be nonnegative")
        if betas.size > 1 and np.any(np.diff(betas) <= 0.0):
            raise ValueError("beta ladder must be strictly increasing")

        self.disorder = disorder
        self.betas = betas
        self.seed = seed
        n_rungs = betas.size
        root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
        streams = root.spawn(n_rungs + 1)
        self.rngs = [np.random.default_rng(s) for s in streams[:n_rungs]]
        self.swap_rng = np.random.default_rng(streams[n_rungs])

        self.configs = np.stack(
            [random_configuration(disorder.n, rng) for rng in self.rngs]
        )
        self.energies = hamiltonian_batch(disorder, self.configs)
        self.deltas = np.full(n_rungs, float(proposal_scale))
        self.steps_per_sweep = steps_per_sweep if steps_per_sweep is not None else disorder.n
        self.adapting = True

        self._steps = np.zeros(n_rungs, dtype=np.int64)
        self._accepts = np.zeros(n_rungs, dtype=np.int64)
        self._window_steps = np.zeros(n_rungs, dtype=np.int64)
        self._window_accepts = np.zeros(n_rungs, dtype=np.int64)
        self._swap_attempts = np.zeros(max(n_rungs - 1, 1), dtype=np.int64)
        self._swap_accepts = np.zeros(max(n_rungs - 1, 1), dtype=np.int64)
        self._sweep_index = 0
        self.history: list[list[float]] = [[] for _ in range(n_rungs)]

    @property
    def n_rungs(self) -> int:
        return self.betas.size

    def freeze(self) -> None:
        """Stop proposal-scale adaptation (call before measuring)."""
        self.adapting = False

    def acceptance_rates(self) -> np.ndarray:
        with np.errstate(invalid="ignore"):
            return np.where(self._steps > 0, self._accepts / np.maximum(self._steps, 1), np.nan)

    def swap_rates(self) -> np.ndarray:
        with np.errstate(invalid="ignore"):
            return np.where(
                self._swap_attempts > 0,
                self._swap_accepts / np.maximum(self._swap_attempts, 1),
                np.nan,
            )

    def _bookkeep(self, accepted: np.ndarray) -> None:
        self._steps += 1
        self._accepts += accepted
        self._window_steps += 1
        self._window_accepts += accepted
        if self.adapting and self._window_steps[0] >= ADAPT_WINDOW:
            rates = self._window_accepts / self._window_steps
            self.deltas[rates < ADAPT_LOW] *= 0.8
            self.deltas[rates > ADAPT_HIGH] *= 1.25
            np.clip(self.deltas, 1e-8, 1e2, out=self.deltas)
            self._window_steps[:] = 0
            self._window_accepts[:] = 0

    def _propose_all(self) -> None:
        """One Metropolis proposal on every rung, drawn from per-rung streams."""
        n = self.disorder.n
        moves = np.stack([rng.standard_normal(n) for rng in self.rngs])
        cand = self.configs + self.deltas[:, None] * moves
        cand *= (np.sqrt(n) / np.linalg.norm(cand, axis=1))[:, None]
        h_cand = hamiltonian_batch(self.disorder, cand)
        logu = np.log(np.array([rng.random() for rng in self.rngs]))
        accepted = logu < self.betas * (h_cand - self.energies)
        self.configs[accepted] = cand[accepted]
        self.energies[accepted] = h_cand[accepted]
        self._bookkeep(accepted)

    def _swap_phase(self, parity: int) -> None:
        for i in range(parity, self.n_rungs - 1, 2):
            j = i + 1
            self._swap_attempts[i] += 1
            logu = np.log(self.swap_rng.random())
            if logu < (self.betas[i] - self.betas[j]) * (self.energies[j] - self.energies[i]):
                self._swap_accepts[i] += 1
                self.configs[[i, j]] = self.configs[[j, i]]
                self.energies[[i, j]] = self.energies[[j, i]]


def mcmc_step(ensemble: TemperingEnsemble, rung: int) -> bool:
    """One Metropolis proposal on a single rung; True if accepted."""
    if not 0 <= rung < ensemble.n_rungs:
        raise ValueError(f"rung {rung} out of range [0, {ensemble.n_rungs})")
    n = ensemble.disorder.n
    rng = ensemble.rngs[rung]
    sigma = ensemble.configs[rung]
    move = rng.standard_normal(n)
    cand = sigma + ensemble.deltas[rung] * move
    cand *= np.sqrt(n) / np.linalg.norm(cand)
    h_cand = float(hamiltonian_batch(ensemble.disorder, cand[None, :])[0])
    accepted = bool(
        np.log(rng.random()) < ensemble.betas[rung] * (h_cand - ensemble.energies[rung])
    )
    if accepted:
        ensemble.configs[rung] = cand
        ensemble.energies[rung] = h_cand
    ensemble._steps[rung] += 1
    ensemble._accepts[rung] += accepted
    return accepted


def tempering_sweep(ensemble: TemperingEnsemble, sweeps: int, record: bool = True) -> None:
    """Alternate within-rung sweeps with adjacent-rung swap proposals.

    A sweep is ``steps_per_sweep`` whole-vector proposals per rung followed by
    one swap phase over adjacent pairs of alternating parity.  When ``record``
    is set, each rung's H/n is appended to the ensemble history after every
    sweep.
    """
    if sweeps < 1:
        raise ValueError(f"sweeps must be >= 1, got {sweeps}")
    n = ensemble.disorder.n
    for _ in range(sweeps):
        for _ in range(ensemble.steps_per_sweep):
            ensemble._propose_all()
        if ensemble.n_rungs > 1:
            ensemble._swap_phase(ensemble._sweep_index % 2)
        ensemble._sweep_index += 1
        if record:
            for r in range(ensemble.n_rungs):
                ensemble.history[r].append(ensemble.energies[r] / n)


def batch_means_stderr(series, n_batches: int = 20) -> float:
    """Standard error of the mean from batch means (autocorrelation-tolerant)."""
    x = np.asarray(series, dtype=float)
    if x.size < 4:
        return float("nan")
    nb = min(n_batches, x.size // 2)
    usable = (x.size // nb) * nb
    batches = x[:usable].reshape(nb, -1).mean(axis=1)
    return float(batches.std(ddof=1) / np.sqrt(nb))


@dataclass(frozen=True)
class ThermoPoint:
    beta: float
    f_estimate: float
    stderr: float
    mean_energy: float
    acceptance: float
    equilibrated: bool


def thermo_integration(ensemble: TemperingEnsemble) -> list[ThermoPoint]:
    """Free-energy curve from the recorded energies by trapezoidal integration.

    F_n(beta) = integral from 0 to beta of the mean energy per spin, so the
    ladder must start at beta = 0 where the normalized uniform measure gives
    F_n = 0 exactly.  Per-rung standard errors propagate through the
    trapezoid weights treating rungs as independent (swaps make this an
    approximation).  Rungs accepting below 1% are flagged unequilibrated.
    """
    if ensemble.betas[0] != 0.0:
        raise ValueError("thermodynamic integration needs a ladder starting at beta=0")
    if any(len(h) == 0 for h in ensemble.history):
        raise ValueError("no recorded sweeps; run tempering_sweep(record=True) first")

    betas = ensemble.betas
    means = np.array([np.mean(h) for h in ensemble.history])
    errs = np.array([batch_means_stderr(h) for h in ensemble.history])
    rates = ensemble.acceptance_rates()

    points = []
    f = 0.0
    var = 0.0
    for i, beta in enumerate(betas):
        if i > 0:
            db = betas[i] - betas[i - 1]
            f += 0.5 * db * (means[i - 1] + means[i])
            var += (0.5 * db) ** 2 * (errs[i - 1] ** 2 + errs[i] ** 2)
        points.append(
            ThermoPoint(
                beta=float(beta),
                f_estimate=f if i > 0 else 0.0,
                stderr=float(np.sqrt(var)),
                mean_energy=float(means[i]),
                acceptance=float(rates[i]),
                equilibrated=bool(rates[i] >= UNEQUILIBRATED_ACCEPTANCE),
            )
        )
    return points


@dataclass(frozen=True)
class OverlapHistogram:
    """Pairwise-overlap histogram of k replica chains at one rung."""

    bin_edges: np.ndarray
    counts: np.ndarray
    k: int
    pair_count: int
    diagnostics: dict = field(default_factory=dict)

    def modal_overlap(self) -> float:
        """Center of the most populated bin."""
        i = int(np.argmax(self.counts))
        return float(0.5 * (self.bin_edges[i] + self.bin_edges[i + 1]))

    def mass_near(self, q: float, eps: float) -> float:
        """Fraction of recorded pairs with |overlap - q| < eps (bin-resolved)."""
        centers = 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])
        mask = np.abs(centers - q) < eps
        return float(self.counts[mask].sum() / max(self.pair_count, 1))


def overlap_probe(
    ensemble: TemperingEnsemble,
    k: int,
    beta_index: int,
    sweeps: int,
    burn_in: int = 500,
    bins: int = 80,
    replica_seeds=None,
) -> OverlapHistogram:
    """Distribution of pairwise overlaps between k independent replicas.

    Each replica is an independent copy of the ensemble's ladder (fresh
    seed-derived streams, same disorder); after burn-in the replicas advance
    one sweep at a time and the overlaps of all pairs of configurations at
    rung ``beta_index`` are recorded.  Tempering within each replica is what
    gives the cold rung a chance to equilibrate.
    """
    if k < 2:
        raise ValueError(f"need at least two replicas, got {k}")
    if not 0 <= beta_index < ensemble.n_rungs:
        raise ValueError(f"beta_index {beta_index} out of range")
    if sweeps < 1:
        raise ValueError(f"sweeps must be >= 1, got {sweeps}")

    if replica_seeds is None:
        base = ensemble.seed
        entropy = base.entropy if isinstance(base, np.random.SeedSequence) else base
        replica_seeds = [np.random.SeedSequence((entropy, 7001 + i)) for i in range(k)]
    if len(replica_seeds) != k:
        raise ValueError(f"need {k} replica seeds, got {len(replica_seeds)}")

    replicas = [
        TemperingEnsemble(
            ensemble.disorder,
            ensemble.betas,
            seed=s,
            proposal_scale=float(ensemble.deltas[0]),
            steps_per_sweep=ensemble.steps_per_sweep,
        )
        for s in replica_seeds
    ]
    for rep in replicas:
        if burn_in > 0:
            tempering_sweep(rep, burn_in, record=False)
        rep.freeze()

    n = ensemble.disorder.n
    edges = np.linspace(-1.0, 1.0, bins + 1)
    counts = np.zeros(bins, dtype=np.int64)
    pair_count = 0
    all_near_one = True
    for _ in range(sweeps):
        for rep in replicas:
            tempering_sweep(rep, 1, record=True)
        snap = np.stack([rep.configs[beta_index] for rep in replicas])
        r_pairs = (snap @ snap.T) / n
        vals = r_pairs[np.triu_indices(k, 1)]
        np.clip(vals, -1.0, 1.0, out=vals)
        idx = np.minimum((np.floor((vals + 1.0) / 2.0 * bins)).astype(int), bins - 1)
        np.add.at(counts, idx, 1)
        pair_count += vals.size
        if np.any(vals < 1.0 - 1e-9):
            all_near_one = False

    rates = np.array([rep.acceptance_rates()[beta_index] for rep in replicas])
    energies = np.array([np.mean(rep.history[beta_index]) for rep in replicas])
    stderrs = np.array([batch_means_stderr(rep.history[beta_index]) for rep in replicas])
    swap_into_top = np.array([rep.swap_rates()[-1] for rep in replicas]) if ensemble.n_rungs > 1 else np.array([])
    diagnostics = {
        "beta": float(ensemble.betas[beta_index]),
        "replica_acceptance": rates.tolist(),
        "replica_mean_energy": energies.tolist(),
        "replica_energy_stderr": stderrs.tolist(),
        "replica_top_swap_rate": swap_into_top.tolist(),
        "equilibrated": bool(np.all(rates >= UNEQUILIBRATED_ACCEPTANCE)),
        "degenerate": bool(all_near_one),
    }
    return OverlapHistogram(
        bin_edges=edges, counts=counts, k=k, pair_count=pair_count, diagnostics=diagnostics
    )


def default_ladder(beta_max: float, rungs: int, beta_c: float | None = None) -> np.ndarray:
    """Measurement ladder on [0, beta_max]: linear backbone, denser near beta_c.

    The mean energy varies fastest around the transition, so when the ladder
    straddles beta_c a geometric cluster of points is inserted on both sides.
    """
    if beta_max <= 0.0:
        raise ValueError(f"beta_max must be positive, got {beta_max}")
    if rungs < 2:
        raise ValueError(f"need at least two rungs, got {rungs}")
    grid = np.linspace(0.0, beta_max, rungs)
    if beta_c is not None and 0.0 < beta_c < beta_max:
        cluster = beta_c * np.array([0.9, 0.95, 0.975, 1.0, 1.025, 1.05, 1.1])
        cluster = cluster[(cluster > 0.0) & (cluster < beta_max)]
        grid = np.unique(np.concatenate([grid, cluster]))
    return grid
