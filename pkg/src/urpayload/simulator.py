"""Monte Carlo ground truth for the physical link model.

Samples the per-antenna SIR directly from its definition (unit-exponential
fading on the serving and every interfering link), combines across antennas,
and counts decoding errors under either the sharp-threshold semantics or the
finite-blocklength semantics (a Bernoulli failure with the conditional
error probability, one extra uniform per trial).

Reproducibility contract: trials are pre-partitioned into fixed-size blocks
of _BLOCK_TRIALS; block b draws from PCG64 seeded with SeedSequence([seed, b]).
Within a block the draw order is serving gains, then interferer gains, then
(finite-blocklength semantics only) the Bernoulli uniforms. The `workers`
setting only chooses how many threads consume the block queue, so reports
are bit-identical for any worker count.
"""
from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional

import numpy as np

from .finite_blocklength import fb_error_conditional
from .rate_control import Scheme, theta_for_rate
from .sir_model import SirDistribution, SirSource, Topology, parse_topology

__all__ = [
    "Semantics",
    "SimReport",
    "SimSpec",
    "UndersampledError",
    "load_sim_spec",
    "run_sim",
    "sample_sir",
    "sample_sir_block",
    "wilson_interval",
]

_BLOCK_TRIALS = 1 << 16
_Z95 = 1.959963984540054  # two-sided 95% normal quantile


class Semantics(str, Enum):
    ASYMPTOTIC = "asymptotic"
    FINITE_BLOCKLENGTH = "fb"


class UndersampledError(ValueError):
    """Too few trials to resolve the stated target error probability."""


@dataclass(frozen=True)
class SimSpec:
    """Full description of one simulation run."""

    topology: SirSource
    antennas: int
    scheme: Scheme
    threshold_bits: int
    blocklength: int
    semantics: Semantics
    trials: int
    seed: int
    workers: int = 1
    variance_reduced: bool = False
    epsilon_target: Optional[float] = None
    allow_undersampled: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        object.__setattr__(self, "semantics", Semantics(self.semantics))
        if self.antennas < 1:
            raise ValueError(f"antennas must be >= 1, got {self.antennas}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if self.threshold_bits < 0:
            raise ValueError(f"threshold_bits must be >= 0, got {self.threshold_bits}")
        if self.blocklength < 1:
            raise ValueError(f"blocklength must be >= 1, got {self.blocklength}")
        if self.seed < 0:
            raise ValueError(f"seed must be a nonnegative integer, got {self.seed}")
        if self.variance_reduced and self.semantics is not Semantics.FINITE_BLOCKLENGTH:
            raise ValueError("variance_reduced applies to finite-blocklength semantics only")
        if self.epsilon_target is not None and not self.allow_undersampled:
            needed = 30.0 / self.epsilon_target
            if self.trials < needed:
                raise UndersampledError(
                    f"{self.trials} trials cannot resolve epsilon ~ {self.epsilon_target:g} "
                    f"(need >= {needed:.3g}); pass allow_undersampled to override"
                )


@dataclass(frozen=True)
class SimReport:
    """Outcome of a simulation run.

    errors is None in variance-reduced mode, where epsilon_hat is the mean of
    the conditional error probabilities and ci95 a normal interval; otherwise
    epsilon_hat = errors/trials with a Wilson 95% interval. elapsed is
    wall-clock and deliberately excluded from json_record().
    """

    trials: int
    errors: Optional[int]
    epsilon_hat: float
    ci95: tuple[float, float]
    seed: int
    elapsed: float

    def json_record(self) -> str:
        """Single-line JSON with the deterministic fields only."""
        return json.dumps(
            {
                "trials": self.trials,
                "errors": self.errors,
                "epsilon_hat": self.epsilon_hat,
                "ci95": list(self.ci95),
                "seed": self.seed,
            },
            separators=(", ", ": "),
        )


def load_sim_spec(path) -> SimSpec:
    """Load a SimSpec from a JSON document.

    Required keys: topology (inline topology document: distances or path
    losses), antennas, scheme, k, n, semantics, trials, seed. Optional:
    workers, variance_reduced, epsilon_target, allow_undersampled.
    """
    doc = json.loads(Path(path).read_text())
    missing = [
        key
        for key in ("topology", "antennas", "scheme", "k", "n", "semantics", "trials", "seed")
        if key not in doc
    ]
    if missing:
        raise ValueError(f"simulation spec missing fields: {missing}")
    return SimSpec(
        topology=parse_topology(doc["topology"]),
        antennas=int(doc["antennas"]),
        scheme=Scheme(doc["scheme"]),
        threshold_bits=int(doc["k"]),
        blocklength=int(doc["n"]),
        semantics=Semantics(doc["semantics"]),
        trials=int(doc["trials"]),
        seed=int(doc["seed"]),
        workers=int(doc.get("workers", 1)),
        variance_reduced=bool(doc.get("variance_reduced", False)),
        epsilon_target=doc.get("epsilon_target"),
        allow_undersampled=bool(doc.get("allow_undersampled", False)),
    )


def wilson_interval(errors: int, trials: int, z: float = _Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion; robust at extreme rates."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p = errors / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2.0 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + z * z / (4.0 * trials * trials)) / denom
    return max(center - half, 0.0), min(center + half, 1.0)


def _interference_weights(source: SirSource) -> np.ndarray:
    if isinstance(source, Topology):
        return np.asarray(source.interference_weights(), dtype=float)
    if isinstance(source, SirDistribution):
        return np.asarray(source.path_losses, dtype=float)
    raise TypeError(f"expected Topology or SirDistribution, got {type(source)!r}")


def _exponential(rng: np.random.Generator, shape) -> np.ndarray:
    # inverse transform of U ~ [0, 1): -log(1 - U) is Exp(1)
    return -np.log1p(-rng.random(shape))


def sample_sir_block(
    source: SirSource, antennas: int, trials: int, rng: np.random.Generator
) -> np.ndarray:
    """Draw `trials` independent per-antenna SIR vectors; shape (trials, antennas).

    SIR_i = h_i / sum_j g_ji * w_j with h, g unit exponentials and w the
    topology's interference weights (r0^alpha * r_j^(-alpha)).
    """
    weights = _interference_weights(source)
    h = _exponential(rng, (trials, antennas))
    g = _exponential(rng, (trials, weights.size, antennas))
    interference = np.einsum("tja,j->ta", g, weights)
    return h / interference


def sample_sir(source: SirSource, antennas: int, rng: np.random.Generator) -> np.ndarray:
    """One fading draw: the per-antenna SIR values, shape (antennas,)."""
    return sample_sir_block(source, antennas, 1, rng)[0]


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, block]))


def _run_block(spec: SimSpec, theta: float, block: int, trials: int):
    rng = _block_rng(spec.seed, block)
    sir = sample_sir_block(spec.topology, spec.antennas, trials, rng)
    if spec.scheme is Scheme.SC:
        combined = sir.max(axis=1)
    else:
        combined = sir.sum(axis=1)
    if spec.semantics is Semantics.ASYMPTOTIC:
        return int(np.count_nonzero(combined < theta))
    probs = fb_error_conditional(combined, spec.threshold_bits, spec.blocklength)
    if spec.variance_reduced:
        return float(probs.sum()), float(np.square(probs).sum())
    draws = rng.random(trials)
    return int(np.count_nonzero(draws < probs))


def run_sim(spec: SimSpec) -> SimReport:
    """Run the simulation described by spec and summarize it.

    Per-block results are reduced in block order so floating-point sums are
    reproducible; integer error counts are order-independent anyway.
    """
    start = time.perf_counter()
    theta = theta_for_rate(spec.threshold_bits, spec.blocklength)
    blocks = []
    remaining, index = spec.trials, 0
    while remaining > 0:
        size = min(_BLOCK_TRIALS, remaining)
        blocks.append((index, size))
        remaining -= size
        index += 1

    if spec.workers == 1 or len(blocks) == 1:
        results = [_run_block(spec, theta, b, size) for b, size in blocks]
    else:
        with ThreadPoolExecutor(max_workers=spec.workers) as pool:
            futures = [pool.submit(_run_block, spec, theta, b, size) for b, size in blocks]
            results = [f.result() for f in futures]

    elapsed = time.perf_counter() - start
    if spec.variance_reduced:
        total = math.fsum(r[0] for r in results)
        total_sq = math.fsum(r[1] for r in results)
        mean = total / spec.trials
        var = max(total_sq / spec.trials - mean * mean, 0.0)
        half = _Z95 * math.sqrt(var / spec.trials)
        return SimReport(
            trials=spec.trials,
            errors=None,
            epsilon_hat=mean,
            ci95=(max(mean - half, 0.0), min(mean + half, 1.0)),
            seed=spec.seed,
            elapsed=elapsed,
        )
    errors = sum(results)
    return SimReport(
        trials=spec.trials,
        errors=errors,
        epsilon_hat=errors / spec.trials,
        ci95=wilson_interval(errors, spec.trials),
        seed=spec.seed,
        elapsed=elapsed,
    )
