"""Independent checks: Monte Carlo client attraction and grid best-response search.

The simulator draws clients and their tolerance ranges and lets each client
pick the nearest eligible player, so it shares no code with the value
functions. Brute-force search evaluates analytic utilities at every grid
point and never relies on the first-order conditions.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from ._backend import kernels
from .distributions import DistributionSpec, Exponential, Linear, Pareto, Uniform
from .equilibrium import decide_equilibrium
from .game import GameSpec, Profile, Variant, hinterland_value, internal_value

DEFAULT_CHUNK = 1 << 16


@dataclass(frozen=True)
class SimulationConfig:
    """Monte Carlo settings.

    Clients are processed in fixed chunks of ``chunk_size``; chunk ``k`` draws
    from its own stream ``SeedSequence(seed, spawn_key=(k,))``, so results do
    not depend on how chunks are spread over workers.
    """

    num_clients: int
    seed: int = 0
    variant: Variant | None = None
    chunk_size: int = DEFAULT_CHUNK

    def __post_init__(self):
        if int(self.num_clients) != self.num_clients or self.num_clients < 1:
            raise ValueError(f"num_clients must be a positive integer, got {self.num_clients!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be >= 1")
        if self.variant is not None:
            object.__setattr__(self, "variant", Variant(self.variant))


@dataclass(frozen=True)
class UtilityEstimate:
    means: tuple[float, ...]
    std_errors: tuple[float, ...]
    num_clients: int

    @property
    def per_player(self) -> list[tuple[float, float]]:
        return list(zip(self.means, self.std_errors))

    def to_dict(self) -> dict[str, Any]:
        return {
            "num_clients": self.num_clients,
            "per_player": [{"mean": m, "std_error": s} for m, s in self.per_player],
        }


def sample_tolerances(dist: DistributionSpec, rng: np.random.Generator, size: int) -> np.ndarray:
    """Draw tolerance ranges by inverse-cdf sampling (built-in families only)."""
    if isinstance(dist, Uniform):
        return rng.random(size)
    if isinstance(dist, Exponential):
        return rng.exponential(1.0 / dist.lam, size)
    if isinstance(dist, Pareto):
        u = 1.0 - rng.random(size)  # (0, 1]
        return dist.xi * u ** (-1.0 / dist.alpha)
    if isinstance(dist, Linear):
        u = rng.random(size)
        q, r = dist.q, dist.r
        return 2.0 * u / (q + np.sqrt(q * q + 2.0 * r * u))
    raise TypeError(f"no sampler for {type(dist).__name__}")


def _chunk_rng(seed: int, k: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(k,))))


def draw_clients(
    dist: DistributionSpec, symmetric: bool, seed: int, chunk: int, size: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Positions and left/right ranges of the clients in one chunk.

    Symmetric clients reuse one draw for both sides; asymmetric clients draw
    the two sides independently.
    """
    rng = _chunk_rng(seed, chunk)
    v = rng.random(size)
    left = sample_tolerances(dist, rng, size)
    right = left if symmetric else sample_tolerances(dist, rng, size)
    return v, left, right


def _run_chunk(dist, symmetric, locs, seed, k, size):
    v, left, right = draw_clients(dist, symmetric, seed, k, size)
    return kernels.attribute_clients(v, left, right, locs)


def simulate_utilities(
    game: GameSpec, profile: Profile | Sequence[float], config: SimulationConfig, workers: int = 1
) -> UtilityEstimate:
    """Estimate every player's utility from ``config.num_clients`` sampled clients.

    Profiles of any size (including a single player) are accepted; ``game.n``
    is not consulted.
    """
    if not isinstance(profile, Profile):
        profile = Profile.of(profile)
    if config.variant is not None and config.variant is not game.variant:
        raise ValueError("config variant does not match the game")
    groups = profile.groups()
    locs = np.array([s for s, _ in groups])
    total = config.num_clients
    nchunks = -(-total // config.chunk_size)
    sizes = [min(config.chunk_size, total - k * config.chunk_size) for k in range(nchunks)]
    args = [(game.dist, game.symmetric, locs, config.seed, k, sizes[k]) for k in range(nchunks)]
    if workers > 1 and nchunks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda a: _run_chunk(*a), args))
    else:
        parts = [_run_chunk(*a) for a in args]
    counts = np.sum(parts, axis=0, dtype=np.int64)

    means = [0.0] * profile.n
    errs = [0.0] * profile.n
    for (_, members), c in zip(groups, counts):
        gamma = len(members)
        p = int(c) / total
        var = p * (1.0 - p) * total / (total - 1) if total > 1 else 0.0
        for i in members:
            means[i] = p / gamma
            errs[i] = math.sqrt(var / total) / gamma
    return UtilityEstimate(tuple(means), tuple(errs), total)


def deviation_utility(game: GameSpec, others: Sequence[float], location: float) -> float:
    """Analytic utility of a player at ``location`` against fixed ``others``."""
    left = [s for s in others if s < location]
    right = [s for s in others if s > location]
    gamma = 1 + sum(1 for s in others if s == location)
    u_left = internal_value(game, location - max(left)) if left else hinterland_value(game, location)
    u_right = internal_value(game, min(right) - location) if right else hinterland_value(game, 1.0 - location)
    return (u_left + u_right) / gamma


def _others(profile: Profile, idx: int) -> list[float]:
    if not 0 <= idx < profile.n:
        raise IndexError(f"player index {idx} out of range for {profile.n} players")
    return [s for j, s in enumerate(profile.locations) if j != idx]


def brute_force_best_response(
    game: GameSpec, profile: Profile | Sequence[float], idx: int, grid_step: float = 1e-3
) -> tuple[float, float]:
    """Best grid location for player ``idx`` with the others fixed.

    Candidates are the grid ``k * grid_step`` plus the other players'
    locations. Ties within 1e-12 resolve to the leftmost candidate.
    """
    if not 0.0 < grid_step <= 0.01:
        raise ValueError(f"grid_step must lie in (0, 0.01], got {grid_step!r}")
    if not isinstance(profile, Profile):
        profile = Profile.of(profile)
    others = _others(profile, idx)
    steps = int(round(1.0 / grid_step))
    cands = sorted(set(np.linspace(0.0, 1.0, steps + 1).tolist()) | set(others))
    values = [deviation_utility(game, others, s) for s in cands]
    best = max(values)
    k = next(i for i, u in enumerate(values) if u >= best - 1e-12)
    return cands[k], values[k]


@dataclass(frozen=True)
class ImprovingMove:
    player: int
    from_location: float
    to_location: float
    gain: float

    def to_dict(self) -> dict[str, Any]:
        return {"player": self.player, "from": self.from_location, "to": self.to_location, "gain": self.gain}


def find_improving_move(
    game: GameSpec, profile: Profile | Sequence[float], grid_step: float = 1e-3, slack: float = 1e-6
) -> ImprovingMove | None:
    """The largest grid improvement over all players, or None if none beats ``slack``."""
    if not isinstance(profile, Profile):
        profile = Profile.of(profile)
    move = None
    seen: set[tuple[float, int]] = set()
    for i, s in enumerate(profile.locations):
        # Colocated players face the same deviation problem.
        key = (s, profile.locations.count(s))
        if key in seen:
            continue
        seen.add(key)
        current = deviation_utility(game, _others(profile, i), s)
        loc, val = brute_force_best_response(game, profile, i, grid_step)
        gain = val - current
        if gain > slack and (move is None or gain > move.gain):
            move = ImprovingMove(i, s, loc, gain)
    return move


def verify_equilibrium_empirically(
    game: GameSpec, profile: Profile | Sequence[float], grid_step: float = 1e-3, slack: float = 1e-6
) -> bool:
    """True iff no player gains more than ``slack`` by moving to any grid point."""
    return find_improving_move(game, profile, grid_step, slack) is None


def candidate_profile(game: GameSpec) -> Profile:
    """The profile an empirical check should test.

    That is the reported equilibrium profile when there is one, else the
    canonical profile, else (no pair at all) every player at the center.
    """
    rep = decide_equilibrium(game)
    if rep.profile is not None:
        return rep.profile
    return Profile((0.5,) * game.n)
