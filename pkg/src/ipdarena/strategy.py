"""Deterministic memory-bounded strategies for the iterated prisoner's dilemma.

A strategy class is fixed by a memory configuration (how many of its own and
of its opponent's most recent actions a player remembers).  With horizon
n = max(own, opp) a strategy consists of n+1 sub-strategies: one for each of
the first n iterations (while the history is still shorter than the memory)
and one that governs every later iteration.  Each sub-strategy is a lookup
table over the remembered actions, stored as a contiguous bit segment;
cooperation is encoded as bit value 1, defection as 0.

The full bit vector, read as an unsigned integer with the first sub-strategy
in the lowest bits, is the strategy's identifier everywhere in this package.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Callable, Iterable, Iterator, Sequence


class Action(IntEnum):
    DEFECT = 0
    COOPERATE = 1

    def __str__(self) -> str:
        return "C" if self is Action.COOPERATE else "D"


C = Action.COOPERATE
D = Action.DEFECT


@dataclass(frozen=True)
class MemoryConfig:
    """Pair (own, opp): how many own / opponent actions are remembered.

    Enumeration and tournament play are practical up to (0,3); larger values
    stay representable so that sizes can still be computed and reported.
    """

    own: int
    opp: int

    def __post_init__(self) -> None:
        if self.own < 0 or self.opp < 0:
            raise ValueError(f"memory sizes must be non-negative, got {self}")

    @property
    def horizon(self) -> int:
        return max(self.own, self.opp)

    @property
    def stages(self) -> int:
        """Number of sub-strategies, horizon + 1."""
        return self.horizon + 1

    def window(self, iteration: int) -> tuple[int, int]:
        """(own bits, opp bits) consulted in the given 1-based iteration."""
        return min(iteration - 1, self.own), min(iteration - 1, self.opp)

    def stage_of(self, iteration: int) -> int:
        """1-based sub-strategy index used in the given iteration."""
        if iteration < 1:
            raise ValueError(f"iterations are 1-based, got {iteration}")
        return min(iteration, self.stages)

    def segment_bits(self, stage: int) -> int:
        m, q = self.window(stage)
        return 1 << (m + q)

    def segment_offsets(self) -> tuple[int, ...]:
        offs = []
        total = 0
        for k in range(1, self.stages + 1):
            offs.append(total)
            total += self.segment_bits(k)
        return tuple(offs)

    def genome_bits(self) -> int:
        return sum(self.segment_bits(k) for k in range(1, self.stages + 1))

    def num_strategies(self) -> int:
        return 1 << self.genome_bits()

    def __str__(self) -> str:
        return f"{self.own}/{self.opp}"


def genome_bits(config: MemoryConfig) -> int:
    """Total number of bits needed to encode one strategy of the class."""
    return config.genome_bits()


def history_index(
    config: MemoryConfig,
    iteration: int,
    own_hist: Sequence[Action],
    opp_hist: Sequence[Action],
) -> int:
    """Index into the iteration's sub-strategy segment for given histories.

    Histories are newest-last.  The own-action block occupies the lowest
    bits, the opponent block sits above it; within each block more recent
    actions occupy higher bit positions, so the opponent's most recent
    action is the overall highest bit.
    """
    m, q = config.window(iteration)
    if len(own_hist) < m or len(opp_hist) < q:
        raise ValueError(
            f"iteration {iteration} needs {m} own / {q} opponent actions, "
            f"got {len(own_hist)} / {len(opp_hist)}"
        )
    idx = 0
    for r in range(m):  # r = 0 is the most recent action
        idx |= int(own_hist[-1 - r]) << (m - 1 - r)
    for r in range(q):
        idx |= int(opp_hist[-1 - r]) << (m + q - 1 - r)
    return idx


@dataclass(frozen=True)
class StrategyGenome:
    """One deterministic strategy: a memory configuration plus its bit vector."""

    config: MemoryConfig
    bits: int

    def __post_init__(self) -> None:
        if not 0 <= self.bits < self.config.num_strategies():
            raise ValueError(
                f"genome {self.bits} out of range for config ({self.config})"
            )

    def segment(self, stage: int) -> int:
        """The stage's sub-strategy table as an unsigned integer."""
        off = self.config.segment_offsets()[stage - 1]
        return (self.bits >> off) & ((1 << self.config.segment_bits(stage)) - 1)

    def __str__(self) -> str:
        return render_display(self)


def decide(
    genome: StrategyGenome,
    iteration: int,
    own_hist: Sequence[Action],
    opp_hist: Sequence[Action],
) -> Action:
    """The strategy's action in the given 1-based iteration.

    Selects the sub-strategy for the iteration (clamped to the steady one
    beyond the horizon) and reads the bit addressed by the recent history.
    """
    cfg = genome.config
    stage = cfg.stage_of(iteration)
    idx = history_index(cfg, iteration, own_hist, opp_hist)
    off = cfg.segment_offsets()[stage - 1]
    return Action((genome.bits >> (off + idx)) & 1)


def render_display(genome: StrategyGenome) -> str:
    """Tuple notation "(s1/s2/.../s(n+1))", one integer per sub-strategy."""
    parts = [str(genome.segment(k)) for k in range(1, genome.config.stages + 1)]
    return "(" + "/".join(parts) + ")"


def parse_display(text: str, config: MemoryConfig) -> StrategyGenome:
    """Inverse of render_display; validates arity and per-segment range."""
    body = text.strip()
    if body.startswith("(") and body.endswith(")"):
        body = body[1:-1]
    parts = body.split("/")
    if len(parts) != config.stages:
        raise ValueError(
            f"expected {config.stages} components for config ({config}), "
            f"got {len(parts)} in {text!r}"
        )
    bits = 0
    offs = config.segment_offsets()
    for k, part in enumerate(parts, start=1):
        try:
            value = int(part)
        except ValueError as exc:
            raise ValueError(f"bad component {part!r} in {text!r}") from exc
        if not 0 <= value < (1 << config.segment_bits(k)):
            raise ValueError(
                f"component {value} out of range for sub-strategy {k} "
                f"of config ({config})"
            )
        bits |= value << offs[k - 1]
    return StrategyGenome(config, bits)


def all_genomes(config: MemoryConfig) -> Iterator[StrategyGenome]:
    """Every strategy of the class, in identifier order."""
    for bits in range(config.num_strategies()):
        yield StrategyGenome(config, bits)


def build_genome(
    config: MemoryConfig,
    rule: Callable[[int, tuple[Action, ...], tuple[Action, ...]], Action],
) -> StrategyGenome:
    """Materialize a genome from a decision rule.

    ``rule(iteration, own_window, opp_window)`` is called for every stage and
    every possible remembered history (windows newest-last) and must return
    the action to take.
    """
    bits = 0
    offs = config.segment_offsets()
    for k in range(1, config.stages + 1):
        m, q = config.window(k)
        for own_bits in range(1 << m):
            own_win = tuple(Action((own_bits >> (m - 1 - r)) & 1) for r in range(m))
            for opp_bits in range(1 << q):
                opp_win = tuple(
                    Action((opp_bits >> (q - 1 - r)) & 1) for r in range(q)
                )
                # windows are oldest-first here; history_index wants newest-last
                own_list = own_win[::-1]
                opp_list = opp_win[::-1]
                idx = history_index(config, k, own_list, opp_list)
                if rule(k, own_list, opp_list):
                    bits |= 1 << (offs[k - 1] + idx)
    return StrategyGenome(config, bits)


def tit_for_tat(config: MemoryConfig) -> StrategyGenome:
    """Cooperate first, then mirror the opponent's most recent action."""
    if config.opp < 1:
        raise ValueError("tit-for-tat needs at least one opponent action")
    return build_genome(
        config,
        lambda it, own, opp: C if it == 1 or opp[-1] is C else D,
    )


def always_defect(config: MemoryConfig) -> StrategyGenome:
    return StrategyGenome(config, 0)


def always_cooperate(config: MemoryConfig) -> StrategyGenome:
    return StrategyGenome(config, config.num_strategies() - 1)


def pavlov(config: MemoryConfig) -> StrategyGenome:
    """Repeat the own action if the opponent cooperated, otherwise switch."""
    if config.own < 1 or config.opp < 1:
        raise ValueError("pavlov needs own and opponent memory")

    def rule(it: int, own: tuple[Action, ...], opp: tuple[Action, ...]) -> Action:
        if it == 1:
            return C
        return own[-1] if opp[-1] is C else Action(1 - own[-1])

    return build_genome(config, rule)


@dataclass(frozen=True)
class EquivalenceClass:
    """Genomes that behave identically against every opponent.

    Sub-strategy bits conditioned on own histories the strategy can never
    produce are free: any assignment of them yields the same play.  The
    representative is the member with the smallest identifier (all free
    bits cleared).
    """

    representative: StrategyGenome
    members: frozenset[int]

    @property
    def size(self) -> int:
        return len(self.members)


def _reachable_own_windows(genome: StrategyGenome) -> list[set[tuple[int, ...]]]:
    """Per stage, the set of own-action windows the strategy can arrive with.

    Windows are newest-last tuples of 0/1 with length min(stage-1, own).
    Opponent actions are unconstrained: for any prefix of play there is an
    opponent realizing either response, so reachability depends only on the
    strategy's own decisions.
    """
    cfg = genome.config
    own, opp = cfg.own, cfg.opp
    offs = cfg.segment_offsets()
    per_stage: list[set[tuple[int, ...]]] = []

    def step_window(window: tuple[int, ...], stage: int) -> set[tuple[int, ...]]:
        m, q = cfg.window(stage)
        nxt = set()
        for opp_bits in range(1 << q):
            idx = 0
            for r, a in enumerate(reversed(window)):
                idx |= a << (m - 1 - r)
            for r in range(q):
                idx |= ((opp_bits >> r) & 1) << (m + r)
            action = (genome.bits >> (offs[stage - 1] + idx)) & 1
            nxt.add((window + (action,))[-own:] if own else ())
        return nxt

    windows: set[tuple[int, ...]] = {()}
    for stage in range(1, cfg.stages):
        per_stage.append(set(windows))
        nxt: set[tuple[int, ...]] = set()
        for w in windows:
            nxt |= step_window(w, stage)
        windows = nxt

    # steady stage: close under its own transition, since it is reused forever
    closure = set(windows)
    frontier = windows
    while frontier:
        grown: set[tuple[int, ...]] = set()
        for w in frontier:
            for w2 in step_window(w, cfg.stages):
                if w2 not in closure:
                    closure.add(w2)
                    grown.add(w2)
        frontier = grown
    per_stage.append(closure)
    return per_stage


def canonicalize(genome: StrategyGenome) -> EquivalenceClass:
    """Group the genome with all genomes of identical reachable behavior."""
    cfg = genome.config
    offs = cfg.segment_offsets()
    reachable = _reachable_own_windows(genome)

    free_positions: list[int] = []
    for stage in range(1, cfg.stages + 1):
        m, q = cfg.window(stage)
        windows = {w for w in reachable[stage - 1]}
        for idx in range(cfg.segment_bits(stage)):
            # own block occupies the low bits, oldest action lowest
            own_part = tuple((idx >> r) & 1 for r in range(m))
            if own_part not in windows:
                free_positions.append(offs[stage - 1] + idx)

    base = genome.bits
    for pos in free_positions:
        base &= ~(1 << pos)
    members = []
    for combo in range(1 << len(free_positions)):
        bits = base
        for b, pos in enumerate(free_positions):
            if (combo >> b) & 1:
                bits |= 1 << pos
        members.append(bits)
    return EquivalenceClass(
        representative=StrategyGenome(cfg, base),
        members=frozenset(members),
    )


def canonical_representatives(
    config: MemoryConfig, ids: Iterable[int]
) -> dict[int, int]:
    """Map each id to its equivalence-class representative id."""
    out: dict[int, int] = {}
    for i in ids:
        if i not in out:
            cls = canonicalize(StrategyGenome(config, i))
            for member in cls.members:
                out[member] = cls.representative.bits
    return {i: out[i] for i in ids}
