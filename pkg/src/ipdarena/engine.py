"""State and stepping of all pairwise ongoing iterated games.

An arena holds one fixed-size record per unordered strategy pair: the packed
recent actions of both players and four 32-bit counters telling how often
the first player received each payoff outcome.  The second player's counters
follow from complementarity, which halves the memory and is what makes the
largest desk-scale class (no own, three opponent actions) storable at all.

Advancing the arena by one iteration is pure integer work on independent
pairs, so results are bitwise identical for any chunking and worker count.
"""

from __future__ import annotations

import hashlib
import math
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from ipdarena import _backend
from ipdarena.strategy import Action, MemoryConfig, StrategyGenome, decide, history_index

COUNTER_MAX = 0xFFFFFFFF
DEFAULT_MEMORY_LIMIT = 2 << 30  # 2 GiB; enough for every config through (1,2)
_CHUNK = 1 << 18

_BYTES_PER_PAIR = 2 * 1 + 4 * 4 + 2 * 2  # histories + counters + id columns


class ResourceLimitError(RuntimeError):
    """Raised when an arena would not fit in the configured memory budget."""


class CheckpointError(RuntimeError):
    """Raised for unreadable, truncated, or corrupted checkpoint files."""


def pair_count(n: int, self_play: bool) -> int:
    return n * (n + 1) // 2 if self_play else n * (n - 1) // 2


def required_bytes(config: MemoryConfig, self_play: bool) -> int:
    n = config.num_strategies()
    return pair_count(n, self_play) * _BYTES_PER_PAIR + n * config.stages * 8


def _fmt_bytes(num: float) -> str:
    for unit in ("B", "KB", "MB", "GB", "TB", "EB"):
        if num < 1024 or unit == "EB":
            return f"{num:.1f} {unit}"
        num /= 1024
    raise AssertionError


def pair_index(n: int, self_play: bool, i: int, j: int) -> int:
    """Rank of the unordered pair (i, j), i <= j, in row-major order."""
    if i > j:
        i, j = j, i
    if self_play:
        return i * (2 * n - i + 1) // 2 + (j - i)
    if i == j:
        raise ValueError("diagonal pair in an arena without self-play")
    return i * (2 * n - i - 1) // 2 + (j - i - 1)


def pair_from_index(n: int, self_play: bool, p: int) -> tuple[int, int]:
    """Inverse of pair_index, exact in integer arithmetic."""
    total = pair_count(n, self_play)
    if not 0 <= p < total:
        raise ValueError(f"pair index {p} out of range (0..{total - 1})")
    if self_play:
        # row i starts at i*(2n-i+1)/2
        i = (2 * n + 1 - math.isqrt((2 * n + 1) ** 2 - 8 * p)) // 2
        while i * (2 * n - i + 1) // 2 > p:
            i -= 1
        while (i + 1) * (2 * n - i) // 2 <= p:
            i += 1
        return i, i + (p - i * (2 * n - i + 1) // 2)
    i = (2 * n - 1 - math.isqrt((2 * n - 1) ** 2 - 8 * p)) // 2
    while i * (2 * n - i - 1) // 2 > p:
        i -= 1
    while (i + 1) * (2 * n - i - 2) // 2 <= p:
        i += 1
    return i, i + 1 + (p - i * (2 * n - i - 1) // 2)


def _build_remap(config: MemoryConfig) -> np.ndarray:
    """Per-strategy, per-stage decision tables indexed by packed histories.

    The packed rolling history keeps the most recent action in bit 0; entry
    s of the table is the genome bit the strategy consults when its own and
    the opponent's packed windows concatenate to s.  Built once from the
    authoritative history_index, so every backend inherits its convention.
    """
    n = config.num_strategies()
    offs = config.segment_offsets()
    ids = np.arange(n, dtype=np.uint64)
    remap = np.zeros((n, config.stages), dtype=np.uint64)
    for stage in range(1, config.stages + 1):
        m, q = config.window(stage)
        col = np.zeros(n, dtype=np.uint64)
        for state in range(1 << (m + q)):
            own_packed = state & ((1 << m) - 1)
            opp_packed = state >> m
            own_hist = [Action((own_packed >> r) & 1) for r in range(m)][::-1]
            opp_hist = [Action((opp_packed >> r) & 1) for r in range(q)][::-1]
            idx = history_index(config, stage, own_hist, opp_hist)
            bit = (ids >> np.uint64(offs[stage - 1] + idx)) & np.uint64(1)
            col |= bit << np.uint64(state)
        remap[:, stage - 1] = col
    return remap


@dataclass(frozen=True)
class PairState:
    """Snapshot of one ongoing pairwise game, both orientations."""

    recent_a: tuple[Action, ...]   # newest-last
    recent_b: tuple[Action, ...]
    count_t_a: int
    count_r_a: int
    count_p_a: int
    count_s_a: int

    @property
    def count_t_b(self) -> int:
        return self.count_s_a

    @property
    def count_r_b(self) -> int:
        return self.count_r_a

    @property
    def count_p_b(self) -> int:
        return self.count_p_a

    @property
    def count_s_b(self) -> int:
        return self.count_t_a


class Arena:
    """All pairwise games of one complete strategy class.

    pair_range selects a contiguous slice of the pair space; the default is
    the whole triangle.  Slices exist for working with classes whose full
    pair space exceeds memory: they step and count exactly like the same
    range inside a full arena.
    """

    def __init__(
        self,
        config: MemoryConfig,
        self_play: bool = True,
        *,
        pair_range: tuple[int, int] | None = None,
        memory_limit: int = DEFAULT_MEMORY_LIMIT,
    ):
        self.config = config
        self.self_play = self_play
        self.n_strategies = config.num_strategies()
        total_pairs = pair_count(self.n_strategies, self_play)
        if pair_range is None:
            need = required_bytes(config, self_play)
            if need > memory_limit:
                raise ResourceLimitError(
                    f"config ({config}) with self_play={self_play} needs about "
                    f"{_fmt_bytes(need)} for {total_pairs:,} pairs; "
                    f"limit is {_fmt_bytes(memory_limit)}"
                )
            pair_range = (0, total_pairs)
        lo, hi = pair_range
        if not 0 <= lo <= hi <= total_pairs:
            raise ValueError(f"pair range {pair_range} outside 0..{total_pairs}")
        if (hi - lo) * _BYTES_PER_PAIR > memory_limit:
            raise ResourceLimitError(
                f"pair slice [{lo}, {hi}) needs about "
                f"{_fmt_bytes((hi - lo) * _BYTES_PER_PAIR)}; "
                f"limit is {_fmt_bytes(memory_limit)}"
            )
        self.pair_lo = lo
        self.pair_hi = hi
        self.n_pairs = hi - lo
        self.t = 0

        if self.n_strategies > 0xFFFF:
            raise ResourceLimitError(
                f"config ({config}) enumerates {self.n_strategies:,} strategies; "
                "identifiers are limited to 65,535"
            )

        self._remap = _build_remap(config)
        self._hist_mask = (1 << config.horizon) - 1
        self.id_a = np.empty(self.n_pairs, dtype=np.uint16)
        self.id_b = np.empty(self.n_pairs, dtype=np.uint16)
        self._fill_ids()
        self.hist_a = np.zeros(self.n_pairs, dtype=np.uint8)
        self.hist_b = np.zeros(self.n_pairs, dtype=np.uint8)
        self.c_t = np.zeros(self.n_pairs, dtype=np.uint32)
        self.c_r = np.zeros(self.n_pairs, dtype=np.uint32)
        self.c_p = np.zeros(self.n_pairs, dtype=np.uint32)
        self.c_s = np.zeros(self.n_pairs, dtype=np.uint32)
        self._totals_cache: np.ndarray | None = None

    @property
    def is_complete(self) -> bool:
        total = pair_count(self.n_strategies, self.self_play)
        return (self.pair_lo, self.pair_hi) == (0, total)

    def _fill_ids(self) -> None:
        n = self.n_strategies
        pos = 0
        p = self.pair_lo
        while p < self.pair_hi:
            i, j = pair_from_index(n, self.self_play, p)
            row_end = pair_index(n, self.self_play, i, n - 1) + 1
            take = min(row_end, self.pair_hi) - p
            self.id_a[pos:pos + take] = i
            self.id_b[pos:pos + take] = np.arange(j, j + take, dtype=np.uint16)
            pos += take
            p += take

    def step(self, steps: int = 1, workers: int = 1) -> None:
        """Advance every pair by the given number of moves."""
        for _ in range(steps):
            if self.t >= COUNTER_MAX:
                raise OverflowError(
                    f"iteration counters are 32-bit; cannot step past t={COUNTER_MAX}"
                )
            it = self.t + 1
            stage = self.config.stage_of(it)
            m, q = self.config.window(it)
            args = (stage - 1, m, q, self._hist_mask)
            if workers <= 1 or self.n_pairs <= _CHUNK:
                _backend.step_pairs(
                    self._remap, self.id_a, self.id_b,
                    self.hist_a, self.hist_b,
                    self.c_t, self.c_r, self.c_p, self.c_s,
                    *args, 0, self.n_pairs,
                )
            else:
                bounds = list(range(0, self.n_pairs, _CHUNK)) + [self.n_pairs]
                with ThreadPoolExecutor(max_workers=workers) as pool:
                    futures = [
                        pool.submit(
                            _backend.step_pairs,
                            self._remap, self.id_a, self.id_b,
                            self.hist_a, self.hist_b,
                            self.c_t, self.c_r, self.c_p, self.c_s,
                            *args, lo, hi,
                        )
                        for lo, hi in zip(bounds[:-1], bounds[1:])
                    ]
                    for f in futures:
                        f.result()
            self.t += 1
            self._totals_cache = None

    def outcome_totals(self, mask: np.ndarray | None = None) -> np.ndarray:
        """Per-strategy outcome counts (columns T, R, P, S) as int64.

        mask restricts the opponents (and scored strategies) to a subset,
        given as a uint8/bool vector over strategy ids.
        """
        if mask is None and self._totals_cache is not None:
            return self._totals_cache
        out = np.zeros((self.n_strategies, 4), dtype=np.int64)
        mask8 = None if mask is None else np.ascontiguousarray(mask, dtype=np.uint8)
        _backend.outcome_totals(
            self.id_a, self.id_b, self.c_t, self.c_r, self.c_p, self.c_s,
            mask8, out,
        )
        if mask is None:
            self._totals_cache = out
        return out

    def pair_state(self, i: int, j: int) -> PairState:
        """Counters and recent actions for the ordered pair (i, j)."""
        n = self.n_strategies
        p = pair_index(n, self.self_play, i, j) - self.pair_lo
        if not 0 <= p < self.n_pairs:
            raise IndexError(f"pair ({i}, {j}) not in this arena slice")
        swapped = i > j
        ha, hb = int(self.hist_a[p]), int(self.hist_b[p])
        if swapped:
            ha, hb = hb, ha
        depth = min(self.t, self.config.horizon)
        rec_a = tuple(Action((ha >> r) & 1) for r in range(depth))[::-1]
        rec_b = tuple(Action((hb >> r) & 1) for r in range(depth))[::-1]
        ct, cr, cp, cs = (int(self.c_t[p]), int(self.c_r[p]),
                          int(self.c_p[p]), int(self.c_s[p]))
        if swapped:
            ct, cs = cs, ct
        return PairState(rec_a, rec_b, ct, cr, cp, cs)

    def genome(self, strategy_id: int) -> StrategyGenome:
        return StrategyGenome(self.config, strategy_id)

    # -- checkpointing --------------------------------------------------

    _MAGIC = b"IPDA"
    _VERSION = 1
    _HEADER = struct.Struct("<4sHBBBBHQQQQ")

    def save(self, path: str | Path) -> None:
        """Write a versioned, checksummed snapshot of the pair state."""
        payload = b"".join(
            arr.astype(arr.dtype.newbyteorder("<"), copy=False).tobytes()
            for arr in (self.hist_a, self.hist_b,
                        self.c_t, self.c_r, self.c_p, self.c_s)
        )
        header = self._HEADER.pack(
            self._MAGIC, self._VERSION,
            self.config.own, self.config.opp, int(self.self_play), 0, 0,
            self.t, self.n_strategies, self.pair_lo, self.pair_hi,
        )
        digest = hashlib.blake2b(payload, digest_size=8).digest()
        Path(path).write_bytes(header + payload + digest)

    @classmethod
    def load(cls, path: str | Path,
             memory_limit: int = DEFAULT_MEMORY_LIMIT) -> "Arena":
        raw = Path(path).read_bytes()
        if len(raw) < cls._HEADER.size:
            raise CheckpointError(f"{path}: file shorter than the header")
        (magic, version, own, opp, self_play, _r1, _r2,
         t, n, lo, hi) = cls._HEADER.unpack_from(raw)
        if magic != cls._MAGIC:
            raise CheckpointError(f"{path}: bad magic {magic!r}")
        if version != cls._VERSION:
            raise CheckpointError(
                f"{path}: format version {version}, expected {cls._VERSION}"
            )
        config = MemoryConfig(own, opp)
        if n != config.num_strategies():
            raise CheckpointError(
                f"{path}: header claims {n} strategies for config ({config})"
            )
        pc = hi - lo
        expect = cls._HEADER.size + pc * 18 + 8
        if len(raw) != expect:
            raise CheckpointError(
                f"{path}: truncated or padded (got {len(raw)} bytes, "
                f"expected {expect})"
            )
        payload = raw[cls._HEADER.size:-8]
        digest = hashlib.blake2b(payload, digest_size=8).digest()
        if digest != raw[-8:]:
            raise CheckpointError(f"{path}: payload checksum mismatch")

        arena = cls(config, bool(self_play), pair_range=(lo, hi),
                    memory_limit=memory_limit)
        arena.t = t
        off = 0

        def take(dtype, count):
            nonlocal off
            width = np.dtype(dtype).itemsize
            arr = np.frombuffer(payload, dtype=dtype, count=count, offset=off)
            off += count * width
            return arr.astype(arr.dtype.newbyteorder("="), copy=True)

        arena.hist_a[:] = take(np.dtype(np.uint8), pc)
        arena.hist_b[:] = take(np.dtype(np.uint8), pc)
        arena.c_t[:] = take(np.dtype(np.uint32).newbyteorder("<"), pc)
        arena.c_r[:] = take(np.dtype(np.uint32).newbyteorder("<"), pc)
        arena.c_p[:] = take(np.dtype(np.uint32).newbyteorder("<"), pc)
        arena.c_s[:] = take(np.dtype(np.uint32).newbyteorder("<"), pc)
        return arena


def new_arena(config: MemoryConfig, self_play: bool = True,
              memory_limit: int = DEFAULT_MEMORY_LIMIT) -> Arena:
    """Fresh arena at t = 0 with empty histories and zeroed counters."""
    return Arena(config, self_play, memory_limit=memory_limit)


def checkpoint_save(arena: Arena, path: str | Path) -> None:
    arena.save(path)


def checkpoint_load(path: str | Path,
                    memory_limit: int = DEFAULT_MEMORY_LIMIT) -> Arena:
    return Arena.load(path, memory_limit=memory_limit)


@dataclass(frozen=True)
class PlayRecord:
    """Result of playing one pair in isolation."""

    moves_a: tuple[Action, ...]
    moves_b: tuple[Action, ...]
    counts_a: tuple[int, int, int, int]  # times A received T, R, P, S
    counts_b: tuple[int, int, int, int]


def play_pair(genome_a: StrategyGenome, genome_b: StrategyGenome,
              iterations: int) -> PlayRecord:
    """Reference oracle: explicit-history simulation of a single pair.

    Deliberately shares no state machinery with the arena; used to check
    the packed stepping path.
    """
    if genome_a.config != genome_b.config:
        raise ValueError("both strategies must come from the same class")
    moves_a: list[Action] = []
    moves_b: list[Action] = []
    counts_a = [0, 0, 0, 0]
    counts_b = [0, 0, 0, 0]
    for it in range(1, iterations + 1):
        a = decide(genome_a, it, moves_a, moves_b)
        b = decide(genome_b, it, moves_b, moves_a)
        moves_a.append(a)
        moves_b.append(b)
        if a is Action.COOPERATE:
            if b is Action.COOPERATE:
                counts_a[1] += 1
                counts_b[1] += 1
            else:
                counts_a[3] += 1
                counts_b[0] += 1
        else:
            if b is Action.COOPERATE:
                counts_a[0] += 1
                counts_b[3] += 1
            else:
                counts_a[2] += 1
                counts_b[2] += 1
    return PlayRecord(
        tuple(moves_a), tuple(moves_b),
        tuple(counts_a), tuple(counts_b),
    )
