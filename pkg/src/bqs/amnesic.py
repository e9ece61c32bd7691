"""Amnesic storage management: fixed slots, age index, sinking re-compression.

An :class:`AmnesicStore` owns ``N`` storage slots and keeps every incoming
point somewhere in them forever, trading precision for space instead of
overwriting ("hard loss").  Stored data is grouped into generations: age-0
points are verbatim, and whenever the free space runs out the youngest
generation is re-compressed in place to the next generation's tolerance
``m^age * epsilon``.  Older generations therefore sink toward slot 0 with
geometrically growing tolerances while recent data stays precise.

Layout (concretized from the reference storyboard): slots are used bottom-up,
slot 0 holds the oldest data, each generation occupies one contiguous block,
and the age-0 block grows toward slot ``N - 1``.  The index lists one entry
per live generation in ascending age order, so ``index[0]`` is always the
youngest generation and also the block nearest the free end.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import BinaryIO, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .core import CompressorState, Mode
from .errors import NoSuchGeneration, StorageExhausted, TimeOrder
from .geometry import Point

DUMP_MAGIC = b"ABQS\x00\x01\x00\x00"

_MAX_SINK_PASSES = 256


@dataclass
class IndexEntry:
    """One generation's contiguous slot block: [s, e] inclusive, age a."""

    s: int
    e: int
    a: int

    @property
    def size(self) -> int:
        return self.e - self.s + 1


class AgedPoint(NamedTuple):
    """A live stored point together with its generation's error tolerance."""

    point: Point
    age: int
    tolerance: float


class SinkEvent(NamedTuple):
    """Record of one in-place re-compression pass (for audits and replays)."""

    age_from: int
    age_to: int
    src_start: int
    src_end: int
    dest_start: int
    keys_out: int
    index_after: Tuple[Tuple[int, int, int], ...]


class AmnesicStore:
    """Fixed-capacity point store with age-based progressive re-compression.

    Points inserted in strict time order are appended to the age-0 block.
    When the block hits the top of the storage, or an aged youngest block
    crosses its reserve threshold ``N - k - age``, the youngest generation
    is re-compressed in place to tolerance ``multiplier^(age+1) * epsilon``
    and merged into the next older generation.  ``k`` slots stay reserved
    for incoming age-0 points; one extra slot per age step keeps every
    future re-compression meaningful.

    Raises StorageExhausted when sinking cannot free a slot, which only
    happens when the capacity is too small to hold the minimal layout.
    """

    def __init__(self, capacity: int, epsilon: float, *, k: int = 8,
                 multiplier: float = 2.5, r_init: int = 5) -> None:
        if capacity < 1:
            raise ValueError(f"capacity must be positive, got {capacity}")
        if epsilon <= 0.0:
            raise ValueError(f"epsilon must be positive, got {epsilon}")
        if k < 1:
            raise ValueError(f"k must be at least 1, got {k}")
        if multiplier <= 2.0:
            raise ValueError(
                f"multiplier must exceed 2, got {multiplier}: re-compression "
                "widens bounds by twice the previous tolerance, so m <= 2 "
                "leaves no budget for dropping points")
        self.capacity = capacity
        self.epsilon = epsilon
        self.k = k
        self.multiplier = multiplier
        self.r_init = r_init
        self.ts = np.full(capacity, np.nan)
        self.xs = np.full(capacity, np.nan)
        self.ys = np.full(capacity, np.nan)
        self.index: List[IndexEntry] = []
        self.event_log: List[SinkEvent] = []
        self._last_t: Optional[float] = None

    # -- bookkeeping -------------------------------------------------------

    def tolerance(self, age: int) -> float:
        """Error tolerance carried by generation ``age``."""
        return float(self.multiplier ** age * self.epsilon)

    def point_at(self, slot: int) -> Point:
        return Point(float(self.ts[slot]), float(self.xs[slot]), float(self.ys[slot]))

    @property
    def live_count(self) -> int:
        return self.index[0].e + 1 if self.index else 0

    @property
    def slots(self) -> List[Optional[Point]]:
        """Materialized slot view: a Point where live, None elsewhere."""
        out: List[Optional[Point]] = [None] * self.capacity
        for entry in self.index:
            for slot in range(entry.s, entry.e + 1):
                out[slot] = self.point_at(slot)
        return out

    def _entry_for(self, age: int) -> Optional[IndexEntry]:
        for entry in self.index:
            if entry.a == age:
                return entry
        return None

    def update_index(self, age: int, s: int, e: int) -> None:
        """Index maintenance with sentinel semantics.

        ``(s, e) == (-1, -1)`` deletes the age's entry, ``s == -1`` with a
        real ``e`` updates the end slot only, and two real slots upsert the
        entry keeping the list ordered by ascending age.
        """
        entry = self._entry_for(age)
        if s == -1 and e == -1:
            if entry is None:
                raise NoSuchGeneration(f"no index entry for age {age}")
            self.index.remove(entry)
            return
        if s == -1:
            if entry is None:
                raise NoSuchGeneration(f"no index entry for age {age}")
            if not entry.s <= e < self.capacity:
                raise ValueError(f"end slot {e} outside [{entry.s}, {self.capacity})")
            entry.e = e
            return
        if e == -1:
            raise ValueError("end slot required when start slot is given")
        if not 0 <= s <= e < self.capacity:
            raise ValueError(f"slot range [{s}, {e}] outside storage of {self.capacity}")
        if entry is not None:
            entry.s, entry.e = s, e
            return
        at = sum(1 for other in self.index if other.a < age)
        self.index.insert(at, IndexEntry(s, e, age))

    # -- the machine -------------------------------------------------------

    def insert(self, p: Point) -> None:
        """Store one point (strictly increasing timestamps), sinking if needed."""
        if self._last_t is not None and p.t <= self._last_t:
            raise TimeOrder(f"timestamp {p.t} does not advance past {self._last_t}")
        if self.index:
            slot = self.index[0].e + 1
            if slot >= self.capacity:
                raise StorageExhausted(
                    f"no free slot for new point in storage of {self.capacity}")
            if self.index[0].a == 0:
                self.update_index(0, -1, slot)
            else:
                self.update_index(0, slot, slot)
        else:
            slot = 0
            self.update_index(0, slot, slot)
        self.ts[slot] = p.t
        self.xs[slot] = p.x
        self.ys[slot] = p.y
        self._last_t = p.t
        self.sink()

    def trigger(self) -> bool:
        """True when the youngest generation must be re-compressed."""
        if not self.index:
            return False
        head = self.index[0]
        if head.a == 0 and head.e == self.capacity - 1:
            return True
        if head.a > 0 and head.e > self.capacity - self.k - head.a:
            return True
        return False

    def sink(self) -> None:
        """Re-compress the youngest generation while the trigger holds."""
        passes = 0
        while self.trigger():
            head = self.index[0]
            if len(self.index) == 1 and head.a > 0 and head.size <= 2:
                raise StorageExhausted(
                    f"cannot shrink {head.size} age-{head.a} points in "
                    f"storage of {self.capacity} with k={self.k}")
            passes += 1
            if passes > _MAX_SINK_PASSES:
                raise StorageExhausted(
                    f"sinking made no room after {_MAX_SINK_PASSES} passes; "
                    f"storage of {self.capacity} is below the minimal layout")
            dest = 0 if len(self.index) == 1 else self.index[1].e + 1
            self.compress_generation(head.s, head.e, head.a, dest)

    def compress_generation(self, src_start: int, src_end: int, age: int,
                            dest_start: int) -> None:
        """One ageing pass: stream slots [src_start, src_end] of the given
        age through progressive re-compression at the next generation's
        tolerance, writing surviving keys from dest_start onward.

        Keys are written as they are decided and the write cursor never
        passes the read cursor, so the pass is safe when source and
        destination overlap (they always fully overlap in practice).
        """
        if dest_start > src_start:
            raise ValueError("destination may not start past the source")
        eps_prev = self.tolerance(age)
        eps_new = self.tolerance(age + 1)
        machine = CompressorState(eps_new, mode=Mode.FAST,
                                  epsilon_prev=eps_prev, r_init=self.r_init)
        write = dest_start
        last_key_t: Optional[float] = None

        def emit(q: Point, read: int) -> None:
            nonlocal write, last_key_t
            assert write <= read, "write cursor passed the read cursor"
            self.ts[write] = q.t
            self.xs[write] = q.x
            self.ys[write] = q.y
            last_key_t = q.t
            write += 1

        for read in range(src_start, src_end + 1):
            p = self.point_at(read)
            decision = machine.step(p)
            if last_key_t is None:
                emit(p, read)
            elif decision.is_key:
                emit(decision.key, read)
        tail = machine.flush()
        if tail is not None and tail.t != last_key_t:
            emit(tail, src_end)

        self.update_index(age, -1, -1)
        if self._entry_for(age + 1) is not None:
            self.update_index(age + 1, -1, write - 1)
        else:
            self.update_index(age + 1, dest_start, write - 1)
        self.event_log.append(SinkEvent(
            age, age + 1, src_start, src_end, dest_start, write - dest_start,
            tuple((entry.a, entry.s, entry.e) for entry in self.index)))

    def export(self) -> List[AgedPoint]:
        """All live points in time order with their age and tolerance labels."""
        out: List[AgedPoint] = []
        for entry in reversed(self.index):
            tol = self.tolerance(entry.a)
            for slot in range(entry.s, entry.e + 1):
                out.append(AgedPoint(self.point_at(slot), entry.a, tol))
        return out


# -- procedure-style aliases over the store methods ------------------------


def abqs_insert(store: AmnesicStore, p: Point) -> None:
    """Feed one point into the amnesic store."""
    store.insert(p)


def trigger(store: AmnesicStore) -> bool:
    """Whether an ageing pass is due."""
    return store.trigger()


def amnesic_sinking(store: AmnesicStore) -> None:
    """Run ageing passes until the trigger clears."""
    store.sink()


def compress_generation(store: AmnesicStore, src_start: int, src_end: int,
                        age: int, dest_start: int) -> None:
    """Run one explicit ageing pass (normally invoked via sinking)."""
    store.compress_generation(src_start, src_end, age, dest_start)


def update_index(store: AmnesicStore, age: int, s: int, e: int) -> None:
    """Apply one index maintenance operation (see AmnesicStore.update_index)."""
    store.update_index(age, s, e)


def export_store(store: AmnesicStore) -> List[AgedPoint]:
    """All live points in time order with age and tolerance labels."""
    return store.export()


# -- binary dump ------------------------------------------------------------


def dump_store(store: AmnesicStore, sink: BinaryIO) -> None:
    """Write the store to a binary stream.

    Format, all little-endian: the 8-byte magic ``ABQS\\0\\1\\0\\0``, u32
    slot count, u32 index entry count, then one (f64 t, f64 x, f64 y)
    record per slot (NaN where the slot is dead), then one (u32 s, u32 e,
    u32 a) record per index entry in ascending age order.
    """
    sink.write(DUMP_MAGIC)
    sink.write(struct.pack("<II", store.capacity, len(store.index)))
    records = np.column_stack((store.ts, store.xs, store.ys)).astype("<f8")
    sink.write(records.tobytes())
    for entry in store.index:
        sink.write(struct.pack("<III", entry.s, entry.e, entry.a))


def load_dump(source: BinaryIO) -> Tuple[np.ndarray, List[IndexEntry]]:
    """Read a dump back as (slot records (N, 3) of t/x/y, index entries)."""
    magic = source.read(len(DUMP_MAGIC))
    if magic != DUMP_MAGIC:
        raise ValueError(f"bad magic {magic!r}; not an amnesic store dump")
    capacity, n_entries = struct.unpack("<II", source.read(8))
    records = np.frombuffer(source.read(capacity * 24), dtype="<f8")
    records = records.reshape(capacity, 3).copy()
    entries = [IndexEntry(*struct.unpack("<III", source.read(12)))
               for _ in range(n_entries)]
    return records, entries


# -- deterministic storyboard scenario --------------------------------------


def storyboard_stream(n: int = 64) -> List[Point]:
    """Deterministic jagged stream for the small-store ageing storyboard.

    A 1 Hz track that alternates straight runs with sharp corners at two
    scales: minor corners survive tolerance 2 but fold at 10, major corners
    survive 10 but fold at 50, so a small store driven with epsilon=2 and
    multiplier=5 walks through the full ageing cascade.
    """
    pts: List[Point] = []
    x = y = 0.0
    for i in range(n):
        x += 10.0
        if (i + 1) % 4 == 0:
            y += 18.0 if (i + 1) % 16 == 0 else 6.0
        pts.append(Point(float(i), x, y))
    return pts
