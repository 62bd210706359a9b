import struct
from enum import Enum
from multiprocessing import shared_memory
from typing import Dict, Sequence, Tuple

from .namedLock import NamedLock


class CounterTypes(Enum):
    INT32 = "i"
    UINT32 = "I"
    INT64 = "q"
    UINT64 = "Q"


class SharedCounter:
    """
    Named integer slots packed into one shared-memory segment.

    The first process to open a name creates the segment with every slot at
    zero; later ones attach to it. Reads and updates hold a NamedLock of the
    same name, so `add` is atomic across processes.
    """

    def __init__(self, name: str, slots: Sequence[str] = ("value",), kind: CounterTypes = CounterTypes.INT64):
        if not slots or len(set(slots)) != len(slots):
            raise ValueError(f"slot names must be distinct and non-empty, got {slots!r}")
        self._name = name
        self._slots = tuple(slots)
        self._format = f"{len(self._slots)}{kind.value}"
        self._size = struct.calcsize(self._format)
        self._lock = NamedLock(name)
        try:
            self._shm = shared_memory.SharedMemory(name=name, create=True, size=self._size)
            self._owner = True
            self._pack((0,) * len(self._slots))
        except FileExistsError:
            self._shm = shared_memory.SharedMemory(name=name)
            self._owner = False

    def _unpack(self) -> Tuple[int, ...]:
        return struct.unpack(self._format, self._shm.buf[: self._size])

    def _pack(self, values: Sequence[int]) -> None:
        self._shm.buf[: self._size] = struct.pack(self._format, *values)

    @property
    def name(self) -> str:
        return self._name

    @property
    def slots(self) -> Tuple[str, ...]:
        return self._slots

    @property
    def owner(self) -> bool:
        return self._owner

    def read(self) -> Dict[str, int]:
        with self._lock:
            return dict(zip(self._slots, self._unpack()))

    def __getitem__(self, slot: str) -> int:
        return self.read()[slot]

    def add(self, **amounts: int) -> Dict[str, int]:
        """Add to the named slots in one locked update; returns every slot's new value."""
        unknown = set(amounts) - set(self._slots)
        if unknown:
            raise KeyError(f"unknown slots {sorted(unknown)}")
        with self._lock:
            values = [v + amounts.get(slot, 0) for slot, v in zip(self._slots, self._unpack())]
            self._pack(values)
        return dict(zip(self._slots, values))

    def reset(self) -> None:
        with self._lock:
            self._pack((0,) * len(self._slots))

    def __repr__(self):
        values = ", ".join(f"{s}={v}" for s, v in zip(self._slots, self._unpack()))
        return f"<SharedCounter {self._name}: {values}>"

    def close(self) -> None:
        self._shm.close()
        self._lock.close()

    def unlink(self) -> None:
        self._shm.unlink()
        self._lock.unlink()


class SharedProgress:
    """Windows solved and operations committed inside the running tasks of one pool."""

    SLOTS = ("windows", "operations")

    def __init__(self, name: str):
        self.name = name
        self._counter = SharedCounter(name, self.SLOTS)

    @property
    def owner(self) -> bool:
        return self._counter.owner

    def add_window(self, committed: int) -> None:
        self._counter.add(windows=1, operations=committed)

    def snapshot(self) -> Tuple[int, int]:
        values = self._counter.read()
        return values["windows"], values["operations"]

    def __repr__(self):
        windows, operations = self.snapshot()
        return f"<SharedProgress {self.name}: {windows} windows, {operations} operations>"

    def close(self) -> None:
        self._counter.close()

    def unlink(self) -> None:
        self._counter.unlink()
