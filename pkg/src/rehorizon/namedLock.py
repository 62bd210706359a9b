import sys
from typing import Optional

if sys.platform == "win32":
    import win32api
    import win32event
else:
    import posix_ipc

PREFIX = "rehorizon_"


class NamedLock:
    """
    A lock any process can open by name: a named semaphore on POSIX, a named
    mutex on Windows. The POSIX lock is not reentrant; the Windows one is
    reentrant for the thread holding it.
    """

    def __init__(self, name: str):
        self._name = f"{PREFIX}{name}"
        if sys.platform == "win32":
            self._handle = win32event.CreateMutex(None, False, self._name)  # type: ignore
        else:
            self._sem = posix_ipc.Semaphore(f"/{self._name}", flags=posix_ipc.O_CREAT, initial_value=1)

    @property
    def name(self) -> str:
        return self._name

    def acquire(self, timeout: Optional[float] = None) -> bool:
        """Wait for the lock; None waits forever, 0 tries once. False on timeout."""
        if sys.platform == "win32":
            wait = win32event.INFINITE if timeout is None else int(timeout * 1000)
            status = win32event.WaitForSingleObject(self._handle, wait)
            return status in (win32event.WAIT_OBJECT_0, win32event.WAIT_ABANDONED)
        try:
            self._sem.acquire(timeout)
        except posix_ipc.BusyError:
            return False
        return True

    def release(self) -> None:
        if sys.platform == "win32":
            win32event.ReleaseMutex(self._handle)
        else:
            self._sem.release()

    def __enter__(self) -> "NamedLock":
        self.acquire()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.release()

    def close(self) -> None:
        if sys.platform == "win32":
            win32api.CloseHandle(self._handle)
        else:
            self._sem.close()

    def unlink(self) -> None:
        # a Windows mutex disappears with its last handle
        if sys.platform != "win32":
            try:
                self._sem.unlink()
            except posix_ipc.ExistentialError:
                pass
