"""Error types shared by every module.

Each error carries a ``kind`` string used by the command line tool to pick
an exit code and by callers that want structured error reporting.
"""

from __future__ import annotations

import os

DEFAULT_VERTEX_CAP = 5_000_000


class CrystalError(Exception):
    kind = "error"


class InputError(CrystalError, ValueError):
    """Bad user input: negative parameters, wrong lengths, mismatched family."""

    kind = "input"


class MalformedCrystalError(CrystalError):
    """A graph that does not have the structure an operation requires."""

    kind = "malformed-crystal"


class ResourceLimitError(CrystalError):
    """A construction would exceed the configured vertex cap."""

    kind = "resource"


def vertex_cap() -> int:
    raw = os.environ.get("CRYSTAL_MAX_VERTICES")
    if raw is None:
        return DEFAULT_VERTEX_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise InputError(f"CRYSTAL_MAX_VERTICES must be an integer, got {raw!r}") from None
    if cap <= 0:
        raise InputError("CRYSTAL_MAX_VERTICES must be positive")
    return cap


def check_cap(count: int, what: str = "crystal") -> None:
    cap = vertex_cap()
    if count > cap:
        raise ResourceLimitError(f"{what} needs more than {cap} vertices ({count})")


def parse_parameter(c, *, length: int | None = None, name: str = "c") -> tuple[int, ...]:
    """Validate a tuple of nonnegative integers."""
    try:
        values = tuple(int(x) for x in c)
    except (TypeError, ValueError):
        raise InputError(f"{name} must be a sequence of integers") from None
    for x, raw in zip(values, c):
        if x != raw:
            raise InputError(f"{name} must contain integers, got {raw!r}")
    if any(x < 0 for x in values):
        raise InputError(f"{name} must be nonnegative, got {values}")
    if length is not None and len(values) != length:
        raise InputError(f"{name} must have length {length}, got {len(values)}")
    return values
