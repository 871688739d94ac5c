"""Process-wide settings for odolab.

The level cap bounds every residue space the library materialises; it is read
from ``ODOLAB_LEVEL_CAP`` on import and can be changed with
:func:`set_level_cap` (the CLI does this for ``--level-cap``).
"""

from __future__ import annotations

import logging
import os

from ..core.errors import LevelCapError

__all__ = [
    "DEFAULT_LEVEL_CAP",
    "get_level_cap",
    "set_level_cap",
    "check_level",
    "configure_logging",
]

DEFAULT_LEVEL_CAP = 24

_LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def _cap_from_environment() -> int:
    raw = os.environ.get("ODOLAB_LEVEL_CAP", "").strip()
    if not raw:
        return DEFAULT_LEVEL_CAP
    try:
        value = int(raw)
    except ValueError:
        logging.getLogger(__name__).warning(
            "ignoring non-integer ODOLAB_LEVEL_CAP=%r", raw
        )
        return DEFAULT_LEVEL_CAP
    return max(value, 0)


_level_cap = _cap_from_environment()


def get_level_cap() -> int:
    """Return the current level cap."""
    return _level_cap


def set_level_cap(cap: int) -> None:
    """Set the level cap used by every subsequent construction."""
    global _level_cap
    if cap < 0:
        raise ValueError("level cap must be nonnegative")
    _level_cap = int(cap)


def check_level(level: int) -> None:
    """Raise :class:`LevelCapError` when ``level`` exceeds the cap."""
    if level > _level_cap:
        raise LevelCapError(level, _level_cap)


def configure_logging(verbosity: int = 0) -> None:
    """Configure root logging from a ``-v`` count, falling back to ``ODOLAB_LOG_LEVEL``."""
    if verbosity >= 2:
        level = logging.DEBUG
    elif verbosity == 1:
        level = logging.INFO
    else:
        name = os.environ.get("ODOLAB_LOG_LEVEL", "WARNING").upper()
        level = getattr(logging, name, logging.WARNING)
    logging.basicConfig(level=level, format=_LOG_FORMAT)
    logging.getLogger("odolab").setLevel(level)
