"""p-adic numbers, q-deformed Volkenborn integrals, q-Euler numbers and the q-log-gamma function."""

from ._core import *  # noqa: F401,F403
from ._core import PadicqError, run_cli

__all__ = [name for name in dir() if not name.startswith("_")]
