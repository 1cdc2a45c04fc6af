"""Generalized robust risk minimization over finite spaces."""

from ._grrm import *  # noqa: F401,F403
from ._grrm import __version__  # noqa: F401
