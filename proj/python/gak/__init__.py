"""Global alignment kernels for time series."""

from ._gak import *  # noqa: F401,F403
from ._gak import __version__  # noqa: F401
