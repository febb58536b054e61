"""Repo-wide constants: the default seed and the kernel-selection env flag."""

import os

# Default seed for every seeded construction in the library and the CLI.
DEFAULT_SEED = 1729

# Set ERGODICA_NO_NUMBA=1 to select the pure-numpy kernel path.
NO_NUMBA_ENV = "ERGODICA_NO_NUMBA"


def numba_disabled() -> bool:
    return os.environ.get(NO_NUMBA_ENV, "").strip() in ("1", "true", "yes")
