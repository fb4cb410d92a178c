"""Enumeration caps shared by the brute-force search paths."""

import os

DEFAULT_CAP = 2 ** 24
CAP_ENV_VAR = "GRPD_RECON_CAP"

# Node budget for the isomorphism backtracking search.
DEFAULT_SEARCH_BUDGET = 1_000_000


class EnumerationCapExceeded(RuntimeError):
    """A brute-force enumeration would exceed the configured cap."""


def resolve_cap(explicit=None):
    """Explicit cap if given, else the GRPD_RECON_CAP env var, else the default."""
    if explicit is not None:
        return explicit
    env = os.environ.get(CAP_ENV_VAR)
    if env is not None:
        return int(env)
    return DEFAULT_CAP
