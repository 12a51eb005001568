"""Exception types shared across the package.

The command line front end maps these onto distinct process exit codes,
so library code should raise the most specific class that applies.
"""


class ConfigError(Exception):
    """Invalid configuration, material database, or input file."""


class NumericsError(Exception):
    """A numerical routine failed to meet its accuracy contract."""
