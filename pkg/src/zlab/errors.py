"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: bad input -> 1, blown resource
cap -> 2, verification counterexample -> 3.
"""


class ZlabError(Exception):
    pass


class InputError(ZlabError, ValueError):
    """Invalid user-supplied data (alphabets, words, flags)."""


class ResourceCapError(ZlabError, RuntimeError):
    """A configured memory or enumeration budget would be exceeded."""

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class CounterexampleError(ZlabError, RuntimeError):
    """A checked statement failed while its hypotheses held."""
