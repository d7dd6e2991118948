"""Shared exception types; the CLI maps them onto its exit-code contract."""


class InputError(ValueError):
    """Malformed or inconsistent input: files, schemas, graph structure,
    request ordering. CLI exit code 1."""


class InfeasibleError(RuntimeError):
    """The instance cannot be planned at all, e.g. no reachable sink.
    CLI exit code 2."""
