"""Exception taxonomy shared across the package."""


class ScriptoriumError(Exception):
    """Base class for all errors raised by this package."""


class ArgumentError(ScriptoriumError, ValueError):
    """A caller-supplied argument violates an operation's contract."""


class NotFoundError(ScriptoriumError, KeyError):
    """A fragment, glyph class, tool, or session id does not exist."""

    def __str__(self):  # KeyError quotes its arg; keep plain message
        return Exception.__str__(self)


class StateError(ScriptoriumError):
    """Operation invoked against an empty or unbuilt store/index."""


class SnapshotCorruptionError(ScriptoriumError):
    """On-disk snapshot content does not match its manifest checksums."""


class UnsupportedFormatError(ScriptoriumError):
    """Directory is not a snapshot or uses an unknown format version."""


class PlanningError(ScriptoriumError):
    """No applicable plan template and no LLM backend available."""


class LlmUnavailableError(ScriptoriumError):
    """LLM backend failed after retries, or scripted fixture missed."""
