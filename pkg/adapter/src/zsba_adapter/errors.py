class AdapterError(Exception):
    """Base class for adapter failures."""


class TaskFileError(AdapterError):
    """The task file is malformed or violates its schema."""


class ExportError(AdapterError):
    """The export job cannot run as configured."""


class ModelUnavailableError(AdapterError):
    """A real encoder or mask generator could not be loaded."""
