"""Exception types raised across the package."""


class LogFormatError(ValueError):
    """An event log file could not be turned into an EventLog."""


class SpecificationError(ValueError):
    """A Declare specification file is malformed or names unknown templates."""


class DegenerateAnalysisError(ValueError):
    """The variant comparison has nothing meaningful to compute (e.g. an empty log)."""
