"""Exception hierarchy.

Every error carries a ``category`` used by the CLI to pick an exit code.
"""


class WavecohError(Exception):
    category = "internal"
    exit_code = 1


class ParseError(WavecohError):
    category = "parse"
    exit_code = 2

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f":{line}"
        super().__init__(f"{where}: {message}" if where else message)


class GapError(ParseError):
    category = "gap"
    exit_code = 3

    def __init__(self, missing, path=None):
        self.missing = list(missing)
        shown = ", ".join(self.missing[:10])
        more = f" (+{len(self.missing) - 10} more)" if len(self.missing) > 10 else ""
        super().__init__(f"gap in time axis, missing: {shown}{more}", path=path)


class SeriesValueError(ParseError):
    category = "value"
    exit_code = 4


class StepError(WavecohError):
    category = "step"
    exit_code = 5


class AlignmentError(WavecohError):
    category = "alignment"
    exit_code = 6


class DimensionError(WavecohError):
    category = "dimension"
    exit_code = 7


class EmptyGridError(WavecohError):
    category = "grid"
    exit_code = 8


class DegenerateSeriesError(WavecohError):
    category = "degenerate"
    exit_code = 9

    def __init__(self, message, label=None):
        self.label = label
        super().__init__(f"{label}: {message}" if label else message)


class ConfigurationError(WavecohError):
    category = "config"
    exit_code = 10


class SampleSizeError(WavecohError):
    category = "sample-size"
    exit_code = 11


class ConditioningError(WavecohError):
    category = "conditioning"
    exit_code = 12
