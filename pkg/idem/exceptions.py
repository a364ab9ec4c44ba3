"""
Custom exception classes for the IDEM toolkit.

Each error carries the process exit code the CLI reports for it:
1 assertion failures, 2 I/O, 3 validation.
"""
from typing import Optional


class IdemError(Exception):
    exit_code = 1

    def __init__(self, detail: str, exit_code: Optional[int] = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code


class ValidationError(IdemError):
    def __init__(self, message: str):
        super().__init__(message, exit_code=3)


class CloudFileNotFoundError(IdemError):
    def __init__(self, path):
        super().__init__(f"Point cloud file not found: {path}", exit_code=2)
        self.path = path


class CloudParseError(IdemError):
    def __init__(self, path, message: str, line: Optional[int] = None):
        where = f"{path}:{line}" if line is not None else f"{path}"
        super().__init__(f"Cannot parse {where}: {message}", exit_code=2)
        self.path = path
        self.line = line


class UnsupportedFeatureError(IdemError):
    def __init__(self, path, feature: str):
        super().__init__(f"Unsupported feature in {path}: {feature}", exit_code=2)
        self.path = path
        self.feature = feature


class UnwritablePathError(IdemError):
    def __init__(self, path, reason: str):
        super().__init__(f"Cannot write {path}: {reason}", exit_code=2)
        self.path = path


class NoRoiError(IdemError):
    def __init__(self, axis: str):
        super().__init__(
            f"No q_tot peaks bracket the zero cell along axis {axis}; "
            "clouds too dissimilar or sweep range too small",
            exit_code=3,
        )
        self.axis = axis


class PreAlignmentRequiredError(IdemError):
    def __init__(self, message: str):
        super().__init__(f"Initial pose outside the ROI, pre-alignment required: {message}", exit_code=3)


class ScenarioAssertionError(IdemError):
    def __init__(self, failed: int):
        super().__init__(f"{failed} scenario assertion(s) failed", exit_code=1)
        self.failed = failed
