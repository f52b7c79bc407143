"""Error types shared by every layer.

Each error carries a short machine-parsable ``code`` that the CLI prints on
stderr as ``error[<code>]: <message>``. All of them are ValueErrors so older
call sites that catch ValueError keep working.
"""


class BenchmarkError(ValueError):
    code = "E_GENERIC"

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details


class GridError(BenchmarkError):
    code = "E_GRID"


class VolumeSizeError(BenchmarkError):
    code = "E_SIZE"


class NonFiniteError(BenchmarkError):
    code = "E_NONFINITE"

    def __init__(self, message: str, voxel_index: int = -1, **details):
        super().__init__(message, voxel_index=voxel_index, **details)
        self.voxel_index = voxel_index


class FieldValidationError(BenchmarkError):
    code = "E_FIELD"


class MissingChannelError(BenchmarkError):
    code = "E_CHANNEL"


class FilterError(BenchmarkError):
    code = "E_FACTOR"


class DomainTooSmallError(BenchmarkError):
    code = "E_DOMAIN"


class ManifestError(BenchmarkError):
    code = "E_MANIFEST"


class SymmetryError(BenchmarkError):
    code = "E_SYMMETRY"


class ConfigError(BenchmarkError):
    code = "E_CONFIG"


class SamplingError(BenchmarkError):
    code = "E_SAMPLE"
