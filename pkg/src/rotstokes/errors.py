"""Exception types shared across the package."""


class RotstokesError(Exception):
    """Base class for package-specific failures."""


class SingularFrequencyError(RotstokesError):
    """Operation requested at the zero horizontal frequency, where the mode
    matrix is singular and the zero-mode (Ekman) closed form must be used."""


class CompatibilityError(RotstokesError):
    """Boundary data violates the zero-mean / potential compatibility
    condition required by the 1/|xi| singularity of the vertical symbol."""


class ConfigError(RotstokesError):
    """Run configuration failed validation (bad value, bad file, bad source)."""


class ConvergenceError(RotstokesError):
    """Iterative solver exhausted its budget without reaching tolerance."""


class FieldFormatError(RotstokesError):
    """Malformed field file; message names the offending line."""
