"""Exception and warning types shared across the package."""


class HolobenchError(Exception):
    """Base class for all errors raised by this package."""


class GridMismatch(HolobenchError):
    """Two fields that must share a grid do not."""


class AliasedCarrier(HolobenchError):
    """A spatial-frequency carrier at or above the Nyquist limit of its grid."""


class CropOutOfBounds(HolobenchError):
    """Requested crop circle extends past the spectrum extent."""


class OrderTooHigh(HolobenchError):
    """Hermite polynomial order above the supported guard."""


class BasisNotOrthonormal(HolobenchError):
    """Mode basis whose Gram matrix deviates from identity beyond tolerance."""


class NoSideband(HolobenchError):
    """No spectral peak stands out from the background; signal absent."""


class ConjugateAmbiguity(HolobenchError):
    """A sideband/conjugate pair too close to the disambiguation boundary."""


class SidebandAssignmentAmbiguous(HolobenchError):
    """Both located sidebands map to the same configured reference carrier."""


class ConjugateOverlap(HolobenchError):
    """Crop disk would overlap the disk of the conjugate image."""


class DuplicateInput(HolobenchError):
    """The same (port, polarization) excitation was supplied twice."""


class MissingInput(HolobenchError):
    """An expected (port, polarization) excitation is absent."""


class ConfigError(HolobenchError):
    """Invalid or inconsistent run configuration."""


class DcContamination(UserWarning):
    """Crop circle includes the DC bin; autointensity terms will leak in."""


class SaturationWarning(UserWarning):
    """More than 1% of camera pixels clipped at the top code."""


class NormalizationUnreliable(UserWarning):
    """Grid extent below 6 waists; numerical mode normalization is suspect."""
