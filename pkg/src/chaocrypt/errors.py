"""Exception types shared across the toolkit."""


class ChaocryptError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(ChaocryptError, ValueError):
    """A map parameter or configuration value is outside its domain."""


class DegenerateSeed(ChaocryptError, ValueError):
    """TD-ERCS seed with |x0| = 1: y0 = 0 makes the initial tangent slope undefined."""


class NumericalDivergence(ChaocryptError, ArithmeticError):
    """A chaotic iterate left its invariant set (off the ellipse, or outside (0,1))."""


class EmptyInput(ChaocryptError, ValueError):
    """Hashing requires a nonempty byte sequence."""


class MalformedDigest(ChaocryptError, ValueError):
    """Digest string is not 128 hex characters."""


class MalformedImage(ChaocryptError, ValueError):
    """Pixel data does not form a valid image (dtype, shape or size)."""


class DimensionMismatch(ChaocryptError, ValueError):
    """Two arrays that must share dimensions do not."""


class LengthMismatch(ChaocryptError, ValueError):
    """A byte payload has the wrong length for its declared dimensions."""


class BadMagic(ChaocryptError, ValueError):
    """Envelope bytes do not start with the expected magic."""


class KeyUnavailable(ChaocryptError, ValueError):
    """Decryption key material is not present (no header kappas and no secret)."""


class ZeroVariance(ChaocryptError, ArithmeticError):
    """Correlation is undefined because one marginal is constant."""


class BaselineUnavailable(ChaocryptError, RuntimeError):
    """No AES implementation is importable; benchmark degrades to chaos-only."""
