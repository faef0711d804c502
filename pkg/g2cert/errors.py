"""Exception types raised by g2cert.

Mathematical outcomes (a failed check, an inconclusive search) are returned
as values; these exceptions signal bad input, bad data, or a broken contract.
"""


class G2CertError(Exception):
    """Base class for every g2cert error."""


class ParseError(G2CertError):
    def __init__(self, message: str, text: str = "", position: int = -1):
        self.message = message
        self.text = text
        self.position = position
        if position >= 0:
            message = f"{message} at position {position} in {text!r}"
        super().__init__(message)


class ArityError(G2CertError):
    """Structure text has the wrong number of slots."""


class BadSpec(G2CertError):
    """Structure data is not a valid nilpotent presentation."""


class JacobiViolation(G2CertError):
    def __init__(self, generator: int, residual):
        self.generator = generator
        self.residual = residual
        super().__init__(f"d(d e^{generator}) = {residual} is not zero")


class DimensionMismatch(G2CertError):
    pass


class MismatchedRadicand(G2CertError):
    pass


class NotSymmetric(G2CertError):
    pass


class NotCentral(G2CertError):
    pass


class NonNegativeLambda(G2CertError):
    pass


class CertificateInvariantViolation(G2CertError):
    def __init__(self, condition: str, detail: str = ""):
        self.condition = condition
        message = condition if not detail else f"{condition}: {detail}"
        super().__init__(message)


class NotPositiveDefinite(G2CertError):
    pass


class BadCertificate(G2CertError):
    pass


class RegimeViolation(G2CertError):
    pass


class UnknownFamily(G2CertError):
    pass


class DomainError(G2CertError):
    pass


class NotFound(G2CertError):
    pass


class ConsistencyError(G2CertError):
    pass


class ConfigError(G2CertError):
    pass
