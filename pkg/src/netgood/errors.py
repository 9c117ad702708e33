"""Exception types shared across the package."""


class NetgoodError(Exception):
    pass


class GraphError(NetgoodError, ValueError):
    """Malformed topology, bad generator parameters or unparsable graph text."""


class InvalidProfile(NetgoodError, ValueError):
    pass


class InvalidGameSpec(NetgoodError, ValueError):
    pass


class NotAnEquilibrium(NetgoodError, ValueError):
    """Raised where an operation is only defined at equilibrium profiles."""


class LimitExceeded(NetgoodError, ValueError):
    """Instance too large for an exhaustive routine."""


class CertificateError(NetgoodError, ValueError):
    """Certificate JSON does not have the expected shape."""
