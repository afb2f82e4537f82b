"""Exception hierarchy. ``category`` doubles as the CLI error label."""


class VmricError(Exception):
    category = "numerical-failure"


class ConfigError(VmricError, ValueError):
    category = "config-invalid"


class NonstationaryError(ConfigError):
    pass


class NumericalError(VmricError, ArithmeticError):
    category = "numerical-failure"


class DegeneratePredictorError(NumericalError):
    """The predictor is identically zero over the training window."""


class SingularCovarianceError(NumericalError):
    pass


class LagTooLargeError(VmricError, ValueError):
    category = "config-invalid"
