"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Image, ROI or seed data that cannot be processed."""


class InvalidConfigError(ValueError):
    """A configuration value outside its legal range."""


class InvalidSeedError(InvalidInputError):
    """Seed axis that cannot define an initial contour."""


class InvalidSpecError(InvalidInputError):
    """Phantom specification that cannot be rasterized."""


class ContractViolationError(ValueError):
    """An argument violated a documented precondition (e.g. unnormalized histogram)."""


class ContourCollapseError(RuntimeError):
    """The zero level set vanished (phi became single-signed).

    When raised from a running segmentation, ``partial_result`` carries the
    traces accumulated up to the failing iteration.
    """

    def __init__(self, msg, partial_result=None):
        super().__init__(msg)
        self.partial_result = partial_result
