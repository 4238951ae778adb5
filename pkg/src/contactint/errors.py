"""Exception hierarchy shared by every module of the package."""


class ContactError(Exception):
    """Base class for all errors raised by ``contactint``."""


class ModelSingularity(ContactError):
    """The model cannot evaluate its potential (or gradient) at ``q``."""


class SubflowBlowup(ContactError):
    """A frozen-time sub-flow escapes to infinity inside the step.

    Attributes
    ----------
    blowup_time : float
        Time after which the exact sub-flow ceases to exist.
    """

    def __init__(self, message, blowup_time=float("nan")):
        super().__init__(message)
        self.blowup_time = blowup_time


class DegenerateDenominator(ContactError):
    """A variational momentum update divides by (almost) zero."""


class DegenerateForm(ContactError):
    """The pulled-back contact form collapsed to (almost) zero."""


class UnsupportedRegime(ContactError):
    pass


class NoConvergence(ContactError):
    pass


class ReferenceUnavailable(ContactError):
    pass


class InsufficientSamples(ContactError):
    pass
