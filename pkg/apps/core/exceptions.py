from django.utils.translation import gettext_lazy as _


class DisklabError(Exception):
    """
    Base class for computational failures.

    ``kind`` is the machine-readable tag the command line prints as
    ``error:<kind>:``; input problems are ``ValidationError`` instead.
    """

    kind = "internal"

    def __init__(self, message, **details):
        super().__init__(str(message))
        self.details = details


class UnsupportedRegionError(DisklabError):
    kind = "unsupported-region"


class ConstructionError(DisklabError):
    kind = "construction"


class ConversionError(DisklabError):
    kind = "conversion"

    def __init__(self, message, pairs=(), **details):
        super().__init__(message, **details)
        self.pairs = list(pairs)

    def __str__(self):
        text = super().__str__()
        if not self.pairs:
            return text
        shown = ", ".join(f"{a}~{b}" for a, b in self.pairs[:8])
        more = len(self.pairs) - 8
        if more > 0:
            shown += str(_(" (+%(count)d more)") % {"count": more})
        return f"{text} [{shown}]"


class ReconstructionError(DisklabError):
    kind = "reconstruction"
