from django.core.exceptions import ValidationError
from django.utils.deconstruct import deconstructible
from django.utils.translation import gettext_lazy as _


@deconstructible
class IntegerRangeValidator:
    """
    Accepts integers in ``[minimum, maximum]``; ``maximum=None`` leaves the
    range open above.
    """

    def __init__(self, name, minimum=1, maximum=None):
        self.name = name
        self.minimum = minimum
        self.maximum = maximum

    def __call__(self, value):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValidationError(
                _("%(name)s must be an integer, got %(value)r."),
                code="not_integer",
                params={"name": self.name, "value": value},
            )
        if value < self.minimum or (self.maximum is not None and value > self.maximum):
            raise ValidationError(
                _("%(name)s must lie in [%(minimum)s, %(maximum)s], got %(value)s."),
                code="out_of_range",
                params={
                    "name": self.name,
                    "minimum": self.minimum,
                    "maximum": "inf" if self.maximum is None else self.maximum,
                    "value": value,
                },
            )

    def __eq__(self, other):
        return (
            isinstance(other, self.__class__)
            and self.name == other.name
            and self.minimum == other.minimum
            and self.maximum == other.maximum
        )


def validate_count(value, name="n", minimum=1, maximum=None):
    IntegerRangeValidator(name, minimum, maximum)(value)
