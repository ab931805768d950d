from django.db import models
from django.utils.translation import gettext_lazy as _


class FitMode(models.TextChoices):
    HOM = "hom", _("Affine equivalence")
    SIM = "sim", _("Similarity")


class Relation(models.TextChoices):
    AFFINE_EQUIVALENT = "affine-equivalent", _("Affine equivalent")
    NOT_AFFINE_EQUIVALENT = "not-affine-equivalent", _("Not affine equivalent")
    SIMILAR = "similar", _("Similar")
    SIMILAR_TO_REFLECTION = "similar-to-reflection", _("Similar to the reflection")
    NOT_SIMILAR = "not-similar", _("Not similar")
    UNDECIDED = "undecided", _("Undecided")

    @property
    def equivalent(self) -> bool:
        return self in (
            Relation.AFFINE_EQUIVALENT,
            Relation.SIMILAR,
            Relation.SIMILAR_TO_REFLECTION,
        )


class Ordering(models.TextChoices):
    A_LONGER = "a>b", _("A stretches further")
    B_LONGER = "b>a", _("B stretches further")
    INCONCLUSIVE = "inconclusive", _("Inconclusive")
