"""The BRST complex: fields, operators and the deformed augmentation."""

from .fields import SuperField, star_kappa, super_poisson, wedge  # noqa: F401
