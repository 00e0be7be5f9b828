"""Exact computations for pairs of diagonal cubic forms.

The submodules cover coefficient screening (``mgood``, ``arrangement``), local
solution counts (``local``), the truncated singular series (``series``), the
probability of the M-good condition (``probability``), the exponent optimizer
(``exponents``), small-zero searches (``search``) and the CLI (``cli``).
"""

from .core import FeasibilityError, FormPair, FormPairError, parse_form_pair
from .mgood import check_mgood

__all__ = ["FeasibilityError", "FormPair", "FormPairError", "check_mgood", "parse_form_pair"]
__version__ = "0.1.0"
