"""Exception hierarchy.

Every error carries a stable ``code`` string so that command-line reports can
surface failures as machine-readable objects.
"""

from __future__ import annotations


class PanelTestError(Exception):
    """Base class for all errors raised by :mod:`shortpanel`."""

    code = "panel_test_error"

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details

    def to_dict(self) -> dict:
        out = {"code": self.code, "message": str(self)}
        out.update({k: v for k, v in self.details.items() if v is not None})
        return out


class InvalidArgument(PanelTestError, ValueError):
    code = "invalid_argument"


class ShortPanel(PanelTestError, ValueError):
    code = "short_panel"


class NonFiniteData(PanelTestError, ValueError):
    code = "non_finite_data"


class DegenerateDenominator(PanelTestError, ArithmeticError):
    """A denominator of the ratio statistic vanished (constant or collinear data)."""

    code = "degenerate_denominator"


class ZeroVariance(PanelTestError, ArithmeticError):
    code = "zero_variance"


class NotPSD(PanelTestError, ArithmeticError):
    code = "not_psd"


class DegenerateDraw(PanelTestError, ArithmeticError):
    code = "degenerate_draw"


class TooManyDegenerate(PanelTestError, ArithmeticError):
    code = "too_many_degenerate"


class NonStationaryParams(PanelTestError, ValueError):
    code = "non_stationary_params"


class RaggedRows(PanelTestError, ValueError):
    code = "ragged_rows"


class NonNumericCell(PanelTestError, ValueError):
    code = "non_numeric_cell"


class NonPositiveForLog(PanelTestError, ValueError):
    code = "non_positive_for_log"


class ShapeMismatch(PanelTestError, ValueError):
    code = "shape_mismatch"
