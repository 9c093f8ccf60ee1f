"""figkit: figure layouts for cavdot scenario CSV time series."""

__version__ = "0.1.0"

from .csvio import ColumnError, SeriesFile, read_series  # noqa: F401
from .figures import FIGURE_IDS, FigureSpec, concurrence_peak_times, render  # noqa: F401
