"""Insert one train path into an existing macroscopic timetable."""

from .model import InsertionRequest, Network, ParameterSet, Timetable
from .pipeline import RunReport, insert

__version__ = "0.1.0"
