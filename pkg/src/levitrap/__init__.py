"""Shot-noise heating, critical pressure and feedback-cooling analysis for
optically levitated dielectric nanoparticles."""

from .errors import LevitrapError
from .pipeline import evaluate
from .scenario import Scenario, fixture, load_scenario, validate_scenario

__version__ = "0.1.0"

__all__ = ["LevitrapError", "Scenario", "evaluate", "fixture", "load_scenario",
           "validate_scenario", "__version__"]
