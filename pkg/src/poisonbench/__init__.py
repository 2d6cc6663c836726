"""Label-flipping poisoning harness for ensemble classifiers on EEG band-power features."""
from ._core import BACKEND

__version__ = "0.1.0"
