"""Correlation-filter tracking with APCE-selected multi-resolution scale search."""
from .dcf import ResponseMap, TrackerModel, apce, detect, gaussian_labels, train, update
from .features import FeatureConfig, build_stack
from .imageproc import Rect
from .scale import ScaleDecision, ScalePool, select_scale
from .tracker import SitupTracker, TrackerConfig, TrackState, run_sequence

__version__ = "0.1.0"
