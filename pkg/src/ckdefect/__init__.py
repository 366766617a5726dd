"""CK design metrics (WMC, DIT, RFC) and a polynomial defect-proneness index."""

__version__ = "0.1.0"

from .estimation import CALIBRATED, PUBLISHED, ModelSet, class_dpi, project_dpi
from .metrics import MetricVector, WmcMode, compute_all
from .model import ClassModel, ingest_model, validate

__all__ = [
    "CALIBRATED", "PUBLISHED", "ClassModel", "MetricVector", "ModelSet", "WmcMode",
    "class_dpi", "compute_all", "ingest_model", "project_dpi", "validate",
]
