"""Time-series containers, sample splitting, features and CSV ingestion."""

from oos_infer.series.features import build_features, build_from_config, standardize
from oos_infer.series.ingest import Transform, ingest_csv
from oos_infer.series.models import DesignMatrix, FeatureConfig, Series, SplitPlan
from oos_infer.series.splitting import split

__all__ = [
    "DesignMatrix",
    "FeatureConfig",
    "Series",
    "SplitPlan",
    "Transform",
    "build_features",
    "build_from_config",
    "ingest_csv",
    "split",
    "standardize",
]
