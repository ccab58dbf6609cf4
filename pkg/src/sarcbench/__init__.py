"""Classical context-free sarcasm detection baseline on SARC replies."""

from .corpus import ColumnSpec, LabeledDataset, SamplingConfig
from .features import FeaturizerConfig, FittedFeaturizer
from .metrics import EvalReport, evaluate
from .sparse import CsrMatrix

__version__ = "0.1.0"
