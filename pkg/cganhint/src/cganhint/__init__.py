"""Single-pair adversarial hint painter.

Trains an image-to-image model on one (mono, color) page pair, optionally
augmented with crops of itself, and paints coarse color hints for the
colorization pipeline. The hint PNG is the only runtime contract between
the two packages.
"""

from .data import CropRect, TrainingPair, crop_variants, make_training_pair
from .errors import CganHintError, ConfigError
from .infer import infer, infer_file, load_generator
from .model import Discriminator, Generator
from .train import TrainConfig, TrainResult, smoothed, train

__all__ = [
    "CropRect", "TrainingPair", "crop_variants", "make_training_pair",
    "CganHintError", "ConfigError",
    "infer", "infer_file", "load_generator",
    "Discriminator", "Generator",
    "TrainConfig", "TrainResult", "smoothed", "train",
]
