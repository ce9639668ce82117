from .base import DatasetLoader, ShapeMismatch
from .text_loader import DatasetManifest, ParseError, TextLoader, load_dataset
from .synthetic import InvalidParams, SyntheticLoader, generate_synthetic, write_dataset
