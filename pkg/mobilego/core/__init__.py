"""A core package for the torch-facing building blocks of mobilego.
"""

from mobilego.core.dataset import CorpusStream, SampleDataset
from mobilego.core.model import Model
