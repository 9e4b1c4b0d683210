"""Entity linking with a pointer network over BM25 label-search candidates."""

__version__ = "0.1.0"

from .featurizer import AblationMask, Episode, FeatureLayout, Resources, featurize_question
from .kg_store import EntityRecord, EntityStore, LabelIndex, build_label_index, load_entities, search_labels
from .pointer_net import ModelConfig, PointerModel, decode, init_model, load_checkpoint, save_checkpoint, train

__all__ = [
    "AblationMask", "Episode", "FeatureLayout", "Resources", "featurize_question",
    "EntityRecord", "EntityStore", "LabelIndex", "build_label_index", "load_entities", "search_labels",
    "ModelConfig", "PointerModel", "decode", "init_model", "load_checkpoint", "save_checkpoint", "train",
]
