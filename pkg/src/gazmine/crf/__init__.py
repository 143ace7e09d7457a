from .entities import (LOCATION, PERSON, EntityError, TaggedEntity,
                       extract_entities, load_entities, save_entities,
                       tags_from_spans)
from .features import DEFAULT_GROUPS, FeatureConfig, FeatureError, build_features, usage_bin
from .model import (CrfError, CrfModel, Tag, decode, load_model,
                    log_likelihood_and_gradient, log_partition, marginals,
                    save_model, train)

__all__ = [
    "CrfError", "CrfModel", "DEFAULT_GROUPS", "EntityError", "FeatureConfig",
    "FeatureError", "LOCATION", "PERSON", "Tag", "TaggedEntity",
    "build_features", "decode", "extract_entities", "load_entities",
    "load_model", "log_likelihood_and_gradient", "log_partition", "marginals",
    "save_entities", "save_model", "tags_from_spans", "train", "usage_bin",
]
