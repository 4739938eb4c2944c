"""
YAML configuration. A file holds optional sections (pipeline, spot,
knn, pca, logreg, tree, dataset, split, synth), written either nested
or with dotted keys (`pipeline.median_k: 5`). Command-line `key=value`
overrides are merged over the file.
"""
import yaml

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Union

from .dataset import SplitSpec, SynthConfig
from .errors import ConfigError
from .pipeline import PipelineConfig
from .utils import data_digest, dict_merge, flatten_keys, unflatten_keys

_OPTIONS = {
    'knn': {'k'},
    'pca': {'n_components'},
    'logreg': {'epochs', 'lr', 'l2'},
    'tree': {'max_depth', 'min_leaf'},
    'dataset': {'filename_col', 'label_col', 'source_col'},
    'split': {'train_frac', 'seed'},
}
SECTIONS = ('pipeline', 'spot', 'synth') + tuple(_OPTIONS)


def parse_override(text: str) -> Dict[str, Any]:
    if '=' not in text:
        raise ConfigError(f'override "{text}" is not of the form key=value')
    key, value = text.split('=', 1)
    key = key.strip()
    if '.' not in key:
        raise ConfigError(f'override key "{key}" must be namespaced, e.g. pipeline.median_k')
    try:
        parsed = yaml.safe_load(value) if value.strip() else None
    except yaml.YAMLError as e:
        raise ConfigError(f'cannot parse value of {key}: {e}')
    return unflatten_keys({key: parsed})

def load_config(path: Optional[Union[str, Path]] = None,
                overrides: Iterable[str] = ()) -> Dict[str, Dict[str, Any]]:
    dct = {}
    if path is not None:
        try:
            with open(path) as f:
                raw = yaml.safe_load(f)
        except OSError as e:
            raise ConfigError(f'cannot read config {path}: {e}')
        except yaml.YAMLError as e:
            raise ConfigError(f'malformed config {path}: {e}')
        if raw is None:
            raw = {}
        if not isinstance(raw, dict):
            raise ConfigError(f'config {path} must be a mapping')
        dct = unflatten_keys(raw)
    for text in overrides:
        dct = dict_merge(dct, parse_override(text))

    for section, body in dct.items():
        if section not in SECTIONS:
            raise ConfigError(f'unknown config section "{section}"')
        if not isinstance(body, dict):
            raise ConfigError(f'config section "{section}" must be a mapping')
        unknown = set(body) - _OPTIONS.get(section, set(body))
        if unknown:
            raise ConfigError(f'unknown {section} option(s): {", ".join(sorted(unknown))}')
    return dct


@dataclass
class RunConfig:
    """
    Typed view of a merged configuration mapping.
    """
    raw: Dict[str, Dict[str, Any]] = field(default_factory=dict)

    def __post_init__(self):
        try:
            self.pipeline = PipelineConfig.from_dict(self.raw.get('pipeline'), self.raw.get('spot'))
            self.synth = SynthConfig.from_dict(self.raw.get('synth'))
            self.split = SplitSpec(**self.raw.get('split', {}))
        except TypeError as e:
            raise ConfigError(str(e))

    @staticmethod
    def load(path=None, overrides: Iterable[str] = ()) -> 'RunConfig':
        return RunConfig(load_config(path, overrides))

    @property
    def model_params(self) -> Dict[str, Dict[str, Any]]:
        return {s: dict(self.raw.get(s, {})) for s in ('knn', 'pca', 'logreg', 'tree')}

    @property
    def dataset(self) -> Dict[str, Any]:
        return dict(self.raw.get('dataset', {}))

    def with_seed(self, seed: Optional[int]) -> 'RunConfig':
        if seed is None:
            return self
        return RunConfig(dict_merge(self.raw, {'split': {'seed': seed}, 'synth': {'seed': seed}}))

    def digest(self) -> str:
        """
        SHA-256 over the effective pipeline and model options.
        """
        effective = dict_merge(self.pipeline.to_dict(), self.model_params)
        effective['split'] = {'train_frac': self.split.train_frac, 'seed': self.split.seed}
        return data_digest(dict(flatten_keys(effective)))[:16]
