import json
from dataclasses import asdict, dataclass, fields

from pathfinder.errors import ConfigurationError

INT_FIELDS = ('patch_size', 'dim', 'depth', 'head_dim', 'heads', 'epochs', 'batch_size',
              'frame_stride', 'planes', 'grid_size')


@dataclass(frozen=True)
class Hyper:
    """Network and training hyperparameters.

    Defaults are the desk-scale configuration; :meth:`full_size` returns the
    full-size one.
    """

    patch_size: int = 16
    dim: int = 64
    depth: int = 2
    head_dim: int = 16
    heads: int = 4
    token_dropout: float = 0.4
    embed_dropout: float = 0.2
    alpha: float = 1.0
    learning_rate: float = 1e-3
    epochs: int = 50
    batch_size: int = 8
    frame_stride: int = 1
    planes: int = 3
    grid_size: int = 16

    def __post_init__(self):
        for name in INT_FIELDS:
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ConfigurationError('%s must be a positive integer' % name, key=name)
        if self.dim != self.heads * self.head_dim:
            raise ConfigurationError('dim must equal heads * head_dim', key='dim')
        for name in ('token_dropout', 'embed_dropout'):
            if not 0.0 <= getattr(self, name) < 1.0:
                raise ConfigurationError('%s must lie in [0, 1)' % name, key=name)
        if self.alpha < 0:
            raise ConfigurationError('alpha must be non-negative', key='alpha')
        if self.learning_rate <= 0:
            raise ConfigurationError('learning_rate must be positive', key='learning_rate')

    @classmethod
    def full_size(cls):
        return cls(patch_size=64, dim=1024, depth=4, head_dim=128, heads=8, token_dropout=0.4,
                   embed_dropout=0.2, frame_stride=15, planes=3, grid_size=32)

    @property
    def uses_velocity(self):
        return self.alpha > 0

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        """Exactly the Hyper fields, nothing more or less."""
        if not isinstance(data, dict):
            raise ConfigurationError('hyper config must be a JSON object', key='hyper')
        names = [f.name for f in fields(cls)]
        for key in data:
            if key not in names:
                raise ConfigurationError('unknown hyper key', key=key)
        for key in names:
            if key not in data:
                raise ConfigurationError('missing hyper key', key=key)
        values = {}
        for key in names:
            raw = data[key]
            if key in INT_FIELDS:
                if isinstance(raw, bool) or not isinstance(raw, int):
                    raise ConfigurationError('expected an integer', key=key)
                values[key] = raw
            else:
                if isinstance(raw, bool) or not isinstance(raw, (int, float)):
                    raise ConfigurationError('expected a number', key=key)
                values[key] = float(raw)
        return cls(**values)

    @classmethod
    def loads(cls, text):
        try:
            data = json.loads(text)
        except ValueError as e:
            raise ConfigurationError('hyper config is not valid JSON (%s)' % e, key='hyper')
        return cls.from_dict(data)

    def dumps(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + '\n'
