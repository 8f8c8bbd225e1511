import os
import pathlib
from dataclasses import dataclass, asdict, fields

import yaml

from barcalc.errors import InvalidInput
from barcalc.simplicial import DEFAULT_CAP

CAP_ENV = "BARCALC_CAP"


@dataclass
class RunConfig:
    """
    Settings of one command run. Values come from the commandline, optionally
    overlaid on a YAML file given with -c; explicit flags win.
    """
    command: str = None
    ring: str = "Z/2"
    n: int = 1
    m: int = 1
    coeff: str = "Z"
    max_degree: int = 3
    truncation: int = None
    cap: int = None
    output: str = None
    seed: int = 0
    pair: str = None
    verify_axioms: bool = False
    nmax: int = 2
    pmax: int = 2
    algebra: str = None
    suite: str = "all"
    fault: bool = False
    level_max: int = 3

    def __post_init__(self):
        if self.cap is None:
            self.cap = resolve_cap()
        if self.truncation is None:
            self.truncation = self.max_degree + 1
        self.validate()

    def validate(self):
        for name in ("n", "m", "max_degree", "nmax", "pmax", "level_max"):
            if getattr(self, name) < 0:
                raise InvalidInput(f"{name} must be nonnegative, got {getattr(self, name)}")
        if self.truncation < self.max_degree + 1:
            raise InvalidInput(f"truncation {self.truncation} is below max degree + 1 = {self.max_degree + 1}")
        if self.cap < 1:
            raise InvalidInput(f"cap must be positive, got {self.cap}")

    def pair_degrees(self):
        """Parse --pair "n,i:m,j" into ((n, i), (m, j))."""
        try:
            left, right = self.pair.split(":")
            n, i = (int(v) for v in left.split(","))
            m, j = (int(v) for v in right.split(","))
        except (AttributeError, ValueError):
            raise InvalidInput(f"cannot parse pair '{self.pair}', expected n,i:m,j")
        return (n, i), (m, j)

    def inputs(self):
        """Inputs recorded in result documents (everything but the output path)."""
        data = asdict(self)
        data.pop("output")
        return data

    @classmethod
    def from_args(cls, args):
        """Merge parsed arguments over an optional YAML configuration file."""
        values = {}
        config_path = getattr(args, "config", None)
        if config_path:
            values.update(load_yaml(config_path))
        names = {f.name for f in fields(cls)}
        for key, value in vars(args).items():
            if key in names and value is not None:
                values[key] = value
        unknown = set(values) - names
        if unknown:
            raise InvalidInput(f"unknown configuration keys: {sorted(unknown)}")
        return cls(**values)


def load_yaml(path):
    path = pathlib.Path(path)
    try:
        with open(path) as f:
            data = yaml.safe_load(f) or {}
    except (OSError, yaml.YAMLError) as e:
        raise InvalidInput(f"cannot read configuration {path}: {e}")
    if not isinstance(data, dict):
        raise InvalidInput(f"configuration {path} is not a mapping")
    return {key.replace("-", "_"): value for key, value in data.items()}


def resolve_cap(flag=None):
    """Cap precedence: --cap flag, then BARCALC_CAP, then the default 2^22."""
    if flag is not None:
        return int(flag)
    env = os.environ.get(CAP_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise InvalidInput(f"{CAP_ENV}={env!r} is not an integer")
    return DEFAULT_CAP
