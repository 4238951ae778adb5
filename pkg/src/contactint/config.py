"""Run configurations: JSON files and command-line flags share one schema.

JSON layout (every section optional, unknown keys rejected)::

    {
      "model":   {"name": "quadratic_oscillator", "gamma": 1.0, "C": 18.0},
      "method":  {"name": "chi2", "b_map_compat": false},
      "tau": 0.1,
      "t_end": 500.0,
      "initial": {"q": [0.0], "p": [-1.0], "s": -7.0, "t": 0.0, "random": false, "seed": null},
      "output":  {"path": "run.csv", "format": "csv", "sample_every": 1}
    }

Missing initial components fall back to the model's default state.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .core import ContactState
from .errors import ContactError
from .integrators import StepMethod
from .models import MODEL_PARAMS, make_model

__all__ = ["ConfigError", "RunConfig", "TOP_LEVEL_KEYS", "FORMATS"]

TOP_LEVEL_KEYS = ("model", "method", "tau", "t_end", "initial", "output")
FORMATS = ("csv", "jsonl")
_INITIAL_KEYS = ("q", "p", "s", "t", "random", "seed")
_OUTPUT_KEYS = ("path", "format", "sample_every")
_METHOD_KEYS = ("name", "b_map_compat")


class ConfigError(ContactError):
    """Invalid run configuration; ``field`` names the offending entry."""

    def __init__(self, field, message):
        super().__init__(f"field '{field}': {message}")
        self.field = field


@dataclass
class RunConfig:
    model: str = "quadratic_oscillator"
    model_params: dict = field(default_factory=dict)
    method: str = "chi2"
    b_map_compat: bool = False
    tau: float = 0.1
    t_end: float = 10.0
    q0: list | None = None
    p0: list | None = None
    s0: float | None = None
    t0: float | None = None
    random_initial: bool = False
    seed: int | None = None
    sample_every: int = 1
    output: str | None = None
    format: str = "csv"

    # ------------------------------------------------------------ validation

    def validate(self) -> "RunConfig":
        if self.model not in MODEL_PARAMS:
            raise ConfigError("model", f"unknown model {self.model!r}; choose from {', '.join(MODEL_PARAMS)}")
        unknown = set(self.model_params) - set(MODEL_PARAMS[self.model])
        if unknown:
            raise ConfigError(f"model.{sorted(unknown)[0]}", f"not a parameter of {self.model}")
        try:
            StepMethod.parse(self.method, self.b_map_compat)
        except ValueError as exc:
            raise ConfigError("method", str(exc)) from None
        if not (isinstance(self.tau, (int, float)) and math.isfinite(self.tau) and self.tau > 0):
            raise ConfigError("tau", f"must be a positive number, got {self.tau!r}")
        t_start = 0.0 if self.t0 is None else self.t0
        if not (isinstance(self.t_end, (int, float)) and self.t_end > t_start):
            raise ConfigError("t_end", f"must exceed the start time {t_start:g}, got {self.t_end!r}")
        if not (isinstance(self.sample_every, int) and self.sample_every >= 1):
            raise ConfigError("output.sample_every", f"must be an integer >= 1, got {self.sample_every!r}")
        if self.format not in FORMATS:
            raise ConfigError("output.format", f"must be one of {FORMATS}, got {self.format!r}")
        try:
            self.build_model()
        except (TypeError, ValueError) as exc:
            raise ConfigError("model", str(exc)) from None
        return self

    def build_model(self):
        return make_model(self.model, **self.model_params)

    def build_method(self) -> StepMethod:
        return StepMethod.parse(self.method, self.b_map_compat)

    def initial_state(self, model=None) -> ContactState:
        model = self.build_model() if model is None else model
        if self.random_initial:
            base = model.random_state(np.random.default_rng(self.seed))
        else:
            base = model.default_state()
        q = base.q if self.q0 is None else self.q0
        p = base.p if self.p0 is None else self.p0
        s = base.s if self.s0 is None else self.s0
        t = base.t if self.t0 is None else self.t0
        try:
            state = ContactState(q, p, s, t)
        except ValueError as exc:
            raise ConfigError("initial", str(exc)) from None
        if state.n != model.dim:
            raise ConfigError("initial.q", f"model {self.model} needs dimension {model.dim}, got {state.n}")
        return state

    # ------------------------------------------------------------ JSON

    def to_json(self) -> dict:
        return {
            "model": {"name": self.model, **self.model_params},
            "method": {"name": self.method, "b_map_compat": self.b_map_compat},
            "tau": self.tau,
            "t_end": self.t_end,
            "initial": {
                "q": self.q0,
                "p": self.p0,
                "s": self.s0,
                "t": self.t0,
                "random": self.random_initial,
                "seed": self.seed,
            },
            "output": {"path": self.output, "format": self.format, "sample_every": self.sample_every},
        }

    @classmethod
    def from_json(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("<root>", "configuration must be a JSON object")
        for key in data:
            if key not in TOP_LEVEL_KEYS:
                raise ConfigError(key, f"unknown key; allowed: {', '.join(TOP_LEVEL_KEYS)}")
        cfg = cls()
        if "model" in data:
            model = data["model"]
            if isinstance(model, str):
                model = {"name": model}
            model = dict(model)
            if "name" not in model:
                raise ConfigError("model.name", "missing")
            cfg.model = model.pop("name")
            cfg.model_params = {k: _number(f"model.{k}", v) for k, v in model.items()}
        if "method" in data:
            method = data["method"]
            if isinstance(method, str):
                method = {"name": method}
            _check_keys("method", method, _METHOD_KEYS)
            cfg.method = method.get("name", cfg.method)
            cfg.b_map_compat = bool(method.get("b_map_compat", False))
        if "tau" in data:
            cfg.tau = _number("tau", data["tau"])
        if "t_end" in data:
            cfg.t_end = _number("t_end", data["t_end"])
        if "initial" in data:
            init = data["initial"]
            _check_keys("initial", init, _INITIAL_KEYS)
            cfg.q0 = _vector("initial.q", init.get("q"))
            cfg.p0 = _vector("initial.p", init.get("p"))
            cfg.s0 = None if init.get("s") is None else _number("initial.s", init["s"])
            cfg.t0 = None if init.get("t") is None else _number("initial.t", init["t"])
            cfg.random_initial = bool(init.get("random", False))
            cfg.seed = init.get("seed")
        if "output" in data:
            out = data["output"]
            _check_keys("output", out, _OUTPUT_KEYS)
            cfg.output = out.get("path")
            cfg.format = out.get("format", cfg.format)
            cfg.sample_every = out.get("sample_every", cfg.sample_every)
        return cfg

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def loads(cls, text: str) -> "RunConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("<file>", f"invalid JSON at line {exc.lineno}: {exc.msg}") from None
        return cls.from_json(data)

    @classmethod
    def load(cls, path) -> "RunConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())

    def dump(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps() + "\n")


def _check_keys(section, value, allowed):
    if not isinstance(value, dict):
        raise ConfigError(section, "must be a JSON object")
    for key in value:
        if key not in allowed:
            raise ConfigError(f"{section}.{key}", f"unknown key; allowed: {', '.join(allowed)}")


def _number(name, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(name, f"must be a number, got {value!r}")
    return float(value)


def _vector(name, value):
    if value is None:
        return None
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return [float(value)]
    if not isinstance(value, list):
        raise ConfigError(name, f"must be a list of numbers, got {value!r}")
    return [_number(name, v) for v in value]
