"""Strict dict <-> dataclass conversion with line-numbered diagnostics."""
from __future__ import annotations

import dataclasses
import json
import math
import types
import typing

import yaml

from .errors import ConfigError


def load_text(text: str, source: str | None = None):
    """Parse YAML (or JSON) text; return ``(data, lines)``.

    ``lines`` maps key paths (tuples) to 1-based line numbers.
    """
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(f"parse error: {getattr(exc, 'problem', exc)}",
                          line=None if mark is None else mark.line + 1, source=source) from None
    lines: dict[tuple, int] = {}
    if node is not None:
        _index(node, (), lines)
    data = yaml.safe_load(text)
    return ({} if data is None else data), lines


def _index(node, path, lines):
    lines[path] = node.start_mark.line + 1
    if isinstance(node, yaml.MappingNode):
        for key, value in node.value:
            sub = path + (key.value,)
            lines[sub] = key.start_mark.line + 1
            _index(value, sub, lines)
            lines[sub] = key.start_mark.line + 1
    elif isinstance(node, yaml.SequenceNode):
        for i, item in enumerate(node.value):
            _index(item, path + (i,), lines)


def _line(lines, path):
    while path:
        if path in lines:
            return lines[path]
        path = path[:-1]
    return lines.get((), None)


def _unwrap_optional(tp):
    origin = typing.get_origin(tp)
    if origin in (typing.Union, types.UnionType):
        args = [a for a in typing.get_args(tp) if a is not type(None)]
        if len(args) == 1:
            return args[0], True
    return tp, False


def _coerce(tp, value, path, lines, source):
    tp, optional = _unwrap_optional(tp)
    if value is None:
        if optional:
            return None
        raise ConfigError(f"'{'.'.join(map(str, path))}' may not be null", _line(lines, path), source)
    if dataclasses.is_dataclass(tp):
        return from_dict(tp, value, path, lines, source)
    origin = typing.get_origin(tp)
    if origin in (list, tuple):
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"'{'.'.join(map(str, path))}' must be a list", _line(lines, path), source)
        (inner, *_rest) = typing.get_args(tp) or (typing.Any,)
        out = [_coerce(inner, v, path + (i,), lines, source) for i, v in enumerate(value)]
        return tuple(out) if origin is tuple else out
    if tp is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"'{'.'.join(map(str, path))}' must be true/false", _line(lines, path), source)
        return value
    if tp is int:
        if isinstance(value, bool) or not isinstance(value, int):
            if isinstance(value, float) and value.is_integer():
                return int(value)
            raise ConfigError(f"'{'.'.join(map(str, path))}' must be an integer", _line(lines, path), source)
        return value
    if tp is float:
        if isinstance(value, bool):
            raise ConfigError(f"'{'.'.join(map(str, path))}' must be a number", _line(lines, path), source)
        if isinstance(value, str):
            try:
                value = float(value)
            except ValueError:
                raise ConfigError(f"'{'.'.join(map(str, path))}' must be a number", _line(lines, path), source) from None
        if not isinstance(value, (int, float)):
            raise ConfigError(f"'{'.'.join(map(str, path))}' must be a number", _line(lines, path), source)
        return float(value)
    if tp is str:
        if not isinstance(value, str):
            raise ConfigError(f"'{'.'.join(map(str, path))}' must be a string", _line(lines, path), source)
        return value
    return value


def from_dict(cls, data, path=(), lines=None, source=None):
    """Build dataclass ``cls`` from a mapping; unknown keys are errors."""
    lines = lines or {}
    if not isinstance(data, dict):
        raise ConfigError(f"'{'.'.join(map(str, path)) or '<root>'}' must be a mapping",
                          _line(lines, path), source)
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls) if f.init}
    for key in data:
        if key not in names:
            raise ConfigError(f"unknown key '{'.'.join(map(str, path + (key,)))}'",
                              _line(lines, path + (key,)), source)
    kwargs = {k: _coerce(hints[k], v, path + (k,), lines, source) for k, v in data.items()}
    try:
        return cls(**kwargs)
    except (ValueError, TypeError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc), _line(lines, path), source) from None


def to_dict(obj):
    """Dataclass -> plain dict with every field materialized."""
    if dataclasses.is_dataclass(obj):
        return {f.name: to_dict(getattr(obj, f.name)) for f in dataclasses.fields(obj) if f.init}
    if isinstance(obj, (list, tuple)):
        return [to_dict(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def digest(obj) -> str:
    import hashlib

    blob = json.dumps(to_dict(obj), sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]
