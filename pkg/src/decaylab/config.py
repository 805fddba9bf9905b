"""Flat key-path config files.

One assignment per line, `section.key = value`; blank lines and
#-comments are ignored.  Values parse as int, then float, then boolean,
falling back to the bare string.  No environment overrides: what the
file says is what the run manifest records.
"""

from __future__ import annotations

from pathlib import Path

from .errors import ConfigParseError

__all__ = ["parse_config_text", "load_config"]


def _parse_value(raw: str):
    text = raw.strip()
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "'\"":
        return text[1:-1]
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    return text


def parse_config_text(text: str) -> dict[str, dict[str, object]]:
    sections: dict[str, dict[str, object]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigParseError(f"line {lineno}: expected 'section.key = value', got {stripped!r}")
        key_path, _, raw = stripped.partition("=")
        key_path = key_path.strip()
        if "." not in key_path:
            raise ConfigParseError(f"line {lineno}: key {key_path!r} is missing its section prefix")
        section, _, key = key_path.partition(".")
        section, key = section.strip(), key.strip()
        if not section or not key:
            raise ConfigParseError(f"line {lineno}: malformed key path {key_path!r}")
        sections.setdefault(section, {})[key] = _parse_value(raw)
    return sections


def load_config(path) -> dict[str, dict[str, object]]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigParseError(f"cannot read config file {path}: {exc}") from exc
    return parse_config_text(text)
