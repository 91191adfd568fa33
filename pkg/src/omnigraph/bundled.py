"""Access to the bundled fixture metamodels and templates."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .errors import NotFoundError
from .metamodel import MetaModel, load_metamodel


def fixtures_dir() -> Path:
    return Path(resources.files("omnigraph") / "fixtures")


def bundled_metamodel_ids() -> list:
    return sorted(p.name.removesuffix(".mm.yaml") for p in fixtures_dir().glob("*.mm.yaml"))


def bundled_metamodel(name: str) -> MetaModel:
    path = fixtures_dir() / f"{name}.mm.yaml"
    if not path.is_file():
        raise NotFoundError(f"no bundled metamodel named {name!r}")
    return load_metamodel(path.read_text(encoding="utf-8"))


def bundled_templates_dir() -> Path:
    return fixtures_dir() / "templates"
