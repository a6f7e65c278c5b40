"""Prompt ensembling: class names filled into the 85-template set.

The template list ships as a versioned text asset (one template per line,
each with a single ``{}`` slot). Class names are always caller input; the
bundled 19-class urban list is just a convenient starting point.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import List, Sequence, Tuple

from .errors import FormatError

TEMPLATE_COUNT = 85


def _read_lines(text: str) -> List[str]:
    return [line.strip() for line in text.splitlines() if line.strip()]


def bundled_templates() -> Tuple[str, ...]:
    text = resources.files("anomexport").joinpath(
        "assets/prompt_templates.txt").read_text()
    return tuple(_read_lines(text))


def bundled_class_names() -> Tuple[str, ...]:
    text = resources.files("anomexport").joinpath(
        "assets/cityscapes_classes.txt").read_text()
    return tuple(_read_lines(text))


def load_class_names(path) -> Tuple[str, ...]:
    names = tuple(_read_lines(Path(path).read_text()))
    if not names:
        raise FormatError(f"{path}: no class names found")
    if len(set(names)) != len(names):
        raise FormatError(f"{path}: duplicate class names")
    return names


@dataclass(frozen=True)
class PromptSet:
    """The cross product of class names and templates, validated."""

    class_names: Tuple[str, ...]
    templates: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "class_names", tuple(self.class_names))
        object.__setattr__(self, "templates", tuple(self.templates))
        if not self.class_names:
            raise FormatError("prompt set needs at least one class name")
        if len(self.templates) != TEMPLATE_COUNT:
            raise FormatError(
                f"expected {TEMPLATE_COUNT} templates, got {len(self.templates)}")
        for template in self.templates:
            if template.count("{}") != 1:
                raise FormatError(
                    f"template must contain exactly one {{}} slot: {template!r}")

    @classmethod
    def for_classes(cls, class_names: Sequence[str]) -> "PromptSet":
        return cls(tuple(class_names), bundled_templates())

    def filled(self, class_name: str) -> List[str]:
        return [template.format(class_name) for template in self.templates]
