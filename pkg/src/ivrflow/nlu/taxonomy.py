"""Intent classes and the taxonomy that holds them."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping

from ..asr import normalize
from ..errors import ConfigError


@dataclass(frozen=True)
class IntentClass:
    class_id: str
    display_name: Mapping[str, str]
    queue_id: str
    keywords: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "display_name", MappingProxyType(dict(self.display_name)))
        object.__setattr__(self, "keywords", tuple(normalize(" ".join(self.keywords))))

    @classmethod
    def from_dict(cls, obj, path=None, index=None):
        where = f"[{index}]" if index is not None else ""
        if not isinstance(obj, dict):
            raise ConfigError("intent class must be a JSON object", path, f"taxonomy{where}")
        for key in ("class_id", "display_name", "queue_id", "keywords"):
            if key not in obj:
                raise ConfigError(f"missing field {key!r}", path, f"taxonomy{where}.{key}")
        if not isinstance(obj["class_id"], str) or not obj["class_id"]:
            raise ConfigError("class_id must be a non-empty string", path, f"taxonomy{where}.class_id")
        if not isinstance(obj["display_name"], dict):
            raise ConfigError("display_name must be an object keyed by language",
                              path, f"taxonomy{where}.display_name")
        ic = cls(obj["class_id"], obj["display_name"], obj["queue_id"], tuple(obj["keywords"]))
        if not ic.keywords:
            raise ConfigError(f"class {ic.class_id!r} has no usable keywords",
                              path, f"taxonomy{where}.keywords")
        return ic

    def to_dict(self) -> dict:
        return {
            "class_id": self.class_id,
            "display_name": dict(self.display_name),
            "queue_id": self.queue_id,
            "keywords": list(self.keywords),
        }


@dataclass(frozen=True)
class IntentTaxonomy:
    """Ordered, immutable collection of intent classes keyed by ``class_id``."""

    classes: tuple
    _index: Mapping[str, IntentClass] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        classes = tuple(self.classes)
        index = {}
        for c in classes:
            if c.class_id in index:
                raise ConfigError(f"duplicate class_id {c.class_id!r}", field="taxonomy")
            index[c.class_id] = c
        object.__setattr__(self, "classes", classes)
        object.__setattr__(self, "_index", MappingProxyType(index))

    @classmethod
    def from_classes(cls, classes: Iterable[IntentClass]) -> "IntentTaxonomy":
        return cls(tuple(classes))

    @classmethod
    def load(cls, path) -> "IntentTaxonomy":
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read taxonomy: {exc}", path, "taxonomy") from exc
        if not isinstance(data, list):
            raise ConfigError("taxonomy must be a JSON array", path, "taxonomy")
        try:
            return cls(tuple(IntentClass.from_dict(o, path, i) for i, o in enumerate(data)))
        except ConfigError as exc:
            if exc.path is None:
                raise ConfigError(str(exc), path, exc.field) from exc
            raise

    def __len__(self):
        return len(self.classes)

    def __iter__(self):
        return iter(self.classes)

    def __contains__(self, class_id):
        return class_id in self._index

    def __getitem__(self, class_id) -> IntentClass:
        return self._index[class_id]

    @property
    def class_ids(self) -> list[str]:
        return [c.class_id for c in self.classes]
