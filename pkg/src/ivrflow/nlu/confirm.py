"""Parsing the caller's reply to a read-back of the detected intent."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

from ..asr import normalize
from ..errors import ConfigError


class Confirmation(enum.Enum):
    YES = "Yes"
    NO = "No"
    UNCLEAR = "Unclear"


DEFAULT_LEXICON = {
    "kk": {"yes": ["иә", "ия", "әрине", "солай"], "no": ["жоқ", "қате", "емес"]},
    "ru": {"yes": ["да", "верно", "правильно", "конечно"], "no": ["нет", "неверно", "неправильно"]},
}


@dataclass(frozen=True)
class ConfirmationLexicon:
    yes: Mapping[str, frozenset]
    no: Mapping[str, frozenset]

    @classmethod
    def from_dict(cls, data, path=None) -> "ConfirmationLexicon":
        if not isinstance(data, dict) or not data:
            raise ConfigError("lexicon must be a non-empty object keyed by language", path, "lexicon")
        yes, no = {}, {}
        for lang, entry in data.items():
            if not isinstance(entry, dict) or not entry.get("yes") or not entry.get("no"):
                raise ConfigError("each language needs non-empty 'yes' and 'no' lists",
                                  path, f"lexicon.{lang}")
            yes[lang] = frozenset(normalize(" ".join(entry["yes"])))
            no[lang] = frozenset(normalize(" ".join(entry["no"])))
            if yes[lang] & no[lang]:
                raise ConfigError(f"tokens in both yes and no lists: {sorted(yes[lang] & no[lang])}",
                                  path, f"lexicon.{lang}")
        return cls(MappingProxyType(yes), MappingProxyType(no))

    @classmethod
    def load(cls, path) -> "ConfirmationLexicon":
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read lexicon: {exc}", path, "lexicon") from exc
        return cls.from_dict(data, path)

    @classmethod
    def default(cls) -> "ConfirmationLexicon":
        return cls.from_dict(DEFAULT_LEXICON)


def parse_confirmation(transcript, lexicon: ConfirmationLexicon) -> Confirmation:
    """Yes/No only when the reply is unambiguous; anything else is Unclear.

    Unknown languages fall back to the union of every language's lists.
    """
    lang = transcript.language
    if lang in lexicon.yes:
        yes, no = lexicon.yes[lang], lexicon.no[lang]
    else:
        yes = frozenset().union(*lexicon.yes.values())
        no = frozenset().union(*lexicon.no.values())
    tokens = set(transcript.tokens)
    said_yes = bool(tokens & yes)
    said_no = bool(tokens & no)
    if said_yes and not said_no:
        return Confirmation.YES
    if said_no and not said_yes:
        return Confirmation.NO
    return Confirmation.UNCLEAR
