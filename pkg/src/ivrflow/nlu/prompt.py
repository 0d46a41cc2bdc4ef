"""Classifier prompt assembly."""

from __future__ import annotations

import re
from typing import Sequence

from ..errors import TemplateError

PLACEHOLDERS = ("{utterance}", "{context}", "{classes}")
_PLACEHOLDER_RE = re.compile(r"\{(utterance|context|classes)\}")

DEFAULT_TEMPLATE = (
    "Сіз колл-центрдің өтініштерін жіктеушісіз.\n"
    "Клиенттің сөзі: {utterance}\n"
    "Анықтамалық мәліметтер:\n{context}\n"
    "Мүмкін кластар:\n{classes}\n"
    'Жауапты JSON түрінде беріңіз: {"class_id": ..., "confidence": ..., "alternates": [...]}\n'
)


def check_template(template: str, path=None) -> str:
    missing = [p for p in PLACEHOLDERS if p not in template]
    if missing:
        raise TemplateError(f"prompt template lacks placeholder(s) {', '.join(missing)}",
                            path, "prompt_template")
    return template


def render_context(docs: Sequence) -> str:
    return "\n".join(f"[{d.doc_id}] {' '.join(d.text.split())}" for d in docs)


def build_prompt(transcript, docs, taxonomy, template: str = DEFAULT_TEMPLATE) -> str:
    """Fill the template.

    Only the three placeholders are substituted, in one pass, so the template
    may contain other literal braces. The utterance is rendered from
    normalized tokens; transcripts that differ only in spacing or case give
    the same prompt.
    """
    check_template(template)
    utterance = " ".join(transcript.tokens)
    context = render_context(docs)
    classes = "\n".join(taxonomy.class_ids)
    parts = {"utterance": utterance, "context": context, "classes": classes}
    return _PLACEHOLDER_RE.sub(lambda m: parts[m.group(1)], template)
