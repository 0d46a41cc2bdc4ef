"""BM25 retrieval over a small in-memory knowledge base."""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

from ..asr import normalize
from ..errors import ConfigError

K1 = 1.2
B = 0.75


@dataclass(frozen=True)
class KnowledgeDoc:
    doc_id: str
    text: str
    class_hint: Optional[str] = None
    tokens: tuple = field(init=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(normalize(self.text)))


class KnowledgeStore:
    """Immutable BM25 index.

    Uses the non-negative idf variant ``ln(1 + (N - n + 0.5) / (n + 0.5))``
    so that a term present in every document still scores above zero.
    Repeated query terms count once; terms are summed in sorted order so
    scores do not depend on hash seeding.
    """

    def __init__(self, docs: Iterable[KnowledgeDoc] = (), k1: float = K1, b: float = B):
        self.docs = tuple(docs)
        self.k1 = k1
        self.b = b
        self._by_id = {}
        for d in self.docs:
            if d.doc_id in self._by_id:
                raise ConfigError(f"duplicate doc_id {d.doc_id!r}", field="knowledge_base")
            self._by_id[d.doc_id] = d
        self._tf = [Counter(d.tokens) for d in self.docs]
        self._len = [len(d.tokens) for d in self.docs]
        self._avgdl = sum(self._len) / len(self.docs) if self.docs else 0.0
        self._postings = {}
        for i, tf in enumerate(self._tf):
            for term in tf:
                self._postings.setdefault(term, []).append(i)
        n_docs = len(self.docs)
        self._idf = {
            term: math.log(1.0 + (n_docs - len(p) + 0.5) / (len(p) + 0.5))
            for term, p in self._postings.items()
        }

    def __eq__(self, other):
        if not isinstance(other, KnowledgeStore):
            return NotImplemented
        return (self.docs, self.k1, self.b) == (other.docs, other.k1, other.b)

    def __hash__(self):
        return hash((self.docs, self.k1, self.b))

    @classmethod
    def load(cls, path) -> "KnowledgeStore":
        path = Path(path)
        docs = []
        try:
            lines = path.read_text(encoding="utf-8").splitlines()
        except (OSError, UnicodeDecodeError) as exc:
            raise ConfigError(f"cannot read knowledge base: {exc}", path, "knowledge_base") from exc
        for lineno, line in enumerate(lines, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                docs.append(KnowledgeDoc(obj["doc_id"], obj["text"], obj.get("class_hint")))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ConfigError(f"bad knowledge doc on line {lineno}: {exc}",
                                  path, "knowledge_base") from exc
        try:
            return cls(docs)
        except ConfigError as exc:
            raise ConfigError(str(exc), path, "knowledge_base") from exc

    def __len__(self):
        return len(self.docs)

    def __getitem__(self, doc_id) -> KnowledgeDoc:
        return self._by_id[doc_id]

    def score(self, query: Sequence[str]) -> dict[str, float]:
        scores = {}
        for term in sorted(set(query)):
            postings = self._postings.get(term)
            if not postings:
                continue
            idf = self._idf[term]
            for i in postings:
                tf = self._tf[i][term]
                norm = 1.0 - self.b + self.b * self._len[i] / self._avgdl
                doc_id = self.docs[i].doc_id
                scores[doc_id] = scores.get(doc_id, 0.0) + idf * tf * (self.k1 + 1.0) / (tf + self.k1 * norm)
        return scores


def retrieve(query: Sequence[str], store: KnowledgeStore, k: int = 3) -> list[tuple[str, float]]:
    """Top-``k`` ``(doc_id, score)`` pairs, best first, ties by ascending doc_id."""
    if k < 1:
        raise ValueError("k must be at least 1")
    scored = [(d, s) for d, s in store.score(query).items() if s > 0.0]
    scored.sort(key=lambda ds: (-ds[1], ds[0]))
    return scored[:k]
