"""
Knowledge retrieval and the classifier prompt
=============================================

Rank the shipped knowledge base against a caller utterance with BM25,
build the prompt a remote classifier would receive, and run the
keyword mock classifier on the same utterance.
"""

from ivrflow.asr import Transcript
from ivrflow.config import load_config
from ivrflow.nlu import build_prompt, classify, retrieve

cfg = load_config()
print(f"{len(cfg.taxonomy)} classes, {len(cfg.store)} knowledge documents")

transcript = Transcript("Сәлеметсіз бе, мен картамды жоғалттым", "kk")

# top-3 documents by BM25; ties would be broken by doc_id
for doc_id, score in retrieve(transcript.tokens, cfg.store, k=3):
    print(f"{score:7.3f}  {doc_id}  {cfg.store[doc_id].text[:60]}")

docs = [cfg.store[d] for d, _ in retrieve(transcript.tokens, cfg.store, k=3)]
prompt = build_prompt(transcript, docs, cfg.taxonomy, cfg.prompt_template)
print("\n".join(prompt.splitlines()[:12]), "\n...")

result = classify(transcript, cfg.classifier, cfg.store, cfg.taxonomy, k=cfg.rag_k)
print(f"\npredicted {result.class_id} with confidence {result.confidence:.2f}")
print("runners-up:", result.alternates)
