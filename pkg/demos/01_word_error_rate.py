"""
Word error rate and the noisy mock recognizer
=============================================

Score a hypothesis against a reference, then watch how the seeded
noise generator degrades a transcript as its rate goes up.
"""

from ivrflow.asr import inject_errors, normalize
from ivrflow.metrics import corpus_wer, utterance_wer, word_edit_distance

# normalization folds case and strips punctuation before anything is compared
ref = normalize("Сәлеметсіз бе! Мен картамды жоғалттым.")
hyp = normalize("сәлеметсіз мен картамды жоғалтып алдым")
print("ref:", ref)
print("hyp:", hyp)

counts = word_edit_distance(ref, hyp)
print(f"S={counts.substitutions} D={counts.deletions} I={counts.insertions} over {counts.ref_len} words")
print(f"utterance WER = {utterance_wer(counts):.3f}")

# the same seed always corrupts the same positions, and a higher rate only adds corruption
for rate in (0.0, 0.16, 0.5):
    print(f"rate {rate:4}:", " ".join(inject_errors(ref, rate, seed=42)))

# pooled over many utterances the measured WER lands close to the requested rate
corpus = [normalize("мен картамды жоғалттым оны бұғаттау керек")] * 2000
for rate in (0.16, 0.5):
    pairs = [(r, inject_errors(r, rate, seed=i)) for i, r in enumerate(corpus)]
    print(f"requested {rate}: measured pooled WER {corpus_wer(pairs).wer:.3f}")
