"""
Walking the dialog state machine by hand
========================================

``advance`` is a pure function from (session, event) to (session, actions).
Here we feed it events one at a time and print each transition, first for
a caller who confirms, then for one who rejects the read-back twice.
"""

from ivrflow.asr import Transcript
from ivrflow.config import load_config
from ivrflow.nlu import ClassificationResult
from ivrflow.session import (
    CallSession, ClassificationReady, ConfirmNo, ConfirmYes, SessionStart, UtteranceReceived, advance,
)

cfg = load_config()
utterance = UtteranceReceived(Transcript("мен картамды жоғалттым", "kk"))
guess = ClassificationReady(ClassificationResult("card_lost", 0.9))


def play(events, call_id):
    session = CallSession(call_id, "kk")
    for event in events:
        before = session.phase.value
        session, actions = advance(session, event, cfg)
        print(f"  {before:>11} --{type(event).__name__}--> {session.phase.value:<11} {actions}")
    return session


print("confirmed:")
play([SessionStart(), utterance, guess, ConfirmYes()], "yes")

print(f"rejected {cfg.max_confirm_attempts} times:")
s = play([SessionStart(), utterance, guess, ConfirmNo(), utterance, guess, ConfirmNo()], "no")
print("escalation reason:", s.escalation_reason)

# a confidence below the threshold skips confirmation entirely
print("low confidence:")
play([SessionStart(), utterance, ClassificationReady(ClassificationResult("card_lost", 0.4))], "low")
