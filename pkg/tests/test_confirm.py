import pytest
from hypothesis import given
from hypothesis import strategies as st

from ivrflow.asr import Transcript, normalize
from ivrflow.errors import ConfigError
from ivrflow.nlu import Confirmation, ConfirmationLexicon, parse_confirmation

LEX = ConfirmationLexicon.default()


@pytest.mark.parametrize("text, lang, expected", [
    ("иә", "kk", Confirmation.YES),
    ("Иә, дұрыс!", "kk", Confirmation.YES),
    ("жоқ", "kk", Confirmation.NO),
    ("жоқ, дұрыс емес", "kk", Confirmation.NO),
    ("иә жоқ", "kk", Confirmation.UNCLEAR),
    ("", "kk", Confirmation.UNCLEAR),
    ("білмеймін", "kk", Confirmation.UNCLEAR),
    ("Да, верно", "ru", Confirmation.YES),
    ("нет", "ru", Confirmation.NO),
    ("да", "kk", Confirmation.UNCLEAR),  # Russian word under the Kazakh lexicon
    ("да", "en", Confirmation.YES),  # unknown language: union of all lexicons
])
def test_parse(text, lang, expected):
    assert parse_confirmation(Transcript(text, lang), LEX) is expected


WORDS = ["иә", "ия", "жоқ", "қате", "әрине", "мүмкін", "сәлем", "ИӘ", "Жоқ!"]


@given(st.lists(st.sampled_from(WORDS), max_size=5))
def test_case_insensitive(words):
    text = " ".join(words)
    upper = Transcript(" ".join(normalize(text.upper())), "kk")
    plain = Transcript(" ".join(normalize(text)), "kk")
    assert parse_confirmation(upper, LEX) is parse_confirmation(plain, LEX)


def test_lexicon_load(tmp_path):
    p = tmp_path / "lex.json"
    p.write_text('{"kk": {"yes": ["Иә"], "no": ["жоқ"]}}', encoding="utf-8")
    lex = ConfirmationLexicon.load(p)
    assert lex.yes["kk"] == {"иә"}


@pytest.mark.parametrize("data", [{}, {"kk": {"yes": ["иә"]}}, {"kk": {"yes": ["иә"], "no": ["Иә"]}}])
def test_lexicon_validation(data):
    with pytest.raises(ConfigError):
        ConfirmationLexicon.from_dict(data)
