#!/usr/bin/env python3
"""Regenerate the shipped data files under src/ivrflow/data/.

The taxonomy is 20 service domains x 10 issue types = 200 intent classes.
Keyword lexicons are unique per class so that the keyword-overlap mock can
separate classes cleanly on noiseless input. A handful of classes get real
Kazakh keywords; the rest get synthetic pseudo-words built from Kazakh
syllables. Output is fully determined by SEED.

    python scripts/make_fixtures.py
"""

import json
import random
from pathlib import Path

SEED = 20240601
DATA = Path(__file__).resolve().parents[1] / "src" / "ivrflow" / "data"

DOMAINS = [
    ("card", "карта", "карта"),
    ("loan", "несие", "кредит"),
    ("deposit", "депозит", "депозит"),
    ("transfer", "аударым", "перевод"),
    ("utility", "коммуналдық төлем", "коммунальный платёж"),
    ("mobile", "мобильді банкинг", "мобильный банк"),
    ("online", "интернет-банкинг", "интернет-банк"),
    ("atm", "банкомат", "банкомат"),
    ("account", "шот", "счёт"),
    ("mortgage", "ипотека", "ипотека"),
    ("fx", "валюта айырбасы", "обмен валюты"),
    ("insurance", "сақтандыру", "страхование"),
    ("pension", "зейнетақы", "пенсия"),
    ("payroll", "жалақы жобасы", "зарплатный проект"),
    ("bonus", "бонус бағдарламасы", "бонусная программа"),
    ("cashback", "кэшбэк", "кешбэк"),
    ("sms", "SMS хабарлама", "SMS-уведомления"),
    ("personal_data", "жеке деректер", "персональные данные"),
    ("installment", "бөліп төлеу", "рассрочка"),
    ("business", "бизнес шот", "бизнес-счёт"),
]

ISSUES = [
    ("lost", "жоғалту", "утеря"),
    ("blocked", "бұғаттау", "блокировка"),
    ("open", "ашу", "открытие"),
    ("close", "жабу", "закрытие"),
    ("limit", "лимит", "лимит"),
    ("fee", "комиссия", "комиссия"),
    ("wrong_charge", "қате есептен шығару", "ошибочное списание"),
    ("extend", "мерзімін ұзарту", "продление срока"),
    ("statement", "анықтама алу", "получение справки"),
    ("password", "құпия сөзді қалпына келтіру", "восстановление пароля"),
]

# real keywords for a few classes; must stay unique across the taxonomy
HAND_KEYWORDS = {
    "card_lost": ["картамды", "жоғалттым"],
    "card_blocked": ["картам", "бұғатталып", "қалды"],
    "loan_open": ["несие", "алғым", "келеді"],
    "deposit_open": ["депозит", "ашқым"],
    "transfer_wrong_charge": ["аударымым", "қателесіп", "кетіп"],
    "atm_lost": ["банкомат", "ақшамды", "бермеді"],
    "mobile_password": ["қосымшаның", "құпиясөзін", "ұмыттым"],
    "pension_statement": ["зейнетақы", "анықтамасы"],
}

FILLER_KK = ["сәлеметсіз", "бе", "менің", "мәселем", "бар", "көмектесіңізші", "өтінемін",
             "маған", "туралы", "сұрағым", "қайырлы", "күн"]
FILLER_RU = ["здравствуйте", "у", "меня", "вопрос", "помогите", "пожалуйста", "мне", "нужно", "по", "поводу"]
YES_KK = ["иә", "иә дұрыс", "әрине", "иә солай"]
NO_KK = ["жоқ", "жоқ дұрыс емес", "қате"]
YES_RU = ["да", "да верно", "конечно", "правильно"]
NO_RU = ["нет", "нет неверно", "неправильно"]

LEXICON = {
    "kk": {"yes": ["иә", "ия", "әрине", "солай"], "no": ["жоқ", "қате", "емес"]},
    "ru": {"yes": ["да", "верно", "правильно", "конечно"], "no": ["нет", "неверно", "неправильно"]},
}

CONSONANTS = "бгджзклмнпрстшқңғ"
VOWELS = "аәеоөұүыі"


def pseudo_word(rng):
    n = rng.choice((2, 3))
    return "".join(rng.choice(CONSONANTS) + rng.choice(VOWELS) for _ in range(n)) + rng.choice("нлрс")


def main():
    rng = random.Random(SEED)
    reserved = set(FILLER_KK) | set(FILLER_RU)
    for lang in LEXICON.values():
        reserved |= set(lang["yes"]) | set(lang["no"])
    used = set(reserved)
    for kws in HAND_KEYWORDS.values():
        assert not used & set(kws), kws
        used |= set(kws)

    taxonomy, routing = [], {"operator_queue": "OPERATOR", "queues": {"OPERATOR": "Оператор / Оператор"}}
    for d, (dslug, dkk, dru) in enumerate(DOMAINS, 1):
        queue = f"Q{d:02d}"
        routing["queues"][queue] = f"{dkk} / {dru}"
        for islug, ikk, iru in ISSUES:
            cid = f"{dslug}_{islug}"
            kws = HAND_KEYWORDS.get(cid)
            if kws is None:
                kws = []
                while len(kws) < 3:
                    w = pseudo_word(rng)
                    if w not in used:
                        used.add(w)
                        kws.append(w)
            taxonomy.append({
                "class_id": cid,
                "display_name": {"kk": f"{ikk} ({dkk})", "ru": f"{iru} ({dru})"},
                "queue_id": queue,
                "keywords": kws,
            })
    assert len(taxonomy) == 200

    docs = []
    for c in taxonomy:
        docs.append({
            "doc_id": f"kb-{c['class_id']}",
            "text": f"{c['display_name']['kk']}. {c['display_name']['ru']}. {' '.join(c['keywords'])}",
            "class_hint": c["class_id"],
        })
    docs += [
        {"doc_id": "kb-general-hours", "text": "Колл-орталық тәулік бойы жұмыс істейді. Колл-центр работает круглосуточно.", "class_hint": None},
        {"doc_id": "kb-general-operator", "text": "Операторға қосылу үшін күте тұрыңыз. Для связи с оператором ожидайте на линии.", "class_hint": None},
    ]

    def utterance(c, lang):
        filler = FILLER_KK if lang == "kk" else FILLER_RU
        words = list(c["keywords"]) + rng.sample(filler, rng.randint(2, 4))
        rng.shuffle(words)
        return " ".join(words).capitalize() + rng.choice([".", "!", "", "?"])

    happy = []
    for c in taxonomy:
        happy.append({
            "scenario_id": f"happy-{c['class_id']}",
            "language": "kk",
            "steps": [{"say": utterance(c, "kk")}, {"confirm": rng.choice(YES_KK)}],
            "expected_class": c["class_id"],
            "expected_terminal": "Routed",
        })

    mixed = []
    for i in range(100):
        c = rng.choice(taxonomy)
        lang = "ru" if i % 5 == 4 else "kk"
        yes, no = (YES_KK, NO_KK) if lang == "kk" else (YES_RU, NO_RU)
        if i < 60:
            kind, steps, terminal = "happy", [{"say": utterance(c, lang)}, {"confirm": rng.choice(yes)}], "Routed"
        elif i < 75:
            kind, terminal = "retry", "Routed"
            steps = [{"say": utterance(c, lang)}, {"confirm": rng.choice(no)},
                     {"say": utterance(c, lang)}, {"confirm": rng.choice(yes)}]
        elif i < 90:
            kind, terminal = "reject", "Escalated"
            steps = [{"say": utterance(c, lang)}, {"confirm": rng.choice(no)},
                     {"say": utterance(c, lang)}, {"confirm": rng.choice(no)}]
        else:
            kind, steps, terminal = "hangup", [{"say": utterance(c, lang)}, {"hangup": True}], "Abandoned"
        mixed.append({
            "scenario_id": f"mixed-{i:03d}-{kind}",
            "language": lang,
            "steps": steps,
            "expected_class": c["class_id"],
            "expected_terminal": terminal,
        })

    config = {
        "confidence_threshold": 0.7,
        "max_confirm_attempts": 2,
        "rag_k": 3,
        "seed": 0,
        "default_language": "kk",
        "bind": "127.0.0.1:8573",
        "call_log": None,
        "asr": {"kind": "mock", "error_rate": 0.0, "seed": 0},
        "classifier": {"kind": "mock"},
        "tts": {"kind": "mock"},
        "taxonomy": "taxonomy.json",
        "routing": "routing.json",
        "knowledge_base": "knowledge.jsonl",
        "prompt_template": "prompt_template.txt",
        "prompts": "prompts.json",
        "lexicon": "lexicon.json",
    }

    from ivrflow.config import DEFAULT_PROMPTS
    from ivrflow.nlu.prompt import DEFAULT_TEMPLATE

    def dump(name, obj):
        (DATA / name).write_text(json.dumps(obj, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")

    def dump_lines(name, objs):
        (DATA / name).write_text("".join(json.dumps(o, ensure_ascii=False) + "\n" for o in objs), encoding="utf-8")

    (DATA / "scenarios").mkdir(parents=True, exist_ok=True)
    dump("default_config.json", config)
    dump("taxonomy.json", taxonomy)
    dump("routing.json", routing)
    dump("prompts.json", DEFAULT_PROMPTS)
    dump("lexicon.json", LEXICON)
    (DATA / "prompt_template.txt").write_text(DEFAULT_TEMPLATE, encoding="utf-8")
    dump_lines("knowledge.jsonl", docs)
    dump_lines("scenarios/happy_200.jsonl", happy)
    dump_lines("scenarios/mixed_100.jsonl", mixed)
    print(f"wrote {len(taxonomy)} classes, {len(docs)} docs, {len(happy)}+{len(mixed)} scenarios to {DATA}")


if __name__ == "__main__":
    main()
