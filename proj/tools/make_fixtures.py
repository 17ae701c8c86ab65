#!/usr/bin/env python3
"""Regenerates tests/fixtures. Output is deterministic; rerun after editing."""

import csv
import json
import random
from collections import Counter
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
YEARS = (2017, 2018, 2019)

STOPWORDS = ["the", "of", "in", "and", "a", "to", "was", "for", "on", "by", "at", "with"]

# Per year: seed words in rank order with their part of speech.
SEEDS = {
    2017: [("family", "noun"), ("fire", "noun"), ("flood", "noun"), ("update", "verb"),
           ("tricycle", "noun")],
    2018: [("act", "verb"), ("announced", "verb"), ("ashfall", "noun"), ("police", "noun"),
           ("lava", "noun")],
    2019: [("bulletin", "noun"), ("quake", "noun"), ("typhoon", "noun"),
           ("weakened", "adjective"), ("affected", "verb")],
}
SEED_COUNTS = [90, 80, 70, 60, 50]

# Lower-frequency content words, grouped by topic so documents stay coherent.
TOPICS = {
    "weather": [("rain", "noun"), ("signal", "noun"), ("storm", "noun"), ("warning", "noun"),
                ("wind", "noun"), ("heavy", "adjective"), ("raised", "verb"), ("coast", "noun")],
    "geology": [("magnitude", "noun"), ("aftershock", "noun"), ("volcano", "noun"),
                ("strong", "adjective"), ("felt", "verb"), ("province", "noun"), ("erupted", "verb")],
    "response": [("rescue", "noun"), ("evacuated", "verb"), ("residents", "noun"),
                 ("relief", "noun"), ("damaged", "adjective"), ("houses", "noun"), ("mayor", "noun")],
}
OTHER_COUNT = (12, 35)
# Tokens that appear in the text but carry no lexicon tag.
UNTAGGED = [("2019", 8), ("said", 30), ("also", 25)]

SEED_TOPIC = {
    "family": "response", "fire": "response", "flood": "weather", "update": "weather",
    "tricycle": "response", "act": "response", "announced": "weather", "ashfall": "geology",
    "police": "response", "lava": "geology", "bulletin": "weather", "quake": "geology",
    "typhoon": "weather", "weakened": "weather", "affected": "response",
}

DOCS_PER_YEAR = 40


def toy_corpus(rng):
    docs = []
    for year in YEARS:
        bags = {t: [] for t in TOPICS}
        for (word, _), count in zip(SEEDS[year], SEED_COUNTS):
            bags[SEED_TOPIC[word]] += [word] * count
        for topic, words in TOPICS.items():
            for word, _ in words:
                bags[topic] += [word] * rng.randint(*OTHER_COUNT)
        for word, count in UNTAGGED:
            for _ in range(count):
                bags[rng.choice(list(TOPICS))].append(word)
        for bag in bags.values():
            rng.shuffle(bag)

        topics = [list(TOPICS)[i % len(TOPICS)] for i in range(DOCS_PER_YEAR)]
        per_doc = {t: [] for t in TOPICS}
        for i, t in enumerate(topics):
            per_doc[t].append(i)
        texts = [[] for _ in range(DOCS_PER_YEAR)]
        for topic, bag in bags.items():
            owners = per_doc[topic]
            for j, word in enumerate(bag):
                texts[owners[j % len(owners)]].append(word)

        for i, content in enumerate(texts):
            # Interleave stopwords so each sentence reads as function + content tokens.
            tokens = []
            for word in content:
                if rng.random() < 0.6:
                    tokens.append(rng.choice(STOPWORDS))
                tokens.append(word)
            title, body = tokens[:4], tokens[4:]
            sentences = []
            while body:
                n = rng.randint(6, 12)
                chunk, body = body[:n], body[n:]
                sentences.append(" ".join(chunk).capitalize() + ".")
            month = 1 + i % 12
            day = 1 + (i * 7) % 28
            docs.append({
                "id": f"toy-{year}-{i:03d}",
                "date": f"{year}-{month:02d}-{day:02d}",
                "title": " ".join(title).title(),
                "body": " ".join(sentences),
                "source": "toy",
            })
    return docs


def check_top_seeds(docs):
    stop = set(STOPWORDS)
    tagged = {w for y in SEEDS.values() for w, _ in y} | {w for t in TOPICS.values() for w, _ in t}
    for year in YEARS:
        counts = Counter()
        for d in docs:
            if not d["date"].startswith(str(year)):
                continue
            for tok in (d["title"] + " " + d["body"]).lower().replace(".", " ").split():
                if tok not in stop and tok in tagged:
                    counts[tok] += 1
        top = [w for w, _ in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:5]]
        assert top == [w for w, _ in SEEDS[year]], (year, top)


# Labeled knowledge base: per partition 150 assertions from 50 seeds.
NAMED_ROWS = {
    2017: {
        "governor": [("DO", "assure"), ("DO", "giving"), ("DO", "explain")],
        "experts": [("SYN", "representative"), ("DO", "checking"), ("DO", "verify")],
        "police": [("DO", "risk"), ("DO", "control"), ("DO", "damage")],
        "mayor": [("PartOf", "hall"), ("PartOf", "DWUP"), ("PartOf", "sitio")],
        "student": [("PartOf", "PUP"), ("IS", "victim"), ("IS", "resident")],
        "teacher": [("DO", "education"), ("PartOf", "DepEd"), ("PartOf", "school")],
        "earthquake": [("IS", "magnitude"), ("SYN", "quake"), ("RAND", "drill")],
        "eruption": [("IS", "amplifying"), ("IS", "fast"), ("IS", "confirmed")],
        "landslide": [("dueTo", "flood"), ("HYP", "mudslide"), ("RAND", "area")],
        "typhoon": [("IS", "expected"), ("PartOf", "calamity"), ("SYN", "onslaught")],
    },
    2018: {
        "governor": [("IS", "political"), ("DO", "oversees"), ("IS", "mandatory")],
        "experts": [("DO", "work"), ("IS", "frantic"), ("DO", "announce")],
        "police": [("DO", "risk"), ("IS", "armed"), ("DO", "commitment")],
        "mayor": [("PartOf", "administration"), ("DO", "communication"), ("PartOf", "DENR")],
        "student": [("PartOf", "elementary"), ("PartOf", "school"), ("IS", "minor")],
        "teacher": [("DO", "research"), ("DO", "education"), ("PartOf", "school")],
        "earthquake": [("IS", "magnitude"), ("SYN", "quake"), ("IS", "intensity")],
        "eruption": [("IS", "happening"), ("IS", "explosive"), ("CAUSE", "destruction")],
        "landslide": [("dueTo", "rain"), ("IS", "torrential"), ("HYP", "mudslide")],
        "typhoon": [("SYN", "storm"), ("IS", "super"), ("IS", "powerful")],
    },
    2019: {
        "governor": [("DO", "declare"), ("DO", "resolution"), ("DO", "develop")],
        "experts": [("IS", "supporting"), ("DO", "recommend"), ("DO", "impose")],
        "police": [("DO", "risk"), ("DO", "study"), ("DO", "alerts")],
        "mayor": [("RAND", "workers"), ("PartOf", "government"), ("RAND", "employers")],
        "student": [("PartOf", "organization"), ("PartOf", "University"), ("PartOf", "UP")],
        "teacher": [("PartOf", "house"), ("SYN", "employee"), ("PartOf", "school")],
        "earthquake": [("IS", "magnitude"), ("SYN", "quake"), ("RAND", "signal")],
        "eruption": [("IS", "hazardous"), ("IS", "magmatic"), ("IS", "happening")],
        "landslide": [("RAND", "mountain"), ("dueTo", "rains"), ("IS", "widespread")],
        "typhoon": [("dueTo", "Amihan"), ("SYN", "hurricane"), ("SYN", "cyclone")],
        "tremor": [("SYN", "aftershock"), ("dueTo", "quake"), ("dueTo", "earthquake")],
        "rescue": [("PartOf", "operations"), ("HYP", "retrieval"), ("HYP", "aid")],
    },
}

FILLER_SEEDS = [
    "barangay", "evacuation", "relief", "shelter", "volunteers", "casualties", "province",
    "coastline", "highway", "bridge", "crops", "farmers", "fishermen", "hospital", "clinic",
    "water", "electricity", "supply", "donation", "military", "firefighters", "rainfall",
    "wind", "tsunami", "drought", "heat", "outbreak", "disease", "landfall", "victims",
    "residents", "schools", "classes", "ferry", "flights", "port", "market", "prices",
    "families", "survivors",
]
FILLER_TARGETS = [
    "assistance", "center", "gym", "tents", "food", "packs", "medicine", "doctors", "nurses",
    "trucks", "roads", "collapse", "debris", "mud", "river", "dam", "overflow", "pumps",
    "generators", "blackout", "repair", "crews", "funds", "budget", "loans", "harvest",
    "rice", "boats", "coast", "guard", "soldiers", "helicopter", "airport", "cancelled",
    "suspended", "closed", "reopened", "restored", "tally", "injured", "missing", "dead",
    "homeless", "camps", "blankets", "kits", "hygiene", "volunteer", "youth", "church",
    "chapel", "plaza", "town", "city", "region", "island", "village", "community", "council",
    "office",
]
FILLER_LABELS = ["SYN", "ANT", "HYP", "DO", "PartOf", "IS", "CAUSE", "dueTo", "RAND"]
EXPERTS = ["linguist", "disaster", "meteorologist"]
# Agree verdicts out of 3 x 150 judgments per partition.
AGREE = {2017: 221, 2018: 234, 2019: 288}


def reference_kb(rng):
    named = {w for rows in NAMED_ROWS.values() for seed, pairs in rows.items()
             for w in [seed] + [c for _, c in pairs]}
    assert not named & set(FILLER_SEEDS), named & set(FILLER_SEEDS)
    assert not named & set(FILLER_TARGETS), named & set(FILLER_TARGETS)

    assertions = []
    next_id = 1
    for year in YEARS:
        rows = list(NAMED_ROWS[year].items())
        for seed in FILLER_SEEDS[: 50 - len(rows)]:
            targets = rng.sample(FILLER_TARGETS, 3)
            rows.append((seed, [(rng.choice(FILLER_LABELS), t) for t in targets]))
        assert sum(len(p) for _, p in rows) == 150
        for seed, pairs in rows:
            sims = sorted((round(rng.uniform(0.55, 0.95), 4) for _ in pairs), reverse=True)
            for rank, ((label, target), sim) in enumerate(zip(pairs, sims), start=1):
                assertions.append({
                    "id": next_id,
                    "concept1": seed,
                    "label": label,
                    "concept2": target,
                    "partition": year,
                    "similarity": sim,
                    "status": "labeled",
                    "provenance": {"seed": seed, "rank": rank},
                    "annotator": "annotator1",
                    "labeled_at": f"{year + 1}-02-01T09:00:00Z",
                })
                next_id += 1
    return assertions


def judgments(rng, assertions):
    rows = []
    for year in YEARS:
        ids = [a["id"] for a in assertions if a["partition"] == year]
        slots = [(i, e) for i in ids for e in EXPERTS]
        agree = set(rng.sample(range(len(slots)), AGREE[year]))
        for k, (i, e) in enumerate(slots):
            rows.append((i, e, "agree" if k in agree else "disagree", f"{year + 1}-03-01T10:00:00Z"))
    return rows


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    rng = random.Random(20200501)

    docs = toy_corpus(rng)
    check_top_seeds(docs)
    with open(OUT / "toy_corpus.jsonl", "w", encoding="utf-8") as f:
        for d in docs:
            f.write(json.dumps(d, ensure_ascii=False) + "\n")

    lexicon = [(w, p) for y in YEARS for w, p in SEEDS[y]]
    lexicon += [wp for t in TOPICS.values() for wp in t]
    with open(OUT / "toy_lexicon.tsv", "w", encoding="utf-8") as f:
        f.write("# token\tpos\n")
        for w, p in sorted(set(lexicon)):
            f.write(f"{w}\t{p}\n")
    with open(OUT / "toy_stoplist.txt", "w", encoding="utf-8") as f:
        f.write("\n".join(STOPWORDS) + "\n")

    kb = reference_kb(rng)
    with open(OUT / "reference_kb.jsonl", "w", encoding="utf-8") as f:
        for a in kb:
            f.write(json.dumps(a) + "\n")
    with open(OUT / "reference_judgments.csv", "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["assertion_id", "expert", "verdict", "timestamp"])
        w.writerows(judgments(rng, kb))


if __name__ == "__main__":
    main()
