"""Regenerate the bundled toy fixture under src/pnel/data/toy/.

The KG is built around label ambiguity: most surface forms ("Tesla",
"Paris", "Mercury") name several entities, only one of which is the
well-known one a question is likely to mean.  Graph embeddings are
synthetic stand-ins for TransE vectors: a type block, a notability block
and noise.  Descriptions use only words missing from the toy vector table,
like long-tail vocabulary in a real one, so type and notability reach the
model through the graph embeddings alone.

    python scripts/make_toy_fixture.py
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parents[1] / "src" / "pnel" / "data" / "toy"
SEED = 20200601

TYPES = ["person", "company", "city", "unit", "band", "film", "river", "country",
         "planet", "element", "myth", "fruit", "state", "mountain", "other"]

# (key, label, description, type, notable)
ENTITIES = [
    ("tesla_inc", "Tesla, Inc.", "American electric vehicle manufacturer", "company", True),
    ("nikola_tesla", "Nikola Tesla", "Serbian-American inventor", "person", True),
    ("tesla_unit", "tesla", "magnetic flux density quantity", "unit", False),
    ("tesla_band", "Tesla", "American hard rock group", "band", False),
    ("elon_musk", "Elon Musk", "business magnate and engineer", "person", True),
    ("musk", "musk", "aromatic substances class", "other", False),
    ("musk_ox", "musk ox", "arctic hoofed mammal", "other", False),
    ("apple_inc", "Apple Inc.", "American technology firm", "company", True),
    ("apple_fruit", "apple", "pome fruit", "fruit", False),
    ("apple_records", "Apple Records", "British record label", "company", False),
    ("steve_jobs", "Steve Jobs", "American entrepreneur", "person", True),
    ("jobs_film", "Jobs", "2013 biographical drama", "film", False),
    ("amazon_co", "Amazon", "American e-commerce corporation", "company", True),
    ("amazon_river", "Amazon River", "South American waterway", "river", False),
    ("amazons", "Amazons", "Greek mythological warrior women", "myth", False),
    ("jeff_bezos", "Jeff Bezos", "American entrepreneur", "person", True),
    ("bezos_crater", "Bezos", "lunar feature", "other", False),
    ("paris_city", "Paris", "largest French settlement", "city", True),
    ("paris_hilton", "Paris Hilton", "American media personality", "person", False),
    ("paris_myth", "Paris", "Trojan prince", "myth", False),
    ("berlin_city", "Berlin", "German metropolis", "city", True),
    ("irving_berlin", "Irving Berlin", "American composer and lyricist", "person", False),
    ("berlin_band", "Berlin", "American new wave group", "band", False),
    ("isaac_newton", "Isaac Newton", "English mathematician and physicist", "person", True),
    ("newton_unit", "newton", "force quantity", "unit", False),
    ("newton_ma", "Newton", "Massachusetts settlement", "city", False),
    ("ford_motor", "Ford Motor Company", "American automaker", "company", True),
    ("henry_ford", "Henry Ford", "American industrialist", "person", True),
    ("harrison_ford", "Harrison Ford", "American actor", "person", False),
    ("ford_crossing", "ford", "shallow crossing place", "other", False),
    ("thomas_edison", "Thomas Edison", "American inventor and businessman", "person", True),
    ("edison_nj", "Edison", "New Jersey township", "city", False),
    ("edison_intl", "Edison International", "electric utility holding firm", "company", False),
    ("microsoft", "Microsoft", "American technology corporation", "company", True),
    ("microsoft_excel", "Microsoft Excel", "spreadsheet software", "other", False),
    ("bill_gates", "Bill Gates", "American business magnate", "person", True),
    ("gates_structure", "gates", "wall or fence openings", "other", False),
    ("gates_film", "Gates", "documentary feature", "film", False),
    ("google", "Google", "American technology firm", "company", True),
    ("google_maps", "Google Maps", "web mapping platform", "other", False),
    ("larry_page", "Larry Page", "American computer scientist", "person", True),
    ("page_paper", "page", "paper leaf side", "other", False),
    ("jimmy_page", "Jimmy Page", "English guitarist", "person", False),
    ("jordan_country", "Jordan", "Western Asian nation", "country", True),
    ("jordan_river", "Jordan River", "Levantine waterway", "river", False),
    ("michael_jordan", "Michael Jordan", "American basketball player", "person", True),
    ("mercury_planet", "Mercury", "smallest Solar System body", "planet", True),
    ("mercury_element", "mercury", "chemical element with symbol Hg", "element", False),
    ("freddie_mercury", "Freddie Mercury", "British singer", "person", False),
    ("james_watt", "James Watt", "Scottish inventor and engineer", "person", True),
    ("watt_unit", "watt", "power quantity", "unit", False),
    ("kelvin_person", "Lord Kelvin", "British physicist", "person", True),
    ("kelvin_unit", "kelvin", "temperature quantity", "unit", True),
    ("boston_city", "Boston", "Massachusetts metropolis", "city", True),
    ("boston_band", "Boston", "American rock group", "band", False),
    ("chicago_city", "Chicago", "largest Illinois settlement", "city", True),
    ("chicago_musical", "Chicago", "stage musical", "film", False),
    ("chicago_band", "Chicago", "American rock group", "band", False),
    ("phoenix_city", "Phoenix", "Arizona metropolis", "city", True),
    ("phoenix_myth", "phoenix", "mythical immortal bird", "myth", False),
    ("joaquin_phoenix", "Joaquin Phoenix", "American actor", "person", False),
    ("nile", "Nile", "major African waterway", "river", True),
    ("nile_band", "Nile", "American death metal group", "band", False),
    ("everest", "Mount Everest", "Earth's highest peak", "mountain", True),
    ("george_everest", "George Everest", "Welsh surveyor", "person", False),
    ("hudson_river", "Hudson River", "New York waterway", "river", True),
    ("henry_hudson", "Henry Hudson", "English explorer", "person", False),
    ("hudson_motor", "Hudson Motor Car Company", "defunct automaker", "company", False),
    ("charles_darwin", "Charles Darwin", "English naturalist", "person", True),
    ("darwin_city", "Darwin", "Northern Territory metropolis", "city", False),
    ("george_washington", "George Washington", "first United States leader", "person", True),
    ("washington_state", "Washington", "Pacific Northwest territory", "state", True),
    ("denzel_washington", "Denzel Washington", "American actor", "person", False),
    ("abraham_lincoln", "Abraham Lincoln", "16th United States leader", "person", True),
    ("lincoln_motor", "Lincoln", "luxury vehicle division", "company", False),
    ("lincoln_uk", "Lincoln", "English cathedral settlement", "city", False),
    ("walt_disney", "Walt Disney", "American animator and producer", "person", True),
    ("disney_co", "The Walt Disney Company", "American mass media conglomerate", "company", True),
    ("disneyland", "Disneyland", "Anaheim theme park", "other", False),
    ("boeing_co", "Boeing", "American aerospace manufacturer", "company", True),
    ("william_boeing", "William Boeing", "American aviation pioneer", "person", True),
    ("boeing_747", "Boeing 747", "wide-body airliner", "other", False),
    ("spacex", "SpaceX", "American spacecraft manufacturer", "company", True),
    ("paypal", "PayPal", "online payments system", "company", True),
    ("pal_video", "PAL", "analogue television encoding", "other", False),
    ("france", "France", "Western European nation", "country", True),
    ("france_name", "France", "given name", "other", False),
    ("germany", "Germany", "Central European nation", "country", True),
    ("serbia", "Serbia", "Southeast European nation", "country", True),
    ("serbia_ship", "Serbia", "steamship", "other", False),
    ("menlo_park", "Menlo Park", "California settlement", "city", True),
    ("menlo_park_nj", "Menlo Park", "New Jersey unincorporated community", "city", False),
    ("pretoria", "Pretoria", "South African administrative seat", "city", True),
    ("pretoria_ship", "Pretoria", "ocean liner", "other", False),
    ("seattle", "Seattle", "largest Pacific Northwest settlement", "city", True),
    ("seattle_slew", "Seattle Slew", "racehorse", "other", False),
    ("cupertino", "Cupertino", "California settlement", "city", True),
    ("redmond", "Redmond", "Pacific Northwest settlement", "city", True),
    ("redmond_or", "Redmond", "Oregon settlement", "city", False),
    ("hilton_hotels", "Hilton Hotels", "hospitality firm", "company", False),
]

# Words that get a vector; type-topic words share a topic component.
VOCAB_TOPICS = {
    "who": None, "what": None, "where": None, "which": None, "how": None,
    "is": None, "was": None, "did": None, "does": None, "the": None, "of": None,
    "in": None, "a": None, "by": None, "to": None,
    "founded": "company", "company": "company", "ceo": "company", "headquartered": "company",
    "born": "person", "wife": "person", "invented": "person", "died": "person",
    "population": "city", "city": "city", "capital": "city", "mayor": "city",
    "unit": "unit", "measure": "unit", "si": "unit",
    "river": "river", "long": "river", "flow": "river",
    "country": "country", "planet": "planet", "sun": "planet",
    "band": "band", "album": "band", "state": "state", "mountain": "mountain", "high": "mountain",
    "president": "person", "far": None, "from": None,
    "tesla": None, "apple": None, "amazon": None, "paris": None, "ford": None, "jordan": None,
}

# (question, [entity keys])
TRAIN = [
    ("Who founded Tesla?", ["tesla_inc"]),
    ("Where was Nikola Tesla born?", ["nikola_tesla"]),
    ("What does the tesla unit measure?", ["tesla_unit"]),
    ("Who is the CEO of SpaceX?", ["spacex"]),
    ("Where was Elon Musk born?", ["elon_musk"]),
    ("Did Elon Musk found PayPal?", ["elon_musk", "paypal"]),
    ("Who founded Apple?", ["apple_inc"]),
    ("Where was Steve Jobs born?", ["steve_jobs"]),
    ("Where is Apple headquartered?", ["apple_inc"]),
    ("Who founded Amazon?", ["amazon_co"]),
    ("Where was Jeff Bezos born?", ["jeff_bezos"]),
    ("What is the population of Paris?", ["paris_city"]),
    ("Paris is the capital of which country?", ["paris_city"]),
    ("What is the population of Berlin?", ["berlin_city"]),
    ("Where was Isaac Newton born?", ["isaac_newton"]),
    ("Who founded Ford?", ["ford_motor"]),
    ("Where was Henry Ford born?", ["henry_ford"]),
    ("What did Thomas Edison invent?", ["thomas_edison"]),
    ("Where was Thomas Edison born?", ["thomas_edison"]),
    ("Who is the CEO of Microsoft?", ["microsoft"]),
    ("Did Bill Gates found Microsoft?", ["bill_gates", "microsoft"]),
    ("Who founded Google?", ["google"]),
    ("Where was Larry Page born?", ["larry_page"]),
    ("What is the capital of Jordan?", ["jordan_country"]),
    ("Where was Michael Jordan born?", ["michael_jordan"]),
    ("How far is Mercury from the sun?", ["mercury_planet"]),
    ("What did James Watt invent?", ["james_watt"]),
    ("What does the kelvin unit measure?", ["kelvin_unit"]),
    ("Where was Lord Kelvin born?", ["kelvin_person"]),
    ("What is the population of Boston?", ["boston_city"]),
    ("Who is the mayor of Chicago?", ["chicago_city"]),
    ("How long is the Nile?", ["nile"]),
    ("How high is Mount Everest?", ["everest"]),
    ("Where was Charles Darwin born?", ["charles_darwin"]),
    ("Where was George Washington born?", ["george_washington"]),
    ("What is the capital of Washington state?", ["washington_state"]),
    ("Who founded Disney?", ["disney_co"]),
    ("Where was Walt Disney born?", ["walt_disney"]),
    ("Who founded Boeing?", ["william_boeing"]),
    ("Was Elon Musk born in Pretoria?", ["elon_musk", "pretoria"]),
]

TEST = [
    ("Who is the CEO of Tesla?", ["tesla_inc"]),
    ("Where was Bill Gates born?", ["bill_gates"]),
    ("What is the population of Phoenix?", ["phoenix_city"]),
    ("Where was Abraham Lincoln born?", ["abraham_lincoln"]),
    ("How long is the Hudson River?", ["hudson_river"]),
    ("Who is the CEO of Amazon?", ["amazon_co"]),
    ("Where is Microsoft headquartered?", ["microsoft"]),
    ("Did Steve Jobs found Apple?", ["steve_jobs", "apple_inc"]),
    ("Who is the mayor of Seattle?", ["seattle"]),
    ("Where was Nikola Tesla born?", ["nikola_tesla"]),
]


def main() -> None:
    rng = np.random.default_rng(SEED)
    OUT.mkdir(parents=True, exist_ok=True)

    # Shuffle ids so BM25 tie-breaks by id carry no information.
    qids = rng.permutation(np.arange(1000, 1000 + len(ENTITIES)))
    key_to_qid = {key: f"Q{q}" for (key, *_), q in zip(ENTITIES, qids)}

    type_dir = {t: rng.normal(0.0, 1.0, size=40) for t in TYPES}
    notable_dir = rng.normal(0.0, 1.0, size=20)
    with open(OUT / "entities.jsonl", "w", encoding="utf-8") as fh:
        for key, label, desc, etype, notable in ENTITIES:
            emb = rng.normal(0.0, 0.3, size=200)
            emb[:40] += type_dir[etype]
            emb[40:60] += notable_dir if notable else -notable_dir
            rec = {"id": key_to_qid[key], "label": label, "description": desc,
                   "embedding": [round(float(x), 5) for x in emb]}
            fh.write(json.dumps(rec) + "\n")

    topic_dir = {t: rng.normal(0.0, 1.0, size=300) for t in TYPES}
    words = list(VOCAB_TOPICS)
    assert len(words) == 50, len(words)
    with open(OUT / "vectors.txt", "w", encoding="utf-8") as fh:
        fh.write(f"{len(words)} 300\n")
        for w in words:
            vec = rng.normal(0.0, 0.5, size=300)
            if VOCAB_TOPICS[w] is not None:
                vec += topic_dir[VOCAB_TOPICS[w]]
            fh.write(w + " " + " ".join(f"{x:.5f}" for x in vec) + "\n")

    for _, _, desc, _, _ in ENTITIES:
        stray = [w for w in desc.lower().split() if w in VOCAB_TOPICS]
        assert not stray, (desc, stray)

    for name, rows in (("train", TRAIN), ("test", TEST)):
        with open(OUT / f"{name}.jsonl", "w", encoding="utf-8") as fh:
            for i, (question, keys) in enumerate(rows):
                rec = {"id": f"{name}-{i:02d}", "question": question,
                       "entities": [key_to_qid[k] for k in keys]}
                fh.write(json.dumps(rec) + "\n")
    print(f"wrote {len(ENTITIES)} entities, {len(words)} vectors, "
          f"{len(TRAIN)} train / {len(TEST)} test questions to {OUT}")


if __name__ == "__main__":
    main()
