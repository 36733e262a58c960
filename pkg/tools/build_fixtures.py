#!/usr/bin/env python
"""Regenerate every bundled data file under src/distortsearch/data/.

All outputs are deterministic: fixed seeds drive the samplers, so running
this script twice yields byte-identical files. The script also validates
the engineered properties the test suite relies on (relevant-document
counts, the precision-demo retrieval counts, decoy ranking dominance) and
fails loudly if an edit to the inputs breaks them.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path
from random import Random

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "src"))

from distortsearch import datapaths  # noqa: E402
from distortsearch.lexicon import load_lexicon  # noqa: E402
from distortsearch.obfuscate import assemble_query, generate_batch, write_batch  # noqa: E402
from distortsearch.searchsim import SearchIndex, load_ads, load_corpus  # noqa: E402
from distortsearch.textmine import load_stopwords, normalize_tokens, relevance_count  # noqa: E402

DATA = REPO / "src" / "distortsearch" / "data"

INTENT = "buy a toyota 2014"
CORPUS_SEED = 31415
REAL_LOG_SEED = 27182
ATTACK_BATCH_SEED = 16180

STOPWORDS = """\
# surface-form stop words, matched before stemming
a about above after again all am an and any are as at be because been
before being below between both but by cannot could did do does doing down
during each few for from further had has have having he her here hers
herself him himself his how i if in into is it its itself just me more
most my myself no nor not now of off on once only or other our ours
ourselves out over own same she should so some such than that the their
theirs them themselves then there these they this those through to too
under until up very was we were what when where which while who whom why
will with you your yours yourself yourselves
"""

LEXICON = {
    "keywords": [
        # navigational
        {"text": "shoes.com", "category": "N", "visibility": 5, "topic": "shopping"},
        {"text": "cnn.com", "category": "N", "visibility": 4, "topic": "news"},
        {"text": "bbc.com", "category": "N", "visibility": 3, "topic": "news"},
        {"text": "kayak.com", "category": "N", "visibility": 4, "topic": "travel"},
        {"text": "phonearena.com", "category": "N", "visibility": 2, "topic": "smartphones"},
        {"text": "autotrader.com", "category": "N", "visibility": 3, "topic": "cars"},
        # informational
        {"text": "nairobi kenya", "category": "I", "visibility": 4, "topic": "travel"},
        {"text": "coffee prices", "category": "I", "visibility": 5, "topic": "shopping"},
        {"text": "barack obama", "category": "I", "visibility": 5, "topic": "news"},
        {"text": "western civilization", "category": "I", "visibility": 3, "topic": "news"},
        {"text": "blue jays", "category": "I", "visibility": 2, "topic": "news"},
        {"text": "android performance", "category": "I", "visibility": 3, "topic": "smartphones"},
        # transactional
        {"text": "get a samsung phone", "category": "T", "visibility": 5, "topic": "smartphones"},
        {"text": "purchase running shoes", "category": "T", "visibility": 4, "topic": "shopping"},
        {"text": "sell honda car", "category": "T", "visibility": 3, "topic": "cars"},
        {"text": "order espresso beans", "category": "T", "visibility": 2, "topic": "shopping"},
        {"text": "acquire travel insurance", "category": "T", "visibility": 3, "topic": "travel"},
        # natural-language
        {"text": "how to learn swahili quickly", "category": "L", "visibility": 3, "topic": "travel"},
        {"text": "what is the best android phone", "category": "L", "visibility": 4, "topic": "smartphones"},
        {"text": "where to find cheap flights", "category": "L", "visibility": 4, "topic": "travel"},
        {"text": "why do engines overheat", "category": "L", "visibility": 2, "topic": "cars"},
        {"text": "when does the premier league start", "category": "L", "visibility": 3, "topic": "news"},
        # temporal
        {"text": "black friday 2013", "category": "P", "visibility": 5, "topic": "shopping"},
        {"text": "world cup 2010", "category": "P", "visibility": 4, "topic": "news"},
        {"text": "olympics 2016", "category": "P", "visibility": 3, "topic": "news"},
        {"text": "samsung galaxy 2015", "category": "P", "visibility": 4, "topic": "smartphones"},
        {"text": "paris motor show 2012", "category": "P", "visibility": 2, "topic": "cars"},
    ],
    "verbs": [
        {"a": "buy", "b": "get"},
        {"a": "buy", "b": "purchase"},
        {"a": "get", "b": "obtain"},
        {"a": "purchase", "b": "acquire"},
        {"a": "get", "b": "grab"},
        {"a": "sell", "b": "trade"},
        {"a": "trade", "b": "swap"},
        {"a": "order", "b": "request"},
        {"a": "find", "b": "locate"},
        {"a": "want", "b": "desire"},
    ],
}

# topic filler vocabularies; none of these words (or their stems) occur in
# any lexicon keyword or in the intent phrase
FILLER = {
    "cars": ["sedan", "dealership", "mileage", "warranty", "horsepower", "hybrid", "coupe", "hatchback"],
    "smartphones": ["battery", "screen", "processor", "camera", "charger", "headphone", "bluetooth", "gadget"],
    "shopping": ["discount", "voucher", "checkout", "retail", "bargain", "outlet", "clearance", "cart"],
    "travel": ["itinerary", "passport", "resort", "luggage", "airfare", "hostel", "visa", "beach"],
    "news": ["headline", "editorial", "broadcast", "journalist", "bulletin", "press", "coverage", "anchor"],
}

# (keyword text, docs in its group) per topic; group sizes sum to 140 for
# cars (plus 60 intent-relevant docs) and 200 elsewhere
TOPIC_GROUPS = {
    "cars": [
        ("sell honda car", 35),
        ("why do engines overheat", 35),
        ("paris motor show 2012", 35),
        ("autotrader.com", 35),
    ],
    "smartphones": [
        ("get a samsung phone", 40),
        ("samsung galaxy 2015", 40),
        ("android performance", 40),
        ("what is the best android phone", 40),
        ("phonearena.com", 40),
    ],
    "shopping": [
        ("shoes.com", 40),
        ("coffee prices", 40),
        ("purchase running shoes", 40),
        ("order espresso beans", 40),
        ("black friday 2013", 40),
    ],
    "travel": [
        ("kayak.com", 40),
        ("nairobi kenya", 40),
        ("acquire travel insurance", 40),
        ("how to learn swahili quickly", 40),
        ("where to find cheap flights", 40),
    ],
    "news": [
        ("cnn.com", 25),
        ("bbc.com", 25),
        ("barack obama", 25),
        ("western civilization", 25),
        ("blue jays", 25),
        ("world cup 2010", 25),
        ("olympics 2016", 25),
        ("when does the premier league start", 25),
    ],
}

RELEVANT_DOCS = 60  # cars docs containing the full intent phrase

ADS = [
    # cars (20; the first 3 are specific to the intent)
    ("cars", "2014 Toyota clearance event — certified offers", ["toyota 2014"]),
    ("cars", "Buy your Toyota today, nationwide delivery", ["buy toyota"]),
    ("cars", "Toyota financing from 1.9% APR", ["toyota"]),
    ("cars", "Honda Civic lease specials", ["honda civic"]),
    ("cars", "Chevrolet end-of-year sale", ["chevrolet"]),
    ("cars", "Ford Fusion hybrid test drives", ["ford fusion"]),
    ("cars", "Lending Tree auto finance quotes", ["auto finance"]),
    ("cars", "Allan Nott dealership — Honda and more", ["honda dealership"]),
    ("cars", "Jeep trail-rated clearance", ["jeep"]),
    ("cars", "GMC trucks built to work", ["gmc trucks"]),
    ("cars", "Cars.com — shop millions of listings", ["car listings"]),
    ("cars", "All State drivers save more", ["car insurance"]),
    ("cars", "Brake service coupon — 20% off", ["brake service"]),
    ("cars", "Synthetic oil change bundle", ["oil change"]),
    ("cars", "Tire rotation and alignment deal", ["tire rotation"]),
    ("cars", "Auto glass repair while you wait", ["auto glass"]),
    ("cars", "Touchless car wash memberships", ["car wash"]),
    ("cars", "Home EV charging installers", ["ev charging"]),
    ("cars", "Motorcycle gear blowout", ["motorcycle gear"]),
    ("cars", "Certified used sedans under 10k", ["used sedans"]),
    # smartphones (10)
    ("smartphones", "T-Mobile unlimited family plans", ["mobile plan"]),
    ("smartphones", "Samsung Galaxy rugged cases", ["galaxy case"]),
    ("smartphones", "Fast chargers for every device", ["phone charger"]),
    ("smartphones", "Tempered glass screen protectors", ["screen protector"]),
    ("smartphones", "Prepaid SIM with free roaming", ["prepaid sim"]),
    ("smartphones", "Cracked screen? Same-day repair", ["phone repair"]),
    ("smartphones", "Wireless earbuds spring sale", ["earbuds"]),
    ("smartphones", "5G coverage where you live", ["5g plan"]),
    ("smartphones", "EcoATM — trade your old phone", ["phone trade in"]),
    ("smartphones", "Refurbished phones with warranty", ["refurbished phones"]),
    # shopping (10)
    ("shopping", "Online Shoes — free returns", ["online shoes"]),
    ("shopping", "Zappos daily deals", ["zappos"]),
    ("shopping", "Whole Latte Love coffee gear", ["coffee gear"]),
    ("shopping", "Running gear clearance", ["running gear"]),
    ("shopping", "Espresso machines up to 40% off", ["espresso machine"]),
    ("shopping", "Stack discount vouchers today", ["vouchers"]),
    ("shopping", "Holiday deals start now", ["holiday deals"]),
    ("shopping", "Gift cards for every occasion", ["gift cards"]),
    ("shopping", "Hand-stitched leather boots", ["leather boots"]),
    ("shopping", "Cashback on every checkout", ["cashback"]),
    # travel (10)
    ("travel", "Kayak flight price alerts", ["flight deals"]),
    ("travel", "Nairobi safari tours — book direct", ["safari tours"]),
    ("travel", "Compare travel insurance quotes", ["travel insurance"]),
    ("travel", "Hostels from 12 a night", ["hostel booking"]),
    ("travel", "Airport transfers, fixed price", ["airport transfer"]),
    ("travel", "City passes skip the line", ["city pass"]),
    ("travel", "Cruise cabins at half price", ["cruise discount"]),
    ("travel", "Hotel rewards double points", ["hotel rewards"]),
    ("travel", "Luggage sale — carry-on bundles", ["luggage sale"]),
    ("travel", "Visa services without the queue", ["visa services"]),
    # news (10)
    ("news", "IBM Cloud for enterprises", ["ibm cloud"]),
    ("news", "Microsoft Cloud free tier", ["microsoft cloud"]),
    ("news", "Sunday paper, digital included", ["newspaper subscription"]),
    ("news", "Premier League ticket exchange", ["league tickets"]),
    ("news", "Olympics merchandise store", ["olympics merchandise"]),
    ("news", "Award-winning documentaries, streaming", ["documentary streaming"]),
    ("news", "Press club annual membership", ["press club"]),
    ("news", "World Cup replica kits", ["replica kits"]),
    ("news", "Magazine bundle — 5 titles", ["magazine bundle"]),
    ("news", "Podcast app with offline mode", ["podcast app"]),
]

# word pools for the synthetic real-style query log
REAL_HEADS = [
    "weather", "maps", "lyrics", "recipes", "horoscope", "movie times",
    "bank hours", "flight status", "stock quote", "directions",
]
REAL_SITES = [
    "myspace.com", "craigslist", "ebay motors", "mapquest", "webmd",
    "yellow pages", "white pages", "irs forms", "dmv appointment",
]
REAL_TOPICS = [
    "dog breeds", "low carb diet", "home remedies", "baby names",
    "tax refund", "lottery numbers", "high school reunion", "apartment rent",
    "divorce lawyer", "credit score", "job openings", "zip code",
    "knitting patterns", "fantasy football", "garage sale", "piano lessons",
    "wedding dresses", "science fair projects", "resume template",
    "scholarship essay", "jigsaw puzzles", "antique clocks",
]
REAL_SUFFIXES = ["", " near me", " free", " online", " pictures", " 2006", " reviews"]


def write_lexicon() -> None:
    path = DATA / "lexicon.json"
    path.write_text(json.dumps(LEXICON, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {path}")


def write_stopwords() -> None:
    path = DATA / "stopwords.txt"
    words = [w for w in STOPWORDS.split() if not w.startswith("#")]
    body = "# surface-form stop words, matched before stemming\n"
    body += "\n".join(words) + "\n"
    path.write_text(body, encoding="utf-8")
    print(f"wrote {path} ({len(words)} words)")


def _relevant_doc(rng: Random, doc_id: str) -> dict:
    f = FILLER["cars"]
    a, b, c, d = rng.sample(f, 4)
    return {
        "id": doc_id,
        "url": f"https://listings.example/{doc_id.lower()}",
        "title": f"Buy Toyota 2014 {a} offers",
        "snippet": f"Toyota {b} financing with {c} and {d} included.",
        "categories": ["cars"],
    }


def _group_doc(rng: Random, doc_id: str, phrase: str, topic: str) -> dict:
    f = FILLER[topic]
    a, b, c = rng.sample(f, 3)
    slug = phrase.replace(" ", "-").replace(".", "-")
    return {
        "id": doc_id,
        "url": f"https://{topic}.example/{slug}/{doc_id.lower()}",
        "title": f"{phrase} {a}",
        "snippet": f"{phrase} {b} notes. More on {phrase} and {c}.",
        "categories": [topic],
    }


def write_corpus() -> None:
    rng = Random(CORPUS_SEED)
    docs: list[dict] = []
    n = 0
    for _ in range(RELEVANT_DOCS):
        n += 1
        docs.append(_relevant_doc(rng, f"D{n:04d}"))
    for topic, groups in TOPIC_GROUPS.items():
        for phrase, size in groups:
            for _ in range(size):
                n += 1
                docs.append(_group_doc(rng, f"D{n:04d}", phrase, topic))
    path = DATA / "corpus_synth.jsonl"
    with path.open("w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(json.dumps(doc, ensure_ascii=False) + "\n")
    print(f"wrote {path} ({len(docs)} docs)")


def write_ads() -> None:
    path = DATA / "ads.jsonl"
    with path.open("w", encoding="utf-8") as fh:
        for i, (category, text, tags) in enumerate(ADS, start=1):
            record = {
                "id": f"AD{i:03d}",
                "text": text,
                "category": category,
                "specific_tags": tags,
            }
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
    print(f"wrote {path} ({len(ADS)} ads)")


DISTRACTOR_WORDS = [
    "marble", "sculpture", "violin", "concerto", "zebra", "migration",
    "pottery", "kiln", "chess", "gambit", "telescope", "nebula",
    "sourdough", "fermentation", "origami", "watercolor", "glacier",
    "fossil", "orchid", "saxophone",
]


def write_precision_corpus() -> None:
    """Corpus engineered around one fixed-seed NITP query: the query must
    retrieve exactly 106 documents, 53 of them intent-relevant."""
    lexicon = load_lexicon(DATA / "lexicon.json")
    stopwords = load_stopwords(DATA / "stopwords.txt")
    query = assemble_query(
        datapaths.PRECISION_DEMO_INTENT,
        datapaths.PRECISION_DEMO_PATTERN,
        lexicon,
        Random(datapaths.PRECISION_DEMO_SEED),
    )
    decoy_phrases = [s for i, s in enumerate(query.segments) if i != query.intent_index]
    print(f"precision-demo query: {query.text!r}")

    rng = Random(CORPUS_SEED + 1)
    docs: list[dict] = []
    for i in range(53):
        docs.append(_relevant_doc(rng, f"P{i + 1:04d}"))
    for i in range(53):
        phrase = decoy_phrases[i % len(decoy_phrases)]
        f = FILLER["news"]
        a, b = rng.sample(f, 2)
        docs.append(
            {
                "id": f"P{i + 54:04d}",
                "url": f"https://mixed.example/p{i + 54:04d}",
                "title": f"{phrase} {a}",
                "snippet": f"{phrase} {b} roundup.",
                "categories": ["mixed"],
            }
        )
    for i in range(44):
        a, b, c, d = Random(CORPUS_SEED + 2 + i).sample(DISTRACTOR_WORDS, 4)
        docs.append(
            {
                "id": f"P{i + 107:04d}",
                "url": f"https://offtopic.example/p{i + 107:04d}",
                "title": f"{a} {b} workshop",
                "snippet": f"Notes on {c} and {d}.",
                "categories": ["offtopic"],
            }
        )

    path = DATA / "corpus_precision.jsonl"
    with path.open("w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(json.dumps(doc, ensure_ascii=False) + "\n")

    # engineered-property audit
    corpus = load_corpus(path)
    index = SearchIndex(corpus, stopwords)
    page = index.execute(query.text, top_k=datapaths.PRECISION_DEMO_TOP_K)
    intent_tokens = normalize_tokens(datapaths.PRECISION_DEMO_INTENT, stopwords)
    relevant = relevance_count(index.doc_tokens, intent_tokens, mode="all")
    hits_relevant = sum(
        1
        for hit in page
        if set(intent_tokens) <= set(index.doc_tokens[corpus.index(hit.doc)])
    )
    assert len(page) == 106, f"precision corpus retrieves {len(page)}, want 106"
    assert hits_relevant == 53, f"precision corpus relevant hits {hits_relevant}, want 53"
    assert relevant == 53, f"precision corpus relevant total {relevant}, want 53"
    print(f"wrote {path} (retrieved=106, relevant=53)")


def write_real_log() -> None:
    rng = Random(REAL_LOG_SEED)
    rows: list[str] = []
    while len(rows) < 248:
        style = rng.randrange(4)
        if style == 0:
            q = f"{rng.choice(REAL_HEADS)} {rng.choice(REAL_TOPICS).split()[0]}"
        elif style == 1:
            q = rng.choice(REAL_SITES)
        elif style == 2:
            q = rng.choice(REAL_TOPICS) + rng.choice(REAL_SUFFIXES)
        else:
            q = f"{rng.choice(REAL_TOPICS)} {rng.choice(REAL_HEADS)}"
        anon = rng.randrange(100000, 999999)
        day = rng.randrange(1, 29)
        hour = rng.randrange(24)
        minute = rng.randrange(60)
        rows.append(f"{anon}\t{q}\t2006-03-{day:02d} {hour:02d}:{minute:02d}:00")
    path = DATA / "real_queries.tsv"
    path.write_text("AnonID\tQuery\tQueryTime\n" + "\n".join(rows) + "\n", encoding="utf-8")
    print(f"wrote {path} ({len(rows)} rows)")


def write_attack_batch() -> None:
    """121-query default batch plus one extra NITP query: 122 obfuscated
    queries frozen for the dual-implementation attack oracle."""
    lexicon = load_lexicon(DATA / "lexicon.json")
    batch = generate_batch(INTENT, lexicon, seed=ATTACK_BATCH_SEED)
    extra = assemble_query(
        INTENT,
        "NITP",
        lexicon,
        Random(ATTACK_BATCH_SEED + 1),
        query_id=f"Q{len(batch) + 1}",
    )
    path = DATA / "attack_obfuscated_v1.jsonl"
    write_batch([*batch, extra], path)
    print(f"wrote {path} ({len(batch) + 1} queries)")


def audit_synth_corpus() -> None:
    """Check the engineered invariants the acceptance tests lean on."""
    stopwords = load_stopwords(DATA / "stopwords.txt")
    corpus = load_corpus(DATA / "corpus_synth.jsonl")
    index = SearchIndex(corpus, stopwords)
    intent_tokens = normalize_tokens(INTENT, stopwords)
    relevant = relevance_count(index.doc_tokens, intent_tokens, mode="all")
    assert relevant == RELEVANT_DOCS, f"synth corpus relevant={relevant}, want {RELEVANT_DOCS}"

    # the bare intent must match exactly the relevant docs
    page = index.execute(INTENT, top_k=1000)
    assert len(page) == RELEVANT_DOCS, f"bare intent retrieves {len(page)}"
    relevant_score = page[0].score

    # every decoy keyword's own documents must outrank relevant docs so
    # longer patterns crowd relevant results out of the page
    ads = load_ads(DATA / "ads.jsonl")
    assert len(ads) == 60
    worst = None
    for kw in (k["text"] for k in LEXICON["keywords"]):
        kw_page = index.execute(kw, top_k=5)
        assert kw_page, f"keyword {kw!r} retrieves nothing"
        top = kw_page[0].score
        if worst is None or top < worst[1]:
            worst = (kw, top)
    assert worst[1] > relevant_score, (
        f"keyword {worst[0]!r} top score {worst[1]:.2f} does not beat "
        f"relevant doc score {relevant_score:.2f}"
    )
    print(
        f"synth corpus audit ok: relevant={relevant}, "
        f"relevant_score={relevant_score:.2f}, weakest keyword {worst[0]!r} at {worst[1]:.2f}"
    )


def main() -> None:
    DATA.mkdir(parents=True, exist_ok=True)
    write_lexicon()
    write_stopwords()
    write_corpus()
    write_ads()
    audit_synth_corpus()
    write_precision_corpus()
    write_real_log()
    write_attack_batch()


if __name__ == "__main__":
    main()
