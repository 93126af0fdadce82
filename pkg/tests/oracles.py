"""Independent reference implementations used only to check the real ones.

The brute-force scorer re-derives every count by cross-producting extractions
against gold names with plain loops; it shares no code with the scoring
module.
"""

from __future__ import annotations

import random


def _norm(text: str) -> str:
    out = []
    last_space = False
    for ch in text.strip():
        if ch.isspace():
            if not last_space:
                out.append(" ")
            last_space = True
        else:
            out.append(ch)
            last_space = False
    return "".join(out).rstrip().casefold()


def brute_force_counts(
    extractions: list[tuple[str, str]],
    gold_entries: dict[str, list[str]],
    stoplist: set[str],
    mapping: dict[str, str],
) -> dict[str, int]:
    stop_normalized = {_norm(term) for term in stoplist}
    tp = ns = mm = 0
    covered: set[tuple[str, str]] = set()
    for doc_id, name in extractions:
        name_n = _norm(name)
        if name_n in stop_normalized:
            ns += 1
            continue
        matched = None
        for gold_name in gold_entries.get(doc_id, []):
            if _norm(gold_name) == name_n:
                matched = gold_name
                break
        if matched is None:
            canonical = None
            for surface, target in mapping.items():
                if _norm(surface) == name_n:
                    canonical = target
                    break
            if canonical is not None:
                for gold_name in gold_entries.get(doc_id, []):
                    if _norm(gold_name) == _norm(canonical):
                        matched = gold_name
                        break
        if matched is None:
            mm += 1
        else:
            tp += 1
            covered.add((doc_id, _norm(matched)))
    missed = 0
    for doc_id, names in gold_entries.items():
        for gold_name in names:
            if (doc_id, _norm(gold_name)) not in covered:
                missed += 1
    return {
        "total": len(extractions),
        "tp": tp,
        "ns": ns,
        "mm": mm,
        "missed": missed,
    }


def brute_force_metrics(counts: dict[str, int], mode: str) -> dict[str, float | None]:
    tp, ns, mm = counts["tp"], counts["ns"], counts["mm"]
    total, missed = counts["total"], counts["missed"]
    if mode == "literal":
        p = None if tp == 0 or ns > tp else (tp - ns) / tp
        r = None if total + missed == 0 else tp / (total + missed)
    else:
        p = None if total == 0 else tp / total
        r = None if tp + missed == 0 else tp / (tp + missed)
    if p is None or r is None or p + r == 0:
        score = None
    else:
        score = 2 * p * r / (p + r)
    return {"precision": p, "recall": r, "f1": score}


VOCAB = [
    "GM-CSF",
    "CpG 7909",
    "Advax",
    "Alum",
    "GLA-SE",
    "Hiltonol",
    "Poly IC-LC",
    "MF59",
    "AS04",
    "QS-21",
]
SYNONYMS = {
    "delta inulin": "Advax",
    "aluminum hydroxide": "Alum",
    "squalene emulsion": "MF59",
    "montanide": "Montanide ISA 51",
}
STOP_TERMS = ["adjuvant", "vaccine adjuvant", "immunostimulant"]
GARBAGE = ["saline", "placebo", "peptide KLH", "IL-2", "checkpoint inhibitor"]


def mangle(rng: random.Random, name: str) -> str:
    roll = rng.random()
    if roll < 0.25:
        return name.upper()
    if roll < 0.5:
        return name.lower()
    if roll < 0.65:
        return f"  {name}  "
    return name


def random_scenario(rng: random.Random):
    """A toy corpus: <=5 docs, <=4 gold names each, <=6 extractions total."""
    doc_ids = [f"D{i}" for i in range(rng.randint(1, 5))]
    gold_entries: dict[str, list[str]] = {}
    for doc_id in doc_ids:
        count = rng.randint(0, 4)
        if count:
            gold_entries[doc_id] = rng.sample(VOCAB, count)

    extractions: list[tuple[str, str]] = []
    for _ in range(rng.randint(0, 6)):
        doc_id = rng.choice(doc_ids)
        roll = rng.random()
        pool = gold_entries.get(doc_id)
        if roll < 0.4 and pool:
            name = mangle(rng, rng.choice(pool))
        elif roll < 0.55:
            name = mangle(rng, rng.choice(list(SYNONYMS)))
        elif roll < 0.7:
            name = rng.choice(STOP_TERMS)
        else:
            name = rng.choice(GARBAGE + VOCAB)
        extractions.append((doc_id, name))
    # duplicate extractions within a doc are legal scorer input
    return extractions, gold_entries, set(STOP_TERMS), dict(SYNONYMS)
