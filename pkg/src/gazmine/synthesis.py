"""Deterministic synthetic corpus and gold generator.

Documents are concatenations of filled templates (the T1-shaped style-name
layout, the three paragraph-beginning shapes, and the circle-anchored pair)
separated by unlabeled filler.  Role alphabets are carved out of one CJK
range so that lexicon surfaces, style names, and filler never collide:
every planted record is recoverable and nothing false is extractable.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .corpus import Corpus, Document, MARKER
from .gold import EntitySpan, GoldAnnotations, NeSpan
from .kb import KBEntry, KnowledgeBase, LabelType, PersonRecord
from .patterns import CandidateRecord, STYLE_MARK

PERSON_SUFFIX = "人"   # 人
GAP_CHAR = "間"        # 間, the unlabeled char of the P10 example shape

DYNASTIES = ("Yuan", "Ming", "Song")
TEMPLATES = ("P5", "P8", "P9", "P10", "CIRCLE")

_POOL_START = 0x4E00
_POOL_SIZE = 6000
_RESERVED = {STYLE_MARK, PERSON_SUFFIX, GAP_CHAR, MARKER}


class SynthesisError(Exception):
    pass


def _char_pool(rng: random.Random) -> list[str]:
    pool = [chr(c) for c in range(_POOL_START, _POOL_START + _POOL_SIZE)
            if chr(c) not in _RESERVED]
    rng.shuffle(pool)
    return pool


def _pair_surfaces(rng: random.Random, firsts, lasts, count: int) -> list[str]:
    surfaces = set()
    while len(surfaces) < count:
        surfaces.add(rng.choice(firsts) + rng.choice(lasts))
    return sorted(surfaces)


def build_synthetic_kb(seed: int = 0, n_names: int = 160, n_addresses: int = 36,
                       n_offices: int = 18, n_nianhao: int = 9,
                       n_entries: int = 6, n_time: int = 8,
                       n_persons: int = 40) -> KnowledgeBase:
    """A lexicon whose roles draw from disjoint character alphabets.

    Every dynasty-bearing entry carries exactly one dynasty, names reuse
    characters positionally (so a tagger can generalize to unseen names),
    and each name's first character is also a SURNAME entry.
    """
    rng = random.Random(seed)
    pool = _char_pool(rng)
    cut = iter(range(len(pool)))

    def take(n: int) -> list[str]:
        return [pool[next(cut)] for _ in range(n)]

    name_first, name_mid, name_last = take(40), take(12), take(40)
    addr_first, addr_last = take(12), take(12)
    office_first, office_last = take(9), take(9)
    nian_first, nian_last = take(6), take(6)
    entry_first, entry_last = take(4), take(4)
    time_first, time_last = take(4), take(4)

    names = set()
    while len(names) < n_names:
        if rng.random() < 0.3:
            names.add(rng.choice(name_first) + rng.choice(name_mid)
                      + rng.choice(name_last))
        else:
            names.add(rng.choice(name_first) + rng.choice(name_last))
    names = sorted(names)
    addresses = _pair_surfaces(rng, addr_first, addr_last, n_addresses)
    offices = _pair_surfaces(rng, office_first, office_last, n_offices)
    nianhaos = _pair_surfaces(rng, nian_first, nian_last, n_nianhao)
    entry_methods = _pair_surfaces(rng, entry_first, entry_last, n_entries)
    times = _pair_surfaces(rng, time_first, time_last, n_time)

    entries = []
    for i, surface in enumerate(names):
        entries.append(KBEntry(surface, LabelType.NAME,
                               frozenset({DYNASTIES[i % len(DYNASTIES)]})))
    for surface in addresses:
        entries.append(KBEntry(surface, LabelType.ADDRESS))
    for i, surface in enumerate(offices):
        entries.append(KBEntry(surface, LabelType.OFFICE,
                               frozenset({DYNASTIES[i % len(DYNASTIES)]})))
    for i, surface in enumerate(nianhaos):
        entries.append(KBEntry(surface, LabelType.NIANHAO,
                               frozenset({DYNASTIES[i % len(DYNASTIES)]})))
    for i, surface in enumerate(entry_methods):
        entries.append(KBEntry(surface, LabelType.ENTRY,
                               frozenset({DYNASTIES[i % len(DYNASTIES)]})))
    for surface in times:
        entries.append(KBEntry(surface, LabelType.TIME))
    for ch in name_first:
        entries.append(KBEntry(ch, LabelType.SURNAME))

    name_dynasty = {s: DYNASTIES[i % len(DYNASTIES)] for i, s in enumerate(names)}
    persons = []
    for surface in rng.sample(names, min(n_persons, len(names))):
        persons.append(PersonRecord(
            official_name=surface, dynasty=name_dynasty[surface],
            native_place=rng.choice(addresses)))
    return KnowledgeBase(entries, persons)


@dataclass
class _Vocab:
    names: dict[str, list[str]]      # dynasty -> name surfaces
    offices: dict[str, list[str]]
    nianhaos: dict[str, list[str]]
    addresses: list[str]
    times: list[str]
    style_chars: list[str]
    filler_chars: list[str]


def _vocab_from_kb(kb: KnowledgeBase, templates) -> _Vocab:
    names: dict[str, list[str]] = {}
    offices: dict[str, list[str]] = {}
    nianhaos: dict[str, list[str]] = {}
    addresses: list[str] = []
    times: list[str] = []
    used_chars = set()
    for entry in kb.entries:
        used_chars.update(entry.surface)
        buckets = {LabelType.NAME: names, LabelType.OFFICE: offices,
                   LabelType.NIANHAO: nianhaos}.get(entry.type)
        if buckets is not None:
            for dyn in sorted(entry.dynasties):
                buckets.setdefault(dyn, []).append(entry.surface)
        elif entry.type == LabelType.ADDRESS:
            addresses.append(entry.surface)
        elif entry.type == LabelType.TIME:
            times.append(entry.surface)

    required = {"P5": (names, addresses, offices),
                "P8": (names, addresses),
                "P9": (names, addresses),
                "P10": (names, nianhaos, offices),
                "CIRCLE": (names,)}
    for template in templates:
        if template not in required:
            raise SynthesisError(f"unknown template {template!r}")
        for bucket in required[template]:
            if not bucket:
                raise SynthesisError(
                    f"template {template} needs a lexicon type the knowledge "
                    f"base does not provide")

    avail = [chr(c) for c in range(_POOL_START, _POOL_START + _POOL_SIZE)
             if chr(c) not in used_chars and chr(c) not in _RESERVED]
    if len(avail) < 70:
        raise SynthesisError("not enough free characters for styles and filler")
    return _Vocab(names=names, offices=offices, nianhaos=nianhaos,
                  addresses=sorted(addresses), times=sorted(times),
                  style_chars=avail[:30], filler_chars=avail[30:70])


def generate_synthetic(kb: KnowledgeBase, templates, n_docs: int,
                       seed: int = 0) -> tuple[Corpus, GoldAnnotations]:
    """Deterministic synthetic documents with full gold annotations.

    The returned gold carries entity spans, office/entry/nianhao/time NE
    spans, paragraph boundaries, and the planted candidate records
    (gold.planted_records).
    """
    templates = tuple(templates)
    vocab = _vocab_from_kb(kb, templates)
    rng = random.Random(seed)
    # each template draws its dynasty from the pool that can fill it
    dyn_names = sorted(vocab.names)
    dyn_office = sorted(set(vocab.names) & set(vocab.offices))
    dyn_nianhao = sorted(set(dyn_office) & set(vocab.nianhaos))
    dynasty_pools = {"P5": dyn_office, "P8": dyn_names, "P9": dyn_names,
                     "P10": dyn_nianhao, "CIRCLE": dyn_names}
    for template in templates:
        if not dynasty_pools[template]:
            raise SynthesisError(
                f"no dynasty has all the lexicon types template {template} "
                f"needs")

    documents = []
    gold = GoldAnnotations()
    for doc_index in range(n_docs):
        doc_id = f"syn-{doc_index:04d}"
        doc_gold = gold.doc(doc_id)
        parts: list[str] = []
        pos = 0

        def emit(text: str) -> int:
            nonlocal pos
            parts.append(text)
            start = pos
            pos += len(text)
            return start

        def filler(lo: int = 2, hi: int = 8) -> None:
            emit("".join(rng.choice(vocab.filler_chars)
                         for _ in range(rng.randint(lo, hi))))
            if vocab.times and rng.random() < 0.12:
                t_start = emit(rng.choice(vocab.times))
                doc_gold.ne_spans.append(
                    NeSpan(t_start, t_start + 2, "time"))
                emit("".join(rng.choice(vocab.filler_chars)
                             for _ in range(rng.randint(1, 4))))

        filler(0, 6)
        for _ in range(rng.randint(8, 14)):
            template = templates[rng.randrange(len(templates))]
            dynasty = rng.choice(dynasty_pools[template])
            name = rng.choice(vocab.names[dynasty])
            if template == "P5":
                style = (rng.choice(vocab.style_chars)
                         + rng.choice(vocab.style_chars))
                addr1 = rng.choice(vocab.addresses)
                addr2 = rng.choice(vocab.addresses)
                office = rng.choice(vocab.offices[dynasty])
                name_start = emit(name)
                emit(STYLE_MARK)
                emit(style)
                a1 = emit(addr1)
                emit(PERSON_SUFFIX)
                a2 = emit(addr2)
                o = emit(office)
                doc_gold.entities.append(
                    EntitySpan(name_start, name_start + len(name), "PERSON"))
                doc_gold.entities.append(EntitySpan(a1, a1 + len(addr1), "LOCATION"))
                doc_gold.entities.append(EntitySpan(a2, a2 + len(addr2), "LOCATION"))
                doc_gold.ne_spans.append(NeSpan(o, o + len(office), "office"))
                doc_gold.boundaries.append(name_start)
                gold.planted_records.append(CandidateRecord(
                    official_name=name, doc_id=doc_id, name_start=name_start,
                    source="P5", dynasty=dynasty, style_name=style))
            elif template == "P8":
                addr = rng.choice(vocab.addresses)
                name_start = emit(name)
                a1 = emit(addr)
                emit(PERSON_SUFFIX)
                doc_gold.entities.append(
                    EntitySpan(name_start, name_start + len(name), "PERSON"))
                doc_gold.entities.append(EntitySpan(a1, a1 + len(addr), "LOCATION"))
                doc_gold.boundaries.append(name_start)
            elif template == "P9":
                addr1 = rng.choice(vocab.addresses)
                addr2 = rng.choice(vocab.addresses)
                name_start = emit(name)
                a1 = emit(addr1)
                a2 = emit(addr2)
                emit(PERSON_SUFFIX)
                doc_gold.entities.append(
                    EntitySpan(name_start, name_start + len(name), "PERSON"))
                doc_gold.entities.append(EntitySpan(a1, a1 + len(addr1), "LOCATION"))
                doc_gold.entities.append(EntitySpan(a2, a2 + len(addr2), "LOCATION"))
                doc_gold.boundaries.append(name_start)
            elif template == "P10":
                nianhao = rng.choice(vocab.nianhaos[dynasty])
                office = rng.choice(vocab.offices[dynasty])
                name_start = emit(name)
                nh = emit(nianhao)
                emit(GAP_CHAR)
                o = emit(office)
                doc_gold.entities.append(
                    EntitySpan(name_start, name_start + len(name), "PERSON"))
                doc_gold.ne_spans.append(NeSpan(nh, nh + len(nianhao), "nianhao"))
                doc_gold.ne_spans.append(NeSpan(o, o + len(office), "office"))
                doc_gold.boundaries.append(name_start)
            elif template == "CIRCLE":
                style = (rng.choice(vocab.style_chars)
                         + rng.choice(vocab.style_chars))
                emit(MARKER)
                name_start = emit(name)
                if rng.random() < 0.5:
                    emit(MARKER)
                emit(STYLE_MARK)
                emit(style)
                doc_gold.entities.append(
                    EntitySpan(name_start, name_start + len(name), "PERSON"))
                doc_gold.boundaries.append(name_start)
                gold.planted_records.append(CandidateRecord(
                    official_name=name, doc_id=doc_id, name_start=name_start,
                    source="P6" if len(name) == 3 else "P7", style_name=style))
            filler()
        documents.append(Document(id=doc_id, chars="".join(parts)))
    return Corpus(documents=documents,
                  source_manifest={d.id: "synthetic" for d in documents}), gold
