import pytest

from gazmine.corpus import Corpus, Document
from gazmine.kb import KBEntry, KnowledgeBase, LabelType, PersonRecord

T1 = "陳瑜字仲庸雷州人廣西中書省都事"


@pytest.fixture
def worked_kb() -> KnowledgeBase:
    """The lexicon quoted in the running example: one name known across
    three dynasties, two addresses, and office titles whose availability
    differs between Yuan and Ming."""
    entries = [
        KBEntry("陳瑜", LabelType.NAME, frozenset({"Yuan", "Ming", "Qing"})),
        KBEntry("雷州", LabelType.ADDRESS),
        KBEntry("廣西", LabelType.ADDRESS),
        KBEntry("中書省都事", LabelType.OFFICE, frozenset({"Yuan"})),
        KBEntry("中書省", LabelType.OFFICE, frozenset({"Yuan"})),
        KBEntry("中書", LabelType.OFFICE, frozenset({"Ming"})),
        KBEntry("都事", LabelType.OFFICE, frozenset({"Ming"})),
    ]
    persons = [
        PersonRecord("陳瑜", dynasty="Yuan"),
        PersonRecord("陳瑜", dynasty="Ming"),
    ]
    return KnowledgeBase(entries, persons)


@pytest.fixture
def t1_doc() -> Document:
    return Document(id="t1", chars=T1)


@pytest.fixture
def t1_corpus(t1_doc) -> Corpus:
    return Corpus(documents=[t1_doc], source_manifest={"t1": "fixture"})
