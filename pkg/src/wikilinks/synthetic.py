"""Synthetic corpora with planted topical structure.

Documents belong to disjoint topics with private vocabularies plus a
shared filler vocabulary. A document links (``[[Title]]``) only to
same-topic documents and additionally mentions cross-topic titles as
plain text, so a link exists iff the mentioned title and the source
share a topic. The plain mentions become string-matched hard negatives,
which is exactly the regime the anchor-based predictors are built for.

Corpora are emitted as MediaWiki XML exports and run through the
regular ingestion path, so every fixture exercises the full pipeline.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

from .dataset import Dataset
from .graph import DocumentNetwork
from .ingest import build_corpus, parse_dump


@dataclass(frozen=True)
class PlantedCorpusParams:
    topics: int = 10
    docs_per_topic: int = 20
    topic_vocab: int = 30
    filler_vocab: int = 40
    body_tokens: int = 60
    links_per_doc: int = 4
    mentions_per_doc: int = 4
    diffuse_fraction: float = 0.0
    aliases: int = 6
    seed: int = 0

    @property
    def n_docs(self) -> int:
        return self.topics * self.docs_per_topic


def _title(topic: int, index: int, params: PlantedCorpusParams) -> str:
    # First token is globally unique so titles never occur by accident;
    # the second token ties the title to its topic's vocabulary.
    doc_id = topic * params.docs_per_topic + index
    return f"E{doc_id:03d} t{topic}w{index % params.topic_vocab}"


def planted_dump_xml(params: PlantedCorpusParams | None = None) -> str:
    """Render a planted-topic corpus as a pages-articles XML export."""
    params = params or PlantedCorpusParams()
    rng = np.random.default_rng(params.seed)
    pages: list[tuple[str, str]] = []
    redirects: list[tuple[str, str]] = []

    filler = [f"fill{j}" for j in range(params.filler_vocab)]
    for topic in range(params.topics):
        vocab = [f"t{topic}w{j}" for j in range(params.topic_vocab)]
        for index in range(params.docs_per_topic):
            title = _title(topic, index, params)
            # Varying the topic/filler mixture makes plain text similarity
            # noisy, so anchor-aware features have headroom over it.
            # "Diffuse" documents read like filler; their titles are the
            # only strong topic signal, which only anchor features see.
            if rng.random() < params.diffuse_fraction:
                topic_fraction = rng.uniform(0.0, 0.08)
            else:
                topic_fraction = rng.uniform(0.3, 0.9)
            words = []
            for _ in range(params.body_tokens):
                if rng.random() < topic_fraction:
                    words.append(vocab[rng.integers(len(vocab))])
                else:
                    words.append(filler[rng.integers(len(filler))])
            sentences = [f"{title} covers {' '.join(words)}."]

            others = [i for i in range(params.docs_per_topic) if i != index]
            rng.shuffle(others)
            n_links = min(params.links_per_doc, len(others))
            for other in others[:n_links]:
                sentences.append(f"It builds on [[{_title(topic, other, params)}]].")

            for _ in range(params.mentions_per_doc):
                other_topic = int(rng.integers(params.topics - 1))
                if other_topic >= topic:
                    other_topic += 1
                other_index = int(rng.integers(params.docs_per_topic))
                mention = _title(other_topic, other_index, params)
                sentences.append(f"Unrelated debates cite {mention} in passing.")
            pages.append((title, " ".join(sentences)))

    for alias_index in range(params.aliases):
        topic = int(rng.integers(params.topics))
        index = int(rng.integers(params.docs_per_topic))
        target = _title(topic, index, params)
        redirects.append((f"Alias {alias_index} redirect", target))

    parts = ['<mediawiki xmlns="http://www.mediawiki.org/xml/export-0.10/">']
    parts.append("<siteinfo><sitename>planted</sitename></siteinfo>")
    for page_id, (title, text) in enumerate(pages, start=1):
        parts.append(
            "<page>"
            f"<title>{escape(title)}</title><ns>0</ns><id>{page_id}</id>"
            f"<revision><id>{page_id}</id><text>{escape(text)}</text></revision>"
            "</page>"
        )
    for offset, (title, target) in enumerate(redirects, start=len(pages) + 1):
        parts.append(
            "<page>"
            f"<title>{escape(title)}</title><ns>0</ns><id>{offset}</id>"
            f'<redirect title="{escape(target)}" />'
            f"<revision><id>{offset}</id><text>#REDIRECT [[{escape(target)}]]</text>"
            "</revision></page>"
        )
    parts.append("</mediawiki>")
    return "".join(parts)


def planted_dataset(
    params: PlantedCorpusParams | None = None, name: str = "planted"
) -> Dataset:
    """Build a planted-topic dataset through the full ingestion pipeline."""
    params = params or PlantedCorpusParams()
    xml = planted_dump_xml(params).encode("utf-8")
    articles, links = build_corpus(parse_dump(io.BytesIO(xml)))
    network = DocumentNetwork.from_links(len(articles), links)
    return Dataset(name=name, articles=articles, network=network)
