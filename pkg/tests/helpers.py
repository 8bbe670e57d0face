"""Builders for synthetic pages and corpora used across the tests."""

import html
import json
import random
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

GIVEN = ["Ana", "Bruno", "Carla", "David", "Elena", "Filipe", "Gina", "Hugo", "Ines", "Joao"]
LAST = ["Silva", "Santos", "Costa", "Pereira", "Almeida", "Rocha", "Moura", "Lopes", "Walker", "Zhou"]


def search_entry(profile_id: str, name: str, domain: Optional[str]) -> str:
    email = f'\n    <div class="gs_ai_eml">Verified email at {domain}</div>' if domain else ""
    return (
        f'  <li class="gsc_1usr" data-profile-id="{profile_id}">\n'
        f'    <h3 class="gs_ai_name">{html.escape(name)}</h3>{email}\n'
        f'  </li>\n'
    )


def search_page(entries: Iterable[Tuple[str, str, Optional[str]]]) -> str:
    """Author-search page from (profile_id, name, domain) triples."""
    body = "".join(search_entry(*e) for e in entries)
    return f"<html><body>\n<ol>\n{body}</ol>\n</body></html>\n"


def publication_row(pub: Dict[str, Any]) -> str:
    cited = pub.get("cited_by", pub.get("citation_count", 0))
    year = pub.get("year")
    return (
        f'  <tr class="gsc_a_tr" data-pub-id="{pub["pub_id"]}">\n'
        f'    <td><a class="gsc_a_at">{html.escape(pub["title"])}</a>'
        f'<div class="gs_gray">{html.escape(", ".join(pub["authors"]))}</div></td>\n'
        f'    <td><a class="gsc_a_ac">{cited}</a></td>\n'
        f'    <td><span class="gsc_a_h">{"" if year is None else year}</span></td>\n'
        f'  </tr>\n'
    )


def profile_page(profile_id: str, name: str, domain: Optional[str],
                 publications: Sequence[Dict[str, Any]], empty_marker: bool = False) -> str:
    email = f'  <div id="gsc_prf_ivh">Verified email at {domain}</div>\n' if domain else ""
    rows = "".join(publication_row(p) for p in publications)
    if empty_marker:
        rows += '  <tr class="gsc_a_e"><td>There are no articles in this profile.</td></tr>\n'
    return (
        f'<html><body>\n<div id="gsc_prf" data-profile-id="{profile_id}">\n'
        f'  <div id="gsc_prf_in">{html.escape(name)}</div>\n{email}</div>\n'
        f'<table>\n{rows}</table>\n</body></html>\n'
    )


def profile_page_from_corpus(profile: Dict[str, Any]) -> str:
    return profile_page(profile["profile_id"], profile["display_name"], profile["email_domain"],
                        profile["publications"], empty_marker=not profile["publications"])


def pub(pub_id: str, authors: Sequence[str], citation_count: int = 0,
        citing: Optional[Sequence[str]] = None, year: Optional[int] = 2010,
        title: Optional[str] = None) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        "pub_id": pub_id,
        "title": title or f"Paper {pub_id}",
        "year": year,
        "authors": list(authors),
        "citation_count": citation_count if citing is None else len(citing),
    }
    if citing is not None:
        data["citing_pub_ids"] = list(citing)
    return data


def profile(profile_id: str, domain: str, rank: int, publications: Sequence[Dict[str, Any]] = (),
            name: Optional[str] = None) -> Dict[str, Any]:
    return {
        "profile_id": profile_id,
        "display_name": name or f"Researcher {profile_id}",
        "email_domain": domain,
        "search_rank": rank,
        "publications": list(publications),
    }


def corpus_doc(profiles: Sequence[Dict[str, Any]], pool: Sequence[Dict[str, Any]] = ()) -> Dict[str, Any]:
    data: Dict[str, Any] = {"generated_at": "2013-06-01T00:00:00+00:00", "profiles": list(profiles)}
    if pool:
        data["publications"] = list(pool)
    return data


def corpus_text(profiles: Sequence[Dict[str, Any]], pool: Sequence[Dict[str, Any]] = ()) -> str:
    return json.dumps(corpus_doc(profiles, pool), indent=2)


def random_corpus(rng: random.Random, n_profiles: int = 6, max_edges: int = 200,
                  suffix: str = "edu") -> Dict[str, Any]:
    """A corpus with full citation edges whose total edge count stays within ``max_edges``.

    Owners get distinct (last name, initial) pairs; co-authors and citing
    authors are drawn from the same name pool so self-citations occur.
    """
    names = [f"{g} {l}" for l in LAST for g in GIVEN]
    rng.shuffle(names)
    pool = [pub(f"c{i}", rng.sample(names[:25], rng.randint(1, 3)), citing=[])
            for i in range(rng.randint(5, 40))]
    pool_ids = [p["pub_id"] for p in pool]

    edges_left = max_edges
    profiles = []
    for i in range(n_profiles):
        owner = names[i]
        pubs = []
        for j in range(rng.randint(0, 5)):
            authors = [owner] + rng.sample(names[:25], rng.randint(0, 2))
            count = min(rng.randint(0, len(pool_ids)), edges_left)
            edges_left -= count
            pubs.append(pub(f"p{i}-{j}", list(dict.fromkeys(authors)), citing=rng.sample(pool_ids, count)))
        profiles.append(profile(f"r{i}", f"u{i}.{suffix}", i + 1, pubs, name=owner))
    return corpus_doc(profiles, pool)


def oracle_key(name: str) -> str:
    """Match key for plain 'Given Last' names, written independently of the normalizer."""
    tokens = ["".join(ch for ch in t if ch.isalpha()).lower() for t in name.split()]
    tokens = [t for t in tokens if t]
    return f"{tokens[-1]} {tokens[0][0]}"


def oracle_team_rows(doc: Dict[str, Any], suffixes: Sequence[Tuple[str, str]], k: int) -> List[Dict[str, Any]]:
    """Flat recomputation of the five columns straight from a corpus document."""
    pubs = {}
    for p in doc["profiles"]:
        for x in p["publications"]:
            pubs[x["pub_id"]] = x
    for x in doc.get("publications", []):
        pubs[x["pub_id"]] = x

    rows = []
    ranked = sorted(doc["profiles"], key=lambda p: p["search_rank"])
    for suffix, label in suffixes:
        members = [p for p in ranked
                   if p["email_domain"] == suffix or p["email_domain"].endswith("." + suffix)][:k]
        pooled = {}
        for m in members:
            for x in m["publications"]:
                pooled.setdefault(x["pub_id"], x)
        citations = sum(x["citation_count"] for x in pooled.values())
        self_citations = 0
        for cited in pooled.values():
            cited_keys = {oracle_key(a) for a in cited["authors"]}
            for cid in cited["citing_pub_ids"]:
                if any(oracle_key(a) in cited_keys for a in pubs[cid]["authors"]):
                    self_citations += 1
        counts = sorted((x["citation_count"] for x in pooled.values()), reverse=True)
        h = max([0] + [i for i in range(1, len(counts) + 1) if counts[i - 1] >= i])
        rows.append({
            "label": label,
            "members": len(members),
            "citable_documents": len(pooled),
            "citations": citations,
            "self_citations": self_citations,
            "h_index": h,
        })
    return rows
