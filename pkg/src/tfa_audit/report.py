"""Aggregate per-page assignments and affect profiles into report tables.

Four table families are produced:

* corpus statistics (per-domain mean words and page counts),
* per-category coverage / emotion / readability tables (one per taxonomy),
* top co-occurring (primary, subcategory) pairs,
* example domains per support category.

All aggregation is a pure function of the persisted records, and rendering
is a pure function of the aggregates, so identical inputs produce
byte-identical CSV/Markdown/JSON files.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from urllib.parse import urlsplit

from .taxonomy import Taxonomy
from .urls import registrable_domain

# Emotion column order used by the category tables (presentation order,
# distinct from the alphabetical canonical order in affect.py).
EMOTION_COLUMNS = ("neutral", "joy", "fear", "sadness", "anger", "surprise", "disgust")

TAXONOMY_ORDER = ("types", "prevention", "detection", "support")

NO_DATA = "--"


class ReportError(Exception):
    """Aggregation preconditions violated (e.g. empty corpus denominator)."""


# ---------------------------------------------------------------------------
# aggregate types


@dataclass(frozen=True)
class CorpusStats:
    rows: tuple  # of (domain, mean_words, page_count)
    total_mean: float
    total_count: int


@dataclass
class CategoryRow:
    taxonomy: str
    category_id: str
    label: str
    page_count: int
    share: float | None = None
    emotion_tenths: dict | None = None  # emotion -> integer tenths of a percent
    affect_missing: int = 0
    affect_count: int = 0
    flesch: float | None = None
    ari: float | None = None
    accessibility: float | None = None


@dataclass(frozen=True)
class CooccurrenceRow:
    taxonomy: str
    primary_id: str
    primary_label: str
    sub_id: str
    sub_label: str
    page_count: int


@dataclass(frozen=True)
class SupportExamples:
    category_id: str
    label: str
    domains: tuple


@dataclass
class ReportBundle:
    corpus: CorpusStats
    category_tables: dict  # taxonomy name -> list[CategoryRow]
    cooccurrence: list  # of CooccurrenceRow
    support_examples: list  # of SupportExamples
    metadata: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# helpers


def domain_of(url: str) -> str:
    host = urlsplit(url).hostname or ""
    return registrable_domain(host)


def percent_tenths(counts: list) -> list:
    """Share of each count in integer tenths of a percent, summing to 1000.

    Largest-remainder apportionment: exact shares are floored to tenths and
    the leftover tenths go to the largest fractional remainders (earlier
    columns win ties), so the rendered percentages always total 100.0.
    """
    total = sum(counts)
    if total <= 0:
        raise ReportError("cannot distribute percentages over zero pages")
    exact = [Fraction(1000 * c, total) for c in counts]
    floors = [int(x) for x in exact]
    shortfall = 1000 - sum(floors)
    by_remainder = sorted(range(len(counts)), key=lambda i: (floors[i] - exact[i], i))
    for i in by_remainder[:shortfall]:
        floors[i] += 1
    return floors


def render_share(page_count: int, share: float) -> str:
    if page_count == 0:
        return NO_DATA
    if share < 1.0:
        return "<1"
    return str(int(math.floor(share + 0.5)))


def _fmt1(value: float) -> str:
    return f"{value:.1f}"


def _fmt2(value) -> str:
    return NO_DATA if value is None else f"{value:.2f}"


# ---------------------------------------------------------------------------
# aggregation operations


def corpus_stats(pages: list) -> CorpusStats:
    """Per-domain mean words and page counts over kept pages.

    Rows sort by page count descending (domain name breaks ties); the
    page-weighted overall mean and total count form the trailing row.
    """
    words_by_domain: dict = {}
    counts_by_domain: dict = {}
    for page in pages:
        domain = domain_of(page["url"])
        words_by_domain[domain] = words_by_domain.get(domain, 0) + page["word_count"]
        counts_by_domain[domain] = counts_by_domain.get(domain, 0) + 1
    rows = tuple(
        (domain, round(words_by_domain[domain] / counts_by_domain[domain], 1), counts_by_domain[domain])
        for domain in sorted(counts_by_domain, key=lambda d: (-counts_by_domain[d], d))
    )
    total_count = sum(counts_by_domain.values())
    total_words = sum(words_by_domain.values())
    total_mean = round(total_words / total_count, 1) if total_count else 0.0
    return CorpusStats(rows=rows, total_mean=total_mean, total_count=total_count)


def _members_by_category(assignments: list) -> dict:
    """Map primary category id -> list of member page urls (labeled pages)."""
    members: dict = {}
    for record in assignments:
        for entry in record.get("primaries", []):
            members.setdefault(entry["id"], []).append(record["url"])
    return members


def category_coverage(assignments: list, kept_page_count: int, taxonomy: Taxonomy) -> dict:
    """Corpus share per primary category: 100 * members / kept pages.

    Multi-label pages count once per category they carry, so the shares
    are not constrained to total 100.
    """
    if kept_page_count <= 0:
        raise ReportError("kept_page_count must be positive to compute coverage")
    members = _members_by_category(assignments)
    return {
        pid: (len(members.get(pid, [])), 100.0 * len(members.get(pid, [])) / kept_page_count)
        for pid in taxonomy.primary_ids()
    }


def emotion_distribution(member_urls: list, affect_by_url: dict) -> tuple:
    """(tenths per emotion, covered count, missing count) for one category.

    Pages without an affect record are tallied separately and excluded
    from the percentages.
    """
    dominant_counts = {label: 0 for label in EMOTION_COLUMNS}
    covered = 0
    missing = 0
    for url in member_urls:
        record = affect_by_url.get(url)
        if record is None:
            missing += 1
            continue
        dominant_counts[record["dominant"]] += 1
        covered += 1
    if covered == 0:
        return None, 0, missing
    tenths = percent_tenths([dominant_counts[label] for label in EMOTION_COLUMNS])
    return dict(zip(EMOTION_COLUMNS, tenths)), covered, missing


def readability_by_category(member_urls: list, affect_by_url: dict) -> tuple:
    """Unweighted means of flesch/ari/accessibility over covered members."""
    totals = {"flesch": 0.0, "ari": 0.0, "accessibility": 0.0}
    covered = 0
    for url in member_urls:
        record = affect_by_url.get(url)
        if record is None:
            continue
        for key in totals:
            totals[key] += record[key]
        covered += 1
    if covered == 0:
        return None, None, None
    return tuple(round(totals[key] / covered, 2) for key in ("flesch", "ari", "accessibility"))


def category_table(
    assignments: list,
    affect_by_url: dict,
    kept_page_count: int,
    taxonomy: Taxonomy,
) -> list:
    """One CategoryRow per primary category, in taxonomy definition order."""
    coverage = category_coverage(assignments, kept_page_count, taxonomy)
    members = _members_by_category(assignments)
    rows = []
    for node in taxonomy.roots:
        urls = members.get(node.id, [])
        count, share = coverage[node.id]
        row = CategoryRow(
            taxonomy=taxonomy.name,
            category_id=node.id,
            label=node.label,
            page_count=count,
            share=share if count else None,
        )
        if count:
            row.emotion_tenths, row.affect_count, row.affect_missing = emotion_distribution(
                urls, affect_by_url
            )
            row.flesch, row.ari, row.accessibility = readability_by_category(
                urls, affect_by_url
            )
        rows.append(row)
    return rows


def top_cooccurrence(assignments: list, taxonomy: Taxonomy, k: int = 3) -> list:
    """The k (primary, sub) pairs with most member pages, for one taxonomy.

    Sorted by count descending; ties fall back to (primary id, sub id).
    """
    labels = {node.id: node.label for node in taxonomy.roots}
    sub_labels = {}
    pair_counts: dict = {}
    for node in taxonomy.roots:
        for child in node.children:
            sub_labels[(node.id, child.id)] = child.label
    for record in assignments:
        pairs = {(s["primary"], s["sub"]) for s in record.get("subs", [])}
        for pair in pairs:
            pair_counts[pair] = pair_counts.get(pair, 0) + 1
    ordered = sorted(pair_counts.items(), key=lambda item: (-item[1], item[0]))
    return [
        CooccurrenceRow(
            taxonomy=taxonomy.name,
            primary_id=primary,
            primary_label=labels.get(primary, primary),
            sub_id=sub,
            sub_label=sub_labels.get((primary, sub), sub),
            page_count=count,
        )
        for (primary, sub), count in ordered[:k]
    ]


def example_domains(assignments: list, taxonomy: Taxonomy, k: int = 3) -> list:
    """Top-k domains by member-page count for each support category."""
    members = _members_by_category(assignments)
    results = []
    for node in taxonomy.roots:
        domain_counts: dict = {}
        for url in members.get(node.id, []):
            domain = domain_of(url)
            domain_counts[domain] = domain_counts.get(domain, 0) + 1
        top = sorted(domain_counts.items(), key=lambda item: (-item[1], item[0]))[:k]
        results.append(
            SupportExamples(
                category_id=node.id,
                label=node.label,
                domains=tuple(domain for domain, _ in top),
            )
        )
    return results


def compute_reports(
    kept_pages: list,
    assignments_by_taxonomy: dict,
    affect_records: list,
    taxonomies: dict,
    cooccurrence_k: int = 3,
    example_domains_k: int = 3,
) -> ReportBundle:
    """Build every table from persisted record dicts.

    ``assignments_by_taxonomy`` maps taxonomy name -> assignment records;
    ``taxonomies`` maps taxonomy name -> Taxonomy. Support examples are
    computed for the taxonomy named "support" when present.
    """
    affect_by_url = {record["url"]: record for record in affect_records}
    kept_count = len(kept_pages)

    category_tables = {}
    cooccurrence = []
    status_summary = {}
    for name in TAXONOMY_ORDER:
        if name not in taxonomies:
            continue
        taxonomy = taxonomies[name]
        assignments = assignments_by_taxonomy.get(name, [])
        category_tables[name] = category_table(
            assignments, affect_by_url, kept_count, taxonomy
        )
        cooccurrence.extend(top_cooccurrence(assignments, taxonomy, cooccurrence_k))
        unlabeled = sum(1 for r in assignments if r.get("status") == "unlabeled")
        failed = sum(1 for r in assignments if r.get("status") == "classification_failed")
        status_summary[name] = {
            "unlabeled": unlabeled,
            "unlabeled_share": round(100.0 * unlabeled / kept_count, 1) if kept_count else 0.0,
            "classification_failed": failed,
        }

    support_rows = []
    if "support" in taxonomies:
        support_rows = example_domains(
            assignments_by_taxonomy.get("support", []), taxonomies["support"], example_domains_k
        )

    metadata = {
        "kept_page_count": kept_count,
        "share_denominator": "all kept pages (including unlabeled)",
        "classification_status": status_summary,
        "affect_missing": {
            name: sum(row.affect_missing for row in rows)
            for name, rows in category_tables.items()
        },
    }
    return ReportBundle(
        corpus=corpus_stats(kept_pages),
        category_tables=category_tables,
        cooccurrence=cooccurrence,
        support_examples=support_rows,
        metadata=metadata,
    )


# ---------------------------------------------------------------------------
# rendering

CATEGORY_HEADER = (
    ["Category", "Corpus (%)"]
    + [label.capitalize() for label in EMOTION_COLUMNS]
    + ["Flesch", "ARI", "Accessibility"]
)
CORPUS_HEADER = ["Domain", "Average Words per Page", "Pages"]
COOCCURRENCE_HEADER = ["Taxonomy", "Category", "Subcategory", "Pages"]
SUPPORT_HEADER = ["Category", "Example Domains"]


def _category_cells(row: CategoryRow) -> list:
    share = render_share(row.page_count, row.share or 0.0)
    if row.page_count == 0 or row.emotion_tenths is None:
        emotions = [NO_DATA] * len(EMOTION_COLUMNS)
    else:
        emotions = [_fmt1(row.emotion_tenths[label] / 10) for label in EMOTION_COLUMNS]
    return (
        [row.label, share]
        + emotions
        + [_fmt2(row.flesch), _fmt2(row.ari), _fmt2(row.accessibility)]
    )


def _corpus_rows(stats: CorpusStats) -> list:
    rows = [[domain, _fmt1(mean), str(count)] for domain, mean, count in stats.rows]
    rows.append(["Total", _fmt1(stats.total_mean), str(stats.total_count)])
    return rows


def _write_csv(path: Path, header: list, rows: list) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def render_csv(bundle: ReportBundle, out_dir: Path) -> list:
    written = []
    for name, rows in bundle.category_tables.items():
        path = out_dir / f"report_{name}.csv"
        _write_csv(path, CATEGORY_HEADER, [_category_cells(row) for row in rows])
        written.append(path)

    path = out_dir / "corpus_stats.csv"
    _write_csv(path, CORPUS_HEADER, _corpus_rows(bundle.corpus))
    written.append(path)

    path = out_dir / "cooccurrence.csv"
    _write_csv(
        path,
        COOCCURRENCE_HEADER,
        [
            [row.taxonomy, row.primary_label, row.sub_label, str(row.page_count)]
            for row in bundle.cooccurrence
        ],
    )
    written.append(path)

    path = out_dir / "support_examples.csv"
    _write_csv(
        path,
        SUPPORT_HEADER,
        [[row.label, "; ".join(row.domains)] for row in bundle.support_examples],
    )
    written.append(path)
    return written


def _markdown_table(header: list, rows: list) -> str:
    lines = ["| " + " | ".join(header) + " |"]
    lines.append("|" + "|".join([" --- "] * len(header)) + "|")
    for row in rows:
        lines.append("| " + " | ".join(row) + " |")
    return "\n".join(lines)


def render_markdown(bundle: ReportBundle, out_dir: Path) -> Path:
    sections = ["# Audit report", ""]
    sections.append("## Corpus statistics")
    sections.append("")
    sections.append(_markdown_table(CORPUS_HEADER, _corpus_rows(bundle.corpus)))
    sections.append("")
    for name, rows in bundle.category_tables.items():
        sections.append(f"## Category profile: {name}")
        sections.append("")
        sections.append(
            _markdown_table(CATEGORY_HEADER, [_category_cells(row) for row in rows])
        )
        sections.append("")
    sections.append("## Top co-occurring category pairs")
    sections.append("")
    sections.append(
        _markdown_table(
            COOCCURRENCE_HEADER,
            [
                [row.taxonomy, row.primary_label, row.sub_label, str(row.page_count)]
                for row in bundle.cooccurrence
            ],
        )
    )
    sections.append("")
    sections.append("## Example support domains")
    sections.append("")
    sections.append(
        _markdown_table(
            SUPPORT_HEADER,
            [[row.label, "; ".join(row.domains)] for row in bundle.support_examples],
        )
    )
    sections.append("")
    sections.append("## Notes")
    sections.append("")
    sections.append(
        f"- Corpus shares use {bundle.metadata['share_denominator']} as denominator "
        f"({bundle.metadata['kept_page_count']} pages)."
    )
    for name, status in bundle.metadata.get("classification_status", {}).items():
        sections.append(
            f"- {name}: {status['unlabeled']} unlabeled pages "
            f"({status['unlabeled_share']}%), "
            f"{status['classification_failed']} classification failures."
        )
    sections.append("")
    path = out_dir / "report.md"
    path.write_text("\n".join(sections), encoding="utf-8")
    return path


def render_json(bundle: ReportBundle, out_dir: Path) -> Path:
    payload = {
        "metadata": bundle.metadata,
        "corpus_stats": {
            "rows": [
                {"domain": domain, "avg_words": mean, "pages": count}
                for domain, mean, count in bundle.corpus.rows
            ],
            "total": {"avg_words": bundle.corpus.total_mean, "pages": bundle.corpus.total_count},
        },
        "categories": {
            name: [
                {
                    "id": row.category_id,
                    "label": row.label,
                    "pages": row.page_count,
                    "share": None if row.share is None else round(row.share, 4),
                    "share_rendered": render_share(row.page_count, row.share or 0.0),
                    "emotions": (
                        None
                        if row.emotion_tenths is None
                        else {k: v / 10 for k, v in row.emotion_tenths.items()}
                    ),
                    "affect_missing": row.affect_missing,
                    "flesch": row.flesch,
                    "ari": row.ari,
                    "accessibility": row.accessibility,
                }
                for row in rows
            ]
            for name, rows in bundle.category_tables.items()
        },
        "cooccurrence": [
            {
                "taxonomy": row.taxonomy,
                "primary": row.primary_id,
                "sub": row.sub_id,
                "pages": row.page_count,
            }
            for row in bundle.cooccurrence
        ],
        "support_examples": [
            {"id": row.category_id, "label": row.label, "domains": list(row.domains)}
            for row in bundle.support_examples
        ],
    }
    path = out_dir / "report.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, ensure_ascii=False)
        fh.write("\n")
    return path


def render(bundle: ReportBundle, out_dir: str | Path, formats=("csv", "json", "markdown")) -> list:
    """Write the requested formats; returns every path written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if "csv" in formats:
        written.extend(render_csv(bundle, out))
    if "json" in formats:
        written.append(render_json(bundle, out))
    if "markdown" in formats:
        written.append(render_markdown(bundle, out))
    return written
