"""Command-line orchestration of the audit pipeline.

Stages run in a fixed order (crawl, extract, classify, affect, report) over
one run directory. A stage whose completion flag is already set is skipped,
so killing a run and re-invoking it resumes where it left off; a stage that
was interrupted mid-flight rebuilds its outputs from scratch. Summaries are
printed as JSON and the exit status is 0 exactly when no hard error occurred.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time

from . import affect, classify, crawler, report
from .config import (
    ConfigError,
    PipelineConfig,
    load_config,
    validate_config,
)
from .extract import apply_filters, clean_page
from .store import STAGE_ORDER, RunStore, StoreError
from .taxonomy import load_all_shipped, load_taxonomy_dir

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_HARD_ERROR = 1
EXIT_USAGE = 2

SUPPORTED_PAGE_MIMES = set(crawler.SUPPORTED_MIMES)


class StageError(Exception):
    """A stage could not run (ordering violation, missing inputs)."""


# ---------------------------------------------------------------------------
# backend wiring


def _zeroshot_backend(cfg: PipelineConfig) -> classify.ClassifierBackend:
    if cfg.zeroshot_backend == "mock":
        return classify.MockBackend()
    if cfg.zeroshot_backend == "lexical":
        return classify.builtin_lexical_backend()
    return classify.http_backend(cfg.endpoint)


def _emotion_backend(cfg: PipelineConfig) -> affect.EmotionBackend:
    if cfg.emotion_backend == "mock":
        return affect.MockEmotionBackend()
    return affect.HttpEmotionBackend(cfg.endpoint)


def _taxonomies(cfg: PipelineConfig) -> dict:
    if cfg.taxonomy_dir:
        return load_taxonomy_dir(cfg.taxonomy_dir)
    return load_all_shipped()


# ---------------------------------------------------------------------------
# stages


def _require_stages(store: RunStore, stage: str, *needed: str) -> None:
    for name in needed:
        if not store.stage_complete(name):
            raise StageError(
                f"stage {stage!r} requires completed stage {name!r}; run it first"
            )


def stage_crawl(cfg: PipelineConfig, store: RunStore) -> dict:
    if not cfg.seeds:
        raise StageError("crawl needs a seed list (--seeds or config)")
    entries = crawler.parse_seed_file(cfg.seeds)
    if not entries:
        raise StageError(f"seed list {cfg.seeds} contains no seeds")

    store.truncate_stage("fetches")
    errors_path = store.run_dir / "errors.jsonl"
    if errors_path.exists():
        errors_path.unlink()

    def sink(record: crawler.FetchRecord) -> None:
        body_hash = store.put_raw(record.body) if record.body is not None else None
        store.append_records("fetches", [record.row(body_hash)])

    cfg_by_seed = {
        seed: crawler.CrawlConfig(
            max_depth=cfg.max_depth,
            scope=scope,
            delay_ms=cfg.delay_ms,
            time_budget_s=cfg.time_budget_s,
            max_pages=cfg.max_pages,
            fetcher=cfg.fetcher,
            render_endpoint=cfg.render_endpoint,
            obey_robots=cfg.obey_robots,
        )
        for seed, scope in entries
    }
    summaries = crawler.crawl_many(
        [seed for seed, _ in entries],
        cfg_by_seed,
        sink,
        error_sink=crawler.write_error_log(errors_path),
        max_workers=cfg.max_workers,
    )
    store.mark_stage_complete("crawl")
    return {
        "seeds": [summary.to_dict() for _, summary in sorted(summaries.items())],
        "fetched": sum(s.fetched for s in summaries.values()),
        "discarded": sum(s.discarded for s in summaries.values()),
        "fetch_errors": sum(len(s.errors) for s in summaries.values()),
    }


def _ordered_fetch_rows(store: RunStore) -> list:
    """Fetch rows sorted by URL.

    Concurrent seeds interleave their rows nondeterministically; the URL
    sort makes extraction (and thus duplicate resolution) independent of
    that interleaving.
    """
    return sorted(store.read_records("fetches"), key=lambda row: row["url"])


def stage_extract(cfg: PipelineConfig, store: RunStore) -> dict:
    _require_stages(store, "extract", "crawl")
    store.truncate_stage("pages")

    seen_keys: set = set()
    kept = dropped = 0
    drop_reasons: dict = {}
    for row in _ordered_fetch_rows(store):
        if row["status"] != 200 or not row["hash"] or row["mime"] not in SUPPORTED_PAGE_MIMES:
            continue
        html = store.get_raw(row["hash"])
        page = clean_page(row["url"], html)
        page = apply_filters(page, cfg.min_words, seen_keys)
        if page.kept:
            kept += 1
        else:
            dropped += 1
            drop_reasons[page.drop_reason] = drop_reasons.get(page.drop_reason, 0) + 1
        store.append_records(
            "pages",
            [
                {
                    "url": page.url,
                    "text": page.text,
                    "word_count": page.word_count,
                    "lang": page.language.code,
                    "verdict": page.verdict,
                    "drop_reason": page.drop_reason,
                    "dedup_key": page.dedup_key,
                    "source_hash": row["hash"],
                    "paragraph_spans": [list(span) for span in page.paragraph_spans],
                    "used_fallback": page.used_fallback,
                }
            ],
        )
    store.mark_stage_complete("extract")
    return {"kept": kept, "dropped": dropped, "drop_reasons": dict(sorted(drop_reasons.items()))}


def _kept_pages(store: RunStore) -> list:
    return [row for row in store.read_records("pages") if row["verdict"] == "kept"]


def stage_classify(cfg: PipelineConfig, store: RunStore) -> dict:
    _require_stages(store, "classify", "crawl", "extract")
    backend = _zeroshot_backend(cfg)
    taxonomies = _taxonomies(cfg)
    pages = [(row["url"], row["text"]) for row in _kept_pages(store)]
    text_by_url = dict(pages)
    classify_cfg = classify.ClassificationConfig(
        threshold=cfg.threshold, min_group=cfg.min_group
    )

    summary: dict = {"backend_id": backend.backend_id, "taxonomies": {}}
    for name, taxonomy in taxonomies.items():
        stage_name = store.assignments_stage(name)
        store.truncate_stage(stage_name)
        assignments = classify.classify_primary(pages, taxonomy, backend, classify_cfg)
        classify.classify_sub(assignments, text_by_url, taxonomy, backend, classify_cfg)
        store.append_records(
            stage_name,
            [a.to_record(backend.backend_id, classify_cfg) for a in assignments],
        )
        summary["taxonomies"][name] = {
            "labeled": sum(1 for a in assignments if a.status == classify.STATUS_LABELED),
            "unlabeled": sum(1 for a in assignments if a.status == classify.STATUS_UNLABELED),
            "failed": sum(1 for a in assignments if a.status == classify.STATUS_FAILED),
        }
        store.manifest.taxonomy_versions[name] = taxonomy.version
    store.manifest.backend_ids["zeroshot"] = backend.backend_id
    store.mark_stage_complete("classify")
    return summary


def stage_affect(cfg: PipelineConfig, store: RunStore) -> dict:
    _require_stages(store, "affect", "crawl", "extract")
    backend = _emotion_backend(cfg)
    store.truncate_stage("affect")
    profiled = failed = 0
    for row in _kept_pages(store):
        try:
            record = affect.affect_record(row["url"], row["text"], backend)
        except (affect.AffectError, ValueError) as exc:
            log.warning("affect profiling failed for %s: %s", row["url"], exc)
            failed += 1
            continue
        store.append_records("affect", [record])
        profiled += 1
    store.manifest.backend_ids["emotion"] = backend.backend_id
    store.mark_stage_complete("affect")
    return {"backend_id": backend.backend_id, "profiled": profiled, "failed": failed}


def stage_report(cfg: PipelineConfig, store: RunStore) -> dict:
    _require_stages(store, "report", "crawl", "extract", "classify", "affect")
    taxonomies = _taxonomies(cfg)
    kept = _kept_pages(store)
    if not kept:
        raise StageError("no kept pages; nothing to report")
    assignments_by_taxonomy = {
        name: list(store.read_records(store.assignments_stage(name)))
        for name in taxonomies
    }
    bundle = report.compute_reports(
        kept,
        assignments_by_taxonomy,
        list(store.read_records("affect")),
        taxonomies,
        cooccurrence_k=cfg.cooccurrence_k,
        example_domains_k=cfg.example_domains_k,
    )
    formats = ("csv", "json", "markdown") if cfg.format == "all" else (cfg.format,)
    written = report.render(bundle, store.reports_dir, formats=formats)
    store.mark_stage_complete("report")
    return {
        "files": [str(p.relative_to(store.run_dir)) for p in written],
        "kept_pages": bundle.metadata["kept_page_count"],
    }


_STAGE_FUNCS = {
    "crawl": stage_crawl,
    "extract": stage_extract,
    "classify": stage_classify,
    "affect": stage_affect,
    "report": stage_report,
}


def run(stage: str, cfg: PipelineConfig) -> tuple:
    """Run one stage (or "all"); returns (exit_code, summary dict)."""
    store = RunStore(cfg.out)
    store.manifest.config = cfg.snapshot()
    store.save_manifest()

    names = list(STAGE_ORDER) if stage == "all" else [stage]
    summary = {"run_id": store.manifest.run_id, "out": str(store.run_dir), "stages": {}}
    hard_errors = []
    for name in names:
        if store.stage_complete(name):
            summary["stages"][name] = {"skipped": "already complete"}
            continue
        started = time.monotonic()
        try:
            stage_summary = _STAGE_FUNCS[name](cfg, store)
        except (StageError, StoreError) as exc:
            hard_errors.append(f"{name}: {exc}")
            summary["stages"][name] = {"error": str(exc)}
            break
        stage_summary["duration_s"] = round(time.monotonic() - started, 3)
        summary["stages"][name] = stage_summary
    summary["hard_errors"] = hard_errors
    return (EXIT_OK if not hard_errors else EXIT_HARD_ERROR), summary


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tfa-audit",
        description="Audit institutional websites against technology-facilitated "
        "abuse taxonomies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_parser = sub.add_parser("run", help="run the pipeline or one stage")
    run_parser.add_argument("--config", help="TOML config file")
    run_parser.add_argument(
        "--stage",
        choices=list(STAGE_ORDER) + ["all"],
        default="all",
        help="pipeline stage to run (default: all)",
    )
    run_parser.add_argument("--max-depth", type=int, dest="max_depth")
    run_parser.add_argument("--threshold", type=float)
    run_parser.add_argument("--min-group", type=int, dest="min_group")
    run_parser.add_argument("--min-words", type=int, dest="min_words")
    run_parser.add_argument(
        "--zeroshot-backend", choices=["mock", "lexical", "http"], dest="zeroshot_backend"
    )
    run_parser.add_argument(
        "--emotion-backend", choices=["mock", "http"], dest="emotion_backend"
    )
    run_parser.add_argument("--endpoint", help="inference service URL for http backends")
    run_parser.add_argument("--out", help="run directory")
    run_parser.add_argument("--seeds", help="seed list file")
    run_parser.add_argument("--format", choices=["csv", "json", "markdown"])
    run_parser.add_argument("--taxonomy-dir", dest="taxonomy_dir")
    run_parser.add_argument("--delay-ms", type=int, dest="delay_ms")
    run_parser.add_argument("--time-budget", type=float, dest="time_budget_s")
    run_parser.add_argument("--max-pages", type=int, dest="max_pages")
    run_parser.add_argument(
        "--no-robots",
        action="store_const",
        const=False,
        dest="obey_robots",
        help="ignore robots.txt disallow rules",
    )
    run_parser.add_argument("-v", "--verbose", action="store_true")

    validate_parser = sub.add_parser(
        "validate-config", help="check a config file without running anything"
    )
    validate_parser.add_argument("config", help="TOML config file")
    return parser


_OVERRIDE_FIELDS = (
    "max_depth", "threshold", "min_group", "min_words", "zeroshot_backend",
    "emotion_backend", "endpoint", "out", "seeds", "format", "taxonomy_dir",
    "delay_ms", "time_budget_s", "max_pages", "obey_robots",
)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "validate-config":
        try:
            cfg = load_config(args.config)
        except ConfigError as exc:
            print(json.dumps({"ok": False, "errors": [str(exc)]}, indent=2))
            return EXIT_USAGE
        errors = validate_config(cfg)
        print(json.dumps({"ok": not errors, "errors": errors}, indent=2))
        return EXIT_OK if not errors else EXIT_USAGE

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    overrides = {name: getattr(args, name) for name in _OVERRIDE_FIELDS}
    try:
        cfg = load_config(args.config, flag_overrides=overrides)
    except ConfigError as exc:
        print(json.dumps({"ok": False, "errors": [str(exc)]}, indent=2))
        return EXIT_USAGE
    errors = validate_config(cfg)
    if errors:
        print(json.dumps({"ok": False, "errors": errors}, indent=2))
        return EXIT_USAGE

    code, summary = run(args.stage, cfg)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return code


if __name__ == "__main__":
    sys.exit(main())
