"""Depth-limited DFS crawler with scope, MIME, and politeness handling.

One crawl covers one seed domain: URLs pop off a LIFO frontier, links
discovered at depth ``d`` enqueue at ``d + 1`` while that stays within
``max_depth``, and only in-scope, unvisited URLs are ever enqueued.
Multiple seeds crawl concurrently via :func:`crawl_many`; within one host
fetches stay sequential with a configurable delay.
"""

from __future__ import annotations

import json
import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from html.parser import HTMLParser
from pathlib import Path
from urllib import robotparser
from urllib.parse import urlsplit

import requests

from .extract import decode_html
from .urls import Scope, UrlError, in_scope, normalize_url

log = logging.getLogger(__name__)

SUPPORTED_MIMES = ("text/html", "application/xhtml+xml")

DEFAULT_USER_AGENT = "tfa-audit/0.1 (+institutional web audit; respects robots.txt)"


@dataclass(frozen=True)
class CrawlConfig:
    max_depth: int = 4
    scope: Scope = Scope.full_domain()
    delay_ms: int = 500
    time_budget_s: float = 3600.0
    max_pages: int | None = None
    fetcher: str = "static"
    render_endpoint: str | None = None
    obey_robots: bool = True
    user_agent: str = DEFAULT_USER_AGENT
    request_timeout: float = 30.0
    max_redirects: int = 5

    def __post_init__(self):
        if self.max_depth < 0:
            raise ValueError(f"max_depth must be >= 0, got {self.max_depth}")
        if self.delay_ms < 0:
            raise ValueError(f"delay_ms must be >= 0, got {self.delay_ms}")
        if self.scope.kind == "prefix" and not self.scope.prefixes:
            raise ValueError("prefix scope needs at least one prefix")
        if self.fetcher not in ("static", "rendered"):
            raise ValueError(f"unknown fetcher {self.fetcher!r}")
        if self.fetcher == "rendered" and not self.render_endpoint:
            raise ValueError("rendered fetcher needs render_endpoint")


@dataclass
class FetchRecord:
    url: str
    depth: int
    status: object  # int HTTP status, or a failure-kind string
    mime: str | None
    body: bytes | None
    fetched_at: str
    parent_url: str | None = None
    discard_reason: str | None = None  # coarse kind, e.g. "mime"
    discard_detail: str | None = None  # category, e.g. "compressed archive"

    def row(self, body_hash: str | None = None) -> dict:
        return {
            "url": self.url,
            "depth": self.depth,
            "status": self.status,
            "mime": self.mime,
            "hash": body_hash,
            "parent": self.parent_url,
            "time": self.fetched_at,
            "discard_reason": self.discard_reason,
            "discard_detail": self.discard_detail,
        }


@dataclass
class CrawlSummary:
    seed: str
    fetched: int = 0
    discarded: int = 0
    errors: list = field(default_factory=list)
    robots_blocked: int = 0
    budget_exhausted: bool = False
    discard_reasons: dict = field(default_factory=dict)

    def note_discard(self, reason: str) -> None:
        self.discarded += 1
        self.discard_reasons[reason] = self.discard_reasons.get(reason, 0) + 1

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "fetched": self.fetched,
            "discarded": self.discarded,
            "errors": len(self.errors),
            "robots_blocked": self.robots_blocked,
            "budget_exhausted": self.budget_exhausted,
            "discard_reasons": dict(sorted(self.discard_reasons.items())),
        }


class Frontier:
    """LIFO stack of (url, depth) with an enqueue-once visited set."""

    def __init__(self):
        self._stack: list = []
        self.visited: set = set()

    def push(self, url: str, depth: int) -> bool:
        if url in self.visited:
            return False
        self.visited.add(url)
        self._stack.append((url, depth))
        return True

    def pop(self):
        return self._stack.pop()

    def __len__(self) -> int:
        return len(self._stack)


class HostThrottle:
    """Enforce a minimum interval between requests to the same host."""

    def __init__(self, delay_ms: int):
        self.delay = delay_ms / 1000.0
        self._last: dict = {}
        self._lock = threading.Lock()

    def wait(self, host: str) -> None:
        if self.delay <= 0:
            return
        while True:
            with self._lock:
                now = time.monotonic()
                last = self._last.get(host)
                if last is None or now - last >= self.delay:
                    self._last[host] = now
                    return
                remaining = self.delay - (now - last)
            time.sleep(remaining)


# ---------------------------------------------------------------------------
# fetchers


class StaticFetcher:
    """Plain HTTP fetcher; follows up to ``max_redirects`` redirects."""

    def __init__(self, cfg: CrawlConfig, session: requests.Session | None = None):
        self.cfg = cfg
        self.session = session or requests.Session()
        self.session.max_redirects = cfg.max_redirects
        self.session.headers["User-Agent"] = cfg.user_agent

    def fetch(self, url: str):
        """Returns (status, mime, body, final_url); raises requests errors."""
        response = self.session.get(
            url, timeout=self.cfg.request_timeout, allow_redirects=True
        )
        mime = response.headers.get("Content-Type")
        if mime:
            mime = mime.split(";")[0].strip().lower() or None
        return response.status_code, mime, response.content, response.url


class RenderedFetcher:
    """Delegate fetching to an external rendering service.

    The service accepts ``POST {endpoint}/render`` with ``{"url": ...}`` and
    answers ``{"status": int, "content_type": str, "body": str}`` with the
    DOM serialized after script execution.
    """

    def __init__(self, cfg: CrawlConfig, session: requests.Session | None = None):
        self.cfg = cfg
        self.endpoint = (cfg.render_endpoint or "").rstrip("/")
        self.session = session or requests.Session()

    def fetch(self, url: str):
        response = self.session.post(
            f"{self.endpoint}/render",
            json={"url": url},
            timeout=self.cfg.request_timeout,
        )
        response.raise_for_status()
        payload = response.json()
        mime = (payload.get("content_type") or "text/html").split(";")[0].strip().lower()
        body = payload.get("body", "").encode("utf-8")
        return int(payload.get("status", 200)), mime, body, payload.get("final_url", url)


def make_fetcher(cfg: CrawlConfig, session: requests.Session | None = None):
    if cfg.fetcher == "rendered":
        return RenderedFetcher(cfg, session=session)
    return StaticFetcher(cfg, session=session)


# ---------------------------------------------------------------------------
# MIME handling

_DISCARD_CATEGORIES = (
    (("application/zip", "application/gzip", "application/x-gzip", "application/x-tar",
      "application/x-7z-compressed", "application/vnd.rar", "application/x-rar-compressed"),
     "compressed archive"),
    (("application/vnd.ms-excel",
      "application/vnd.openxmlformats-officedocument.spreadsheetml.sheet",
      "application/vnd.oasis.opendocument.spreadsheet", "text/csv"),
     "spreadsheet"),
    (("application/pdf", "application/msword",
      "application/vnd.openxmlformats-officedocument.wordprocessingml.document"),
     "document"),
)


def _discard_reason(mime: str) -> str:
    for prefixes, reason in _DISCARD_CATEGORIES:
        if mime in prefixes:
            return reason
    if mime.split("/")[0] in ("image", "audio", "video"):
        return "multimedia"
    return f"unsupported type {mime}"


def sniff_mime(body: bytes) -> str | None:
    """Guess a media type from the first 512 bytes when no header arrived."""
    head = body[:512].lstrip(b"\xef\xbb\xbf \t\r\n").lower()
    if head.startswith(b"<?xml"):
        return "application/xhtml+xml" if b"<html" in head else None
    if head.startswith(b"<!doctype html") or head.startswith(b"<html") or b"<html" in head:
        return "text/html"
    return None


def mime_filter(record: FetchRecord):
    """(\"keep\", None) for supported HTML types, else (\"discard\", reason)."""
    mime = record.mime
    if not mime:
        mime = sniff_mime(record.body or b"")
        if mime is None:
            return "discard", "unsniffable content"
        record.mime = mime
    if mime in SUPPORTED_MIMES:
        return "keep", None
    return "discard", _discard_reason(mime)


# ---------------------------------------------------------------------------
# link extraction


class _LinkParser(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.hrefs: list = []

    def handle_starttag(self, tag, attrs):
        if tag in ("a", "area"):
            for name, value in attrs:
                if name == "href" and value:
                    self.hrefs.append(value)


def extract_links(body: bytes, base_url: str) -> list:
    """Absolute normalized link targets on a page, in document order."""
    parser = _LinkParser()
    try:
        parser.feed(decode_html(body))
        parser.close()
    except Exception:  # malformed markup: keep whatever was collected
        pass
    links = []
    for href in parser.hrefs:
        try:
            links.append(normalize_url(href, base=base_url))
        except UrlError:
            continue
    return links


# ---------------------------------------------------------------------------
# robots


class RobotsCache:
    """Per-host robots.txt verdicts; unreachable robots default to allow."""

    def __init__(self, cfg: CrawlConfig, throttle: HostThrottle,
                 session: requests.Session | None = None):
        self.cfg = cfg
        self.throttle = throttle
        self.session = session or requests.Session()
        self._parsers: dict = {}

    def allowed(self, url: str) -> bool:
        if not self.cfg.obey_robots:
            return True
        parts = urlsplit(url)
        origin = f"{parts.scheme}://{parts.netloc}"
        parser = self._parsers.get(origin)
        if parser is None:
            parser = self._load(origin, parts.hostname or "")
            self._parsers[origin] = parser
        if parser is False:
            return True
        return parser.can_fetch(self.cfg.user_agent, url)

    def _load(self, origin: str, host: str):
        self.throttle.wait(host)
        try:
            response = self.session.get(
                f"{origin}/robots.txt",
                timeout=self.cfg.request_timeout,
                headers={"User-Agent": self.cfg.user_agent},
            )
        except requests.RequestException:
            return False
        if response.status_code != 200:
            return False
        parser = robotparser.RobotFileParser()
        parser.parse(response.text.splitlines())
        return parser


# ---------------------------------------------------------------------------
# crawl loop


def _failure_kind(exc: Exception) -> str:
    if isinstance(exc, requests.Timeout):
        return "timeout"
    if isinstance(exc, requests.TooManyRedirects):
        return "too_many_redirects"
    if isinstance(exc, requests.ConnectionError):
        return "connection_error"
    return "fetch_error"


def crawl(seed: str, cfg: CrawlConfig, sink, error_sink=None,
          session: requests.Session | None = None) -> CrawlSummary:
    """Crawl one seed domain depth-first, emitting FetchRecords to ``sink``.

    ``sink(record)`` receives every kept or mime-discarded fetch; failures
    go to ``error_sink(dict)`` when given and into the summary always.
    Budget exhaustion (time or page cap) stops cleanly with a summary flag.
    """
    seed_url = normalize_url(seed)
    summary = CrawlSummary(seed=seed_url)
    throttle = HostThrottle(cfg.delay_ms)
    fetcher = make_fetcher(cfg, session=session)
    robots = RobotsCache(cfg, throttle, session=session)
    frontier = Frontier()
    frontier.push(seed_url, 0)
    started = time.monotonic()

    def fail(url, depth, reason):
        entry = {"url": url, "depth": depth, "reason": reason}
        summary.errors.append(entry)
        if error_sink is not None:
            error_sink(entry)

    while len(frontier):
        if time.monotonic() - started > cfg.time_budget_s:
            summary.budget_exhausted = True
            log.info("time budget exhausted for %s", seed_url)
            break
        if cfg.max_pages is not None and summary.fetched >= cfg.max_pages:
            summary.budget_exhausted = True
            log.info("page budget exhausted for %s", seed_url)
            break

        url, depth = frontier.pop()
        if not robots.allowed(url):
            summary.robots_blocked += 1
            continue
        throttle.wait(urlsplit(url).hostname or "")
        try:
            status, mime, body, final_url = fetcher.fetch(url)
        except requests.RequestException as exc:
            fail(url, depth, _failure_kind(exc))
            continue

        try:
            final_url = normalize_url(str(final_url))
        except UrlError:
            final_url = url
        if final_url != url:
            if final_url in frontier.visited:
                summary.note_discard("redirect to visited url")
                continue
            frontier.visited.add(final_url)
            if not in_scope(final_url, seed_url, cfg.scope):
                summary.note_discard("redirect out of scope")
                continue

        fetched_at = datetime.now(timezone.utc).isoformat()
        record = FetchRecord(
            url=final_url, depth=depth, status=status, mime=mime,
            body=body, fetched_at=fetched_at,
            parent_url=None if depth == 0 else url,
        )
        if status != 200:
            record.body = None
            fail(final_url, depth, f"http_{status}")
            sink(record)
            continue

        verdict, reason = mime_filter(record)
        if verdict == "discard":
            record.body = None
            record.discard_reason = "mime"
            record.discard_detail = reason
            summary.note_discard(reason)
            sink(record)
            continue

        summary.fetched += 1
        sink(record)

        if depth + 1 <= cfg.max_depth:
            links = extract_links(body, final_url)
            candidates = [u for u in links if in_scope(u, seed_url, cfg.scope)]
            for link in reversed(candidates):
                frontier.push(link, depth + 1)

    return summary


def crawl_many(seeds: list, cfg_by_seed: dict, sink, error_sink=None,
               max_workers: int = 4) -> dict:
    """Crawl several seeds concurrently; the sink must tolerate interleaving."""
    summaries: dict = {}
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        futures = {
            pool.submit(crawl, seed, cfg_by_seed[seed], sink, error_sink): seed
            for seed in seeds
        }
        for future, seed in futures.items():
            try:
                summaries[seed] = future.result()
            except Exception as exc:  # unreachable seed or setup error
                log.warning("crawl of %s aborted: %s", seed, exc)
                summary = CrawlSummary(seed=seed)
                summary.errors.append({"url": seed, "depth": 0, "reason": str(exc)})
                summaries[seed] = summary
    return summaries


def parse_seed_file(path: str | Path) -> list:
    """Parse a seed list: one `<seed-url> [scope-prefix ...]` per line.

    Blank lines and `#` comments are skipped. Lines with prefixes get a
    prefix-list scope; bare seeds get full-domain scope.
    """
    entries = []
    for raw_line in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        seed = normalize_url(parts[0])
        if len(parts) > 1:
            scope = Scope.prefix_list(parts[1:])
        else:
            scope = Scope.full_domain()
        entries.append((seed, scope))
    return entries


def write_error_log(path: Path):
    """Error sink appending JSON lines of {url, depth, reason}."""
    lock = threading.Lock()

    def sink(entry: dict) -> None:
        with lock:
            with open(path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(entry, ensure_ascii=False, sort_keys=True))
                fh.write("\n")

    return sink
