"""URL normalization and crawl-scope decisions.

Scope matching needs the registrable domain (so subdomains of one
institution stay in scope). Rather than pull in a full public-suffix
dependency, a subset of the suffix rules relevant to institutional crawls
(the .au family including state government/education entries, common
two-level ccTLD rules, and plain TLD fallback) is embedded below and
evaluated with the standard longest-match algorithm.
"""

from __future__ import annotations

from urllib.parse import urljoin, urlsplit, urlunsplit

DEFAULT_PORTS = {"http": "80", "https": "443"}

# Multi-label public suffixes, longest match wins; single-label TLDs are the
# implicit fallback rule. Subset of the public-suffix list.
MULTI_LABEL_SUFFIXES = frozenset(
    [
        # Australia
        "com.au", "net.au", "org.au", "edu.au", "gov.au", "asn.au", "id.au",
        "act.au", "nsw.au", "nt.au", "qld.au", "sa.au", "tas.au", "vic.au", "wa.au",
        "act.gov.au", "nsw.gov.au", "nt.gov.au", "qld.gov.au", "sa.gov.au",
        "tas.gov.au", "vic.gov.au", "wa.gov.au",
        "act.edu.au", "nsw.edu.au", "nt.edu.au", "qld.edu.au", "sa.edu.au",
        "tas.edu.au", "vic.edu.au", "wa.edu.au",
        # United Kingdom
        "co.uk", "org.uk", "gov.uk", "ac.uk", "net.uk", "me.uk", "ltd.uk", "plc.uk",
        # New Zealand
        "co.nz", "net.nz", "org.nz", "govt.nz", "ac.nz", "school.nz", "iwi.nz",
        # Assorted common two-level rules
        "com.br", "com.cn", "com.mx", "com.sg", "com.hk", "com.tw", "com.tr",
        "co.jp", "co.kr", "co.in", "co.za", "or.jp", "ne.jp", "ac.jp", "go.jp",
        "org.in", "net.in", "gov.in", "ac.in", "edu.in",
    ]
)


class UrlError(ValueError):
    """Raised for URLs that cannot be normalized; callers skip the link."""


def normalize_url(raw: str, base: str | None = None) -> str:
    """Resolve and canonicalize a URL reference.

    Resolves relative references against ``base``, lowercases scheme and
    host, strips the fragment, removes default ports, and preserves the
    query string. Raises :class:`UrlError` for anything that does not come
    out as an absolute http(s) URL.
    """
    raw = raw.strip()
    if not raw:
        raise UrlError("empty URL")
    try:
        absolute = urljoin(base, raw) if base else raw
        parts = urlsplit(absolute)
    except ValueError as exc:
        raise UrlError(f"unparseable URL {raw!r}: {exc}") from exc

    scheme = parts.scheme.lower()
    if scheme not in ("http", "https"):
        raise UrlError(f"unsupported scheme {parts.scheme!r} in {raw!r}")
    if not parts.hostname:
        raise UrlError(f"no host in {raw!r}")

    host = parts.hostname.lower()
    netloc = host
    try:
        port = parts.port
    except ValueError as exc:
        raise UrlError(f"bad port in {raw!r}") from exc
    if port is not None and str(port) != DEFAULT_PORTS[scheme]:
        netloc = f"{host}:{port}"
    if parts.username:
        userinfo = parts.username + (f":{parts.password}" if parts.password else "")
        netloc = f"{userinfo}@{netloc}"

    path = parts.path or "/"
    return urlunsplit((scheme, netloc, path, parts.query, ""))


def registrable_domain(host: str) -> str:
    """Registrable domain of a host: one label plus its public suffix.

    ``sub.example.org.au`` -> ``example.org.au``; hosts that are themselves
    a suffix (or bare/IP-like) are returned unchanged.
    """
    host = host.strip(".").lower()
    labels = host.split(".")
    if len(labels) < 2 or labels[-1].isdigit():
        return host
    suffix_len = 1
    for take in (3, 2):
        if len(labels) > take and ".".join(labels[-take:]) in MULTI_LABEL_SUFFIXES:
            suffix_len = take
            break
    return ".".join(labels[-(suffix_len + 1):])


def in_scope(url: str, seed: str, scope: "Scope") -> bool:
    """Whether ``url`` falls inside the crawl scope anchored at ``seed``."""
    try:
        parts = urlsplit(url)
        seed_parts = urlsplit(seed)
    except ValueError:
        return False
    if parts.scheme not in ("http", "https") or not parts.hostname:
        return False
    if scope.kind == "prefix":
        return any(url.startswith(prefix) for prefix in scope.prefixes)
    if not seed_parts.hostname:
        return False
    return registrable_domain(parts.hostname) == registrable_domain(seed_parts.hostname)


class Scope:
    """Crawl scope: whole registrable domain, or an explicit prefix list."""

    __slots__ = ("kind", "prefixes")

    def __init__(self, kind: str = "domain", prefixes: tuple[str, ...] = ()):
        if kind not in ("domain", "prefix"):
            raise ValueError(f"unknown scope kind {kind!r}")
        if kind == "prefix" and not prefixes:
            raise ValueError("prefix scope requires at least one prefix")
        self.kind = kind
        self.prefixes = tuple(prefixes)

    @classmethod
    def full_domain(cls) -> "Scope":
        return cls("domain")

    @classmethod
    def prefix_list(cls, prefixes: list[str] | tuple[str, ...]) -> "Scope":
        return cls("prefix", tuple(prefixes))

    def __repr__(self) -> str:
        if self.kind == "domain":
            return "Scope(full-domain)"
        return f"Scope(prefixes={list(self.prefixes)!r})"

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Scope)
            and self.kind == other.kind
            and self.prefixes == other.prefixes
        )
