"""Two-level label hierarchies used as the constrained label space.

Four taxonomy files ship with the package (types, prevention, detection,
support); user-supplied taxonomies use the same JSON document format.
Loaded taxonomies are immutable and safe to share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

SHIPPED_NAMES = ("types", "prevention", "detection", "support")

_SHIPPED_DIR = Path(__file__).parent / "taxonomies"


class TaxonomyError(ValueError):
    """Invalid taxonomy document; message carries the offending node path."""


@dataclass(frozen=True)
class TaxonomyNode:
    id: str
    label: str
    description: str
    children: tuple["TaxonomyNode", ...] = ()

    @property
    def hypothesis(self) -> str:
        """Text handed to zero-shot scorers: label plus gloss."""
        return f"{self.label}: {self.description}"


@dataclass(frozen=True)
class Taxonomy:
    name: str
    version: str
    roots: tuple[TaxonomyNode, ...]

    def primary(self, primary_id: str) -> TaxonomyNode:
        for node in self.roots:
            if node.id == primary_id:
                return node
        raise TaxonomyError(f"{self.name}: unknown primary id {primary_id!r}")

    def primary_ids(self) -> list[str]:
        return [node.id for node in self.roots]

    def has_sub(self, primary_id: str, sub_id: str) -> bool:
        try:
            node = self.primary(primary_id)
        except TaxonomyError:
            return False
        return any(child.id == sub_id for child in node.children)


@dataclass(frozen=True)
class LabelPath:
    """Reference to one taxonomy label: a primary, optionally a subcategory."""

    taxonomy: str
    primary: str
    sub: str | None = None

    def validate(self, taxonomy: Taxonomy) -> None:
        if taxonomy.name != self.taxonomy:
            raise TaxonomyError(
                f"label path names taxonomy {self.taxonomy!r}, got {taxonomy.name!r}"
            )
        node = taxonomy.primary(self.primary)
        if self.sub is not None and not any(c.id == self.sub for c in node.children):
            raise TaxonomyError(
                f"{taxonomy.name}/{self.primary}: {self.sub!r} is not a subcategory"
            )


def _require(condition: bool, path: str, message: str) -> None:
    if not condition:
        raise TaxonomyError(f"{path}: {message}")


def _parse_node(raw: dict, path: str, seen_ids: set[str], depth: int) -> TaxonomyNode:
    _require(isinstance(raw, dict), path, "node must be an object")
    node_id = raw.get("id")
    _require(isinstance(node_id, str) and bool(node_id), path, "missing or empty id")
    node_path = f"{path}/{node_id}"
    _require(node_id not in seen_ids, node_path, f"duplicate id {node_id!r}")
    seen_ids.add(node_id)
    label = raw.get("label")
    _require(isinstance(label, str) and bool(label.strip()), node_path, "empty label")
    description = raw.get("description")
    _require(
        isinstance(description, str) and bool(description.strip()),
        node_path,
        "empty description",
    )
    raw_children = raw.get("subcategories", [])
    _require(isinstance(raw_children, list), node_path, "subcategories must be a list")
    if raw_children:
        _require(depth < 2, node_path, "taxonomy depth exceeds two levels")
    children = tuple(
        _parse_node(child, node_path, seen_ids, depth + 1) for child in raw_children
    )
    return TaxonomyNode(id=node_id, label=label, description=description, children=children)


def load_taxonomy(source: str | Path | dict) -> Taxonomy:
    """Parse and validate a taxonomy document (path, JSON text, or dict)."""
    if isinstance(source, dict):
        doc = source
        where = "<dict>"
    else:
        if isinstance(source, str) and source.lstrip().startswith(("{", "[")):
            where = "<string>"
            text = source
        else:
            where = str(source)
            try:
                text = Path(source).read_text(encoding="utf-8")
            except OSError as exc:
                raise TaxonomyError(f"{where}: cannot read taxonomy file: {exc}") from exc
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise TaxonomyError(f"{where}: invalid JSON: {exc}") from exc

    _require(isinstance(doc, dict), where, "document must be a JSON object")
    name = doc.get("name")
    _require(isinstance(name, str) and bool(name), where, "missing taxonomy name")
    version = doc.get("version")
    _require(isinstance(version, str) and bool(version), where, "missing taxonomy version")
    categories = doc.get("categories")
    _require(isinstance(categories, list) and bool(categories), where, "no categories")

    seen: set[str] = set()
    roots = tuple(_parse_node(raw, name, seen, depth=1) for raw in categories)
    return Taxonomy(name=name, version=version, roots=roots)


def serialize_taxonomy(taxonomy: Taxonomy) -> str:
    """Render a taxonomy back to its JSON document form (round-trips load)."""
    doc = {
        "name": taxonomy.name,
        "version": taxonomy.version,
        "categories": [
            {
                "id": node.id,
                "label": node.label,
                "description": node.description,
                "subcategories": [
                    {"id": c.id, "label": c.label, "description": c.description}
                    for c in node.children
                ],
            }
            for node in taxonomy.roots
        ],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def label_space(
    taxonomy: Taxonomy, level: str = "primary", primary_id: str | None = None
) -> list[tuple[str, str]]:
    """Candidate (id, hypothesis-text) pairs at one level, in document order.

    ``level`` is "primary" for the root categories or "sub" for the children
    of ``primary_id``.
    """
    if level == "primary":
        return [(node.id, node.hypothesis) for node in taxonomy.roots]
    if level == "sub":
        if primary_id is None:
            raise TaxonomyError("sub level requires a primary id")
        node = taxonomy.primary(primary_id)
        return [(child.id, child.hypothesis) for child in node.children]
    raise TaxonomyError(f"unknown label level {level!r}")


def shipped_taxonomy_path(name: str) -> Path:
    if name not in SHIPPED_NAMES:
        raise TaxonomyError(f"no shipped taxonomy named {name!r}")
    return _SHIPPED_DIR / f"{name}.json"


def load_shipped(name: str) -> Taxonomy:
    return load_taxonomy(shipped_taxonomy_path(name))


def load_taxonomy_dir(directory: str | Path) -> dict[str, Taxonomy]:
    """Load every ``*.json`` taxonomy in a directory, keyed by taxonomy name."""
    directory = Path(directory)
    out: dict[str, Taxonomy] = {}
    for path in sorted(directory.glob("*.json")):
        taxonomy = load_taxonomy(path)
        if taxonomy.name in out:
            raise TaxonomyError(f"{path}: duplicate taxonomy name {taxonomy.name!r}")
        out[taxonomy.name] = taxonomy
    return out


def load_all_shipped() -> dict[str, Taxonomy]:
    return {name: load_shipped(name) for name in SHIPPED_NAMES}
