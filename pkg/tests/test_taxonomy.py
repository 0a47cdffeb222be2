"""Taxonomy loading, validation, round-trips, and the shipped data files."""

import json

import pytest

from tfa_audit.taxonomy import (
    SHIPPED_NAMES,
    LabelPath,
    TaxonomyError,
    label_space,
    load_all_shipped,
    load_shipped,
    load_taxonomy,
    serialize_taxonomy,
)

VALID = {
    "name": "demo",
    "version": "v1",
    "categories": [
        {
            "id": "alpha",
            "label": "Alpha",
            "description": "First demo category.",
            "subcategories": [
                {"id": "alpha_one", "label": "Alpha One", "description": "First sub."},
                {"id": "alpha_two", "label": "Alpha Two", "description": "Second sub."},
            ],
        },
        {
            "id": "beta",
            "label": "Beta",
            "description": "Second demo category.",
            "subcategories": [
                {"id": "beta_one", "label": "Beta One", "description": "Only sub."}
            ],
        },
    ],
}


def deep_copy():
    return json.loads(json.dumps(VALID))


class TestLoadTaxonomy:
    def test_loads_from_dict(self):
        taxonomy = load_taxonomy(VALID)
        assert taxonomy.name == "demo"
        assert taxonomy.primary_ids() == ["alpha", "beta"]
        assert [c.id for c in taxonomy.primary("alpha").children] == ["alpha_one", "alpha_two"]

    def test_loads_from_json_text_and_path(self, tmp_path):
        text = json.dumps(VALID)
        assert load_taxonomy(text).name == "demo"
        path = tmp_path / "demo.json"
        path.write_text(text, encoding="utf-8")
        assert load_taxonomy(path).name == "demo"

    def test_duplicate_id_rejected_with_path(self):
        bad = deep_copy()
        bad["categories"][1]["subcategories"][0]["id"] = "alpha_one"
        with pytest.raises(TaxonomyError) as err:
            load_taxonomy(bad)
        assert "alpha_one" in str(err.value)
        assert "beta" in str(err.value)  # error names the offending node path

    def test_missing_description_rejected(self):
        bad = deep_copy()
        bad["categories"][0]["description"] = ""
        with pytest.raises(TaxonomyError):
            load_taxonomy(bad)

    def test_three_level_nesting_rejected(self):
        bad = deep_copy()
        bad["categories"][0]["subcategories"][0]["subcategories"] = [
            {"id": "deep", "label": "Deep", "description": "Too deep."}
        ]
        with pytest.raises(TaxonomyError):
            load_taxonomy(bad)

    def test_round_trip(self):
        taxonomy = load_taxonomy(VALID)
        again = load_taxonomy(serialize_taxonomy(taxonomy))
        assert again == taxonomy


class TestLabelSpace:
    def test_primary_space_has_hypotheses(self):
        taxonomy = load_taxonomy(VALID)
        space = label_space(taxonomy, "primary")
        assert space[0] == ("alpha", "Alpha: First demo category.")
        assert len(space) == 2

    def test_sub_space_scoped_to_primary(self):
        taxonomy = load_taxonomy(VALID)
        space = label_space(taxonomy, "sub", "alpha")
        assert [label_id for label_id, _ in space] == ["alpha_one", "alpha_two"]

    def test_label_path_validation(self):
        taxonomy = load_taxonomy(VALID)
        LabelPath("demo", "alpha", "alpha_one").validate(taxonomy)
        with pytest.raises(TaxonomyError):
            LabelPath("demo", "alpha", "beta_one").validate(taxonomy)
        with pytest.raises(TaxonomyError):
            LabelPath("demo", "gamma").validate(taxonomy)


class TestShippedTaxonomies:
    def test_four_taxonomies_ship(self):
        taxonomies = load_all_shipped()
        assert set(taxonomies) == set(SHIPPED_NAMES) == {
            "types", "prevention", "detection", "support",
        }

    def test_each_has_exactly_six_primaries(self):
        # Every shipped taxonomy resolves to six main categories.
        for name in SHIPPED_NAMES:
            taxonomy = load_shipped(name)
            assert len(taxonomy.roots) == 6, name

    def test_twenty_four_primaries_total(self):
        total = sum(len(load_shipped(name).roots) for name in SHIPPED_NAMES)
        assert total == 24

    def test_every_node_has_label_and_description(self):
        for name in SHIPPED_NAMES:
            for node in load_shipped(name).roots:
                assert node.label and node.description
                assert node.children, f"{name}/{node.id} has no subcategories"
                for child in node.children:
                    assert child.label and child.description

    def test_known_subcategories_present(self):
        # Spot checks against the published top co-occurrence pairs.
        types = load_shipped("types")
        assert types.has_sub("comments_abuse", "public_shaming")
        assert types.has_sub("harassment", "threats_of_eviction")
        assert types.has_sub("sexual_abuse", "recorded_sexual_assault")
        prevention = load_shipped("prevention")
        assert prevention.has_sub("legal_measures", "criminal_sanctions")
        assert prevention.has_sub("family_safeguarding", "family_based_early_detection")
        assert prevention.has_sub("community_based_prevention", "resource_provision_and_navigation")
        detection = load_shipped("detection")
        assert detection.has_sub("clinical_detection", "in_person_professional_assessment")
        assert detection.has_sub("incidental_discovery", "unexpected_device_discovery")
        assert detection.has_sub("digital_channel_detection", "virtual_security_consultations")
        support = load_shipped("support")
        assert support.has_sub("digital_support_infrastructure", "online_support_communities")
        assert support.has_sub("technology_security_support", "security_clinics")
        assert support.has_sub("institutional_support", "survivors_assistance_program")

    def test_version_marks_source(self):
        for name in SHIPPED_NAMES:
            assert load_shipped(name).version == "paper-v1"
