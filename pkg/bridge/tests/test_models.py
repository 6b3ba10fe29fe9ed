import json

import pytest

from modelbridge.graphio import parse
from modelbridge.models import (DEFAULT_DIM, HashedStructureEmbedder,
                                ModelError, MotifClassifier,
                                SameLabelPairClassifier, load_model)

MOTIF = "3 2\nN\nO\nO\n0 1\n0 2\n"


class TestMotifClassifier:
    def test_rejects_graph_containing_motif(self):
        clf = MotifClassifier()
        assert clf.predict(parse(MOTIF)) == 0.0
        bigger = parse("4 3\nC\nN\nO\nO\n0 1\n1 2\n1 3\n")
        assert clf.predict(bigger) == 0.0

    def test_accepts_motif_free_graph(self):
        clf = MotifClassifier()
        assert clf.predict(parse("3 2\nN\nO\nC\n0 1\n0 2\n")) == 1.0
        assert clf.predict(parse("2 1\nN\nO\n0 1\n")) == 1.0

    def test_labels_must_match(self):
        clf = MotifClassifier()
        assert clf.predict(parse("3 2\nO\nN\nN\n0 1\n0 2\n")) == 1.0


class TestSameLabelPair:
    def test_pair_detection(self):
        clf = SameLabelPairClassifier()
        assert clf.predict(parse("2 0\nc\nc\n")) == 1.0
        assert clf.predict(parse("2 0\nc\nd\n")) == 0.0

    def test_ignored_labels_never_pair(self):
        clf = SameLabelPairClassifier(ignore=("_",))
        assert clf.predict(parse("3 0\n_\n_\nc\n")) == 0.0


class TestEmbedder:
    def test_dim_and_determinism(self):
        emb = HashedStructureEmbedder(dim=16)
        g = parse(MOTIF)
        v1, v2 = emb.embed(g), emb.embed(g)
        assert len(v1) == 16
        assert v1 == v2

    def test_distinguishes_structures(self):
        emb = HashedStructureEmbedder()
        tri = parse("3 3\nC\nC\nC\n0 1\n0 2\n1 2\n")
        path = parse("3 2\nC\nC\nC\n0 1\n1 2\n")
        assert emb.embed(tri) != emb.embed(path)

    def test_bad_dim_rejected(self):
        with pytest.raises(ModelError):
            HashedStructureEmbedder(dim=0)


class TestLoadModel:
    def test_default(self, monkeypatch):
        monkeypatch.delenv("MODELBRIDGE_MODEL", raising=False)
        clf, emb, ident = load_model(None)
        assert isinstance(clf, MotifClassifier)
        assert emb.dim == DEFAULT_DIM
        assert "motif" in ident

    def test_spec_file(self, tmp_path):
        p = tmp_path / "model.json"
        p.write_text(json.dumps({
            "classifier": {"name": "same_label_pair"},
            "embedder": {"dim": 8},
        }))
        clf, emb, _ = load_model(str(p))
        assert isinstance(clf, SameLabelPairClassifier)
        assert emb.dim == 8

    def test_env_var(self, tmp_path, monkeypatch):
        p = tmp_path / "model.json"
        p.write_text(json.dumps({"embedder": {"dim": 4}}))
        monkeypatch.setenv("MODELBRIDGE_MODEL", str(p))
        _, emb, _ = load_model(None)
        assert emb.dim == 4

    @pytest.mark.parametrize("spec", [
        {"classifier": {"name": "nope"}},
        {"embedder": {"dim": -3}},
        {"classifier": {"name": "motif", "motif_text": "garbage"}},
    ])
    def test_bad_specs(self, tmp_path, spec):
        p = tmp_path / "model.json"
        p.write_text(json.dumps(spec))
        with pytest.raises(ModelError):
            load_model(str(p))

    def test_missing_file(self):
        with pytest.raises(ModelError):
            load_model("/nonexistent/model.json")
