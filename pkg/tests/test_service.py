import pytest
from fastapi.testclient import TestClient

from folgen import harness, prefix, tptp
from folgen.library import FormulaLibrary
from folgen.lm import (
    ModelConfig,
    TrainConfig,
    TransformerLM,
    build_vocab,
    corpus_to_ids,
    save_checkpoint,
    train,
)
from folgen.service import create_app

LIB_TEXT = """
fof(th_all_p, axiom, ![X]: p1(X)).
fof(th_all_q, axiom, ![X]: q1(X)).
fof(th_pair, axiom, ![X]: (p1(X) & q1(X))).
fof(th_chain, axiom, ![X]: (p1(X) => q1(X))).
"""


@pytest.fixture(scope="module")
def service_env(tmp_path_factory):
    root = tmp_path_factory.mktemp("service")
    problem = tptp.parse_problem(LIB_TEXT)
    library = FormulaLibrary.from_problem(problem)
    sig = prefix.build_signature([problem])

    # dataset-4 style corpus: each theorem followed by one premise
    blocks = []
    for entry, premise in [
        ("th_pair", "th_all_p"),
        ("th_chain", "th_all_q"),
        ("th_all_p", "th_all_p"),
        ("th_all_q", "th_all_q"),
    ]:
        conj = " ".join(prefix.encode_formula(library.get(entry).formula, sig))
        prem = " ".join(prefix.encode_formula(library.get(premise).formula, sig))
        blocks.append(f"{conj}\n{prem}")
    corpus = "\n\n".join(blocks * 4)

    tokens = corpus.split()
    vocab = build_vocab(tokens, "whitespace")
    cfg = ModelConfig(
        layers=2, heads=2, model_dim=32, ff_dim=128, context_length=64,
        vocab_size=len(vocab), seed=0,
    )
    model = TransformerLM(cfg)
    train(model, corpus_to_ids(corpus, vocab), TrainConfig(steps=60, batch_size=8, seed=0))

    ckpt = root / "model.ckpt"
    sha = save_checkpoint(ckpt, model, vocab)
    lib_path = root / "library.p"
    lib_path.write_text(LIB_TEXT, encoding="utf-8")
    sig_path = root / "corpus.sig"
    sig.save(sig_path)
    return {
        "ckpt": str(ckpt),
        "lib": str(lib_path),
        "sig": str(sig_path),
        "sha": sha,
        "library": library,
        "sig_map": sig,
    }


@pytest.fixture(scope="module")
def client(service_env):
    app = create_app(
        checkpoint_path=service_env["ckpt"],
        library_path=service_env["lib"],
        sig_path=service_env["sig"],
    )
    with TestClient(app) as c:
        yield c


def conj_line(service_env, name: str) -> str:
    library, sig = service_env["library"], service_env["sig_map"]
    return " ".join(prefix.encode_formula(library.get(name).formula, sig))


class TestHealth:
    def test_before_load(self, service_env):
        app = create_app(checkpoint_path=service_env["ckpt"])
        bare = TestClient(app)  # no lifespan: model not loaded yet
        assert bare.get("/health").json() == {"status": "loading"}
        resp = bare.post("/complete", json={"prompt": "x"})
        assert resp.status_code == 503

    def test_after_load(self, client, service_env):
        body = client.get("/health").json()
        assert body["status"] == "ok"
        assert body["vocab_size"] > 5
        assert body["library_size"] == 4
        assert body["checkpoint_sha256"] == service_env["sha"]


class TestComplete:
    def test_deterministic_replay(self, client):
        req = {
            "prompt": "c! b0 cp1 b0",
            "mode": "text_completion",
            "beam_width": 4,
            "num_results": 3,
            "max_new_tokens": 8,
            "seed": 7,
        }
        a = client.post("/complete", json=req).json()
        b = client.post("/complete", json=req).json()
        assert a == b
        assert len(a) <= 3

    def test_scores_sorted_descending(self, client):
        req = {
            "prompt": "c! b0 cp1 b0",
            "beam_width": 5,
            "num_results": 5,
            "max_new_tokens": 6,
        }
        results = client.post("/complete", json=req).json()
        scores = [r["score"] for r in results]
        assert scores == sorted(scores, reverse=True)

    def test_sampling_path_when_beam_width_one(self, client):
        req = {
            "prompt": "c! b0 cp1 b0",
            "beam_width": 1,
            "num_results": 4,
            "temperature": 1.2,
            "max_new_tokens": 6,
            "seed": 3,
        }
        a = client.post("/complete", json=req).json()
        b = client.post("/complete", json=req).json()
        assert a == b
        scores = [r["score"] for r in a]
        assert scores == sorted(scores, reverse=True)

    def test_max_new_tokens_zero(self, client):
        req = {"prompt": "cp1", "max_new_tokens": 0}
        assert client.post("/complete", json=req).json() == [
            {"text": "", "score": 0.0, "premise_classes": None}
        ]

    def test_prompt_too_long_rejected_not_truncated(self, client):
        req = {"prompt": "cp1 " * 100, "max_new_tokens": 1}
        resp = client.post("/complete", json=req)
        assert resp.status_code == 400
        assert "exceeds" in resp.json()["detail"]

    def test_validation_errors_are_400_class(self, client):
        resp = client.post("/complete", json={"prompt": "x", "temperature": -1})
        assert 400 <= resp.status_code < 500
        resp = client.post("/complete", json={"prompt": "x", "num_results": 0})
        assert 400 <= resp.status_code < 500


class TestPremisePrediction:
    def test_classes_agree_with_harness(self, client, service_env):
        library, sig = service_env["library"], service_env["sig_map"]
        req = {
            "prompt": conj_line(service_env, "th_pair"),
            "mode": "premise_prediction",
            "beam_width": 3,
            "num_results": 2,
            "max_new_tokens": 16,
        }
        results = client.post("/complete", json=req).json()
        assert results
        for result in results:
            if not result["text"]:
                assert result["premise_classes"] in ([], None)
                continue
            lines = result["text"].split("\n")
            assert len(result["premise_classes"]) == len(lines)
            for line, cls in zip(lines, result["premise_classes"]):
                expected = harness.classify_premise(
                    harness.decode_line(tuple(line.split()), sig), library
                )
                if isinstance(expected, harness.Known):
                    assert cls["kind"] == "known" and cls["name"] == expected.name
                elif isinstance(expected, harness.NewConjecture):
                    assert cls["kind"] == "new"
                else:
                    assert cls["kind"] == "unparsable"

    def test_invalid_prefix_prompt_rejected(self, client):
        req = {"prompt": "cp1 cp1", "mode": "premise_prediction"}
        resp = client.post("/complete", json=req)
        assert resp.status_code == 400

    def test_premise_mode_needs_library(self, service_env):
        app = create_app(checkpoint_path=service_env["ckpt"])
        with TestClient(app) as bare:
            resp = bare.post(
                "/complete",
                json={"prompt": "cp1", "mode": "premise_prediction"},
            )
            assert resp.status_code == 400
