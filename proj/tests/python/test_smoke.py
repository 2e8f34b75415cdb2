"""Smoke tests for the python module: exercises one path through each major
surface (ingestion, schemes, tokenizer, encoder, training, metrics,
correspondence, html export)."""

import math
import sys

try:
    import arganno as ag
except ImportError:
    import _arganno as ag


def test_ingest_and_documents():
    doc = ag.parse_brat_essay(
        "We should ban X. Because Y.",
        "T1\tMajorClaim 0 16\tWe should ban X.",
        "e1",
    )
    assert doc.doc_id == "e1"
    assert len(doc.spans) == 1
    assert doc.spans[0].tag == "MC"
    assert doc.spans[0].range.begin == 0 and doc.spans[0].range.end == 16
    assert not ag.check_document(doc)

    sentences = ag.split_sentences("I agree. Why? Because!")
    assert len(sentences) == 3

    round_trip = ag.document_from_json(ag.document_to_json(doc))
    assert round_trip.text == doc.text

    docs = ag.parse_persuade_table(
        "essay_id,discourse_start,discourse_end,discourse_type,predictionstring,full_text\n"
        'd1,0,11,Lead,0 1,"Hello world this is text"\n'
    )
    assert len(docs) == 1 and docs[0].spans[0].tag == "L"

    html_doc = ag.parse_html_essay("<p>A. B.</p><p>C.</p>", "h")
    assert len(html_doc.paragraphs) == 2 and len(html_doc.sentences) == 3


def test_schemes():
    arrow = ag.tag_set(ag.SchemeId.ARROW)
    assert arrow.tags == ["I1", "I2", "E1", "E2", "O", "C", "T"]
    assert ag.resolve_pair("E1", "I2", arrow) == "I2"
    assert ag.resolve_votes(["E1", "E1", "E2", "E2", "T"], arrow) == "E1"
    try:
        ag.resolve_votes([], arrow)
        raise AssertionError("expected UsageError")
    except ag.UsageError:
        pass


def test_tokenizer_roundtrip():
    vocab = ag.train_vocab(["the cat sat on the mat", "a cat ran"], 64)
    words = ["the", "cat", "sat"]
    tokens = ag.encode_words(words, vocab)
    assert len(tokens.word_alignment) == 3
    assert ag.decode(tokens.token_ids, vocab) == "the cat sat"


def test_encoder_and_training():
    vocab = ag.train_vocab(["first because evidence however finally often second"], 96)
    cfg = ag.ModelConfig()
    cfg.layers = 1
    cfg.heads = 2
    cfg.width = 8
    cfg.segment_len = 16
    cfg.mem_len = 16
    cfg.vocab_size = vocab.size()
    cfg.num_labels = 3
    params = ag.Params.init(cfg, 7)
    hidden = ag.stream_document(params, [8, 9, 10, 11])
    assert len(hidden) == 4 and len(hidden[0]) == 8
    assert all(math.isfinite(v) for row in hidden for v in row)

    doc = ag.parse_brat_essay("small claim here. and premise there.",
                              "T1\tClaim 0 17\tsmall claim here.", "t")
    dataset = ag.build_task_dataset([doc], ag.Task.aae_bio, vocab)
    assert len(dataset) == 1
    tc = ag.TrainConfig()
    tc.epochs = 2
    tc.learning_rate = 0.01
    tc.seed = 5
    result = ag.train_with_dev(params, dataset, dataset, tc)
    assert len(result.log) == 2
    report = ag.evaluate_examples(result.params, dataset)
    assert 0.0 <= report.micro_accuracy <= 1.0


def test_metrics():
    kappa = ag.cohen_kappa(["x", "x", "o", "o"], ["x", "o", "o", "o"], "x")
    assert abs(kappa - 0.5) < 1e-12
    p, r, f1 = ag.prf1(["x", "x", "o"], ["x", "o", "o"], "x")
    assert abs(p - 0.5) < 1e-12 and abs(r - 1.0) < 1e-12
    scheme = ag.tag_set(ag.SchemeId.PERSUADE)
    report = ag.evaluate_labels(["L", "E"], ["L", "E"], scheme)
    assert report.macro_f1 == 1.0


def test_correspondence_and_html():
    arrow = ag.tag_set(ag.SchemeId.ARROW)
    matrix = ag.cross_tabulate(["I1", "I1", "C"], ["I1", "E2", "C"], arrow, arrow)
    i1 = matrix.row_tags.index("I1")
    assert abs(sum(matrix.cells[i1]) - 100.0) < 1e-9

    doc = ag.parse_brat_essay("colored words here.", "T1\tClaim 0 13\tcolored words", "c")
    labels = ag.collapse_to_words(doc, ag.tag_set(ag.SchemeId.AAE_COMPONENT))
    assert labels == ["Cl", "Cl", "None"]
    html = ag.export_html(doc, ag.tag_set(ag.SchemeId.AAE_COMPONENT),
                          ag.default_palette(ag.tag_set(ag.SchemeId.AAE_COMPONENT)))
    assert "colored words" in html


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for test in tests:
        test()
        print(f"ok {test.__name__}")
    print(f"{len(tests)} python smoke tests passed")


if __name__ == "__main__":
    main()
