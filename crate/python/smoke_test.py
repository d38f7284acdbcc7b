#!/usr/bin/env python3
"""Smoke test for the codefrag_py extension module.

Builds are produced by `cargo build -p codefrag-py`; this script finds
the cdylib under target/, stages it under an importable name, and
exercises each binding. Exits non-zero on the first failure.
"""

import os
import shutil
import sys
import tempfile

REPO = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

SAMPLE = b"""\
class Sample {
    /** Doubles a value. */
    int twice(int x) {
        return helper(x) + helper(x);
    }

    int helper(int x) {
        return x; // "{" stays opaque
    }
}
"""


def find_cdylib() -> str:
    names = ("libcodefrag_py.so", "libcodefrag_py.dylib", "codefrag_py.dll")
    candidates = []
    for profile in ("debug", "release"):
        for name in names:
            path = os.path.join(REPO, "target", profile, name)
            if os.path.isfile(path):
                candidates.append(path)
    if not candidates:
        sys.exit("cdylib not found; run `cargo build -p codefrag-py` first")
    return max(candidates, key=os.path.getmtime)


def main() -> None:
    stage = tempfile.mkdtemp(prefix="codefrag-py-")
    shutil.copy(find_cdylib(), os.path.join(stage, "codefrag_py.so"))
    sys.path.insert(0, stage)
    import codefrag_py as cf

    n = cf.count_tokens_fallback(b"public static int main")
    assert n == 4, n
    assert cf.fits(2048, 2048)
    assert not cf.fits(2048, 2049)
    assert not cf.fits(2048, 1024, reserved_output=1025)

    frags = cf.extract_fragments(SAMPLE, rel_path="Sample.java")
    names = sorted(f["name"] for f in frags)
    assert names == ["helper", "twice"], names
    twice = next(f for f in frags if f["name"] == "twice")
    start, end = twice["full_span"]
    assert SAMPLE[start:end].startswith(b"/** Doubles"), SAMPLE[start:end][:30]
    assert twice["token_count"] > 0

    merges = os.path.join(REPO, "fixtures", "tiny.merges")
    model = cf.TokenModel.load(merges)
    assert model.name == "tiny"
    assert len(model.hash) == 64
    assert model.vocab_size > 256
    assert model.count(b"the") < 3  # "th"+"e" or better

    corpus = tempfile.mkdtemp(prefix="codefrag-corpus-")
    with open(os.path.join(corpus, "Sample.java"), "wb") as fh:
        fh.write(SAMPLE)
    report = cf.analyze_project(corpus)
    assert report["n_files"] == 1, report
    assert report["n_methods"] == 2, report
    assert report["tokenizer_name"] == "lexeme-fallback"

    graph = cf.call_graph(corpus)
    assert len(graph["nodes"]) == 2
    callees = {e["to"] for e in graph["edges"]}
    assert any("helper" in c for c in callees), graph["edges"]
    flat = [frag for batch in graph["batches"] for frag in batch]
    assert len(flat) == 2
    assert "helper" in flat[0]  # callee first

    print("smoke test: all bindings OK")


if __name__ == "__main__":
    main()
