#!/usr/bin/env python3
"""Regenerates the synthetic 22-file project under fixtures/table2/src.

Eight files are sized so the whole file plus an adaptive output reserve
overflows a 2048-token window under the lexeme-fallback tokenizer; the
other fourteen stay comfortably inside it. Individual methods are small,
so method-level prompts always fit. Methods call earlier methods in the
same class and a couple of cross-file helpers so the call graph has
depth. Deterministic: no RNG, safe to re-run.
"""

import os

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "table2", "src")

BIG_TARGET = 3000   # fallback tokens; reserve min(1024, 2*src) pushes these out of a 2048 window
SMALL_TARGET = 780  # fits: src + overhead + 1024 reserve <= 2048

BIG = [
    "ArgumentParser",
    "CommandLine",
    "HelpFormatter",
    "OptionBuilder",
    "OptionGroup",
    "OptionRegistry",
    "PatternParser",
    "TypeHandler",
]

SMALL = [
    "AlreadySelectedException",
    "AmbiguousOptionException",
    "BasicResolver",
    "CharConverter",
    "DefaultValues",
    "DeprecatedAttributes",
    "MissingArgumentException",
    "MissingOptionException",
    "OptionValidator",
    "ParseException",
    "QuoteStyle",
    "TokenStream",
    "UnrecognizedOptionException",
    "ValueSeparator",
]


def fallback_tokens(data: bytes) -> int:
    """Mirror of the fallback rule: identifier runs cost ceil(len/8),
    other non-whitespace bytes cost 1, whitespace is free."""
    total = 0
    run = 0
    for b in data:
        c = chr(b)
        if c.isascii() and (c.isalnum() or c in "_$"):
            run += 1
        else:
            if run:
                total += (run + 7) // 8
                run = 0
            if c not in " \t\n\x0c\r":
                total += 1
    if run:
        total += (run + 7) // 8
    return total


def method(i: int, cls: str, cross: str | None) -> str:
    a, b, c = 3 + i % 5, 11 + i % 7, 5 + i % 3
    if i == 0:
        tail = "shifted"
    elif cross and i % 9 == 4:
        tail = f"{cross}.step00(shifted)"
    else:
        tail = f"step{i - 1:02d}(shifted)"
    return (
        f"    /** Step {i} of the {cls} pipeline; folds the running total. */\n"
        f"    public static int step{i:02d}(int value) {{\n"
        f"        int total = value * {a} + {b};\n"
        f"        int shifted = total + {c};\n"
        f"        return {tail};\n"
        f"    }}\n"
    )


def render(cls: str, target: int, cross: str | None) -> bytes:
    head = f"public final class {cls} {{\n"
    tail = "}\n"
    body = []
    i = 0
    while True:
        candidate = head + "\n".join(body + [method(i, cls, cross)]) + tail
        if body and fallback_tokens(candidate.encode()) > target:
            break
        body.append(method(i, cls, cross))
        i += 1
    return (head + "\n".join(body) + tail).encode()


def main() -> None:
    os.makedirs(OUT, exist_ok=True)
    for idx, cls in enumerate(BIG):
        cross = BIG[idx - 1] if idx else None
        path = os.path.join(OUT, cls + ".java")
        data = render(cls, BIG_TARGET, cross)
        with open(path, "wb") as fh:
            fh.write(data)
        print(f"{cls}.java: {fallback_tokens(data)} tokens")
    for idx, cls in enumerate(SMALL):
        cross = BIG[idx % len(BIG)]
        path = os.path.join(OUT, cls + ".java")
        data = render(cls, SMALL_TARGET, cross)
        with open(path, "wb") as fh:
            fh.write(data)
        print(f"{cls}.java: {fallback_tokens(data)} tokens")


if __name__ == "__main__":
    main()
