"""Tokenization: byte-level by default, or a token list supplied by file.

A file vocabulary is a JSON array of token strings; ids follow array order
and the three specials (PAD, SEP, EOS) are appended after it.  Encoding is
greedy longest-match, so the file must cover every single character the
corpus uses (checked at encode time).
"""

from __future__ import annotations

import json
from pathlib import Path

from .specs import EOS, PAD, SEP, VOCAB_SIZE


class VocabError(ValueError):
    pass


class ByteVocab:
    size = VOCAB_SIZE
    pad, sep, eos = PAD, SEP, EOS

    def encode(self, text: str) -> tuple[int, ...]:
        return tuple(text.encode("utf-8"))

    def decode(self, ids) -> str:
        return bytes(i for i in ids if i < 256).decode("utf-8",
                                                       errors="replace")


class FileVocab:
    def __init__(self, tokens: list[str]):
        if len(tokens) != len(set(tokens)) or not all(tokens):
            raise VocabError("tokens must be unique and non-empty")
        self.tokens = list(tokens)
        self.index = {tok: i for i, tok in enumerate(self.tokens)}
        self.max_len = max(len(t) for t in self.tokens)
        self.pad = len(self.tokens)
        self.sep = len(self.tokens) + 1
        self.eos = len(self.tokens) + 2
        self.size = len(self.tokens) + 3

    def encode(self, text: str) -> tuple[int, ...]:
        out = []
        pos = 0
        while pos < len(text):
            for width in range(min(self.max_len, len(text) - pos), 0, -1):
                tid = self.index.get(text[pos:pos + width])
                if tid is not None:
                    out.append(tid)
                    pos += width
                    break
            else:
                raise VocabError(f"no token covers {text[pos]!r} at {pos}")
        return tuple(out)

    def decode(self, ids) -> str:
        return "".join(self.tokens[i] for i in ids if i < len(self.tokens))


BYTE_VOCAB = ByteVocab()


def load_vocab(path: str | Path) -> FileVocab:
    return FileVocab(json.loads(Path(path).read_text(encoding="utf-8")))


def vocab_for(spec) -> ByteVocab | FileVocab:
    if spec.vocab_file is None:
        return BYTE_VOCAB
    vocab = load_vocab(spec.vocab_file)
    if vocab.size != spec.vocab_size:
        raise VocabError(
            f"vocab file has {vocab.size} ids but the spec says "
            f"{spec.vocab_size}")
    return vocab
