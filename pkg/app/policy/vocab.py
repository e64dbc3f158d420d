from typing import Dict, Iterable, List, Sequence

BOS = "<bos>"
EOS = "<eos>"
UNK = "<unk>"
SPECIALS = (BOS, EOS, UNK)


class Vocab:
    """Whitespace word vocabulary with dense ids; specials occupy ids 0..2"""

    def __init__(self, tokens: Sequence[str]):
        tokens = list(tokens)
        if tuple(tokens[: len(SPECIALS)]) != SPECIALS:
            raise ValueError(f"vocabulary must start with {SPECIALS}")
        if len(set(tokens)) != len(tokens):
            raise ValueError("vocabulary tokens must be unique")
        self.tokens: List[str] = tokens
        self.ids: Dict[str, int] = {token: i for i, token in enumerate(tokens)}

    @classmethod
    def build(cls, texts: Iterable[str]):
        words = sorted({word for text in texts for word in text.split()} - set(SPECIALS))
        return cls(list(SPECIALS) + words)

    def __len__(self) -> int:
        return len(self.tokens)

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocab) and self.tokens == other.tokens

    @property
    def bos_id(self) -> int:
        return self.ids[BOS]

    @property
    def eos_id(self) -> int:
        return self.ids[EOS]

    @property
    def unk_id(self) -> int:
        return self.ids[UNK]

    def encode(self, text: str) -> List[int]:
        ids = [self.ids.get(word, self.unk_id) for word in text.split()]
        return ids or [self.unk_id]

    def encode_target(self, text: str) -> List[int]:
        """Rewrite ids terminated by EOS"""
        return [self.ids.get(word, self.unk_id) for word in text.split()] + [self.eos_id]

    def decode(self, ids: Iterable[int]) -> str:
        words = []
        for i in ids:
            if i == self.eos_id:
                break
            if i in (self.bos_id, self.unk_id):
                continue
            words.append(self.tokens[i])
        return " ".join(words)
