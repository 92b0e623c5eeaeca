"""Letter substitution systems for quasiperiodic sequences.

Sequences over the alphabet {o, a, b} are grown by inflation rules that
replace every letter by a fixed word.  The built-in rules describe the
boundary vertex sequences of regular hyperbolic tilings (named by their
Schlafli symbol, e.g. "3,7") together with the classic Fibonacci,
silver-mean and Thue-Morse substitutions.

Symmetrized rules split the trailing letter of every image into two
half-tokens so that the boundary letter shared by adjacent images is
attributed to both parents.  Merging adjacent half-token pairs restores
the plain inflation image letter for letter, while the merged letters
remember both parents.  That ancestry is what the multiscale coupling
construction consumes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

__all__ = [
    "Letter",
    "LetterSequence",
    "InflationRule",
    "SubstitutionMatrix",
    "SymmetrizedInflation",
    "ClosureError",
    "SymmetrizationError",
    "BUILTIN_RULES",
    "get_rule",
    "rule_names",
    "inflate",
    "inflate_symmetrized",
    "substitution_matrix",
    "predict_length",
    "is_factor",
]

HALF_MARK = "√"  # the two-character token "√x" denotes half a letter x


class ClosureError(ValueError):
    """A letter appears without an inflation rule for it."""


class SymmetrizationError(ValueError):
    """Half-tokens cannot be merged back into whole letters."""


@dataclass(frozen=True, slots=True)
class Letter:
    symbol: str
    half: bool = False

    def __str__(self) -> str:
        return (HALF_MARK + self.symbol) if self.half else self.symbol


def _tokenize(text: str) -> tuple[Letter, ...]:
    """Parse a word like "aab" or "√b a a √b" (spaces optional)."""
    letters = []
    chars = iter(text)
    for ch in chars:
        if ch.isspace():
            continue
        if ch == HALF_MARK:
            try:
                sym = next(chars)
            except StopIteration:
                raise ValueError(f"dangling {HALF_MARK!r} in {text!r}") from None
            letters.append(Letter(sym, half=True))
        else:
            letters.append(Letter(ch))
    return tuple(letters)


def _format_word(letters) -> str:
    if any(l.half for l in letters):
        return " ".join(str(l) for l in letters)
    return "".join(l.symbol for l in letters)


@dataclass(frozen=True)
class LetterSequence:
    """An ordered word of letters, cyclic (a ring) by default."""

    letters: tuple[Letter, ...]
    cyclic: bool = True
    step: int = 0

    @classmethod
    def from_string(cls, text: str, cyclic: bool = True, step: int = 0) -> "LetterSequence":
        return cls(_tokenize(text), cyclic=cyclic, step=step)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __str__(self) -> str:
        return _format_word(self.letters)

    def symbols(self) -> str:
        """The word as a plain string; only valid with no half-tokens."""
        if any(l.half for l in self.letters):
            raise ValueError("sequence contains half-tokens")
        return "".join(l.symbol for l in self.letters)

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for l in self.letters:
            out[l.symbol] = out.get(l.symbol, 0) + 1
        return out


@dataclass(frozen=True)
class InflationRule:
    """A substitution rule: every letter maps to a fixed word.

    ``symmetrized`` optionally holds the half-token form of each image,
    with a leading and trailing half of the shared boundary letter.
    """

    name: str
    rules: dict[str, tuple[Letter, ...]]
    symmetrized: dict[str, tuple[Letter, ...]] | None = None
    default_seed: str = "a"

    @classmethod
    def from_words(
        cls,
        name: str,
        rules: dict[str, str],
        symmetrized: dict[str, str] | None = None,
        default_seed: str = "a",
    ) -> "InflationRule":
        return cls(
            name=name,
            rules={k: _tokenize(v) for k, v in rules.items()},
            symmetrized=(
                {k: _tokenize(v) for k, v in symmetrized.items()} if symmetrized else None
            ),
            default_seed=default_seed,
        )

    @property
    def alphabet(self) -> tuple[str, ...]:
        return tuple(sorted(self.rules))

    def image(self, symbol: str) -> tuple[Letter, ...]:
        try:
            return self.rules[symbol]
        except KeyError:
            raise ClosureError(f"rule {self.name!r} has no image for letter {symbol!r}") from None

    def symmetrized_image(self, symbol: str) -> tuple[Letter, ...]:
        if self.symmetrized is None:
            raise SymmetrizationError(f"rule {self.name!r} has no symmetrized form")
        try:
            return self.symmetrized[symbol]
        except KeyError:
            raise ClosureError(
                f"symmetrized rule {self.name!r} has no image for letter {symbol!r}"
            ) from None

    def validate(self) -> None:
        """Check closure: every right-hand-side letter has a rule."""
        for sym, word in self.rules.items():
            for l in word:
                if l.symbol not in self.rules and l.symbol != "o":
                    raise ClosureError(
                        f"rule {self.name!r}: image of {sym!r} uses unruled letter {l.symbol!r}"
                    )

    def to_json(self) -> str:
        doc = {
            "name": self.name,
            "rules": {k: _format_word(v) for k, v in self.rules.items()},
            "seed": self.default_seed,
        }
        if self.symmetrized is not None:
            doc["symmetrized_rules"] = {k: _format_word(v) for k, v in self.symmetrized.items()}
        return json.dumps(doc, ensure_ascii=False, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "InflationRule":
        doc = json.loads(text)
        return cls.from_words(
            name=doc["name"],
            rules=doc["rules"],
            symmetrized=doc.get("symmetrized_rules"),
            default_seed=doc.get("seed", "a"),
        )


# Built-in rules.  Hyperbolic vertex rules carry a symmetrized form that
# splits the trailing boundary letter; pure substitutions (Fibonacci,
# silver-mean, Thue-Morse) have unambiguous single parents and need none.
BUILTIN_RULES: dict[str, InflationRule] = {
    "3,7": InflationRule.from_words(
        "3,7",
        {"o": "aaab", "a": "aab", "b": "ab"},
        symmetrized={"o": "√b a a a √b", "a": "√b a a √b", "b": "√b a √b"},
        default_seed="ooo",
    ),
    "3,8": InflationRule.from_words(
        "3,8",
        {"o": "aaaab", "a": "aaab", "b": "aab"},
        symmetrized={"o": "√b a a a a √b", "a": "√b a a a √b", "b": "√b a a √b"},
        default_seed="ooo",
    ),
    "4,5": InflationRule.from_words(
        "4,5",
        {"a": "ababa", "b": "aba"},
        symmetrized={"a": "√a a b a b √a", "b": "√a a b √a"},
        default_seed="aaaa",
    ),
    "6,4": InflationRule.from_words(
        "6,4",
        {"a": "aba", "b": "abaaaba"},
        symmetrized={"a": "√a a b √a", "b": "√a a b a a a b √a"},
        default_seed="aaaaaa",
    ),
    "fibonacci": InflationRule.from_words(
        "fibonacci", {"a": "ab", "b": "a"}, default_seed="a"
    ),
    "silver-mean": InflationRule.from_words(
        "silver-mean", {"a": "aba", "b": "a"}, default_seed="a"
    ),
    "thue-morse": InflationRule.from_words(
        "thue-morse", {"a": "ab", "b": "ba"}, default_seed="a"
    ),
}


def get_rule(name: str) -> InflationRule:
    try:
        return BUILTIN_RULES[name]
    except KeyError:
        raise KeyError(
            f"unknown rule {name!r}; built-ins: {', '.join(sorted(BUILTIN_RULES))}"
        ) from None


def rule_names() -> tuple[str, ...]:
    return tuple(sorted(BUILTIN_RULES))


def inflate(seed: LetterSequence, rule: InflationRule, n: int) -> LetterSequence:
    """Apply the inflation rule n times to the seed word."""
    if n < 0:
        raise ValueError("step count must be nonnegative")
    for l in seed.letters:
        if l.half:
            raise ValueError("cannot inflate half-tokens")
        if l.symbol not in rule.rules:
            raise ClosureError(f"seed letter {l.symbol!r} has no rule in {rule.name!r}")
    letters = seed.letters
    for _ in range(n):
        letters = tuple(x for l in letters for x in rule.image(l.symbol))
    return LetterSequence(letters, cyclic=seed.cyclic, step=seed.step + n)


@dataclass(frozen=True)
class SymmetrizedInflation:
    """Inflation result with per-letter ancestry.

    ``layers[m]`` holds the symbols after m steps; ``parents[m][i]`` are
    the indices in layer m-1 that letter i of layer m descends from (two
    indices for a letter merged from a pair of half-tokens, one else).
    ``parents[0]`` is empty by convention.
    """

    sequence: LetterSequence
    layers: tuple[tuple[str, ...], ...]
    parents: tuple[tuple[tuple[int, ...], ...], ...]


def _inflate_layer_with_ancestry(
    symbols: tuple[str, ...], rule: InflationRule, symmetrized: bool
) -> tuple[tuple[str, ...], tuple[tuple[int, ...], ...]]:
    """One inflation step, returning the new symbols and their parents."""
    tokens: list[tuple[Letter, int]] = []
    for i, sym in enumerate(symbols):
        word = rule.symmetrized_image(sym) if symmetrized else rule.image(sym)
        tokens.extend((l, i) for l in word)
    if not symmetrized:
        return tuple(l.symbol for l, _ in tokens), tuple((i,) for _, i in tokens)

    # Merge runs of adjacent half-tokens pairwise.  The scan starts at the
    # first whole letter so that a leading half-run wraps around and pairs
    # with the trailing one.  For images of the form "√s w √s" this scan
    # order reproduces the plain inflation image position by position, with
    # the wrap-merged boundary letter landing at the end of the ring.
    m = len(tokens)
    start = next((k for k, (l, _) in enumerate(tokens) if not l.half), None)
    if start is None:
        raise SymmetrizationError("inflation produced only half-tokens")
    order = [(k + start) % m for k in range(m)]
    out_syms: list[str] = []
    out_parents: list[tuple[int, ...]] = []
    k = 0
    while k < m:
        letter, parent = tokens[order[k]]
        if not letter.half:
            out_syms.append(letter.symbol)
            out_parents.append((parent,))
            k += 1
            continue
        if k + 1 >= m:
            raise SymmetrizationError("odd number of adjacent half-tokens on the ring")
        other, other_parent = tokens[order[k + 1]]
        if not other.half:
            raise SymmetrizationError("unpaired half-token next to a whole letter")
        if other.symbol != letter.symbol:
            raise SymmetrizationError(
                f"adjacent half-tokens disagree: {letter} vs {other}"
            )
        out_syms.append(letter.symbol)
        out_parents.append((parent, other_parent))
        k += 2
    return tuple(out_syms), tuple(out_parents)


def inflate_with_ancestry(
    seed: LetterSequence, rule: InflationRule, n: int, symmetrized: bool
) -> SymmetrizedInflation:
    if n < 0:
        raise ValueError("step count must be nonnegative")
    if symmetrized and not seed.cyclic:
        raise SymmetrizationError("symmetrized inflation requires a cyclic seed")
    layers = [tuple(l.symbol for l in seed.letters)]
    parents: list[tuple[tuple[int, ...], ...]] = [tuple()]
    for _ in range(n):
        syms, par = _inflate_layer_with_ancestry(layers[-1], rule, symmetrized)
        layers.append(syms)
        parents.append(par)
    final = LetterSequence(
        tuple(Letter(s) for s in layers[-1]), cyclic=seed.cyclic, step=seed.step + n
    )
    return SymmetrizedInflation(final, tuple(layers), tuple(parents))


def inflate_symmetrized(seed: LetterSequence, rule: InflationRule, n: int) -> SymmetrizedInflation:
    """Inflate with the symmetrized rule and record letter ancestry.

    The returned letters match ``inflate`` position by position (the
    merged boundary letter of the wrap pair is placed last on the ring).
    """
    if rule.symmetrized is None:
        raise SymmetrizationError(f"rule {rule.name!r} has no symmetrized form")
    return inflate_with_ancestry(seed, rule, n, symmetrized=True)


@dataclass(frozen=True)
class SubstitutionMatrix:
    """counts[y, x] = occurrences of letter y in the image of letter x."""

    letters: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]

    def as_lists(self) -> list[list[int]]:
        return [list(row) for row in self.counts]

    def apply(self, vector: dict[str, int]) -> dict[str, int]:
        vec = [vector.get(x, 0) for x in self.letters]
        out = [sum(row[j] * vec[j] for j in range(len(vec))) for row in self.counts]
        return dict(zip(self.letters, out))

    def power_apply(self, vector: dict[str, int], n: int) -> dict[str, int]:
        out = dict(vector)
        for _ in range(n):
            out = self.apply(out)
        return out


def substitution_matrix(
    rule: InflationRule, letters: tuple[str, ...] | None = None
) -> SubstitutionMatrix:
    if letters is None:
        letters = rule.alphabet
    rows = []
    for y in letters:
        row = []
        for x in letters:
            word = rule.image(x)
            row.append(sum(1 for l in word if l.symbol == y))
        rows.append(tuple(row))
    return SubstitutionMatrix(tuple(letters), tuple(rows))


def predict_length(seed: LetterSequence, rule: InflationRule, n: int) -> int:
    """Length of inflate(seed, rule, n), via letter counts (exact integers)."""
    if n < 0:
        raise ValueError("step count must be nonnegative")
    mat = substitution_matrix(rule)
    counts = mat.power_apply(seed.counts(), n)
    return sum(counts.values())


def is_factor(needle: LetterSequence, haystack: LetterSequence) -> bool:
    """True if the needle word occurs contiguously in the haystack.

    A cyclic haystack is searched across its wrap point as well.
    """
    nd = needle.symbols()
    hs = haystack.symbols()
    if not nd:
        return True
    if haystack.cyclic and len(hs) > 1:
        hs = hs + hs[: len(nd) - 1]
    return nd in hs
