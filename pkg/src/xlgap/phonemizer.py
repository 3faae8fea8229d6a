"""Rule-based grapheme-to-phoneme conversion and IPA phoneme segmentation.

Pipeline for one line of text::

    text --g2p--> IPA string --segment--> [phonemes] --space_phonemes--> "p h o n e m e s"

G2P applies an ordered rule table left to right: at each position the first
rule (by ``order``) whose source matches there and whose contexts hold is
applied, and its source is consumed. Contexts are literal strings matched
against the input text; ``#`` stands for a word boundary (start or end of
the text, or a whitespace character).

Segmentation is greedy longest match against a phoneme inventory.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import ConversionError, ParseError, SegmentationError

BOUNDARY = "#"


def nfc(text: str) -> str:
    return unicodedata.normalize("NFC", text)


@dataclass(frozen=True)
class RewriteRule:
    order: int
    source: str
    target: str
    left_context: str = ""
    right_context: str = ""

    def __post_init__(self):
        if not self.source:
            raise ValueError("rule source must be non-empty")
        for name in ("source", "target", "left_context", "right_context"):
            object.__setattr__(self, name, nfc(getattr(self, name)))

    def matches(self, text: str, pos: int) -> bool:
        if not text.startswith(self.source, pos):
            return False
        return _left_ok(text, pos, self.left_context) and _right_ok(
            text, pos + len(self.source), self.right_context
        )


def _left_ok(text: str, pos: int, ctx: str) -> bool:
    p = pos - 1
    for ch in reversed(ctx):
        if ch == BOUNDARY:
            if p >= 0 and not text[p].isspace():
                return False
            p -= 1
        else:
            if p < 0 or text[p] != ch:
                return False
            p -= 1
    return True


def _right_ok(text: str, pos: int, ctx: str) -> bool:
    p = pos
    for ch in ctx:
        if ch == BOUNDARY:
            if p < len(text) and not text[p].isspace():
                return False
            p += 1
        else:
            if p >= len(text) or text[p] != ch:
                return False
            p += 1
    return True


@dataclass(frozen=True)
class RuleTable:
    language: str
    rules: tuple[RewriteRule, ...]

    def __post_init__(self):
        rules = tuple(sorted(self.rules, key=lambda r: r.order))
        orders = [r.order for r in rules]
        if len(set(orders)) != len(orders):
            raise ValueError("rule orders must be unique")
        object.__setattr__(self, "rules", rules)


@dataclass(frozen=True)
class PhonemeInventory:
    units: frozenset

    def __post_init__(self):
        units = frozenset(nfc(u) for u in self.units)
        if not units:
            raise ValueError("inventory must not be empty")
        if "" in units:
            raise ValueError("inventory units must be non-empty")
        object.__setattr__(self, "units", units)
        object.__setattr__(self, "_max_len", max(len(u) for u in units))

    @property
    def max_len(self) -> int:
        return self._max_len

    def __contains__(self, unit) -> bool:
        return unit in self.units

    def is_prefix_free(self) -> bool:
        return not any(a != b and b.startswith(a) for a in self.units for b in self.units)


# ------------------------------------------------------------------ loading


def parse_rules(text: str, language: str = "und", path=None) -> RuleTable:
    """Parse a rule TSV: ``order, source, target, left_context, right_context``.

    Blank lines, lines starting with ``#`` and a leading header row
    (first field ``order``) are skipped. Trailing context columns may be
    omitted.
    """
    rules = []
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.startswith("#"):
            continue
        cells = raw.rstrip("\r\n").split("\t")
        if cells[0].strip() == "order" and not rules:
            continue
        if not 3 <= len(cells) <= 5:
            raise ParseError(f"expected 3-5 tab-separated fields, got {len(cells)}", path=path, line=lineno)
        cells += [""] * (5 - len(cells))
        try:
            order = int(cells[0])
        except ValueError:
            raise ParseError(f"order {cells[0]!r} is not an integer", path=path, line=lineno) from None
        if order in seen:
            raise ParseError(f"duplicate order {order} (first on line {seen[order]})", path=path, line=lineno)
        if not cells[1]:
            raise ParseError("empty source", path=path, line=lineno)
        seen[order] = lineno
        rules.append(RewriteRule(order, cells[1], cells[2], cells[3], cells[4]))
    return RuleTable(language, tuple(rules))


def load_rules(path, language: str | None = None) -> RuleTable:
    path = Path(path)
    return parse_rules(path.read_text(encoding="utf-8"), language or path.stem, path=path)


def parse_inventory(text: str) -> PhonemeInventory:
    return PhonemeInventory(frozenset(line.strip() for line in text.splitlines() if line.strip()))


def load_inventory(path) -> PhonemeInventory:
    return parse_inventory(Path(path).read_text(encoding="utf-8"))


def bundled_tables() -> list[str]:
    """Names of the rule tables shipped with the package."""
    root = resources.files("xlgap") / "data" / "rules"
    return sorted(p.name[: -len(".tsv")] for p in root.iterdir() if p.name.endswith(".tsv"))


def load_bundled(name: str) -> tuple[RuleTable, PhonemeInventory]:
    root = resources.files("xlgap") / "data" / "rules"
    rules = parse_rules((root / f"{name}.tsv").read_text(encoding="utf-8"), name)
    inventory = parse_inventory((root / f"{name}.inv").read_text(encoding="utf-8"))
    return rules, inventory


def check_targets(table: RuleTable, inventory: PhonemeInventory) -> None:
    """Raise SegmentationError if some rule target cannot be segmented by ``inventory``."""
    for rule in table.rules:
        try:
            segment(rule.target, inventory)
        except SegmentationError as exc:
            raise SegmentationError(f"rule {rule.order} target {rule.target!r}: {exc}", exc.offset) from None


# ---------------------------------------------------------------- pipeline


def g2p(text: str, table: RuleTable, passthrough: bool = False) -> str:
    text = nfc(text)
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            out.append(ch)
            i += 1
            continue
        for rule in table.rules:
            if rule.matches(text, i):
                out.append(rule.target)
                i += len(rule.source)
                break
        else:
            if not passthrough:
                raise ConversionError(f"no rule for {ch!r}", i)
            out.append(ch)
            i += 1
    return "".join(out)


def segment(ipa: str, inventory: PhonemeInventory, passthrough: bool = False) -> list[str]:
    """Split ``ipa`` into inventory units by greedy longest match.

    With ``passthrough`` an unmatched character becomes its own unit, and an
    unmatched combining mark is attached to the preceding unit. The output
    always concatenates back to the (NFC-normalized) input.
    """
    ipa = nfc(ipa)
    units: list[str] = []
    i = 0
    while i < len(ipa):
        for size in range(min(inventory.max_len, len(ipa) - i), 0, -1):
            if ipa[i : i + size] in inventory:
                units.append(ipa[i : i + size])
                i += size
                break
        else:
            if not passthrough:
                raise SegmentationError(f"no inventory unit matches {ipa[i]!r}", i)
            ch = ipa[i]
            if unicodedata.combining(ch) and units:
                units[-1] += ch
            else:
                units.append(ch)
            i += 1
    return units


def space_phonemes(phonemes) -> str:
    for p in phonemes:
        if not p:
            raise ValueError("empty phoneme")
        if any(c.isspace() for c in p):
            raise ValueError(f"phoneme {p!r} contains whitespace")
    return " ".join(phonemes)


def phonemize(text: str, table: RuleTable, inventory: PhonemeInventory, passthrough: bool = False) -> str:
    """Full pipeline for one line; word boundaries become ordinary single spaces."""
    ipa = g2p(text, table, passthrough=passthrough)
    phonemes = []
    for word in ipa.split():
        phonemes.extend(segment(word, inventory, passthrough=passthrough))
    return space_phonemes(phonemes)
