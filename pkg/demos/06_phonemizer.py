"""
From spelling to space-separated phonemes
=========================================

Ordered rewrite rules turn text into IPA, greedy longest match splits the
IPA into inventory units, and the units are joined with single spaces so a
whitespace tokenizer sees one token per phoneme.
"""

from xlgap.phonemizer import (
    PhonemeInventory,
    bundled_tables,
    g2p,
    load_bundled,
    phonemize,
    segment,
    space_phonemes,
)
from xlgap.errors import ConversionError

print("bundled tables:", bundled_tables())

rules, inventory = load_bundled("demo")
for word in ("phase", "cell", "cat", "gem", "yes", "any"):
    print(f"{word:6s} -> {g2p(word, rules):6s} -> {phonemize(word, rules, inventory)}")

# multi-character units win over their prefixes
inv = PhonemeInventory(frozenset({"t", "ʃ", "tʃ", "a"}))
print("\nsegment('tʃat'):", segment("tʃat", inv))
print("joined:", space_phonemes(segment("tʃat", inv)))

# context rules on the synthetic tables
for name, text in (("tka", "tan sang"), ("mlo", "rare"), ("zeb", "masa kwesa")):
    print(f"{name}: {text!r} -> {phonemize(text, *load_bundled(name))!r}")

# characters without a rule are an error unless passthrough is requested
try:
    g2p("a!b", rules)
except ConversionError as exc:
    print("\nerror:", exc)
print("passthrough:", phonemize("a!b", rules, inventory, passthrough=True))
