"""The text-similarity primitives behind the region matcher.

Run from the repository root:  python demos/02_fuzzy_matching.py
"""

from docground import fuzzy_score, levenshtein, normalize, partial_ratio, sim, token_set_ratio

# Normalization: casefold, punctuation to spaces, collapsed whitespace.
for s in ("New  Delhi,", "Shri T.P. Singh", "No. 247/2024-Admin"):
    n = normalize(s)
    print(f"{s!r:28s} -> {n.normalized!r}  tokens={list(n.tokens)}")

# Edit distance and normalized similarity.
print("\nlevenshtein('kitten', 'sitting') =", levenshtein("kitten", "sitting"))
print("sim('date', 'data') =", sim("date", "data"))

# partial_ratio slides the answer across the longer text one character at
# a time and keeps the best same-length window.
print("\npartial_ratio('circular', 'the circular number') =",
      partial_ratio("circular", "the circular number"))
print("partial_ratio('date', 'data entry') =", partial_ratio("date", "data entry"))

# token_set_ratio ignores token order and duplication, so reordered or
# partially covered answers still score 1.0.
pairs = [
    ("new delhi", "delhi new"),
    ("singh", "shri t p singh"),
    ("alpha beta", "gamma delta"),
]
for a, b in pairs:
    print(f"token_set_ratio({a!r}, {b!r}) =", round(token_set_ratio(normalize(a), normalize(b)), 4))

# The fuzzy score is the better of the two views; OCR noise degrades it
# only gradually.
clean = fuzzy_score(normalize("31 march 2024"), normalize("31 march 2024 order"))
noisy = fuzzy_score(normalize("31 march 2024"), normalize("31 narch 2024 order"))
print(f"\nfuzzy score clean={clean:.4f} one-typo={noisy:.4f}")
