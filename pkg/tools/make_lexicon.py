"""Regenerate the bundled Markov CV lexicon fixture (deterministic)."""

import sys

from xentropy.prng import SplitMix64, derive_seed

CLASS = {"p": "P", "t": "P", "k": "P", "s": "F", "f": "F", "m": "N", "n": "N",
         "a": "V", "i": "V", "u": "V"}
# strongly local transitions: each symbol has one or two likely successors
NEXT = {
    "^": "ptksfmn",
    "p": "aa", "t": "ii", "k": "uu", "s": "ai", "f": "uu", "m": "aa", "n": "ii",
    "a": "nmt", "i": "sk", "u": "pf",
}


def word(rng, length):
    out, prev = [], "^"
    while len(out) < length:
        choices = NEXT[prev]
        prev = choices[rng.below(len(choices))]
        out.append(prev)
    return "".join(out)


def main(n=48, seed=7):
    rng = SplitMix64(derive_seed(seed))
    seen = []
    while len(seen) < n:
        w = word(rng, 4 + rng.below(3))
        if w not in seen:
            seen.append(w)
    lines = ["# synthetic Markov CV lexicon: form, count, manner class per segment"]
    lines += [f"{w}\t1\t{''.join(CLASS[c] for c in w)}" for w in seen]
    return "\n".join(lines) + "\n"


if __name__ == "__main__":
    sys.stdout.write(main())
