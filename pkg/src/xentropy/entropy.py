"""Exact n-gram entropy rates and excess entropy of delimiter-separated form streams.

A form distribution defines a stationary process: forms are drawn iid, each is
followed by the delimiter, and the results are concatenated.  Symbols in
different forms are independent, so every statistic can be computed from the
(form, position) pairs of single forms with the left context padded by
delimiters.  The position weights are p(s) / Z with Z = sum_s p(s) (|s| + 1).

Two routes are provided and kept deliberately separate:

* :func:`entropy_profile` sums ``h_n - h`` over n-gram orders, with every
  context table built by sort-based integer compaction in numpy.
* :func:`excess_entropy_window_oracle` builds the joint distribution of a past
  window and a future window around a cut point with plain dictionaries and
  returns their mutual information.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .core import Form, FormDistribution, Language, SourceDistribution, form_distribution

DELIM_ID = 0


@dataclass(frozen=True)
class EntropyProfile:
    h: tuple[float, ...]
    entropy_rate: float
    excess_entropy: float

    @property
    def max_order(self) -> int:
        return len(self.h)


class EncodedForms:
    """Integer-coded forms: token ids start at 1, id 0 is the delimiter."""

    def __init__(self, codes: np.ndarray, lengths: np.ndarray, probs: np.ndarray, vocab: list[str]):
        self.codes = codes
        self.lengths = lengths
        self.probs = probs
        self.vocab = vocab

    @classmethod
    def from_distribution(cls, fd: FormDistribution) -> EncodedForms:
        vocab: dict[str, int] = {}
        items = list(fd.items())
        width = max(len(f) for f, _ in items)
        codes = np.zeros((len(items), width), dtype=np.int64)
        lengths = np.empty(len(items), dtype=np.int64)
        probs = np.empty(len(items), dtype=float)
        for row, (form, p) in enumerate(items):
            for col, tok in enumerate(form):
                codes[row, col] = vocab.setdefault(tok, len(vocab) + 1)
            lengths[row] = len(form)
            probs[row] = p
        return cls(codes, lengths, probs, list(vocab))


def _compact(keys: np.ndarray) -> np.ndarray:
    _, inverse = np.unique(keys, return_inverse=True)
    return inverse.reshape(-1)


def batched_entropy_rates(codes: np.ndarray, lengths: np.ndarray, probs: np.ndarray,
                          max_order: int | None = None) -> np.ndarray:
    """n-gram entropy rates h_1..h_max_order for a batch of same-shape form tables.

    codes:   (B, F, L) token ids, 0 = delimiter, entries past each form's length ignored.
    lengths: (B, F) or (F,) form lengths (without the delimiter).
    probs:   (B, F) form probabilities, each row summing to 1.

    Returns a (B, max_order) array of rates in bits.  Languages in the batch never
    share context ids because the batch index seeds every context key.
    """
    codes = np.asarray(codes, dtype=np.int64)
    if codes.ndim == 2:
        codes = codes[None]
    B, F, L = codes.shape
    probs = np.broadcast_to(np.asarray(probs, dtype=float), (B, F))
    lengths = np.broadcast_to(np.asarray(lengths, dtype=np.int64), (B, F))
    ext = lengths + 1
    N = int(ext.max())
    if max_order is None:
        max_order = N + 1
    radix = int(codes.max(initial=0)) + 1

    # left padding of max_order delimiters, then the form, then its delimiter
    pad = max_order
    padded = np.zeros((B, F, pad + L + 1), dtype=np.int64)
    padded[:, :, pad:pad + L] = codes
    cols = np.arange(L + 1)
    padded[:, :, pad:][cols[None, None, :] >= lengths[:, :, None]] = DELIM_ID

    # one entry per (language, form, position) with t in 1..ext
    valid = cols[None, None, :] < ext[:, :, None]
    b_idx, f_idx, t_idx = np.nonzero(np.broadcast_to(valid, (B, F, L + 1)))
    z = np.sum(probs * ext, axis=1)
    weights = probs[b_idx, f_idx] / z[b_idx]
    col = pad + t_idx
    symbol = padded[b_idx, f_idx, col]

    rates = np.empty((B, max_order), dtype=float)
    ctx = b_idx.copy()
    for n in range(1, max_order + 1):
        if n > 1:
            ctx = _compact(ctx * radix + padded[b_idx, f_idx, col - (n - 1)])
        joint_keys = ctx * radix + symbol
        uniq, first, joint = np.unique(joint_keys, return_index=True, return_inverse=True)
        joint = joint.reshape(-1)
        p_joint = np.bincount(joint, weights=weights, minlength=uniq.size)
        p_ctx = np.bincount(ctx, weights=weights)
        ctx_of_joint = ctx[first]
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = -p_joint * np.log2(p_joint / p_ctx[ctx_of_joint])
        terms[p_joint <= 0] = 0.0
        rates[:, n - 1] = np.bincount(b_idx[first], weights=terms, minlength=B)
    return np.maximum(rates, 0.0)


def _profile_from_rates(rates: np.ndarray, n_ext: int) -> EntropyProfile:
    h = tuple(float(x) for x in rates)
    rate = h[n_ext]  # h_{N+1}
    excess = math.fsum(hn - rate for hn in h[:n_ext])
    return EntropyProfile(h=h, entropy_rate=rate, excess_entropy=max(excess, 0.0))


def profiles_from_arrays(codes: np.ndarray, lengths: np.ndarray, probs: np.ndarray) -> list[EntropyProfile]:
    """Entropy profiles for a batch of encoded form tables (see batched_entropy_rates)."""
    codes = np.asarray(codes)
    if codes.ndim == 2:
        codes = codes[None]
    n_ext = int(np.max(lengths)) + 1
    rates = batched_entropy_rates(codes, lengths, probs, max_order=n_ext + 1)
    return [_profile_from_rates(row, n_ext) for row in rates]


def excess_entropies_from_arrays(codes, lengths, probs) -> np.ndarray:
    """Vector of excess entropies for a batch of encoded form tables."""
    return np.array([p.excess_entropy for p in profiles_from_arrays(codes, lengths, probs)])


def position_weights(fd: FormDistribution) -> list[tuple[tuple[Form, int], float]]:
    """Stationary weight of each (form, position) pair, positions 1-based.

    Position |s| + 1 holds the delimiter.
    """
    z = math.fsum(p * (len(f) + 1) for f, p in fd.items())
    return [((form, t), p / z) for form, p in fd.items() for t in range(1, len(form) + 2)]


def ngram_entropy_rate(fd: FormDistribution, n: int) -> float:
    """Conditional entropy in bits of a symbol given the previous n - 1 symbols."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    enc = EncodedForms.from_distribution(fd)
    rates = batched_entropy_rates(enc.codes, enc.lengths, enc.probs[None], max_order=n)
    return float(rates[0, n - 1])


def entropy_profile(fd: FormDistribution) -> EntropyProfile:
    """h_1..h_{N+1}, entropy rate h = h_{N+1}, and E = sum_{n<=N} (h_n - h).

    N is the maximum extended form length (longest form plus its delimiter).
    """
    enc = EncodedForms.from_distribution(fd)
    n_ext = int(enc.lengths.max()) + 1
    rates = batched_entropy_rates(enc.codes, enc.lengths, enc.probs[None], max_order=n_ext + 2)[0]
    assert abs(rates[n_ext] - rates[n_ext + 1]) <= 1e-12, "entropy rate did not stabilize"
    return _profile_from_rates(rates[: n_ext + 1], n_ext)


def excess_entropy(language: Language, source: SourceDistribution) -> float:
    return entropy_profile(form_distribution(language, source)).excess_entropy


def excess_entropy_window_oracle(fd: FormDistribution) -> float:
    """Excess entropy as I[past window : future window] around a stationary cut.

    Windows are N symbols wide (N = max extended length), which always reaches
    the delimiter on both sides, so the windowed MI equals the full quantity.
    """
    delim = object()
    width = max(len(f) for f in fd.entries) + 1
    z = math.fsum(p * (len(f) + 1) for f, p in fd.items())

    joint: dict[tuple, float] = defaultdict(float)
    for form, p in fd.items():
        extended = list(form) + [delim]
        w = p / z
        for cut in range(len(extended)):
            past = tuple(extended[cut - k] if cut - k >= 0 else delim for k in range(width, 0, -1))
            future = tuple(extended[cut + k] if cut + k < len(extended) else delim for k in range(width))
            joint[past, future] += w

    past_marg: dict[tuple, float] = defaultdict(float)
    future_marg: dict[tuple, float] = defaultdict(float)
    for (past, future), w in joint.items():
        past_marg[past] += w
        future_marg[future] += w
    terms = [w * math.log2(w / (past_marg[pa] * future_marg[fu])) for (pa, fu), w in joint.items() if w > 0]
    return max(math.fsum(terms), 0.0)
