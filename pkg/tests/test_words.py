import itertools

from suspflow.words import lyndon_words, word_value


def _necklace_minima(ell, n):
    """Brute force: lexicographically minimal aperiodic words of length n."""
    out = []
    for w in itertools.product(range(ell), repeat=n):
        rots = [w[i:] + w[:i] for i in range(n)]
        if min(rots) == w and all(r != w for r in rots[1:]):
            out.append(w)
    return out


def test_matches_brute_force_small():
    for ell in (2, 3):
        for n in range(1, 9):
            assert list(lyndon_words(ell, n)) == _necklace_minima(ell, n)


def test_lexicographic_order():
    ws = list(lyndon_words(3, 7))
    assert ws == sorted(ws)


def test_word_value_base_expansion():
    assert word_value((1, 0, 2), 3) == 1 * 9 + 0 * 3 + 2
    assert word_value((0, 0, 1), 2) == 1


def test_counts_match_moebius_formula():
    # number of aperiodic necklaces: (1/n) sum_{d|n} mu(d) ell^{n/d}
    mu = {1: 1, 2: -1, 3: -1, 4: 0, 5: -1, 6: 1, 7: -1, 8: 0, 9: 0, 10: 1,
          11: -1, 12: 0}
    for ell in (2, 3, 4):
        for n in range(1, 11):
            divs = [d for d in range(1, n + 1) if n % d == 0]
            expect = sum(mu[d] * ell ** (n // d) for d in divs) // n
            assert sum(1 for _ in lyndon_words(ell, n)) == expect
