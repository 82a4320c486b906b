"""A short tour of the condensing game.

Run with ``python3 demos/condensing_tour.py``.
"""

from condense import contains, enumerate_witnesses, lemma_condense, render, value_set
from condense.bounds import dp_delta_bounds, exceptional_triples
from condense.search import Condenser


def show(title):
    print(f"\n== {title}")


show("Every value two digits can make")
table = value_set([2, 5])
small = sorted(v for v in table.values() if abs(v) <= 12)
print(f"{{2,5}} reaches {len(table)} values; the small ones:")
for v in small:
    print(f"  {str(v):>5} = {render(table.witness(v))}")

show("Several routes to one target")
for w in enumerate_witnesses([2, 3, 5], 13, limit=3):
    print(f"  13 = {render(w)}")

show("Four fours")
for t in (30, 64, 100):
    w = contains([4, 4, 4, 4], t)
    print(f"  {t} = {render(w) if w else 'not found within caps'}")

show("Which digit triples cannot make 1?")
eng = Condenser(use_lemmas=False)
stuck = sorted(t for t in exceptional_triples())
for t in stuck:
    w = eng.find(t, 1)
    verdict = render(w) if w else "no witness within caps"
    print(f"  {t}: case analysis fails; search says {verdict}")

show("Any four digits make 1, any seven make 4")
print("  {2,4,6,8} ->", render(lemma_condense(1, [2, 4, 6, 8])))
print("  seven 9s  ->", render(lemma_condense(4, [9] * 7)))

show("Upper bounds on how many digits a number needs")
table = dp_delta_bounds(30)
for n in (7, 12, 24, 30):
    e = table[n]
    how = "base case" if e.kind == "base" else f"{e.a} {'+' if e.kind == 'sum' else '*'} {e.b}"
    print(f"  n = {n:2d}: at most {e.bound} digits ({how})")
